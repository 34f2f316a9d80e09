//! Serial schedule generation, forward and backward.

use super::{nonrenewable_excess, ActivityModeList, Schedule, ScheduleError};
use crate::model::{Mode, ProjectInstance};

/// Serial schedule generator bound to one instance. Counts every schedule
/// it generates; that count is the budget unit of the solver.
#[derive(Debug, Clone)]
pub struct Sgs<'a> {
    instance: &'a ProjectInstance,
    generated: u64,
    usage: Vec<u32>,
    horizon: usize,
}

impl<'a> Sgs<'a> {
    pub fn new(instance: &'a ProjectInstance) -> Self {
        Self {
            instance,
            generated: 0,
            usage: Vec::new(),
            horizon: 0,
        }
    }

    pub fn instance(&self) -> &'a ProjectInstance {
        self.instance
    }

    /// Number of schedules generated so far.
    pub fn generated(&self) -> u64 {
        self.generated
    }

    fn reset_profile(&mut self, horizon: usize) {
        self.horizon = horizon;
        self.usage.clear();
        self.usage
            .resize(self.instance.renewable_count() * horizon, 0);
    }

    /// First period in `from..from + d` where `mode` does not fit, if any.
    fn conflict(&self, from: usize, mode: &Mode) -> Option<usize> {
        let d = mode.duration as usize;
        for (k, (&req, &cap)) in mode
            .renewable
            .iter()
            .zip(&self.instance.renewable_capacity)
            .enumerate()
        {
            if req == 0 {
                continue;
            }
            let row = &self.usage[k * self.horizon..(k + 1) * self.horizon];
            if let Some(off) = row[from..from + d].iter().position(|&u| u + req > cap) {
                return Some(from + off);
            }
        }
        None
    }

    fn book(&mut self, from: usize, mode: &Mode) {
        let d = mode.duration as usize;
        for (k, &req) in mode.renewable.iter().enumerate() {
            if req == 0 {
                continue;
            }
            let row = &mut self.usage[k * self.horizon..(k + 1) * self.horizon];
            for u in &mut row[from..from + d] {
                *u += req;
            }
        }
    }

    fn finish(&self, aml: &ActivityModeList, start: Vec<u32>, finish: Vec<u32>) -> Schedule {
        let end = self.instance.end();
        let excess = nonrenewable_excess(&aml.modes, self.instance).unwrap_or(f64::INFINITY);
        Schedule {
            makespan: start[end],
            start,
            finish,
            modes: aml.modes.clone(),
            nonrenewable_excess: excess,
            feasible: excess == 0.0,
        }
    }

    /// Schedules activities in list order, each at the earliest
    /// precedence- and renewable-feasible start. Nonrenewable capacities are
    /// not enforced, only measured.
    ///
    /// # Panics
    ///
    /// If a mode requests more of a renewable resource than its capacity
    /// (such modes do not survive reduction), or if the list is not
    /// precedence-feasible.
    pub fn forward(&mut self, aml: &ActivityModeList) -> Schedule {
        let p = self.instance;
        let n = p.activities.len();
        let end = n - 1;
        let total: usize = aml
            .order
            .iter()
            .map(|&j| p.mode(j, aml.modes[j]).duration as usize)
            .sum();
        self.reset_profile(total);
        self.generated += 1;

        let mut start = vec![0u32; n];
        let mut finish = vec![0u32; n];
        let mut placed = vec![false; n];
        placed[0] = true;
        for &j in &aml.order {
            let mode = p.mode(j, aml.modes[j]);
            assert!(
                mode.renewable
                    .iter()
                    .zip(&p.renewable_capacity)
                    .all(|(q, c)| q <= c),
                "activity {j} mode {} exceeds a renewable capacity",
                aml.modes[j] + 1
            );
            let mut t = p.activities[j]
                .predecessors
                .iter()
                .map(|&i| {
                    assert!(placed[i], "activity {j} listed before predecessor {i}");
                    finish[i]
                })
                .max()
                .unwrap_or(0) as usize;
            while let Some(bad) = self.conflict(t, mode) {
                t = bad + 1;
            }
            self.book(t, mode);
            start[j] = t as u32;
            finish[j] = t as u32 + mode.duration;
            placed[j] = true;
        }
        let last = p.activities[end]
            .predecessors
            .iter()
            .map(|&i| finish[i])
            .max()
            .unwrap_or(0);
        start[end] = last;
        finish[end] = last;
        self.finish(aml, start, finish)
    }

    /// Schedules activities in reverse list order, each finishing as late as
    /// possible but no later than its successors' starts, with the sink
    /// pinned at `deadline`. The result is shifted so the earliest start is 0.
    pub fn backward(
        &mut self,
        aml: &ActivityModeList,
        deadline: u32,
    ) -> Result<Schedule, ScheduleError> {
        let p = self.instance;
        let n = p.activities.len();
        let end = n - 1;
        self.reset_profile(deadline as usize);
        self.generated += 1;

        let mut start = vec![0u32; n];
        let mut finish = vec![0u32; n];
        let mut placed = vec![false; n];
        start[end] = deadline;
        finish[end] = deadline;
        placed[end] = true;
        for &j in aml.order.iter().rev() {
            let mode = p.mode(j, aml.modes[j]);
            let d = mode.duration as usize;
            let latest = p.activities[j]
                .successors
                .iter()
                .map(|&s| {
                    assert!(placed[s], "activity {j} listed after successor {s}");
                    start[s]
                })
                .min()
                .unwrap_or(deadline) as usize;
            let mut f = latest;
            loop {
                if f < d {
                    return Err(ScheduleError::DeadlineTooTight {
                        activity: j,
                        deadline,
                    });
                }
                match self.conflict(f - d, mode) {
                    // Move the window so it ends at the conflicting period.
                    Some(bad) => f = bad,
                    None => break,
                }
            }
            self.book(f - d, mode);
            start[j] = (f - d) as u32;
            finish[j] = f as u32;
            placed[j] = true;
        }

        let shift = aml.order.iter().map(|&j| start[j]).min().unwrap_or(0);
        for &j in &aml.order {
            start[j] -= shift;
            finish[j] -= shift;
        }
        let last = p.activities[end]
            .predecessors
            .iter()
            .map(|&i| finish[i])
            .max()
            .unwrap_or(0);
        start[0] = 0;
        finish[0] = 0;
        start[end] = last;
        finish[end] = last;
        Ok(self.finish(aml, start, finish))
    }
}

/// One-shot forward decode.
pub fn decode_forward(aml: &ActivityModeList, instance: &ProjectInstance) -> Schedule {
    Sgs::new(instance).forward(aml)
}

/// One-shot backward decode against `deadline`.
pub fn decode_backward(
    aml: &ActivityModeList,
    instance: &ProjectInstance,
    deadline: u32,
) -> Result<Schedule, ScheduleError> {
    Sgs::new(instance).backward(aml, deadline)
}
