//! Exhaustive optimum for tiny instances.
//!
//! Enumerates every nonrenewable-feasible mode assignment and every
//! precedence-feasible activity order, scheduling each order serially with
//! a small incremental generator of its own. Serial generation over all
//! orders reaches every active schedule, and some optimal schedule is
//! active, so the minimum is the optimum.

use crate::model::ProjectInstance;
use crate::schedule::{decode_forward, verify_schedule, ActivityModeList, Schedule};

pub const MAX_ACTIVITIES: usize = 7;
pub const MAX_MODES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for enumeration ({activities} activities, up to {modes} modes)")]
    TooLarge { activities: usize, modes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal {
        makespan: u32,
        aml: ActivityModeList,
        schedule: Schedule,
    },
    Infeasible,
}

impl OracleOutcome {
    pub fn makespan(&self) -> Option<u32> {
        match self {
            OracleOutcome::Optimal { makespan, .. } => Some(*makespan),
            OracleOutcome::Infeasible => None,
        }
    }
}

struct Search<'a> {
    p: &'a ProjectInstance,
    jobs: usize,
    horizon: usize,
    modes: Vec<usize>,
    best: u32,
    best_solution: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone)]
struct Partial {
    finish: Vec<u32>,
    placed: Vec<bool>,
    /// usage[k][t]
    usage: Vec<Vec<u32>>,
    order: Vec<usize>,
    latest: u32,
}

impl Search<'_> {
    fn modes_rec(&mut self, j: usize, consumed: &mut Vec<u64>) {
        if j > self.jobs {
            let partial = Partial {
                finish: vec![0; self.jobs + 2],
                placed: vec![false; self.jobs + 2],
                usage: vec![vec![0; self.horizon]; self.p.renewable_count()],
                order: Vec::with_capacity(self.jobs),
                latest: 0,
            };
            self.orders_rec(partial);
            return;
        }
        for m in 0..self.p.activities[j].modes.len() {
            let mode = &self.p.activities[j].modes[m];
            if mode.renewable.iter().zip(&self.p.renewable_capacity).any(|(q, c)| q > c) {
                continue;
            }
            let fits = mode
                .nonrenewable
                .iter()
                .zip(consumed.iter())
                .zip(&self.p.nonrenewable_capacity)
                .all(|((&q, &used), &cap)| used + u64::from(q) <= u64::from(cap));
            if !fits {
                continue;
            }
            for (c, &q) in consumed.iter_mut().zip(&mode.nonrenewable) {
                *c += u64::from(q);
            }
            self.modes[j] = m;
            self.modes_rec(j + 1, consumed);
            for (c, &q) in consumed.iter_mut().zip(&mode.nonrenewable) {
                *c -= u64::from(q);
            }
        }
    }

    fn orders_rec(&mut self, state: Partial) {
        if state.latest >= self.best {
            return;
        }
        if state.order.len() == self.jobs {
            self.best = state.latest;
            self.best_solution = Some((state.order.clone(), self.modes.clone()));
            return;
        }
        for j in 1..=self.jobs {
            if state.placed[j] {
                continue;
            }
            let preds = &self.p.activities[j].predecessors;
            if !preds.iter().all(|&i| i == 0 || state.placed[i]) {
                continue;
            }
            let mode = &self.p.activities[j].modes[self.modes[j]];
            let d = mode.duration as usize;
            let mut t = preds.iter().map(|&i| state.finish[i]).max().unwrap_or(0) as usize;
            // Jump past the last overloaded period until the window fits.
            while let Some(bad) = (t..t + d).rev().find(|&s| {
                mode.renewable
                    .iter()
                    .enumerate()
                    .any(|(k, &req)| state.usage[k][s] + req > self.p.renewable_capacity[k])
            }) {
                t = bad + 1;
            }
            let mut next = state.clone();
            for (k, &req) in mode.renewable.iter().enumerate() {
                for s in t..t + d {
                    next.usage[k][s] += req;
                }
            }
            let f = (t + d) as u32;
            next.finish[j] = f;
            next.placed[j] = true;
            next.order.push(j);
            next.latest = next.latest.max(f);
            self.orders_rec(next);
        }
    }
}

/// Optimal makespan of a tiny instance, or `Infeasible` when no mode
/// assignment satisfies the nonrenewable capacities. The returned schedule
/// is re-derived with the forward decoder and checked by the verifier.
pub fn brute_force_optimum(instance: &ProjectInstance) -> Result<OracleOutcome, OracleError> {
    let jobs = instance.job_count();
    let modes = instance.activities.iter().map(|a| a.modes.len()).max().unwrap_or(0);
    if jobs > MAX_ACTIVITIES || modes > MAX_MODES {
        return Err(OracleError::TooLarge { activities: jobs, modes });
    }
    let horizon = instance
        .real_activities()
        .map(|j| instance.activities[j].max_duration() as usize)
        .sum::<usize>()
        + 1;
    let mut search = Search {
        p: instance,
        jobs,
        horizon,
        modes: vec![0; jobs + 2],
        best: u32::MAX,
        best_solution: None,
    };
    search.modes_rec(1, &mut vec![0; instance.nonrenewable_count()]);

    let Some((order, modes)) = search.best_solution else {
        return Ok(OracleOutcome::Infeasible);
    };
    let aml = ActivityModeList::new(order, modes);
    let schedule = decode_forward(&aml, instance);
    let violations = verify_schedule(&schedule, &aml.modes, instance);
    assert!(violations.is_empty(), "oracle schedule fails verification: {violations:?}");
    assert_eq!(schedule.makespan, search.best, "oracle and decoder disagree");
    Ok(OracleOutcome::Optimal {
        makespan: search.best,
        aml,
        schedule,
    })
}
