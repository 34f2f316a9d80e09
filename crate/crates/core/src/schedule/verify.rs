//! Independent schedule checker. Deliberately shares nothing with the
//! generation schemes: it rebuilds resource usage period by period from the
//! start times alone.

use std::fmt;

use super::Schedule;
use crate::model::{ActivityId, ProjectInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    Shape,
    UnknownMode { activity: ActivityId },
    SourceNotAtZero,
    Duration { activity: ActivityId },
    Precedence { predecessor: ActivityId, successor: ActivityId },
    Renewable { resource: usize, period: u32, usage: u64, capacity: u32 },
    Nonrenewable { resource: usize, usage: u64, capacity: u32 },
    Makespan { recorded: u32, actual: u32 },
}

impl ScheduleViolation {
    /// Precedence and renewable violations; the ones a decoder must never
    /// produce.
    pub fn is_structural(&self) -> bool {
        !matches!(self, ScheduleViolation::Nonrenewable { .. })
    }
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape => write!(f, "schedule vectors do not match the instance"),
            Self::UnknownMode { activity } => write!(f, "activity {activity} has an unknown mode"),
            Self::SourceNotAtZero => write!(f, "dummy source does not start at 0"),
            Self::Duration { activity } => {
                write!(f, "activity {activity} finish differs from start plus duration")
            }
            Self::Precedence { predecessor, successor } => {
                write!(f, "activity {successor} starts before {predecessor} finishes")
            }
            Self::Renewable { resource, period, usage, capacity } => write!(
                f,
                "renewable resource {} uses {usage} > {capacity} in period {period}",
                resource + 1
            ),
            Self::Nonrenewable { resource, usage, capacity } => write!(
                f,
                "nonrenewable resource {} consumes {usage} > {capacity}",
                resource + 1
            ),
            Self::Makespan { recorded, actual } => {
                write!(f, "recorded makespan {recorded}, actual {actual}")
            }
        }
    }
}

/// Lists every constraint `schedule` violates under `modes` (indexed by
/// activity id).
pub fn verify_schedule(
    schedule: &Schedule,
    modes: &[usize],
    instance: &ProjectInstance,
) -> Vec<ScheduleViolation> {
    let n = instance.activities.len();
    if schedule.start.len() != n || schedule.finish.len() != n || modes.len() != n {
        return vec![ScheduleViolation::Shape];
    }
    let mut out = Vec::new();
    for (j, &m) in modes.iter().enumerate() {
        if m >= instance.activities[j].modes.len() {
            out.push(ScheduleViolation::UnknownMode { activity: j });
        }
    }
    if !out.is_empty() {
        return out;
    }

    if schedule.start[0] != 0 {
        out.push(ScheduleViolation::SourceNotAtZero);
    }
    let duration = |j: usize| instance.activities[j].modes[modes[j]].duration;
    for j in 0..n {
        if u64::from(schedule.start[j]) + u64::from(duration(j)) != u64::from(schedule.finish[j]) {
            out.push(ScheduleViolation::Duration { activity: j });
        }
    }
    for (i, act) in instance.activities.iter().enumerate() {
        for &j in &act.successors {
            if schedule.finish[i] > schedule.start[j] {
                out.push(ScheduleViolation::Precedence { predecessor: i, successor: j });
            }
        }
    }

    let horizon = schedule.finish.iter().copied().max().unwrap_or(0);
    for (k, &cap) in instance.renewable_capacity.iter().enumerate() {
        for t in 0..horizon {
            let usage: u64 = (0..n)
                .filter(|&j| schedule.start[j] <= t && t < schedule.finish[j])
                .map(|j| u64::from(instance.activities[j].modes[modes[j]].renewable[k]))
                .sum();
            if usage > u64::from(cap) {
                out.push(ScheduleViolation::Renewable { resource: k, period: t, usage, capacity: cap });
            }
        }
    }
    for (l, &cap) in instance.nonrenewable_capacity.iter().enumerate() {
        let usage: u64 = (0..n)
            .map(|j| u64::from(instance.activities[j].modes[modes[j]].nonrenewable[l]))
            .sum();
        if usage > u64::from(cap) {
            out.push(ScheduleViolation::Nonrenewable { resource: l, usage, capacity: cap });
        }
    }
    if schedule.makespan != horizon {
        out.push(ScheduleViolation::Makespan { recorded: schedule.makespan, actual: horizon });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Mode;

    fn chain() -> ProjectInstance {
        ProjectInstance::from_real_activities(
            vec![
                vec![Mode::new(2, vec![1], vec![3])],
                vec![Mode::new(2, vec![1], vec![3])],
            ],
            &[(1, 2)],
            vec![1],
            vec![5],
        )
    }

    fn schedule(start: Vec<u32>, finish: Vec<u32>) -> Schedule {
        Schedule {
            makespan: *finish.last().unwrap(),
            start,
            finish,
            modes: vec![0; 4],
            nonrenewable_excess: 0.0,
            feasible: true,
        }
    }

    #[test]
    fn precedence_violation_listed() {
        let p = chain();
        let s = schedule(vec![0, 0, 1, 3], vec![0, 2, 3, 3]);
        let v = verify_schedule(&s, &[0; 4], &p);
        assert!(v.contains(&ScheduleViolation::Precedence { predecessor: 1, successor: 2 }));
        // Both activities overlap in period 1 on a capacity-1 resource.
        assert!(v.contains(&ScheduleViolation::Renewable { resource: 0, period: 1, usage: 2, capacity: 1 }));
        assert!(v.contains(&ScheduleViolation::Nonrenewable { resource: 0, usage: 6, capacity: 5 }));
    }

    #[test]
    fn renewable_violation_without_precedence() {
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(2, vec![1], vec![])]; 2],
            &[],
            vec![1],
            vec![],
        );
        let s = schedule(vec![0, 0, 0, 2], vec![0, 2, 2, 2]);
        let v = verify_schedule(&s, &[0; 4], &p);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| matches!(x, ScheduleViolation::Renewable { resource: 0, usage: 2, .. })));
    }

    #[test]
    fn clean_schedule() {
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(2, vec![1], vec![])]; 2],
            &[(1, 2)],
            vec![1],
            vec![],
        );
        let s = schedule(vec![0, 0, 2, 4], vec![0, 2, 4, 4]);
        assert!(verify_schedule(&s, &[0; 4], &p).is_empty());
        let mut bad = s.clone();
        bad.makespan = 5;
        assert_eq!(
            verify_schedule(&bad, &[0; 4], &p),
            vec![ScheduleViolation::Makespan { recorded: 5, actual: 4 }]
        );
    }
}
