//! Activity-mode lists, their decoding into schedules, the nonrenewable
//! infeasibility measure and the fitness used to rank individuals.

mod justify;
mod sgs;
mod verify;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ActivityId, ProjectInstance};

pub use justify::{start_order, double_justify};
pub use sgs::{decode_backward, decode_forward, Sgs};
pub use verify::{verify_schedule, ScheduleViolation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("nonrenewable resource {resource} has zero capacity but is consumed")]
    ZeroCapacity { resource: usize },
    #[error("no right-justified placement of activity {activity} meets deadline {deadline}")]
    DeadlineTooTight { activity: ActivityId, deadline: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmlError {
    #[error("activity list is not a permutation of the real activities")]
    NotPermutation,
    #[error("activity {successor} is listed before its predecessor {predecessor}")]
    PrecedenceOrder {
        predecessor: ActivityId,
        successor: ActivityId,
    },
    #[error("activity {activity} has no mode {mode}")]
    UnknownMode { activity: ActivityId, mode: usize },
    #[error("mode vector has length {found}, expected {expected}")]
    ModeLength { found: usize, expected: usize },
}

/// A precedence-feasible order of the real activities together with one
/// mode per activity.
///
/// `modes` is indexed by activity id (dummies included, always mode 0) so
/// that moving an activity inside `order` never has to move its mode; use
/// [`ActivityModeList::mode_list`] for the position-aligned view.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActivityModeList {
    pub order: Vec<ActivityId>,
    pub modes: Vec<usize>,
}

impl ActivityModeList {
    pub fn new(order: Vec<ActivityId>, modes: Vec<usize>) -> Self {
        Self { order, modes }
    }

    /// Builds a list from modes aligned with `order`.
    pub fn from_aligned(order: Vec<ActivityId>, aligned_modes: &[usize]) -> Self {
        let mut modes = vec![0; order.len() + 2];
        for (&j, &m) in order.iter().zip(aligned_modes) {
            modes[j] = m;
        }
        Self { order, modes }
    }

    /// Activities in increasing id order, each in its first mode.
    pub fn identity(instance: &ProjectInstance) -> Self {
        Self {
            order: instance.real_activities().collect(),
            modes: vec![0; instance.activities.len()],
        }
    }

    /// Mode of the activity at each position of `order`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.order.iter().map(|&j| self.modes[j]).collect()
    }

    pub fn position_of(&self, activity: ActivityId) -> Option<usize> {
        self.order.iter().position(|&j| j == activity)
    }

    /// Checks permutation, precedence order and mode validity.
    pub fn check(&self, instance: &ProjectInstance) -> Result<(), AmlError> {
        let n = instance.activities.len();
        if self.modes.len() != n {
            return Err(AmlError::ModeLength {
                found: self.modes.len(),
                expected: n,
            });
        }
        let jobs = instance.job_count();
        let mut position = vec![usize::MAX; n];
        if self.order.len() != jobs {
            return Err(AmlError::NotPermutation);
        }
        for (p, &j) in self.order.iter().enumerate() {
            if !(1..=jobs).contains(&j) || position[j] != usize::MAX {
                return Err(AmlError::NotPermutation);
            }
            position[j] = p;
        }
        for j in 1..=jobs {
            for pred in instance.real_predecessors(j) {
                if position[pred] > position[j] {
                    return Err(AmlError::PrecedenceOrder {
                        predecessor: pred,
                        successor: j,
                    });
                }
            }
        }
        for (j, &m) in self.modes.iter().enumerate() {
            if m >= instance.activities[j].modes.len() {
                return Err(AmlError::UnknownMode { activity: j, mode: m });
            }
        }
        Ok(())
    }
}

/// Start and finish times for every activity `0..=J+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: Vec<u32>,
    pub finish: Vec<u32>,
    pub modes: Vec<usize>,
    pub makespan: u32,
    pub nonrenewable_excess: f64,
    /// Precedence, renewable and nonrenewable constraints all hold.
    pub feasible: bool,
}

/// Nonrenewable infeasibility degree of a mode assignment:
/// the sum over resources of the relative overshoot of total consumption
/// above capacity. Zero exactly when every capacity is respected.
pub fn nonrenewable_excess(modes: &[usize], instance: &ProjectInstance) -> Result<f64, ScheduleError> {
    let mut excess = 0.0;
    for (l, &cap) in instance.nonrenewable_capacity.iter().enumerate() {
        let used: u64 = instance
            .activities
            .iter()
            .zip(modes)
            .map(|(a, &m)| u64::from(a.modes[m].nonrenewable[l]))
            .sum();
        let cap = u64::from(cap);
        if used > cap {
            if cap == 0 {
                return Err(ScheduleError::ZeroCapacity { resource: l });
            }
            excess += (used - cap) as f64 / cap as f64;
        }
    }
    Ok(excess)
}

/// Scalar fitness, lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub scalar: f64,
    pub feasible: bool,
}

impl FitnessValue {
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.scalar.total_cmp(&other.scalar)
    }

    pub fn is_better_than(&self, other: &Self) -> bool {
        self.cmp_total(other) == Ordering::Less
    }
}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible {
            write!(f, "{}", self.scalar)
        } else {
            write!(f, "{} (infeasible)", self.scalar)
        }
    }
}

/// Makespan for nonrenewable-feasible schedules, otherwise
/// `D_max * (1 + v_E)` where `D_max` is the sum of the longest mode
/// durations (at least 1). Every infeasible value exceeds every feasible
/// one because serial schedules never last longer than `D_max`.
pub fn fitness_of(schedule: &Schedule, instance: &ProjectInstance) -> FitnessValue {
    if schedule.nonrenewable_excess == 0.0 {
        FitnessValue {
            scalar: f64::from(schedule.makespan),
            feasible: true,
        }
    } else {
        let d_max = instance.max_duration_sum().max(1) as f64;
        FitnessValue {
            scalar: d_max * (1.0 + schedule.nonrenewable_excess),
            feasible: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Mode;

    fn resources(caps: Vec<u32>, consumption: &[u32]) -> (ProjectInstance, Vec<usize>) {
        let modes = vec![vec![Mode::new(1, vec![], consumption.to_vec())]];
        let p = ProjectInstance::from_real_activities(modes, &[], vec![], caps);
        (p, vec![0, 0, 0])
    }

    #[test]
    fn excess_two_resources() {
        let (p, m) = resources(vec![10, 8], &[12, 5]);
        assert!((nonrenewable_excess(&m, &p).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn excess_zero_when_within_capacity() {
        let (p, m) = resources(vec![10, 8], &[10, 8]);
        assert_eq!(nonrenewable_excess(&m, &p).unwrap(), 0.0);
    }

    #[test]
    fn excess_single_resource_doubled() {
        let (p, m) = resources(vec![4], &[8]);
        assert_eq!(nonrenewable_excess(&m, &p).unwrap(), 1.0);
    }

    #[test]
    fn excess_zero_capacity() {
        let (p, m) = resources(vec![0], &[1]);
        assert_eq!(
            nonrenewable_excess(&m, &p),
            Err(ScheduleError::ZeroCapacity { resource: 0 })
        );
        let (p, m) = resources(vec![0], &[0]);
        assert_eq!(nonrenewable_excess(&m, &p), Ok(0.0));
    }

    fn schedule_with(makespan: u32, excess: f64) -> Schedule {
        Schedule {
            start: vec![],
            finish: vec![],
            modes: vec![],
            makespan,
            nonrenewable_excess: excess,
            feasible: excess == 0.0,
        }
    }

    #[test]
    fn fitness_forms() {
        // D_max = 50 from a single activity with a 50-period mode.
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(50, vec![], vec![]), Mode::new(3, vec![], vec![])]],
            &[],
            vec![],
            vec![],
        );
        let f = fitness_of(&schedule_with(17, 0.0), &p);
        assert_eq!(f, FitnessValue { scalar: 17.0, feasible: true });
        let g = fitness_of(&schedule_with(17, 0.2), &p);
        assert!((g.scalar - 60.0).abs() < 1e-9);
        assert!(!g.feasible);
        assert!(f.is_better_than(&g));
        let worst_feasible = fitness_of(&schedule_with(50, 0.0), &p);
        let barely = fitness_of(&schedule_with(1, 1e-9), &p);
        assert!(worst_feasible.is_better_than(&barely));
    }

    #[test]
    fn aml_check() {
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(1, vec![], vec![])]; 3],
            &[(1, 3)],
            vec![],
            vec![],
        );
        assert!(ActivityModeList::new(vec![1, 2, 3], vec![0; 5]).check(&p).is_ok());
        assert!(ActivityModeList::new(vec![2, 1, 3], vec![0; 5]).check(&p).is_ok());
        assert_eq!(
            ActivityModeList::new(vec![3, 2, 1], vec![0; 5]).check(&p),
            Err(AmlError::PrecedenceOrder { predecessor: 1, successor: 3 })
        );
        assert_eq!(
            ActivityModeList::new(vec![1, 1, 3], vec![0; 5]).check(&p),
            Err(AmlError::NotPermutation)
        );
        assert_eq!(
            ActivityModeList::new(vec![1, 2, 3], vec![0, 1, 0, 0, 0]).check(&p),
            Err(AmlError::UnknownMode { activity: 1, mode: 1 })
        );
        let aml = ActivityModeList::from_aligned(vec![2, 1, 3], &[0, 0, 0]);
        assert_eq!(aml.modes.len(), 5);
        assert_eq!(aml.position_of(3), Some(2));
    }
}
