//! Double justification: alternate right- and left-justification of a
//! schedule, with modes fixed, until the makespan stops improving.

use super::{ActivityModeList, Schedule, Sgs};
use crate::model::{ActivityId, ProjectInstance};

/// Topological order of the real activities that always takes the eligible
/// activity with the smallest key. `forward` selects whether
/// eligibility follows predecessors (forward) or successors (backward).
fn priority_order<K: Ord>(
    instance: &ProjectInstance,
    key: impl Fn(ActivityId) -> K,
    forward: bool,
) -> Vec<ActivityId> {
    let jobs = instance.job_count();
    let mut pending: Vec<usize> = (0..=jobs + 1)
        .map(|j| {
            if (1..=jobs).contains(&j) {
                if forward {
                    instance.real_predecessors(j).count()
                } else {
                    instance.real_successors(j).count()
                }
            } else {
                usize::MAX
            }
        })
        .collect();
    let mut order = Vec::with_capacity(jobs);
    while order.len() < jobs {
        let next = (1..=jobs)
            .filter(|&j| pending[j] == 0)
            .min_by_key(|&j| (key(j), j))
            .expect("precedence graph is acyclic");
        pending[next] = usize::MAX;
        order.push(next);
        let released: Vec<_> = if forward {
            instance.real_successors(next).collect()
        } else {
            instance.real_predecessors(next).collect()
        };
        for j in released {
            pending[j] -= 1;
        }
    }
    order
}

/// Real activities by increasing start time, ties by lower id, kept
/// precedence-feasible.
pub fn start_order(schedule: &Schedule, instance: &ProjectInstance) -> Vec<ActivityId> {
    priority_order(instance, |j| schedule.start[j], true)
}

/// List whose reverse processes activities by decreasing finish time,
/// ties by lower id.
fn backward_list(schedule: &Schedule, instance: &ProjectInstance) -> Vec<ActivityId> {
    let mut order = priority_order(instance, |j| std::cmp::Reverse(schedule.finish[j]), false);
    order.reverse();
    order
}

impl Sgs<'_> {
    /// Improves `schedule` (the forward decode of `aml`) by double
    /// justification. No pass starts once `limit` schedules have been
    /// generated in total. Returns the input unchanged when nothing improves.
    pub fn double_justify(
        &mut self,
        aml: &ActivityModeList,
        schedule: &Schedule,
        limit: u64,
    ) -> (ActivityModeList, Schedule) {
        let instance = self.instance();
        let mut best_aml = aml.clone();
        let mut best = schedule.clone();
        while self.generated() < limit {
            let right = ActivityModeList::new(backward_list(&best, instance), aml.modes.clone());
            let Ok(right_schedule) = self.backward(&right, best.makespan) else {
                break;
            };
            let mut candidate = right_schedule;
            if self.generated() < limit {
                let left = ActivityModeList::new(start_order(&candidate, instance), aml.modes.clone());
                let left_schedule = self.forward(&left);
                if left_schedule.makespan <= candidate.makespan {
                    candidate = left_schedule;
                }
            }
            if candidate.makespan >= best.makespan {
                break;
            }
            best_aml = ActivityModeList::new(start_order(&candidate, instance), aml.modes.clone());
            best = candidate;
        }
        (best_aml, best)
    }
}

/// Decodes `aml` forward and double-justifies the result, spending at most
/// `budget` justification passes. The initial decode is not charged.
pub fn double_justify(
    aml: &ActivityModeList,
    instance: &ProjectInstance,
    budget: u64,
) -> (ActivityModeList, Schedule) {
    let mut sgs = Sgs::new(instance);
    let schedule = sgs.forward(aml);
    sgs.double_justify(aml, &schedule, 1 + budget)
}
