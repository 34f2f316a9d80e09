//! Delete-then-insert random walk over an activity-mode list.
//!
//! Each real activity, in increasing id order, is picked with probability
//! `rw`. A picked activity gets a new mode (shortest duration while the
//! mode assignment is nonrenewable-feasible, least total nonrenewable
//! consumption otherwise), is removed from the list and reinserted at a
//! uniformly random slot that keeps the list precedence-feasible. Moves are
//! committed without evaluating the schedule.

use rand::Rng;

use crate::model::{ActivityId, ProjectInstance};
use crate::schedule::{nonrenewable_excess, ActivityModeList};

/// Inclusive range of 1-based slots where an activity may be reinserted into
/// a list it was removed from. Slot `p` means the activity ends up at
/// position `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionWindow {
    pub lo: usize,
    pub hi: usize,
}

impl InsertionWindow {
    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

pub fn insertion_window(
    al_after_delete: &[ActivityId],
    activity: ActivityId,
    instance: &ProjectInstance,
) -> InsertionWindow {
    let position = |j: ActivityId| al_after_delete.iter().position(|&x| x == j);
    let lo = instance
        .real_predecessors(activity)
        .filter_map(position)
        .max()
        .map_or(1, |p| p + 2);
    let hi = instance
        .real_successors(activity)
        .filter_map(position)
        .min()
        .map_or(al_after_delete.len() + 1, |p| p + 1);
    debug_assert!(lo <= hi, "list was not precedence-feasible");
    InsertionWindow { lo, hi }
}

/// Mode chosen for `activity` under the current mode assignment of `aml`.
/// Ties go to the lowest mode index.
pub fn reassign_mode(aml: &ActivityModeList, activity: ActivityId, instance: &ProjectInstance) -> usize {
    let modes = &instance.activities[activity].modes;
    let excess = nonrenewable_excess(&aml.modes, instance).unwrap_or(f64::INFINITY);
    let best = if excess == 0.0 {
        modes.iter().enumerate().min_by_key(|(m, mode)| (mode.duration, *m))
    } else {
        modes
            .iter()
            .enumerate()
            .min_by_key(|(m, mode)| (mode.nonrenewable_sum(), *m))
    };
    best.map(|(m, _)| m).expect("activity has at least one mode")
}

/// Walk options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirwParams {
    /// Probability of moving each activity.
    pub rw: f64,
    /// Leave the highest-numbered real activity alone.
    pub skip_last: bool,
}

impl DirwParams {
    pub fn new(rw: f64) -> Self {
        Self { rw, skip_last: false }
    }
}

/// Result of one pass, with the number of activities that were moved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirwOutcome {
    pub aml: ActivityModeList,
    pub moves: usize,
}

pub fn dirw_pass_with(
    aml: &ActivityModeList,
    instance: &ProjectInstance,
    params: DirwParams,
    rng: &mut impl Rng,
) -> DirwOutcome {
    let mut work = aml.clone();
    let mut moves = 0;
    let last = if params.skip_last {
        instance.job_count().saturating_sub(1)
    } else {
        instance.job_count()
    };
    for activity in 1..=last {
        let q: f64 = rng.random();
        if q >= params.rw {
            continue;
        }
        moves += 1;
        work.modes[activity] = reassign_mode(&work, activity, instance);
        let pos = work
            .position_of(activity)
            .expect("activity list holds every real activity");
        work.order.remove(pos);
        let window = insertion_window(&work.order, activity, instance);
        let slot = rng.random_range(window.lo..=window.hi);
        work.order.insert(slot - 1, activity);
    }
    DirwOutcome { aml: work, moves }
}

/// One random-walk pass with acceptance rate `rw` over every real activity.
pub fn dirw_pass(
    aml: &ActivityModeList,
    instance: &ProjectInstance,
    rw: f64,
    rng: &mut impl Rng,
) -> ActivityModeList {
    dirw_pass_with(aml, instance, DirwParams::new(rw), rng).aml
}
