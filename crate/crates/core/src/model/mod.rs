//! Immutable problem representation for the multi-mode resource-constrained
//! project scheduling problem.
//!
//! Activities are numbered `0..=J+1`. Activity `0` is the dummy source and
//! `J+1` the dummy sink; both carry a single zero-duration mode with no
//! resource requests. Numbering is topological, so every precedence pair
//! `(i, j)` satisfies `i < j`.

mod generate;
mod reduce;

use std::collections::VecDeque;
use std::fmt;

pub use generate::{generate_tiny_instance, TinyInstanceBounds};
pub use reduce::{reduce_instance, ReductionError, ReductionReport};

/// Index of an activity, `0..=J+1`.
pub type ActivityId = usize;

/// One execution mode of an activity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mode {
    pub duration: u32,
    /// Per-period request for each renewable resource.
    pub renewable: Vec<u32>,
    /// Total consumption of each nonrenewable resource.
    pub nonrenewable: Vec<u32>,
}

impl Mode {
    pub fn new(duration: u32, renewable: Vec<u32>, nonrenewable: Vec<u32>) -> Self {
        Self {
            duration,
            renewable,
            nonrenewable,
        }
    }

    /// A zero-duration mode without any requests, as used by the dummies.
    pub fn dummy(renewables: usize, nonrenewables: usize) -> Self {
        Self::new(0, vec![0; renewables], vec![0; nonrenewables])
    }

    pub fn nonrenewable_sum(&self) -> u64 {
        self.nonrenewable.iter().map(|&r| u64::from(r)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    pub modes: Vec<Mode>,
    /// 1-based mode number in the source instance for each entry of `modes`.
    pub mode_origin: Vec<usize>,
    pub successors: Vec<ActivityId>,
    pub predecessors: Vec<ActivityId>,
}

impl Activity {
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn min_duration(&self) -> u32 {
        self.modes.iter().map(|m| m.duration).min().unwrap_or(0)
    }

    pub fn max_duration(&self) -> u32 {
        self.modes.iter().map(|m| m.duration).max().unwrap_or(0)
    }
}

/// A multi-mode project with renewable and nonrenewable resources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectInstance {
    pub activities: Vec<Activity>,
    pub renewable_capacity: Vec<u32>,
    pub nonrenewable_capacity: Vec<u32>,
    /// 0-based index in the source instance of each surviving nonrenewable
    /// resource.
    pub nonrenewable_origin: Vec<usize>,
    /// Horizon carried over from the source file. The solver never reads it.
    pub horizon: u32,
}

impl ProjectInstance {
    /// Builds an instance from per-activity modes and successor lists, both
    /// covering the dummies. Predecessor lists are derived; successor ids
    /// outside the activity range are dropped from the predecessor side so
    /// that `validate` can still report them.
    pub fn from_successors(
        modes: Vec<Vec<Mode>>,
        successors: Vec<Vec<ActivityId>>,
        renewable_capacity: Vec<u32>,
        nonrenewable_capacity: Vec<u32>,
        horizon: u32,
    ) -> Self {
        let n = modes.len();
        let mut predecessors = vec![Vec::new(); n];
        for (i, succ) in successors.iter().enumerate() {
            for &j in succ {
                if j < n {
                    predecessors[j].push(i);
                }
            }
        }
        let activities = modes
            .into_iter()
            .zip(successors)
            .zip(predecessors)
            .map(|((modes, mut successors), mut predecessors)| {
                successors.sort_unstable();
                successors.dedup();
                predecessors.sort_unstable();
                predecessors.dedup();
                Activity {
                    mode_origin: (1..=modes.len()).collect(),
                    modes,
                    successors,
                    predecessors,
                }
            })
            .collect();
        let nonrenewable_origin = (0..nonrenewable_capacity.len()).collect();
        Self {
            activities,
            renewable_capacity,
            nonrenewable_capacity,
            nonrenewable_origin,
            horizon,
        }
    }

    /// Builds an instance from the modes of the real activities `1..=J` and
    /// precedence pairs among them. Dummy source and sink are added and wired
    /// to every real activity without predecessors or successors.
    pub fn from_real_activities(
        real_modes: Vec<Vec<Mode>>,
        pairs: &[(ActivityId, ActivityId)],
        renewable_capacity: Vec<u32>,
        nonrenewable_capacity: Vec<u32>,
    ) -> Self {
        let jobs = real_modes.len();
        let end = jobs + 1;
        let (r, n) = (renewable_capacity.len(), nonrenewable_capacity.len());

        let mut successors = vec![Vec::new(); jobs + 2];
        let mut has_pred = vec![false; jobs + 2];
        for &(i, j) in pairs {
            successors[i].push(j);
            if j < has_pred.len() {
                has_pred[j] = true;
            }
        }
        for j in 1..=jobs {
            if !has_pred[j] {
                successors[0].push(j);
            }
            if successors[j].is_empty() {
                successors[j].push(end);
            }
        }
        if jobs == 0 {
            successors[0].push(end);
        }

        let mut modes = Vec::with_capacity(jobs + 2);
        modes.push(vec![Mode::dummy(r, n)]);
        modes.extend(real_modes);
        modes.push(vec![Mode::dummy(r, n)]);

        let horizon = modes
            .iter()
            .map(|m| m.iter().map(|m| m.duration).max().unwrap_or(0))
            .sum();
        Self::from_successors(
            modes,
            successors,
            renewable_capacity,
            nonrenewable_capacity,
            horizon,
        )
    }

    /// Number of real (non-dummy) activities, `J`.
    pub fn job_count(&self) -> usize {
        self.activities.len().saturating_sub(2)
    }

    pub fn end(&self) -> ActivityId {
        self.activities.len() - 1
    }

    pub fn real_activities(&self) -> std::ops::RangeInclusive<ActivityId> {
        1..=self.job_count()
    }

    pub fn renewable_count(&self) -> usize {
        self.renewable_capacity.len()
    }

    pub fn nonrenewable_count(&self) -> usize {
        self.nonrenewable_capacity.len()
    }

    pub fn mode(&self, activity: ActivityId, mode: usize) -> &Mode {
        &self.activities[activity].modes[mode]
    }

    /// All precedence pairs `(predecessor, successor)`, dummies included.
    pub fn precedence_pairs(&self) -> impl Iterator<Item = (ActivityId, ActivityId)> + '_ {
        self.activities
            .iter()
            .enumerate()
            .flat_map(|(i, a)| a.successors.iter().map(move |&j| (i, j)))
    }

    /// Predecessors of `activity` that are real activities.
    pub fn real_predecessors(&self, activity: ActivityId) -> impl Iterator<Item = ActivityId> + '_ {
        let end = self.end();
        self.activities[activity]
            .predecessors
            .iter()
            .copied()
            .filter(move |&p| p != 0 && p != end)
    }

    /// Successors of `activity` that are real activities.
    pub fn real_successors(&self, activity: ActivityId) -> impl Iterator<Item = ActivityId> + '_ {
        let end = self.end();
        self.activities[activity]
            .successors
            .iter()
            .copied()
            .filter(move |&s| s != 0 && s != end)
    }

    /// Sum over real activities of their longest mode duration. Upper bound
    /// on the makespan of any serially generated schedule.
    pub fn max_duration_sum(&self) -> u64 {
        self.real_activities()
            .map(|j| u64::from(self.activities[j].max_duration()))
            .sum()
    }

    pub fn total_mode_count(&self) -> usize {
        self.activities.iter().map(Activity::mode_count).sum()
    }

    /// Lists every violated structural invariant. Empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate_instance(self)
    }
}

/// A violated invariant of a [`ProjectInstance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingDummies,
    NoModes { activity: ActivityId },
    DummyNotTrivial { activity: ActivityId },
    DummyStartHasPredecessors,
    DummyEndHasSuccessors,
    SuccessorOutOfRange { activity: ActivityId, successor: ActivityId },
    NonTopological { predecessor: ActivityId, successor: ActivityId },
    Cycle,
    RequestShape { activity: ActivityId, mode: usize },
    ZeroNonrenewableCapacity { resource: usize },
    OriginShape { activity: ActivityId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingDummies => write!(f, "instance lacks dummy source and sink"),
            Violation::NoModes { activity } => write!(f, "activity {activity} has no modes"),
            Violation::DummyNotTrivial { activity } => write!(
                f,
                "dummy activity {activity} must have one zero-duration mode without requests"
            ),
            Violation::DummyStartHasPredecessors => write!(f, "dummy source has predecessors"),
            Violation::DummyEndHasSuccessors => write!(f, "dummy sink has successors"),
            Violation::SuccessorOutOfRange {
                activity,
                successor,
            } => write!(f, "activity {activity} lists unknown successor {successor}"),
            Violation::NonTopological {
                predecessor,
                successor,
            } => write!(
                f,
                "non-topological numbering: pair ({predecessor}, {successor})"
            ),
            Violation::Cycle => write!(f, "precedence graph contains a cycle"),
            Violation::RequestShape { activity, mode } => write!(
                f,
                "activity {activity} mode {} has the wrong number of resource requests",
                mode + 1
            ),
            Violation::ZeroNonrenewableCapacity { resource } => write!(
                f,
                "nonrenewable resource {} has zero capacity but positive requests",
                resource + 1
            ),
            Violation::OriginShape { activity } => {
                write!(f, "activity {activity} has a malformed mode origin map")
            }
        }
    }
}

/// Checks every structural invariant of `instance` and returns the
/// violations found; an empty list means the instance is valid.
pub fn validate_instance(instance: &ProjectInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.activities.len();
    if n < 2 {
        out.push(Violation::MissingDummies);
        return out;
    }
    let (r, nr) = (instance.renewable_count(), instance.nonrenewable_count());
    let end = n - 1;

    for (j, act) in instance.activities.iter().enumerate() {
        if act.modes.is_empty() {
            out.push(Violation::NoModes { activity: j });
        }
        if act.mode_origin.len() != act.modes.len() {
            out.push(Violation::OriginShape { activity: j });
        }
        for (m, mode) in act.modes.iter().enumerate() {
            if mode.renewable.len() != r || mode.nonrenewable.len() != nr {
                out.push(Violation::RequestShape { activity: j, mode: m });
            }
        }
        if j == 0 || j == end {
            let trivial = act.modes.len() == 1
                && act.modes[0].duration == 0
                && act.modes[0].renewable.iter().all(|&q| q == 0)
                && act.modes[0].nonrenewable.iter().all(|&q| q == 0);
            if !trivial {
                out.push(Violation::DummyNotTrivial { activity: j });
            }
        }
        for &s in &act.successors {
            if s >= n || s == 0 {
                out.push(Violation::SuccessorOutOfRange {
                    activity: j,
                    successor: s,
                });
            } else if s <= j {
                out.push(Violation::NonTopological {
                    predecessor: j,
                    successor: s,
                });
            }
        }
    }
    if !instance.activities[0].predecessors.is_empty() {
        out.push(Violation::DummyStartHasPredecessors);
    }
    if !instance.activities[end].successors.is_empty() {
        out.push(Violation::DummyEndHasSuccessors);
    }
    if has_cycle(instance) {
        out.push(Violation::Cycle);
    }
    for (l, &cap) in instance.nonrenewable_capacity.iter().enumerate() {
        let requested = instance.activities.iter().any(|a| {
            a.modes
                .iter()
                .any(|m| m.nonrenewable.get(l).is_some_and(|&q| q > 0))
        });
        if cap == 0 && requested {
            out.push(Violation::ZeroNonrenewableCapacity { resource: l });
        }
    }
    out
}

fn has_cycle(instance: &ProjectInstance) -> bool {
    let n = instance.activities.len();
    let mut indegree = vec![0usize; n];
    for (_, j) in instance.precedence_pairs() {
        if j < n {
            indegree[j] += 1;
        }
    }
    let mut queue: VecDeque<_> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop_front() {
        seen += 1;
        for &j in &instance.activities[i].successors {
            if j < n {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
    }
    seen != n
}
