//! Search-space reduction: drops non-executable and inefficient modes and
//! redundant nonrenewable resources until nothing changes.

use super::{ActivityId, ProjectInstance};

/// What a call to [`reduce_instance`] removed. Modes are reported as
/// `(activity, original 1-based mode number)`, resources by their original
/// 0-based index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    pub removed_nonexecutable_modes: Vec<(ActivityId, usize)>,
    pub removed_inefficient_modes: Vec<(ActivityId, usize)>,
    pub removed_redundant_nonrenewables: Vec<usize>,
    pub rounds: usize,
}

impl ReductionReport {
    pub fn is_empty(&self) -> bool {
        self.removed_nonexecutable_modes.is_empty()
            && self.removed_inefficient_modes.is_empty()
            && self.removed_redundant_nonrenewables.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("activity {activity} has no executable mode; the instance is infeasible")]
    InfeasibleInstance { activity: ActivityId },
}

/// Reduces `instance` to a fixpoint. The set of optimal makespans is
/// preserved; surviving modes are re-packed densely with their original
/// numbers kept in `Activity::mode_origin`.
pub fn reduce_instance(
    instance: &ProjectInstance,
) -> Result<(ProjectInstance, ReductionReport), ReductionError> {
    let mut out = instance.clone();
    let mut report = ReductionReport::default();
    loop {
        report.rounds += 1;
        let mut changed = remove_nonexecutable(&mut out, &mut report)?;
        changed |= remove_redundant_nonrenewables(&mut out, &mut report);
        changed |= remove_inefficient(&mut out, &mut report);
        if !changed {
            break;
        }
    }
    Ok((out, report))
}

fn remove_nonexecutable(
    p: &mut ProjectInstance,
    report: &mut ReductionReport,
) -> Result<bool, ReductionError> {
    let nr = p.nonrenewable_count();
    // Minimum consumption of every activity, and their sum, per resource.
    let mins: Vec<Vec<u64>> = p
        .activities
        .iter()
        .map(|a| {
            (0..nr)
                .map(|l| {
                    a.modes
                        .iter()
                        .map(|m| u64::from(m.nonrenewable[l]))
                        .min()
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let min_total: Vec<u64> = (0..nr).map(|l| mins.iter().map(|m| m[l]).sum()).collect();

    let renewable_capacity = p.renewable_capacity.clone();
    let nonrenewable_capacity = p.nonrenewable_capacity.clone();
    let mut changed = false;
    for (j, act) in p.activities.iter_mut().enumerate() {
        let keep: Vec<bool> = act
            .modes
            .iter()
            .map(|mode| {
                let renewable_ok = mode
                    .renewable
                    .iter()
                    .zip(&renewable_capacity)
                    .all(|(&q, &cap)| q <= cap);
                let nonrenewable_ok = (0..nr).all(|l| {
                    let others = min_total[l] - mins[j][l];
                    u64::from(mode.nonrenewable[l]) + others <= u64::from(nonrenewable_capacity[l])
                });
                renewable_ok && nonrenewable_ok
            })
            .collect();
        if keep.iter().all(|&k| k) {
            continue;
        }
        if keep.iter().all(|&k| !k) {
            return Err(ReductionError::InfeasibleInstance { activity: j });
        }
        changed = true;
        for (m, &k) in keep.iter().enumerate() {
            if !k {
                report
                    .removed_nonexecutable_modes
                    .push((j, act.mode_origin[m]));
            }
        }
        retain_modes(act, &keep);
    }
    Ok(changed)
}

fn remove_redundant_nonrenewables(p: &mut ProjectInstance, report: &mut ReductionReport) -> bool {
    let redundant: Vec<bool> = (0..p.nonrenewable_count())
        .map(|l| {
            let max_total: u64 = p
                .activities
                .iter()
                .map(|a| {
                    a.modes
                        .iter()
                        .map(|m| u64::from(m.nonrenewable[l]))
                        .max()
                        .unwrap_or(0)
                })
                .sum();
            max_total <= u64::from(p.nonrenewable_capacity[l])
        })
        .collect();
    if !redundant.iter().any(|&r| r) {
        return false;
    }
    for (l, _) in redundant.iter().enumerate().filter(|(_, &r)| r) {
        report
            .removed_redundant_nonrenewables
            .push(p.nonrenewable_origin[l]);
    }
    drop_flagged(&mut p.nonrenewable_capacity, &redundant);
    drop_flagged(&mut p.nonrenewable_origin, &redundant);
    for act in &mut p.activities {
        for mode in &mut act.modes {
            drop_flagged(&mut mode.nonrenewable, &redundant);
        }
    }
    true
}

fn drop_flagged<T>(v: &mut Vec<T>, flags: &[bool]) {
    let mut it = flags.iter();
    v.retain(|_| !*it.next().unwrap());
}

fn remove_inefficient(p: &mut ProjectInstance, report: &mut ReductionReport) -> bool {
    let mut changed = false;
    for (j, act) in p.activities.iter_mut().enumerate() {
        let modes = &act.modes;
        let keep: Vec<bool> = (0..modes.len())
            .map(|m| {
                !(0..modes.len()).any(|other| {
                    if other == m {
                        return false;
                    }
                    let (a, b) = (&modes[other], &modes[m]);
                    let weakly = a.duration <= b.duration
                        && a.renewable.iter().zip(&b.renewable).all(|(x, y)| x <= y)
                        && a.nonrenewable.iter().zip(&b.nonrenewable).all(|(x, y)| x <= y);
                    // Identical modes: the higher index goes.
                    weakly && (a != b || other < m)
                })
            })
            .collect();
        if keep.iter().all(|&k| k) {
            continue;
        }
        changed = true;
        for (m, &k) in keep.iter().enumerate() {
            if !k {
                report.removed_inefficient_modes.push((j, act.mode_origin[m]));
            }
        }
        retain_modes(act, &keep);
    }
    changed
}

fn retain_modes(act: &mut super::Activity, keep: &[bool]) {
    let mut it = keep.iter();
    act.modes.retain(|_| *it.next().unwrap());
    let mut it = keep.iter();
    act.mode_origin.retain(|_| *it.next().unwrap());
}
