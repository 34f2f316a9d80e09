#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrcpsp_core::model::{Mode, ProjectInstance};
use mrcpsp_core::schedule::{ActivityModeList, ScheduleViolation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with up to `max_jobs` activities whose modes all fit the
/// renewable capacities. Nonrenewable capacities may be too small for any
/// mode assignment.
pub fn random_instance(seed: u64, max_jobs: usize, max_modes: usize) -> ProjectInstance {
    let mut rng = rng(seed);
    let jobs = rng.random_range(1..=max_jobs);
    let r = rng.random_range(1..=3);
    let n = rng.random_range(0..=2);
    let zero_durations = rng.random_bool(0.2);
    let modes: Vec<Vec<Mode>> = (0..jobs)
        .map(|_| {
            (0..rng.random_range(1..=max_modes))
                .map(|_| {
                    let d = if zero_durations { rng.random_range(0..=4) } else { rng.random_range(1..=9) };
                    Mode::new(
                        d,
                        (0..r).map(|_| rng.random_range(0..=6)).collect(),
                        (0..n).map(|_| rng.random_range(0..=9)).collect(),
                    )
                })
                .collect()
        })
        .collect();
    let density = rng.random_range(0.0..0.6);
    let mut pairs = Vec::new();
    for i in 1..=jobs {
        for j in i + 1..=jobs {
            if rng.random_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    let rcap = (0..r)
        .map(|k| {
            let top = modes.iter().flatten().map(|m| m.renewable[k]).max().unwrap();
            top.max(1) + rng.random_range(0..=4)
        })
        .collect();
    let ncap = (0..n)
        .map(|l| {
            let total: u32 = modes.iter().map(|ms| ms.iter().map(|m| m.nonrenewable[l]).max().unwrap()).sum();
            rng.random_range(1..=total.max(1))
        })
        .collect();
    ProjectInstance::from_real_activities(modes, &pairs, rcap, ncap)
}

/// Uniformly random precedence-feasible activity list with random modes.
pub fn random_aml(instance: &ProjectInstance, rng: &mut impl Rng) -> ActivityModeList {
    let jobs = instance.job_count();
    let mut placed = vec![false; jobs + 2];
    let mut order = Vec::with_capacity(jobs);
    while order.len() < jobs {
        let eligible: Vec<usize> = instance
            .real_activities()
            .filter(|&j| !placed[j] && instance.real_predecessors(j).all(|i| placed[i]))
            .collect();
        let &j = eligible.choose(rng).unwrap();
        placed[j] = true;
        order.push(j);
    }
    let modes = instance
        .activities
        .iter()
        .map(|a| rng.random_range(0..a.modes.len()))
        .collect();
    ActivityModeList::new(order, modes)
}

pub fn nonrenewable_feasible(modes: &[usize], instance: &ProjectInstance) -> bool {
    (0..instance.nonrenewable_count()).all(|l| {
        let used: u64 = instance
            .activities
            .iter()
            .zip(modes)
            .map(|(a, &m)| u64::from(a.modes[m].nonrenewable[l]))
            .sum();
        used <= u64::from(instance.nonrenewable_capacity[l])
    })
}

/// Violations other than nonrenewable overuse.
pub fn schedule_violations(violations: Vec<ScheduleViolation>) -> Vec<ScheduleViolation> {
    violations
        .into_iter()
        .filter(|v| !matches!(v, ScheduleViolation::Nonrenewable { .. }))
        .collect()
}

/// `order` is a permutation of the real activities with every predecessor
/// ahead of its successors.
pub fn precedence_feasible(order: &[usize], instance: &ProjectInstance) -> bool {
    let jobs = instance.job_count();
    let mut pos = vec![usize::MAX; jobs + 2];
    for (i, &j) in order.iter().enumerate() {
        if j == 0 || j > jobs || pos[j] != usize::MAX {
            return false;
        }
        pos[j] = i;
    }
    order.len() == jobs
        && instance
            .real_activities()
            .all(|j| instance.real_predecessors(j).all(|i| pos[i] < pos[j]))
}
