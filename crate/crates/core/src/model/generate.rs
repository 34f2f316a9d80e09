//! Seeded generator for small random instances, used as oracle fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Mode, ProjectInstance};

/// Size limits for [`generate_tiny_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyInstanceBounds {
    pub min_activities: usize,
    pub max_activities: usize,
    pub max_modes: usize,
}

impl TinyInstanceBounds {
    pub const fn new(min_activities: usize, max_activities: usize, max_modes: usize) -> Self {
        Self {
            min_activities,
            max_activities,
            max_modes,
        }
    }
}

impl Default for TinyInstanceBounds {
    fn default() -> Self {
        Self::new(4, 6, 3)
    }
}

const RENEWABLES: usize = 2;
const NONRENEWABLES: usize = 2;
const EDGE_PROBABILITY: f64 = 0.3;

/// Generates a valid, topologically numbered instance with two renewable
/// and two nonrenewable resources and durations in `1..=10`. Running every
/// activity in its first mode respects all capacities, so the instance is
/// feasible; later modes may exceed them.
pub fn generate_tiny_instance(seed: u64, bounds: TinyInstanceBounds) -> ProjectInstance {
    assert!(
        (1..=bounds.max_activities).contains(&bounds.min_activities) && bounds.max_activities <= 7,
        "tiny instances hold 1..=7 activities"
    );
    assert!((1..=3).contains(&bounds.max_modes), "tiny instances hold 1..=3 modes");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = rng.random_range(bounds.min_activities..=bounds.max_activities);

    let real_modes: Vec<Vec<Mode>> = (0..jobs)
        .map(|_| {
            let count = rng.random_range(1..=bounds.max_modes);
            (0..count)
                .map(|_| {
                    let duration = rng.random_range(1..=10);
                    let renewable = (0..RENEWABLES).map(|_| rng.random_range(0..=5)).collect();
                    let nonrenewable =
                        (0..NONRENEWABLES).map(|_| rng.random_range(0..=8)).collect();
                    Mode::new(duration, renewable, nonrenewable)
                })
                .collect()
        })
        .collect();

    let mut pairs = Vec::new();
    for i in 1..=jobs {
        for j in i + 1..=jobs {
            if rng.random_bool(EDGE_PROBABILITY) {
                pairs.push((i, j));
            }
        }
    }

    let renewable_capacity = (0..RENEWABLES)
        .map(|k| {
            let floor = real_modes.iter().map(|m| m[0].renewable[k]).max().unwrap_or(0);
            floor.max(1) + rng.random_range(0..=3)
        })
        .collect();
    let nonrenewable_capacity = (0..NONRENEWABLES)
        .map(|l| {
            let first: u32 = real_modes.iter().map(|ms| ms[0].nonrenewable[l]).sum();
            let max: u32 = real_modes
                .iter()
                .map(|ms| ms.iter().map(|m| m.nonrenewable[l]).max().unwrap())
                .sum();
            first.max(1) + rng.random_range(0..=(max - first) / 2)
        })
        .collect();

    ProjectInstance::from_real_activities(
        real_modes,
        &pairs,
        renewable_capacity,
        nonrenewable_capacity,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let b = TinyInstanceBounds::new(4, 4, 3);
        let a = generate_tiny_instance(42, b);
        assert_eq!(a, generate_tiny_instance(42, b));
        assert_eq!(a.job_count(), 4);
        assert_ne!(a, generate_tiny_instance(43, b));
    }

    #[test]
    fn single_activity_bound() {
        let p = generate_tiny_instance(7, TinyInstanceBounds::new(1, 1, 3));
        assert_eq!(p.job_count(), 1);
        assert!(p.validate().is_empty());
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..100 {
            let p = generate_tiny_instance(seed, TinyInstanceBounds::default());
            assert!(p.validate().is_empty(), "seed {seed}: {:?}", p.validate());
            assert_eq!(p.renewable_count(), 2);
            assert_eq!(p.nonrenewable_count(), 2);
            for j in p.real_activities() {
                assert!(p.activities[j].modes.iter().all(|m| (1..=10).contains(&m.duration)));
            }
            for l in 0..2 {
                let first: u32 = p.activities.iter().map(|a| a.modes[0].nonrenewable[l]).sum();
                assert!(first <= p.nonrenewable_capacity[l], "seed {seed}");
            }
        }
    }
}
