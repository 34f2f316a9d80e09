//! Estimation-of-distribution engine: a position-by-activity probability
//! matrix and a per-activity mode distribution, sampled into precedence-
//! feasible activity-mode lists and shifted towards the elite each
//! generation.

mod solver;

use rand::Rng;

use crate::model::ProjectInstance;
use crate::schedule::{ActivityModeList, FitnessValue};

pub use solver::{run_solver, SolveResult, SolverError, SolverParams, StopRule};

/// Probability model over activity-mode lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityModel {
    jobs: usize,
    /// Row-major `jobs x jobs`: row = list position, column = activity - 1.
    activity: Vec<f64>,
    /// Indexed by activity id, dummies included.
    mode: Vec<Vec<f64>>,
    generation: usize,
}

impl ProbabilityModel {
    /// Uniform model: every activity equally likely at every position, every
    /// surviving mode equally likely.
    pub fn uniform(instance: &ProjectInstance) -> Self {
        let jobs = instance.job_count();
        let activity = vec![1.0 / jobs.max(1) as f64; jobs * jobs];
        let mode = instance
            .activities
            .iter()
            .map(|a| vec![1.0 / a.modes.len() as f64; a.modes.len()])
            .collect();
        Self {
            jobs,
            activity,
            mode,
            generation: 0,
        }
    }

    pub fn job_count(&self) -> usize {
        self.jobs
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Probabilities of each activity `1..=J` at 0-based `position`.
    pub fn position_row(&self, position: usize) -> &[f64] {
        &self.activity[position * self.jobs..(position + 1) * self.jobs]
    }

    pub fn activity_probability(&self, position: usize, activity: usize) -> f64 {
        self.activity[position * self.jobs + activity - 1]
    }

    pub fn mode_row(&self, activity: usize) -> &[f64] {
        &self.mode[activity]
    }

    /// Largest deviation of any row sum from 1, and whether any entry is
    /// negative.
    pub fn row_sum_error(&self) -> (f64, bool) {
        let rows = (0..self.jobs)
            .map(|i| self.position_row(i))
            .chain(self.mode.iter().map(Vec::as_slice));
        let mut worst = 0.0f64;
        let mut negative = false;
        for row in rows {
            worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
            negative |= row.iter().any(|&p| p < 0.0);
        }
        (worst, negative)
    }

    /// Draws a precedence-feasible activity list position by position, then
    /// a mode for every activity. Activities are drawn with probability
    /// proportional to their entry in the position row, renormalised over the
    /// eligible set; when that mass is zero the draw is uniform.
    pub fn sample(&self, instance: &ProjectInstance, rng: &mut impl Rng) -> ActivityModeList {
        let jobs = self.jobs;
        let mut pending: Vec<usize> = (0..=jobs + 1)
            .map(|j| {
                if (1..=jobs).contains(&j) {
                    instance.real_predecessors(j).count()
                } else {
                    usize::MAX
                }
            })
            .collect();
        let mut eligible: Vec<usize> = (1..=jobs).filter(|&j| pending[j] == 0).collect();
        let mut order = Vec::with_capacity(jobs);
        for position in 0..jobs {
            let row = self.position_row(position);
            let total: f64 = eligible.iter().map(|&j| row[j - 1]).sum();
            let pick = if total > 0.0 {
                roulette(eligible.iter().map(|&j| row[j - 1]), total, rng)
            } else {
                rng.random_range(0..eligible.len())
            };
            let chosen = eligible.swap_remove(pick);
            // Keep the eligible list ordered so draws do not depend on
            // removal history.
            eligible.sort_unstable();
            order.push(chosen);
            for s in instance.real_successors(chosen) {
                pending[s] -= 1;
                if pending[s] == 0 {
                    let at = eligible.partition_point(|&e| e < s);
                    eligible.insert(at, s);
                }
            }
        }
        let modes = self
            .mode
            .iter()
            .map(|row| {
                if row.len() == 1 {
                    0
                } else {
                    roulette(row.iter().copied(), row.iter().sum(), rng)
                }
            })
            .collect();
        ActivityModeList { order, modes }
    }

    /// Moves every row towards the elite's empirical frequencies:
    /// `p <- (1 - alpha) p + alpha * count / |elite|`.
    pub fn update(&mut self, elite: &[&ActivityModeList], alpha: f64) {
        assert!(!elite.is_empty(), "elite must not be empty");
        let share = alpha / elite.len() as f64;
        for p in &mut self.activity {
            *p *= 1.0 - alpha;
        }
        for row in &mut self.mode {
            for p in row.iter_mut() {
                *p *= 1.0 - alpha;
            }
        }
        for aml in elite {
            for (position, &j) in aml.order.iter().enumerate() {
                self.activity[position * self.jobs + j - 1] += share;
            }
            for (j, &m) in aml.modes.iter().enumerate() {
                self.mode[j][m] += share;
            }
        }
        self.generation += 1;
    }
}

fn roulette(weights: impl Iterator<Item = f64>, total: f64, rng: &mut impl Rng) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if target < acc {
            return i;
        }
    }
    last
}

pub fn init_model(instance: &ProjectInstance) -> ProbabilityModel {
    ProbabilityModel::uniform(instance)
}

pub fn sample_individual(
    model: &ProbabilityModel,
    instance: &ProjectInstance,
    rng: &mut impl Rng,
) -> ActivityModeList {
    model.sample(instance, rng)
}

pub fn update_model(
    model: &ProbabilityModel,
    elite: &[&ActivityModeList],
    alpha: f64,
) -> ProbabilityModel {
    let mut next = model.clone();
    next.update(elite, alpha);
    next
}

/// Indices of the `best_p` smallest fitness values, stable on ties.
pub fn rank_select(fitness: &[FitnessValue], best_p: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[a].cmp_total(&fitness[b]));
    idx.truncate(best_p);
    idx
}
