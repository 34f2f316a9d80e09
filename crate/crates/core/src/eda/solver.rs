use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{rank_select, ProbabilityModel};
use crate::dirw::{dirw_pass_with, DirwParams};
use crate::model::{reduce_instance, ProjectInstance, ReductionError, ReductionReport};
use crate::schedule::{fitness_of, ActivityModeList, FitnessValue, Schedule, Sgs};

/// When a run stops. At least one limit must be set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRule {
    pub max_schedules: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl StopRule {
    pub fn schedules(n: u64) -> Self {
        Self {
            max_schedules: Some(n),
            time_limit: None,
        }
    }

    pub fn time(limit: Duration) -> Self {
        Self {
            max_schedules: None,
            time_limit: Some(limit),
        }
    }

    fn reached(&self, generated: u64, started: Instant) -> bool {
        self.max_schedules.is_some_and(|m| generated >= m)
            || self.time_limit.is_some_and(|t| started.elapsed() >= t)
    }

    fn schedule_cap(&self) -> u64 {
        self.max_schedules.unwrap_or(u64::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverParams {
    /// Population size.
    pub population: usize,
    /// Number of individuals selected to update the model.
    pub elite: usize,
    /// Learning speed of the model update.
    pub alpha: f64,
    /// Per-activity move probability of the random walk.
    pub rw: f64,
    pub stop: StopRule,
    pub seed: u64,
    pub use_mdj: bool,
    pub use_dirw: bool,
    pub dirw_skip_last: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            population: 100,
            elite: 20,
            alpha: 0.5,
            rw: 0.5,
            stop: StopRule::schedules(5000),
            seed: 0,
            use_mdj: true,
            use_dirw: true,
            dirw_skip_last: false,
        }
    }
}

impl SolverParams {
    pub fn with_budget(mut self, schedules: u64) -> Self {
        self.stop = StopRule::schedules(schedules);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.to_string()));
        if self.stop.max_schedules == Some(0) {
            return Err(SolverError::BudgetZero);
        }
        if self.stop.max_schedules.is_none() && self.stop.time_limit.is_none() {
            return bad("no stopping rule");
        }
        if self.population == 0 || self.elite == 0 || self.elite > self.population {
            return bad("need 1 <= elite <= population");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.rw) {
            return bad("rw must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("no feasible mode assignment: {0}")]
    NoFeasibleModeAssignment(#[from] ReductionError),
    #[error("schedule budget is zero")]
    BudgetZero,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

/// Outcome of one run. The list and schedule refer to the input instance's
/// mode numbering, not the reduced one.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_aml: ActivityModeList,
    pub best_schedule: Schedule,
    pub best_fitness: FitnessValue,
    pub feasible_found: bool,
    pub schedules_generated: u64,
    pub generations: usize,
    pub seed: u64,
    pub wall_time: Duration,
    /// Best fitness after each completed or interrupted generation.
    pub history: Vec<f64>,
    pub reduction: ReductionReport,
}

struct Incumbent {
    aml: ActivityModeList,
    schedule: Schedule,
    fitness: FitnessValue,
}

impl Incumbent {
    fn offer(slot: &mut Option<Incumbent>, aml: &ActivityModeList, schedule: &Schedule, fitness: FitnessValue) {
        if slot.as_ref().is_none_or(|b| fitness.is_better_than(&b.fitness)) {
            *slot = Some(Incumbent {
                aml: aml.clone(),
                schedule: schedule.clone(),
                fitness,
            });
        }
    }
}

/// Runs the hybrid EDA: reduce, then per generation sample a population,
/// decode it, select the elite, double-justify and random-walk each elite
/// member, and update the model from the improved elite.
///
/// All randomness comes from one generator seeded with `params.seed`, drawn
/// in this order per generation: list positions and modes of each sampled
/// individual, then for each elite member the walk's acceptance draws and
/// insertion slots.
pub fn run_solver(instance: &ProjectInstance, params: &SolverParams) -> Result<SolveResult, SolverError> {
    params.validate()?;
    let violations = instance.validate();
    if !violations.is_empty() {
        let msg = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(SolverError::InvalidInstance(msg));
    }
    let started = Instant::now();
    let (reduced, reduction) = reduce_instance(instance)?;
    let p = &reduced;
    let stop = params.stop;
    let cap = stop.schedule_cap();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut sgs = Sgs::new(p);
    let mut model = ProbabilityModel::uniform(p);
    let mut best: Option<Incumbent> = None;
    let mut history = Vec::new();
    let dirw = DirwParams {
        rw: params.rw,
        skip_last: params.dirw_skip_last,
    };

    'generations: loop {
        let mut population = Vec::with_capacity(params.population);
        let mut fitness = Vec::with_capacity(params.population);
        let mut schedules = Vec::with_capacity(params.population);
        for _ in 0..params.population {
            if stop.reached(sgs.generated(), started) {
                break;
            }
            let aml = model.sample(p, &mut rng);
            let schedule = sgs.forward(&aml);
            let f = fitness_of(&schedule, p);
            Incumbent::offer(&mut best, &aml, &schedule, f);
            population.push(aml);
            fitness.push(f);
            schedules.push(schedule);
        }
        if population.len() < params.population {
            break 'generations;
        }

        let chosen = rank_select(&fitness, params.elite);
        let mut elite: Vec<(ActivityModeList, Schedule)> = chosen
            .iter()
            .map(|&i| (population[i].clone(), schedules[i].clone()))
            .collect();

        if params.use_mdj {
            for (aml, schedule) in &mut elite {
                if stop.reached(sgs.generated(), started) {
                    break 'generations;
                }
                let (a, s) = sgs.double_justify(aml, schedule, cap);
                let f = fitness_of(&s, p);
                Incumbent::offer(&mut best, &a, &s, f);
                *aml = a;
                *schedule = s;
            }
        }
        if params.use_dirw {
            for (aml, schedule) in &mut elite {
                if stop.reached(sgs.generated(), started) {
                    break 'generations;
                }
                let moved = dirw_pass_with(aml, p, dirw, &mut rng).aml;
                let s = sgs.forward(&moved);
                let f = fitness_of(&s, p);
                Incumbent::offer(&mut best, &moved, &s, f);
                *aml = moved;
                *schedule = s;
            }
        }

        let refs: Vec<&ActivityModeList> = elite.iter().map(|(a, _)| a).collect();
        model.update(&refs, params.alpha);
        history.push(best.as_ref().map_or(f64::INFINITY, |b| b.fitness.scalar));
    }
    if let Some(b) = &best {
        if history.last() != Some(&b.fitness.scalar) {
            history.push(b.fitness.scalar);
        }
    }

    let best = best.expect("budget admits at least one decode");
    let to_original = |modes: &[usize]| -> Vec<usize> {
        modes
            .iter()
            .enumerate()
            .map(|(j, &m)| p.activities[j].mode_origin[m] - 1)
            .collect()
    };
    let mut schedule = best.schedule;
    schedule.modes = to_original(&schedule.modes);
    let aml = ActivityModeList::new(best.aml.order, to_original(&best.aml.modes));

    Ok(SolveResult {
        feasible_found: best.fitness.feasible,
        best_aml: aml,
        best_schedule: schedule,
        best_fitness: best.fitness,
        schedules_generated: sgs.generated(),
        generations: model.generation(),
        seed: params.seed,
        wall_time: started.elapsed(),
        history,
        reduction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_tiny_instance, Mode};
    use crate::schedule::verify_schedule;

    #[test]
    fn single_activity_finds_shortest_mode() {
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(4, vec![1], vec![1]), Mode::new(2, vec![3], vec![1])]],
            &[],
            vec![3],
            vec![2],
        );
        let r = run_solver(&p, &SolverParams::default()).unwrap();
        assert_eq!(r.best_schedule.makespan, 2);
        assert!(r.feasible_found);
        assert_eq!(r.history[0], 2.0);
        assert_eq!(r.best_schedule.modes[1], 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = generate_tiny_instance(17, Default::default());
        let params = SolverParams::default().with_budget(1500).with_seed(4);
        let mut a = run_solver(&p, &params).unwrap();
        let mut b = run_solver(&p, &params).unwrap();
        a.wall_time = Duration::ZERO;
        b.wall_time = Duration::ZERO;
        assert_eq!(a, b);
    }

    #[test]
    fn respects_budget_and_verifies() {
        let p = generate_tiny_instance(5, Default::default());
        let params = SolverParams::default().with_budget(777);
        let r = run_solver(&p, &params).unwrap();
        assert!(r.schedules_generated >= 777);
        // One in-flight pass at most.
        assert!(r.schedules_generated <= 778);
        let v = verify_schedule(&r.best_schedule, &r.best_schedule.modes, &p);
        assert!(v.is_empty(), "{v:?}");
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_zero_budget_and_bad_params() {
        let p = generate_tiny_instance(5, Default::default());
        assert_eq!(
            run_solver(&p, &SolverParams::default().with_budget(0)),
            Err(SolverError::BudgetZero)
        );
        let params = SolverParams { elite: 200, ..Default::default() };
        assert!(matches!(run_solver(&p, &params), Err(SolverError::InvalidParams(_))));
    }

    #[test]
    fn infeasible_instance_is_reported() {
        let p = ProjectInstance::from_real_activities(
            vec![vec![Mode::new(1, vec![], vec![6])], vec![Mode::new(1, vec![], vec![5])]],
            &[],
            vec![],
            vec![10],
        );
        assert!(matches!(
            run_solver(&p, &SolverParams::default()),
            Err(SolverError::NoFeasibleModeAssignment(_))
        ));
    }

    #[test]
    fn time_limit_stops() {
        let p = generate_tiny_instance(5, Default::default());
        let params = SolverParams {
            stop: StopRule::time(Duration::from_millis(50)),
            ..Default::default()
        };
        let r = run_solver(&p, &params).unwrap();
        assert!(r.schedules_generated > 0);
    }
}
