use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mrcpsp_core::bench::{
    brute_force_optimum, run_benchmark, BenchConfig, BoundsKind, OracleOutcome,
};
use mrcpsp_core::eda::{run_solver, SolverParams, StopRule};
use mrcpsp_core::model::{generate_tiny_instance, TinyInstanceBounds};
use mrcpsp_core::psplib::{self, BoundsTable};

#[derive(Parser)]
#[command(name = "mrcpsp", version, about = "Multi-mode RCPSP solver and benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one PSPLIB .mm instance.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the result record as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Solve every .mm file in a directory and report Av.dev, optimal rate
    /// and feasible rate.
    ///
    /// The results file (--out) is comma-delimited with the columns
    /// instance,parameter,instance_number,seed,feasible,makespan,bound,
    /// deviation_pct,schedules,generations,runtime_ms,note
    /// followed by `# key=value` footer lines holding the aggregates.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Bounds table: `parameter instance makespan` per row.
        #[arg(long)]
        bounds: Option<PathBuf>,
        /// Treat the bounds as lower bounds rather than proven optima.
        #[arg(long)]
        lower_bounds: bool,
        /// Number of runs per instance, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Skip instances without a bounds entry.
        #[arg(long)]
        only_bounded: bool,
        /// Use only the first N instances, ordered by (parameter, instance).
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by enumeration (at most 7 activities, 3 modes each).
    Oracle { file: PathBuf },
    /// Write random tiny instances and a bounds table of their optima.
    GenTiny {
        #[arg(long, default_value = "tiny")]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        min_activities: usize,
        #[arg(long, default_value_t = 6)]
        max_activities: usize,
        #[arg(long, default_value_t = 3)]
        max_modes: usize,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Schedule budget; the run stops after this many generated schedules.
    #[arg(long)]
    schedules: Option<u64>,
    /// Wall-clock limit in seconds. Results then depend on the machine.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    /// Elite size as a fraction of the population.
    #[arg(long, default_value_t = 0.2)]
    elite_frac: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Per-activity probability of a random-walk move.
    #[arg(long, default_value_t = 0.5)]
    rw: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_dirw: bool,
    #[arg(long)]
    no_mdj: bool,
    /// Random walk leaves the last activity in list order untouched.
    #[arg(long)]
    dirw_skip_last: bool,
}

impl SolverArgs {
    fn params(&self) -> Result<SolverParams, String> {
        let time = match self.time_limit {
            Some(t) if !(t.is_finite() && t > 0.0) => return Err(format!("bad --time-limit {t}")),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        let stop = match (self.schedules, time) {
            (None, None) => StopRule::schedules(5000),
            (s, t) => StopRule {
                max_schedules: s,
                time_limit: t,
            },
        };
        if !(self.elite_frac > 0.0 && self.elite_frac <= 1.0) {
            return Err(format!("--elite-frac must lie in (0, 1], got {}", self.elite_frac));
        }
        let elite = ((self.pop as f64 * self.elite_frac).round() as usize).max(1);
        let params = SolverParams {
            population: self.pop,
            elite,
            alpha: self.alpha,
            rw: self.rw,
            stop,
            seed: self.seed,
            use_mdj: !self.no_mdj,
            use_dirw: !self.no_dirw,
            dirw_skip_last: self.dirw_skip_last,
        };
        params.validate().map_err(|e| e.to_string())?;
        Ok(params)
    }
}

/// Everything in a `solve` record is a function of instance, parameters and
/// seed; timing goes to stderr.
#[derive(Serialize)]
struct SolveRecord<'a> {
    instance: String,
    seed: u64,
    params: &'a SolverParams,
    feasible: bool,
    makespan: Option<u32>,
    fitness: f64,
    schedules: u64,
    generations: usize,
    activity_list: &'a [usize],
    /// 1-based PSPLIB mode numbers of the real activities.
    modes: Vec<usize>,
    start: &'a [u32],
}

fn solve(file: &Path, args: &SolverArgs, json: bool) -> Result<(), String> {
    let params = args.params()?;
    let instance = psplib::read_instance(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let result = run_solver(&instance, &params).map_err(|e| e.to_string())?;
    let s = &result.best_schedule;
    let real = instance.real_activities();
    let record = SolveRecord {
        instance: file.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        seed: params.seed,
        params: &params,
        feasible: result.feasible_found,
        makespan: result.feasible_found.then_some(s.makespan),
        fitness: result.best_fitness.scalar,
        schedules: result.schedules_generated,
        generations: result.generations,
        activity_list: &result.best_aml.order,
        modes: s.modes[real.clone()].iter().map(|m| m + 1).collect(),
        start: &s.start[real],
    };
    if json {
        println!("{}", serde_json::to_string(&record).map_err(|e| e.to_string())?);
    } else {
        println!("instance    : {}", record.instance);
        println!("seed        : {}", record.seed);
        match record.makespan {
            Some(m) => println!("makespan    : {m}"),
            None => println!("makespan    : none (no nonrenewable-feasible schedule found, fitness {})", record.fitness),
        }
        println!("schedules   : {}", record.schedules);
        println!("generations : {}", record.generations);
        println!("list        : {:?}", record.activity_list);
        println!("modes       : {:?}", record.modes);
        println!("start       : {:?}", record.start);
    }
    eprintln!("wall time {:.3} s", result.wall_time.as_secs_f64());
    Ok(())
}

fn oracle(file: &Path) -> Result<(), String> {
    let instance = psplib::read_instance(file).map_err(|e| format!("{}: {e}", file.display()))?;
    match brute_force_optimum(&instance).map_err(|e| e.to_string())? {
        OracleOutcome::Optimal { makespan, aml, .. } => {
            println!("optimum {makespan}");
            println!("list    {:?}", aml.order);
            let modes: Vec<usize> = instance.real_activities().map(|j| aml.modes[j] + 1).collect();
            println!("modes   {modes:?}");
        }
        OracleOutcome::Infeasible => println!("infeasible"),
    }
    Ok(())
}

fn gen_tiny(out: &Path, count: u64, seed: u64, bounds: TinyInstanceBounds) -> Result<(), String> {
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let mut table = BoundsTable::default();
    for k in 1..=count {
        let instance = generate_tiny_instance(seed.wrapping_add(k), bounds);
        let name = format!("tiny{}1_{k}.mm", instance.job_count());
        let path = out.join(&name);
        std::fs::write(&path, psplib::write_instance(&instance)).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(m) = brute_force_optimum(&instance).map_err(|e| e.to_string())?.makespan() {
            // Zero makespans cannot serve as relative-deviation bounds.
            if m > 0 {
                table.insert(1, k as u32, m);
            }
        }
    }
    let bounds_path = out.join("optima.txt");
    std::fs::write(&bounds_path, psplib::write_bounds_table(&table))
        .map_err(|e| format!("{}: {e}", bounds_path.display()))?;
    println!("wrote {count} instances and {} optima to {}", table.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { file, solver, json } => solve(&file, &solver, json),
        Command::Bench {
            dir,
            solver,
            bounds,
            lower_bounds,
            seeds,
            workers,
            only_bounded,
            limit,
            out,
        } => solver.params().and_then(|params| {
            let config = BenchConfig {
                dir,
                bounds,
                bounds_kind: if lower_bounds { BoundsKind::LowerBound } else { BoundsKind::Optimal },
                params,
                seeds: (0..seeds).map(|i| params.seed + i).collect(),
                workers,
                only_bounded,
                limit,
                out,
            };
            let report = run_benchmark(&config).map_err(|e| e.to_string())?;
            print!("{}", report.summary());
            Ok(())
        }),
        Command::Oracle { file } => oracle(&file),
        Command::GenTiny {
            out,
            count,
            seed,
            min_activities,
            max_activities,
            max_modes,
        } => {
            let ok = (1..=max_activities).contains(&min_activities)
                && max_activities <= mrcpsp_core::bench::MAX_ACTIVITIES
                && (1..=mrcpsp_core::bench::MAX_MODES).contains(&max_modes);
            if ok {
                gen_tiny(&out, count, seed, TinyInstanceBounds::new(min_activities, max_activities, max_modes))
            } else {
                Err("need 1 <= min-activities <= max-activities <= 7 and 1 <= max-modes <= 3".into())
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
