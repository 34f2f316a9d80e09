//! Benchmark harness: exhaustive oracle, metrics, and a batch runner over
//! directories of `.mm` files.

mod metrics;
mod oracle;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

pub use metrics::{
    best_of_runs, compute_ard, compute_rates, mean_over_seeds, InstanceResult, MetricsError, Rates,
};
pub use oracle::{brute_force_optimum, OracleError, OracleOutcome, MAX_ACTIVITIES, MAX_MODES};

use crate::eda::{run_solver, SolverError, SolverParams};
use crate::psplib::{self, BoundsError, BoundsTable};

/// `(parameter, instance)` from a PSPLIB-style file stem such as `j102_4`
/// (set `j10`, parameter 2, instance 4). `jobs` is the number of real
/// activities and disambiguates where the set name ends.
pub fn instance_key(stem: &str, jobs: usize) -> Option<(u32, u32)> {
    let digits = stem.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    let (head, inst) = digits.split_once('_')?;
    let inst = inst.parse().ok()?;
    let set = jobs.to_string();
    let par = match head.strip_prefix(&set) {
        Some(rest) if !rest.is_empty() => rest,
        _ => head,
    };
    Some((par.parse().ok()?, inst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum BoundsKind {
    /// Proven optimal makespans.
    #[default]
    Optimal,
    /// Lower bounds or heuristic best-knowns; the optimal rate is not
    /// reported.
    LowerBound,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dir: PathBuf,
    pub bounds: Option<PathBuf>,
    pub bounds_kind: BoundsKind,
    pub params: SolverParams,
    pub seeds: Vec<u64>,
    pub workers: usize,
    /// Skip instances without a bounds entry (PSPLIB lists bounds only for
    /// instances that have a feasible solution).
    pub only_bounded: bool,
    /// Use only the first `n` instances after sorting.
    pub limit: Option<usize>,
    pub out: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            bounds: None,
            bounds_kind: BoundsKind::Optimal,
            params: SolverParams::default(),
            seeds: vec![0],
            workers: 1,
            only_bounded: false,
            limit: None,
            out: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no .mm instances in {0}")]
    EmptyDirectory(PathBuf),
    #[error("bounds file: {0}")]
    Bounds(#[from] BoundsError),
    #[error("no seeds given")]
    NoSeeds,
    #[error(transparent)]
    Params(#[from] SolverError),
    #[error("results file: {0}")]
    Results(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub instances: usize,
    pub runs: Vec<InstanceResult>,
    /// Best run per instance; the headline metrics use these.
    pub per_instance: Vec<InstanceResult>,
    /// Instances that could not be read, with the reason.
    pub failures: Vec<(String, String)>,
    pub ard: Option<f64>,
    pub ard_mean_of_runs: Option<f64>,
    pub optimal_rate: Option<f64>,
    pub feasible_rate: f64,
    pub feasible_rate_mean_of_runs: Option<f64>,
    pub bounds_kind: BoundsKind,
    pub params: SolverParams,
    pub seeds: Vec<u64>,
}

impl BenchmarkReport {
    /// Builds the aggregate numbers from per-run results. Each result must
    /// carry its `bound`.
    pub fn from_runs(
        runs: Vec<InstanceResult>,
        failures: Vec<(String, String)>,
        bounds_kind: BoundsKind,
        params: SolverParams,
        seeds: Vec<u64>,
    ) -> Self {
        let bounds = bounds_from_runs(&runs);
        let per_instance = best_of_runs(&runs);
        let optima = bounds_kind == BoundsKind::Optimal;
        let rates = compute_rates(&per_instance, &bounds, optima);
        let ard = compute_ard(&per_instance, &bounds).ok();
        let ard_mean_of_runs = mean_over_seeds(&runs, |rs| compute_ard(rs, &bounds).ok());
        let feasible_rate_mean_of_runs =
            mean_over_seeds(&runs, |rs| Some(compute_rates(rs, &bounds, optima).feasible));
        Self {
            instances: per_instance.len(),
            runs,
            per_instance,
            failures,
            ard,
            ard_mean_of_runs,
            optimal_rate: rates.optimal,
            feasible_rate: rates.feasible,
            feasible_rate_mean_of_runs,
            bounds_kind,
            params,
            seeds,
        }
    }

    pub fn summary(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
        let mut s = String::new();
        let _ = writeln!(s, "instances        : {}", self.instances);
        let _ = writeln!(s, "runs             : {} ({} seeds)", self.runs.len(), self.seeds.len());
        match (self.params.stop.max_schedules, self.params.stop.time_limit) {
            (Some(n), _) => {
                let _ = writeln!(s, "stopping rule    : {n} schedules");
            }
            (None, Some(t)) => {
                let _ = writeln!(
                    s,
                    "stopping rule    : {:.1} s wall clock (hardware-dependent; not comparable across machines)",
                    t.as_secs_f64()
                );
            }
            (None, None) => {}
        }
        let _ = writeln!(s, "Av.dev (%)       : {} (best of runs), {} (mean of runs)", pct(self.ard), pct(self.ard_mean_of_runs));
        let _ = writeln!(s, "Optimal rate (%) : {}", pct(self.optimal_rate));
        let _ = writeln!(
            s,
            "Feasible rate (%): {:.3} (best of runs), {} (mean of runs)",
            self.feasible_rate,
            pct(self.feasible_rate_mean_of_runs)
        );
        if self.bounds_kind == BoundsKind::LowerBound {
            let _ = writeln!(s, "bounds are lower bounds; deviations are upper estimates");
        }
        if !self.failures.is_empty() {
            let _ = writeln!(s, "skipped          : {}", self.failures.len());
            for (name, why) in &self.failures {
                let _ = writeln!(s, "  {name}: {why}");
            }
        }
        s
    }
}

fn bounds_from_runs(runs: &[InstanceResult]) -> BoundsTable {
    let mut t = BoundsTable::default();
    for r in runs {
        if let (Some((p, i)), Some(b)) = (r.key, r.bound) {
            t.insert(p, i, b);
        }
    }
    t
}

struct Loaded {
    name: String,
    key: Option<(u32, u32)>,
    instance: crate::model::ProjectInstance,
}

/// Sorted `.mm` files in `dir`.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "mm"))
        .collect();
    files.sort();
    Ok(files)
}

/// Solves every instance in `config.dir` once per seed and aggregates.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkReport, BenchError> {
    config.params.validate()?;
    if config.seeds.is_empty() {
        return Err(BenchError::NoSeeds);
    }
    let files = list_instances(&config.dir)?;
    if files.is_empty() {
        return Err(BenchError::EmptyDirectory(config.dir.clone()));
    }
    let bounds = match &config.bounds {
        Some(path) => psplib::parse_bounds_table(&std::fs::read_to_string(path).map_err(io_err(path))?)?,
        None => BoundsTable::default(),
    };

    let mut failures = Vec::new();
    let mut loaded = Vec::new();
    for path in &files {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        match psplib::read_instance(path) {
            Ok(instance) => {
                let key = instance_key(&name, instance.job_count());
                loaded.push(Loaded { name, key, instance });
            }
            Err(e) => failures.push((name, e.to_string())),
        }
    }
    loaded.sort_by(|a, b| a.key.cmp(&b.key).then_with(|| a.name.cmp(&b.name)));
    if config.only_bounded {
        loaded.retain(|l| l.key.and_then(|(p, i)| bounds.get(p, i)).is_some());
    }
    if let Some(n) = config.limit {
        loaded.truncate(n);
    }
    if loaded.is_empty() {
        return Err(BenchError::EmptyDirectory(config.dir.clone()));
    }

    let jobs: Vec<(&Loaded, u64)> = loaded
        .iter()
        .flat_map(|l| config.seeds.iter().map(move |&s| (l, s)))
        .collect();
    let solve = |(l, seed): &(&Loaded, u64)| -> InstanceResult {
        let params = config.params.with_seed(*seed);
        let started = Instant::now();
        let bound = l.key.and_then(|(p, i)| bounds.get(p, i));
        let base = InstanceResult {
            name: l.name.clone(),
            key: l.key,
            seed: *seed,
            feasible_found: false,
            makespan: None,
            bound,
            schedules: 0,
            generations: 0,
            runtime: Duration::ZERO,
            note: None,
        };
        match run_solver(&l.instance, &params) {
            Ok(r) => InstanceResult {
                feasible_found: r.feasible_found,
                makespan: r.feasible_found.then_some(r.best_schedule.makespan),
                schedules: r.schedules_generated,
                generations: r.generations,
                runtime: r.wall_time,
                ..base
            },
            Err(e) => InstanceResult {
                runtime: started.elapsed(),
                note: Some(e.to_string()),
                ..base
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| BenchError::Results(e.to_string()))?;
    let runs: Vec<InstanceResult> = pool.install(|| jobs.par_iter().map(solve).collect());

    let report = BenchmarkReport::from_runs(
        runs,
        failures,
        config.bounds_kind,
        config.params,
        config.seeds.clone(),
    );
    if let Some(out) = &config.out {
        std::fs::write(out, write_results(&report)?).map_err(io_err(out))?;
    }
    Ok(report)
}

const COLUMNS: [&str; 12] = [
    "instance",
    "parameter",
    "instance_number",
    "seed",
    "feasible",
    "makespan",
    "bound",
    "deviation_pct",
    "schedules",
    "generations",
    "runtime_ms",
    "note",
];

/// Column order of the results file.
pub fn results_columns() -> &'static [&'static str] {
    &COLUMNS
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Comma-delimited results: one header line, one row per run, then a
/// footer of `# key=value` lines with the aggregate numbers.
pub fn write_results(report: &BenchmarkReport) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| BenchError::Results(e.to_string());
    w.write_record(COLUMNS).map_err(err)?;
    for r in &report.runs {
        w.write_record([
            r.name.clone(),
            opt(r.key.map(|k| k.0)),
            opt(r.key.map(|k| k.1)),
            r.seed.to_string(),
            r.feasible_found.to_string(),
            opt(r.makespan),
            opt(r.bound),
            opt(r.deviation().map(|d| 100.0 * d)),
            r.schedules.to_string(),
            r.generations.to_string(),
            r.runtime.as_millis().to_string(),
            r.note.clone().unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| BenchError::Results(e.to_string()))?)
        .map_err(|e| BenchError::Results(e.to_string()))?;
    for (k, v) in footer(report) {
        let _ = writeln!(out, "# {k}={v}");
    }
    Ok(out)
}

fn footer(report: &BenchmarkReport) -> Vec<(&'static str, String)> {
    vec![
        ("instances", report.instances.to_string()),
        ("runs", report.runs.len().to_string()),
        ("ard_pct", opt(report.ard)),
        ("ard_mean_of_runs_pct", opt(report.ard_mean_of_runs)),
        ("optimal_rate_pct", opt(report.optimal_rate)),
        ("feasible_rate_pct", report.feasible_rate.to_string()),
        ("feasible_rate_mean_of_runs_pct", opt(report.feasible_rate_mean_of_runs)),
        ("bounds_kind", format!("{:?}", report.bounds_kind)),
        ("skipped", report.failures.len().to_string()),
    ]
}

/// Runs and footer read back from a results file.
#[derive(Debug, Clone)]
pub struct ResultsFile {
    pub runs: Vec<InstanceResult>,
    pub footer: BTreeMap<String, String>,
}

impl ResultsFile {
    /// Recomputes the footer from the rows, for comparison with `footer`.
    pub fn recomputed_footer(&self) -> BTreeMap<String, String> {
        let kind = match self.footer.get("bounds_kind").map(String::as_str) {
            Some("LowerBound") => BoundsKind::LowerBound,
            _ => BoundsKind::Optimal,
        };
        let skipped: usize = self.footer.get("skipped").and_then(|s| s.parse().ok()).unwrap_or(0);
        let failures = vec![(String::new(), String::new()); skipped];
        let report =
            BenchmarkReport::from_runs(self.runs.clone(), failures, kind, SolverParams::default(), vec![]);
        footer(&report).into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

pub fn read_results(text: &str) -> Result<ResultsFile, BenchError> {
    let err = |m: String| BenchError::Results(m);
    let mut footer = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(kv) = line.strip_prefix("# ") {
            let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("bad footer line {line:?}")))?;
            footer.insert(k.to_string(), v.to_string());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut runs = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<u64>, BenchError> {
            let s = get(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| err(format!("bad number {s:?}")))
            }
        };
        let key = match (num(1)?, num(2)?) {
            (Some(p), Some(i)) => Some((p as u32, i as u32)),
            _ => None,
        };
        runs.push(InstanceResult {
            name: get(0).to_string(),
            key,
            seed: num(3)?.unwrap_or(0),
            feasible_found: get(4) == "true",
            makespan: num(5)?.map(|v| v as u32),
            bound: num(6)?.map(|v| v as u32),
            schedules: num(8)?.unwrap_or(0),
            generations: num(9)?.unwrap_or(0) as usize,
            runtime: Duration::from_millis(num(10)?.unwrap_or(0)),
            note: Some(get(11).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(ResultsFile { runs, footer })
}
