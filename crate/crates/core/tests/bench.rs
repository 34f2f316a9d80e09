use std::process::Command;

use mrcpsp_core::bench::{
    brute_force_optimum, read_results, run_benchmark, write_results, BenchConfig, BenchError,
};
use mrcpsp_core::eda::SolverParams;
use mrcpsp_core::model::{generate_tiny_instance, TinyInstanceBounds};
use mrcpsp_core::psplib::{write_bounds_table, write_instance, BoundsTable};

/// Writes `count` tiny instances and their optima into `dir`.
fn tiny_suite(dir: &std::path::Path, count: u32) {
    let mut bounds = BoundsTable::default();
    for k in 1..=count {
        let p = generate_tiny_instance(1000 + u64::from(k), TinyInstanceBounds::default());
        std::fs::write(dir.join(format!("tiny{}1_{k}.mm", p.job_count())), write_instance(&p)).unwrap();
        let optimum = brute_force_optimum(&p).unwrap().makespan().unwrap();
        bounds.insert(1, k, optimum);
    }
    std::fs::write(dir.join("optima.txt"), write_bounds_table(&bounds)).unwrap();
}

#[test]
fn tiny_suite_reaches_zero_deviation() {
    let dir = tempfile::tempdir().unwrap();
    tiny_suite(dir.path(), 20);
    let out = dir.path().join("results.csv");
    let config = BenchConfig {
        bounds: Some(dir.path().join("optima.txt")),
        params: SolverParams::default().with_budget(20_000),
        seeds: vec![0, 1],
        workers: 4,
        out: Some(out.clone()),
        ..BenchConfig::new(dir.path())
    };
    let report = run_benchmark(&config).unwrap();
    assert_eq!(report.instances, 20);
    assert_eq!(report.runs.len(), 40);
    assert_eq!(report.ard, Some(0.0));
    assert_eq!(report.optimal_rate, Some(100.0));
    assert_eq!(report.feasible_rate, 100.0);
    assert!(report.failures.is_empty());

    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text, write_results(&report).unwrap());
    let back = read_results(&text).unwrap();
    assert_eq!(back.runs.len(), 40);
    assert_eq!(back.recomputed_footer(), back.footer);
}

#[test]
fn results_round_trip_with_deviations_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    tiny_suite(dir.path(), 6);
    std::fs::write(dir.path().join("broken.mm"), "not an instance\n").unwrap();
    // Tight budget so some runs miss the optimum.
    let config = BenchConfig {
        bounds: Some(dir.path().join("optima.txt")),
        params: SolverParams { population: 10, elite: 2, ..SolverParams::default() }.with_budget(30),
        seeds: vec![3, 4, 5],
        ..BenchConfig::new(dir.path())
    };
    let report = run_benchmark(&config).unwrap();
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].0, "broken");
    assert!(report.summary().contains("broken"));
    let back = read_results(&write_results(&report).unwrap()).unwrap();
    assert_eq!(back.recomputed_footer(), back.footer);
    assert_eq!(back.footer["skipped"], "1");
    for (a, b) in back.runs.iter().zip(&report.runs) {
        assert_eq!((a.makespan, a.bound, a.seed, a.feasible_found), (b.makespan, b.bound, b.seed, b.feasible_found));
    }
}

#[test]
fn empty_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(run_benchmark(&BenchConfig::new(dir.path())), Err(BenchError::EmptyDirectory(_))));
    let status = Command::new(env!("CARGO_BIN_EXE_mrcpsp"))
        .arg("bench")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
}

#[test]
fn cli_gen_tiny_oracle_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_mrcpsp");
    let run = |args: &[&str]| {
        let out = Command::new(exe).args(args).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let d = dir.path().to_str().unwrap();
    run(&["gen-tiny", "--out", d, "--count", "4", "--seed", "9"]);
    let files: Vec<_> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".mm"))
        .collect();
    assert_eq!(files.len(), 4);
    let first = dir.path().join(&files[0]);
    assert!(run(&["oracle", first.to_str().unwrap()]).starts_with("optimum "));
    let bounds = dir.path().join("optima.txt");
    let summary = run(&["bench", d, "--bounds", bounds.to_str().unwrap(), "--schedules", "3000"]);
    assert!(summary.contains("Feasible rate (%): 100.000"), "{summary}");
}
