//! Average relative deviation, optimal rate and feasible rate.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

use crate::psplib::BoundsTable;

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub name: String,
    /// `(parameter, instance)` key into the bounds table.
    pub key: Option<(u32, u32)>,
    pub seed: u64,
    pub feasible_found: bool,
    /// Present iff `feasible_found`.
    pub makespan: Option<u32>,
    pub bound: Option<u32>,
    pub schedules: u64,
    pub generations: usize,
    #[serde(skip)]
    pub runtime: Duration,
    pub note: Option<String>,
}

impl InstanceResult {
    /// Relative deviation from the bound, as a fraction.
    pub fn deviation(&self) -> Option<f64> {
        let (m, b) = (self.makespan?, self.bound?);
        Some((f64::from(m) - f64::from(b)) / f64::from(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no bound for feasible instance {0}")]
    MissingBound(String),
    #[error("no feasible results to average")]
    EmptyResultSet,
}

fn bound_for(r: &InstanceResult, bounds: &BoundsTable) -> Option<u32> {
    r.key.and_then(|(p, i)| bounds.get(p, i))
}

/// Mean relative deviation of the feasible results from their bounds, in
/// percent.
pub fn compute_ard(results: &[InstanceResult], bounds: &BoundsTable) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in results.iter().filter(|r| r.feasible_found) {
        let bound = bound_for(r, bounds).ok_or_else(|| MetricsError::MissingBound(r.name.clone()))?;
        let makespan = r.makespan.expect("feasible result carries a makespan");
        sum += (f64::from(makespan) - f64::from(bound)) / f64::from(bound);
        n += 1;
    }
    if n == 0 {
        return Err(MetricsError::EmptyResultSet);
    }
    Ok(100.0 * sum / n as f64)
}

/// Optimal and feasible rates in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    /// `None` when the bounds are not proven optima or no result has one.
    pub optimal: Option<f64>,
    pub feasible: f64,
}

pub fn compute_rates(results: &[InstanceResult], bounds: &BoundsTable, bounds_are_optima: bool) -> Rates {
    let feasible = if results.is_empty() {
        0.0
    } else {
        100.0 * results.iter().filter(|r| r.feasible_found).count() as f64 / results.len() as f64
    };
    let with_bound: Vec<(&InstanceResult, u32)> =
        results.iter().filter_map(|r| bound_for(r, bounds).map(|b| (r, b))).collect();
    let optimal = (bounds_are_optima && !with_bound.is_empty()).then(|| {
        let hits = with_bound.iter().filter(|(r, b)| r.makespan == Some(*b)).count();
        100.0 * hits as f64 / with_bound.len() as f64
    });
    Rates { optimal, feasible }
}

/// Best run per instance: feasible before infeasible, then smaller
/// makespan, then earlier run. Instance order follows first appearance.
pub fn best_of_runs(runs: &[InstanceResult]) -> Vec<InstanceResult> {
    let mut order: Vec<&str> = Vec::new();
    let mut best: BTreeMap<&str, &InstanceResult> = BTreeMap::new();
    for r in runs {
        match best.get(r.name.as_str()) {
            None => {
                order.push(&r.name);
                best.insert(&r.name, r);
            }
            Some(cur) => {
                let rank = |x: &InstanceResult| (!x.feasible_found, x.makespan.unwrap_or(u32::MAX));
                if rank(r) < rank(cur) {
                    best.insert(&r.name, r);
                }
            }
        }
    }
    order.iter().map(|n| best[n].clone()).collect()
}

/// Average over seeds of the per-seed metric.
pub fn mean_over_seeds(
    runs: &[InstanceResult],
    metric: impl Fn(&[InstanceResult]) -> Option<f64>,
) -> Option<f64> {
    let mut by_seed: BTreeMap<u64, Vec<InstanceResult>> = BTreeMap::new();
    for r in runs {
        by_seed.entry(r.seed).or_default().push(r.clone());
    }
    let values: Vec<f64> = by_seed.values().filter_map(|rs| metric(rs)).collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(inst: u32, makespan: Option<u32>) -> InstanceResult {
        InstanceResult {
            name: format!("i{inst}"),
            key: Some((1, inst)),
            seed: 0,
            feasible_found: makespan.is_some(),
            makespan,
            bound: None,
            schedules: 0,
            generations: 0,
            runtime: Duration::ZERO,
            note: None,
        }
    }

    fn table(rows: &[(u32, u32)]) -> BoundsTable {
        let mut t = BoundsTable::default();
        for &(i, m) in rows {
            t.insert(1, i, m);
        }
        t
    }

    #[test]
    fn ard_single() {
        let ard = compute_ard(&[result(1, Some(12))], &table(&[(1, 10)])).unwrap();
        assert!((ard - 20.0).abs() < 1e-12);
    }

    #[test]
    fn ard_zero_and_mean() {
        let b = table(&[(1, 10), (2, 10)]);
        assert_eq!(compute_ard(&[result(1, Some(10)), result(2, Some(10))], &b).unwrap(), 0.0);
        let ard = compute_ard(&[result(1, Some(11)), result(2, Some(13))], &b).unwrap();
        assert!((ard - 20.0).abs() < 1e-12);
    }

    #[test]
    fn ard_errors() {
        assert_eq!(
            compute_ard(&[result(3, Some(5))], &table(&[(1, 4)])),
            Err(MetricsError::MissingBound("i3".into()))
        );
        assert_eq!(compute_ard(&[result(1, None)], &table(&[(1, 4)])), Err(MetricsError::EmptyResultSet));
        assert_eq!(compute_ard(&[], &table(&[])), Err(MetricsError::EmptyResultSet));
    }

    #[test]
    fn rates() {
        let rs = [result(1, Some(10)), result(2, Some(10)), result(3, Some(10)), result(4, Some(11))];
        let b = table(&[(1, 10), (2, 10), (3, 10), (4, 10)]);
        assert_eq!(compute_rates(&rs, &b, true), Rates { optimal: Some(75.0), feasible: 100.0 });
        assert_eq!(compute_rates(&rs, &BoundsTable::default(), true), Rates { optimal: None, feasible: 100.0 });
        assert_eq!(compute_rates(&rs, &b, false).optimal, None);
        let none = [result(1, None), result(2, None)];
        assert_eq!(compute_rates(&none, &b, true), Rates { optimal: Some(0.0), feasible: 0.0 });
        assert_eq!(compute_rates(&none, &BoundsTable::default(), true), Rates { optimal: None, feasible: 0.0 });
    }

    #[test]
    fn best_of_runs_prefers_feasible_then_shorter() {
        let mut a = result(1, None);
        a.seed = 0;
        let mut b = result(1, Some(12));
        b.seed = 1;
        let mut c = result(1, Some(11));
        c.seed = 2;
        let d = result(2, Some(5));
        let best = best_of_runs(&[a, b, c, d]);
        assert_eq!(best.len(), 2);
        assert_eq!(best[0].seed, 2);
        assert_eq!(best[1].name, "i2");
    }
}
