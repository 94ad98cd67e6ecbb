//! Benchmark sweeps behind `bench-estimation` and `bench-minfind`.
//!
//! Every row carries the seed that reproduces it: an MC row is
//! `mc_influence(instance, work_units, rng_seed)`, a QAE row is
//! `qae_estimate(instance, {}, m, rng_seed, mode)`, and a min-finding row is the
//! list drawn from `rng_seed`.

use std::io::Write;

use qcontain_core::qae::{estimate_from_distribution, qae_distribution};
use qcontain_core::rng::{derive_seed, seeded};
use qcontain_core::{
    durr_hoyer_min, exact_influence, mc_influence, Backend, CandidateSet, DurrHoyerConfig, ProblemInstance,
    QaeMode, Result, DEFAULT_EXACT_EDGE_CAP,
};
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimationRow {
    pub method: &'static str,
    /// MC trials or Q applications.
    pub work_units: u64,
    /// `|sigma_hat - sigma| / |V|`.
    pub error: f64,
    pub rng_seed: u64,
}

#[derive(Clone, Debug)]
pub struct EstimationBench {
    pub mc_trials: Vec<u64>,
    pub qae_m: Vec<usize>,
    pub reps: u64,
    pub mode: QaeMode,
}

/// Exact normalized influence and one row per (grid point, repetition).
/// Repetition `r` uses seed `derive_seed(rng_seed, r)` for every grid point.
pub fn bench_estimation(instance: &ProblemInstance, cfg: &EstimationBench, rng_seed: u64) -> Result<(f64, Vec<EstimationRow>)> {
    let n = instance.node_count() as f64;
    let truth = exact_influence(instance, DEFAULT_EXACT_EDGE_CAP)?.sigma / n;
    let mut rows = Vec::new();
    for &t in &cfg.mc_trials {
        for r in 0..cfg.reps {
            let seed = derive_seed(rng_seed, r);
            let est = mc_influence(instance, t, seed)?;
            rows.push(EstimationRow { method: "mc", work_units: t, error: (est.sigma_normalized - truth).abs(), rng_seed: seed });
        }
    }
    for &m in &cfg.qae_m {
        let dist = qae_distribution(instance, &CandidateSet::empty(), m, cfg.mode)?;
        for r in 0..cfg.reps {
            let seed = derive_seed(rng_seed, r);
            let est = estimate_from_distribution(&dist, m, seed, cfg.mode);
            rows.push(EstimationRow { method: "qae", work_units: est.q_applications, error: (est.a_hat - truth).abs(), rng_seed: seed });
        }
    }
    Ok((truth, rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinfindRow {
    pub method: &'static str,
    pub n_items: usize,
    /// Linear steps or Grover oracle calls.
    pub work_units: u64,
    pub found_value: f64,
    pub true_min: f64,
    pub success: bool,
    pub rng_seed: u64,
}

/// Uniform `[0, 1)` values for one benchmark list.
pub fn random_list(n: usize, seed: u64) -> Vec<f64> {
    let mut r = seeded(seed);
    (0..n).map(|_| r.gen()).collect()
}

/// For each size and repetition, a linear-scan row and a Dürr–Høyer row on the
/// same list.
pub fn bench_minfind(sizes: &[usize], reps: u64, backend: Backend, rng_seed: u64) -> Result<Vec<MinfindRow>> {
    let cfg = DurrHoyerConfig::default();
    let mut rows = Vec::new();
    for &n in sizes {
        for r in 0..reps {
            let seed = derive_seed(derive_seed(rng_seed, n as u64), r);
            let values = random_list(n, seed);
            let true_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            rows.push(MinfindRow {
                method: "linear",
                n_items: n,
                work_units: n as u64,
                found_value: true_min,
                true_min,
                success: true,
                rng_seed: seed,
            });
            let res = durr_hoyer_min(n, &|i| values[i], derive_seed(seed, 0), backend, &cfg)?;
            rows.push(MinfindRow {
                method: "gmf",
                n_items: n,
                work_units: res.total_oracle_calls,
                found_value: res.min_value,
                true_min,
                success: res.min_value == true_min,
                rng_seed: seed,
            });
        }
    }
    Ok(rows)
}

fn comments(out: &mut Vec<u8>, lines: &[String]) {
    for l in lines {
        writeln!(out, "# {l}").unwrap();
    }
}

pub fn estimation_csv(meta: &[String], rows: &[EstimationRow]) -> Vec<u8> {
    let mut out = Vec::new();
    comments(&mut out, meta);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "work_units", "error", "rng_seed"]).unwrap();
    for r in rows {
        w.write_record([r.method.to_string(), r.work_units.to_string(), r.error.to_string(), r.rng_seed.to_string()]).unwrap();
    }
    w.into_inner().unwrap()
}

pub fn minfind_csv(meta: &[String], rows: &[MinfindRow]) -> Vec<u8> {
    let mut out = Vec::new();
    comments(&mut out, meta);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "n_items", "work_units", "found_value", "true_min", "success", "rng_seed"]).unwrap();
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.n_items.to_string(),
            r.work_units.to_string(),
            r.found_value.to_string(),
            r.true_min.to_string(),
            (r.success as u8).to_string(),
            r.rng_seed.to_string(),
        ])
        .unwrap();
    }
    w.into_inner().unwrap()
}
