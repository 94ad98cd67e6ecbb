//! Grover search and Dürr–Høyer minimum finding.
//!
//! Index spaces are padded to a power of two (at least 2); padded indices are
//! never marked, and measuring one counts as a miss. Two backends are
//! available: the statevector backend runs the circuit on [`qsim`], the
//! analytic backend samples from the closed-form success probability.
//!
//! [`qsim`]: crate::qsim

use alloc::vec::Vec;

use rand::Rng;

use crate::containment::{MinimumFinder, RunAccounting};
use crate::error::{Error, Result};
use crate::qsim::{Gate, StateVector, MAX_QUBITS};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Statevector,
    Analytic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverRun {
    /// Index measured, when it satisfies the predicate.
    pub found_index: Option<usize>,
    pub iterations_used: u64,
    /// One oracle application per iteration.
    pub oracle_calls: u64,
    pub backend: Backend,
}

/// Size of the padded index space for `n_items`.
pub fn padded_size(n_items: usize) -> usize {
    n_items.next_power_of_two().max(2)
}

/// `sin^2((2k + 1) asin(sqrt(marked / space)))`.
pub fn success_probability(space: usize, marked: usize, iterations: u64) -> f64 {
    if marked == 0 {
        return 0.0;
    }
    let theta = libm::asin(libm::sqrt(marked as f64 / space as f64));
    let s = libm::sin((2 * iterations + 1) as f64 * theta);
    s * s
}

/// Probability that a run measures a marked item, given that it measured a
/// non-padded one.
fn conditional_hit(n_items: usize, marked: usize, iterations: u64) -> f64 {
    let space = padded_size(n_items);
    if marked == 0 {
        return 0.0;
    }
    if marked == space {
        return 1.0;
    }
    let hit = success_probability(space, marked, iterations);
    // unmarked mass is spread evenly over the space - marked unmarked states
    let miss = (1.0 - hit) * (n_items - marked) as f64 / (space - marked) as f64;
    if hit + miss == 0.0 {
        0.0
    } else {
        hit / (hit + miss)
    }
}

/// Basis-state probabilities over the padded space after `iterations` Grover
/// iterations, from the statevector.
pub fn grover_probabilities(n_items: usize, marked: &dyn Fn(usize) -> bool, iterations: u64) -> Result<Vec<f64>> {
    if n_items == 0 {
        return Err(Error::EmptySearchSpace);
    }
    let space = padded_size(n_items);
    let q = space.trailing_zeros() as usize;
    if q > MAX_QUBITS {
        return Err(Error::TooManyQubits { needed: q, cap: MAX_QUBITS });
    }
    let register: Vec<usize> = (0..q).collect();
    let mut state = StateVector::new(q)?;
    state.apply_gate(&Gate::H, &register)?;
    let oracle = |x: usize| x < n_items && marked(x);
    for _ in 0..iterations {
        state.apply_gate(&Gate::PhaseFlipIf(&oracle), &register)?;
        state.diffusion(&register)?;
    }
    Ok(state.probabilities())
}

/// One Grover search with a fixed number of iterations.
pub fn grover_search(
    n_items: usize,
    marked: &dyn Fn(usize) -> bool,
    iterations: u64,
    rng_seed: u64,
    backend: Backend,
) -> Result<GroverRun> {
    if n_items == 0 {
        return Err(Error::EmptySearchSpace);
    }
    let mut r = rng::seeded(rng_seed);
    let found_index = match backend {
        Backend::Statevector => {
            let probs = grover_probabilities(n_items, marked, iterations)?;
            let real = &probs[..n_items];
            if real.iter().sum::<f64>() <= 0.0 {
                None
            } else {
                Some(rng::sample_weighted(&mut r, real)).filter(|&i| marked(i))
            }
        }
        Backend::Analytic => {
            let hits: Vec<usize> = (0..n_items).filter(|&i| marked(i)).collect();
            let p = conditional_hit(n_items, hits.len(), iterations);
            if !hits.is_empty() && r.gen::<f64>() < p {
                Some(hits[rng::index_below(&mut r, hits.len())])
            } else {
                None
            }
        }
    };
    Ok(GroverRun { found_index, iterations_used: iterations, oracle_calls: iterations, backend })
}

/// Tuning of [`durr_hoyer_min`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DurrHoyerConfig {
    /// Factor by which the iteration ceiling grows after a failed round.
    pub growth: f64,
    /// Total oracle-call budget is `ceil(budget_factor * sqrt(N))`.
    pub budget_factor: f64,
    /// Stop once `stall_factor * sqrt(N)` calls pass without an improvement.
    pub stall_factor: f64,
}

impl Default for DurrHoyerConfig {
    fn default() -> Self {
        DurrHoyerConfig { growth: 8.0 / 7.0, budget_factor: 9.0, stall_factor: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinFindResult {
    pub min_index: usize,
    pub min_value: f64,
    pub total_oracle_calls: u64,
    /// Threshold searched below in each round, with the round's outcome.
    pub rounds: Vec<(f64, GroverRun)>,
}

/// Dürr–Høyer minimum search over `g(0..n_items)`.
///
/// Starts from a uniformly random index. Each round Grover-searches the items
/// strictly below the current value with an iteration count drawn uniformly
/// from `0..=ceil(c)`; `c` resets to 1 after an improvement and otherwise
/// grows by `config.growth` up to `sqrt(N)`. Oracle calls are the Grover
/// iterations, one evaluation of the starting item and one verification per
/// improvement.
pub fn durr_hoyer_min(
    n_items: usize,
    g: &dyn Fn(usize) -> f64,
    rng_seed: u64,
    backend: Backend,
    config: &DurrHoyerConfig,
) -> Result<MinFindResult> {
    if n_items == 0 {
        return Err(Error::EmptySearchSpace);
    }
    if n_items == 1 {
        return Ok(MinFindResult { min_index: 0, min_value: g(0), total_oracle_calls: 0, rounds: Vec::new() });
    }
    let mut r = rng::seeded(rng_seed);
    let root = libm::sqrt(n_items as f64);
    let budget = libm::ceil(config.budget_factor * root) as u64;
    let stall = config.stall_factor * root;
    let max_rounds = 64 * (budget as usize + 1);

    let mut best = rng::index_below(&mut r, n_items);
    let mut best_value = g(best);
    let mut calls = 1u64;
    let mut since = 0u64;
    let mut ceiling = 1.0f64;
    let mut rounds = Vec::new();

    while calls < budget && (since as f64) < stall && rounds.len() < max_rounds {
        let k = r.gen_range(0..=libm::ceil(ceiling) as u64);
        let threshold = best_value;
        let below = |i: usize| g(i) < threshold;
        let run = grover_search(n_items, &below, k, r.gen(), backend)?;
        calls += run.oracle_calls;
        since += run.oracle_calls;
        match run.found_index {
            Some(i) => {
                best = i;
                best_value = g(i);
                calls += 1;
                since = 0;
                ceiling = 1.0;
            }
            None => ceiling = (ceiling * config.growth).min(root),
        }
        rounds.push((threshold, run));
    }
    Ok(MinFindResult { min_index: best, min_value: best_value, total_oracle_calls: calls, rounds })
}

/// Dürr–Høyer as a greedy minimum finder. Invocation `t` uses the derived seed
/// `(seed, t)`.
#[derive(Clone, Debug)]
pub struct GmfFinder {
    pub seed: u64,
    pub backend: Backend,
    pub config: DurrHoyerConfig,
    invocations: u64,
}

impl GmfFinder {
    pub fn new(seed: u64, backend: Backend) -> Self {
        GmfFinder { seed, backend, config: DurrHoyerConfig::default(), invocations: 0 }
    }
}

impl MinimumFinder for GmfFinder {
    fn find_min(&mut self, scores: &[f64], acct: &mut RunAccounting) -> usize {
        let seed = rng::derive_seed(self.seed, self.invocations);
        self.invocations += 1;
        let g = |i: usize| scores[i];
        match durr_hoyer_min(scores.len(), &g, seed, self.backend, &self.config) {
            Ok(res) => {
                acct.grover_oracle_calls += res.total_oracle_calls;
                res.min_index
            }
            // only reachable past the qubit cap; fall back to a scan
            Err(_) => {
                acct.linear_steps += scores.len() as u64;
                (0..scores.len()).fold(0, |b, i| if scores[i] < scores[b] { i } else { b })
            }
        }
    }
}
