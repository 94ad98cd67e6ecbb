//! Amplitude estimation of the expected influence.
//!
//! The state-preparation operator `A` acts on one qubit per arc plus an
//! ancilla. Arc qubit `e` is rotated so that it reads 1 with probability
//! `p_e`, which puts the arc register in a superposition over live-edge
//! configurations `x`. The ancilla is then rotated by `2 asin(sqrt(f(x)))`,
//! where `f(x)` is the fraction of nodes reachable from the seeds under `x`.
//! The ancilla therefore reads 1 with probability `a = sigma / |V|`.
//!
//! `a` is read out by canonical phase estimation on the Grover operator
//! `Q = A (2|0><0| - I) A^dagger S_f`, whose eigenphases are `+-theta / pi`
//! with `a = sin^2(theta)`. The analytic mode skips the statevector and draws
//! the outcome from the closed-form phase-estimation distribution for the
//! exact `a`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cascade::{
    configuration_weight, exact_influence, live_edge_reach, EstimateMethod, InfluenceEstimate,
    DEFAULT_EXACT_EDGE_CAP,
};
use crate::containment::{InfluenceEstimator, RunAccounting};
use crate::error::{Error, Result};
use crate::graph::{CandidateSet, ProblemInstance};
use crate::qsim::{Gate, StateVector, MAX_QUBITS};
use crate::rng;

/// Repetitions whose median forms a [`qae_influence`] estimate.
pub const REPETITIONS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QaeMode {
    Statevector,
    Analytic,
}

/// The state-preparation operator for one (already reduced) instance.
///
/// Qubits `0..edge_count` hold the arcs, qubit `edge_count` is the ancilla.
#[derive(Clone, Debug, PartialEq)]
pub struct AOperatorSpec {
    edge_probs: Vec<f64>,
    /// Reachable fraction for every live-edge configuration.
    reach_fraction: Vec<f64>,
    node_count: usize,
}

impl AOperatorSpec {
    pub fn edge_count(&self) -> usize {
        self.edge_probs.len()
    }

    pub fn ancilla(&self) -> usize {
        self.edge_probs.len()
    }

    /// Arc qubits plus the ancilla.
    pub fn work_qubits(&self) -> usize {
        self.edge_probs.len() + 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `f(x)` for configuration `x`.
    pub fn reach_fraction(&self, x: usize) -> f64 {
        self.reach_fraction[x]
    }

    /// The amplitude `a = sum_x P(x) f(x)` computed classically.
    pub fn amplitude(&self) -> f64 {
        self.reach_fraction
            .iter()
            .enumerate()
            .map(|(x, f)| configuration_weight(&self.edge_probs, x as u64) * f)
            .sum()
    }

    fn work(&self) -> Vec<usize> {
        (0..self.work_qubits()).collect()
    }

    /// Applies `A` (or `A^dagger`) to the work qubits of `state`.
    pub fn apply(&self, state: &mut StateVector, adjoint: bool) -> Result<()> {
        let edges: Vec<usize> = (0..self.edge_count()).collect();
        let angle = |x: usize| 2.0 * libm::asin(libm::sqrt(self.reach_fraction[x]));
        let mut targets = vec![self.ancilla()];
        targets.extend_from_slice(&edges);
        let ancilla_rotation = Gate::ConditionalRy(&angle);
        if adjoint {
            state.apply_inverse(&ancilla_rotation, &targets, &[])?;
        }
        for (e, &p) in self.edge_probs.iter().enumerate() {
            let g = Gate::Ry(2.0 * libm::asin(libm::sqrt(p)));
            if adjoint {
                state.apply_inverse(&g, &[e], &[])?;
            } else {
                state.apply_gate(&g, &[e])?;
            }
        }
        if !adjoint {
            state.apply_gate(&ancilla_rotation, &targets)?;
        }
        Ok(())
    }

    /// Applies `Q` (or `Q^dagger`) to the work qubits, controlled on
    /// `controls`. Only the two reflections carry the controls: `A` and
    /// `A^dagger` cancel wherever the controls are off.
    pub fn apply_q(&self, state: &mut StateVector, controls: &[usize], adjoint: bool) -> Result<()> {
        let work = self.work();
        let good = Gate::PhaseFlipIf(&|x| x == 1);
        let nonzero = Gate::PhaseFlipIf(&|x| x != 0);
        if adjoint {
            self.apply(state, true)?;
            state.apply_controlled(&nonzero, &work, controls)?;
            self.apply(state, false)?;
            state.apply_controlled(&good, &[self.ancilla()], controls)?;
        } else {
            state.apply_controlled(&good, &[self.ancilla()], controls)?;
            self.apply(state, true)?;
            state.apply_controlled(&nonzero, &work, controls)?;
            self.apply(state, false)?;
        }
        Ok(())
    }

    /// `A|0>` as a fresh statevector.
    pub fn prepare(&self) -> Result<StateVector> {
        let mut s = StateVector::new(self.work_qubits())?;
        self.apply(&mut s, false)?;
        Ok(s)
    }
}

/// Builds `A` for `instance` with `removal` applied.
pub fn build_a_operator(instance: &ProblemInstance, removal: &CandidateSet) -> Result<AOperatorSpec> {
    let reduced = instance.without(removal)?;
    let edges = reduced.graph().edge_count();
    if edges + 1 > MAX_QUBITS {
        return Err(Error::TooManyQubits { needed: edges + 1, cap: MAX_QUBITS });
    }
    let n = reduced.node_count() as f64;
    let reach_fraction = (0..1u64 << edges)
        .map(|x| live_edge_reach(&reduced, x).iter().filter(|&&b| b).count() as f64 / n)
        .collect();
    Ok(AOperatorSpec {
        edge_probs: reduced.graph().edges().iter().map(|e| e.p).collect(),
        reach_fraction,
        node_count: reduced.node_count(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeEstimate {
    /// `sin^2(theta_hat)`, on the grid `sin^2(pi y / 2^m)`.
    pub a_hat: f64,
    pub theta_hat: f64,
    /// Measured evaluation-register value.
    pub y: usize,
    /// Evaluation qubits.
    pub m: usize,
    /// `2^m - 1`.
    pub q_applications: u64,
    /// `2 q_applications + 1`.
    pub a_applications: u64,
    pub mode: QaeMode,
}

/// `sin^2(M pi d) / (M^2 sin^2(pi d))`, the probability of reading `y` when
/// the phase sits `d` away from `y / M`.
fn fejer(d: f64, big_m: f64) -> f64 {
    let d = d - libm::round(d);
    if d == 0.0 {
        return 1.0;
    }
    let num = libm::sin(big_m * PI * d);
    let den = big_m * libm::sin(PI * d);
    (num * num) / (den * den)
}

/// Closed-form outcome distribution of `m`-qubit phase estimation on `Q` for
/// amplitude `a`: an even mixture of the `+theta/pi` and `-theta/pi` branches.
pub fn analytic_qpe_distribution(a: f64, m: usize) -> Vec<f64> {
    let size = 1usize << m;
    let big_m = size as f64;
    let phase = libm::asin(libm::sqrt(a.clamp(0.0, 1.0))) / PI;
    let mut dist: Vec<f64> = (0..size)
        .map(|y| {
            let g = y as f64 / big_m;
            0.5 * fejer(phase - g, big_m) + 0.5 * fejer(-phase - g, big_m)
        })
        .collect();
    let total: f64 = dist.iter().sum();
    dist.iter_mut().for_each(|p| *p /= total);
    dist
}

/// Outcome distribution of the evaluation register after running phase
/// estimation on the statevector.
pub fn statevector_qpe_distribution(spec: &AOperatorSpec, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::NoEvaluationQubits);
    }
    let w = spec.work_qubits();
    let needed = w + m;
    if needed > MAX_QUBITS {
        return Err(Error::TooManyQubits { needed, cap: MAX_QUBITS });
    }
    let eval: Vec<usize> = (w..needed).collect();
    let mut state = StateVector::new(needed)?;
    spec.apply(&mut state, false)?;
    state.apply_gate(&Gate::H, &eval)?;
    for (j, &c) in eval.iter().enumerate() {
        for _ in 0..1u64 << j {
            spec.apply_q(&mut state, &[c], false)?;
        }
    }
    state.inverse_qft(&eval)?;
    state.register_distribution(&eval)
}

/// The amplitude used by the analytic mode: `sigma / |V|` from the exact
/// oracle.
pub fn analytic_amplitude(instance: &ProblemInstance, removal: &CandidateSet) -> Result<f64> {
    let reduced = instance.without(removal)?;
    Ok(exact_influence(&reduced, DEFAULT_EXACT_EDGE_CAP)?.sigma / reduced.node_count() as f64)
}

/// Outcome distribution for `instance` minus `removal` in the given mode.
pub fn qae_distribution(instance: &ProblemInstance, removal: &CandidateSet, m: usize, mode: QaeMode) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::NoEvaluationQubits);
    }
    match mode {
        QaeMode::Statevector => statevector_qpe_distribution(&build_a_operator(instance, removal)?, m),
        QaeMode::Analytic => {
            if m > MAX_QUBITS {
                return Err(Error::TooManyQubits { needed: m, cap: MAX_QUBITS });
            }
            Ok(analytic_qpe_distribution(analytic_amplitude(instance, removal)?, m))
        }
    }
}

/// Reads one outcome from `dist` and converts it into an estimate.
pub fn estimate_from_distribution(dist: &[f64], m: usize, rng_seed: u64, mode: QaeMode) -> AmplitudeEstimate {
    let y = rng::sample_weighted(&mut rng::seeded(rng_seed), dist);
    let theta_hat = PI * y as f64 / (1u64 << m) as f64;
    let s = libm::sin(theta_hat);
    let q_applications = (1u64 << m) - 1;
    AmplitudeEstimate {
        a_hat: (s * s).clamp(0.0, 1.0),
        theta_hat,
        y,
        m,
        q_applications,
        a_applications: 2 * q_applications + 1,
        mode,
    }
}

/// One phase-estimation run with `m` evaluation qubits.
pub fn qae_estimate(
    instance: &ProblemInstance,
    removal: &CandidateSet,
    m: usize,
    rng_seed: u64,
    mode: QaeMode,
) -> Result<AmplitudeEstimate> {
    let dist = qae_distribution(instance, removal, m, mode)?;
    Ok(estimate_from_distribution(&dist, m, rng_seed, mode))
}

/// Evaluation qubits for target additive error `epsilon` on `a`.
pub fn evaluation_qubits(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Ok(libm::ceil(libm::log2(PI / epsilon)) as usize + 2)
}

/// Phase-estimation error bound on `a` for `m` evaluation qubits.
pub fn qpe_error_bound(m: usize) -> f64 {
    let big_m = (1u64 << m) as f64;
    PI / big_m + PI * PI / (big_m * big_m)
}

/// Expected influence from the median of [`REPETITIONS`] phase-estimation
/// runs at the resolution implied by `epsilon`.
///
/// `error_bound` is the single-run bound scaled to node units;
/// `trials_or_calls` is the total number of `Q` applications.
pub fn qae_influence(
    instance: &ProblemInstance,
    removal: &CandidateSet,
    epsilon: f64,
    rng_seed: u64,
    mode: QaeMode,
) -> Result<InfluenceEstimate> {
    let m = evaluation_qubits(epsilon)?;
    let dist = qae_distribution(instance, removal, m, mode)?;
    let mut runs: Vec<AmplitudeEstimate> = (0..REPETITIONS as u64)
        .map(|r| estimate_from_distribution(&dist, m, rng::derive_seed(rng_seed, r), mode))
        .collect();
    runs.sort_by(|a, b| a.a_hat.total_cmp(&b.a_hat));
    let n = instance.node_count();
    let calls: u64 = runs.iter().map(|r| r.q_applications).sum();
    let mut est = InfluenceEstimate::new(runs[REPETITIONS / 2].a_hat * n as f64, n, EstimateMethod::Qae, calls);
    est.error_bound = Some(qpe_error_bound(m) * n as f64);
    Ok(est)
}

/// [`qae_influence`] as a greedy estimator. The seed is reused across calls.
#[derive(Clone, Debug)]
pub struct QaeEstimator {
    pub epsilon: f64,
    pub seed: u64,
    pub mode: QaeMode,
}

impl InfluenceEstimator for QaeEstimator {
    fn estimate(&mut self, instance: &ProblemInstance, acct: &mut RunAccounting) -> Result<InfluenceEstimate> {
        let est = qae_influence(instance, &CandidateSet::empty(), self.epsilon, self.seed, self.mode)?;
        acct.q_applications += est.trials_or_calls;
        acct.a_applications += 2 * est.trials_or_calls + REPETITIONS as u64;
        acct.diffusion_simulations += 1;
        Ok(est)
    }

    fn noise_allowance(&self, estimate: &InfluenceEstimate) -> f64 {
        2.0 * estimate.error_bound.unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_instance, Graph, NodeId, RandomInstanceParams};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn inst(n: usize, edges: &[(usize, usize, f64)], seeds: &[usize]) -> ProblemInstance {
        let g = Graph::directed(n, edges.iter().map(|&(s, d, p)| (s, d, p, 0.5))).unwrap();
        ProblemInstance::new(g, seeds.iter().map(|&s| NodeId(s)), 1.0).unwrap()
    }

    fn ancilla_p1(i: &ProblemInstance) -> f64 {
        let spec = build_a_operator(i, &CandidateSet::empty()).unwrap();
        spec.prepare().unwrap().probability_of(spec.ancilla(), true).unwrap()
    }

    fn tv(a: &[f64], b: &[f64]) -> f64 {
        0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
    }

    #[test]
    fn a_operator_examples() {
        assert!((ancilla_p1(&inst(1, &[], &[0])) - 1.0).abs() < 1e-12);
        assert!((ancilla_p1(&inst(2, &[(0, 1, 0.5)], &[0])) - 0.75).abs() < 1e-12);
        let chain = ancilla_p1(&inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]));
        assert!((chain - 1.75 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn a_operator_respects_removal_and_cap() {
        let i = inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]);
        let spec = build_a_operator(&i, &CandidateSet::from_indices(vec![1])).unwrap();
        assert_eq!(spec.edge_count(), 1);
        assert!((spec.amplitude() - 0.5).abs() < 1e-15);

        let big = RandomInstanceParams { n_nodes: 8, edge_prob: 1.0, ..Default::default() };
        let big = generate_random_instance(&big, 1).unwrap();
        assert!(matches!(build_a_operator(&big, &CandidateSet::empty()), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn q_rotates_by_two_theta() {
        let spec = build_a_operator(&inst(2, &[(0, 1, 0.5)], &[0]), &CandidateSet::empty()).unwrap();
        let theta = libm::asin(libm::sqrt(0.75));
        let mut s = spec.prepare().unwrap();
        for k in 1..=2 {
            spec.apply_q(&mut s, &[], false).unwrap();
            let expect = libm::sin((2 * k + 1) as f64 * theta);
            assert!((s.probability_of(spec.ancilla(), true).unwrap() - expect * expect).abs() < 1e-12);
        }
    }

    #[test]
    fn q_is_unitary() {
        let spec = build_a_operator(&inst(3, &[(0, 1, 0.3), (1, 2, 0.6)], &[0]), &CandidateSet::empty()).unwrap();
        let mut r = rng::seeded(4);
        for _ in 0..5 {
            use rand::Rng;
            let mut v: Vec<Complex64> = (0..8).map(|_| Complex64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5)).collect();
            let norm = libm::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
            v.iter_mut().for_each(|a| *a /= norm);
            let start = StateVector::from_amplitudes(v).unwrap();
            let mut s = start.clone();
            spec.apply_q(&mut s, &[], false).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            spec.apply_q(&mut s, &[], true).unwrap();
            for (x, y) in s.amplitudes().iter().zip(start.amplitudes()) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_aligned_phases() {
        let half = analytic_qpe_distribution(0.5, 3);
        assert!((half[2] + half[6] - 1.0).abs() < 1e-12);
        let s = libm::sin(PI / 8.0);
        let eighth = analytic_qpe_distribution(s * s, 3);
        assert!((eighth[1] + eighth[7] - 1.0).abs() < 1e-12);
        assert!((analytic_qpe_distribution(0.0, 4)[0] - 1.0).abs() < 1e-12);
        assert!((analytic_qpe_distribution(1.0, 4)[8] - 1.0).abs() < 1e-12);

        let e = estimate_from_distribution(&half, 3, 9, QaeMode::Analytic);
        assert!(e.y == 2 || e.y == 6);
        assert!((e.a_hat - 0.5).abs() < 1e-15);
        assert_eq!(e.q_applications, 7);
        assert_eq!(e.a_applications, 15);
    }

    #[test]
    fn statevector_matches_analytic_distribution() {
        let cases = [
            inst(2, &[(0, 1, 0.5)], &[0]),
            inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]),
            inst(3, &[(0, 1, 0.3), (1, 2, 0.8), (0, 2, 0.15)], &[0]),
            inst(1, &[], &[0]),
        ];
        for i in &cases {
            for m in [1, 3, 5] {
                let sv = qae_distribution(i, &CandidateSet::empty(), m, QaeMode::Statevector).unwrap();
                let an = qae_distribution(i, &CandidateSet::empty(), m, QaeMode::Analytic).unwrap();
                assert!(tv(&sv, &an) < 1e-8, "m={m}: {sv:?} vs {an:?}");
            }
        }
    }

    #[test]
    fn statevector_grid_example() {
        // a = 0.5: 1 node reached with certainty out of 2, nothing else
        let i = inst(2, &[(0, 1, 0.0)], &[0]);
        let d = qae_distribution(&i, &CandidateSet::empty(), 3, QaeMode::Statevector).unwrap();
        assert!((d[2] + d[6] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epsilon_selects_resolution() {
        assert_eq!(evaluation_qubits(0.005), Ok(12));
        assert_eq!(evaluation_qubits(1.0), Err(Error::EpsilonOutOfRange(1.0)));
        assert_eq!(evaluation_qubits(0.0), Err(Error::EpsilonOutOfRange(0.0)));
        let i = inst(2, &[(0, 1, 0.5)], &[0]);
        assert!(qae_influence(&i, &CandidateSet::empty(), 1.5, 0, QaeMode::Analytic).is_err());
        assert_eq!(
            qae_estimate(&i, &CandidateSet::empty(), 0, 0, QaeMode::Analytic),
            Err(Error::NoEvaluationQubits)
        );
    }

    #[test]
    fn influence_within_bound_on_single_edge() {
        let i = inst(2, &[(0, 1, 0.5)], &[0]);
        for mode in [QaeMode::Analytic, QaeMode::Statevector] {
            for seed in 0..5 {
                let e = qae_influence(&i, &CandidateSet::empty(), 0.05, seed, mode).unwrap();
                assert!((e.sigma - 1.5).abs() <= 0.1, "{}", e.sigma);
                assert_eq!(e.method, EstimateMethod::Qae);
                assert_eq!(e.trials_or_calls, 3 * 255);
                assert!(e.std_error.is_none());
            }
        }
    }

    #[test]
    fn single_run_bound_holds_often() {
        let i = inst(3, &[(0, 1, 0.45), (1, 2, 0.7)], &[0]);
        let a = exact_influence(&i, 24).unwrap().sigma / 3.0;
        for m in [4, 6, 8] {
            let dist = qae_distribution(&i, &CandidateSet::empty(), m, QaeMode::Analytic).unwrap();
            let hits = (0..500)
                .filter(|&s| (estimate_from_distribution(&dist, m, s, QaeMode::Analytic).a_hat - a).abs() <= qpe_error_bound(m))
                .count();
            // 8 / pi^2 ~ 0.81; allow sampling slack
            assert!(hits >= 380, "m={m}: {hits}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ancilla_matches_exact_influence(seed in 0u64..10_000, n in 1usize..6) {
            let params = RandomInstanceParams { n_nodes: n, edge_prob: 0.3, ..Default::default() };
            let i = generate_random_instance(&params, seed).unwrap();
            prop_assume!(i.graph().edge_count() <= 8);
            let exact = exact_influence(&i, 24).unwrap().sigma / n as f64;
            prop_assert!((ancilla_p1(&i) - exact).abs() < 1e-9);
        }

        #[test]
        fn analytic_distribution_is_normalised(a in 0.0f64..=1.0, m in 1usize..10) {
            let d = analytic_qpe_distribution(a, m);
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(d.iter().all(|&p| p >= 0.0));
        }
    }
}
