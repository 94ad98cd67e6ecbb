//! Independent Cascade diffusion and influence estimation.
//!
//! [`simulate_ic`] runs one cascade, [`mc_influence`] averages many of them,
//! and [`exact_influence`] computes the expected influence exactly by
//! enumerating every live-edge configuration. The exact oracle is exponential
//! in the number of arcs and is meant for small instances and for checking the
//! other estimators.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, ProblemInstance};
use crate::rng;

/// Arc cap used when callers do not pick one for [`exact_influence`].
pub const DEFAULT_EXACT_EDGE_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeTrial {
    /// Sorted.
    pub infected: Vec<NodeId>,
    /// Diffusion rounds that activated at least one node.
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    MonteCarlo,
    Exact,
    Qae,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceEstimate {
    /// Expected number of infected nodes.
    pub sigma: f64,
    /// `sigma / |V|`.
    pub sigma_normalized: f64,
    /// Standard error of `sigma` for sampling estimators.
    pub std_error: Option<f64>,
    /// Additive error bound on `sigma` that holds with high probability, for
    /// estimators that come with one.
    pub error_bound: Option<f64>,
    /// Monte Carlo trials, live-edge configurations or Grover-operator
    /// applications, depending on `method`.
    pub trials_or_calls: u64,
    pub method: EstimateMethod,
}

impl InfluenceEstimate {
    pub(crate) fn new(sigma: f64, node_count: usize, method: EstimateMethod, trials_or_calls: u64) -> Self {
        InfluenceEstimate {
            sigma,
            sigma_normalized: sigma / node_count as f64,
            std_error: None,
            error_bound: None,
            trials_or_calls,
            method,
        }
    }
}

/// Reusable buffers for repeated cascades on one instance.
struct Cascade<'a> {
    instance: &'a ProblemInstance,
    active: Vec<bool>,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl<'a> Cascade<'a> {
    fn new(instance: &'a ProblemInstance) -> Self {
        let n = instance.node_count();
        Cascade { instance, active: vec![false; n], frontier: Vec::new(), next: Vec::new() }
    }

    /// Runs one cascade; returns (infected count, steps). `active` holds the
    /// final set afterwards.
    fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, usize) {
        let graph = self.instance.graph();
        self.active.iter_mut().for_each(|a| *a = false);
        self.frontier.clear();
        for s in self.instance.seeds() {
            self.active[s.0] = true;
            self.frontier.push(s.0);
        }
        let mut infected = self.frontier.len();
        let mut steps = 0;
        while !self.frontier.is_empty() {
            self.next.clear();
            for &v in &self.frontier {
                for &ei in graph.out_edges(NodeId(v)) {
                    let e = &graph.edges()[ei];
                    let u = e.dst.0;
                    // each arc is tried once: its source is in exactly one frontier
                    if !self.active[u] && rng.gen::<f64>() < e.p {
                        self.active[u] = true;
                        self.next.push(u);
                    }
                }
            }
            if !self.next.is_empty() {
                steps += 1;
                infected += self.next.len();
            }
            core::mem::swap(&mut self.frontier, &mut self.next);
        }
        (infected, steps)
    }
}

/// One Independent Cascade realisation.
///
/// Seeds are active at step 0. At each later step every node activated in the
/// previous step tries each inactive out-neighbour once, succeeding with the
/// arc's probability. The process stops after a step that activates nothing.
pub fn simulate_ic<R: Rng + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> CascadeTrial {
    let mut c = Cascade::new(instance);
    let (_, steps) = c.run(rng);
    let infected = c.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| NodeId(i)).collect();
    CascadeTrial { infected, steps }
}

/// Monte Carlo estimate of the expected influence from `trials` cascades.
///
/// Trial `t` draws from ChaCha stream `t` under `rng_seed`, so the estimate
/// does not depend on how trials are scheduled.
pub fn mc_influence(instance: &ProblemInstance, trials: u64, rng_seed: u64) -> Result<InfluenceEstimate> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let mut c = Cascade::new(instance);
    // infected counts are integers, so exact integer sums give the mean and
    // variance without accumulated rounding
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    for t in 0..trials {
        let mut r = rng::substream(rng_seed, t);
        let (x, _) = c.run(&mut r);
        sum += x as u128;
        sum_sq += (x * x) as u128;
    }
    let n = trials as u128;
    let mean = sum as f64 / trials as f64;
    let var = if trials > 1 { (n * sum_sq - sum * sum) as f64 / (n * (n - 1)) as f64 } else { 0.0 };
    let mut est = InfluenceEstimate::new(mean, instance.node_count(), EstimateMethod::MonteCarlo, trials);
    est.std_error = Some(libm::sqrt(var / trials as f64));
    Ok(est)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactInfluence {
    pub sigma: f64,
    /// Probability that each node ends up infected, indexed by node.
    pub node_probs: Vec<f64>,
    /// Number of live-edge configurations enumerated.
    pub configurations: u64,
}

impl ExactInfluence {
    pub fn to_estimate(&self) -> InfluenceEstimate {
        InfluenceEstimate::new(self.sigma, self.node_probs.len(), EstimateMethod::Exact, self.configurations)
    }
}

/// Probability of live-edge configuration `mask` (bit `e` set = arc `e` live).
pub(crate) fn configuration_weight(probs: &[f64], mask: u64) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(e, &p)| if mask >> e & 1 == 1 { p } else { 1.0 - p })
        .product()
}

/// Nodes reachable from the seeds through the arcs set in `mask`.
pub(crate) fn live_edge_reach(instance: &ProblemInstance, mask: u64) -> Vec<bool> {
    instance.graph().reachable(instance.seeds(), |e| mask >> e & 1 == 1)
}

/// Exact expected influence by enumerating all `2^|E|` live-edge
/// configurations.
pub fn exact_influence(instance: &ProblemInstance, max_edges: usize) -> Result<ExactInfluence> {
    let m = instance.graph().edge_count();
    let cap = max_edges.min(63);
    if m > cap {
        return Err(Error::TooLargeForExact { edges: m, cap: max_edges });
    }
    let probs: Vec<f64> = instance.graph().edges().iter().map(|e| e.p).collect();
    let mut node_probs = vec![0.0; instance.node_count()];
    let configurations = 1u64 << m;
    for mask in 0..configurations {
        let w = configuration_weight(&probs, mask);
        if w == 0.0 {
            continue;
        }
        for (v, hit) in live_edge_reach(instance, mask).into_iter().enumerate() {
            if hit {
                node_probs[v] += w;
            }
        }
    }
    // seeds are reached in every configuration; pin them against rounding
    for s in instance.seeds() {
        node_probs[s.0] = 1.0;
    }
    let sigma = node_probs.iter().sum();
    Ok(ExactInfluence { sigma, node_probs, configurations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_instance, CandidateSet, Graph, RandomInstanceParams};
    use proptest::prelude::*;

    fn inst(n: usize, edges: &[(usize, usize, f64)], seeds: &[usize]) -> ProblemInstance {
        let g = Graph::directed(n, edges.iter().map(|&(s, d, p)| (s, d, p, 0.5))).unwrap();
        ProblemInstance::new(g, seeds.iter().map(|&s| NodeId(s)), 1.0).unwrap()
    }

    /// Independent oracle: plain fixed-point reachability over an edge list,
    /// summed over all live-edge configurations.
    fn brute_force_sigma(n: usize, edges: &[(usize, usize, f64)], seeds: &[usize]) -> f64 {
        let mut total = 0.0;
        for mask in 0u32..(1 << edges.len()) {
            let mut w = 1.0;
            for (j, e) in edges.iter().enumerate() {
                w *= if mask >> j & 1 == 1 { e.2 } else { 1.0 - e.2 };
            }
            let mut on = vec![false; n];
            for &s in seeds {
                on[s] = true;
            }
            loop {
                let mut changed = false;
                for (j, e) in edges.iter().enumerate() {
                    if mask >> j & 1 == 1 && on[e.0] && !on[e.1] {
                        on[e.1] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            total += w * on.iter().filter(|&&b| b).count() as f64;
        }
        total
    }

    #[test]
    fn oracle_values_by_hand() {
        // 2 configurations: {dead, live} -> 0.5*1 + 0.5*2
        assert_eq!(brute_force_sigma(2, &[(0, 1, 0.5)], &[0]), 1.5);
        // 4 configurations -> 1 + 0.5 + 0.25
        assert_eq!(brute_force_sigma(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]), 1.75);
    }

    #[test]
    fn exact_single_edge() {
        let ex = exact_influence(&inst(2, &[(0, 1, 0.5)], &[0]), DEFAULT_EXACT_EDGE_CAP).unwrap();
        assert_eq!(ex.sigma, 1.5);
        assert_eq!(ex.node_probs, vec![1.0, 0.5]);
        assert_eq!(ex.configurations, 2);
    }

    #[test]
    fn exact_chain_and_certain_edges() {
        let ex = exact_influence(&inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]), 24).unwrap();
        assert!((ex.sigma - 1.75).abs() < 1e-15);
        // p = 1 everywhere: sigma = |reachable|
        let i = inst(5, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)], &[0]);
        assert_eq!(exact_influence(&i, 24).unwrap().sigma, 3.0);
    }

    #[test]
    fn exact_respects_cap() {
        let i = inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]);
        assert_eq!(exact_influence(&i, 1), Err(Error::TooLargeForExact { edges: 2, cap: 1 }));
    }

    #[test]
    fn ic_with_zero_probabilities() {
        let i = inst(3, &[(0, 1, 0.0), (1, 2, 0.0)], &[0, 2]);
        let t = simulate_ic(&i, &mut rng::seeded(1));
        assert_eq!(t.infected, vec![NodeId(0), NodeId(2)]);
        assert_eq!(t.steps, 0);
    }

    #[test]
    fn ic_with_certain_edges_reaches_everything_reachable() {
        let i = inst(5, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (2, 0, 1.0)], &[0]);
        let t = simulate_ic(&i, &mut rng::seeded(5));
        assert_eq!(t.infected, vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(t.steps, 2);
    }

    #[test]
    fn ic_chain_full_spread_frequency() {
        let i = inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]);
        let n = 40_000;
        let full = (0..n)
            .filter(|&t| simulate_ic(&i, &mut rng::substream(11, t)).infected.len() == 3)
            .count();
        let freq = full as f64 / n as f64;
        // sd = sqrt(.25 * .75 / 40000) ~ 0.0022
        assert!((freq - 0.25).abs() < 0.01, "{freq}");
    }

    #[test]
    fn mc_isolated_seed() {
        let i = inst(1, &[], &[0]);
        let e = mc_influence(&i, 17, 3).unwrap();
        assert_eq!(e.sigma, 1.0);
        assert_eq!(e.std_error, Some(0.0));
        assert_eq!(e.trials_or_calls, 17);
        assert_eq!(e.method, EstimateMethod::MonteCarlo);
    }

    #[test]
    fn mc_matches_hand_values() {
        let one = mc_influence(&inst(2, &[(0, 1, 0.5)], &[0]), 10_000, 1).unwrap();
        assert!((one.sigma - 1.5).abs() <= 0.02, "{}", one.sigma);
        let chain = mc_influence(&inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]), 10_000, 1).unwrap();
        assert!((chain.sigma - 1.75).abs() <= 0.027, "{}", chain.sigma);
    }

    #[test]
    fn mc_rejects_zero_trials() {
        assert_eq!(mc_influence(&inst(1, &[], &[0]), 0, 0), Err(Error::ZeroTrials));
    }

    #[test]
    fn mc_is_deterministic() {
        let i = inst(3, &[(0, 1, 0.3), (1, 2, 0.7), (0, 2, 0.2)], &[0]);
        assert_eq!(mc_influence(&i, 500, 9).unwrap(), mc_influence(&i, 500, 9).unwrap());
    }

    #[test]
    fn mc_convergence_rate_on_chain() {
        let i = inst(3, &[(0, 1, 0.5), (1, 2, 0.5)], &[0]);
        let rmse = |trials: u64| {
            let sq: f64 = (0..100)
                .map(|r| {
                    let e = mc_influence(&i, trials, rng::derive_seed(500, r)).unwrap();
                    (e.sigma - 1.75) * (e.sigma - 1.75)
                })
                .sum();
            libm::sqrt(sq / 100.0)
        };
        let errs: Vec<f64> = [100, 400, 1600, 6400].iter().map(|&t| rmse(t)).collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.6..=2.5).contains(&ratio), "{errs:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_matches_independent_oracle(seed in 0u64..10_000, n in 1usize..6, density in 0.0f64..0.6) {
            let params = RandomInstanceParams { n_nodes: n, edge_prob: density, ..Default::default() };
            let inst = generate_random_instance(&params, seed).unwrap();
            prop_assume!(inst.graph().edge_count() <= 12);
            let edges: Vec<_> = inst.graph().edges().iter().map(|e| (e.src.0, e.dst.0, e.p)).collect();
            let seeds: Vec<_> = inst.seeds().iter().map(|s| s.0).collect();
            let oracle = brute_force_sigma(n, &edges, &seeds);
            let ex = exact_influence(&inst, 24).unwrap();
            prop_assert!((ex.sigma - oracle).abs() < 1e-9);
            prop_assert!((ex.sigma - ex.node_probs.iter().sum::<f64>()).abs() < 1e-12);
            prop_assert!(ex.sigma >= seeds.len() as f64 - 1e-12 && ex.sigma <= n as f64 + 1e-12);
        }

        #[test]
        fn removing_an_edge_never_increases_influence(seed in 0u64..10_000, pick in 0usize..64) {
            let params = RandomInstanceParams { n_nodes: 5, edge_prob: 0.35, ..Default::default() };
            let inst = generate_random_instance(&params, seed).unwrap();
            let m = inst.graph().edge_count();
            prop_assume!(m > 0 && m <= 12);
            let before = exact_influence(&inst, 24).unwrap().sigma;
            let after_inst = inst.without(&CandidateSet::from_indices(vec![pick % m])).unwrap();
            let after = exact_influence(&after_inst, 24).unwrap().sigma;
            prop_assert!(after <= before + 1e-12);
        }

        #[test]
        fn trials_stay_within_bounds(seed in 0u64..10_000, trial in 0u64..1000) {
            let params = RandomInstanceParams { n_nodes: 7, edge_prob: 0.3, n_seeds: 2, ..Default::default() };
            let inst = generate_random_instance(&params, seed).unwrap();
            let t = simulate_ic(&inst, &mut rng::substream(seed, trial));
            for s in inst.seeds() {
                prop_assert!(t.infected.contains(s));
            }
            prop_assert!(t.infected.len() <= inst.node_count());
        }
    }
}
