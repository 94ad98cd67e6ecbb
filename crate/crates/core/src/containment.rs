//! Objective evaluation and greedy edge removal.
//!
//! The objective of removing arcs `E'` is
//! `lambda * sigma(G \ E') + (1 - lambda) * OI(E')`, where `OI` sums the
//! operational importance of the removed links. [`greedy_contain`] removes one
//! edge per iteration, choosing the candidate with the lowest objective, and is
//! generic over how influence is estimated ([`InfluenceEstimator`]) and how the
//! minimum over candidate scores is located ([`MinimumFinder`]).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::AddAssign;

use crate::cascade::{exact_influence, mc_influence, InfluenceEstimate, DEFAULT_EXACT_EDGE_CAP};
use crate::error::{Error, Result};
use crate::graph::{CandidateSet, Graph, ProblemInstance};

/// Improvement threshold for exact estimators.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveValue {
    pub total: f64,
    /// `lambda * sigma`
    pub influence_term: f64,
    /// `(1 - lambda) * OI`
    pub impact_term: f64,
    pub sigma_used: f64,
    pub oi_used: f64,
}

/// Work counters accumulated over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunAccounting {
    pub mc_trials: u64,
    pub a_applications: u64,
    pub q_applications: u64,
    pub grover_oracle_calls: u64,
    pub linear_steps: u64,
    /// Influence evaluations requested from the estimator, one per
    /// candidate graph scored.
    pub diffusion_simulations: u64,
}

impl AddAssign for RunAccounting {
    fn add_assign(&mut self, o: Self) {
        self.mc_trials += o.mc_trials;
        self.a_applications += o.a_applications;
        self.q_applications += o.q_applications;
        self.grover_oracle_calls += o.grover_oracle_calls;
        self.linear_steps += o.linear_steps;
        self.diffusion_simulations += o.diffusion_simulations;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanStep {
    /// 1-based greedy iteration.
    pub iteration: usize,
    /// Arc index in the original graph.
    pub edge: usize,
    pub objective: ObjectiveValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentPlan {
    /// Removed arcs, as indices into the original graph, in removal order.
    pub removed: Vec<usize>,
    /// Objective before any removal.
    pub initial: ObjectiveValue,
    pub trace: Vec<PlanStep>,
    pub accounting: RunAccounting,
}

impl ContainmentPlan {
    pub fn final_objective(&self) -> ObjectiveValue {
        self.trace.last().map_or(self.initial, |s| s.objective)
    }
}

/// Sum of importance over the removed links. Both arcs of an undirected link
/// count once.
pub fn operational_impact(removal: &CandidateSet, graph: &Graph) -> Result<f64> {
    removal.check(graph)?;
    let mut counted = vec![false; graph.link_count()];
    let mut total = 0.0;
    for &i in removal.indices() {
        let e = &graph.edges()[i];
        if !counted[e.link] {
            counted[e.link] = true;
            total += e.importance;
        }
    }
    Ok(total)
}

/// Objective for removing `removal` from `instance`, given an influence value
/// `sigma` for the reduced graph.
pub fn objective(instance: &ProblemInstance, removal: &CandidateSet, sigma: f64) -> Result<ObjectiveValue> {
    let oi = operational_impact(removal, instance.graph())?;
    let lambda = instance.lambda();
    let influence_term = lambda * sigma;
    let impact_term = (1.0 - lambda) * oi;
    Ok(ObjectiveValue { total: influence_term + impact_term, influence_term, impact_term, sigma_used: sigma, oi_used: oi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateStrategy {
    /// Every edge.
    All,
    /// Edges whose source can be reached from a seed.
    Frontier,
    /// The given number of edges with the highest activation probability.
    TopP(usize),
}

/// Candidate edges of `instance` under `strategy`. In undirected graphs each
/// link is offered once, through its first arc.
pub fn candidate_edges(instance: &ProblemInstance, strategy: CandidateStrategy) -> CandidateSet {
    let graph = instance.graph();
    let reps = graph.link_representatives();
    let picked = match strategy {
        CandidateStrategy::All => reps,
        CandidateStrategy::Frontier => {
            let reach = graph.reachable(instance.seeds(), |_| true);
            let mut live_links = vec![false; graph.link_count()];
            for e in graph.edges() {
                if reach[e.src.0] {
                    live_links[e.link] = true;
                }
            }
            reps.into_iter().filter(|&i| live_links[graph.edges()[i].link]).collect()
        }
        CandidateStrategy::TopP(cap) => {
            let mut by_p = reps;
            // stable: equal p keeps index order
            by_p.sort_by(|&a, &b| graph.edges()[b].p.total_cmp(&graph.edges()[a].p));
            by_p.truncate(cap);
            by_p
        }
    };
    CandidateSet::from_indices(picked)
}

/// Source of influence values for the greedy loop.
pub trait InfluenceEstimator {
    /// Estimates the expected influence on `instance` (already reduced by the
    /// removal under evaluation), recording work in `acct`.
    fn estimate(&mut self, instance: &ProblemInstance, acct: &mut RunAccounting) -> Result<InfluenceEstimate>;

    /// How far apart two estimates of `sigma` must be before the difference is
    /// trusted. Zero for exact estimators.
    fn noise_allowance(&self, estimate: &InfluenceEstimate) -> f64;
}

/// Locates the minimum of a score vector.
pub trait MinimumFinder {
    /// Index of a minimal score. `scores` is non-empty.
    fn find_min(&mut self, scores: &[f64], acct: &mut RunAccounting) -> usize;
}

/// Live-edge enumeration. Exact but exponential in the arc count.
#[derive(Clone, Debug)]
pub struct ExactEstimator {
    pub max_edges: usize,
}

impl Default for ExactEstimator {
    fn default() -> Self {
        ExactEstimator { max_edges: DEFAULT_EXACT_EDGE_CAP }
    }
}

impl InfluenceEstimator for ExactEstimator {
    fn estimate(&mut self, instance: &ProblemInstance, acct: &mut RunAccounting) -> Result<InfluenceEstimate> {
        acct.diffusion_simulations += 1;
        Ok(exact_influence(instance, self.max_edges)?.to_estimate())
    }

    fn noise_allowance(&self, _: &InfluenceEstimate) -> f64 {
        0.0
    }
}

/// Monte Carlo averaging. Every call reuses the same seed, so candidate graphs
/// are compared under common random numbers.
#[derive(Clone, Debug)]
pub struct MonteCarloEstimator {
    pub trials: u64,
    pub seed: u64,
}

impl InfluenceEstimator for MonteCarloEstimator {
    fn estimate(&mut self, instance: &ProblemInstance, acct: &mut RunAccounting) -> Result<InfluenceEstimate> {
        let est = mc_influence(instance, self.trials, self.seed)?;
        acct.mc_trials += self.trials;
        acct.diffusion_simulations += 1;
        Ok(est)
    }

    fn noise_allowance(&self, estimate: &InfluenceEstimate) -> f64 {
        2.0 * estimate.std_error.unwrap_or(0.0)
    }
}

/// Exhaustive scan; lowest index wins ties.
#[derive(Clone, Debug, Default)]
pub struct LinearFinder;

impl MinimumFinder for LinearFinder {
    fn find_min(&mut self, scores: &[f64], acct: &mut RunAccounting) -> usize {
        acct.linear_steps += scores.len() as u64;
        let mut best = 0;
        for (i, s) in scores.iter().enumerate().skip(1) {
            if *s < scores[best] {
                best = i;
            }
        }
        best
    }
}

/// Greedy edge removal.
///
/// Each iteration recomputes the candidate set on the current graph, scores
/// every candidate `e` by the objective of `removed ∪ {e}`, asks `finder` for
/// the minimum and commits it only if it beats the current objective by more
/// than the tolerance. The tolerance is `1e-9` for exact estimators and
/// `lambda` times the larger noise allowance of the two estimates otherwise.
/// Stops after `k_max` removals, when no candidates remain, or when nothing
/// improves.
pub fn greedy_contain<E, F>(
    instance: &ProblemInstance,
    estimator: &mut E,
    finder: &mut F,
    strategy: CandidateStrategy,
    k_max: usize,
) -> Result<ContainmentPlan>
where
    E: InfluenceEstimator + ?Sized,
    F: MinimumFinder + ?Sized,
{
    let mut acct = RunAccounting::default();
    let mut removed = CandidateSet::empty();
    let mut trace = Vec::new();

    if k_max == 0 {
        let zero = ObjectiveValue { total: 0.0, influence_term: 0.0, impact_term: 0.0, sigma_used: 0.0, oi_used: 0.0 };
        return Ok(ContainmentPlan { removed: Vec::new(), initial: zero, trace, accounting: acct });
    }

    let base = estimator.estimate(instance, &mut acct)?;
    let initial = objective(instance, &removed, base.sigma)?;
    let mut current = initial;
    let mut current_noise = estimator.noise_allowance(&base);

    for iteration in 1..=k_max {
        let reduced = instance.without(&removed)?;
        let original_index = instance.graph().surviving_indices(&removed)?;
        let candidates: Vec<usize> = candidate_edges(&reduced, strategy)
            .indices()
            .iter()
            .map(|&i| original_index[i])
            .collect();
        if candidates.is_empty() {
            break;
        }

        let mut scored = Vec::with_capacity(candidates.len());
        for &edge in &candidates {
            let removal = removed.with(edge);
            let est = instance
                .without(&removal)
                .and_then(|g| estimator.estimate(&g, &mut acct))
                .map_err(|e| Error::Estimator { candidate: edge, source: Box::new(e) })?;
            let noise = estimator.noise_allowance(&est);
            scored.push((objective(instance, &removal, est.sigma)?, noise));
        }
        let totals: Vec<f64> = scored.iter().map(|(o, _)| o.total).collect();
        let pick = finder.find_min(&totals, &mut acct);
        let (best, best_noise) = scored[pick];

        let tolerance = EXACT_TOLERANCE.max(instance.lambda() * current_noise.max(best_noise));
        if best.total < current.total - tolerance {
            removed = removed.with(candidates[pick]);
            trace.push(PlanStep { iteration, edge: candidates[pick], objective: best });
            current = best;
            current_noise = best_noise;
        } else {
            break;
        }
    }

    Ok(ContainmentPlan { removed: removed.indices().to_vec(), initial, trace, accounting: acct })
}
