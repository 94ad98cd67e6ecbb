//! Malware containment as network influence minimisation.
//!
//! The crate models a directed network whose edges carry an activation
//! probability and an operational importance, and searches for a set of edges
//! to disable so that the expected spread from an infected seed set is small
//! while the operational cost of the removals stays low.
//!
//! Two pipelines are provided side by side:
//!
//! * a classical one: Independent Cascade simulation with Monte Carlo
//!   averaging ([`cascade`]) and a linear scan over candidate removals;
//! * a quantum-simulated one: amplitude estimation of the expected influence
//!   ([`qae`]) and Dürr–Høyer minimum finding over candidates ([`gmf`]), both
//!   running on a small dense statevector engine ([`qsim`]).
//!
//! [`containment`] ties them together in a greedy removal loop that is generic
//! over the estimator and the minimum finder, and tracks the work each one
//! performs in a [`RunAccounting`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cascade;
pub mod containment;
pub mod error;
pub mod gmf;
pub mod graph;
pub mod qae;
pub mod qsim;
pub mod rng;

pub use cascade::{
    exact_influence, mc_influence, simulate_ic, CascadeTrial, EstimateMethod, ExactInfluence,
    InfluenceEstimate, DEFAULT_EXACT_EDGE_CAP,
};
pub use containment::{
    candidate_edges, greedy_contain, objective, operational_impact, CandidateStrategy,
    ContainmentPlan, ExactEstimator, InfluenceEstimator, LinearFinder, MinimumFinder,
    MonteCarloEstimator, ObjectiveValue, PlanStep, RunAccounting,
};
pub use error::{Error, Result};
pub use gmf::{durr_hoyer_min, grover_search, Backend, DurrHoyerConfig, GmfFinder, GroverRun, MinFindResult};
pub use graph::{
    generate_random_instance, CandidateSet, Edge, Graph, NodeId, ProblemInstance, RandomInstanceParams,
};
pub use qae::{qae_estimate, qae_influence, AmplitudeEstimate, QaeEstimator, QaeMode};
pub use qsim::{init_state, Gate, StateVector, MAX_QUBITS};
