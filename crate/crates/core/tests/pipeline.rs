use proptest::prelude::*;
use qcontain_core::{
    exact_influence, generate_random_instance, greedy_contain, init_state, mc_influence, qae_influence,
    CandidateSet, CandidateStrategy, ExactEstimator, LinearFinder, MonteCarloEstimator, QaeEstimator, QaeMode,
    RandomInstanceParams,
};

fn small(seed: u64) -> qcontain_core::ProblemInstance {
    let params = RandomInstanceParams { n_nodes: 5, edge_prob: 0.3, lambda: 0.7, ..Default::default() };
    generate_random_instance(&params, seed).unwrap()
}

#[test]
fn init_state_matches_examples() {
    let s = init_state(2).unwrap();
    let probs: Vec<f64> = s.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    assert_eq!(probs, vec![1.0, 0.0, 0.0, 0.0]);
    assert!(init_state(25).is_err());
}

#[test]
fn three_estimators_agree_on_random_instances() {
    for seed in 0..5 {
        let inst = small(seed);
        let exact = exact_influence(&inst, 24).unwrap().sigma;
        let mc = mc_influence(&inst, 50_000, seed).unwrap();
        assert!((mc.sigma - exact).abs() <= 5.0 * mc.std_error.unwrap() + 1e-12);
        let q = qae_influence(&inst, &CandidateSet::empty(), 0.01, seed, QaeMode::Analytic).unwrap();
        assert!((q.sigma - exact).abs() <= q.error_bound.unwrap(), "{} vs {exact}", q.sigma);
    }
}

#[test]
fn noisy_estimators_drive_greedy_close_to_exact() {
    for seed in 0..4 {
        let inst = small(10 + seed);
        let exact = greedy_contain(&inst, &mut ExactEstimator::default(), &mut LinearFinder, CandidateStrategy::All, 3).unwrap();
        let mut mc = MonteCarloEstimator { trials: 20_000, seed };
        let noisy = greedy_contain(&inst, &mut mc, &mut LinearFinder, CandidateStrategy::All, 3).unwrap();
        let mut qae = QaeEstimator { epsilon: 0.01, seed, mode: QaeMode::Analytic };
        let quantum = greedy_contain(&inst, &mut qae, &mut LinearFinder, CandidateStrategy::All, 3).unwrap();
        assert!(noisy.accounting.mc_trials > 0);
        assert!(quantum.accounting.q_applications > 0);
        // Re-score every plan exactly; noise may cost a little but not much.
        for plan in [&noisy, &quantum] {
            let removal = CandidateSet::from_indices(plan.removed.clone());
            let sigma = exact_influence(&inst.without(&removal).unwrap(), 24).unwrap().sigma;
            let total = qcontain_core::objective(&inst, &removal, sigma).unwrap().total;
            assert!(total <= exact.initial.total + 1e-9);
            assert!(total - exact.final_objective().total <= 0.25 * inst.lambda() * inst.node_count() as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn removing_edges_never_raises_influence(seed in any::<u64>(), pick in any::<u64>()) {
        let inst = small(seed);
        let m = inst.graph().edge_count();
        prop_assume!(m > 0);
        let removal = CandidateSet::from_indices(vec![(pick % m as u64) as usize]);
        let before = exact_influence(&inst, 24).unwrap().sigma;
        let after = exact_influence(&inst.without(&removal).unwrap(), 24).unwrap().sigma;
        prop_assert!(after <= before + 1e-12);
    }
}
