use indicator_sim::experiments::{
    evaluate_run, run_replicated, run_stream, run_worlds, sweep_world_runs, Executor, SweepSpec,
    World, PURE_INDICATORS,
};
use indicator_sim::metrics::{AccuracySpec, Indicator};
use indicator_sim::simulation::ModelParams;

fn params(n: usize, m: usize, sigma_c2: f64, sigma_r2: f64) -> ModelParams {
    ModelParams {
        n,
        m,
        sigma_v2: 1.3 - sigma_c2,
        sigma_c2,
        sigma_r2,
        seed: 0,
    }
}

#[test]
fn noiseless_cells_are_perfect() {
    let p = params(2000, 20, 0.0, 0.0);
    for ind in PURE_INDICATORS {
        let cell = run_replicated(&p, 5, ind, 0.1, 1).unwrap();
        assert_eq!(cell.accuracy_mean, 100.0);
        assert_eq!(cell.accuracy_stderr, 0.0);
        assert_eq!(cell.runs, 5);
    }
}

#[test]
fn one_article_journals_tie_the_indicators() {
    let p = params(200, 200, 0.65, 0.4);
    let by_if = run_replicated(&p, 10, Indicator::ImpactFactor, 0.1, 9).unwrap();
    let by_cit = run_replicated(&p, 10, Indicator::Citations, 0.1, 9).unwrap();
    assert_eq!(by_if.accuracy_mean, by_cit.accuracy_mean);
    assert_eq!(by_if.accuracy_stderr, by_cit.accuracy_stderr);
}

#[test]
fn indicators_share_simulated_worlds() {
    let p = params(400, 20, 0.5, 0.4);
    let world = World::of(&p);
    let spec = AccuracySpec::new(0.1).unwrap();
    let indicators = [
        Indicator::Citations,
        Indicator::ImpactFactor,
        Indicator::Hybrid { weight_if: 0.5 },
    ];
    let runs = run_worlds(&[(world, p)], &indicators, 6, 0.1, 4, &Executor::serial()).unwrap();
    for (i, ind) in indicators.iter().enumerate() {
        // Each indicator evaluated alone, each run re-seeded by hand.
        for r in 0..6 {
            let alone = evaluate_run(&p, &[*ind], &spec, &mut run_stream(4, &world, r)).unwrap();
            assert_eq!(alone[0], runs[0].accuracies[i][r]);
        }
        let single = run_replicated(&p, 6, *ind, 0.1, 4).unwrap();
        assert_eq!(single, runs[0].cells()[i]);
    }
}

#[test]
fn three_runs_serial_equals_concurrent() {
    let p = params(2000, 20, 0.65, 0.4);
    let w = [(World::of(&p), p)];
    let a = run_worlds(&w, &PURE_INDICATORS, 3, 0.1, 5, &Executor::serial()).unwrap();
    let b = run_worlds(&w, &PURE_INDICATORS, 3, 0.1, 5, &Executor::new(3).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn citation_accuracy_degrades_with_citation_noise() {
    let spec = SweepSpec {
        sigma_r2_list: vec![0.4],
        sigma_c2_grid: vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.1],
        m_list: vec![20],
        weight_if_list: vec![],
        runs: 60,
        n: 2000,
        alpha: 0.1,
        total_log_variance: 1.3,
        master_seed: 17,
    };
    let worlds = sweep_world_runs(&spec, &[Indicator::Citations], &Executor::serial()).unwrap();
    for pair in worlds.windows(2) {
        let (m0, s0) = (
            pair[0].mean(&Indicator::Citations),
            pair[0].stderr(&Indicator::Citations),
        );
        let (m1, s1) = (
            pair[1].mean(&Indicator::Citations),
            pair[1].stderr(&Indicator::Citations),
        );
        assert!(m1 <= m0 + 2.0 * (s0 * s0 + s1 * s1).sqrt(), "{m0} -> {m1}");
    }
}

#[test]
fn invalid_inputs_propagate() {
    let p = params(2000, 3, 0.5, 0.4);
    assert!(run_replicated(&p, 3, Indicator::Citations, 0.1, 0).is_err());
    let p = params(2000, 20, 0.5, 0.4);
    assert!(run_replicated(&p, 0, Indicator::Citations, 0.1, 0).is_err());
    assert!(run_replicated(&p, 3, Indicator::Citations, 1.0, 0).is_err());
}
