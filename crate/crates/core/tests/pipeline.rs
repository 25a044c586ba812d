use irs_maxmin::driver::{run, AlgorithmOptions, InitReflect, Termination, Variant};
use irs_maxmin::model::{min_weighted_sinr, ReflectVector};
use irs_maxmin::scenario::{generate_channels, paper_default_scenario, with_random_users};
use irs_maxmin::txbf::{solve_p2, TxbfOptions};

#[test]
fn scenario_to_alternating_optimization() {
    let spec = paper_default_scenario(30.0, 3);
    let ch = generate_channels(&spec).unwrap();
    let baseline = solve_p2(&ch, &ReflectVector::zeros(spec.config.n()), &spec.config, &TxbfOptions::default()).unwrap();
    let trace = run(&spec, &AlgorithmOptions {
        init_v: InitReflect::Zero,
        ..Default::default()
    })
    .unwrap();
    assert!(trace.final_min_sinr() >= baseline.t_star * (1.0 - 1e-6));
    let direct = min_weighted_sinr(&trace.last.v, &trace.last.w, &ch, &spec.config).unwrap();
    assert!((direct - trace.final_min_sinr()).abs() <= 1e-9 * direct);
    assert!(matches!(trace.termination, Termination::Converged | Termination::MaxIters));
}

#[test]
fn identical_inputs_give_identical_traces() {
    let spec = with_random_users(&paper_default_scenario(25.0, 8)).unwrap();
    for variant in Variant::ALL {
        let opts = AlgorithmOptions {
            variant,
            max_iters: 3,
            randomization_count: 30,
            ..Default::default()
        };
        let a = run(&spec, &opts).unwrap();
        let b = run(&spec, &opts).unwrap();
        assert_eq!(a.objective_sequence(), b.objective_sequence());
        assert_eq!(a.last.v, b.last.v);
    }
}

#[test]
fn invalid_options_are_rejected() {
    let spec = paper_default_scenario(30.0, 0);
    let opts = AlgorithmOptions {
        epsilon: -1.0,
        ..Default::default()
    };
    assert!(run(&spec, &opts).is_err());
}
