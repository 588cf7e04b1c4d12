use std::f64::consts::PI;

use gatemdp::gate_compile::{brute_force_shortest, compile_with_mdp, CompileOptions};
use gatemdp::harness::{self, ExperimentConfig, ExperimentKind};
use gatemdp::state_prep::{
    build_prep_mdp, estimate_dynamics, extract_program, ActionSet, ExtractOptions, PrepGateset,
    PrepTask, ShuffleMode, ShufflePolicy,
};
use gatemdp::su2::haar_random_su2;
use gatemdp::*;

#[test]
fn rotation_values_track_program_length() {
    let grid = BlochGrid::new(8).unwrap();
    let gs = PrepGateset::Rotations { l: 80 };
    let streams = SeedStreams::new(21);
    let dynamics = estimate_dynamics(&grid, gs, 200_000, &streams, Exec::Parallel).unwrap();
    let sol = policy_iteration(
        &build_prep_mdp(&dynamics, CellId::SouthCap, 0.8).unwrap(),
        &SolverOptions::default(),
    )
    .unwrap();
    let actions = ActionSet::new(gs).unwrap();
    let opts = ExtractOptions {
        shuffle: ShufflePolicy::Off,
        ..ExtractOptions::default()
    };
    let mut by_len: Vec<(usize, f64)> = Vec::new();
    for s in 0..grid.n_cells() {
        let start = grid.cell(s);
        let task = PrepTask {
            start,
            start_state: None,
            target: CellId::SouthCap,
            target_state: BlochPoint::ONE,
        };
        let p = extract_program(
            &grid,
            &actions,
            &sol.policy,
            &task,
            &opts,
            &streams,
            Exec::Parallel,
        )
        .unwrap();
        assert!(p.len() <= 2, "{start}: {}", p.sequence);
        by_len.push((p.len(), sol.values.get(s)));
    }
    let min_one = by_len
        .iter()
        .filter(|x| x.0 == 1)
        .map(|x| x.1)
        .fold(f64::INFINITY, f64::min);
    let max_two = by_len
        .iter()
        .filter(|x| x.0 == 2)
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        min_one > max_two,
        "length-1 min {min_one} vs length-2 max {max_two}"
    );
}

#[test]
fn pole_to_pole_fidelity_floor() {
    let grid = BlochGrid::new(16).unwrap();
    let streams = SeedStreams::new(4);
    let floor = (PI / 32.0).cos().powi(2) - 0.01;
    for gs in [PrepGateset::Rotations { l: 160 }, PrepGateset::Ihst] {
        let dynamics = estimate_dynamics(&grid, gs, 100_000, &streams, Exec::Parallel).unwrap();
        let sol = policy_iteration(
            &build_prep_mdp(&dynamics, CellId::SouthCap, gs.default_gamma()).unwrap(),
            &SolverOptions::default(),
        )
        .unwrap();
        let task = PrepTask {
            start: CellId::NorthCap,
            start_state: Some(BlochPoint::ZERO),
            target: CellId::SouthCap,
            target_state: BlochPoint::ONE,
        };
        let p = extract_program(
            &grid,
            &ActionSet::new(gs).unwrap(),
            &sol.policy,
            &task,
            &ExtractOptions::default(),
            &streams,
            Exec::Parallel,
        )
        .unwrap();
        if p.shuffle == ShuffleMode::Off {
            assert!(
                p.fidelity >= floor,
                "{gs}: {} fidelity {}",
                p.sequence,
                p.fidelity
            );
        }
    }
}

#[test]
fn mdp_sequences_replay_exactly_and_never_beat_brute_force() {
    let mut rng = SeedStreams::new(99).rng("targets", 0);
    let opts = CompileOptions::default();
    for i in 0..8 {
        let target = haar_random_su2(&mut rng);
        let bf = brute_force_shortest(target, opts.eps, 20, Exec::Parallel).unwrap();
        assert!((bf.sequence.unitary().unwrap().distance(&target) - bf.distance).abs() < 1e-12);
        let Ok(m) = compile_with_mdp(target, &opts, &SeedStreams::new(i), Exec::Parallel) else {
            continue;
        };
        assert!((m.sequence.unitary().unwrap().distance(&target) - m.distance).abs() < 1e-12);
        assert!(m.distance < opts.eps);
        assert!(
            m.len() >= bf.len(),
            "target {target}: mdp {} shorter than brute force {}",
            m.rendered(),
            bf.rendered()
        );
    }
}

#[test]
fn reports_are_reproducible() {
    let mut config = ExperimentConfig::new(ExperimentKind::StatePrep);
    config.seed = Some(5);
    config.k = 8;
    config.gateset = PrepGateset::Ihst;
    config.samples = 50_000;
    let a = harness::run(&config).unwrap();
    let b = harness::run(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&a.report).unwrap(),
        serde_json::to_string(&b.report).unwrap()
    );
    assert_eq!(a.report["seed"], 5);
    assert_eq!(a.report["config"]["gamma"], 0.95);
    config.exec = Exec::Sequential;
    let c = harness::run(&config).unwrap();
    assert_eq!(a.report["result"], c.report["result"]);
}
