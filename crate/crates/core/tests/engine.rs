use gossip_holonomy::derived::DerivedGraph;
use gossip_holonomy::engine::{
    epsilon_bound, gen_fixture, global_partition, limit_group, run_to_convergence, simulate,
    verify_theorem, Clause, Fixture, FixtureKind, LimitStructure, RunOptions, WalkSpec,
};
use gossip_holonomy::holonomy::{is_w_holonomic_for_graph, HolonomyReport};
use gossip_holonomy::scalar::ratio;
use gossip_holonomy::{Error, Rational};

fn fixture(kind: FixtureKind, seed: u64) -> Fixture {
    let (n, m) = kind.shape();
    gen_fixture(kind, seed, n, m).unwrap()
}

fn setup(f: &Fixture) -> (HolonomyReport, DerivedGraph, LimitStructure) {
    let report = is_w_holonomic_for_graph(&f.graph, &f.weight, None).unwrap();
    let derived = DerivedGraph::build(&f.weight, &report).unwrap();
    let structure = LimitStructure::new(&f.graph, &f.weight, &report).unwrap();
    (report, derived, structure)
}

#[test]
fn analysis_reproduces_declared_truth() {
    for kind in [FixtureKind::F1, FixtureKind::F2, FixtureKind::F3] {
        for seed in 0..4 {
            let f = fixture(kind, seed);
            let (report, _, structure) = setup(&f);
            assert_eq!(report.cycles.len(), f.truth.cycles.len());
            for analysis in &report.cycles {
                let declared = f.truth.cycle(&analysis.cycle).unwrap();
                assert_eq!(analysis.order_w, declared.order, "{kind} {}", analysis.cycle);
                assert_eq!(analysis.induced(), Some(&declared.partition), "{kind} {}", analysis.cycle);
            }
            assert_eq!(structure.partition, f.truth.global);
            assert_eq!(structure.epsilon, f.truth.epsilon);
            assert_eq!(structure.group.order(), f.truth.group_order);
            assert_eq!(structure.predicted, f.truth.predicted);
        }
    }
}

#[test]
fn global_partition_is_order_independent() {
    let f = fixture(FixtureKind::F3, 11);
    let (mut report, _, _) = setup(&f);
    let forward = global_partition(f.graph.dim(), &report).unwrap();
    report.cycles.reverse();
    assert_eq!(global_partition(f.graph.dim(), &report).unwrap(), forward);
    report.cycles.rotate_left(2);
    assert_eq!(global_partition(f.graph.dim(), &report).unwrap(), forward);
}

#[test]
fn single_cycle_partition_is_the_cycle_partition() {
    let f = fixture(FixtureKind::F1, 0);
    let (mut report, _, _) = setup(&f);
    report.cycles.truncate(1);
    let p = global_partition(f.graph.dim(), &report).unwrap();
    assert_eq!(Some(&p), report.cycles[0].induced());
}

#[test]
fn f1_has_no_contraction_blocks() {
    let f = fixture(FixtureKind::F1, 2);
    let (report, derived, structure) = setup(&f);
    assert!(epsilon_bound(&report).is_none());
    let group = limit_group(&report, &structure.partition, 10).unwrap();
    assert_eq!(group.order(), 3);
    let run = run_to_convergence(
        &f.graph,
        &derived,
        &structure,
        &derived.exhaustive_closed_walk(),
        &RunOptions::default(),
    )
    .unwrap();
    assert!(run.converged);
    assert!(run.measured.is_empty());
    assert_eq!(run.observed_limit_size, 3);
    assert!(run.limit_in_group && run.block_diagonal && run.weight_conserved);
}

#[test]
fn f2_converges_to_predicted_blocks() {
    let f = fixture(FixtureKind::F2, 5);
    let (_, derived, structure) = setup(&f);
    assert_eq!(structure.l_g, 3);
    assert_eq!(structure.spacing, 2);
    let run = run_to_convergence(
        &f.graph,
        &derived,
        &structure,
        &derived.exhaustive_closed_walk(),
        &RunOptions::default(),
    )
    .unwrap();
    assert!(run.converged, "{:?}", run.max_block_seminorm);
    assert_eq!(run.violations, 0);
    assert!(run.max_row_error <= 1e-9);
    assert!(run.limit_size_divides_group());
    assert!(run.float_permutation_agrees);
    let csv = run.trace_csv();
    assert!(csv.starts_with("checkpoint,repetitions,block,seminorm,bound\n"));
    assert_eq!(csv.lines().count(), run.trace.len() + 1);
}

#[test]
fn tolerance_one_stops_after_first_pass() {
    let f = fixture(FixtureKind::F2, 5);
    let (_, derived, structure) = setup(&f);
    let opts = RunOptions {
        tol: 1.0,
        ..RunOptions::default()
    };
    let run = run_to_convergence(&f.graph, &derived, &structure, &derived.exhaustive_closed_walk(), &opts).unwrap();
    assert_eq!(run.reps, 1);
    assert!(run.converged);
}

#[test]
fn zero_repetitions_reports_initial_product() {
    let f = fixture(FixtureKind::F2, 5);
    let (_, derived, structure) = setup(&f);
    let opts = RunOptions {
        max_reps: 0,
        ..RunOptions::default()
    };
    let run = run_to_convergence(&f.graph, &derived, &structure, &derived.exhaustive_closed_walk(), &opts).unwrap();
    assert_eq!(run.reps, 0);
    assert!(!run.converged);
    assert_eq!(run.max_block_seminorm, 1.0);
}

#[test]
fn non_exhaustive_walk_is_rejected() {
    let f = fixture(FixtureKind::F2, 5);
    let (_, derived, structure) = setup(&f);
    let partial = derived.orbit_loop(0);
    let err = run_to_convergence(&f.graph, &derived, &structure, &partial, &RunOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NotExhaustive(_)));
    let bad_tol = RunOptions {
        tol: 0.0,
        ..RunOptions::default()
    };
    assert!(run_to_convergence(&f.graph, &derived, &structure, &derived.exhaustive_closed_walk(), &bad_tol).is_err());
}

#[test]
fn verify_all_fixtures() {
    let walks: Vec<WalkSpec> = std::iter::once(WalkSpec::Canonical)
        .chain((0..4).map(WalkSpec::Seeded))
        .collect();
    for kind in [FixtureKind::F1, FixtureKind::F2, FixtureKind::F3] {
        let f = fixture(kind, 9);
        let verdict = verify_theorem(&f.graph, &f.weight, &walks, &RunOptions::default());
        assert!(verdict.passed(), "{kind}: {:#}", verdict.to_json());
        assert_eq!(verdict.group_order, Some(f.truth.group_order));
        for v in &verdict.walks {
            assert!(v.observed_limit_size <= f.truth.group_order * 6);
            if kind == FixtureKind::F1 {
                assert_eq!(v.rank_one, Clause::Vacuous);
                assert_eq!(v.observed_limit_size, 3);
            } else {
                assert_eq!(v.rank_one, Clause::Pass);
            }
            if kind == FixtureKind::F2 {
                assert_eq!(f.truth.group_order % v.observed_limit_size, 0);
            }
        }
    }
}

#[test]
fn verify_reports_bridges_as_preconditions() {
    use gossip_holonomy::graph::GossipGraph;
    use gossip_holonomy::holonomy::WeightVector;
    use gossip_holonomy::stomat::StochasticMatrix;
    let id = StochasticMatrix::<Rational>::identity(2);
    let g = GossipGraph::new(
        4,
        1,
        vec![(0, 1, id.clone()), (1, 2, id.clone()), (2, 0, id.clone()), (2, 3, id)],
    )
    .unwrap();
    let w = WeightVector::new(vec![ratio(1, 10), ratio(2, 10), ratio(3, 10), ratio(4, 10)]).unwrap();
    let verdict = verify_theorem(&g, &w, &[WalkSpec::Canonical], &RunOptions::default());
    assert!(!verdict.passed());
    assert!(verdict.walks.is_empty());
    assert!(verdict.preconditions.iter().any(|p| p.starts_with("precondition failed: bridge")));
}

#[test]
fn simulation_follows_schedule_of_a_walk() {
    let f = fixture(FixtureKind::F2, 1);
    let (_, derived, _) = setup(&f);
    let schedule = derived.psi(&derived.exhaustive_closed_walk());
    let x0: Vec<Rational> = (0..f.graph.dim()).map(|i| ratio(i as i64 * 3 - 5, 7)).collect();
    let t = simulate(&f.graph, &schedule, &x0, schedule.len()).unwrap();
    let p = f.graph.product(&schedule).unwrap();
    assert_eq!(t.last(), p.right_mul(&x0).unwrap().as_slice());
    // w x is conserved along a closed walk at w.
    let dot = |x: &[Rational]| -> Rational { x.iter().zip(f.weight.entries()).map(|(a, b)| a * b).sum() };
    assert_eq!(dot(t.last()), dot(&x0));
}
