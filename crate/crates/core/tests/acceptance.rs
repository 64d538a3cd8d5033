//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
//! criterion fails.

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gossip_holonomy::derived::{DerivedGraph, DerivedWalk};
use gossip_holonomy::engine::{
    epsilon_bound, gen_fixture, run_to_convergence, Fixture, FixtureKind, LimitStructure, RunOptions,
};
use gossip_holonomy::graph::GossipGraph;
use gossip_holonomy::holonomy::{
    analyze_cycle, induced_partition, is_w_holonomic_for_graph, merge_partitions, transport_basepoint,
    WeightVector,
};
use gossip_holonomy::scalar::ratio;
use gossip_holonomy::stomat::{
    compose_support_graphs, frobenius_form, is_permutation, maximal_permutation_index, IndexSet, Matrix,
    Partition, Permutation, StochasticMatrix, SupportDigraph,
};
use gossip_holonomy::{Error, Rational, Scalar};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T>(r: Result<T, Error>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn set(labels: &[usize]) -> IndexSet {
    IndexSet::from_one_based(labels).unwrap()
}

fn range1(a: usize, b: usize) -> Vec<usize> {
    (a..=b).collect()
}

fn fixture(kind: FixtureKind, seed: u64) -> Fixture {
    let (n, m) = kind.shape();
    gen_fixture(kind, seed, n, m).unwrap()
}

fn all_fixtures() -> Vec<Fixture> {
    [FixtureKind::F1, FixtureKind::F2, FixtureKind::F3]
        .into_iter()
        .flat_map(|k| (0..3).map(move |s| fixture(k, s)))
        .collect()
}

/// Stochastic matrix realizing a partition: identity rows on block 0,
/// uniform rows inside every other block.
fn realize(p: &Partition) -> Matrix<Rational> {
    let mut a = Matrix::identity(p.dim());
    for block in p.blocks() {
        let x = ratio(1, block.len() as i64);
        for i in block.iter() {
            a.set(i, i, Rational::zero());
            for j in block.iter() {
                a.set(i, j, x.clone());
            }
        }
    }
    a
}

fn criterion_1() -> Outcome {
    let mut c1_block0 = vec![2, 4, 7];
    c1_block0.extend(range1(10, 21));
    let c1 = Partition::new(21, set(&c1_block0), vec![set(&[1, 3, 5]), set(&[6, 8, 9])]).unwrap();
    let mut c2_block0 = vec![4, 5, 6, 7, 8, 10, 11];
    c2_block0.extend(range1(16, 21));
    let c2_blocks = vec![set(&[12, 13]), set(&[1, 2]), set(&[14, 15])];
    ensure!(
        Partition::new(21, set(&c2_block0), c2_blocks.clone()).is_err(),
        "second cycle partition as printed should not cover 3 and 9"
    );
    c2_block0.extend([3, 9]);
    let c2 = Partition::new(21, set(&c2_block0), c2_blocks).unwrap();

    let mut want0 = vec![4, 7, 10, 11];
    want0.extend(range1(16, 21));
    let want = Partition::new(
        21,
        set(&want0),
        vec![set(&[1, 2, 3, 5]), set(&[6, 8, 9]), set(&[12, 13]), set(&[14, 15])],
    )
    .unwrap();

    let (p1, p2) = (realize(&c1), realize(&c2));
    let induced1 = induced_partition(&p1);
    let induced2 = induced_partition(&p2);
    ensure!(induced1.partition() == Some(&c1), "first cycle partition not recovered");
    ensure!(induced2.partition() == Some(&c2), "second cycle partition not recovered");
    let merged = ok(merge_partitions(&c1, &c2), "merge")?;
    ensure!(merged == want, "merged partition {merged:?}");
    let product = induced_partition(&(&p2 * &p1));
    ensure!(product.partition() == Some(&want), "product partition differs from merge");
    Ok(format!(
        "block0 {} and blocks {}",
        merged.block0(),
        merged.blocks().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    ))
}

fn positive_row(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let draws: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=97)).collect();
    let total: i64 = draws.iter().sum();
    draws.into_iter().map(|x| ratio(x, total)).collect()
}

fn unit_row(k: usize, at: usize) -> Vec<Rational> {
    (0..k).map(|j| if j == at { Rational::one() } else { Rational::zero() }).collect()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trials = 200;
    for t in 0..trials {
        // Pre-local patterns on agents (1,2), (2,3) and (1,3), lower agent first.
        let e1 = vec![unit_row(4, 1), positive_row(&mut rng, 4), unit_row(4, 0), positive_row(&mut rng, 4)];
        let e2 = vec![unit_row(4, 2), unit_row(4, 0), positive_row(&mut rng, 4), positive_row(&mut rng, 4)];
        let e3 = vec![positive_row(&mut rng, 4), unit_row(4, 0), positive_row(&mut rng, 4), positive_row(&mut rng, 4)];
        let g = ok(
            GossipGraph::new(
                3,
                2,
                vec![
                    (0, 1, StochasticMatrix::from_rows(e1).unwrap()),
                    (1, 2, StochasticMatrix::from_rows(e2).unwrap()),
                    (0, 2, StochasticMatrix::from_rows(e3).unwrap()),
                ],
            ),
            "graph",
        )?;
        let ids = [g.edge_id(0, 1).unwrap(), g.edge_id(1, 2).unwrap(), g.edge_id(0, 2).unwrap()];
        // A_{e1} A_{e2} A_{e3}: the last edge applied first.
        let p = ok(g.product(&[ids[2], ids[1], ids[0]]), "product")?;
        let pi = maximal_permutation_index(p.matrix());
        ensure!(pi == set(&[1]), "trial {t}: maximal permutation index {pi}");
        for (i, row) in (0..6).map(|i| (i, p.row(i))) {
            for (j, x) in row.iter().enumerate() {
                // Row 3 reaches agent 1 through a unit row, so it misses
                // column 3 as well.
                let zero = match i {
                    0 => j != 0,
                    2 => j == 2 || j == 3,
                    1 | 3 => j == 3,
                    _ => false,
                };
                ensure!(x.is_zero() == zero, "trial {t}: entry ({}, {}) is {x}", i + 1, j + 1);
            }
        }
    }
    Ok(format!("{trials} instantiations, index set {{1}} every time"))
}

fn criterion_3() -> Outcome {
    let f = fixture(FixtureKind::F1, 0);
    let w = WeightVector::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]).unwrap();
    let uniform = WeightVector::<Rational>::uniform(3);
    let cycles = ok(f.graph.cycles(), "cycles")?;
    ensure!(cycles.len() == 2, "expected both orientations of the triangle");
    for c in &cycles {
        let a = ok(analyze_cycle(&f.graph, c, &w, None), "analysis")?;
        ensure!(a.order_w == 3, "{c}: order {}", a.order_w);
        let distinct: HashSet<&Vec<Rational>> = a.orbit.iter().collect();
        ensure!(a.orbit.len() == 3 && distinct.len() == 3, "{c}: orbit {:?}", a.orbit);
        // Independent oracle: v P_C = v A_k ⋯ A_1, one edge at a time.
        let mut v = w.entries().to_vec();
        for k in 1..=3 {
            for &e in a.edges.iter().rev() {
                v = f.graph.local(e).left_mul(&v).unwrap();
            }
            ensure!((v == *w.entries()) == (k == 3), "{c}: return after {k} passes");
        }
        let u = ok(analyze_cycle(&f.graph, c, &uniform, None), "analysis")?;
        ensure!(u.order_w == 1, "{c}: uniform order {}", u.order_w);
    }
    Ok("order 3 with 3 distinct orbit vectors; uniform order 1".into())
}

struct F2Run {
    fixture: Fixture,
    structure: LimitStructure,
    report: gossip_holonomy::engine::LimitReport,
}

fn run_f2(seed: u64, walk: impl Fn(&DerivedGraph) -> DerivedWalk, opts: &RunOptions) -> Result<F2Run, String> {
    let f = fixture(FixtureKind::F2, seed);
    let holonomy = ok(is_w_holonomic_for_graph(&f.graph, &f.weight, None), "holonomy")?;
    let derived = ok(DerivedGraph::build(&f.weight, &holonomy), "derived graph")?;
    let structure = ok(LimitStructure::new(&f.graph, &f.weight, &holonomy), "structure")?;
    let report = ok(
        run_to_convergence(&f.graph, &derived, &structure, &walk(&derived), opts),
        "run",
    )?;
    Ok(F2Run {
        fixture: f,
        structure,
        report,
    })
}

fn criterion_4() -> Outcome {
    let opts = RunOptions {
        max_reps: 10_000,
        run_all: true,
        ..RunOptions::default()
    };
    let run = run_f2(4, DerivedGraph::exhaustive_closed_walk, &opts)?;
    let (f, r) = (&run.fixture, &run.report);
    ensure!(r.reps == 10_000, "ran {} repetitions", r.reps);
    ensure!(r.converged, "block semi-norm {:e}", r.max_block_seminorm);
    ensure!(r.block_diagonal && r.weight_conserved, "product not of the form perm ⊕ M");
    ensure!(r.permutation.is_some(), "no permutation part");
    ensure!(run.structure.predicted == f.truth.predicted, "predicted blocks differ from declaration");
    ensure!(r.predicted_positive(), "predicted block has a zero entry");
    for (measured, predicted) in r.measured.iter().zip(&r.predicted) {
        for (a, b) in measured.iter().zip(predicted) {
            ensure!((a - b.to_f64()).abs() <= 1e-9, "measured {a} vs predicted {b}");
        }
    }
    ensure!(r.max_row_error <= 1e-9, "row error {:e}", r.max_row_error);
    ensure!(r.float_permutation_agrees, "float and exact permutation parts disagree");
    ensure!(r.limit_in_group, "limit point outside the group");
    ensure!(
        r.limit_size_divides_group(),
        "limit set size {} does not divide {}",
        r.observed_limit_size,
        r.group_order
    );
    Ok(format!(
        "|L| = {} divides |K| = {}, row error {:.1e}",
        r.observed_limit_size, r.group_order, r.max_row_error
    ))
}

fn criterion_5() -> Outcome {
    let mut checkpoints = 0;
    for seed in 0..20u64 {
        let walk = move |d: &DerivedGraph| {
            if seed % 2 == 0 {
                d.exhaustive_closed_walk()
            } else {
                d.seeded_exhaustive_walk(seed)
            }
        };
        let run = run_f2(seed, walk, &RunOptions::default())?;
        let holonomy = ok(is_w_holonomic_for_graph(&run.fixture.graph, &run.fixture.weight, None), "holonomy")?;
        let eps = epsilon_bound(&holonomy).ok_or("no contraction blocks")?;
        ensure!(Some(&eps) == run.fixture.truth.epsilon.as_ref(), "seed {seed}: ε differs from declaration");
        let factor = 1.0 - eps.to_f64();
        let spacing = run.structure.l_g.div_ceil(2);
        ensure!(run.report.spacing == spacing, "spacing {}", run.report.spacing);
        let mut last: HashMap<usize, f64> = HashMap::new();
        for row in &run.report.trace {
            ensure!(row.repetitions == row.checkpoint * spacing, "checkpoint {} misplaced", row.checkpoint);
            if let Some(&prev) = last.get(&row.block) {
                ensure!(
                    row.seminorm <= factor * prev,
                    "seed {seed}, block {}, checkpoint {}: {:e} > (1 - ε) · {:e}",
                    row.block,
                    row.checkpoint,
                    row.seminorm,
                    prev
                );
                checkpoints += 1;
            }
            last.insert(row.block, row.seminorm);
        }
        ensure!(run.report.violations == 0, "seed {seed}: {} violations", run.report.violations);
    }
    ensure!(checkpoints > 0, "empty trace");
    Ok(format!("{checkpoints} checkpoint transitions, zero violations"))
}

/// Random stochastic matrix; each row has a random support, sometimes a
/// single entry.
fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let rows = (0..n)
        .map(|_| {
            let mut row = vec![Rational::zero(); n];
            if rng.gen_bool(0.3) {
                row[rng.gen_range(0..n)] = Rational::one();
                return row;
            }
            let k = rng.gen_range(1..=n);
            let mut cols: Vec<usize> = (0..n).collect();
            cols.shuffle(rng);
            let values = positive_row(rng, k);
            for (c, v) in cols.into_iter().zip(values) {
                row[c] = v;
            }
            row
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap().to_matrix()
}

fn bool_mul(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter()
        .map(|&row| (0..b.len()).filter(|&k| row >> k & 1 == 1).fold(0u16, |acc, k| acc | b[k]))
        .collect()
}

fn support_bits(a: &Matrix<Rational>) -> Vec<u16> {
    (0..a.rows())
        .map(|i| (0..a.cols()).filter(|&j| !a.get(i, j).is_zero()).fold(0u16, |acc, j| acc | 1 << j))
        .collect()
}

fn strongly_connected(bits: &[u16]) -> bool {
    let n = bits.len();
    let reach = |forward: bool| {
        let mut seen = 1u16;
        let mut frontier = vec![0usize];
        while let Some(v) = frontier.pop() {
            for u in 0..n {
                let arc = if forward { bits[v] >> u & 1 == 1 } else { bits[u] >> v & 1 == 1 };
                if arc && seen >> u & 1 == 0 {
                    seen |= 1 << u;
                    frontier.push(u);
                }
            }
        }
        seen.count_ones() as usize == n
    };
    reach(true) && reach(false)
}

/// Wielandt: an `n × n` nonnegative matrix is primitive iff its
/// `((n − 1)² + 1)`-th power is positive.
fn wielandt_primitive(bits: &[u16]) -> bool {
    let n = bits.len();
    let full = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let mut p = bits.to_vec();
    for _ in 1..(n - 1) * (n - 1) + 1 {
        p = bool_mul(&p, bits);
    }
    p.iter().all(|&r| r == full)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn criterion_6() -> Outcome {
    const TRIALS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // (a) semi-norm submultiplicativity.
    for t in 0..TRIALS {
        let n = rng.gen_range(1..=8);
        let b = random_stochastic(&mut rng, n);
        let c = random_stochastic(&mut rng, n);
        let lhs = (&b * &c).seminorm();
        let rhs = b.ergodicity_coefficient() * c.seminorm();
        ensure!(lhs <= rhs, "(a) trial {t}: {lhs} > {rhs}");
    }

    // (b) support graph of a product.
    for t in 0..TRIALS {
        let n = rng.gen_range(1..=8);
        let a = random_stochastic(&mut rng, n);
        let b = random_stochastic(&mut rng, n);
        let composed = ok(
            compose_support_graphs(&SupportDigraph::of(&a), &SupportDigraph::of(&b)),
            "compose",
        )?;
        ensure!(composed == SupportDigraph::of(&(&b * &a)), "(b) trial {t}");
    }

    // (c) a permutation product has permutation factors.
    let mut permutation_products = 0;
    for t in 0..TRIALS {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(2..=4);
        let factors: Vec<Matrix<Rational>> = (0..k)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    random_permutation(&mut rng, n)
                } else {
                    random_stochastic(&mut rng, n)
                }
            })
            .collect();
        let product = factors.iter().skip(1).fold(factors[0].clone(), |acc, f| &acc * f);
        if is_permutation(&product) {
            permutation_products += 1;
            ensure!(factors.iter().all(is_permutation), "(c) trial {t}: non-permutation factor");
        }
    }
    ensure!(permutation_products > 100, "(c) only {permutation_products} permutation products");

    // (d) finite order iff permutation.
    let mut finite = 0;
    for t in 0..TRIALS {
        let n = rng.gen_range(1..=8);
        let a = match t % 3 {
            0 => random_permutation(&mut rng, n),
            1 => {
                let mut a = random_permutation(&mut rng, n);
                let i = rng.gen_range(0..n);
                let row = positive_row(&mut rng, n);
                for (j, x) in row.into_iter().enumerate() {
                    a.set(i, j, x);
                }
                a
            }
            _ => random_stochastic(&mut rng, n),
        };
        // Exhaustive search over all k ≤ n!. A stochastic matrix whose
        // support is the diagonal is the identity, so supports decide.
        let bits = support_bits(&a);
        let diagonal: Vec<u16> = (0..n).map(|i| 1 << i).collect();
        let mut power = bits.clone();
        let mut order = None;
        for k in 1..=factorial(n) {
            if power == diagonal {
                order = Some(k);
                break;
            }
            power = bool_mul(&power, &bits);
        }
        if let Some(k) = order {
            ensure!(a.pow(k as u64) == Matrix::identity(n), "(d) trial {t}: support lied");
            finite += 1;
        }
        ensure!(order.is_some() == is_permutation(&a), "(d) trial {t}: order {order:?}");
        ensure!(
            gossip_holonomy::stomat::finite_order(&a, factorial(n) as u64).map(|k| k as usize) == order,
            "(d) trial {t}: library order differs"
        );
    }
    ensure!(finite > 0 && finite < TRIALS, "(d) degenerate sample");

    // (e) Frobenius classes: the h-th power is block diagonal with
    // primitive blocks.
    let mut done = 0;
    while done < TRIALS {
        let n = rng.gen_range(2..=8);
        let h = rng.gen_range(2..=n);
        let mut class: Vec<usize> = (0..n).map(|i| i % h).collect();
        class.shuffle(&mut rng);
        let rows = (0..n)
            .map(|i| {
                let next: Vec<usize> = (0..n).filter(|&j| class[j] == (class[i] + 1) % h).collect();
                let k = rng.gen_range(1..=next.len());
                let mut chosen = next.clone();
                chosen.shuffle(&mut rng);
                let mut row = vec![Rational::zero(); n];
                for (j, v) in chosen.into_iter().take(k).zip(positive_row(&mut rng, k)) {
                    row[j] = v;
                }
                row
            })
            .collect();
        let a = Matrix::from_rows(rows).unwrap();
        if !strongly_connected(&support_bits(&a)) {
            continue;
        }
        let classes = ok(frobenius_form(&a), "frobenius form")?;
        let period = classes.len();
        let power = a.pow(period as u64);
        let mut which = vec![0; n];
        for (c, members) in classes.iter().enumerate() {
            for i in members.iter() {
                which[i] = c;
            }
        }
        for i in 0..n {
            for j in 0..n {
                ensure!(
                    which[i] == which[j] || power.get(i, j).is_zero(),
                    "(e) trial {done}: power not block diagonal"
                );
            }
        }
        for members in &classes {
            ensure!(
                wielandt_primitive(&support_bits(&power.principal(members))),
                "(e) trial {done}: block {members} not primitive"
            );
        }
        done += 1;
    }

    Ok(format!(
        "(a)-(e) {TRIALS} trials each; {permutation_products} permutation products, {finite} finite orders"
    ))
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for f in all_fixtures() {
        for cycle in ok(f.graph.cycles(), "cycles")? {
            let base = ok(analyze_cycle(&f.graph, &cycle, &f.weight, None), "analysis")?;
            let k = base.order_w;
            ensure!(k > 0, "{cycle} not holonomic");
            for rotated in cycle.rotations() {
                let moved = ok(
                    transport_basepoint(&f.graph, &cycle, &f.weight, rotated.basepoint()),
                    "transport",
                )?;
                let p = ok(f.graph.cycle_matrix(&rotated), "cycle matrix")?;
                let back = p.pow(k).left_mul(&moved).unwrap();
                ensure!(back == moved, "{} {rotated}: transported vector not fixed", f.kind);
                let moved = ok(WeightVector::new(moved), "transported weight")?;
                let order = ok(analyze_cycle(&f.graph, &rotated, &moved, None), "analysis")?.order_w;
                ensure!(order == k, "{} {rotated}: order {order} vs {k}", f.kind);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} rotations"))
}

fn criterion_8() -> Outcome {
    let mut walks = 0;
    for kind in [FixtureKind::F2, FixtureKind::F3] {
        let f = fixture(kind, 8);
        let holonomy = ok(is_w_holonomic_for_graph(&f.graph, &f.weight, None), "holonomy")?;
        let derived = ok(DerivedGraph::build(&f.weight, &holonomy), "derived graph")?;
        for seed in 0..100 {
            let walk = derived.seeded_exhaustive_walk(seed);
            ensure!(derived.is_exhaustive_closed(&walk), "{kind} seed {seed}: not exhaustive");
            let used: HashSet<usize> = derived.psi(&walk).into_iter().collect();
            ensure!(
                used.len() == f.graph.edges().len(),
                "{kind} seed {seed}: schedule misses {} edges",
                f.graph.edges().len() - used.len()
            );
            walks += 1;
        }
    }
    Ok(format!("{walks} walks cover every edge"))
}

fn random_closed_walk(derived: &DerivedGraph, rng: &mut ChaCha8Rng) -> DerivedWalk {
    let mut edges = Vec::new();
    let mut at = derived.basepoint();
    loop {
        let out: Vec<usize> = (0..derived.edges().len())
            .filter(|&e| derived.edges()[e].source == at)
            .collect();
        let e = *out.choose(rng).expect("every node lies on an orbit loop");
        edges.push(e);
        at = derived.edges()[e].target;
        if at == derived.basepoint() && (edges.len() > 40 || rng.gen_bool(0.3)) {
            return DerivedWalk::new(edges);
        }
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut walks = 0;
    for f in all_fixtures() {
        let holonomy = ok(is_w_holonomic_for_graph(&f.graph, &f.weight, None), "holonomy")?;
        let derived = ok(DerivedGraph::build(&f.weight, &holonomy), "derived graph")?;
        let mut candidates = vec![derived.exhaustive_closed_walk()];
        candidates.extend((0..derived.cycles().len()).map(|c| derived.orbit_loop(c)));
        candidates.extend((0..10).map(|s| derived.seeded_exhaustive_walk(s)));
        candidates.extend((0..20).map(|_| random_closed_walk(&derived, &mut rng)));
        for walk in candidates {
            ensure!(derived.is_closed(&walk), "{}: walk not closed", f.kind);
            let p = ok(f.graph.product(&derived.psi(&walk)), "product")?;
            ensure!(
                p.left_mul(f.weight.entries()).unwrap() == f.weight.entries(),
                "{}: weight moved along a closed walk",
                f.kind
            );
            walks += 1;
        }
    }
    Ok(format!("{walks} closed walks conserve w exactly"))
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome, Option<Duration>); 9] = [
        (1, "example partition merge", criterion_1, Some(Duration::from_secs(1))),
        (2, "permutation block emergence", criterion_2, Some(Duration::from_secs(5))),
        (3, "holonomy orbit", criterion_3, Some(Duration::from_secs(1))),
        (4, "limit theorem on F2", criterion_4, Some(Duration::from_secs(30))),
        (5, "contraction certificate", criterion_5, None),
        (6, "lemma suite", criterion_6, None),
        (7, "basepoint invariance", criterion_7, None),
        (8, "spanning property", criterion_8, None),
        (9, "weight conservation", criterion_9, None),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {id} {name}: {detail} ({elapsed:.2?})"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {id} {name}: {reason} ({elapsed:.2?})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
