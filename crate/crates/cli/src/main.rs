use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gossip_holonomy::derived::{DerivedGraph, DerivedWalk};
use gossip_holonomy::engine::{
    gen_fixture, run_to_convergence, verify_theorem, FixtureKind, LimitStructure, RunOptions, WalkSpec,
};
use gossip_holonomy::graph::{GossipGraph, Mode, Scenario};
use gossip_holonomy::holonomy::{cycle_partition, is_w_holonomic_for_graph, structural_order_bound, WeightVector};
use gossip_holonomy::scalar::parse_rational;
use gossip_holonomy::{Error, Rational, Scalar};
use serde_json::{json, Value};

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_REPS: usize = 10_000;
const DEFAULT_WALKS: usize = 5;

/// Holonomy analysis and limit behaviour of matrix-weighted gossip processes.
#[derive(Parser)]
#[command(name = "gossip-holonomy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Topology checks, per-cycle orders and partitions, global structure.
    Analyze(Common),
    /// Derived graph export and an exhaustive closed walk.
    Derive(Common),
    /// Iterate an exhaustive walk until the blocks converge.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Walk file written by `derive`; defaults to the canonical walk.
        #[arg(long)]
        walk: Option<PathBuf>,
    },
    /// Check the limit theorem over seeded exhaustive walks.
    Verify(Common),
    /// Write a fixture scenario and its declared ground truth.
    Gen {
        /// F1, F2 or F3.
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    scenario: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Block semi-norm tolerance, rational or decimal.
    #[arg(long)]
    tol: Option<String>,
    /// Largest w-order searched.
    #[arg(long)]
    cap: Option<u64>,
    /// Maximum exhaustive repetitions.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of seeded walks to verify.
    #[arg(long)]
    walks: Option<usize>,
}

enum Failure {
    /// Parse or validation error.
    Input(String),
    Precondition(String),
    Convergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Precondition(_) => 3,
            Self::Convergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Precondition(m) | Self::Convergence(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotHolonomic(_) => Self::Precondition(e.to_string()),
            Error::ContractionViolated(_) | Error::GroupCapExceeded { .. } => Self::Convergence(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Settings after applying flags over scenario values over defaults.
struct Settings {
    mode: Mode,
    tol: f64,
    reps: usize,
    seed: Option<u64>,
    cap: Option<u64>,
    walks: usize,
    out: Option<PathBuf>,
}

impl Settings {
    fn resolve(common: &Common, scenario: &Scenario) -> Result<Self, Failure> {
        let tol = match (&common.tol, &scenario.tol) {
            (Some(text), _) => parse_tol(text)?,
            (None, Some(value)) => Rational::from_json(value).map_err(Failure::from)?.to_f64(),
            (None, None) => DEFAULT_TOL,
        };
        if tol.is_nan() || tol <= 0.0 {
            return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            mode: match common.mode {
                Some(ModeArg::Exact) => Mode::Exact,
                Some(ModeArg::Float) => Mode::Float,
                None => scenario.mode(),
            },
            tol,
            reps: common.reps.or(scenario.reps).unwrap_or(DEFAULT_REPS),
            seed: common.seed.or(scenario.seed),
            cap: common.cap.or(scenario.cap),
            walks: common.walks.or(scenario.walks).unwrap_or(DEFAULT_WALKS),
            out: common.out.clone(),
        })
    }

    fn to_json(&self) -> Value {
        json!({
            "mode": match self.mode { Mode::Exact => "exact", Mode::Float => "float" },
            "tol": self.tol,
            "reps": self.reps,
            "seed": self.seed,
            "cap": self.cap,
            "walks": self.walks,
        })
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            max_reps: self.reps,
            ..RunOptions::default()
        }
    }

    fn require_exact(&self) -> Result<(), Failure> {
        match self.mode {
            Mode::Exact => Ok(()),
            Mode::Float => Err(Failure::Input(Error::RequiresExact.to_string())),
        }
    }
}

fn parse_tol(text: &str) -> Result<f64, Failure> {
    if let Ok(x) = text.parse::<f64>() {
        return Ok(x);
    }
    parse_rational(text)
        .map(|r| r.to_f64())
        .map_err(|e| Failure::Input(format!("--tol: {e}")))
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Scenario::from_json_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn exact_inputs(scenario: &Scenario) -> Result<(GossipGraph<Rational>, WeightVector), Failure> {
    let graph = scenario.graph::<Rational>()?;
    let weight = WeightVector::new(scenario.weight::<Rational>()?)?;
    weight.check_dim(graph.dim())?;
    Ok((graph, weight))
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", dir.join(name).display()));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

fn emit(settings_out: Option<&Path>, files: &[(&str, String)], stdout: &Value) -> Outcome {
    if let Some(dir) = settings_out {
        for (name, contents) in files {
            write_atomic(dir, name, contents)?;
        }
    }
    print_stdout(&pretty(stdout))
}

fn print_stdout(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn topology_failure(diagnostics: &[String]) -> Failure {
    Failure::Precondition(format!("{}; theorem preconditions unmet", diagnostics.join("; ")))
}

fn analyze(common: &Common) -> Outcome {
    let scenario = read_scenario(&common.scenario)?;
    let settings = Settings::resolve(common, &scenario)?;
    if settings.mode == Mode::Float {
        return analyze_float(&scenario, &settings);
    }
    let (graph, weight) = exact_inputs(&scenario)?;
    let validation = graph.validate();
    let topology = json!({
        "connected": validation.connected,
        "bridges": validation.bridges.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "cycles": validation.cycle_count,
        "preconditions_met": validation.preconditions_met(),
        "diagnostics": validation.diagnostics(),
    });
    let holonomy = is_w_holonomic_for_graph(&graph, &weight, settings.cap)?;
    let structure = if holonomy.is_holonomic() {
        Some(LimitStructure::new(&graph, &weight, &holonomy)?)
    } else {
        None
    };
    let report = json!({
        "settings": settings.to_json(),
        "topology": topology,
        "holonomic": holonomy.is_holonomic(),
        "holonomy": holonomy.to_json(),
        "structure": structure.as_ref().map(LimitStructure::to_json),
    });
    emit(settings.out.as_deref(), &[("analysis.json", pretty(&report))], &report)?;
    if !validation.preconditions_met() {
        return Err(topology_failure(&validation.diagnostics()));
    }
    if !holonomy.is_holonomic() {
        let offending: Vec<String> = holonomy.offending().map(|c| c.cycle.to_string()).collect();
        return Err(Failure::Precondition(format!("not w-holonomic: {}", offending.join(", "))));
    }
    Ok(())
}

/// Float mode: topology and cycle partitions only, since w-orders need
/// exact arithmetic.
fn analyze_float(scenario: &Scenario, settings: &Settings) -> Outcome {
    let graph = scenario.graph::<f64>()?;
    let validation = graph.validate();
    let mut cycles = Vec::new();
    for cycle in graph.cycles()? {
        let partition = cycle_partition(&graph, &cycle)?;
        cycles.push(json!({
            "cycle": cycle.to_string(),
            "partition": partition.partition().map(|p| json!({ "block0": p.block0(), "blocks": p.blocks() })),
            "transient": partition.diagnostic(),
            "structural_order": structural_order_bound(&graph, &cycle)?,
        }));
    }
    let report = json!({
        "settings": settings.to_json(),
        "topology": {
            "connected": validation.connected,
            "bridges": validation.bridges.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "cycles": validation.cycle_count,
            "preconditions_met": validation.preconditions_met(),
            "diagnostics": validation.diagnostics(),
        },
        "cycles": cycles,
        "holonomy": Error::RequiresExact.to_string(),
    });
    emit(settings.out.as_deref(), &[("analysis.json", pretty(&report))], &report)?;
    if !validation.preconditions_met() {
        return Err(topology_failure(&validation.diagnostics()));
    }
    Ok(())
}

fn walk_json(walk: &DerivedWalk, seed: Option<u64>) -> Value {
    json!({ "seed": seed, "edges": walk.edges })
}

fn choose_walk(derived: &DerivedGraph, seed: Option<u64>) -> DerivedWalk {
    match seed {
        Some(s) => derived.seeded_exhaustive_walk(s),
        None => derived.exhaustive_closed_walk(),
    }
}

fn derive(common: &Common) -> Outcome {
    let scenario = read_scenario(&common.scenario)?;
    let settings = Settings::resolve(common, &scenario)?;
    settings.require_exact()?;
    let (graph, weight) = exact_inputs(&scenario)?;
    let holonomy = is_w_holonomic_for_graph(&graph, &weight, settings.cap)?;
    let derived = DerivedGraph::build(&weight, &holonomy)?;
    let walk = choose_walk(&derived, settings.seed);
    let export = derived.to_json();
    let walk_file = walk_json(&walk, settings.seed);
    let report = json!({
        "settings": settings.to_json(),
        "derived": export,
        "walk": walk_file,
    });
    emit(
        settings.out.as_deref(),
        &[
            ("derived.json", pretty(&export)),
            ("derived.dot", derived.to_dot()),
            ("walk.json", pretty(&walk_file)),
        ],
        &report,
    )
}

fn read_walk(path: &Path) -> Result<DerivedWalk, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let edges = value
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Input(format!("{}: missing \"edges\" array", path.display())))?;
    let ids = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            e.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Failure::Input(format!("{}: edges[{i}] is not an edge id", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DerivedWalk::new(ids))
}

/// Exact inputs, holonomy, derived graph and predicted structure, with
/// topology and holonomy failures mapped to precondition errors.
fn theorem_setup(
    scenario: &Scenario,
    settings: &Settings,
) -> Result<(GossipGraph<Rational>, WeightVector, DerivedGraph, LimitStructure), Failure> {
    let (graph, weight) = exact_inputs(scenario)?;
    let validation = graph.validate();
    if !validation.preconditions_met() {
        return Err(topology_failure(&validation.diagnostics()));
    }
    let holonomy = is_w_holonomic_for_graph(&graph, &weight, settings.cap)?;
    holonomy.require_holonomic()?;
    let derived = DerivedGraph::build(&weight, &holonomy)?;
    let structure = LimitStructure::new(&graph, &weight, &holonomy)?;
    Ok((graph, weight, derived, structure))
}

fn simulate(common: &Common, walk_path: Option<&Path>) -> Outcome {
    let scenario = read_scenario(&common.scenario)?;
    let settings = Settings::resolve(common, &scenario)?;
    settings.require_exact()?;
    let (graph, _, derived, structure) = theorem_setup(&scenario, &settings)?;
    let walk = match walk_path {
        Some(p) => read_walk(p)?,
        None => choose_walk(&derived, settings.seed),
    };
    let run = run_to_convergence(&graph, &derived, &structure, &walk, &settings.run_options())?;
    let mut report = run.to_json();
    report["settings"] = settings.to_json();
    emit(
        settings.out.as_deref(),
        &[("limit_report.json", pretty(&report)), ("trace.csv", run.trace_csv())],
        &report,
    )?;
    if !run.converged {
        return Err(Failure::Convergence(format!(
            "block semi-norm {:e} above tolerance {:e} after {} repetitions",
            run.max_block_seminorm, settings.tol, run.reps
        )));
    }
    Ok(())
}

fn verify(common: &Common) -> Outcome {
    let scenario = read_scenario(&common.scenario)?;
    let settings = Settings::resolve(common, &scenario)?;
    settings.require_exact()?;
    let (graph, weight) = exact_inputs(&scenario)?;
    let seed = settings.seed.unwrap_or(0);
    let walks: Vec<WalkSpec> = (0..settings.walks as u64).map(|i| WalkSpec::Seeded(seed + i)).collect();
    let verdict = verify_theorem(&graph, &weight, &walks, &settings.run_options());
    let mut report = verdict.to_json();
    report["settings"] = settings.to_json();
    for v in &verdict.walks {
        eprintln!(
            "{:<10} finite={:<7} block-diagonal={:<7} rank-one={:<7} |L|={} |K|={}",
            v.walk.to_string(),
            v.finite,
            v.block_diagonal,
            v.rank_one,
            v.observed_limit_size,
            verdict.group_order.unwrap_or(0)
        );
    }
    emit(settings.out.as_deref(), &[("verdict.json", pretty(&report))], &report)?;
    if !verdict.preconditions_met() {
        return Err(Failure::Precondition(verdict.preconditions.join("; ")));
    }
    if !verdict.passed() {
        let failed: Vec<String> = verdict
            .walks
            .iter()
            .filter(|v| !v.passed())
            .map(|v| match &v.error {
                Some(e) => format!("{}: {e}", v.walk),
                None => v.walk.to_string(),
            })
            .collect();
        return Err(Failure::Convergence(format!("walks failed: {}", failed.join(", "))));
    }
    Ok(())
}

fn gen(kind: &str, seed: u64, n: Option<usize>, m: Option<usize>, out: Option<&Path>) -> Outcome {
    let kind: FixtureKind = kind.parse()?;
    let (dn, dm) = kind.shape();
    let fixture = gen_fixture(kind, seed, n.unwrap_or(dn), m.unwrap_or(dm))?;
    let mut scenario = Scenario::from_graph(&fixture.graph, fixture.weight.entries(), Some(Mode::Exact));
    scenario.seed = Some(seed);
    let text = scenario.to_json_string() + "\n";
    let truth = fixture.truth.to_json();
    if let Some(dir) = out {
        write_atomic(dir, "scenario.json", &text)?;
        write_atomic(dir, "truth.json", &pretty(&truth))?;
    }
    print_stdout(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(c) => analyze(c),
        Command::Derive(c) => derive(c),
        Command::Simulate { common, walk } => simulate(common, walk.as_deref()),
        Command::Verify(c) => verify(c),
        Command::Gen { kind, seed, n, m, out } => gen(kind, *seed, *n, *m, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
