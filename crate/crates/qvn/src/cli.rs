//! Command-line front end. [`run`] returns the text written to stdout so the
//! commands can be driven from tests without a subprocess.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qvn_core::channel::{channel_from_choi, choi_of, unitary_program, Channel, ProgramState};
use qvn_core::circuit::{compile, cost_report, execute, CostReport, ExecutionTrace, Strategy, DEFAULT_BUDGET};
use qvn_core::classify::{classify, Bipartition, ResourceReport};
use qvn_core::covariant::{benchmark_row, log_log_slope, optimize_phi, BenchRow, Sampling, DEFAULT_MAX_RESIDUAL};
use qvn_core::gates;
use qvn_core::memory::BuiltinPrograms;
use qvn_core::teleport::{compose_covariant, compose_standard, CompositionStrategy, PauliFrame};
use qvn_core::{DensityOperator, Matrix, DEFAULT_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit_file::parse_circuit;
use crate::error::{QvnError, Result};
use crate::format::{read_program, read_text, to_json, write_program, FamilyFile, Metadata, PovmSpec, ProgramFile};
use crate::registry::Registry;

pub const CLASSIFY_SCHEMA: &str = "qvn.classify/1";
pub const COMPOSE_SCHEMA: &str = "qvn.compose/1";
pub const CIRCUIT_SCHEMA: &str = "qvn.circuit-run/1";
pub const BENCH_SCHEMA: &str = "qvn.bench-covariant/1";
pub const REGISTRY_SCHEMA: &str = "qvn.registry-list/1";

#[derive(Debug, Parser)]
#[command(name = "qvn", version, about = "Stored-program quantum machine simulator")]
pub struct Cli {
    /// Numerical tolerance for validation and classification.
    #[arg(long, global = true, env = "QVN_TOLERANCE", default_value_t = DEFAULT_TOL)]
    pub tolerance: f64,
    /// Output format (default: json, or csv for benchmarks).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Store, load and list programs in a registry directory.
    #[command(subcommand)]
    Registry(RegistryCommand),
    /// Classify a program against the three machine generations.
    Classify(ClassifyArgs),
    /// Compose two programs by teleportation (first, then second).
    Compose(ComposeArgs),
    /// Run tailed circuits.
    #[command(subcommand)]
    Circuit(CircuitCommand),
    /// Benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Emit built-in program documents.
    #[command(subcommand)]
    Program(ProgramCommand),
}

#[derive(Debug, Subcommand)]
pub enum RegistryCommand {
    Save {
        #[arg(long, default_value = "qvn-registry")]
        dir: PathBuf,
        #[arg(long)]
        name: String,
        /// Program file to store.
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        file: Option<PathBuf>,
        /// Built-in gate to store (I, X, Z, H, S, T, CNOT).
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        description: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    Load {
        #[arg(long, default_value = "qvn-registry")]
        dir: PathBuf,
        #[arg(long)]
        name: String,
    },
    List {
        #[arg(long, default_value = "qvn-registry")]
        dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    /// Head wires of party A (overrides file metadata), e.g. `0` or `0,1`.
    #[arg(long, value_delimiter = ',')]
    pub bipartition: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComposeStrategy {
    Postselect,
    Frame,
    Covariant,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, value_enum, default_value_t = ComposeStrategy::Postselect)]
    pub strategy: ComposeStrategy,
    /// Required for the sampled strategies.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Write the resulting program here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CircuitCommand {
    Run {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        /// postselect, frame or covariant-retry.
        #[arg(long, default_value = "covariant-retry")]
        strategy: String,
        /// Attempt budget per covariant junction.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Fetch gate programs from this registry instead of the built-ins.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Covariant programming accuracy against the number of program copies.
    Covariant {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Report wall-clock runtimes (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProgramCommand {
    /// Choi document of a built-in gate.
    Builtin {
        name: String,
        #[arg(long, value_delimiter = ',')]
        bipartition: Option<Vec<usize>>,
    },
    /// Optimized covariant program family for `n` copies.
    Family {
        #[arg(long)]
        n: usize,
    },
}

fn core_err(ctx: &str) -> impl Fn(qvn_core::Error) -> QvnError + '_ {
    move |e| QvnError::core(ctx, e)
}

fn ctx(path: &Path) -> String {
    path.display().to_string()
}

/// Execute a parsed command and return its stdout text.
pub fn run(cli: &Cli) -> Result<String> {
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        return Err(QvnError::Usage(format!("tolerance must be positive, got {}", cli.tolerance)));
    }
    let format = cli.format;
    if format == Some(OutputFormat::Csv) && !matches!(cli.command, Command::Bench(_)) {
        return Err(QvnError::Usage("csv output is only available for benchmarks".into()));
    }
    let human = format == Some(OutputFormat::Human);
    match &cli.command {
        Command::Registry(cmd) => cmd_registry(cmd, human),
        Command::Classify(args) => cmd_classify(args, cli.tolerance, human),
        Command::Compose(args) => cmd_compose(args, cli.tolerance, human),
        Command::Circuit(CircuitCommand::Run { file, seed, strategy, budget, registry }) => {
            cmd_circuit_run(file, *seed, strategy, *budget, registry.as_deref(), human)
        }
        Command::Bench(BenchCommand::Covariant { n_max, samples, seed, timing }) => {
            cmd_bench_covariant(*n_max, *samples, *seed, *timing, format.unwrap_or(OutputFormat::Csv))
        }
        Command::Program(cmd) => cmd_program(cmd),
    }
}

fn builtin_program(name: &str) -> Result<ProgramState> {
    let u = BuiltinPrograms::gate(name).ok_or_else(|| QvnError::Usage(format!("unknown built-in gate `{name}`")))?;
    let dims = vec![2; if u.nrows() == 4 { 2 } else { 1 }];
    unitary_program(&u, dims).map_err(core_err(name))
}

#[derive(Serialize)]
struct RegistryList<'a> {
    schema: &'a str,
    entries: Vec<String>,
}

fn cmd_registry(cmd: &RegistryCommand, human: bool) -> Result<String> {
    match cmd {
        RegistryCommand::Save { dir, name, file, builtin, description, seed } => {
            let reg = Registry::open(dir)?;
            let (p, mut meta) = match (file, builtin) {
                (Some(f), _) => read_program(f)?,
                (None, Some(b)) => (builtin_program(b)?, builtin_metadata(b, None)),
                (None, None) => return Err(QvnError::Usage("give --file or --builtin".into())),
            };
            if description.is_some() {
                meta.description = description.clone();
            }
            if seed.is_some() {
                meta.seed = *seed;
            }
            let path = reg.save(name, &p, meta)?;
            Ok(format!("{}\n", path.display()))
        }
        RegistryCommand::Load { dir, name } => {
            let reg = Registry::open(dir)?;
            let file = reg.load_file(name)?;
            file.to_program(&ctx(&dir.join(name)))?;
            to_json(&file)
        }
        RegistryCommand::List { dir } => {
            let entries = Registry::open(dir)?.list()?;
            if human {
                Ok(entries.iter().map(|e| format!("{e}\n")).collect())
            } else {
                to_json(&RegistryList { schema: REGISTRY_SCHEMA, entries })
            }
        }
    }
}

fn builtin_metadata(name: &str, bipartition: Option<Vec<usize>>) -> Metadata {
    let two_wire = BuiltinPrograms::gate(name).is_some_and(|u| u.nrows() == 4);
    Metadata {
        name: Some(name.into()),
        description: Some(format!("Choi state of the {name} gate")),
        seed: None,
        bipartition: bipartition.or(two_wire.then(|| vec![0])),
    }
}

#[derive(Serialize)]
struct Verdicts {
    qvn1: &'static str,
    qvn2: Option<&'static str>,
    qvn3: Option<&'static str>,
}

#[derive(Serialize)]
struct Measures {
    purity: f64,
    negativity_head_tail: f64,
    min_pt_eigenvalue_head_tail: f64,
    entanglement_entropy: Option<f64>,
    negativity_ab: Option<f64>,
    min_pt_eigenvalue_ab: Option<f64>,
    factorization_distance: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport {
    schema: &'static str,
    file: String,
    tolerance: f64,
    dims_head: Vec<usize>,
    dims_tail: Vec<usize>,
    bipartition: Option<Vec<usize>>,
    unitary: bool,
    entanglement_breaking: &'static str,
    separable: Option<&'static str>,
    product: Option<&'static str>,
    verdicts: Verdicts,
    measures: Measures,
}

impl ClassifyReport {
    fn new(file: String, p: &ProgramState, bip: Option<Vec<usize>>, r: &ResourceReport) -> Self {
        let m = &r.measures;
        Self {
            schema: CLASSIFY_SCHEMA,
            file,
            tolerance: r.tolerance,
            dims_head: p.head_dims(),
            dims_tail: p.tail_dims(),
            bipartition: bip,
            unitary: r.unitary,
            entanglement_breaking: r.entanglement_breaking.as_str(),
            separable: r.separable.map(|d| d.as_str()),
            product: r.product.map(|d| d.as_str()),
            verdicts: Verdicts {
                qvn1: r.qvn1.as_str(),
                qvn2: r.qvn2.map(|v| v.as_str()),
                qvn3: r.qvn3.map(|v| v.as_str()),
            },
            measures: Measures {
                purity: m.purity,
                negativity_head_tail: m.negativity_head_tail,
                min_pt_eigenvalue_head_tail: m.min_pt_eigenvalue_head_tail,
                entanglement_entropy: m.entanglement_entropy,
                negativity_ab: m.negativity_ab,
                min_pt_eigenvalue_ab: m.min_pt_eigenvalue_ab,
                factorization_distance: m.factorization_distance,
            },
        }
    }

    fn human(&self) -> String {
        let opt = |v: Option<&str>| v.unwrap_or("n/a").to_string();
        let mut s = format!("program {} (head {:?}, tail {:?})\n", self.file, self.dims_head, self.dims_tail);
        s += &format!("  QvN-I   {}\n  QvN-II  {}\n  QvN-III {}\n", self.verdicts.qvn1, opt(self.verdicts.qvn2), opt(self.verdicts.qvn3));
        s += &format!("  entanglement-breaking {}\n", self.entanglement_breaking);
        s += &format!("  negativity head|tail {:.6}\n", self.measures.negativity_head_tail);
        if let Some(n) = self.measures.negativity_ab {
            s += &format!("  negativity A|B {n:.6}\n");
        }
        if let Some(e) = self.measures.entanglement_entropy {
            s += &format!("  entanglement entropy {e:.6} nats\n");
        }
        s
    }
}

fn cmd_classify(args: &ClassifyArgs, tol: f64, human: bool) -> Result<String> {
    let (p, meta) = read_program(&args.file)?;
    let name = ctx(&args.file);
    let bip = args.bipartition.clone().or(meta.bipartition);
    let report = classify(&p, bip.clone().map(Bipartition::new).as_ref(), tol).map_err(core_err(&name))?;
    let out = ClassifyReport::new(name, &p, bip, &report);
    if human {
        Ok(out.human())
    } else {
        to_json(&out)
    }
}

#[derive(Serialize)]
struct ComposeReport {
    schema: &'static str,
    first: String,
    second: String,
    strategy: &'static str,
    seed: Option<u64>,
    probability: f64,
    attempts: usize,
    ebits_consumed: usize,
    outcomes: Vec<[usize; 2]>,
    frame: Vec<[usize; 2]>,
    dims_head: Vec<usize>,
    dims_tail: Vec<usize>,
    /// Fidelity with the directly composed channel (frame included).
    ideal_fidelity: Option<f64>,
    identity_fidelity: Option<f64>,
}

fn ideal_composition(a: &ProgramState, b: &ProgramState, frame: &PauliFrame) -> Option<ProgramState> {
    let ca = channel_from_choi(a).ok()?;
    let cb = channel_from_choi(b).ok()?;
    let mid = Channel::unitary(frame.operator(), a.head_dims()).ok()?;
    choi_of(&cb.after(&mid.after(&ca).ok()?).ok()?).ok()
}

fn cmd_compose(args: &ComposeArgs, tol: f64, human: bool) -> Result<String> {
    let (a, _) = read_program(&args.first)?;
    let (b, _) = read_program(&args.second)?;
    let name = format!("{} then {}", ctx(&args.first), ctx(&args.second));
    let seed = match (args.strategy, args.seed) {
        (ComposeStrategy::Postselect, s) => s.unwrap_or(0),
        (_, Some(s)) => s,
        (_, None) => return Err(QvnError::Usage("--seed is required for sampled strategies".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match args.strategy {
        ComposeStrategy::Postselect => compose_standard(&a, &b, CompositionStrategy::Postselect, &mut rng),
        ComposeStrategy::Frame => compose_standard(&a, &b, CompositionStrategy::FrameTracked, &mut rng),
        ComposeStrategy::Covariant => compose_covariant(&a, &b, &mut rng, args.budget.max(1)),
    }
    .map_err(core_err(&name))?;
    let p = &result.program;
    let ideal_fidelity = ideal_composition(&a, &b, &result.frame).and_then(|i| p.fidelity(&i).ok());
    let identity_fidelity = (p.head_dims() == p.tail_dims())
        .then(|| {
            let id = Matrix::identity(p.head_dim(), p.head_dim());
            unitary_program(&id, p.head_dims()).ok().and_then(|i| p.fidelity(&i).ok())
        })
        .flatten();
    if let Some(out) = &args.out {
        let meta = Metadata { description: Some(format!("composition of {name}")), seed: args.seed, ..Default::default() };
        write_program(out, p, meta)?;
    }
    let report = ComposeReport {
        schema: COMPOSE_SCHEMA,
        first: ctx(&args.first),
        second: ctx(&args.second),
        strategy: match args.strategy {
            ComposeStrategy::Postselect => "postselect",
            ComposeStrategy::Frame => "frame",
            ComposeStrategy::Covariant => "covariant",
        },
        seed: args.seed,
        probability: result.probability,
        attempts: result.attempts,
        ebits_consumed: result.ebits_consumed,
        outcomes: result.outcomes.iter().map(|&(x, z)| [x, z]).collect(),
        frame: result.frame.exponents().iter().map(|&(x, z)| [x, z]).collect(),
        dims_head: p.head_dims(),
        dims_tail: p.tail_dims(),
        ideal_fidelity,
        identity_fidelity,
    };
    if human {
        let mut s = format!("composed {name} ({} strategy)\n", report.strategy);
        s += &format!("  branch probability {:.6}, attempts {}\n", report.probability, report.attempts);
        s += &format!("  byproduct frame {:?}\n", report.frame);
        if let Some(f) = ideal_fidelity {
            s += &format!("  fidelity with ideal composition {f:.12}\n");
        }
        if let Some(f) = identity_fidelity {
            let tag = if 1.0 - f < tol { " (identity)" } else { "" };
            s += &format!("  fidelity with identity {f:.12}{tag}\n");
        }
        Ok(s)
    } else {
        to_json(&report)
    }
}

#[derive(Serialize)]
struct WireExpectation {
    wire: usize,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Serialize)]
struct CostOut {
    gate_count: usize,
    ebit_count: usize,
    expected_attempts: usize,
    covariant_steps: usize,
}

impl From<CostReport> for CostOut {
    fn from(c: CostReport) -> Self {
        Self {
            gate_count: c.gate_count,
            ebit_count: c.ebit_count,
            expected_attempts: c.expected_attempts,
            covariant_steps: c.covariant_steps,
        }
    }
}

#[derive(Serialize)]
struct TraceOut {
    junctions: usize,
    write_attempts: usize,
    ebits_consumed: usize,
    covariant_attempts: Vec<usize>,
    branch_probability: f64,
    final_frame: Vec<[usize; 2]>,
}

impl From<&ExecutionTrace> for TraceOut {
    fn from(t: &ExecutionTrace) -> Self {
        Self {
            junctions: t.junctions.len(),
            write_attempts: t.write_attempts,
            ebits_consumed: t.ebits_consumed,
            covariant_attempts: t.covariant_attempts().collect(),
            branch_probability: t.branch_probability,
            final_frame: t.final_frame.exponents().iter().map(|&(x, z)| [x, z]).collect(),
        }
    }
}

#[derive(Serialize)]
struct CircuitReport {
    schema: &'static str,
    file: String,
    strategy: String,
    seed: u64,
    n_wires: usize,
    cost: CostOut,
    expectations: Vec<WireExpectation>,
    oracle_fidelity: f64,
    oracle_trace_distance: f64,
    trace: TraceOut,
}

fn expectations(state: &DensityOperator, ctx: &str) -> Result<Vec<WireExpectation>> {
    (0..state.n_wires())
        .map(|w| {
            let local = state.partial_trace(&[w]).map_err(core_err(ctx))?;
            let e = |m: Matrix| local.expectation(&m).map_err(core_err(ctx));
            Ok(WireExpectation { wire: w, x: e(gates::x())?, y: e(gates::y())?, z: e(gates::z())? })
        })
        .collect()
}

fn cmd_circuit_run(file: &Path, seed: u64, strategy: &str, budget: usize, registry: Option<&Path>, human: bool) -> Result<String> {
    let name = ctx(file);
    let strategy = match strategy.parse::<Strategy>() {
        Ok(Strategy::CovariantRetry { .. }) => Strategy::CovariantRetry { budget: budget.max(1) },
        Ok(s) => s,
        Err(_) => return Err(QvnError::Usage(format!("unknown strategy `{strategy}` (postselect, frame, covariant-retry)"))),
    };
    let circuit = parse_circuit(&read_text(file)?, &name)?;
    let plan = compile(&circuit).map_err(core_err(&name))?;
    let cost = cost_report(&plan);
    let inputs = circuit.input_states();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (out, trace) = match registry {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(QvnError::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "registry not found")));
            }
            execute(&plan, &inputs, &Registry::open(dir)?, strategy, &mut rng)
        }
        None => execute(&plan, &inputs, &BuiltinPrograms, strategy, &mut rng),
    }
    .map_err(core_err(&name))?;
    let oracle = circuit.oracle_output(&inputs).map_err(core_err(&name))?;
    let report = CircuitReport {
        schema: CIRCUIT_SCHEMA,
        file: name.clone(),
        strategy: strategy.to_string(),
        seed,
        n_wires: circuit.n_wires(),
        cost: cost.into(),
        expectations: expectations(&out, &name)?,
        oracle_fidelity: out.fidelity(&oracle).map_err(core_err(&name))?,
        oracle_trace_distance: out.trace_distance(&oracle).map_err(core_err(&name))?,
        trace: (&trace).into(),
    };
    if human {
        let mut s = format!("circuit {} on {} wires ({} strategy, seed {seed})\n", report.file, report.n_wires, report.strategy);
        for e in &report.expectations {
            s += &format!("  wire {}: <X> {:+.6} <Y> {:+.6} <Z> {:+.6}\n", e.wire, e.x, e.y, e.z);
        }
        s += &format!("  fidelity with oracle {:.12}\n", report.oracle_fidelity);
        s += &format!(
            "  cost: {} gates, {} ebits, {} expected attempts ({} covariant steps)\n",
            report.cost.gate_count, report.cost.ebit_count, report.cost.expected_attempts, report.cost.covariant_steps
        );
        s += &format!("  consumed: {} ebits, {} write attempts\n", report.trace.ebits_consumed, report.trace.write_attempts);
        Ok(s)
    } else {
        to_json(&report)
    }
}

#[derive(Serialize)]
struct BenchRowOut {
    n: usize,
    fidelity: f64,
    epsilon: f64,
    sigma: f64,
    predicted_fidelity: f64,
    completeness_residual: f64,
    runtime_seconds: Option<f64>,
}

#[derive(Serialize)]
struct BenchReport {
    schema: &'static str,
    seed: u64,
    samples: usize,
    rows: Vec<BenchRowOut>,
    log_log_slope: Option<f64>,
}

fn cmd_bench_covariant(n_max: usize, samples: usize, seed: u64, timing: bool, format: OutputFormat) -> Result<String> {
    if n_max == 0 || n_max > qvn_core::covariant::MAX_COPIES {
        return Err(QvnError::Usage(format!("--n-max must lie in 1..={}", qvn_core::covariant::MAX_COPIES)));
    }
    if samples < 2 {
        return Err(QvnError::Usage("--samples must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<(BenchRow, Option<f64>)> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let start = Instant::now();
        let row = benchmark_row(n, samples, &mut rng).map_err(core_err("bench covariant"))?;
        rows.push((row, timing.then(|| start.elapsed().as_secs_f64())));
    }
    let slope = log_log_slope(&rows.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>());
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("n,fidelity,epsilon,sigma,runtime\n");
            for (r, t) in &rows {
                let rt = t.map_or_else(|| "NA".to_string(), |t| format!("{t:.6}"));
                s += &format!("{},{:.12e},{:.12e},{:.12e},{rt}\n", r.n, r.fidelity, r.epsilon, r.sigma);
            }
            Ok(s)
        }
        OutputFormat::Json => to_json(&BenchReport {
            schema: BENCH_SCHEMA,
            seed,
            samples,
            rows: rows
                .iter()
                .map(|(r, t)| BenchRowOut {
                    n: r.n,
                    fidelity: r.fidelity,
                    epsilon: r.epsilon,
                    sigma: r.sigma,
                    predicted_fidelity: r.predicted_fidelity,
                    completeness_residual: r.completeness_residual,
                    runtime_seconds: *t,
                })
                .collect(),
            log_log_slope: slope,
        }),
        OutputFormat::Human => {
            let mut s = String::from("  n  fidelity        epsilon         sigma\n");
            for (r, _) in &rows {
                s += &format!("{:>3}  {:.12}  {:.12}  {:.3e}\n", r.n, r.fidelity, r.epsilon, r.sigma);
            }
            if let Some(k) = slope {
                s += &format!("log-log slope of epsilon vs n: {k:.4}\n");
            }
            Ok(s)
        }
    }
}

fn cmd_program(cmd: &ProgramCommand) -> Result<String> {
    match cmd {
        ProgramCommand::Builtin { name, bipartition } => {
            let p = builtin_program(name)?;
            to_json(&ProgramFile::from_program(&p, builtin_metadata(name, bipartition.clone()))?)
        }
        ProgramCommand::Family { n } => {
            let fam = optimize_phi(*n, 2, &Default::default()).map_err(core_err("program family"))?;
            let meta = Metadata {
                description: Some(format!("covariant program resource for {n} copies")),
                ..Default::default()
            };
            to_json(&FamilyFile::new(&fam, PovmSpec::from_sampling(&Sampling::Design, DEFAULT_MAX_RESIDUAL), meta))
        }
    }
}
