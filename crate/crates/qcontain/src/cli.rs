//! Command-line driver.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcontain_core::rng::derive_seed;
use qcontain_core::{
    exact_influence, generate_random_instance, greedy_contain, mc_influence, qae_influence,
    Backend, CandidateSet, CandidateStrategy, ContainmentPlan, Error as CoreError, ExactEstimator, GmfFinder,
    InfluenceEstimate, InfluenceEstimator, LinearFinder, MinimumFinder, MonteCarloEstimator, ObjectiveValue,
    ProblemInstance, QaeEstimator, QaeMode, RandomInstanceParams, DEFAULT_EXACT_EDGE_CAP,
};

use crate::bench::{bench_estimation, bench_minfind, estimation_csv, minfind_csv, EstimationBench};
use crate::format::{parse_instance, serialize_instance, FormatError};

#[derive(Parser, Debug)]
#[command(name = "qcontain", version, about = "Edge-removal containment on Independent Cascade networks")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub rng: u64,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Instance file.
    #[arg(long, global = true)]
    pub instance: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random directed instance.
    Gen(GenArgs),
    /// Estimate the expected influence of the seed set.
    Estimate(EstimateArgs),
    /// Run greedy edge removal.
    Contain(ContainArgs),
    /// Error against the exact influence for MC and QAE over a work grid.
    BenchEstimation(BenchEstimationArgs),
    /// Work needed to find a list minimum, linear scan against Dürr–Høyer.
    BenchMinfind(BenchMinfindArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 10)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.2)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub i_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub i_max: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mc,
    Exact,
    Qae,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Finder {
    Linear,
    Gmf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    All,
    Frontier,
    TopP,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendArg {
    Analytic,
    Statevector,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Analytic => Backend::Analytic,
            BackendArg::Statevector => Backend::Statevector,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct EstimatorArgs {
    /// Monte Carlo trials per estimate.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// QAE target error on the normalized influence.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Sample QAE outcomes from the closed-form distribution instead of
    /// simulating the circuit.
    #[arg(long)]
    pub analytic: bool,
}

impl EstimatorArgs {
    fn qae_mode(&self) -> QaeMode {
        if self.analytic {
            QaeMode::Analytic
        } else {
            QaeMode::Statevector
        }
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    #[command(flatten)]
    pub est: EstimatorArgs,
    /// Also compute the exact influence and report the errors against it.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Args, Debug)]
pub struct ContainArgs {
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub estimator: Method,
    #[arg(long, value_enum, default_value_t = Finder::Linear)]
    pub finder: Finder,
    #[arg(long, value_enum, default_value_t = Strategy::All)]
    pub strategy: Strategy,
    /// Candidate count kept by `--strategy top-p`.
    #[arg(long, default_value_t = 5)]
    pub top_p: usize,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    /// Grover backend for `--finder gmf`.
    #[arg(long, value_enum, default_value_t = BackendArg::Analytic)]
    pub backend: BackendArg,
    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct BenchEstimationArgs {
    /// Comma-separated MC trial counts.
    #[arg(long, default_value = "100,400,1600,6400", value_delimiter = ',')]
    pub mc_trials: Vec<u64>,
    /// Comma-separated QAE evaluation-qubit counts.
    #[arg(long, default_value = "4,6,8,10", value_delimiter = ',')]
    pub qae_m: Vec<usize>,
    /// Repetitions per grid point.
    #[arg(long, default_value_t = 50)]
    pub reps: u64,
    /// Simulate the QAE circuit instead of sampling the closed form.
    #[arg(long)]
    pub statevector: bool,
}

#[derive(Args, Debug)]
pub struct BenchMinfindArgs {
    /// Comma-separated list sizes.
    #[arg(long, default_value = "1,4,16,64,256", value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Random lists per size.
    #[arg(long, default_value_t = 50)]
    pub reps: u64,
    #[arg(long, value_enum, default_value_t = BackendArg::Analytic)]
    pub backend: BackendArg,
}

/// Failure with its exit code: 2 for usage and validation, 1 otherwise.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::TooLargeForExact { .. } | CoreError::TooManyQubits { .. } | CoreError::Estimator { .. } => 1,
            _ => 2,
        };
        let message = match e {
            CoreError::TooManyQubits { .. } => format!("{e}; pass --analytic to sample the closed-form distribution"),
            _ => e.to_string(),
        };
        CliError { code, message }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a, stdout, stderr),
        Command::Estimate(a) => cmd_estimate(cli, a, stdout),
        Command::Contain(a) => cmd_contain(cli, a, stdout),
        Command::BenchEstimation(a) => cmd_bench_estimation(cli, a, stdout),
        Command::BenchMinfind(a) => cmd_bench_minfind(cli, a, stdout),
    }
}

fn load_instance(cli: &Cli) -> CliResult<ProblemInstance> {
    let path = cli.instance.as_deref().ok_or_else(|| CliError::usage("--instance is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        FormatError::Invalid(core) => CliError::from(core),
        other => CliError::usage(format!("{}: {other}", path.display())),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(cli: &Cli, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.out {
        Some(p) => write_file(p, bytes),
        None => stdout.write_all(bytes).map_err(|e| CliError::runtime(e.to_string())),
    }
}

fn say(w: &mut dyn Write, text: &str) -> CliResult<()> {
    w.write_all(text.as_bytes()).map_err(|e| CliError::runtime(e.to_string()))
}

fn cmd_gen(cli: &Cli, a: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let params = RandomInstanceParams {
        n_nodes: a.nodes,
        edge_prob: a.edge_prob,
        p_range: (a.p_min, a.p_max),
        i_range: (a.i_min, a.i_max),
        n_seeds: a.seeds,
        lambda: a.lambda,
    };
    let inst = generate_random_instance(&params, cli.rng)?;
    let summary = format!(
        "|V| = {}, |E| = {}, |S| = {}\n",
        inst.node_count(),
        inst.graph().edge_count(),
        inst.seeds().len()
    );
    let text = serialize_instance(&inst);
    match &cli.out {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            say(stdout, &format!("wrote {}: {summary}", p.display()))
        }
        None => {
            say(stdout, &text)?;
            say(stderr, &summary)
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Mc => "mc",
        Method::Exact => "exact",
        Method::Qae => "qae",
    }
}

fn estimate_once(inst: &ProblemInstance, method: Method, est: &EstimatorArgs, seed: u64) -> CliResult<InfluenceEstimate> {
    Ok(match method {
        Method::Exact => exact_influence(inst, DEFAULT_EXACT_EDGE_CAP)?.to_estimate(),
        Method::Mc => mc_influence(inst, est.trials, seed)?,
        Method::Qae => qae_influence(inst, &CandidateSet::empty(), est.epsilon, seed, est.qae_mode())?,
    })
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(cli)?;
    let e = estimate_once(&inst, a.method, &a.est, cli.rng)?;
    let unit = match a.method {
        Method::Exact => "live-edge configurations",
        Method::Mc => "cascade trials",
        Method::Qae => "Q applications",
    };
    let mut text = String::new();
    writeln!(text, "method: {}", method_name(a.method)).unwrap();
    writeln!(text, "sigma: {}", e.sigma).unwrap();
    writeln!(text, "sigma_normalized: {}", e.sigma_normalized).unwrap();
    if let Some(s) = e.std_error {
        writeln!(text, "std_error: {s}").unwrap();
    }
    if let Some(b) = e.error_bound {
        writeln!(text, "error_bound: {b}").unwrap();
    }
    writeln!(text, "work_units: {} ({unit})", e.trials_or_calls).unwrap();

    let mut compared = (None, None, None);
    if a.compare {
        let exact = exact_influence(&inst, DEFAULT_EXACT_EDGE_CAP)?.sigma;
        let rel = (e.sigma - exact).abs() / exact;
        let norm = (e.sigma - exact).abs() / inst.node_count() as f64;
        writeln!(text, "exact_sigma: {exact}").unwrap();
        writeln!(text, "relative_error: {rel}").unwrap();
        writeln!(text, "normalized_abs_error: {norm}").unwrap();
        compared = (Some(exact), Some(rel), Some(norm));
    }
    say(stdout, &text)?;

    if let Some(p) = &cli.out {
        let mut csv = String::from(
            "method,sigma,sigma_normalized,std_error,error_bound,work_units,exact_sigma,relative_error,normalized_abs_error,rng_seed\n",
        );
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            method_name(a.method),
            e.sigma,
            e.sigma_normalized,
            opt(e.std_error),
            opt(e.error_bound),
            e.trials_or_calls,
            opt(compared.0),
            opt(compared.1),
            opt(compared.2),
            cli.rng
        )
        .unwrap();
        write_file(p, csv.as_bytes())?;
    }
    Ok(())
}

fn describe(o: &ObjectiveValue) -> String {
    format!("total={} sigma={} oi={}", o.total, o.sigma_used, o.oi_used)
}

fn cmd_contain(cli: &Cli, a: &ContainArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(cli)?;
    let strategy = match a.strategy {
        Strategy::All => CandidateStrategy::All,
        Strategy::Frontier => CandidateStrategy::Frontier,
        Strategy::TopP => CandidateStrategy::TopP(a.top_p),
    };
    let mut estimator: Box<dyn InfluenceEstimator> = match a.estimator {
        Method::Exact => Box::new(ExactEstimator::default()),
        Method::Mc => Box::new(MonteCarloEstimator { trials: a.est.trials, seed: derive_seed(cli.rng, 0) }),
        Method::Qae => Box::new(QaeEstimator { epsilon: a.est.epsilon, seed: derive_seed(cli.rng, 1), mode: a.est.qae_mode() }),
    };
    let mut finder: Box<dyn MinimumFinder> = match a.finder {
        Finder::Linear => Box::new(LinearFinder),
        Finder::Gmf => Box::new(GmfFinder::new(derive_seed(cli.rng, 2), a.backend.into())),
    };
    let plan = greedy_contain(&inst, estimator.as_mut(), finder.as_mut(), strategy, a.k_max)?;
    say(stdout, &plan_report(&inst, &plan, a.k_max))?;
    if let Some(p) = &cli.out {
        write_file(p, plan_csv(&inst, &plan).as_bytes())?;
    }
    Ok(())
}

fn accounting_line(plan: &ContainmentPlan) -> String {
    let c = &plan.accounting;
    format!(
        "mc_trials={} a_applications={} q_applications={} grover_oracle_calls={} linear_steps={} diffusion_simulations={}",
        c.mc_trials, c.a_applications, c.q_applications, c.grover_oracle_calls, c.linear_steps, c.diffusion_simulations
    )
}

fn plan_report(inst: &ProblemInstance, plan: &ContainmentPlan, k_max: usize) -> String {
    let mut t = String::new();
    if k_max == 0 {
        t.push_str("initial objective: not evaluated (k_max = 0)\n");
    } else {
        writeln!(t, "initial objective: {}", describe(&plan.initial)).unwrap();
    }
    for s in &plan.trace {
        let e = &inst.graph().edges()[s.edge];
        writeln!(t, "k={} remove edge {} ({} -> {}): {}", s.iteration, s.edge, e.src.0, e.dst.0, describe(&s.objective)).unwrap();
    }
    writeln!(t, "removed: {} edge(s)", plan.removed.len()).unwrap();
    writeln!(t, "accounting: {}", accounting_line(plan)).unwrap();
    t
}

fn plan_csv(inst: &ProblemInstance, plan: &ContainmentPlan) -> String {
    let mut t = String::new();
    writeln!(t, "# accounting: {}", accounting_line(plan)).unwrap();
    t.push_str("iteration,edge,src,dst,total,influence_term,impact_term,sigma,oi\n");
    for s in &plan.trace {
        let e = &inst.graph().edges()[s.edge];
        let o = &s.objective;
        writeln!(
            t,
            "{},{},{},{},{},{},{},{},{}",
            s.iteration, s.edge, e.src.0, e.dst.0, o.total, o.influence_term, o.impact_term, o.sigma_used, o.oi_used
        )
        .unwrap();
    }
    t
}

fn cmd_bench_estimation(cli: &Cli, a: &BenchEstimationArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(cli)?;
    if a.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let mode = if a.statevector { QaeMode::Statevector } else { QaeMode::Analytic };
    let cfg = EstimationBench { mc_trials: a.mc_trials.clone(), qae_m: a.qae_m.clone(), reps: a.reps, mode };
    let (truth, rows) = bench_estimation(&inst, &cfg, cli.rng)?;
    let meta = vec![
        format!("instance: |V| = {}, |E| = {}, |S| = {}", inst.node_count(), inst.graph().edge_count(), inst.seeds().len()),
        format!("exact normalized influence: {truth}"),
        format!("rng: {}; reps: {}; qae mode: {}", cli.rng, a.reps, if a.statevector { "statevector" } else { "analytic" }),
        "error: |estimate - exact| / |V|".to_string(),
        "work_units: mc = cascade trials; qae = Q applications (2^m - 1, one run; A applications = 2*Q + 1)".to_string(),
    ];
    emit(cli, &estimation_csv(&meta, &rows), stdout)
}

fn cmd_bench_minfind(cli: &Cli, a: &BenchMinfindArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    if a.sizes.contains(&0) {
        return Err(CliError::usage("list sizes must be at least 1"));
    }
    let rows = bench_minfind(&a.sizes, a.reps, a.backend.into(), cli.rng)?;
    let meta = vec![
        format!("rng: {}; reps: {}; backend: {:?}", cli.rng, a.reps, Backend::from(a.backend)),
        "values: uniform [0, 1) drawn from rng_seed".to_string(),
        "work_units: linear = items scanned; gmf = Grover iterations + 1 initial evaluation + 1 per improvement".to_string(),
    ];
    emit(cli, &minfind_csv(&meta, &rows), stdout)
}
