//! `attnspec`: theory queries, simulations, and study runners for pooled
//! sequence covariance models.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad flags, malformed
//! or unknown config keys, invalid model data), 1 on internal-consistency
//! failures in the numerics. Errors go to stderr; tabular data goes to files
//! under `--out`; stdout carries only small scalar answers.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use attnspec_core::bulk::BulkParams;
use attnspec_core::model::{pool_scalars, CorrelationModel, PoolWeights};
use attnspec_core::{spike, CoreError};
use attnspec_experiments::{ExperimentSpec, Sweep};
use attnspec_sim::classify::{classify_with_budget, LearnBudget, Strategy};
use attnspec_sim::{generate, CorrSpec, SimConfig, SimError, WeightSpec};

#[derive(Parser)]
#[command(
    name = "attnspec",
    version,
    about = "Spectral theory and Monte Carlo for attention-pooled sample covariances"
)]
struct Cli {
    /// Output directory for tables and manifests.
    #[arg(long, global = true, env = "ATTNSPEC_OUT", default_value = "./out")]
    out: PathBuf,
    /// Worker pool size; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the limiting eigenvalue density on a grid and write it as CSV.
    Density(DensityArgs),
    /// Print the right support edge and the three closed-form candidates.
    Edge(EdgeArgs),
    /// Print the outlier/overlap/threshold report for one configuration as JSON.
    Spike(SpikeArgs),
    /// Print the two detectability thresholds for a pooling strategy.
    Thresholds(ThresholdsArgs),
    /// Print the signal-to-noise maximizing pooling weights for a correlation model.
    OptimalWeights(RArgs),
    /// Print the deterministic causal-attention pooling weights.
    CausalWeights(CausalArgs),
    /// Generate trials and write empirical spectra.
    Simulate(SimulateArgs),
    /// Attention-weight concentration study over embedding dimensions.
    AttnConcentration(AttnArgs),
    /// Ridge classification accuracies for the configured strategies.
    Classify(ClassifyArgs),
    /// Run a registered study and write its table and manifest.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct DensityArgs {
    /// Limiting ratio d/V: embedding dimension over vocabulary size.
    #[arg(long)]
    delta: f64,
    /// Limiting ratio d/N: embedding dimension over sample count.
    #[arg(long)]
    gamma: f64,
    /// Squared norm of the pooling weights; scales the whole law.
    #[arg(long)]
    kappa: f64,
    /// Imaginary offset for boundary evaluation; default 1e-6 max(1, edge).
    #[arg(long)]
    eta: Option<f64>,
    /// Number of grid points on (0, x_max].
    #[arg(long, default_value_t = 2048)]
    points: usize,
    /// Upper end of the grid; default 1.15 times the right edge.
    #[arg(long)]
    x_max: Option<f64>,
}

#[derive(Args)]
struct EdgeArgs {
    /// Limiting ratio d/V.
    #[arg(long)]
    delta: f64,
    /// Limiting ratio d/N.
    #[arg(long)]
    gamma: f64,
    /// Squared norm of the pooling weights.
    #[arg(long)]
    kappa: f64,
}

/// Correlation-model selection shared by theory subcommands.
#[derive(Args, Clone)]
struct RArgs {
    /// Sequence length T.
    #[arg(long, default_value_t = 10)]
    t: usize,
    /// Prefix model: fully correlated block on the first L positions.
    #[arg(long, conflicts_with_all = ["spiked_theta", "r_file"])]
    prefix_len: Option<usize>,
    /// Spiked model strength theta in I + theta u u^T.
    #[arg(long, requires = "spiked_support")]
    spiked_theta: Option<f64>,
    /// Spiked model support: u uniform on the first L positions.
    #[arg(long)]
    spiked_support: Option<usize>,
    /// CSV file holding a custom symmetric PSD matrix (header `# T=.. kind=..`).
    #[arg(long)]
    r_file: Option<PathBuf>,
}

impl RArgs {
    fn build(&self) -> Result<CorrelationModel<f64>, CliError> {
        if let Some(path) = &self.r_file {
            let file = fs::File::open(path).map_err(|e| {
                CliError::Config(format!("cannot open r_file {}: {e}", path.display()))
            })?;
            return Ok(attnspec_core::io::read_correlation(
                std::io::BufReader::new(file),
            )?);
        }
        if let Some(theta) = self.spiked_theta {
            let support = self.spiked_support.expect("clap enforces the pair");
            return Ok(CorrelationModel::spiked_uniform(theta, support, self.t)?);
        }
        let len = self.prefix_len.unwrap_or(3);
        Ok(CorrelationModel::prefix(len, self.t)?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PoolArg {
    Mean,
    Causal,
    Optimal,
}

#[derive(Args)]
struct SpikeArgs {
    /// Limiting ratio d/V.
    #[arg(long)]
    delta: f64,
    /// Limiting ratio d/N.
    #[arg(long)]
    gamma: f64,
    /// Signal strength: norm of the hidden mean vector.
    #[arg(long)]
    mu_norm: f64,
    /// Pooled signal strength w^T R w; overrides the pooling flags.
    #[arg(long, requires = "kappa")]
    alpha: Option<f64>,
    /// Squared pooling-weight norm; overrides the pooling flags.
    #[arg(long, requires = "alpha")]
    kappa: Option<f64>,
    /// Pooling strategy evaluated on the correlation model.
    #[arg(long, value_enum, default_value_t = PoolArg::Mean)]
    pool: PoolArg,
    #[command(flatten)]
    r: RArgs,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Limiting ratio d/V.
    #[arg(long)]
    delta: f64,
    /// Limiting ratio d/N.
    #[arg(long)]
    gamma: f64,
    /// Pooling strategy evaluated on the correlation model.
    #[arg(long, value_enum, default_value_t = PoolArg::Mean)]
    pool: PoolArg,
    #[command(flatten)]
    r: RArgs,
}

#[derive(Args)]
struct CausalArgs {
    /// Sequence length T.
    #[arg(long)]
    t: usize,
}

/// Simulation configuration shared by `simulate` and `classify`: either a
/// JSON config file, command-line flags, or both (flags win).
#[derive(Args, Clone)]
struct SimArgs {
    /// JSON file with the simulation schema; unknown keys are errors.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Embedding dimension d.
    #[arg(long)]
    d: Option<usize>,
    /// Vocabulary size V (even).
    #[arg(long)]
    vocab: Option<usize>,
    /// Sample count N.
    #[arg(long)]
    samples: Option<usize>,
    /// Sequence length T.
    #[arg(long)]
    t: Option<usize>,
    /// Signal strength (norm of the hidden mean).
    #[arg(long)]
    mu_norm: Option<f64>,
    /// Prefix model block length.
    #[arg(long)]
    prefix_len: Option<usize>,
    /// Spiked model strength.
    #[arg(long, requires = "spiked_support")]
    spiked_theta: Option<f64>,
    /// Spiked model support (u uniform on the first L positions).
    #[arg(long)]
    spiked_support: Option<usize>,
    /// Pooling strategy.
    #[arg(long, value_enum)]
    pool: Option<PoolArg>,
    /// Embedding noise: gaussian table or +/-1 sign table.
    #[arg(long, value_enum)]
    noise: Option<NoiseArg>,
    /// Position factors: binary signs or real gaussian factors.
    #[arg(long, value_enum)]
    xi_mode: Option<XiArg>,
    /// Keep the raw embedding table (skip removing empirical class means).
    #[arg(long)]
    no_center: bool,
    /// Master seed; fully determines all stochastic output.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent trials.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Rademacher,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum XiArg {
    Binary,
    GaussianFactor,
}

impl SimArgs {
    fn resolve(&self) -> Result<SimConfig, CliError> {
        let mut cfg: SimConfig = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("config file: {e}")))?
            }
            None => SimConfig {
                d: 500,
                vocab: 800,
                samples: 1000,
                t: 10,
                mu_norm: 2.5,
                r: CorrSpec::Prefix { len: 3 },
                weights: WeightSpec::Mean,
                noise: Default::default(),
                xi_mode: Default::default(),
                center_classes: true,
                seed: 0,
                trials: 1,
            },
        };
        if let Some(v) = self.d {
            cfg.d = v;
        }
        if let Some(v) = self.vocab {
            cfg.vocab = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.t {
            cfg.t = v;
        }
        if let Some(v) = self.mu_norm {
            cfg.mu_norm = v;
        }
        if let Some(len) = self.prefix_len {
            cfg.r = CorrSpec::Prefix { len };
        }
        if let Some(theta) = self.spiked_theta {
            cfg.r = CorrSpec::SpikedUniform {
                theta,
                support: self.spiked_support.expect("clap enforces the pair"),
            };
        }
        if let Some(pool) = self.pool {
            cfg.weights = match pool {
                PoolArg::Mean => WeightSpec::Mean,
                PoolArg::Causal => WeightSpec::Causal,
                PoolArg::Optimal => WeightSpec::Optimal,
            };
        }
        if let Some(n) = self.noise {
            cfg.noise = match n {
                NoiseArg::Gaussian => attnspec_sim::NoiseKind::Gaussian,
                NoiseArg::Rademacher => attnspec_sim::NoiseKind::Rademacher,
            };
        }
        if let Some(x) = self.xi_mode {
            cfg.xi_mode = match x {
                XiArg::Binary => attnspec_sim::XiMode::Binary,
                XiArg::GaussianFactor => attnspec_sim::XiMode::GaussianFactor,
            };
        }
        if self.no_center {
            cfg.center_classes = false;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(tr) = self.trials {
            cfg.trials = tr;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Also dump the generated data (embeddings, signs, tokens, pooled columns).
    #[arg(long)]
    dump_data: bool,
}

#[derive(Args)]
struct AttnArgs {
    /// Comma-separated embedding dimensions.
    #[arg(long, value_delimiter = ',', default_value = "200,400,800,1600,3200")]
    d_list: Vec<usize>,
    /// Score temperature in the tau/d scaling.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Sequence length T.
    #[arg(long, default_value_t = 10)]
    t: usize,
    /// Sequences averaged per dimension.
    #[arg(long, default_value_t = 256)]
    sequences: usize,
    /// Vocabulary per dimension (V = factor * d).
    #[arg(long, default_value_t = 4)]
    vocab_factor: usize,
    /// Signal strength.
    #[arg(long, default_value_t = 1.0)]
    mu_norm: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Strategies to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "mean,causal,optimal")]
    strategies: Vec<StrategyArg>,
    /// Ridge penalty.
    #[arg(long, default_value_t = 1.0)]
    lambda_ridge: f64,
    /// Train fraction.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    /// Random restarts for the learned strategy.
    #[arg(long, default_value_t = 5)]
    learn_restarts: usize,
    /// Gradient steps per restart for the learned strategy.
    #[arg(long, default_value_t = 200)]
    learn_iters: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Mean,
    Causal,
    Optimal,
    Learned,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Mean => Strategy::Mean,
            StrategyArg::Causal => Strategy::Causal,
            StrategyArg::Optimal => Strategy::Optimal,
            StrategyArg::Learned => Strategy::Learned,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Registered study name: bulk, align, thresholds, snr, phase_diagram,
    /// classify, attn_concentration.
    name: String,
    /// JSON file with the experiment schema; unknown keys are errors.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Skip Monte Carlo columns.
    #[arg(long)]
    theory_only: bool,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invalid(m) => CliError::Config(m),
            CoreError::Unattainable { .. } => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(m) => CliError::Config(m),
            SimError::Core(c) => c.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<attnspec_experiments::ExpError> for CliError {
    fn from(e: attnspec_experiments::ExpError) -> Self {
        match e {
            attnspec_experiments::ExpError::Config(m) => CliError::Config(m),
            attnspec_experiments::ExpError::Sim(s) => s.into(),
            attnspec_experiments::ExpError::Core(c) => c.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}

fn pool_weights(pool: PoolArg, r: &CorrelationModel<f64>) -> Result<PoolWeights<f64>, CliError> {
    Ok(match pool {
        PoolArg::Mean => PoolWeights::mean(r.t()),
        PoolArg::Causal => PoolWeights::causal(r.t()),
        PoolArg::Optimal => PoolWeights::optimal(r)?,
    })
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Edge(a) => {
            let params = BulkParams::new(a.delta, a.gamma, a.kappa)?;
            let e = params.edge()?;
            println!("lambda_plus = {:.17e}", e.edge_right);
            for (k, x) in e.roots.iter().enumerate() {
                println!("x_{k} = {x:.17e}");
            }
            Ok(())
        }
        Cmd::Density(a) => {
            let params = BulkParams::new(a.delta, a.gamma, a.kappa)?;
            let edge = params.edge()?;
            let eta = match a.eta {
                Some(e) => e,
                None => params.default_eta()?,
            };
            let hi = a.x_max.unwrap_or(1.15 * edge.edge_right);
            if a.points == 0 || !(hi > 0.0) {
                return Err(CliError::Config("need points > 0 and x_max > 0".into()));
            }
            let grid: Vec<f64> = (1..=a.points)
                .map(|i| hi * i as f64 / a.points as f64)
                .collect();
            let law = params.density(&grid, eta)?;
            let dir = cli.out.join("density");
            fs::create_dir_all(&dir)?;
            let mut buf = Vec::new();
            attnspec_core::io::write_density(&mut buf, &law, eta)?;
            fs::write(dir.join("density.csv"), buf)?;
            println!("lambda_plus = {:.17e}", edge.edge_right);
            println!("wrote {}", dir.join("density.csv").display());
            Ok(())
        }
        Cmd::Spike(a) => {
            let (alpha, kappa) = match (a.alpha, a.kappa) {
                (Some(al), Some(k)) => (al, k),
                _ => {
                    let r = a.r.build()?;
                    let w = pool_weights(a.pool, &r)?;
                    let sc = pool_scalars(&w, &r, a.mu_norm)?;
                    (sc.alpha, sc.kappa)
                }
            };
            let report =
                spike::spike_report_from_scalars(alpha, kappa, a.delta, a.gamma, a.mu_norm)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(())
        }
        Cmd::Thresholds(a) => {
            let r = a.r.build()?;
            let w = pool_weights(a.pool, &r)?;
            let (mu_pop, mu_samp) = spike::thresholds(&w, &r, a.delta, a.gamma)?;
            println!("mu_pop = {mu_pop:.17e}");
            println!("mu_samp = {mu_samp:.17e}");
            Ok(())
        }
        Cmd::OptimalWeights(a) => {
            let r = a.build()?;
            let w = PoolWeights::optimal(&r)?;
            let sc = pool_scalars(&w, &r, 1.0)?;
            let cells: Vec<String> = w.as_slice().iter().map(|x| format!("{x:.17e}")).collect();
            println!("{}", cells.join(","));
            println!("snr = {:.17e}", sc.snr);
            Ok(())
        }
        Cmd::CausalWeights(a) => {
            if a.t == 0 {
                return Err(CliError::Config("t must be positive".into()));
            }
            let w = PoolWeights::<f64>::causal(a.t);
            let cells: Vec<String> = w.as_slice().iter().map(|x| format!("{x:.17e}")).collect();
            println!("{}", cells.join(","));
            Ok(())
        }
        Cmd::Simulate(a) => {
            let cfg = a.sim.resolve()?;
            let dir = cli.out.join("simulate");
            fs::create_dir_all(&dir)?;
            let mut summaries = Vec::new();
            for trial in 0..cfg.trials as u64 {
                let data = generate(&cfg, trial)?;
                let spec = attnspec_sim::empirical_spectrum(&data)?;
                let path = dir.join(format!("eigenvalues_{trial}.csv"));
                let mut text = String::from("lambda\n");
                for v in &spec.eigenvalues {
                    text.push_str(&format!("{v}\n"));
                }
                fs::write(&path, text)?;
                if a.dump_data {
                    attnspec_sim::dump::dump_dataset(
                        &dir.join(format!("data_{trial}")),
                        &data,
                        trial,
                    )?;
                }
                println!(
                    "trial {trial}: lambda_1 = {:.6}, alignment = {:.6}, gap = {:.6}",
                    spec.eigenvalues[0], spec.alignment, spec.top_gap
                );
                summaries.push(serde_json::json!({
                    "trial": trial,
                    "lambda_1": spec.eigenvalues[0],
                    "alignment": spec.alignment,
                    "top_gap": spec.top_gap,
                }));
            }
            let manifest = serde_json::json!({"config": cfg, "trials": summaries});
            fs::write(
                dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
            )?;
            Ok(())
        }
        Cmd::AttnConcentration(a) => {
            if a.d_list.is_empty() {
                return Err(CliError::Config("d_list must be nonempty".into()));
            }
            let base = SimConfig {
                d: a.d_list[0].max(1),
                vocab: 2 * a.d_list[0].max(1),
                samples: a.sequences.max(1),
                t: a.t,
                mu_norm: a.mu_norm,
                r: CorrSpec::Prefix { len: 1 },
                weights: WeightSpec::Mean,
                noise: Default::default(),
                xi_mode: Default::default(),
                center_classes: true,
                seed: a.seed,
                trials: 1,
            };
            let spec = ExperimentSpec {
                name: "attn_concentration".into(),
                base,
                sweep: Some(Sweep {
                    parameter: "d".into(),
                    grid: a.d_list.iter().map(|&d| d as f64).collect(),
                }),
                theory_only: false,
                trials: None,
                delta_grid: None,
                tau: Some(a.tau),
                vocab_factor: Some(a.vocab_factor),
                sequences: Some(a.sequences),
                lambda_ridge: None,
                split: None,
                strategies: None,
                learn_restarts: None,
                learn_iters: None,
            };
            let table = attnspec_experiments::run(&spec)?;
            let dir = table.write(&cli.out)?;
            println!(
                "slope = {:.6}",
                table.metadata["extra"]["slope"]
                    .as_f64()
                    .unwrap_or(f64::NAN)
            );
            println!("wrote {}", dir.join("table.csv").display());
            Ok(())
        }
        Cmd::Classify(a) => {
            let cfg = a.sim.resolve()?;
            let budget = LearnBudget {
                restarts: a.learn_restarts,
                iters: a.learn_iters,
            };
            for s in &a.strategies {
                let strategy: Strategy = (*s).into();
                let mut train = Vec::new();
                let mut test = Vec::new();
                for trial in 0..cfg.trials as u64 {
                    let data = generate(&cfg, trial)?;
                    let out =
                        classify_with_budget(&data, strategy, a.lambda_ridge, a.split, budget)?;
                    train.push(out.train_acc);
                    test.push(out.test_acc);
                }
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                println!(
                    "{}: train_acc = {:.4}, test_acc = {:.4} ({} trials)",
                    strategy.as_str(),
                    mean(&train),
                    mean(&test),
                    cfg.trials
                );
            }
            Ok(())
        }
        Cmd::Experiment(a) => {
            let mut spec: ExperimentSpec = match &a.config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| {
                        CliError::Config(format!("cannot read config {}: {e}", path.display()))
                    })?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Config(format!("config file: {e}")))?
                }
                None => ExperimentSpec {
                    name: a.name.clone(),
                    base: SimConfig {
                        d: 500,
                        vocab: 800,
                        samples: 1000,
                        t: 10,
                        mu_norm: 2.5,
                        r: CorrSpec::Prefix { len: 3 },
                        weights: WeightSpec::Causal,
                        noise: Default::default(),
                        xi_mode: Default::default(),
                        center_classes: true,
                        seed: 0,
                        trials: 1,
                    },
                    sweep: None,
                    theory_only: false,
                    trials: None,
                    delta_grid: None,
                    tau: None,
                    vocab_factor: None,
                    sequences: None,
                    lambda_ridge: None,
                    split: None,
                    strategies: None,
                    learn_restarts: None,
                    learn_iters: None,
                },
            };
            if spec.name != a.name {
                return Err(CliError::Config(format!(
                    "experiment name {:?} does not match config file name {:?}",
                    a.name, spec.name
                )));
            }
            if let Some(seed) = a.seed {
                spec.base.seed = seed;
            }
            if let Some(trials) = a.trials {
                spec.trials = Some(trials);
            }
            if a.theory_only {
                spec.theory_only = true;
            }
            let table = attnspec_experiments::run(&spec)?;
            let dir = table.write(&cli.out)?;
            println!("wrote {}", dir.join("table.csv").display());
            for key in ["lambda_plus", "lambda_out_theory", "slope"] {
                if let Some(v) = table.metadata["extra"][key].as_f64() {
                    println!("{key} = {v:.10}");
                }
            }
            Ok(())
        }
    }
}
