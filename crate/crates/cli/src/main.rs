use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use risbound_cli::config::{parse_bound, parse_list, parse_loads, parse_ns};
use risbound_cli::error::{EXIT_NUMERICAL, EXIT_OK};
use risbound_cli::report::emit;
use risbound_cli::{cmd_bound, cmd_gen, cmd_optimize, cmd_sweep, cmd_verify, CliError, CliResult, Format, Method, ModelSource, Report, RunConfig};
use risbound_core::scenario::{DirectPath, ScenarioSpec};

#[derive(Parser)]
#[command(name = "risbound", version, about = "Upper bounds and optimizers for 1-bit RIS channel gain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic passive scenario and write it as a model file
    Gen(GenArgs),
    /// Compute upper bounds on |h|^2
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        /// Bounds to compute (ni, nio, ibd, sdr)
        #[arg(long, default_value = "ni,nio,ibd,sdr")]
        bounds: String,
    },
    /// Run discrete optimizers over the binary configurations
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Optimizers to run (es, cd, ga, psdr)
        #[arg(long, default_value = "es,cd,ga,psdr")]
        methods: String,
    },
    /// Bounds and optimizers on reduced models of increasing size
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated model sizes
        #[arg(long)]
        ns: String,
        #[arg(long, default_value = "ni,nio,ibd,sdr")]
        bounds: String,
        #[arg(long, default_value = "es,cd,ga,psdr")]
        methods: String,
    },
    /// Run the property suite on random scenarios
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of scenarios
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Number of RIS elements
    #[arg(long)]
    ns: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Load set stored in the model (pm, pin, 01)
    #[arg(long, default_value = "pm")]
    loads: String,
    /// Largest singular value of the full scattering matrix
    #[arg(long, default_value_t = 0.95)]
    max_sv: f64,
    /// Draw a symmetric scattering matrix
    #[arg(long)]
    reciprocal: bool,
    /// Scale of the element-to-element coupling
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Direct path: zero or random
    #[arg(long, default_value = "random")]
    direct_path: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CommonArgs {
    /// Model file
    #[arg(long, conflicts_with = "generate")]
    model: Option<PathBuf>,
    /// Generate a scenario with this many elements from --seed instead
    #[arg(long)]
    generate: Option<usize>,
    /// Load set overriding the model's loads (pm, pin, 01)
    #[arg(long)]
    loads: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Transmit power in mW
    #[arg(long, default_value_t = 10.0)]
    pt_mw: f64,
    /// Noise power in mW
    #[arg(long, default_value_t = 1e-5)]
    sigma2_mw: f64,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// Fill the runtime_ms column
    #[arg(long)]
    timing: bool,
    /// Iteration cap of the relaxation solver
    #[arg(long)]
    sdp_max_iters: Option<usize>,
    /// Starts of the gauge-optimized norm bound
    #[arg(long)]
    nio_restarts: Option<usize>,
}

impl CommonArgs {
    fn config(&self) -> CliResult<RunConfig> {
        let source = match (&self.model, self.generate) {
            (Some(path), _) => ModelSource::File(path.clone()),
            (None, Some(n)) => ModelSource::Generated(ScenarioSpec::new(n, self.seed)),
            (None, None) => return Err(CliError::Config("either --model or --generate is required".into())),
        };
        let mut cfg = RunConfig::new(source);
        cfg.loads = self.loads.as_deref().map(parse_loads).transpose()?;
        cfg.seed = self.seed;
        cfg.capacity.p_t_mw = self.pt_mw;
        cfg.capacity.sigma2_mw = self.sigma2_mw;
        cfg.out = self.out.clone();
        cfg.format = Format::parse(&self.format)?;
        cfg.jobs = self.jobs;
        cfg.timing = self.timing;
        if let Some(k) = self.sdp_max_iters {
            cfg.solver.max_iters = k;
        }
        if let Some(k) = self.nio_restarts {
            cfg.nio.restarts = k;
        }
        Ok(cfg)
    }
}

fn direct_path(s: &str) -> CliResult<DirectPath> {
    match s.to_ascii_lowercase().as_str() {
        "zero" => Ok(DirectPath::Zero),
        "random" => Ok(DirectPath::Random),
        other => Err(CliError::Config(format!("unknown direct path `{other}` (expected zero, random)"))),
    }
}

fn finish(report: Report, cfg: &RunConfig) -> CliResult<i32> {
    emit(&report.render(cfg.format), cfg.out.as_deref())?;
    if report.failures.is_empty() {
        return Ok(EXIT_OK);
    }
    let err = CliError::Numerical(report.failures.join("; "));
    eprintln!("{}", err.record());
    Ok(EXIT_NUMERICAL)
}

fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Gen(g) => {
            let mut spec = ScenarioSpec::new(g.ns, g.seed);
            spec.loads = parse_loads(&g.loads)?;
            spec.max_singular_value = g.max_sv;
            spec.reciprocal = g.reciprocal;
            spec.coupling_scale = g.coupling;
            spec.direct_path = direct_path(&g.direct_path)?;
            cmd_gen(&spec, &g.out)?;
            Ok(EXIT_OK)
        }
        Command::Bound { common, bounds } => {
            let mut cfg = common.config()?;
            cfg.bounds = parse_list(&bounds, parse_bound)?;
            finish(cmd_bound(&cfg)?, &cfg)
        }
        Command::Optimize { common, methods } => {
            let mut cfg = common.config()?;
            cfg.methods = parse_list(&methods, Method::parse)?;
            finish(cmd_optimize(&cfg)?, &cfg)
        }
        Command::Sweep {
            common,
            ns,
            bounds,
            methods,
        } => {
            let mut cfg = common.config()?;
            cfg.ns = parse_ns(&ns)?;
            cfg.bounds = parse_list(&bounds, parse_bound)?;
            cfg.methods = parse_list(&methods, Method::parse)?;
            finish(cmd_sweep(&cfg)?, &cfg)
        }
        Command::Verify { seed, count, out, jobs } => {
            if jobs == Some(0) {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            let outcome = cmd_verify(seed, count, jobs)?;
            emit(&outcome.to_csv(), out.as_deref())?;
            eprintln!(
                "{} checks, {} failed, {} errors",
                outcome.checks.len(),
                outcome.failures(),
                outcome.errors()
            );
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
