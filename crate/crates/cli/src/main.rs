use ambc_noma::montecarlo::{McPlan, Scheme, DEFAULT_TRIALS};
use ambc_noma::SystemConfig;
use ambc_noma_cli::config::load_config;
use ambc_noma_cli::runner::Workers;
use ambc_noma_cli::sweep::{
    evaluate_point, parse_engines, parse_values, run_sweep, write_sweep_csv, Axis, Engine,
    EvalOptions, SweepSpec,
};
use ambc_noma_cli::validate::{validate, DEFAULT_GAMMAS_DB};
use ambc_noma_cli::{CliError, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ambc-noma",
    version,
    about = "Block error rates of ambient-backscatter NOMA vehicular links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate engines over one swept parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Swept parameter: gamma_db, beta, blocklength or speed_kmh.
        #[arg(long)]
        axis: String,
        /// Comma list or `start:step:stop`.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "riemann,gauss-chebyshev,monte-carlo")]
        engines: String,
    },
    /// Compare analytic results with simulation; exits 3 on any FAIL.
    Validate {
        #[command(flatten)]
        common: Common,
        /// SNR grid in dB.
        #[arg(long)]
        values: Option<String>,
    },
    /// Evaluate engines at the configured operating point.
    Point {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "riemann,gauss-chebyshev,monte-carlo")]
        engines: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Noma,
    Oma,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo threads; defaults to the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report probabilities that stray outside [0, 1] instead of clamping them.
    #[arg(long)]
    strict: bool,
    /// Gauss-Chebyshev node count.
    #[arg(long, default_value_t = ambc_noma::fbl::DEFAULT_CHEBYSHEV_NODES)]
    nodes: usize,
    /// Scheme simulated by the Monte Carlo engine.
    #[arg(long, value_enum, default_value = "noma")]
    scheme: SchemeArg,
}

impl Common {
    fn setup(&self) -> Result<(SystemConfig, EvalOptions, Workers)> {
        let config = match &self.config {
            Some(path) => load_config(path)?,
            None => SystemConfig::default(),
        };
        let workers = match self.workers {
            Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
            Some(n) => Workers::new(n),
            None => Workers::available(),
        };
        if self.nodes == 0 {
            return Err(CliError::Usage("--nodes must be at least 1".into()));
        }
        let mode = match self.scheme {
            SchemeArg::Noma => Scheme::Noma,
            SchemeArg::Oma => Scheme::Oma,
        };
        let plan = McPlan::new(self.trials, self.seed, workers.threads())
            .map_err(|e| CliError::Usage(e.to_string()))?
            .with_mode(mode);
        let opts = EvalOptions {
            nodes: self.nodes,
            strict: self.strict,
            plan,
        };
        Ok((config, opts, workers))
    }
}

fn write_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    match path {
        Some(p) => {
            let mut file = BufWriter::new(File::create(p).map_err(io_err(p))?);
            write(&mut file)?;
            file.flush().map_err(io_err(p))
        }
        None => write(&mut io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            common,
            axis,
            values,
            engines,
        } => {
            let (config, opts, workers) = common.setup()?;
            let axis: Axis = axis.parse().map_err(CliError::Usage)?;
            let spec = SweepSpec::new(axis, parse_values(&values)?, &parse_engines(&engines)?)?;
            let rows = run_sweep(&config, &spec, &opts, &workers)?;
            write_output(common.out.as_deref(), |w| write_sweep_csv(w, axis, &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Point { common, engines } => {
            let (config, opts, workers) = common.setup()?;
            let mut engines: Vec<Engine> = parse_engines(&engines)?;
            engines.sort();
            engines.dedup();
            let axis = Axis::GammaDb;
            let mut rows = Vec::with_capacity(engines.len());
            for engine in engines {
                let mut row = evaluate_point(&config, engine, &opts, &workers)?;
                row.axis_value = axis.read(&config);
                rows.push(row);
            }
            write_output(common.out.as_deref(), |w| write_sweep_csv(w, axis, &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { common, values } => {
            let (config, opts, workers) = common.setup()?;
            let gammas = match values {
                Some(v) => {
                    SweepSpec::new(Axis::GammaDb, parse_values(&v)?, &[Engine::Riemann])?.values
                }
                None => DEFAULT_GAMMAS_DB.to_vec(),
            };
            let report = validate(&config, &gammas, &opts, &workers)?;
            match common.out.as_deref() {
                Some(path) => {
                    write_output(Some(path), |w| report.write_csv(w))?;
                    print!("{}", report.summary());
                }
                None => write_output(None, |w| report.write_csv(w))?,
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
