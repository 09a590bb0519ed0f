//! `lumpsys`: rank tests, exact lumping, M-matrix classification, and
//! time-domain checks for LTI systems, driven by JSON files.
//!
//! Exit codes: 0 success, 2 input error, 3 mathematical precondition
//! failure (non-exact lumping, uncontrollable steering target, undefined
//! splitting, and the like).

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Math(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Math(m) => m,
        }
    }
}

/// Exact lumping and controllability analysis for LTI state-space systems.
#[derive(Parser)]
#[command(name = "lumpsys", version)]
struct Cli {
    /// Relative rank tolerance (default: max(rows, cols) x machine epsilon).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print a JSON report instead of the human-readable summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the controllability and observability rank tests.
    Analyze {
        /// System JSON file.
        system: PathBuf,
    },
    /// Reduce a system by an exact lumping matrix and report what survives.
    Lump {
        /// System JSON file.
        system: PathBuf,
        /// Lumping matrix file (bare nested JSON array).
        #[arg(long, conflicts_with_all = ["eigvecs", "mix"])]
        m_file: Option<PathBuf>,
        /// Build M from eigenvectors of A: 1-based indices into the
        /// eigenvalues in ascending order.
        #[arg(long, value_delimiter = ',', requires = "mix")]
        eigvecs: Option<Vec<usize>>,
        /// Row-major entries of the square mixing matrix applied to the
        /// selected eigenvectors.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "eigvecs")]
        mix: Option<Vec<f64>>,
        /// Write the lumped system here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the state matrix through the splitting A = -s(I - T).
    Mmatrix {
        /// System JSON file.
        system: PathBuf,
        /// Splitting scale; defaults to the largest diagonal magnitude.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Generate a reversible chain of n species with uniform exchange rate k.
    GenChain {
        /// Number of species (at least 2).
        n: usize,
        /// Exchange rate constant (positive).
        k: f64,
        /// Write the system here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the underlying reaction network.
        #[arg(long)]
        network_out: Option<PathBuf>,
    },
    /// Integrate the system and emit the trajectory as CSV.
    Simulate {
        /// System JSON file.
        system: PathBuf,
        /// Initial state, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        /// Final time.
        #[arg(long)]
        t: f64,
        /// Integration step, rounded to divide the horizon evenly.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Input signal JSON file (defaults to zero input).
        #[arg(long)]
        u_file: Option<PathBuf>,
        /// Trajectory destination (stdout when omitted).
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Compute the minimum-energy control steering x0 to x1 in time t1.
    Steer {
        /// System JSON file.
        system: PathBuf,
        /// Start state, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        /// Target state, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x1: Vec<f64>,
        /// Steering horizon.
        #[arg(long)]
        t1: f64,
        /// Gramian quadrature panels, also the control's segment count.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Write the control signal here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a lumping matrix for exactness and the preservation property.
    Verify {
        /// System JSON file.
        system: PathBuf,
        /// Lumping matrix file (bare nested JSON array).
        #[arg(long)]
        m_file: PathBuf,
    },
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!("{}: {}", record.level().as_str().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(log::LevelFilter::Warn);
    }
    let cli = Cli::parse();
    let ctx = commands::Ctx {
        tol: cli.tol,
        json: cli.json,
    };
    let result = match &cli.command {
        Command::Analyze { system } => commands::analyze(system, &ctx),
        Command::Lump {
            system,
            m_file,
            eigvecs,
            mix,
            out,
        } => commands::lump(
            &commands::LumpArgs {
                system,
                m_file: m_file.as_deref(),
                eigvecs: eigvecs.clone(),
                mix: mix.clone(),
                out: out.as_deref(),
            },
            &ctx,
        ),
        Command::Mmatrix { system, s } => commands::mmatrix(system, *s, &ctx),
        Command::GenChain {
            n,
            k,
            out,
            network_out,
        } => commands::gen_chain_cmd(*n, *k, out.as_deref(), network_out.as_deref(), &ctx),
        Command::Simulate {
            system,
            x0,
            t,
            dt,
            u_file,
            out_csv,
        } => commands::simulate_cmd(
            &commands::SimulateArgs {
                system,
                x0: x0.clone(),
                t: *t,
                dt: *dt,
                u_file: u_file.as_deref(),
                out_csv: out_csv.as_deref(),
            },
            &ctx,
        ),
        Command::Steer {
            system,
            x0,
            x1,
            t1,
            steps,
            out,
        } => commands::steer_cmd(
            &commands::SteerArgs {
                system,
                x0: x0.clone(),
                x1: x1.clone(),
                t1: *t1,
                steps: *steps,
                out: out.as_deref(),
            },
            &ctx,
        ),
        Command::Verify { system, m_file } => commands::verify(system, m_file, &ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
