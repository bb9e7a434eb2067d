mod bound;
mod checks;
mod misc;
mod output;
mod tables;

use std::fmt;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hashbound::partition::{EngineOptions, MaximizeOptions, PartitionKind};
use hashbound::presets::parse_epsilon;

#[derive(Parser)]
#[command(
    name = "hashbound",
    version,
    about = "Upper bounds on the rate of (b, k)-hash codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate bound for one (b, k).
    Bound(bound::BoundArgs),
    /// Reproduce a table of published values next to computed ones.
    Table(tables::TableArgs),
    /// Run the randomized consistency suites.
    Verify(checks::VerifyArgs),
    /// Scan the partition threshold.
    SweepEps(misc::SweepArgs),
    /// Closed-form comparison bounds.
    Classical(misc::ClassicalArgs),
    /// Exhaustive search for hash codes, or check a code file.
    SearchCode(misc::SearchArgs),
    /// Sample the subdomains and compare against the optimizer.
    SampleMi(checks::SampleArgs),
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 1,
    VerificationFailed = 2,
    BudgetExceeded = 3,
}

#[derive(Debug)]
pub struct BudgetExceeded(pub u64);

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "time budget of {} s exceeded", self.0)
    }
}

impl std::error::Error for BudgetExceeded {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionArg {
    Max,
    Min,
    Auto,
}

impl PartitionArg {
    pub fn kind(self) -> Option<PartitionKind> {
        match self {
            PartitionArg::Max => Some(PartitionKind::MaxValue),
            PartitionArg::Min => Some(PartitionKind::MinValue),
            PartitionArg::Auto => None,
        }
    }
}

/// `--eps`: a number, a fraction like `1/20`, or `paper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsArg {
    Paper,
    Value(f64),
}

pub fn parse_eps(s: &str) -> Result<EpsArg, String> {
    if s.eq_ignore_ascii_case("paper") {
        return Ok(EpsArg::Paper);
    }
    parse_epsilon(s)
        .map(EpsArg::Value)
        .ok_or_else(|| format!("expected a number, a fraction or `paper`, got `{s}`"))
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    parse_epsilon(s).ok_or_else(|| format!("expected a number or a fraction, got `{s}`"))
}

#[derive(Args, Clone, Debug)]
pub struct EngineArgs {
    /// Grid points per free variable (three-variable shapes use 2/5 of it).
    #[arg(long)]
    grid: Option<usize>,
    /// Add a certified bound on the optimizer's error to every maximum.
    #[arg(long)]
    certify: bool,
    /// Cell width at which certification stops refining.
    #[arg(long, default_value_t = 1e-3)]
    certify_step: f64,
    /// Give up (exit 3) after this many seconds.
    #[arg(long)]
    budget_secs: Option<u64>,
}

impl EngineArgs {
    pub fn options(&self) -> anyhow::Result<EngineOptions> {
        let mut opts = EngineOptions::default();
        if let Some(g) = self.grid {
            if g < 2 {
                bail!("--grid must be at least 2");
            }
            opts.maximize = MaximizeOptions {
                grid: g,
                grid_3d: (g * 2 / 5).max(8),
                ..opts.maximize
            };
        }
        if self.certify {
            if !(self.certify_step > 0.0 && self.certify_step < 1.0) {
                bail!("--certify-step must lie in (0, 1)");
            }
            opts.certify = Some(self.certify_step);
        }
        Ok(opts)
    }
}

/// Runs `f` on a worker thread and fails with [`BudgetExceeded`] if it does
/// not finish in time. The worker is abandoned, which is fine for a process
/// that is about to exit.
pub fn with_budget<T, F>(secs: Option<u64>, f: F) -> anyhow::Result<T>
where
    T: Send + 'static,
    F: FnOnce() -> anyhow::Result<T> + Send + 'static,
{
    let Some(secs) = secs else {
        return f();
    };
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(f());
    });
    match rx.recv_timeout(Duration::from_secs(secs)) {
        Ok(r) => r,
        Err(_) => Err(BudgetExceeded(secs).into()),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("HASHBOUND_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("HASHBOUND_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            bail!("HASHBOUND_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    configure_threads()?;
    match cli.command {
        Command::Bound(a) => bound::run(a),
        Command::Table(a) => tables::run(a),
        Command::Verify(a) => checks::run_verify(a),
        Command::SweepEps(a) => misc::run_sweep(a),
        Command::Classical(a) => misc::run_classical(a),
        Command::SearchCode(a) => misc::run_search(a),
        Command::SampleMi(a) => checks::run_sample(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(Status::Usage as u8),
            };
        }
    };
    let status = match run(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<BudgetExceeded>().is_some() {
                Status::BudgetExceeded
            } else {
                Status::Usage
            }
        }
    };
    ExitCode::from(status as u8)
}
