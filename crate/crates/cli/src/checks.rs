use anyhow::bail;
use clap::{Args, ValueEnum};
use hashbound::combiner::default_epsilon;
use hashbound::partition::{compute_mi, EngineOptions, MSelector, PartitionKind, PartitionSpec};
use hashbound::presets::partition_preset;
use hashbound::psi::NAIVE_CAP;
use hashbound::verify::{
    check_fast_against_naive, check_lemma_inequalities, sample_subdomain, LemmaCheck,
};

use crate::output::{Cell, ColKind, OutputArgs, Table};
use crate::{parse_eps, with_budget, EngineArgs, EpsArg, Status};

/// Pairs `(b, j)` checked when none is given.
const DEFAULT_PAIRS: [(usize, usize); 3] = [(6, 4), (7, 5), (6, 3)];

/// Shift added to the fast evaluator by `--inject-fault`.
const FAULT: f64 = 1e-6;

/// Certification step used for the engine values that samples are compared
/// against.
const CERTIFY_STEP: f64 = 1e-3;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Alphabet size (needs --j as well).
    #[arg(long, requires = "j")]
    pub b: Option<usize>,
    #[arg(long, requires = "b")]
    pub j: Option<usize>,
    /// Random instances per evaluator and inequality suite.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    /// Samples per subdomain in the sampling suite.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturb the fast evaluator to confirm the suite notices.
    #[arg(long)]
    pub inject_fault: bool,
    /// Give up (exit 3) after this many seconds.
    #[arg(long)]
    pub budget_secs: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn status(ok: bool) -> Cell {
    Cell::text(if ok { "PASS" } else { "FAIL" })
}

fn sci(x: f64) -> Cell {
    Cell::text(format!("{x:.3e}"))
}

fn verify_table(
    pairs: &[(usize, usize)],
    count: usize,
    samples: usize,
    seed: u64,
    fault: f64,
) -> anyhow::Result<(Table, bool)> {
    let mut t = Table::new(
        "verify",
        &[
            ("suite", ColKind::Plain),
            ("b", ColKind::Plain),
            ("j", ColKind::Plain),
            ("detail", ColKind::Plain),
            ("samples", ColKind::Plain),
            ("violations", ColKind::Plain),
            ("worst", ColKind::Plain),
            ("status", ColKind::Plain),
        ],
    );
    let mut all_ok = true;
    let engine = EngineOptions {
        certify: Some(CERTIFY_STEP),
        ..EngineOptions::default()
    };
    for &(b, j) in pairs {
        let head = |suite: &str, detail: String| {
            vec![
                Cell::text(suite),
                Cell::Int(b as i64),
                Cell::Int(j as i64),
                Cell::text(detail),
            ]
        };
        if b <= NAIVE_CAP {
            let r = check_fast_against_naive(b, j, count, seed, fault)?;
            all_ok &= r.passed();
            let mut row = head("evaluator", "fast vs tuple enumeration".into());
            row.extend([
                Cell::Int(r.count as i64),
                Cell::Int(r.violations as i64),
                sci(r.worst_diff),
                status(r.passed()),
            ]);
            t.push(row);
        } else {
            let mut row = head("evaluator", format!("skipped, b > {NAIVE_CAP}"));
            row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::text("SKIP")]);
            t.push(row);
        }
        for which in LemmaCheck::ALL {
            let r = check_lemma_inequalities(which, b, j, count, seed)?;
            all_ok &= r.passed();
            let mut row = head("inequality", which.name().into());
            row.extend([
                Cell::Int(r.count as i64),
                Cell::Int(r.violations as i64),
                sci(r.worst_gap),
                status(r.passed()),
            ]);
            t.push(row);
        }
        for kind in [PartitionKind::MaxValue, PartitionKind::MinValue] {
            let eps = default_epsilon(kind, b, j);
            let spec = PartitionSpec::new(kind, eps, b, j)?;
            for which in MSelector::ALL {
                let m = compute_mi(spec, which, b, j, &engine)?;
                let r = sample_subdomain(spec, which, b, j, samples, seed)?.with_engine(&m);
                let ok = r.dominated() == Some(true);
                all_ok &= ok;
                let mut row = head(
                    "sampling",
                    format!("{} eps={eps:.6} {which:?}", kind.name()),
                );
                row.extend([
                    Cell::Int(r.accepted as i64),
                    Cell::Int(i64::from(!ok)),
                    sci(r.best_value - m.certified_value()),
                    Cell::text(match (ok, r.inconclusive) {
                        (false, _) => "FAIL",
                        (true, true) => "PASS (few accepted)",
                        (true, false) => "PASS",
                    }),
                ]);
                t.push(row);
            }
        }
    }
    t.notes.push(format!(
        "sampling rows: samples = accepted draws, worst = best sampled value minus the certified optimizer value; seed {seed}"
    ));
    if fault != 0.0 {
        t.notes.push(format!("fault injected: fast evaluator shifted by {fault:e}"));
    }
    Ok((t, all_ok))
}

pub fn run_verify(args: VerifyArgs) -> anyhow::Result<Status> {
    let pairs: Vec<(usize, usize)> = match (args.b, args.j) {
        (Some(b), Some(j)) => vec![(b, j)],
        _ => DEFAULT_PAIRS.to_vec(),
    };
    if args.count == 0 || args.samples == 0 {
        bail!("--count and --samples must be positive");
    }
    let fault = if args.inject_fault { FAULT } else { 0.0 };
    let (count, samples, seed) = (args.count, args.samples, args.seed);
    let (table, ok) = with_budget(args.budget_secs, move || {
        verify_table(&pairs, count, samples, seed, fault)
    })?;
    args.output.emit(&table.render(args.output.format)?)?;
    Ok(if ok { Status::Success } else { Status::VerificationFailed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Max,
    Min,
}

impl KindArg {
    pub fn kind(self) -> PartitionKind {
        match self {
            KindArg::Max => PartitionKind::MaxValue,
            KindArg::Min => PartitionKind::MinValue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    M1,
    M2,
    M3,
    M4,
    All,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub b: usize,
    /// Code length parameter; sets j = k - 2 unless --j is given.
    #[arg(long, required_unless_present = "j")]
    pub k: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum, default_value_t = KindArg::Max)]
    pub partition: KindArg,
    /// Threshold: a number, a fraction, or `paper` (needs --k).
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
    #[arg(long, value_enum, default_value_t = WhichArg::All)]
    pub which: WhichArg,
    /// Pairs drawn per subdomain.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn sample_table(args: &SampleArgs, opts: &EngineOptions) -> anyhow::Result<(Table, bool)> {
    let b = args.b;
    let mut kind = args.partition.kind();
    let (j, eps) = match args.eps {
        Some(EpsArg::Paper) => {
            let Some(k) = args.k else {
                bail!("--eps paper needs --k");
            };
            let Some(p) = partition_preset(b, k) else {
                bail!("no published parameters for ({b},{k})");
            };
            kind = p.kind;
            (p.j, p.epsilon())
        }
        e => {
            let j = match (args.j, args.k) {
                (Some(j), _) => j,
                (None, Some(k)) if k >= 2 => k - 2,
                _ => bail!("need --j or --k"),
            };
            let eps = match e {
                Some(EpsArg::Value(v)) => v,
                _ => default_epsilon(kind, b, j),
            };
            (j, eps)
        }
    };
    let spec = PartitionSpec::new(kind, eps, b, j)?;
    let selectors: Vec<MSelector> = match args.which {
        WhichArg::M1 => vec![MSelector::M1],
        WhichArg::M2 => vec![MSelector::M2],
        WhichArg::M3 => vec![MSelector::M3],
        WhichArg::M4 => vec![MSelector::M4],
        WhichArg::All => MSelector::ALL.to_vec(),
    };
    let mut t = Table::new(
        format!("sample-mi b={b} j={j} {} eps={eps}", kind.name()),
        &[
            ("which", ColKind::Plain),
            ("drawn", ColKind::Plain),
            ("accepted", ColKind::Plain),
            ("sampled_max", ColKind::Plain),
            ("optimizer", ColKind::Plain),
            ("certified_excess", ColKind::Plain),
            ("status", ColKind::Plain),
        ],
    );
    let mut ok_all = true;
    for which in selectors {
        let m = compute_mi(spec, which, b, j, opts)?;
        let r = sample_subdomain(spec, which, b, j, args.samples, args.seed)?.with_engine(&m);
        let ok = r.dominated() == Some(true);
        ok_all &= ok;
        t.push(vec![
            Cell::text(format!("{which:?}")),
            Cell::Int(r.count as i64),
            Cell::Int(r.accepted as i64),
            Cell::text(format!("{:.9e}", r.best_value)),
            Cell::text(format!("{:.9e}", m.value)),
            Cell::text(format!("{:.3e}", m.certified_excess)),
            Cell::text(match (ok, r.inconclusive) {
                (false, _) => "VIOLATION",
                (true, true) => "inconclusive",
                (true, false) => "dominated",
            }),
        ]);
    }
    Ok((t, ok_all))
}

pub fn run_sample(args: SampleArgs) -> anyhow::Result<Status> {
    let opts = args.engine.options()?;
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let budget = args.engine.budget_secs;
    let output = args.output.clone();
    let (table, ok) = with_budget(budget, move || sample_table(&args, &opts))?;
    output.emit(&table.render(output.format)?)?;
    Ok(if ok { Status::Success } else { Status::VerificationFailed })
}
