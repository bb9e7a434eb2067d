use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use hashbound::classical::{
    balanced_fixed_point, conjectured_bound, dvj_bound, fredman_komlos, korner_marton,
    plotkin_combined_k4, plotkin_printed_formula, ProblemParams, TabulatedF,
};
use hashbound::combiner::{partition_bound, shortcut_bound};
use hashbound::partition::{EngineOptions, PartitionSpec};
use hashbound::presets::partition_preset;
use hashbound::verify::{is_bk_hash, max_code_exhaustive, Code, CodeSearch, SearchOrder};
use serde::{Deserialize, Serialize};

use crate::checks::KindArg;
use crate::output::{envelope, Cell, ColKind, Format, OutputArgs, Table};
use crate::{parse_real, with_budget, EngineArgs, Status};

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub k: usize,
    /// Order of the quadratic form (default k - 2).
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum, default_value_t = KindArg::Max)]
    pub partition: KindArg,
    #[arg(long, value_parser = parse_real)]
    pub eps_min: f64,
    #[arg(long, value_parser = parse_real)]
    pub eps_max: f64,
    /// Number of intervals; thresholds are evaluated at both ends of each.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub m: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub b: usize,
    pub k: usize,
    pub j: usize,
    pub partition: String,
    pub points: Vec<SweepPoint>,
    pub best_eps: f64,
    pub best_rate: f64,
    /// Rate at the published parameters, when they use this partition and j.
    pub preset_rate: Option<f64>,
    pub beats_preset: Option<bool>,
}

pub fn sweep(args: &SweepArgs, opts: &EngineOptions) -> anyhow::Result<SweepReport> {
    let (b, k) = (args.b, args.k);
    if k < 4 {
        bail!("need k >= 4, got k={k}");
    }
    let j = args.j.unwrap_or(k - 2);
    let kind = args.partition.kind();
    let (lo, hi) = (args.eps_min, args.eps_max);
    if args.steps == 0 || !(lo <= hi) {
        bail!("empty threshold range [{lo}, {hi}] with {} steps", args.steps);
    }
    PartitionSpec::new(kind, lo, b, j)?;
    PartitionSpec::new(kind, hi, b, j)?;
    let n = args.steps;
    let mut points = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let eps = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
        let out = partition_bound(b, k, j, PartitionSpec::new(kind, eps, b, j)?, opts)?;
        points.push(SweepPoint {
            eps,
            m: out.combined.m,
            rate: out.rate,
        });
    }
    let best = points
        .iter()
        .min_by(|a, c| a.rate.total_cmp(&c.rate))
        .expect("at least one point");
    let preset_rate = match partition_preset(b, k) {
        Some(p) if p.kind == kind && p.j == j => {
            let spec = PartitionSpec::new(p.kind, p.epsilon(), b, j)?;
            Some(partition_bound(b, k, j, spec, opts)?.rate)
        }
        _ => None,
    };
    Ok(SweepReport {
        b,
        k,
        j,
        partition: kind.name().into(),
        best_eps: best.eps,
        best_rate: best.rate,
        beats_preset: preset_rate.map(|r| best.rate < r),
        preset_rate,
        points,
    })
}

fn sweep_table(r: &SweepReport) -> Table {
    let mut t = Table::new(
        format!("sweep-eps b={} k={} j={} {}", r.b, r.k, r.j, r.partition),
        &[
            ("eps", ColKind::Plain),
            ("m", ColKind::Rounded),
            ("rate", ColKind::Rounded),
        ],
    );
    for p in &r.points {
        t.push(vec![
            Cell::text(format!("{:.6}", p.eps)),
            Cell::up(p.m, 7),
            Cell::up(p.rate, 5),
        ]);
    }
    t.notes.push(format!(
        "best eps {:.6}: rate {:?}",
        r.best_eps, r.best_rate
    ));
    if let (Some(pr), Some(beats)) = (r.preset_rate, r.beats_preset) {
        t.notes.push(format!(
            "published parameters: rate {pr:?}; {}",
            if beats { "improved" } else { "not improved" }
        ));
    }
    t
}

pub fn run_sweep(args: SweepArgs) -> anyhow::Result<Status> {
    let opts = args.engine.options()?;
    let budget = args.engine.budget_secs;
    let output = args.output.clone();
    let report = with_budget(budget, move || sweep(&args, &opts))?;
    let rendered = match output.format {
        Format::Json => envelope("sweep", &report)?,
        f => sweep_table(&report).render(f)?,
    };
    output.emit(&rendered)?;
    Ok(Status::Success)
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub k: usize,
    /// Two-column `rate distance` table of a nonincreasing distance bound,
    /// used in the balanced-code inequality.
    #[arg(long)]
    pub f_table: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn classical_table(args: &ClassicalArgs) -> anyhow::Result<Table> {
    let (b, k) = (args.b, args.k);
    let p = ProblemParams::new(b, k)?;
    let mut t = Table::new(
        format!("classical b={b} k={k}"),
        &[
            ("quantity", ColKind::Plain),
            ("value", ColKind::Rounded),
            ("note", ColKind::Plain),
        ],
    );
    t.push(vec![
        Cell::text("fredman_komlos"),
        Cell::up(fredman_komlos(p), 5),
        Cell::Missing,
    ]);
    if k >= 4 {
        let (km, j) = korner_marton(p)?;
        t.push(vec![
            Cell::text("korner_marton"),
            Cell::up(km, 5),
            Cell::text(format!("minimized at j = {j}")),
        ]);
        t.push(vec![Cell::text("dvj"), Cell::up(dvj_bound(p)?, 5), Cell::Missing]);
        let c = conjectured_bound(p)?;
        t.push(vec![
            Cell::text("conjectured"),
            Cell::up(c.value, 5),
            Cell::text(format!("conjecture, not a proven bound; j = {}", c.argmin_j)),
        ]);
        t.push(vec![
            Cell::text("uniform_quadratic_form"),
            Cell::up(shortcut_bound(b, k)?, 5),
            Cell::text("valid only where the uniform pair maximizes the form"),
        ]);
    }
    if k == 4 {
        t.push(vec![
            Cell::text("plotkin_balanced"),
            Cell::up(plotkin_combined_k4(b)?, 5),
            Cell::text("balanced-code inequality with the Plotkin distance"),
        ]);
        t.push(vec![
            Cell::text("plotkin_printed_expression"),
            Cell::up(plotkin_printed_formula(b), 5),
            Cell::text("reference expression only, not a bound"),
        ]);
    }
    if let Some(path) = &args.f_table {
        let f = TabulatedF::from_file(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let r = balanced_fixed_point(b, k, |r| f.eval(r))?;
        t.push(vec![
            Cell::text("balanced_tabulated"),
            Cell::up(r, 5),
            Cell::text(format!("fixed point with {}", path.display())),
        ]);
    }
    Ok(t)
}

pub fn run_classical(args: ClassicalArgs) -> anyhow::Result<Status> {
    let t = classical_table(&args)?;
    args.output.emit(&t.render(args.output.format)?)?;
    Ok(Status::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Ascending,
    Descending,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub k: usize,
    /// Code length (not needed with --check).
    #[arg(long, required_unless_present = "check")]
    pub n: Option<usize>,
    /// Stop once a code of this size is found.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = OrderArg::Ascending)]
    pub order: OrderArg,
    /// Search nodes before giving up (exit 3, result is a lower bound).
    #[arg(long, default_value_t = 50_000_000)]
    pub max_nodes: u64,
    /// Check the code in this file (one word per line) instead of searching.
    #[arg(long)]
    pub check: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CheckOutcome {
    b: usize,
    k: usize,
    words: usize,
    holds: bool,
    witness: Option<Vec<Vec<usize>>>,
}

fn run_check(args: &SearchArgs, path: &PathBuf) -> anyhow::Result<Status> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let code = Code::parse(&text, args.b)?;
    let r = is_bk_hash(&code, args.k);
    let out = CheckOutcome {
        b: args.b,
        k: args.k,
        words: code.len(),
        holds: r.holds,
        witness: r
            .witness
            .map(|w| w.iter().map(|&i| code.words()[i].clone()).collect()),
    };
    let rendered = match args.output.format {
        Format::Json => envelope("check", &out)?,
        f => {
            let mut t = Table::new(
                format!("check b={} k={}", args.b, args.k),
                &[("words", ColKind::Plain), ("hash_code", ColKind::Plain), ("witness", ColKind::Plain)],
            );
            let witness = out.witness.as_ref().map_or(String::new(), |w| {
                w.iter()
                    .map(|x| x.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join(" | ")
            });
            t.push(vec![
                Cell::Int(out.words as i64),
                Cell::text(out.holds.to_string()),
                Cell::text(witness),
            ]);
            t.render(f)?
        }
    };
    args.output.emit(&rendered)?;
    Ok(if out.holds { Status::Success } else { Status::VerificationFailed })
}

fn search_text(r: &CodeSearch, args: &SearchArgs) -> String {
    let mut s = format!(
        "largest ({}, {})-hash code of length {}: {}{}\n",
        args.b,
        args.k,
        r.witness.n(),
        r.size,
        if r.complete { "" } else { " (lower bound, node budget spent)" }
    );
    s += &format!("search nodes: {}\n", r.nodes);
    s += &r.witness.to_text();
    s
}

pub fn run_search(args: SearchArgs) -> anyhow::Result<Status> {
    if let Some(path) = &args.check {
        return run_check(&args, path);
    }
    let n = args.n.expect("clap enforces --n");
    let order = match args.order {
        OrderArg::Ascending => SearchOrder::Ascending,
        OrderArg::Descending => SearchOrder::Descending,
    };
    let r = max_code_exhaustive(
        args.b,
        args.k,
        n,
        args.cap.unwrap_or(usize::MAX),
        order,
        args.max_nodes,
    )?;
    let rendered = match args.output.format {
        Format::Json => envelope("search", &r)?,
        Format::Text => search_text(&r, &args),
        Format::Csv => {
            let mut t = Table::new(
                "search-code",
                &[
                    ("b", ColKind::Plain),
                    ("k", ColKind::Plain),
                    ("n", ColKind::Plain),
                    ("size", ColKind::Plain),
                    ("complete", ColKind::Plain),
                    ("nodes", ColKind::Plain),
                ],
            );
            t.push(vec![
                Cell::Int(args.b as i64),
                Cell::Int(args.k as i64),
                Cell::Int(n as i64),
                Cell::Int(r.size as i64),
                Cell::text(r.complete.to_string()),
                Cell::Int(r.nodes as i64),
            ]);
            t.to_csv()?
        }
    };
    args.output.emit(&rendered)?;
    Ok(if r.complete || r.reached_cap {
        Status::Success
    } else {
        Status::BudgetExceeded
    })
}
