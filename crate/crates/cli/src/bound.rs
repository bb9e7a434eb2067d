use anyhow::bail;
use clap::{Args, ValueEnum};
use hashbound::combiner::{
    auto_bound, default_epsilon, full_bound, global_only_bound, BoundPath, BoundReport,
};
use hashbound::partition::PartitionSpec;
use hashbound::presets::{is_shortcut_pair, partition_preset};

use crate::output::{envelope, Cell, ColKind, Format, OutputArgs, Table};
use crate::{parse_eps, with_budget, EngineArgs, EpsArg, PartitionArg, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// Published order, partition and threshold for this (b, k).
    Paper,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub k: usize,
    /// Order of the quadratic form (default k - 2).
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum, default_value_t = PartitionArg::Auto)]
    pub partition: PartitionArg,
    /// Partition threshold: a number, a fraction, or `paper`.
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
    /// Same as `--eps paper`.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn compute(args: &BoundArgs) -> anyhow::Result<BoundReport> {
    let (b, k) = (args.b, args.k);
    let opts = args.engine.options()?;
    let paper = args.preset.is_some() || args.eps == Some(EpsArg::Paper);
    if paper {
        if let Some(p) = partition_preset(b, k) {
            if args.j.is_some_and(|j| j != p.j) {
                bail!("published parameters for ({b},{k}) use j = {}", p.j);
            }
            if args.partition.kind().is_some_and(|kind| kind != p.kind) {
                bail!(
                    "published parameters for ({b},{k}) use the {} partition",
                    p.kind.name()
                );
            }
            let spec = PartitionSpec::new(p.kind, p.epsilon(), b, p.j)?;
            let mut r = full_bound(b, k, p.j, spec, &opts)?;
            r.epsilon_label = Some(p.eps_label.to_string());
            return Ok(r);
        }
        if is_shortcut_pair(b, k) {
            return Ok(global_only_bound(b, k, &opts)?);
        }
        bail!("no published parameters for ({b},{k}); pass --partition and --eps instead");
    }
    if k < 4 {
        bail!("need k >= 4, got k={k}");
    }
    let j = args.j.unwrap_or(k - 2);
    let eps = match args.eps {
        Some(EpsArg::Value(e)) => Some(e),
        _ => None,
    };
    let mut r = match args.partition.kind() {
        Some(kind) => {
            let e = eps.unwrap_or_else(|| default_epsilon(kind, b, j));
            let spec = PartitionSpec::new(kind, e, b, j)?;
            full_bound(b, k, j, spec, &opts)?
        }
        None => auto_bound(b, k, j, eps, &opts)?,
    };
    r.epsilon_label = r
        .partition
        .as_ref()
        .map(|p| format!("{}", p.spec.epsilon));
    Ok(r)
}

fn path_name(r: &BoundReport) -> String {
    match r.path {
        BoundPath::Partition => {
            let kind = r.partition.as_ref().map_or("?", |p| p.spec.kind.name());
            format!("partition ({kind})")
        }
        BoundPath::UniformShortcut => "uniform global maximum".into(),
        BoundPath::GlobalMaximum => "global maximum".into(),
    }
}

fn text(r: &BoundReport) -> String {
    let mut s = format!("(b, k) = ({}, {})\n", r.b, r.k);
    s += &format!(
        "rate bound  {}  [{}, j = {}]\n",
        hashbound::rounding::round_up_str(r.rate, 5),
        path_name(r),
        r.j
    );
    s += &format!("  raw       {:?}\n", r.rate);
    s += &format!("  M         {:?}\n", r.m);
    if let Some(p) = &r.partition {
        s += &format!(
            "partition   {} with eps = {} (j = {}): M = {:.7}, rate {:.7}\n",
            p.spec.kind.name(),
            r.epsilon_label.as_deref().unwrap_or("?"),
            p.j,
            p.combined.m,
            p.rate
        );
        for sd in &p.subdomains {
            s += &format!(
                "  {:?} = {:.9e}{}  via {} (l1 = {}, l2 = {})\n",
                sd.which,
                sd.certified_value(),
                if sd.upper_bound_only { " (upper bound)" } else { "" },
                sd.argmax.family_tag,
                sd.argmax.l1,
                sd.argmax.l2
            );
        }
        s += &format!(
            "  weights   eta0 = {:.6}{}\n",
            p.combined.eta.eta0,
            if p.combined.fallback {
                ", remaining weight on one part"
            } else {
                ", remaining weight spread evenly"
            }
        );
    }
    if let Some(g) = &r.global {
        s += &format!(
            "global      j = {}: uniform {:.9}, optimizer {:.9}, rate {:.7}\n",
            g.j, g.uniform_value, g.engine_value, g.rate
        );
    }
    let c = &r.classical;
    s += &format!(
        "classical   fredman-komlos {:.5}, korner-marton {:.5} (j = {}), dvj {:.5}\n",
        c.fredman_komlos, c.korner_marton, c.korner_marton_j, c.dvj
    );
    s += &format!(
        "conjecture  {:.5} (j = {}), not a proven bound\n",
        c.conjectured, c.conjectured_j
    );
    if r.certified {
        s += "certified   optimizer error bounds included\n";
    }
    s
}

fn csv(r: &BoundReport) -> anyhow::Result<String> {
    let mut t = Table::new(
        "bound",
        &[
            ("b", ColKind::Plain),
            ("k", ColKind::Plain),
            ("j", ColKind::Plain),
            ("path", ColKind::Plain),
            ("eps", ColKind::Plain),
            ("bound", ColKind::Rounded),
            ("m", ColKind::Rounded),
            ("fredman_komlos", ColKind::Rounded),
            ("korner_marton", ColKind::Rounded),
            ("dvj", ColKind::Rounded),
            ("certified", ColKind::Plain),
        ],
    );
    t.push(vec![
        Cell::Int(r.b as i64),
        Cell::Int(r.k as i64),
        Cell::Int(r.j as i64),
        Cell::text(path_name(r)),
        r.epsilon_label.clone().map_or(Cell::Missing, Cell::Text),
        Cell::up(r.rate, 5),
        Cell::up(r.m, 7),
        Cell::up(r.classical.fredman_komlos, 5),
        Cell::up(r.classical.korner_marton, 5),
        Cell::up(r.classical.dvj, 5),
        Cell::text(r.certified.to_string()),
    ]);
    t.to_csv()
}

pub fn run(args: BoundArgs) -> anyhow::Result<Status> {
    let budget = args.engine.budget_secs;
    let output = args.output.clone();
    let report = with_budget(budget, move || compute(&args))?;
    let rendered = match output.format {
        Format::Text => text(&report),
        Format::Csv => csv(&report)?,
        Format::Json => envelope("report", &report)?,
    };
    output.emit(&rendered)?;
    Ok(Status::Success)
}
