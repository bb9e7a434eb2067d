use clap::{Args, ValueEnum};
use hashbound::classical::{dvj_bound, korner_marton, ProblemParams};
use hashbound::combiner::{global_only_bound, partition_bound, shortcut_bound};
use hashbound::partition::{EngineOptions, PartitionSpec};
use hashbound::presets::{
    partition_preset, significant_digits, PartitionPreset, COMBINED_M, LITERATURE_TAG,
    MAIN_TABLE, MAX_PARTITION_MI, MIN_PARTITION_MI, NEAR_DIAGONAL_TABLE, PARTITION_PRESETS,
    SMALL_K_TABLE,
};
use hashbound::rounding::{round_up_sig_str, round_up_str};
use rayon::prelude::*;

use crate::output::{Cell, ColKind, OutputArgs, Table};
use crate::{with_budget, EngineArgs, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TablePreset {
    /// Main comparison table for 5 <= k <= b <= 15.
    Table1,
    /// k = 4 and large alphabets.
    Table2,
    /// Near-diagonal pairs in scientific notation.
    Table3,
    /// Combined constants M for the partition pairs.
    Msvalues,
    /// The four subdomain maxima for every partition pair.
    MiTables,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub preset: TablePreset,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

use ColKind::{Plain, Rounded};

fn lit_note() -> String {
    format!("columns ending in _lit are static ({LITERATURE_TAG}); everything else is computed")
}

fn pp(b: usize, k: usize) -> ProblemParams {
    ProblemParams::new(b, k).expect("table pairs are valid")
}

fn yes_no(ok: bool) -> Cell {
    Cell::text(if ok { "yes" } else { "no" })
}

fn preset_outcome(
    p: &PartitionPreset,
    opts: &EngineOptions,
) -> anyhow::Result<hashbound::combiner::PartitionOutcome> {
    let spec = PartitionSpec::new(p.kind, p.epsilon(), p.b, p.j)?;
    Ok(partition_bound(p.b, p.k, p.j, spec, opts)?)
}

fn table1(opts: &EngineOptions) -> anyhow::Result<Table> {
    let mut t = Table::new(
        "table1",
        &[
            ("b", Plain),
            ("k", Plain),
            ("path", Plain),
            ("bound", Rounded),
            ("printed", Plain),
            ("match", Plain),
            ("korner_marton", Rounded),
            ("korner_marton_lit", Plain),
            ("arikan_lit", Plain),
            ("guruswami_riazanov_lit", Plain),
        ],
    );
    let rows: Vec<anyhow::Result<Vec<Cell>>> = MAIN_TABLE
        .par_iter()
        .map(|r| {
            let (path, rate) = match partition_preset(r.b, r.k) {
                Some(p) => {
                    let o = preset_outcome(&p, opts)?;
                    (format!("partition-{}", p.kind.name()), o.rate)
                }
                None => ("uniform".to_string(), shortcut_bound(r.b, r.k)?),
            };
            let (km, _) = korner_marton(pp(r.b, r.k))?;
            Ok(vec![
                Cell::Int(r.b as i64),
                Cell::Int(r.k as i64),
                Cell::text(path),
                Cell::up(rate, 5),
                Cell::text(r.ours),
                yes_no(round_up_str(rate, 5) == r.ours),
                Cell::up(km, 5),
                Cell::text(r.korner_marton),
                Cell::text(r.arikan),
                Cell::text(r.guruswami_riazanov),
            ])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    t.notes.push(lit_note());
    Ok(t)
}

fn table2(opts: &EngineOptions) -> anyhow::Result<Table> {
    let mut t = Table::new(
        "table2",
        &[
            ("b", Plain),
            ("k", Plain),
            ("dvj", Rounded),
            ("dvj_printed", Plain),
            ("global", Rounded),
            ("global_printed", Plain),
            ("korner_marton", Rounded),
            ("korner_marton_lit", Plain),
            ("arikan_lit", Plain),
            ("guruswami_riazanov_lit", Plain),
        ],
    );
    let rows: Vec<anyhow::Result<Vec<Cell>>> = SMALL_K_TABLE
        .par_iter()
        .map(|r| {
            let dvj = dvj_bound(pp(r.b, r.k))?;
            let global = match r.global_psi_max {
                Some(_) => Some(global_only_bound(r.b, r.k, opts)?.rate),
                None => None,
            };
            let (km, _) = korner_marton(pp(r.b, r.k))?;
            Ok(vec![
                Cell::Int(r.b as i64),
                Cell::Int(r.k as i64),
                Cell::up(dvj, 5),
                Cell::text(r.dvj),
                Cell::opt(global, 5),
                r.global_psi_max.map_or(Cell::Missing, Cell::text),
                Cell::up(km, 5),
                Cell::text(r.korner_marton),
                Cell::text(r.arikan),
                Cell::text(r.guruswami_riazanov),
            ])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    t.notes.push(lit_note());
    Ok(t)
}

fn table3(opts: &EngineOptions) -> anyhow::Result<Table> {
    let mut t = Table::new(
        "table3",
        &[
            ("b", Plain),
            ("k", Plain),
            ("korner_marton", Rounded),
            ("korner_marton_printed", Plain),
            ("global", Rounded),
            ("global_printed", Plain),
            ("guruswami_riazanov_lit", Plain),
            ("arikan_lit", Plain),
        ],
    );
    let rows: Vec<anyhow::Result<Vec<Cell>>> = NEAR_DIAGONAL_TABLE
        .par_iter()
        .map(|r| {
            let (km, _) = korner_marton(pp(r.b, r.k))?;
            let global = global_only_bound(r.b, r.k, opts)?.rate;
            Ok(vec![
                Cell::Int(r.b as i64),
                Cell::Int(r.k as i64),
                Cell::Num {
                    shown: round_up_sig_str(km, significant_digits(r.korner_marton)),
                    raw: km,
                },
                Cell::text(r.korner_marton),
                Cell::up(global, 5),
                Cell::text(r.global_psi_max),
                Cell::text(r.guruswami_riazanov),
                Cell::text(r.arikan),
            ])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    t.notes.push(lit_note());
    Ok(t)
}

fn msvalues(opts: &EngineOptions) -> anyhow::Result<Table> {
    let mut t = Table::new(
        "msvalues",
        &[
            ("b", Plain),
            ("k", Plain),
            ("partition", Plain),
            ("j", Plain),
            ("eps", Plain),
            ("m", Rounded),
            ("m_printed", Plain),
            ("rate", Rounded),
            ("weights", Plain),
        ],
    );
    let rows: Vec<anyhow::Result<Vec<Cell>>> = COMBINED_M
        .par_iter()
        .map(|&(b, k, printed)| {
            let p = partition_preset(b, k).expect("every constant has a preset");
            let o = preset_outcome(&p, opts)?;
            Ok(vec![
                Cell::Int(b as i64),
                Cell::Int(k as i64),
                Cell::text(p.kind.name()),
                Cell::Int(p.j as i64),
                Cell::text(p.eps_label),
                Cell::up(o.combined.m, 7),
                Cell::text(printed),
                Cell::up(o.rate, 5),
                Cell::text(if o.combined.fallback { "concentrated" } else { "spread" }),
            ])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn mi_tables(opts: &EngineOptions) -> anyhow::Result<Table> {
    let mut t = Table::new(
        "mi-tables",
        &[
            ("b", Plain),
            ("k", Plain),
            ("partition", Plain),
            ("eps", Plain),
            ("m1", Rounded),
            ("m2", Rounded),
            ("m3", Rounded),
            ("m4", Rounded),
            ("m1_printed", Plain),
            ("m2_printed", Plain),
            ("m3_printed", Plain),
            ("m4_printed", Plain),
        ],
    );
    let all: Vec<_> = MAX_PARTITION_MI.iter().chain(MIN_PARTITION_MI.iter()).collect();
    let rows: Vec<anyhow::Result<Vec<Cell>>> = all
        .par_iter()
        .map(|r| {
            let p = PARTITION_PRESETS
                .iter()
                .find(|p| p.b == r.b && p.k == r.k)
                .expect("every row has a preset");
            let o = preset_outcome(p, opts)?;
            let mut row = vec![
                Cell::Int(r.b as i64),
                Cell::Int(r.k as i64),
                Cell::text(p.kind.name()),
                Cell::text(p.eps_label),
            ];
            row.extend(o.mi.as_array().iter().map(|&m| Cell::up_or_sci(m, 6)));
            row.extend(r.m.iter().map(|&s| Cell::text(s)));
            Ok(row)
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    t.notes
        .push("values below 1e-6 are rounded upward to two significant digits".into());
    Ok(t)
}

pub fn build(preset: TablePreset, opts: &EngineOptions) -> anyhow::Result<Table> {
    match preset {
        TablePreset::Table1 => table1(opts),
        TablePreset::Table2 => table2(opts),
        TablePreset::Table3 => table3(opts),
        TablePreset::Msvalues => msvalues(opts),
        TablePreset::MiTables => mi_tables(opts),
    }
}

pub fn run(args: TableArgs) -> anyhow::Result<Status> {
    let opts = args.engine.options()?;
    let preset = args.preset;
    let table = with_budget(args.engine.budget_secs, move || build(preset, &opts))?;
    args.output.emit(&table.render(args.output.format)?)?;
    Ok(Status::Success)
}
