//! Finite candidate families for the subdomain maxima.
//!
//! Each family is a block shape with integer block sizes `l1`, `l2` and at
//! most three continuous unknowns after eliminating the sum constraints.
//! The admissible `(l1, l2)` are filtered by a zero-count rule: the number
//! of zero entries of a vector is either `b - 1` (or `b - 2`) or at most
//! `b - j`. Whether fixed single coordinates count toward that number is
//! not pinned down, so both readings are enumerated and a shape passes if
//! either reading admits it.

use super::config::{Block, Configuration, Entry, VarBox};
use super::{MSelector, PartitionKind, PartitionSpec};

/// How `(l1, l2)` pairs are filtered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Enumeration {
    /// Zero-count rule applied, union of both readings.
    #[default]
    Restricted,
    /// Every nonnegative block size.
    Unrestricted,
}

#[derive(Debug, Clone, Copy)]
enum ZeroRule {
    None,
    /// `b - top` zeros, or at most `b - j`, in both vectors.
    Both { top: usize },
    /// Same, but only on `p`.
    POnly { top: usize },
}

impl ZeroRule {
    fn admits(self, cfg: &Configuration, b: usize, j: usize) -> bool {
        let ok = |z: usize, top: usize| z == b - top || z + j <= b;
        [true, false].iter().any(|&all| {
            let (zp, zq) = cfg.zero_counts(all);
            match self {
                ZeroRule::None => true,
                ZeroRule::Both { top } => ok(zp, top) && ok(zq, top),
                ZeroRule::POnly { top } => ok(zp, top),
            }
        })
    }
}

struct Shape {
    cfg: Configuration,
}

impl Shape {
    fn new(tag: &str, l1: usize, l2: usize) -> Self {
        Self {
            cfg: Configuration {
                family_tag: tag.to_string(),
                l1,
                l2,
                discrete_choices: Vec::new(),
                blocks: Vec::new(),
                vars: Vec::new(),
            },
        }
    }

    fn var(&mut self, name: &str, lo: f64, hi: f64) -> Entry {
        self.cfg.vars.push(VarBox {
            name: name.to_string(),
            lo,
            hi,
        });
        Entry::Var(self.cfg.vars.len() - 1)
    }

    fn choice(mut self, name: &str, v: f64) -> Self {
        self.cfg.discrete_choices.push((name.to_string(), v));
        self
    }

    /// A block sized by `l1`, `l2` or the remainder.
    fn sized(&mut self, mult: usize, p: Entry, q: Entry) {
        self.cfg.blocks.push(Block {
            mult,
            p,
            q,
            sized: true,
        });
    }

    /// A single fixed coordinate (or another block not sized by `l`).
    fn fixed(&mut self, mult: usize, p: Entry, q: Entry) {
        self.cfg.blocks.push(Block {
            mult,
            p,
            q,
            sized: false,
        });
    }
}

fn c(v: f64) -> Entry {
    Entry::Const(v)
}

/// All `(l1, l2)` with `l1 + l2 ≤ n`.
fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |l1| (0..=n - l1).map(move |l2| (l1, l2)))
}

/// Candidate configurations for one subdomain maximum.
pub fn enumerate_candidates(
    spec: PartitionSpec,
    which: MSelector,
    b: usize,
    j: usize,
    mode: Enumeration,
) -> Vec<Configuration> {
    let e = spec.epsilon;
    let mut out: Vec<(Configuration, ZeroRule)> = Vec::new();
    match (spec.kind, which) {
        (PartitionKind::MaxValue, MSelector::M1) => max_m1(b, e, &mut out),
        (PartitionKind::MaxValue, MSelector::M2) | (PartitionKind::MinValue, MSelector::M4) => {
            global(b, &mut out)
        }
        (PartitionKind::MaxValue, MSelector::M3) => max_m3(b, e, &mut out),
        (PartitionKind::MaxValue, MSelector::M4) => max_m4(b, e, &mut out),
        (PartitionKind::MinValue, MSelector::M1) => min_m1(b, e, &mut out),
        (PartitionKind::MinValue, MSelector::M2) => min_m2(b, e, &mut out),
        (PartitionKind::MinValue, MSelector::M3) => min_m3(b, e, &mut out),
    }
    out.into_iter()
        .filter(|(cfg, rule)| mode == Enumeration::Unrestricted || rule.admits(cfg, b, j))
        .map(|(cfg, _)| cfg)
        .collect()
}

fn max_m1(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    let rule = ZeroRule::Both { top: 2 };
    let top = 1.0 - e;
    // Both vectors carry a coordinate at 1-ε, on different positions.
    for (l1, l2) in pairs(b - 2) {
        let mut s = Shape::new("max-m1-a", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, top), s.var("beta", 0.0, top));
        let (d, h) = (s.var("delta", 0.0, top), s.var("eta", 0.0, top));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, c(0.0));
        s.sized(b - l1 - l2 - 2, be, h);
        s.fixed(1, c(0.0), c(top));
        s.fixed(1, c(top), c(0.0));
        out.push((s.cfg, rule));
    }
    // Only q carries the 1-ε coordinate.
    for (l1, l2) in pairs(b - 1) {
        let mut s = Shape::new("max-m1-b", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, top), s.var("beta", 0.0, top));
        let (d, h) = (s.var("delta", 0.0, top), s.var("eta", 0.0, top));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, c(0.0));
        s.sized(b - l1 - l2 - 1, be, h);
        s.fixed(1, c(0.0), c(top));
        out.push((s.cfg, rule));
    }
    for (l1, l2) in pairs(b) {
        let mut s = Shape::new("max-m1-c", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, top), s.var("beta", 0.0, top));
        let (d, h) = (s.var("delta", 0.0, top), s.var("eta", 0.0, top));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, c(0.0));
        s.sized(b - l1 - l2, be, h);
        out.push((s.cfg, rule));
    }
}

/// Shapes covering the unconstrained maximum over the whole simplex pair.
pub fn global_family(b: usize, j: usize, mode: Enumeration) -> Vec<Configuration> {
    let mut out = Vec::new();
    global(b, &mut out);
    out.into_iter()
        .filter(|(cfg, rule)| mode == Enumeration::Unrestricted || rule.admits(cfg, b, j))
        .map(|(cfg, _)| cfg)
        .collect()
}

fn global(b: usize, out: &mut Vec<(Configuration, ZeroRule)>) {
    let rule = ZeroRule::Both { top: 1 };
    for (l1, l2) in pairs(b) {
        let mut s = Shape::new("global", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
        let (d, h) = (s.var("delta", 0.0, 1.0), s.var("eta", 0.0, 1.0));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, c(0.0));
        s.sized(b - l1 - l2, be, h);
        out.push((s.cfg, rule));
    }
}

fn max_m3(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    let rule = ZeroRule::Both { top: 2 };
    for (l1, l2) in pairs(b - 1) {
        let mut s = Shape::new("max-m3", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
        let (d, h) = (s.var("delta", 0.0, 1.0), s.var("eta", 0.0, 1.0));
        s.fixed(1, c(1.0 - e), c(1.0 - e));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, c(0.0));
        s.sized(b - l1 - l2 - 1, be, h);
        out.push((s.cfg, rule));
    }
}

fn max_m4(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    let rule = ZeroRule::Both { top: 1 };
    let top = 1.0 - e;
    {
        let mut s = Shape::new("max-m4-a", 0, 0);
        let g = s.var("gamma", top, 1.0);
        let a = s.var("alpha", 0.0, 1.0);
        let d = s.var("delta", 0.0, 1.0);
        let z = s.var("zeta", top, 1.0);
        s.fixed(1, g, c(0.0));
        s.fixed(b - 2, a, d);
        s.fixed(1, c(0.0), z);
        out.push((s.cfg, rule));
    }
    for l1 in 1..=b - 2 {
        for zeta in [top, 1.0] {
            let mut s = Shape::new("max-m4-b", l1, 0).choice("zeta", zeta);
            let g = s.var("gamma", top, 1.0);
            let a = s.var("alpha", 0.0, 1.0);
            let d = s.var("delta", 0.0, 1.0);
            let h = s.var("eta", 0.0, 1.0);
            s.fixed(1, g, c(0.0));
            s.sized(l1, c(0.0), d);
            s.sized(b - l1 - 2, a, h);
            s.fixed(1, c(0.0), c(zeta));
            out.push((s.cfg, rule));
        }
    }
    for (l1, l2) in pairs(b - 2) {
        if l1 == 0 || l2 == 0 {
            continue;
        }
        for gamma in [top, 1.0] {
            for zeta in [top, 1.0] {
                let mut s = Shape::new("max-m4-c", l1, l2)
                    .choice("gamma", gamma)
                    .choice("zeta", zeta);
                let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
                let (d, h) = (s.var("delta", 0.0, 1.0), s.var("eta", 0.0, 1.0));
                s.fixed(1, c(gamma), c(0.0));
                s.sized(l1, c(0.0), d);
                s.sized(l2, a, c(0.0));
                s.sized(b - l1 - l2 - 2, be, h);
                s.fixed(1, c(0.0), c(zeta));
                out.push((s.cfg, rule));
            }
        }
    }
}

fn min_m1(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    for (l1, l2) in pairs(b) {
        let mut s = Shape::new("min-m1", l1, l2);
        let (a, be) = (s.var("alpha", e, 1.0), s.var("beta", e, 1.0));
        let (d, h) = (s.var("delta", e, 1.0), s.var("eta", e, 1.0));
        s.sized(l1, c(e), d);
        s.sized(l2, a, c(e));
        s.sized(b - l1 - l2, be, h);
        out.push((s.cfg, ZeroRule::None));
    }
}

fn min_m2(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    for l1 in 1..=b {
        let mut s = Shape::new("min-m2-a", l1, 0);
        let a = s.var("alpha", 0.0, e);
        let be = s.var("beta", 0.0, 1.0);
        let h = s.var("eta", e, 1.0);
        s.sized(l1, a, h);
        s.sized(b - l1, be, c(e));
        out.push((s.cfg, ZeroRule::None));
    }
    for l1 in 0..b {
        let mut s = Shape::new("min-m2-b", l1, 0);
        let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
        let (z, h) = (s.var("zeta", e, 1.0), s.var("eta", e, 1.0));
        s.fixed(1, c(e), z);
        s.sized(l1, a, h);
        s.sized(b - l1 - 1, be, c(e));
        out.push((s.cfg, ZeroRule::None));
    }
    for (l1, l2) in pairs(b) {
        if l1 == 0 {
            continue;
        }
        let mut s = Shape::new("min-m2-c", l1, l2);
        let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
        let (d, h) = (s.var("delta", e, 1.0), s.var("eta", e, 1.0));
        s.sized(l1, c(0.0), d);
        s.sized(l2, a, h);
        s.sized(b - l1 - l2, be, c(e));
        out.push((s.cfg, ZeroRule::POnly { top: 1 }));
    }
}

fn min_m3(b: usize, e: f64, out: &mut Vec<(Configuration, ZeroRule)>) {
    let rule = ZeroRule::Both { top: 1 };
    for (l1, l2) in pairs(b - 1) {
        let r = b - l1 - l2 - 1;
        {
            // The first coordinate repeats the trailing block.
            let mut s = Shape::new("min-m3-a", l1, l2);
            let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, e));
            let (d, h) = (s.var("delta", 0.0, 1.0), s.var("eta", 0.0, e));
            s.fixed(1, be, h);
            s.sized(l1, c(0.0), d);
            s.sized(l2, a, c(0.0));
            s.sized(r, be, h);
            out.push((s.cfg, rule));
        }
        for (tag, q0) in [("min-m3-b", 0.0), ("min-m3-c", e)] {
            let mut s = Shape::new(tag, l1, l2);
            let g = s.var("gamma", 0.0, e);
            let (a, be) = (s.var("alpha", 0.0, 1.0), s.var("beta", 0.0, 1.0));
            let (d, h) = (s.var("delta", 0.0, 1.0), s.var("eta", 0.0, 1.0));
            s.fixed(1, g, c(q0));
            s.sized(l1, c(0.0), d);
            s.sized(l2, a, c(0.0));
            s.sized(r, be, h);
            out.push((s.cfg, rule));
        }
    }
}
