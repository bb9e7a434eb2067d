//! Block-structured `(p, q)` pairs with a few free variables.
//!
//! Each vector is a list of blocks `(multiplicity, entry)` where an entry is
//! either a constant or a variable with a box. The sum constraint eliminates
//! one variable per vector. The others are reached from unit-cube coordinates
//! `t ∈ [0,1]^d` through nested exact ranges: given the mass left over, the
//! next variable may range over exactly the values that still leave a
//! feasible completion. Every `t` therefore maps to a feasible point and the
//! faces of the cube map onto the boundary of the feasible set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psi::Segment;

/// Constant entries or references into [`Configuration::vars`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Entry {
    Const(f64),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarBox {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// `mult` coordinates carrying `(p, q)`. Blocks whose size is one of the
/// enumerated `l` parameters are `sized`; single fixed coordinates are not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub mult: usize,
    pub p: Entry,
    pub q: Entry,
    pub sized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub family_tag: String,
    pub l1: usize,
    pub l2: usize,
    /// Discrete endpoint selections, e.g. `("zeta", 0.91)`.
    pub discrete_choices: Vec<(String, f64)>,
    pub blocks: Vec<Block>,
    pub vars: Vec<VarBox>,
}

/// Which vector a variable lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    P,
    Q,
}

/// Parameterization of one vector: variables in elimination order, the
/// last one being determined by the sum constraint.
#[derive(Debug, Clone)]
pub(crate) struct SideParam {
    /// Indices into `Configuration::vars`.
    pub vars: Vec<usize>,
    /// Total multiplicity of each variable.
    pub mults: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Mass that the variables must carry.
    pub mass: f64,
}

impl SideParam {
    pub fn free_dims(&self) -> usize {
        self.vars.len().saturating_sub(1)
    }

    /// Feasible range of variable `i` given the mass still unassigned.
    fn range(&self, i: usize, rem: f64) -> (f64, f64) {
        let m = self.mults[i];
        let rest_lo: f64 = (i + 1..self.vars.len()).map(|t| self.mults[t] * self.lo[t]).sum();
        let rest_hi: f64 = (i + 1..self.vars.len()).map(|t| self.mults[t] * self.hi[t]).sum();
        let a = self.lo[i].max((rem - rest_hi) / m);
        let b = self.hi[i].min((rem - rest_lo) / m);
        (a, b)
    }

    /// Whether any assignment satisfies the constraint.
    pub fn feasible(&self) -> bool {
        if self.vars.is_empty() {
            return self.mass.abs() <= 1e-12;
        }
        let lo: f64 = (0..self.vars.len()).map(|t| self.mults[t] * self.lo[t]).sum();
        let hi: f64 = (0..self.vars.len()).map(|t| self.mults[t] * self.hi[t]).sum();
        lo <= self.mass + 1e-12 && self.mass <= hi + 1e-12
    }

    /// Variable values at unit-cube coordinates `t` (length `free_dims`).
    pub fn assign(&self, t: &[f64], out: &mut [f64]) {
        let n = self.vars.len();
        let mut rem = self.mass;
        for i in 0..n {
            let (a, b) = self.range(i, rem);
            let x = if i + 1 == n {
                (rem / self.mults[i]).clamp(self.lo[i], self.hi[i])
            } else {
                a + t[i] * (b - a).max(0.0)
            };
            out[i] = x;
            rem -= self.mults[i] * x;
        }
    }

    /// Interval hull of the variable values over the t-box `[tl, th]`.
    pub fn assign_interval(&self, tl: &[f64], th: &[f64], lo: &mut [f64], hi: &mut [f64]) {
        let n = self.vars.len();
        // Remaining mass as an interval; it shrinks as variables grow.
        let (mut rem_lo, mut rem_hi) = (self.mass, self.mass);
        for i in 0..n {
            if i + 1 == n {
                let m = self.mults[i];
                lo[i] = (rem_lo / m).clamp(self.lo[i], self.hi[i]);
                hi[i] = (rem_hi / m).clamp(self.lo[i], self.hi[i]);
            } else {
                // x = (1-t)·a(rem) + t·b(rem) is nondecreasing in t and rem.
                let (a0, b0) = self.range(i, rem_lo);
                let (a1, b1) = self.range(i, rem_hi);
                lo[i] = a0 + tl[i] * (b0 - a0).max(0.0);
                hi[i] = a1 + th[i] * (b1 - a1).max(0.0);
            }
            let m = self.mults[i];
            let (nl, nh) = (rem_lo - m * hi[i], rem_hi - m * lo[i]);
            rem_lo = nl;
            rem_hi = nh;
        }
    }
}

/// A configuration compiled for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub(crate) config: Configuration,
    /// Blocks with zero multiplicity removed.
    pub(crate) blocks: Vec<Block>,
    pub(crate) p_side: SideParam,
    pub(crate) q_side: SideParam,
}

impl Configuration {
    /// Total number of coordinates in each vector.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.mult).sum()
    }

    /// Zero entries of `p` and `q`, counting every constant-zero coordinate
    /// (`all = true`) or only the `sized` zero blocks.
    pub fn zero_counts(&self, all: bool) -> (usize, usize) {
        let mut zp = 0;
        let mut zq = 0;
        for b in &self.blocks {
            if !all && !b.sized {
                continue;
            }
            if b.p == Entry::Const(0.0) {
                zp += b.mult;
            }
            if b.q == Entry::Const(0.0) {
                zq += b.mult;
            }
        }
        (zp, zq)
    }

    /// Number of free variables after eliminating one per vector.
    pub fn free_dims(&self) -> Result<usize> {
        let c = self.compile()?;
        Ok(c.free_dims())
    }

    pub fn compile(&self) -> Result<Compiled> {
        let blocks: Vec<Block> = self.blocks.iter().filter(|b| b.mult > 0).cloned().collect();
        let mut side_of: Vec<Option<Side>> = vec![None; self.vars.len()];
        for b in &blocks {
            for (entry, side) in [(b.p, Side::P), (b.q, Side::Q)] {
                if let Entry::Var(v) = entry {
                    if v >= self.vars.len() {
                        return Err(Error::IndexOutOfRange {
                            index: v,
                            len: self.vars.len(),
                        });
                    }
                    match side_of[v] {
                        Some(s) if s != side => {
                            return Err(Error::InvalidParams(format!(
                                "variable {} used in both vectors",
                                self.vars[v].name
                            )))
                        }
                        _ => side_of[v] = Some(side),
                    }
                }
            }
        }
        let p_side = self.side_param(&blocks, Side::P, |b| b.p);
        let q_side = self.side_param(&blocks, Side::Q, |b| b.q);
        Ok(Compiled {
            config: self.clone(),
            blocks,
            p_side,
            q_side,
        })
    }

    fn side_param(&self, blocks: &[Block], _side: Side, get: impl Fn(&Block) -> Entry) -> SideParam {
        let mut vars: Vec<usize> = Vec::new();
        let mut mults: Vec<f64> = Vec::new();
        let mut mass = 1.0;
        for b in blocks {
            match get(b) {
                Entry::Const(c) => mass -= b.mult as f64 * c,
                Entry::Var(v) => match vars.iter().position(|&u| u == v) {
                    Some(i) => mults[i] += b.mult as f64,
                    None => {
                        vars.push(v);
                        mults.push(b.mult as f64);
                    }
                },
            }
        }
        let lo = vars.iter().map(|&v| self.vars[v].lo).collect();
        let hi = vars.iter().map(|&v| self.vars[v].hi).collect();
        SideParam {
            vars,
            mults,
            lo,
            hi,
            mass,
        }
    }
}

/// A point of a configuration: variable values plus the expanded segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<(String, f64)>,
    pub segments: Vec<Segment>,
}

impl Compiled {
    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.p_side.free_dims(), self.q_side.free_dims())
    }

    pub fn free_dims(&self) -> usize {
        let (a, b) = self.dims();
        a + b
    }

    pub fn feasible(&self) -> bool {
        self.p_side.feasible() && self.q_side.feasible()
    }

    /// Variable values (indexed like `Configuration::vars`) at `t`.
    pub(crate) fn var_values(&self, t: &[f64], vals: &mut [f64]) {
        let (dp, _) = self.dims();
        let mut buf = [0.0f64; 8];
        let np = self.p_side.vars.len();
        self.p_side.assign(&t[..dp], &mut buf[..np]);
        for (i, &v) in self.p_side.vars.iter().enumerate() {
            vals[v] = buf[i];
        }
        let nq = self.q_side.vars.len();
        self.q_side.assign(&t[dp..], &mut buf[..nq]);
        for (i, &v) in self.q_side.vars.iter().enumerate() {
            vals[v] = buf[i];
        }
    }

    pub(crate) fn segments_from_vals(&self, vals: &[f64], out: &mut Vec<Segment>) {
        out.clear();
        let get = |e: Entry| match e {
            Entry::Const(c) => c,
            Entry::Var(v) => vals[v],
        };
        for b in &self.blocks {
            out.push(Segment::new(b.mult, get(b.p), get(b.q)));
        }
    }

    /// Segments at unit-cube coordinates `t` (length `free_dims`).
    pub fn segments_at(&self, t: &[f64]) -> Vec<Segment> {
        let mut vals = vec![0.0; self.config.vars.len()];
        self.var_values(t, &mut vals);
        let mut out = Vec::with_capacity(self.blocks.len());
        self.segments_from_vals(&vals, &mut out);
        out
    }

    pub fn assignment_at(&self, t: &[f64]) -> Assignment {
        let mut vals = vec![0.0; self.config.vars.len()];
        self.var_values(t, &mut vals);
        let mut segments = Vec::new();
        self.segments_from_vals(&vals, &mut segments);
        let mut values = Vec::new();
        for side in [&self.p_side, &self.q_side] {
            for &v in &side.vars {
                values.push((self.config.vars[v].name.clone(), vals[v]));
            }
        }
        Assignment { values, segments }
    }
}

/// Expand segments into dense `(p, q)` vectors.
pub fn expand_segments(segs: &[Segment]) -> (Vec<f64>, Vec<f64>) {
    let mut p = Vec::new();
    let mut q = Vec::new();
    for s in segs {
        for _ in 0..s.mult {
            p.push(s.p);
            q.push(s.q);
        }
    }
    (p, q)
}
