//! Grid scan plus pattern-search refinement over a configuration's free
//! variables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Assignment, Compiled, Configuration};
use crate::error::{Error, Result};
use crate::psi::{factorial, leave_one_out_segments, psi_segments, PsiParams, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximizeOptions {
    /// Grid points per free variable when there are at most two.
    pub grid: usize,
    /// Grid points per free variable with three free variables.
    pub grid_3d: usize,
    /// Best grid points used as refinement starts.
    pub starts: usize,
    /// Pattern search stops once the step falls below this.
    pub min_step: f64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            grid: 400,
            grid_3d: 160,
            starts: 6,
            min_step: 1e-12,
        }
    }
}

impl MaximizeOptions {
    pub fn grid_for(&self, dims: usize) -> usize {
        if dims >= 3 {
            self.grid_3d.max(2)
        } else {
            self.grid.max(2)
        }
    }

    /// Grid spacing in unit-cube coordinates for `dims` free variables.
    pub fn grid_step(&self, dims: usize) -> f64 {
        1.0 / (self.grid_for(dims) - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigMax {
    pub value: f64,
    /// Unit-cube coordinates of the maximizer.
    pub t: Vec<f64>,
    pub assignment: Assignment,
}

/// Maximum of Ψ_j over a configuration.
pub fn maximize_config(
    config: &Configuration,
    params: PsiParams,
    opts: &MaximizeOptions,
) -> Result<ConfigMax> {
    if config.size() != params.b() {
        return Err(Error::DimensionMismatch {
            expected: params.b(),
            got: config.size(),
        });
    }
    let compiled = config.compile()?;
    if !compiled.feasible() {
        return Err(Error::EmptyBox(format!(
            "{} (l1={}, l2={})",
            config.family_tag, config.l1, config.l2
        )));
    }
    Ok(maximize_compiled(&compiled, params.j(), opts))
}

/// Values of one vector's blocks over that vector's share of the grid.
struct SideGrid {
    /// Block values, `blocks` per point.
    vals: Vec<f64>,
    /// Leave-one-out `e_j`, `blocks` per point.
    loo: Vec<f64>,
    points: usize,
}

fn grid_coords(index: usize, dims: usize, n: usize, out: &mut [f64]) {
    let mut rest = index;
    for slot in out.iter_mut().take(dims) {
        *slot = (rest % n) as f64 / (n - 1) as f64;
        rest /= n;
    }
}

fn side_grid(c: &Compiled, side_p: bool, n: usize, j: usize) -> SideGrid {
    let (dp, dq) = c.dims();
    let dims = if side_p { dp } else { dq };
    let points = n.pow(dims as u32);
    let nb = c.blocks.len();
    let mults: Vec<usize> = c.blocks.iter().map(|b| b.mult).collect();
    let mut vals = vec![0.0; points * nb];
    let mut loo = vec![0.0; points * nb];
    vals.par_chunks_mut(nb)
        .zip(loo.par_chunks_mut(nb))
        .enumerate()
        .for_each(|(i, (v, l))| {
            let mut t = [0.0f64; 6];
            let (dp, dq) = c.dims();
            if side_p {
                grid_coords(i, dp, n, &mut t[..dp]);
            } else {
                grid_coords(i, dq, n, &mut t[dp..dp + dq]);
            }
            let segs = c.segments_at(&t[..dp + dq]);
            for (k, s) in segs.iter().enumerate() {
                v[k] = if side_p { s.p } else { s.q };
            }
            leave_one_out_segments(v, &mults, j, l);
        });
    SideGrid { vals, loo, points }
}

#[derive(Clone, Copy)]
struct Cand {
    value: f64,
    ip: usize,
    iq: usize,
}

fn cand_order(a: &Cand, b: &Cand) -> std::cmp::Ordering {
    b.value
        .total_cmp(&a.value)
        .then(a.ip.cmp(&b.ip))
        .then(a.iq.cmp(&b.iq))
}

fn push_top(top: &mut Vec<Cand>, c: Cand, k: usize) {
    if top.len() == k && cand_order(&c, top.last().unwrap()).is_ge() {
        return;
    }
    let pos = top.partition_point(|x| cand_order(x, &c).is_lt());
    top.insert(pos, c);
    top.truncate(k);
}

/// Pattern search on the unit cube over all `3^d - 1` directions.
fn refine(c: &Compiled, j: usize, start: &[f64], step0: f64, min_step: f64) -> (f64, Vec<f64>) {
    let d = start.len();
    let eval = |t: &[f64]| psi_segments(&c.segments_at(t), j);
    let mut t = start.to_vec();
    let mut best = eval(&t);
    let mut step = step0;
    let dirs = 3usize.pow(d as u32);
    let mut trial = vec![0.0; d];
    let mut iterations = 0;
    while step >= min_step && iterations < 100_000 {
        iterations += 1;
        let mut improved: Option<(f64, Vec<f64>)> = None;
        for code in 0..dirs {
            let mut rest = code;
            let mut zero = true;
            for i in 0..d {
                let dir = (rest % 3) as f64 - 1.0;
                rest /= 3;
                if dir != 0.0 {
                    zero = false;
                }
                trial[i] = (t[i] + dir * step).clamp(0.0, 1.0);
            }
            if zero || trial == t {
                continue;
            }
            let v = eval(&trial);
            let bar = improved.as_ref().map_or(best, |x| x.0);
            if v > bar {
                improved = Some((v, trial.clone()));
            }
        }
        match improved {
            Some((v, nt)) => {
                best = v;
                t = nt;
            }
            None => step *= 0.5,
        }
    }
    (best, t)
}

pub(crate) fn maximize_compiled(c: &Compiled, j: usize, opts: &MaximizeOptions) -> ConfigMax {
    let (dp, dq) = c.dims();
    let d = dp + dq;
    if d == 0 {
        let segs = c.segments_at(&[]);
        return ConfigMax {
            value: psi_segments(&segs, j),
            t: vec![],
            assignment: c.assignment_at(&[]),
        };
    }
    let n = opts.grid_for(d);
    let pg = side_grid(c, true, n, j);
    let qg = side_grid(c, false, n, j);
    let nb = c.blocks.len();
    let mults: Vec<f64> = c.blocks.iter().map(|b| b.mult as f64).collect();
    let jf = factorial(j);
    let k = opts.starts.max(1);

    let top = (0..pg.points)
        .into_par_iter()
        .fold(Vec::new, |mut top: Vec<Cand>, ip| {
            let pv = &pg.vals[ip * nb..(ip + 1) * nb];
            let pa = &pg.loo[ip * nb..(ip + 1) * nb];
            for iq in 0..qg.points {
                let qv = &qg.vals[iq * nb..(iq + 1) * nb];
                let qb = &qg.loo[iq * nb..(iq + 1) * nb];
                let mut acc = 0.0;
                for s in 0..nb {
                    acc += mults[s] * (qv[s] * pa[s] + pv[s] * qb[s]);
                }
                push_top(&mut top, Cand { value: acc * jf, ip, iq }, k);
            }
            top
        })
        .reduce(Vec::new, |mut a, b| {
            for c in b {
                push_top(&mut a, c, k);
            }
            a
        });

    let step0 = 1.0 / (n - 1) as f64;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cand in &top {
        let mut t = vec![0.0; d];
        grid_coords(cand.ip, dp, n, &mut t[..dp]);
        grid_coords(cand.iq, dq, n, &mut t[dp..]);
        let (v, t) = refine(c, j, &t, step0, opts.min_step);
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, t));
        }
    }
    let (value, t) = best.expect("grid has at least one point");
    ConfigMax {
        value,
        assignment: c.assignment_at(&t),
        t,
    }
}

/// Ψ_j at a configuration point given in unit-cube coordinates.
pub fn value_at(c: &Compiled, j: usize, t: &[f64]) -> f64 {
    let segs: Vec<Segment> = c.segments_at(t);
    psi_segments(&segs, j)
}
