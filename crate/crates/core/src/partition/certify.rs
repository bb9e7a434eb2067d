//! Certified upper bounds on a configuration's supremum.
//!
//! Best-first branch and bound over the unit cube of free coordinates. The
//! bound on a cell is `F(center) + Σ_f G_f·|x_f - x_f(center)|_max` where
//! `G_f` bounds `|∂F/∂x_f|` over an interval hull of the cell's image. The
//! partials of Ψ_j with respect to single entries are polynomials with
//! nonnegative coefficients, so their range over a box of entries is
//! bracketed by the values at its two extreme corners.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::config::{Compiled, Configuration, Entry, SideParam};
use super::maximize::{maximize_compiled, value_at, MaximizeOptions};
use crate::error::{Error, Result};
use crate::psi::{segment_partials, PsiParams, Segment};

/// Default cap on examined cells per configuration.
pub const DEFAULT_CELL_BUDGET: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Guaranteed upper bound on the supremum.
    pub upper: f64,
    /// Best value actually attained at a probed point.
    pub attained: f64,
    pub cells: usize,
    /// The cell budget ran out; `upper` is valid but looser.
    pub exhausted: bool,
}

struct Cell {
    bound: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    order: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(other.order.cmp(&self.order))
    }
}

/// Sum of `mult · [lo, hi]` over blocks whose entry on one side is `Var(v)`.
fn var_partial(
    side: &SideParam,
    idx: usize,
    blocks: &[super::config::Block],
    pick_p: bool,
    dlo: &[f64],
    dhi: &[f64],
) -> (f64, f64) {
    let v = side.vars[idx];
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (s, b) in blocks.iter().enumerate() {
        let e = if pick_p { b.p } else { b.q };
        if e == Entry::Var(v) {
            lo += b.mult as f64 * dlo[s];
            hi += b.mult as f64 * dhi[s];
        }
    }
    (lo, hi)
}

/// Upper bound of F over the t-cell `[lo, hi]`, plus F at the cell center.
fn cell_bound(c: &Compiled, j: usize, lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let (dp, _) = c.dims();
    let d = lo.len();
    let center: Vec<f64> = (0..d).map(|i| 0.5 * (lo[i] + hi[i])).collect();
    let f_center = value_at(c, j, &center);

    let nvars = c.config.vars.len();
    let mut xl = vec![0.0; nvars];
    let mut xh = vec![0.0; nvars];
    let mut xc = vec![0.0; nvars];
    c.var_values(&center, &mut xc);
    let sides = [(&c.p_side, 0..dp), (&c.q_side, dp..d)];
    for (side, range) in sides.iter() {
        let n = side.vars.len();
        let mut bl = [0.0f64; 8];
        let mut bh = [0.0f64; 8];
        side.assign_interval(&lo[range.clone()], &hi[range.clone()], &mut bl[..n], &mut bh[..n]);
        for (i, &v) in side.vars.iter().enumerate() {
            let vb = &c.config.vars[v];
            xl[v] = bl[i].max(vb.lo).max(0.0);
            xh[v] = bh[i].min(vb.hi).max(xl[v]);
        }
    }

    let corner = |x: &[f64]| -> Vec<Segment> {
        let get = |e: Entry| match e {
            Entry::Const(v) => v,
            Entry::Var(v) => x[v],
        };
        c.blocks
            .iter()
            .map(|b| Segment::new(b.mult, get(b.p), get(b.q)))
            .collect()
    };
    let (dp_lo, dq_lo) = segment_partials(&corner(&xl), j);
    let (dp_hi, dq_hi) = segment_partials(&corner(&xh), j);

    let mut slack = 0.0;
    for (side, pick_p, dlo, dhi) in [
        (&c.p_side, true, &dp_lo, &dp_hi),
        (&c.q_side, false, &dq_lo, &dq_hi),
    ] {
        let n = side.vars.len();
        if n < 2 {
            continue;
        }
        let (last_lo, last_hi) = var_partial(side, n - 1, &c.blocks, pick_p, dlo, dhi);
        for f in 0..n - 1 {
            let (glo, ghi) = var_partial(side, f, &c.blocks, pick_p, dlo, dhi);
            // x_last = (mass - Σ m_f x_f) / m_last.
            let ratio = side.mults[f] / side.mults[n - 1];
            let lo_g = glo - ratio * last_hi;
            let hi_g = ghi - ratio * last_lo;
            let g = lo_g.abs().max(hi_g.abs());
            let v = side.vars[f];
            let disp = (xh[v] - xc[v]).max(xc[v] - xl[v]).max(0.0);
            slack += g * disp;
        }
    }
    (f_center + slack, f_center)
}

/// Certified supremum over a compiled configuration. `floor` is a value
/// known to be attained somewhere (cells below it are discarded).
pub(crate) fn certify_compiled(
    c: &Compiled,
    j: usize,
    grid_step: f64,
    floor: f64,
    budget: usize,
) -> Certificate {
    let d = c.free_dims();
    if d == 0 {
        let v = value_at(c, j, &[]);
        return Certificate {
            upper: v,
            attained: v,
            cells: 1,
            exhausted: false,
        };
    }
    let mut attained = f64::NEG_INFINITY;
    let mut floor = floor;
    let mut heap = BinaryHeap::new();
    let mut order = 0usize;
    let root_lo = vec![0.0; d];
    let root_hi = vec![1.0; d];
    let (bound, fc) = cell_bound(c, j, &root_lo, &root_hi);
    attained = attained.max(fc);
    floor = floor.max(fc);
    heap.push(Cell {
        bound,
        lo: root_lo,
        hi: root_hi,
        order,
    });
    let mut cells = 1usize;
    loop {
        let Some(top) = heap.pop() else {
            return Certificate {
                upper: floor,
                attained,
                cells,
                exhausted: false,
            };
        };
        let width = (0..d).map(|i| top.hi[i] - top.lo[i]).fold(0.0, f64::max);
        if top.bound <= floor {
            return Certificate {
                upper: floor,
                attained,
                cells,
                exhausted: false,
            };
        }
        if width <= grid_step {
            return Certificate {
                upper: top.bound,
                attained,
                cells,
                exhausted: false,
            };
        }
        if cells >= budget {
            return Certificate {
                upper: top.bound,
                attained,
                cells,
                exhausted: true,
            };
        }
        for code in 0..(1usize << d) {
            let mut lo = top.lo.clone();
            let mut hi = top.hi.clone();
            for i in 0..d {
                let mid = 0.5 * (top.lo[i] + top.hi[i]);
                if code >> i & 1 == 0 {
                    hi[i] = mid;
                } else {
                    lo[i] = mid;
                }
            }
            let (b, fc) = cell_bound(c, j, &lo, &hi);
            cells += 1;
            attained = attained.max(fc);
            floor = floor.max(fc);
            order += 1;
            heap.push(Cell {
                bound: b.min(top.bound),
                lo,
                hi,
                order,
            });
        }
    }
}

/// Additive slack that turns the optimizer's value into a guaranteed upper
/// bound on the configuration's supremum. Zero for configurations without
/// free variables; nonincreasing as `grid_step` shrinks.
pub fn certify_excess(config: &Configuration, params: PsiParams, grid_step: f64) -> Result<f64> {
    if config.size() != params.b() {
        return Err(Error::DimensionMismatch {
            expected: params.b(),
            got: config.size(),
        });
    }
    let c = config.compile()?;
    if !c.feasible() {
        return Err(Error::EmptyBox(config.family_tag.clone()));
    }
    let m = maximize_compiled(&c, params.j(), &MaximizeOptions::default());
    let cert = certify_compiled(&c, params.j(), grid_step, m.value, DEFAULT_CELL_BUDGET);
    Ok((cert.upper - m.value).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::config::{Block, VarBox};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg3() -> Configuration {
        use Entry::*;
        let v = |n: &str, hi: f64| VarBox {
            name: n.into(),
            lo: 0.0,
            hi,
        };
        let blk = |mult, p, q, sized| Block {
            mult,
            p,
            q,
            sized,
        };
        Configuration {
            family_tag: "t".into(),
            l1: 1,
            l2: 1,
            discrete_choices: vec![],
            blocks: vec![
                blk(1, Var(0), Const(0.0), false),
                blk(1, Const(0.0), Var(3), true),
                blk(1, Var(1), Const(0.0), true),
                blk(3, Var(2), Var(4), true),
            ],
            vars: vec![
                v("gamma", 0.05),
                v("alpha", 1.0),
                v("beta", 1.0),
                v("delta", 1.0),
                v("eta", 1.0),
            ],
        }
    }

    #[test]
    fn bound_covers_random_points_in_cells() {
        let c = cfg3().compile().unwrap();
        assert_eq!(c.free_dims(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut lo = vec![0.0; 3];
            let mut hi = vec![0.0; 3];
            for i in 0..3 {
                let a: f64 = rng.random();
                let w: f64 = rng.random::<f64>() * 0.3;
                lo[i] = a * (1.0 - w);
                hi[i] = lo[i] + w;
            }
            let (bound, _) = cell_bound(&c, 3, &lo, &hi);
            for _ in 0..20 {
                let t: Vec<f64> = (0..3).map(|i| rng.random_range(lo[i]..=hi[i])).collect();
                assert!(value_at(&c, 3, &t) <= bound + 1e-13);
            }
        }
    }

    #[test]
    fn certificate_brackets_the_maximum() {
        let c = cfg3().compile().unwrap();
        let m = maximize_compiled(&c, 3, &MaximizeOptions::default());
        let cert = certify_compiled(&c, 3, 1e-3, m.value, DEFAULT_CELL_BUDGET);
        assert!(!cert.exhausted);
        assert!(cert.upper >= m.value);
        assert!(cert.attained <= m.value + 1e-12);
        assert!(cert.upper - m.value < 1e-4, "{}", cert.upper - m.value);
    }

    #[test]
    fn slack_shrinks_with_step() {
        let cfg = cfg3();
        let params = PsiParams::new(6, 3).unwrap();
        let coarse = certify_excess(&cfg, params, 0.05).unwrap();
        let fine = certify_excess(&cfg, params, 0.005).unwrap();
        assert!(fine <= coarse);
        assert!(coarse >= 0.0);
    }

    #[test]
    fn no_free_variables_no_slack() {
        use Entry::*;
        let cfg = Configuration {
            family_tag: "fixed".into(),
            l1: 0,
            l2: 0,
            discrete_choices: vec![],
            blocks: vec![Block {
                mult: 6,
                p: Const(1.0 / 6.0),
                q: Const(1.0 / 6.0),
                sized: true,
            }],
            vars: vec![],
        };
        let params = PsiParams::new(6, 4).unwrap();
        assert_eq!(certify_excess(&cfg, params, 0.01).unwrap(), 0.0);
    }
}
