//! Randomized checks of the structural inequalities the candidate families
//! rely on. Each check samples instances that satisfy the hypotheses and
//! compares both sides with the fast evaluator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{batch_rng, dirichlet_into, BATCH};
use crate::error::{Error, Result};
use crate::psi::{psi_slices, PsiParams};

/// Slack allowed before a sample counts as a violation.
pub const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaCheck {
    /// `p1 ≤ p2`, `q1 ≤ q2`: exchanging `q1` and `q2` does not decrease Ψ.
    Swap,
    /// `p` supported on `j-1` coordinates, all at most `1-α`, and
    /// `q1 ≤ … ≤ q_(j-1)`: moving `p` to `(1-α, α, 0, …)` does not decrease Ψ.
    Concentrate,
    /// `ε ≤ 1/(j+1)`, `p1 ≥ 1-ε`, `q` ascending: replacing `(q1, q2)` by
    /// `(0, q1+q2)` does not decrease Ψ.
    Merge,
    /// `ε < 1/2`, `q1 ≥ 1-ε`, `0 < δ ≤ ε`: moving `δ` from `p1 = 1-ε+δ` to
    /// `p2` strictly increases Ψ.
    Shift,
}

impl LemmaCheck {
    pub const ALL: [LemmaCheck; 4] = [
        LemmaCheck::Swap,
        LemmaCheck::Concentrate,
        LemmaCheck::Merge,
        LemmaCheck::Shift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaCheck::Swap => "swap",
            LemmaCheck::Concentrate => "concentrate",
            LemmaCheck::Merge => "merge",
            LemmaCheck::Shift => "shift",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub lhs_p: Vec<f64>,
    pub lhs_q: Vec<f64>,
    pub rhs_p: Vec<f64>,
    pub rhs_q: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub which: LemmaCheck,
    pub b: usize,
    pub j: usize,
    pub count: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest `lhs - rhs` observed.
    pub worst_gap: f64,
    pub counterexample: Option<Counterexample>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

type Instance = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn ascending(v: &mut [f64]) {
    v.sort_by(f64::total_cmp);
}

/// One hypothesis-satisfying instance; `boundary` pushes free parameters to
/// the edge of their ranges.
fn instance(which: LemmaCheck, b: usize, j: usize, rng: &mut ChaCha8Rng, boundary: bool) -> Instance {
    let mut p = vec![0.0; b];
    let mut q = vec![0.0; b];
    match which {
        LemmaCheck::Swap => {
            dirichlet_into(rng, 1.0, &mut p);
            dirichlet_into(rng, 1.0, &mut q);
            ascending(&mut p[..2]);
            ascending(&mut q[..2]);
            let mut q2 = q.clone();
            q2.swap(0, 1);
            (p.clone(), q, p, q2)
        }
        LemmaCheck::Concentrate => {
            let support = j - 1;
            dirichlet_into(rng, 1.0, &mut p[..support]);
            let top = p[..support].iter().cloned().fold(0.0, f64::max);
            let alpha = if boundary { 1.0 - top } else { (1.0 - top) * rng.random::<f64>() };
            dirichlet_into(rng, 1.0, &mut q);
            ascending(&mut q[..support]);
            let mut p2 = vec![0.0; b];
            p2[0] = 1.0 - alpha;
            p2[1] = alpha;
            (p, q.clone(), p2, q)
        }
        LemmaCheck::Merge => {
            let cap = 1.0 / (j + 1) as f64;
            let eps = if boundary { cap } else { cap * (1.0 - rng.random::<f64>()) };
            p[0] = if boundary { 1.0 - eps } else { 1.0 - eps * rng.random::<f64>() };
            let mass = 1.0 - p[0];
            dirichlet_into(rng, mass, &mut p[1..]);
            dirichlet_into(rng, 1.0, &mut q);
            ascending(&mut q);
            let mut q2 = q.clone();
            q2[1] = q[0] + q[1];
            q2[0] = 0.0;
            (p.clone(), q, p, q2)
        }
        LemmaCheck::Shift => {
            // ε in (0, 1/2), δ in (0, ε].
            let eps = 0.5 * (1.0 - rng.random::<f64>()) * (1.0 - 1e-9);
            let delta = if boundary { eps } else { eps * (1.0 - rng.random::<f64>()) };
            let mut tail = vec![0.0; b - 1];
            dirichlet_into(rng, (eps - delta).max(0.0), &mut tail);
            q[0] = 1.0 - eps * rng.random::<f64>();
            let qm = 1.0 - q[0];
            dirichlet_into(rng, qm, &mut q[1..]);
            let mut lp = vec![0.0; b];
            lp[0] = 1.0 - eps + delta;
            lp[1..].copy_from_slice(&tail);
            let mut rp = lp.clone();
            rp[0] = 1.0 - eps;
            rp[1] += delta;
            (lp, q.clone(), rp, q)
        }
    }
}

/// Samples `count` instances and checks `lhs ≤ rhs + 1e-12` (for the strict
/// shift inequality the same slack applies). Every eighth instance is a
/// boundary case.
pub fn check_lemma_inequalities(
    which: LemmaCheck,
    b: usize,
    j: usize,
    count: usize,
    seed: u64,
) -> Result<LemmaReport> {
    PsiParams::new(b, j)?;
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let batches = count.div_ceil(BATCH);
    let per_batch: Vec<(usize, f64, Option<Counterexample>)> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = batch_rng(seed, bi as u64);
            let n = BATCH.min(count - bi * BATCH);
            let mut violations = 0;
            let mut worst = f64::NEG_INFINITY;
            let mut example = None;
            for i in 0..n {
                let (lp, lq, rp, rq) = instance(which, b, j, &mut rng, i % 8 == 7);
                let lhs = psi_slices(&lp, &lq, j);
                let rhs = psi_slices(&rp, &rq, j);
                let gap = lhs - rhs;
                worst = worst.max(gap);
                if gap > SLACK {
                    violations += 1;
                    if example.is_none() {
                        example = Some(Counterexample {
                            lhs_p: lp,
                            lhs_q: lq,
                            rhs_p: rp,
                            rhs_q: rq,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
            (violations, worst, example)
        })
        .collect();
    let violations = per_batch.iter().map(|x| x.0).sum();
    let worst_gap = per_batch.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let counterexample = per_batch.into_iter().find_map(|x| x.2);
    Ok(LemmaReport {
        which,
        b,
        j,
        count,
        seed,
        violations,
        worst_gap,
        counterexample,
    })
}
