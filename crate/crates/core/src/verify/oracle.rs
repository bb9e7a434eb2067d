//! Agreement of the fast evaluator with tuple enumeration on random pairs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{batch_rng, dirichlet_into, BATCH};
use crate::error::{Error, Result};
use crate::psi::{psi_fast, psi_naive, DistVec, PsiParams, NAIVE_CAP};

/// Largest tolerated `|fast - naive|`.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub b: usize,
    pub j: usize,
    pub count: usize,
    pub seed: u64,
    /// Constant added to every fast evaluation (fault injection; 0 normally).
    pub perturbation: f64,
    pub violations: usize,
    pub worst_diff: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Compares the fast evaluator (plus `perturbation`) with the naive one on
/// `count` random pairs. About one pair in five has an exact zero.
pub fn check_fast_against_naive(
    b: usize,
    j: usize,
    count: usize,
    seed: u64,
    perturbation: f64,
) -> Result<OracleReport> {
    let params = PsiParams::new(b, j)?;
    if b > NAIVE_CAP {
        return Err(Error::TooLarge { b, cap: NAIVE_CAP });
    }
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let batches = count.div_ceil(BATCH);
    let per_batch: Vec<(usize, f64)> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = batch_rng(seed, bi as u64);
            let n = BATCH.min(count - bi * BATCH);
            let (mut bad, mut worst) = (0, 0.0f64);
            let draw = |rng: &mut _| {
                let mut v = vec![0.0; b];
                dirichlet_into(rng, 1.0, &mut v);
                if rng.random_bool(0.2) {
                    let z = rng.random_range(0..b);
                    let m = v[z];
                    v[z] = 0.0;
                    v[(z + 1) % b] += m;
                }
                DistVec::relaxed(v).expect("finite nonnegative")
            };
            for _ in 0..n {
                let p = draw(&mut rng);
                let q = draw(&mut rng);
                let fast = psi_fast(&p, &q, params).expect("same length") + perturbation;
                let naive = psi_naive(&p, &q, params).expect("within cap");
                let d = (fast - naive).abs();
                worst = worst.max(d);
                if d > ORACLE_TOLERANCE {
                    bad += 1;
                }
            }
            (bad, worst)
        })
        .collect();
    Ok(OracleReport {
        b,
        j,
        count,
        seed,
        perturbation,
        violations: per_batch.iter().map(|x| x.0).sum(),
        worst_diff: per_batch.iter().map(|x| x.1).fold(0.0, f64::max),
    })
}
