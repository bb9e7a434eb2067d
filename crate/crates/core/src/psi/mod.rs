//! Evaluation of the symmetric polynomial
//!
//! ```text
//! Ψ_j(p; q) = 1/(b-j-1)! · Σ_σ [ p_σ(1)…p_σ(j) q_σ(j+1) + q_σ(1)…q_σ(j) p_σ(j+1) ]
//! ```
//!
//! over pairs of probability vectors of length `b`. Every ordered tuple of
//! `j + 1` distinct indices is hit by exactly `(b-j-1)!` permutations, so the
//! prefactor cancels and the fast path becomes
//!
//! ```text
//! Ψ_j(p; q) = j! · Σ_m [ q_m · e_j(p \ m) + p_m · e_j(q \ m) ]
//! ```
//!
//! where `e_j(v \ m)` is the `j`-th elementary symmetric polynomial of `v`
//! with coordinate `m` removed.

mod segments;

pub use segments::{leave_one_out_segments, psi_segments, segment_partials, Segment};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ p_i = 1` accepted by [`DistVec::new`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Largest alphabet accepted by [`psi_naive`].
pub const NAIVE_CAP: usize = 10;

/// A probability vector over an alphabet of size `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistVec {
    values: Vec<f64>,
    normalized: bool,
}

impl DistVec {
    /// Validates nonnegativity and `|Σ - 1| ≤ 1e-12`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_nonnegative(&values)?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            values,
            normalized: true,
        })
    }

    /// Nonnegative vector whose sum is not checked. Used for the intermediate
    /// points produced inside optimizers; the result is flagged as unnormalized.
    pub fn relaxed(values: Vec<f64>) -> Result<Self> {
        check_nonnegative(&values)?;
        Ok(Self {
            values,
            normalized: false,
        })
    }

    pub fn uniform(b: usize) -> Self {
        Self {
            values: vec![1.0 / b as f64; b],
            normalized: true,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `false` for vectors built with [`DistVec::relaxed`].
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is {v}, expected a finite nonnegative value"
        )));
    }
    Ok(())
}

/// Alphabet size `b` and polynomial order `j`, with `2 ≤ j ≤ b - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PsiParams {
    b: usize,
    j: usize,
}

impl PsiParams {
    pub fn new(b: usize, j: usize) -> Result<Self> {
        if b < 3 || j < 2 || j + 1 > b {
            return Err(Error::InvalidParams(format!(
                "need 2 <= j <= b-1, got b={b}, j={j}"
            )));
        }
        Ok(Self { b, j })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

fn check_dims(p: &DistVec, q: &DistVec, params: PsiParams) -> Result<()> {
    for v in [p, q] {
        if v.len() != params.b {
            return Err(Error::DimensionMismatch {
                expected: params.b,
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// Literal evaluation by enumerating every ordered tuple of `j + 1` distinct
/// indices. Exponential in `b`; only meant as an oracle for small alphabets.
pub fn psi_naive(p: &DistVec, q: &DistVec, params: PsiParams) -> Result<f64> {
    check_dims(p, q, params)?;
    if params.b > NAIVE_CAP {
        return Err(Error::TooLarge {
            b: params.b,
            cap: NAIVE_CAP,
        });
    }
    let (p, q) = (p.as_slice(), q.as_slice());
    let mut used = vec![false; params.b];
    let mut total = 0.0;
    enumerate_tuples(p, q, params.j, &mut used, 1.0, 1.0, &mut total);
    Ok(total)
}

fn enumerate_tuples(
    p: &[f64],
    q: &[f64],
    remaining: usize,
    used: &mut [bool],
    p_prod: f64,
    q_prod: f64,
    total: &mut f64,
) {
    if remaining == 0 {
        for c in 0..p.len() {
            if !used[c] {
                *total += p_prod * q[c] + q_prod * p[c];
            }
        }
        return;
    }
    for a in 0..p.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        enumerate_tuples(
            p,
            q,
            remaining - 1,
            used,
            p_prod * p[a],
            q_prod * q[a],
            total,
        );
        used[a] = false;
    }
}

/// `e_j` of `v` with coordinate `excluded` removed. `j = 0` gives 1.
pub fn elem_sym_excluding(v: &[f64], j: usize, excluded: usize) -> Result<f64> {
    if excluded >= v.len() {
        return Err(Error::IndexOutOfRange {
            index: excluded,
            len: v.len(),
        });
    }
    if j + 1 > v.len() {
        return Err(Error::InvalidParams(format!(
            "e_{j} of {} remaining values",
            v.len() - 1
        )));
    }
    Ok(esym_skip(v, j, excluded))
}

// Forward recurrence e_k <- e_k + x e_{k-1}; every term is nonnegative for
// probability inputs, so nothing cancels.
fn esym_skip(v: &[f64], j: usize, excluded: usize) -> f64 {
    let mut e = [0.0f64; 64];
    debug_assert!(j < e.len());
    e[0] = 1.0;
    let mut seen = 0usize;
    for (i, &x) in v.iter().enumerate() {
        if i == excluded {
            continue;
        }
        seen += 1;
        let top = seen.min(j);
        for k in (1..=top).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e[j]
}

/// Leave-one-out evaluation on raw slices, without validation.
pub(crate) fn psi_slices(p: &[f64], q: &[f64], j: usize) -> f64 {
    let mut acc = 0.0;
    for m in 0..p.len() {
        acc += q[m] * esym_skip(p, j, m) + p[m] * esym_skip(q, j, m);
    }
    acc * factorial(j)
}

/// O(b²·j) evaluation through leave-one-out elementary symmetric
/// polynomials. Inputs are not renormalized.
pub fn psi_fast(p: &DistVec, q: &DistVec, params: PsiParams) -> Result<f64> {
    check_dims(p, q, params)?;
    Ok(psi_slices(p.as_slice(), q.as_slice(), params.j))
}

/// `Ψ_j(u; u)` for the uniform vector `u`, as an exact reduced fraction
/// `2·b(b-1)…(b-j) / b^(j+1)`.
pub fn psi_uniform_ratio(params: PsiParams) -> (u128, u128) {
    let b = params.b as u128;
    let mut num: u128 = 2;
    let mut den: u128 = 1;
    for i in 0..=params.j as u128 {
        num *= b - i;
        den *= b;
    }
    let g = gcd(num, den);
    (num / g, den / g)
}

/// `Ψ_j(u; u) = 2·b^(j+1 falling) / b^(j+1)`, the global maximum of `Ψ_j`
/// whenever that maximum sits at the uniform pair.
pub fn psi_uniform_closed_form(params: PsiParams) -> f64 {
    let (num, den) = psi_uniform_ratio(params);
    num as f64 / den as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DistVec {
        DistVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn uniform_six_four() {
        let params = PsiParams::new(6, 4).unwrap();
        let u = DistVec::uniform(6);
        let naive = psi_naive(&u, &u, params).unwrap();
        assert!((naive - 5.0 / 27.0).abs() < 1e-14);
        assert!((psi_fast(&u, &u, params).unwrap() - 5.0 / 27.0).abs() < 1e-14);
        assert_eq!(psi_uniform_ratio(params), (5, 27));
    }

    #[test]
    fn vertex_against_spread() {
        let params = PsiParams::new(6, 4).unwrap();
        let p = dv(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let q = dv(&[0.0, 0.2, 0.2, 0.2, 0.2, 0.2]);
        assert!((psi_naive(&p, &q, params).unwrap() - 0.192).abs() < 1e-14);
        assert!((psi_fast(&p, &q, params).unwrap() - 0.192).abs() < 1e-14);
    }

    #[test]
    fn seven_five_table_values() {
        let params = PsiParams::new(7, 5).unwrap();
        let u = DistVec::uniform(7);
        let v = psi_fast(&u, &u, params).unwrap();
        assert!((v - 0.085679).abs() < 5e-7, "{v}");
        let p = dv(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let q = dv(&[0.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        let v = psi_fast(&p, &q, params).unwrap();
        assert!((v - 0.092593).abs() < 5e-7, "{v}");
    }

    #[test]
    fn short_support_vanishes() {
        let params = PsiParams::new(7, 4).unwrap();
        let p = dv(&[0.5, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0]);
        let q = dv(&[0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.4]);
        assert_eq!(psi_fast(&p, &q, params).unwrap(), 0.0);
        assert_eq!(psi_naive(&p, &q, params).unwrap(), 0.0);
    }

    #[test]
    fn elem_sym_examples() {
        let v = [0.2, 0.3, 0.5];
        assert!((elem_sym_excluding(&v, 1, 0).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(elem_sym_excluding(&v, 0, 2).unwrap(), 1.0);
        let u = [1.0 / 6.0; 6];
        let e = elem_sym_excluding(&u, 4, 0).unwrap();
        assert!((e - 5.0 / 1296.0).abs() < 1e-16);
        assert!(matches!(
            elem_sym_excluding(&v, 1, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let v = psi_uniform_closed_form(PsiParams::new(7, 4).unwrap());
        assert!((v - 2.0 * 2520.0 / 16807.0).abs() < 1e-15);
        for j in 2..9 {
            let params = PsiParams::new(j + 1, j).unwrap();
            let full: f64 = 2.0 * factorial(j + 1) / ((j + 1) as f64).powi(j as i32 + 1);
            assert!((psi_uniform_closed_form(params) - full).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PsiParams::new(5, 5).is_err());
        assert!(PsiParams::new(5, 1).is_err());
        assert!(DistVec::new(vec![0.5, 0.6]).is_err());
        assert!(DistVec::new(vec![1.5, -0.5]).is_err());
        let relaxed = DistVec::relaxed(vec![0.5, 0.6]).unwrap();
        assert!(!relaxed.is_normalized());
        let params = PsiParams::new(6, 3).unwrap();
        let u5 = DistVec::uniform(5);
        let u6 = DistVec::uniform(6);
        assert!(matches!(
            psi_fast(&u5, &u6, params),
            Err(Error::DimensionMismatch { expected: 6, got: 5 })
        ));
        let params = PsiParams::new(11, 3).unwrap();
        let u = DistVec::uniform(11);
        assert!(matches!(psi_naive(&u, &u, params), Err(Error::TooLarge { .. })));
    }
}
