//! Closed-form upper bounds on the hash-code rate and the map from a bound
//! on the quadratic form to a rate bound.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alphabet size `b`, hash order `k` and an optional partition order `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemParams {
    b: usize,
    k: usize,
    j: Option<usize>,
}

impl ProblemParams {
    /// Requires `b ≥ k ≥ 3`.
    pub fn new(b: usize, k: usize) -> Result<Self> {
        if k < 3 || b < k {
            return Err(Error::InvalidParams(format!(
                "need b >= k >= 3, got b={b}, k={k}"
            )));
        }
        Ok(Self { b, k, j: None })
    }

    /// Requires `2 ≤ j ≤ k - 2`.
    pub fn with_j(self, j: usize) -> Result<Self> {
        if j < 2 || j + 2 > self.k {
            return Err(Error::InvalidParams(format!(
                "need 2 <= j <= k-2, got j={j}, k={}",
                self.k
            )));
        }
        Ok(Self { j: Some(j), ..self })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn j(&self) -> Option<usize> {
        self.j
    }

    fn require_k4(&self) -> Result<()> {
        if self.k < 4 {
            return Err(Error::InvalidParams(format!(
                "bound needs k >= 4, got k={}",
                self.k
            )));
        }
        Ok(())
    }
}

/// `b(b-1)…(b-m+1) / b^m`.
/// Computed as one correctly rounded division when numerator and
/// denominator fit in `u128`.
pub fn falling_ratio(b: usize, m: usize) -> f64 {
    let exact = (0..m).try_fold((1u128, 1u128), |(n, d), i| {
        Some((n.checked_mul(b.checked_sub(i)? as u128)?, d.checked_mul(b as u128)?))
    });
    match exact {
        Some((n, d)) if n < 1 << 53 && d < 1 << 53 => n as f64 / d as f64,
        Some((0, _)) => 0.0,
        _ => {
            let bf = b as f64;
            (0..m).fold(1.0, |acc, i| acc * (bf - i as f64) / bf)
        }
    }
}

pub fn fredman_komlos(params: ProblemParams) -> f64 {
    let (b, k) = (params.b, params.k);
    falling_ratio(b, k - 1) * ((b - k + 2) as f64).log2()
}

fn km_term(b: usize, k: usize, j: usize) -> f64 {
    falling_ratio(b, j + 1) * ((b - j) as f64 / (k - j - 1) as f64).log2()
}

/// Minimum over `2 ≤ j ≤ k-2` of the generalized Fredman–Komlós bound,
/// together with the minimizing `j` (smallest on ties).
pub fn korner_marton(params: ProblemParams) -> Result<(f64, usize)> {
    params.require_k4()?;
    let (b, k) = (params.b, params.k);
    let mut best = (f64::INFINITY, 2);
    for j in 2..=k - 2 {
        let v = km_term(b, k, j);
        if v < best.0 {
            best = (v, j);
        }
    }
    Ok(best)
}

pub fn dvj_bound(params: ProblemParams) -> Result<f64> {
    params.require_k4()?;
    let b = params.b as f64;
    let k = params.k as f64;
    let inner = 1.0 / b.log2() + b * b / ((b * b - 3.0 * b + 2.0) * ((b - 2.0) / (k - 3.0)).log2());
    Ok(1.0 / inner)
}

/// Rate bound implied by an upper bound `mj` on the quadratic form of order
/// `j`. Strictly increasing in `mj`.
pub fn rate_from_mj(params: ProblemParams, mj: f64) -> Result<f64> {
    let j = params
        .j
        .ok_or_else(|| Error::InvalidParams("rate bound needs j".into()))?;
    if !(mj > 0.0) || !mj.is_finite() {
        return Err(Error::InvalidParams(format!("M_j must be positive, got {mj}")));
    }
    let (b, k) = (params.b as f64, params.k as f64);
    let jf = j as f64;
    let l1 = ((b - jf) / (k - jf - 1.0)).log2();
    let l2 = (b / (jf - 1.0)).log2();
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "degenerate logarithm for b={b}, k={k}, j={j}"
        )));
    }
    Ok(1.0 / (2.0 / (mj * l1) + 1.0 / l2))
}

/// Value of the conjectured bound. This is a conjecture, not a theorem;
/// callers must label it as such.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conjectured {
    pub value: f64,
    pub argmin_j: usize,
    pub is_conjecture: bool,
}

pub fn conjectured_bound(params: ProblemParams) -> Result<Conjectured> {
    params.require_k4()?;
    let (b, k) = (params.b, params.k);
    let mut best = (f64::INFINITY, 2);
    for j in 2..=k - 2 {
        let v = conjectured_term(b, k, j);
        if v < best.0 {
            best = (v, j);
        }
    }
    Ok(Conjectured {
        value: best.0,
        argmin_j: best.1,
        is_conjecture: true,
    })
}

/// The conjectured expression at a fixed `j`.
pub fn conjectured_term(b: usize, k: usize, j: usize) -> f64 {
    let bf = b as f64;
    let jf = j as f64;
    let a = 1.0 / (bf / (jf - 1.0)).log2();
    let c = 1.0 / (falling_ratio(b, j + 1) * ((bf - jf) / (k as f64 - jf - 1.0)).log2());
    1.0 / (a + c)
}

/// `(b-2)(b-3)…(b-k+2) / b^(k-3)`, the constant of the balanced-code
/// inequality `R ≤ c·F(R)`.
pub fn balanced_constant(b: usize, k: usize) -> f64 {
    let bf = b as f64;
    (0..k.saturating_sub(3)).fold(1.0, |acc, i| acc * (bf - 2.0 - i as f64) / bf)
}

const PROBE_POINTS: usize = 1024;

/// Largest `R ∈ [0, log2 b]` with `R ≤ c·F(R)`, where `F` maps a rate to a
/// relative distance and must be nonincreasing. Bisection to 1e-10 or better.
pub fn balanced_fixed_point<F>(b: usize, k: usize, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b < 3 || k < 3 || k > b {
        return Err(Error::InvalidParams(format!(
            "need b >= k >= 3, got b={b}, k={k}"
        )));
    }
    let c = balanced_constant(b, k);
    let cap = (b as f64).log2();
    let mut prev = f(0.0);
    for i in 1..=PROBE_POINTS {
        let r = cap * i as f64 / PROBE_POINTS as f64;
        let v = f(r);
        if !v.is_finite() {
            return Err(Error::NotMonotone(format!("F({r}) = {v}")));
        }
        if v > prev + 1e-12 {
            return Err(Error::NotMonotone(format!(
                "F increases from {prev} to {v} near R = {r}"
            )));
        }
        prev = v;
    }
    let g = |r: f64| c * f(r) - r;
    if g(cap) >= 0.0 {
        return Ok(cap);
    }
    if g(0.0) < 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, cap);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The `q`-ary Plotkin relative distance at rate `r`.
pub fn plotkin_distance(b: usize, r: f64) -> f64 {
    let bf = b as f64;
    (1.0 - r / bf.log2()) * (bf - 1.0) / bf
}

/// Intersection of `R ≤ δ(b-2)/b` with the Plotkin bound, in closed form.
pub fn plotkin_closed_form(b: usize) -> f64 {
    let bf = b as f64;
    let l = bf.log2();
    let a = (bf - 1.0) * (bf - 2.0);
    a * l / (a + bf * bf * l)
}

/// The same expression with numerator `b(b-1)·log2 b`, as it appears in
/// print. Reported next to the derived value, never used as a bound.
pub fn plotkin_printed_formula(b: usize) -> f64 {
    let bf = b as f64;
    let l = bf.log2();
    bf * (bf - 1.0) * l / ((bf - 1.0) * (bf - 2.0) + bf * bf * l)
}

/// Balanced-code bound for `k = 4` with the Plotkin distance, solved with
/// [`balanced_fixed_point`] and cross-checked against the closed form.
pub fn plotkin_combined_k4(b: usize) -> Result<f64> {
    if b < 4 {
        return Err(Error::InvalidParams(format!("need b >= 4, got {b}")));
    }
    let solved = balanced_fixed_point(b, 4, |r| plotkin_distance(b, r))?;
    let closed = plotkin_closed_form(b);
    if (solved - closed).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "fixed point {solved} disagrees with closed form {closed}"
        )));
    }
    Ok(solved)
}

/// Piecewise-linear distance function read from a two-column `R δ` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedF {
    points: Vec<(f64, f64)>,
}

impl TabulatedF {
    /// Rates must be strictly increasing and distances nonincreasing.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parse {
                line: 0,
                msg: "need at least two points".into(),
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("rate {} does not increase", w[1].0),
                });
            }
            if w[1].1 > w[0].1 {
                return Err(Error::NotMonotone(format!(
                    "distance rises from {} to {} at R = {}",
                    w[0].1, w[1].1, w[1].0
                )));
            }
        }
        Ok(Self { points })
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("{s}: {e}"),
                })
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::new(points)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Linear interpolation; constant beyond the first and last rates.
    pub fn eval(&self, r: f64) -> f64 {
        let pts = &self.points;
        if r <= pts[0].0 {
            return pts[0].1;
        }
        if r >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = pts.partition_point(|p| p.0 <= r);
        let (r0, d0) = pts[idx - 1];
        let (r1, d1) = pts[idx];
        d0 + (d1 - d0) * (r - r0) / (r1 - r0)
    }
}
