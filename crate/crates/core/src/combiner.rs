//! From the four subdomain maxima to a bound on the quadratic form, and from
//! there to a rate bound.
//!
//! With weights `η_0` on the balanced part and `η_1..η_b` on the unbalanced
//! parts, the form is bounded by
//!
//! ```text
//! f(η) = η_0²M1 + 2η_0·Σηᵢ·M2 + Σηᵢ²·M3 + 2·Σ_{i<h} ηᵢη_h·M4.
//! ```
//!
//! Write `s = 1 - η_0` and `Q = Σηᵢ²`. Then `2·Σ_{i<h} ηᵢη_h = s² - Q`, so
//! for fixed `η_0` the form is affine in `Q ∈ [s²/b, s²]`. When `M4 > M3` it
//! peaks at equal weights (`Q = s²/b`), otherwise at a single nonzero weight
//! (`Q = s²`). Either way what remains is a quadratic in `η_0` whose maximum
//! over `[0, 1]` is among its endpoints and its clipped stationary point.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classical::{
    conjectured_bound, dvj_bound, fredman_komlos, korner_marton, rate_from_mj, ProblemParams,
};
use crate::error::{Error, Result};
use crate::partition::{
    compute_mi, global_maximum, EngineOptions, MSelector, PartitionKind, PartitionSpec,
    SubdomainMax,
};
use crate::psi::{psi_uniform_closed_form, PsiParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiTuple {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub b: usize,
}

impl MiTuple {
    pub fn new(m: [f64; 4], b: usize) -> Result<Self> {
        if m.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "subdomain maxima must be positive, got {m:?}"
            )));
        }
        if b < 2 {
            return Err(Error::InvalidParams(format!("b must be at least 2, got {b}")));
        }
        Ok(Self {
            m1: m[0],
            m2: m[1],
            m3: m[2],
            m4: m[3],
            b,
        })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.m1, self.m2, self.m3, self.m4]
    }

    /// Hypothesis under which equal unbalanced weights are optimal.
    pub fn m4_exceeds_m3(&self) -> bool {
        self.m4 > self.m3
    }

    /// Value of the form at equal unbalanced weights summing to one.
    fn spread(&self) -> f64 {
        let b = self.b as f64;
        self.m3 / b + (b - 1.0) * self.m4 / b
    }
}

/// Optimal weights: `η_0` on the balanced part; the rest is either spread
/// evenly (`eta_rest` each) or concentrated on one part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaWeights {
    pub eta0: f64,
    pub eta_rest: f64,
    pub concentrated: bool,
}

impl EtaWeights {
    /// Full weight vector of length `b + 1`.
    pub fn to_vec(&self, b: usize) -> Vec<f64> {
        let mut v = vec![0.0; b + 1];
        v[0] = self.eta0;
        if self.concentrated {
            v[1] = 1.0 - self.eta0;
        } else {
            for x in v.iter_mut().skip(1) {
                *x = self.eta_rest;
            }
        }
        v
    }
}

pub fn f_eta(mi: &MiTuple, eta: &[f64]) -> Result<f64> {
    if eta.len() != mi.b + 1 {
        return Err(Error::DimensionMismatch {
            expected: mi.b + 1,
            got: eta.len(),
        });
    }
    let e0 = eta[0];
    let rest = &eta[1..];
    let sum: f64 = rest.iter().sum();
    let sq: f64 = rest.iter().map(|x| x * x).sum();
    let cross = sum * sum - sq;
    Ok(e0 * e0 * mi.m1 + 2.0 * e0 * sum * mi.m2 + sq * mi.m3 + cross * mi.m4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combined {
    pub m: f64,
    pub eta: EtaWeights,
    /// `M4 ≤ M3`: the concentrated branch was used.
    pub fallback: bool,
}

/// Maximum of [`f_eta`] over the simplex.
pub fn combine(mi: &MiTuple) -> Combined {
    let fallback = !mi.m4_exceeds_m3();
    let k = if fallback { mi.m3 } else { mi.spread() };
    let g = |e: f64| e * e * mi.m1 + 2.0 * e * (1.0 - e) * mi.m2 + (1.0 - e) * (1.0 - e) * k;
    let mut cands = vec![0.0, 1.0];
    let denom = 2.0 * mi.m2 - mi.m1 - k;
    if denom != 0.0 {
        let e = (mi.m2 - k) / denom;
        if e.is_finite() {
            cands.push(e.clamp(0.0, 1.0));
        }
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for e in cands {
        let v = g(e);
        if v > best.0 {
            best = (v, e);
        }
    }
    let (m, eta0) = best;
    Combined {
        m,
        eta: EtaWeights {
            eta0,
            eta_rest: if fallback { 0.0 } else { (1.0 - eta0) / mi.b as f64 },
            concentrated: fallback,
        },
        fallback,
    }
}

/// Classical comparison values for one `(b, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalColumns {
    pub fredman_komlos: f64,
    pub korner_marton: f64,
    pub korner_marton_j: usize,
    pub dvj: f64,
    /// Not a theorem.
    pub conjectured: f64,
    pub conjectured_j: usize,
}

pub fn classical_columns(b: usize, k: usize) -> Result<ClassicalColumns> {
    let p = ProblemParams::new(b, k)?;
    let (km, kmj) = korner_marton(p)?;
    let conj = conjectured_bound(p)?;
    Ok(ClassicalColumns {
        fredman_komlos: fredman_komlos(p),
        korner_marton: km,
        korner_marton_j: kmj,
        dvj: dvj_bound(p)?,
        conjectured: conj.value,
        conjectured_j: conj.argmin_j,
    })
}

/// Which computation produced the reported bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundPath {
    Partition,
    /// Global maximum of Ψ_(k-2) at the uniform pair, in closed form.
    UniformShortcut,
    /// Global maximum of Ψ_(k-2) found numerically away from the uniform pair.
    GlobalMaximum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOutcome {
    pub j: usize,
    pub spec: PartitionSpec,
    pub mi: MiTuple,
    pub subdomains: Vec<SubdomainMax>,
    pub combined: Combined,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalOutcome {
    pub j: usize,
    pub uniform_value: f64,
    /// Numerical maximum (plus certified slack, if any).
    pub engine_value: f64,
    pub m: f64,
    pub path: BoundPath,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub b: usize,
    pub k: usize,
    /// Order used by the winning path.
    pub j: usize,
    pub path: BoundPath,
    /// Bound on the quadratic form used by the winning path.
    pub m: f64,
    pub rate: f64,
    pub epsilon_label: Option<String>,
    pub partition: Option<PartitionOutcome>,
    pub global: Option<GlobalOutcome>,
    pub classical: ClassicalColumns,
    pub certified: bool,
    pub elapsed_ms: f64,
}

/// Partition path at order `j`: four subdomain maxima, combined, then
/// turned into a rate bound.
pub fn partition_bound(
    b: usize,
    k: usize,
    j: usize,
    spec: PartitionSpec,
    opts: &EngineOptions,
) -> Result<PartitionOutcome> {
    let pp = ProblemParams::new(b, k)?.with_j(j)?;
    let spec = PartitionSpec::new(spec.kind, spec.epsilon, b, j)?;
    let subdomains = MSelector::ALL
        .iter()
        .map(|&w| compute_mi(spec, w, b, j, opts))
        .collect::<Result<Vec<_>>>()?;
    let m: [f64; 4] = std::array::from_fn(|i| subdomains[i].certified_value());
    let mi = MiTuple::new(m, b)?;
    let combined = combine(&mi);
    let rate = rate_from_mj(pp, combined.m)?;
    Ok(PartitionOutcome {
        j,
        spec,
        mi,
        subdomains,
        combined,
        rate,
    })
}

/// Bound from the global maximum of Ψ_(k-2). When the numerical maximum does
/// not exceed the uniform value the exact closed form is used.
pub fn global_bound(b: usize, k: usize, opts: &EngineOptions) -> Result<GlobalOutcome> {
    let j = k - 2;
    let pp = ProblemParams::new(b, k)?.with_j(j)?;
    let uniform = psi_uniform_closed_form(PsiParams::new(b, j)?);
    let g = global_maximum(b, j, opts)?;
    let engine_value = g.value + g.certified_excess;
    let (m, path) = if engine_value <= uniform * (1.0 + 1e-12) {
        (uniform, BoundPath::UniformShortcut)
    } else {
        (engine_value, BoundPath::GlobalMaximum)
    };
    Ok(GlobalOutcome {
        j,
        uniform_value: uniform,
        engine_value,
        m,
        path,
        rate: rate_from_mj(pp, m)?,
    })
}

/// Rate bound with `M = Ψ_(k-2)(u; u)`, valid for pairs where the global
/// maximum of Ψ_(k-2) sits at the uniform pair (see
/// [`crate::presets::SHORTCUT_PAIRS`]; [`global_bound`] checks it).
pub fn shortcut_bound(b: usize, k: usize) -> Result<f64> {
    let pp = ProblemParams::new(b, k)?.with_j(k.saturating_sub(2))?;
    let m = psi_uniform_closed_form(PsiParams::new(b, k - 2)?);
    rate_from_mj(pp, m)
}

/// Runs the partition path and the global-maximum path and reports the
/// smaller rate bound.
pub fn full_bound(
    b: usize,
    k: usize,
    j: usize,
    spec: PartitionSpec,
    opts: &EngineOptions,
) -> Result<BoundReport> {
    let start = Instant::now();
    let partition = partition_bound(b, k, j, spec, opts)?;
    let global = global_bound(b, k, opts)?;
    let classical = classical_columns(b, k)?;
    let (path, jj, m, rate) = if partition.rate <= global.rate {
        (BoundPath::Partition, j, partition.combined.m, partition.rate)
    } else {
        (global.path, global.j, global.m, global.rate)
    };
    Ok(BoundReport {
        b,
        k,
        j: jj,
        path,
        m,
        rate,
        epsilon_label: None,
        partition: Some(partition),
        global: Some(global),
        classical,
        certified: opts.certify.is_some(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Threshold used when none is given: half the largest admissible value.
pub fn default_epsilon(kind: PartitionKind, b: usize, j: usize) -> f64 {
    0.5 * PartitionSpec::epsilon_cap(kind, b, j)
}

/// Tries both partition kinds (each with `eps`, or its default when `None`)
/// and the global-maximum path, and reports the smallest rate. Kinds for
/// which `eps` is not admissible are skipped; the report keeps the better
/// partition outcome.
pub fn auto_bound(
    b: usize,
    k: usize,
    j: usize,
    eps: Option<f64>,
    opts: &EngineOptions,
) -> Result<BoundReport> {
    let start = Instant::now();
    let mut best: Option<PartitionOutcome> = None;
    let mut last_err = None;
    for kind in [PartitionKind::MaxValue, PartitionKind::MinValue] {
        let e = eps.unwrap_or_else(|| default_epsilon(kind, b, j));
        let spec = match PartitionSpec::new(kind, e, b, j) {
            Ok(s) => s,
            Err(err) => {
                last_err = Some(err);
                continue;
            }
        };
        let out = partition_bound(b, k, j, spec, opts)?;
        if best.as_ref().is_none_or(|o| out.rate < o.rate) {
            best = Some(out);
        }
    }
    let partition = best.ok_or_else(|| last_err.expect("two kinds tried"))?;
    let global = global_bound(b, k, opts)?;
    let (path, jj, m, rate) = if partition.rate <= global.rate {
        (BoundPath::Partition, j, partition.combined.m, partition.rate)
    } else {
        (global.path, global.j, global.m, global.rate)
    };
    Ok(BoundReport {
        b,
        k,
        j: jj,
        path,
        m,
        rate,
        epsilon_label: None,
        classical: classical_columns(b, k)?,
        partition: Some(partition),
        global: Some(global),
        certified: opts.certify.is_some(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Global-maximum path only.
pub fn global_only_bound(b: usize, k: usize, opts: &EngineOptions) -> Result<BoundReport> {
    let start = Instant::now();
    let global = global_bound(b, k, opts)?;
    Ok(BoundReport {
        b,
        k,
        j: global.j,
        path: global.path,
        m: global.m,
        rate: global.rate,
        epsilon_label: None,
        partition: None,
        classical: classical_columns(b, k)?,
        global: Some(global),
        certified: opts.certify.is_some(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
