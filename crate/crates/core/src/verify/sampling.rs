//! Rejection sampling from the exact subdomain pairs.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{batch_rng, dirichlet_into, BATCH};
use crate::error::{Error, Result};
use crate::partition::{MSelector, PartitionKind, PartitionSpec, SubdomainMax};
use crate::psi::{psi_slices, PsiParams};

/// Rejection rate at which a run is reported as inconclusive.
pub const INCONCLUSIVE_REJECTION: f64 = 0.9999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub which: MSelector,
    pub spec: PartitionSpec,
    pub b: usize,
    pub j: usize,
    /// Pairs drawn.
    pub count: usize,
    /// Pairs that passed the membership test.
    pub accepted: usize,
    pub best_value: f64,
    pub best_p: Vec<f64>,
    pub best_q: Vec<f64>,
    pub inconclusive: bool,
    pub seed: u64,
    /// Engine value compared against, when attached.
    pub engine_value: Option<f64>,
    pub certified_excess: f64,
}

impl SampleReport {
    pub fn with_engine(mut self, m: &SubdomainMax) -> Self {
        self.engine_value = Some(m.value);
        self.certified_excess = m.certified_excess;
        self
    }

    /// `best ≤ engine + excess + 1e-9`; `None` if no engine value is attached.
    pub fn dominated(&self) -> Option<bool> {
        self.engine_value
            .map(|v| self.best_value <= v + self.certified_excess + 1e-9)
    }
}

/// Membership in the balanced part (`index = None`) or the unbalanced part
/// at `index`.
pub fn is_member(kind: PartitionKind, eps: f64, index: Option<usize>, p: &[f64]) -> bool {
    match (kind, index) {
        (PartitionKind::MaxValue, None) => p.iter().all(|&x| x <= 1.0 - eps),
        (PartitionKind::MaxValue, Some(i)) => p[i] > 1.0 - eps,
        (PartitionKind::MinValue, None) => p.iter().all(|&x| x >= eps),
        (PartitionKind::MinValue, Some(i)) => {
            p[i] < eps
                && p.iter().all(|&x| x >= p[i])
                && p[..i].iter().all(|&x| x > p[i])
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, kind: PartitionKind, eps: f64, index: Option<usize>, out: &mut [f64]) {
    let b = out.len();
    match (kind, index) {
        (PartitionKind::MaxValue, None) => dirichlet_into(rng, 1.0, out),
        (PartitionKind::MaxValue, Some(i)) => {
            let top = 1.0 - eps * rng.random::<f64>();
            let mut rest = vec![0.0; b - 1];
            dirichlet_into(rng, 1.0 - top, &mut rest);
            let mut it = rest.into_iter();
            for (h, x) in out.iter_mut().enumerate() {
                *x = if h == i { top } else { it.next().unwrap() };
            }
        }
        (PartitionKind::MinValue, None) => {
            dirichlet_into(rng, 1.0 - b as f64 * eps, out);
            for x in out.iter_mut() {
                *x += eps;
            }
        }
        (PartitionKind::MinValue, Some(i)) => {
            dirichlet_into(rng, 1.0, out);
            let argmin = (0..b)
                .min_by(|&a, &c| out[a].total_cmp(&out[c]))
                .expect("nonempty");
            out.swap(argmin, i);
        }
    }
}

/// Parts the two vectors are drawn from.
fn parts(which: MSelector) -> (Option<usize>, Option<usize>) {
    match which {
        MSelector::M1 => (None, None),
        MSelector::M2 => (None, Some(0)),
        MSelector::M3 => (Some(0), Some(0)),
        MSelector::M4 => (Some(0), Some(1)),
    }
}

struct BatchBest {
    accepted: usize,
    value: f64,
    p: Vec<f64>,
    q: Vec<f64>,
}

/// Draws `count` pairs from the subdomain pair for `which`, keeps those
/// that pass the exact membership test, and reports the largest Ψ_j seen.
pub fn sample_subdomain(
    spec: PartitionSpec,
    which: MSelector,
    b: usize,
    j: usize,
    count: usize,
    seed: u64,
) -> Result<SampleReport> {
    PsiParams::new(b, j)?;
    PartitionSpec::new(spec.kind, spec.epsilon, b, j)?;
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let (ip, iq) = parts(which);
    let batches = count.div_ceil(BATCH);
    let results: Vec<BatchBest> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = batch_rng(seed, bi as u64);
            let n = BATCH.min(count - bi * BATCH);
            let mut p = vec![0.0; b];
            let mut q = vec![0.0; b];
            let mut best = BatchBest {
                accepted: 0,
                value: f64::NEG_INFINITY,
                p: vec![],
                q: vec![],
            };
            for _ in 0..n {
                draw(&mut rng, spec.kind, spec.epsilon, ip, &mut p);
                draw(&mut rng, spec.kind, spec.epsilon, iq, &mut q);
                if !is_member(spec.kind, spec.epsilon, ip, &p)
                    || !is_member(spec.kind, spec.epsilon, iq, &q)
                {
                    continue;
                }
                best.accepted += 1;
                let v = psi_slices(&p, &q, j);
                if v > best.value {
                    best.value = v;
                    best.p.clone_from(&p);
                    best.q.clone_from(&q);
                }
            }
            best
        })
        .collect();

    let accepted: usize = results.iter().map(|r| r.accepted).sum();
    let mut best: Option<&BatchBest> = None;
    for r in &results {
        if r.accepted > 0 && best.is_none_or(|x| r.value > x.value) {
            best = Some(r);
        }
    }
    let rejection = 1.0 - accepted as f64 / count as f64;
    Ok(SampleReport {
        which,
        spec,
        b,
        j,
        count,
        accepted,
        best_value: best.map_or(f64::NEG_INFINITY, |r| r.value),
        best_p: best.map_or_else(Vec::new, |r| r.p.clone()),
        best_q: best.map_or_else(Vec::new, |r| r.q.clone()),
        inconclusive: accepted == 0 || rejection >= INCONCLUSIVE_REJECTION,
        seed,
        engine_value: None,
        certified_excess: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: PartitionKind, e: f64) -> PartitionSpec {
        PartitionSpec { kind, epsilon: e }
    }

    #[test]
    fn membership_predicates() {
        let k = PartitionKind::MinValue;
        assert!(is_member(k, 0.1, Some(1), &[0.5, 0.05, 0.45]));
        // Tie with an earlier coordinate breaks the strict order.
        assert!(!is_member(k, 0.1, Some(1), &[0.05, 0.05, 0.9]));
        assert!(is_member(k, 0.1, Some(0), &[0.05, 0.05, 0.9]));
        assert!(!is_member(k, 0.1, None, &[0.05, 0.05, 0.9]));
        let k = PartitionKind::MaxValue;
        assert!(is_member(k, 0.1, Some(2), &[0.0, 0.05, 0.95]));
        assert!(!is_member(k, 0.1, Some(2), &[0.0, 0.1, 0.9]));
        assert!(is_member(k, 0.1, None, &[0.0, 0.1, 0.9]));
    }

    #[test]
    fn deterministic_for_seed() {
        let s = spec(PartitionKind::MinValue, 0.05);
        let a = sample_subdomain(s, MSelector::M2, 6, 4, 5000, 42).unwrap();
        let b = sample_subdomain(s, MSelector::M2, 6, 4, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_subdomain(s, MSelector::M2, 6, 4, 5000, 43).unwrap();
        assert_ne!(a.best_value, c.best_value);
    }

    #[test]
    fn unbalanced_pairs_are_small() {
        let s = spec(PartitionKind::MaxValue, 0.01);
        let r = sample_subdomain(s, MSelector::M3, 7, 5, 2000, 1).unwrap();
        assert_eq!(r.accepted, 2000);
        assert!(r.best_value < 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = spec(PartitionKind::MinValue, 0.5);
        assert!(sample_subdomain(s, MSelector::M1, 6, 4, 10, 0).is_err());
        let s = spec(PartitionKind::MinValue, 0.05);
        assert!(sample_subdomain(s, MSelector::M1, 6, 4, 0, 0).is_err());
    }
}
