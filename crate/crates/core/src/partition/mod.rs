//! Subdomain maxima of Ψ_j for the two partitions of the simplex.
//!
//! The max-value partition splits distributions by whether some entry
//! exceeds `1 - ε`; the min-value partition by whether the smallest entry is
//! below `ε`. For each partition four suprema `M1..M4` are needed, one per
//! pairing of balanced and unbalanced parts. Each is reduced to a finite list
//! of block-structured configurations (see [`families`]) and every
//! configuration is maximized numerically.

pub mod certify;
pub mod config;
pub mod families;
pub mod maximize;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psi::PsiParams;

pub use certify::{certify_excess, Certificate, DEFAULT_CELL_BUDGET};
pub use config::{Assignment, Block, Configuration, Entry, VarBox};
pub use families::{enumerate_candidates, global_family, Enumeration};
pub use maximize::{maximize_config, ConfigMax, MaximizeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionKind {
    MaxValue,
    MinValue,
}

impl PartitionKind {
    pub fn name(self) -> &'static str {
        match self {
            PartitionKind::MaxValue => "max",
            PartitionKind::MinValue => "min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub kind: PartitionKind,
    pub epsilon: f64,
}

impl PartitionSpec {
    /// Max-value needs `0 < ε ≤ 1/(j+1)`, min-value needs `0 < ε < 1/b`.
    pub fn new(kind: PartitionKind, epsilon: f64, b: usize, j: usize) -> Result<Self> {
        let ok = match kind {
            PartitionKind::MaxValue => epsilon > 0.0 && epsilon <= 1.0 / (j + 1) as f64 + 1e-15,
            PartitionKind::MinValue => epsilon > 0.0 && epsilon < 1.0 / b as f64,
        };
        if !ok || !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon {epsilon} outside the admissible range for the {} partition (b={b}, j={j})",
                kind.name()
            )));
        }
        Ok(Self { kind, epsilon })
    }

    /// Largest admissible threshold (exclusive for the min-value kind).
    pub fn epsilon_cap(kind: PartitionKind, b: usize, j: usize) -> f64 {
        match kind {
            PartitionKind::MaxValue => 1.0 / (j + 1) as f64,
            PartitionKind::MinValue => 1.0 / b as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MSelector {
    M1,
    M2,
    M3,
    M4,
}

impl MSelector {
    pub const ALL: [MSelector; 4] = [MSelector::M1, MSelector::M2, MSelector::M3, MSelector::M4];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Whether the families for this selector only bound the supremum from
/// above (relaxed domains) rather than attaining it.
pub fn is_relaxation(kind: PartitionKind, which: MSelector) -> bool {
    matches!(
        (kind, which),
        (PartitionKind::MaxValue, MSelector::M2)
            | (PartitionKind::MinValue, MSelector::M3)
            | (PartitionKind::MinValue, MSelector::M4)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub maximize: MaximizeOptions,
    /// Certification grid step; `None` disables certification.
    pub certify: Option<f64>,
    pub enumeration: Enumeration,
    pub cell_budget: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            maximize: MaximizeOptions::default(),
            certify: None,
            enumeration: Enumeration::Restricted,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdomainMax {
    pub which: MSelector,
    pub value: f64,
    pub argmax: Configuration,
    pub assignment: Assignment,
    /// Slack added by certification; 0 when certification is off.
    pub certified_excess: f64,
    /// The value bounds a relaxation of the subdomain.
    pub upper_bound_only: bool,
    pub configs_examined: usize,
    /// Shapes whose feasible box was empty.
    pub configs_vacuous: usize,
    /// Certification hit its cell budget somewhere (bound still valid).
    pub certification_exhausted: bool,
}

impl SubdomainMax {
    /// `value + certified_excess`.
    pub fn certified_value(&self) -> f64 {
        self.value + self.certified_excess
    }
}

/// Values within this distance of the best count as ties.
const TIE: f64 = 1e-13;

/// Maximum over a list of candidate shapes, optionally certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMax {
    pub value: f64,
    pub argmax: Configuration,
    pub assignment: Assignment,
    pub certified_excess: f64,
    pub configs_examined: usize,
    pub configs_vacuous: usize,
    pub certification_exhausted: bool,
}

/// Maximizes Ψ_j over every feasible candidate. Ties within 1e-13 go to the
/// lexicographically smallest `(family_tag, l1, l2)`.
pub fn maximize_family(
    candidates: &[Configuration],
    params: PsiParams,
    opts: &EngineOptions,
) -> Result<FamilyMax> {
    let compiled: Vec<_> = candidates
        .iter()
        .map(|c| c.compile())
        .collect::<Result<Vec<_>>>()?;
    let feasible: Vec<_> = compiled.into_iter().filter(|c| c.feasible()).collect();
    let vacuous = candidates.len() - feasible.len();
    if feasible.is_empty() {
        return Err(Error::EmptyBox(format!(
            "no feasible configuration among {} candidates",
            candidates.len()
        )));
    }
    if let Some(c) = feasible.iter().find(|c| c.config().size() != params.b()) {
        return Err(Error::DimensionMismatch {
            expected: params.b(),
            got: c.config().size(),
        });
    }

    let results: Vec<_> = feasible
        .par_iter()
        .map(|c| maximize::maximize_compiled(c, params.j(), &opts.maximize))
        .collect();
    let value = results.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let best = (0..results.len())
        .filter(|&i| results[i].value >= value - TIE)
        .min_by(|&a, &b| {
            let ca = feasible[a].config();
            let cb = feasible[b].config();
            (&ca.family_tag, ca.l1, ca.l2, a).cmp(&(&cb.family_tag, cb.l1, cb.l2, b))
        })
        .expect("nonempty");

    let mut certified_excess = 0.0;
    let mut exhausted = false;
    if let Some(step) = opts.certify {
        let certs: Vec<Certificate> = feasible
            .par_iter()
            .map(|c| certify::certify_compiled(c, params.j(), step, value, opts.cell_budget))
            .collect();
        let upper = certs.iter().map(|c| c.upper).fold(value, f64::max);
        certified_excess = upper - value;
        exhausted = certs.iter().any(|c| c.exhausted);
    }

    Ok(FamilyMax {
        value,
        argmax: feasible[best].config().clone(),
        assignment: results[best].assignment.clone(),
        certified_excess,
        configs_examined: feasible.len(),
        configs_vacuous: vacuous,
        certification_exhausted: exhausted,
    })
}

pub fn compute_mi(
    spec: PartitionSpec,
    which: MSelector,
    b: usize,
    j: usize,
    opts: &EngineOptions,
) -> Result<SubdomainMax> {
    let params = PsiParams::new(b, j)?;
    PartitionSpec::new(spec.kind, spec.epsilon, b, j)?;
    let candidates = enumerate_candidates(spec, which, b, j, opts.enumeration);
    let fm = maximize_family(&candidates, params, opts)?;
    Ok(SubdomainMax {
        which,
        value: fm.value,
        argmax: fm.argmax,
        assignment: fm.assignment,
        certified_excess: fm.certified_excess,
        upper_bound_only: is_relaxation(spec.kind, which),
        configs_examined: fm.configs_examined,
        configs_vacuous: fm.configs_vacuous,
        certification_exhausted: fm.certification_exhausted,
    })
}

/// Maximum of Ψ_j over all pairs of probability vectors.
pub fn global_maximum(b: usize, j: usize, opts: &EngineOptions) -> Result<FamilyMax> {
    let params = PsiParams::new(b, j)?;
    maximize_family(&families::global_family(b, j, opts.enumeration), params, opts)
}
