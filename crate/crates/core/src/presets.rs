//! Published parameter choices and reference values.
//!
//! Literature columns are static data copied from print. They are tagged as
//! such and never mixed with computed values.

use serde::Serialize;

use crate::partition::PartitionKind;

/// Tag attached to every static reference value.
pub const LITERATURE_TAG: &str = "literature value";

/// A `(b, k)` pair with the partition and threshold chosen in print.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionPreset {
    pub b: usize,
    pub k: usize,
    pub j: usize,
    pub kind: PartitionKind,
    /// Threshold exactly as printed.
    pub eps_label: &'static str,
}

impl PartitionPreset {
    pub fn epsilon(&self) -> f64 {
        parse_epsilon(self.eps_label).expect("preset labels parse")
    }
}

/// Parses `a/b`, a decimal, or `(4+sqrt5)/44`.
pub fn parse_epsilon(label: &str) -> Option<f64> {
    let s = label.trim();
    if s == "(4+sqrt5)/44" {
        return Some((4.0 + 5f64.sqrt()) / 44.0);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        return (d != 0.0).then_some(n / d);
    }
    s.parse().ok()
}

const fn max_preset(b: usize, k: usize, eps_label: &'static str) -> PartitionPreset {
    PartitionPreset {
        b,
        k,
        j: k - 2,
        kind: PartitionKind::MaxValue,
        eps_label,
    }
}

const fn min_preset(b: usize, k: usize, j: usize, eps_label: &'static str) -> PartitionPreset {
    PartitionPreset {
        b,
        k,
        j,
        kind: PartitionKind::MinValue,
        eps_label,
    }
}

pub const PARTITION_PRESETS: [PartitionPreset; 12] = [
    min_preset(5, 5, 3, "(4+sqrt5)/44"),
    min_preset(6, 5, 3, "1/10"),
    min_preset(6, 6, 4, "1/20"),
    max_preset(7, 7, "9/100"),
    max_preset(8, 8, "3/25"),
    max_preset(9, 8, "1/10"),
    max_preset(10, 9, "1/15"),
    max_preset(11, 10, "1/11"),
    max_preset(12, 10, "1/20"),
    max_preset(13, 11, "1/25"),
    max_preset(14, 12, "1/13"),
    max_preset(15, 13, "1/12"),
];

/// Pairs whose printed bound comes from the uniform global maximum of
/// Ψ_(k-2).
pub const SHORTCUT_PAIRS: [(usize, usize); 27] = [
    (7, 6),
    (8, 6),
    (9, 6),
    (10, 6),
    (11, 6),
    (12, 6),
    (13, 6),
    (14, 6),
    (8, 7),
    (9, 7),
    (10, 7),
    (11, 7),
    (12, 7),
    (13, 7),
    (14, 7),
    (10, 8),
    (11, 8),
    (12, 8),
    (13, 8),
    (14, 8),
    (11, 9),
    (12, 9),
    (13, 9),
    (14, 9),
    (13, 10),
    (14, 10),
    (14, 11),
];

pub fn partition_preset(b: usize, k: usize) -> Option<PartitionPreset> {
    PARTITION_PRESETS.iter().copied().find(|p| p.b == b && p.k == k)
}

pub fn is_shortcut_pair(b: usize, k: usize) -> bool {
    SHORTCUT_PAIRS.contains(&(b, k))
}

/// One row of the main comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainRow {
    pub b: usize,
    pub k: usize,
    /// Printed bound of the partition method.
    pub ours: &'static str,
    pub arikan: &'static str,
    pub guruswami_riazanov: &'static str,
    pub korner_marton: &'static str,
    pub shortcut: bool,
}

const fn row(
    b: usize,
    k: usize,
    ours: &'static str,
    arikan: &'static str,
    gr: &'static str,
    km: &'static str,
    shortcut: bool,
) -> MainRow {
    MainRow {
        b,
        k,
        ours,
        arikan,
        guruswami_riazanov: gr,
        korner_marton: km,
        shortcut,
    }
}

pub const MAIN_TABLE: [MainRow; 39] = [
    row(5, 5, "0.16894", "0.23560", "0.19079", "0.19200", false),
    row(6, 5, "0.34512", "0.44149", "0.43207", "0.44027", false),
    row(6, 6, "0.08475", "0.15484", "0.09228", "0.09260", false),
    row(7, 6, "0.19897", "0.30554", "0.23524", "0.23765", true),
    row(8, 6, "0.31799", "0.44888", "0.40330", "0.41016", true),
    row(9, 6, "0.43237", "0.58303", "0.58486", "0.59455", true),
    row(10, 6, "0.53909", "0.73304", "0.76977", "0.78170", true),
    row(11, 6, "0.63766", "0.87038", "0.95285", "0.96640", true),
    row(12, 6, "0.72848", "0.99588", "1.13118", "1.14584", true),
    row(13, 6, "0.81227", "1.11084", "1.30322", "1.31855", true),
    row(14, 6, "0.88978", "1.21657", "1.46822", "1.48388", true),
    row(7, 7, "0.04090", "0.09747", "0.04279", "0.04284", false),
    row(8, 7, "0.10865", "0.20340", "0.12134", "0.12189", true),
    row(9, 7, "0.19054", "0.31204", "0.22547", "0.22761", true),
    row(10, 7, "0.27741", "0.41982", "0.34615", "0.35108", true),
    row(11, 7, "0.36424", "0.52472", "0.47856", "0.48538", true),
    row(12, 7, "0.44850", "0.65160", "0.61698", "0.62549", true),
    row(13, 7, "0.52902", "0.77148", "0.75796", "0.76792", true),
    row(14, 7, "0.60538", "0.88384", "0.89915", "0.91027", true),
    row(8, 8, "0.01889", "0.05769", "0.01922", "0.01923", false),
    row(9, 8, "0.05616", "0.12874", "0.06001", "0.06013", false),
    row(10, 8, "0.10791", "0.20754", "0.12048", "0.12096", true),
    row(11, 8, "0.16878", "0.29023", "0.19680", "0.19818", true),
    row(12, 8, "0.23451", "0.37434", "0.28470", "0.28797", true),
    row(13, 8, "0.30214", "0.45827", "0.38245", "0.38694", true),
    row(14, 8, "0.36974", "0.56612", "0.48658", "0.49227", true),
    row(10, 9, "0.02773", "0.07668", "0.02874", "0.02876", false),
    row(11, 9, "0.05796", "0.13098", "0.06197", "0.06208", true),
    row(12, 9, "0.09730", "0.19157", "0.10746", "0.10778", true),
    row(13, 9, "0.14332", "0.25611", "0.16368", "0.16444", true),
    row(14, 9, "0.19382", "0.32294", "0.22865", "0.23033", true),
    row(11, 10, "0.01321", "0.04289", "0.01342", "0.01343", false),
    row(12, 10, "0.02978", "0.07806", "0.03093", "0.03095", false),
    row(13, 10, "0.05342", "0.12009", "0.05674", "0.05681", true),
    row(14, 10, "0.08332", "0.16726", "0.09071", "0.09090", true),
    row(13, 11, "0.01476", "0.04400", "0.01506", "0.01506", false),
    row(14, 11, "0.02815", "0.07141", "0.02915", "0.02916", true),
    row(14, 12, "0.00712", "0.02361", "0.00718", "0.00718", false),
    row(15, 13, "0.00335", "0.01218", "0.00336", "0.00336", false),
];

/// Rows for `k = 4` and large alphabets, with the generalized bound of
/// [`crate::classical::dvj_bound`] in the first column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallKRow {
    pub b: usize,
    pub k: usize,
    pub dvj: &'static str,
    /// Generalized global-maximum bound; `None` where it was not computed.
    pub global_psi_max: Option<&'static str>,
    pub arikan: &'static str,
    pub guruswami_riazanov: &'static str,
    pub korner_marton: &'static str,
}

pub const SMALL_K_TABLE: [SmallKRow; 5] = [
    SmallKRow {
        b: 5,
        k: 4,
        dvj: "0.57303",
        global_psi_max: Some("0.66126"),
        arikan: "0.61142",
        guruswami_riazanov: "0.74834",
        korner_marton: "0.73697(0)",
    },
    SmallKRow {
        b: 6,
        k: 4,
        dvj: "0.77709",
        global_psi_max: Some("0.87963"),
        arikan: "0.83904",
        guruswami_riazanov: "1.09604",
        korner_marton: "1.00000(0)",
    },
    SmallKRow {
        b: 7,
        k: 4,
        dvj: "0.94372",
        global_psi_max: Some("1.03711"),
        arikan: "1.02931",
        guruswami_riazanov: "1.40593",
        korner_marton: "1.22239(0)",
    },
    SmallKRow {
        b: 100,
        k: 6,
        dvj: "2.81342",
        global_psi_max: None,
        arikan: "3.61848(2)",
        guruswami_riazanov: "4.87959(2)",
        korner_marton: "4.32193(0)",
    },
    SmallKRow {
        b: 100,
        k: 7,
        dvj: "2.67473",
        global_psi_max: None,
        arikan: "3.41158(2)",
        guruswami_riazanov: "4.47696(2)",
        korner_marton: "4.05889(0)",
    },
];

/// Rows with `b` close to `k`, printed in scientific notation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearDiagonalRow {
    pub b: usize,
    pub k: usize,
    pub guruswami_riazanov: &'static str,
    pub global_psi_max: &'static str,
    pub arikan: &'static str,
    /// Mantissa and exponent as printed, e.g. `8.4300e-3`.
    pub korner_marton: &'static str,
}

const fn nd(
    b: usize,
    k: usize,
    gr: &'static str,
    g: &'static str,
    a: &'static str,
    km: &'static str,
) -> NearDiagonalRow {
    NearDiagonalRow {
        b,
        k,
        guruswami_riazanov: gr,
        global_psi_max: g,
        arikan: a,
        korner_marton: km,
    }
}

pub const NEAR_DIAGONAL_TABLE: [NearDiagonalRow; 8] = [
    nd(9, 9, "8.4288e-3", "0.00946", "0.03182", "8.4300e-3"),
    nd(10, 10, "3.6287e-3", "0.00419", "0.01642", "3.6288e-3"),
    nd(11, 11, "1.53895e-3", "0.00181", "0.00803", "1.53897e-3"),
    nd(12, 11, "6.13036e-3", "0.00664", "0.02266", "6.13075e-3"),
    nd(12, 12, "6.44678e-4", "0.00077", "0.00377", "6.44679e-4"),
    nd(13, 12, "2.75350e-3", "0.00305", "0.01143", "2.75355e-3"),
    nd(13, 13, "2.672760e-4", "0.00033", "0.00172", "2.672761e-4"),
    nd(14, 13, "1.218595e-3", "0.00138", "0.00556", "1.218599e-3"),
];

/// Significant digits of a mantissa string like `8.4300e-3`.
pub fn significant_digits(printed: &str) -> usize {
    let mantissa = printed.split('e').next().unwrap_or(printed);
    mantissa.chars().filter(|c| c.is_ascii_digit()).count()
}

/// Printed subdomain maxima for one `(b, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiRow {
    pub b: usize,
    pub k: usize,
    pub m: [&'static str; 4],
}

pub const MAX_PARTITION_MI: [MiRow; 9] = [
    MiRow { b: 7, k: 7, m: ["0.085679", "0.092593", "0.000006", "0.000107"] },
    MiRow { b: 8, k: 8, m: ["0.038453", "0.042840", "0.000002", "0.000022"] },
    MiRow { b: 9, k: 8, m: ["0.075870", "0.076905", "0.000001", "0.000015"] },
    MiRow { b: 10, k: 9, m: ["0.036289", "0.037935", "3.4e-9", "8.5e-8"] },
    MiRow { b: 11, k: 10, m: ["0.016928", "0.018144", "1.4e-9", "2.7e-8"] },
    MiRow { b: 12, k: 10, m: ["0.030945", "0.031036", "2.1e-11", "7.0e-9"] },
    MiRow { b: 13, k: 11, m: ["0.015057", "0.015473", "7.8e-14", "3.5e-12"] },
    MiRow { b: 14, k: 12, m: ["0.007176", "0.007529", "1.2e-12", "2.6e-11"] },
    MiRow { b: 15, k: 13, m: ["0.003360", "0.003588", "1.1e-13", "2.3e-12"] },
];

pub const MIN_PARTITION_MI: [MiRow; 3] = [
    MiRow { b: 5, k: 5, m: ["0.384033", "0.389226", "0.374759", "0.389226"] },
    MiRow { b: 6, k: 5, m: ["0.555625", "0.558467", "0.535106", "0.558467"] },
    MiRow { b: 6, k: 6, m: ["0.185185", "0.178857", "0.140664", "0.192000"] },
];

/// Printed combined constants `M`; `(6, 6)` is exactly `5/27`.
pub const COMBINED_M: [(usize, usize, &str); 12] = [
    (7, 7, "0.0861594"),
    (8, 8, "0.0388599"),
    (9, 8, "0.0758830"),
    (10, 9, "0.0363565"),
    (11, 10, "0.0170049"),
    (12, 10, "0.0309448"),
    (13, 11, "0.0150674"),
    (14, 12, "0.0071917"),
    (15, 13, "0.0033733"),
    (5, 5, "0.3873676"),
    (6, 5, "0.5567010"),
    (6, 6, "5/27"),
];

/// Parses a printed number, accepting `a/b` fractions and `e` exponents.
pub fn parse_printed(s: &str) -> f64 {
    let core = s.split('(').next().unwrap_or(s).trim();
    parse_epsilon(core).unwrap_or_else(|| panic!("unparsable printed value {s}"))
}

/// Whether a printed value uses two-significant-figure scientific notation.
pub fn is_rough(printed: &str) -> bool {
    printed.contains('e')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_labels() {
        assert_eq!(partition_preset(7, 7).unwrap().epsilon(), 0.09);
        let e = partition_preset(5, 5).unwrap().epsilon();
        assert!((e - 0.1417288).abs() < 1e-6);
        assert_eq!(parse_epsilon("0.05"), Some(0.05));
        assert_eq!(parse_epsilon("1/0"), None);
        assert!(partition_preset(7, 6).is_none());
    }

    #[test]
    fn tables_are_consistent() {
        for r in MAIN_TABLE {
            assert_eq!(r.shortcut, is_shortcut_pair(r.b, r.k));
            assert_eq!(!r.shortcut, partition_preset(r.b, r.k).is_some());
        }
        assert_eq!(parse_printed("5/27"), 5.0 / 27.0);
        assert_eq!(parse_printed("0.73697(0)"), 0.73697);
        assert_eq!(parse_printed("3.4e-9"), 3.4e-9);
        assert_eq!(significant_digits("2.672761e-4"), 7);
        assert!(is_rough("7.0e-9"));
    }
}
