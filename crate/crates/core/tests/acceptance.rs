//! End-to-end acceptance checks against published numbers. Each test prints
//! one `criterion N: PASS|FAIL` line followed by the offending cells.

use std::time::Instant;

use hashbound::classical::{
    balanced_fixed_point, dvj_bound, korner_marton, plotkin_combined_k4, plotkin_distance,
    ProblemParams,
};
use hashbound::combiner::{combine, f_eta, partition_bound, shortcut_bound, MiTuple};
use hashbound::partition::{
    compute_mi, EngineOptions, MSelector, PartitionKind, PartitionSpec,
};
use hashbound::presets::{
    is_rough, parse_printed, significant_digits, COMBINED_M, MAIN_TABLE, MAX_PARTITION_MI,
    MIN_PARTITION_MI, NEAR_DIAGONAL_TABLE, PARTITION_PRESETS, SHORTCUT_PAIRS, SMALL_K_TABLE,
};
use hashbound::psi::{psi_fast, psi_naive, DistVec, PsiParams};
use hashbound::rounding::{round_up_str, round_up_sig_str};
use hashbound::verify::{
    check_lemma_inequalities, max_code_exhaustive, sample_subdomain, LemmaCheck, SearchOrder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use std::io::Write;

fn report(n: usize, failures: &[String], summary: &str) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    // Straight to the stderr handle so the line survives output capture.
    let mut line = format!("criterion {n}: {status} ({summary})\n");
    for f in failures {
        line += &format!("    {f}\n");
    }
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(failures.is_empty(), "criterion {n} failed: {failures:?}");
}

/// Rate bound recomputed from scratch.
fn oracle_rate(b: usize, k: usize, j: usize, m: f64) -> f64 {
    let (b, k, j) = (b as f64, k as f64, j as f64);
    let a = 2.0 / (m * ((b - j) / (k - j - 1.0)).log2());
    let c = 1.0 / (b / (j - 1.0)).log2();
    1.0 / (a + c)
}

fn printed_ours(b: usize, k: usize) -> &'static str {
    MAIN_TABLE
        .iter()
        .find(|r| r.b == b && r.k == k)
        .expect("row exists")
        .ours
}

#[test]
fn criterion_1_partition_rates() {
    let mut failures = Vec::new();
    let mut slowest = 0.0f64;
    for p in PARTITION_PRESETS {
        let start = Instant::now();
        let spec = PartitionSpec::new(p.kind, p.epsilon(), p.b, p.j).unwrap();
        let out = partition_bound(p.b, p.k, p.j, spec, &EngineOptions::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let printed = printed_ours(p.b, p.k);
        let rounded = round_up_str(out.rate, 5);
        let oracle = oracle_rate(p.b, p.k, p.j, out.combined.m);
        let diff = (out.rate - parse_printed(printed)).abs();
        if rounded != printed || diff > 1e-4 || (oracle - out.rate).abs() > 1e-12 || secs > 60.0 {
            failures.push(format!(
                "({},{}): computed {:.7} -> {rounded}, printed {printed}, |diff| {diff:.2e}, {secs:.1}s",
                p.b, p.k, out.rate
            ));
        }
    }
    report(
        1,
        &failures,
        &format!("{} pairs, slowest {slowest:.1}s", PARTITION_PRESETS.len()),
    );
}

#[test]
fn criterion_2_uniform_shortcut_rates() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for &(b, k) in &SHORTCUT_PAIRS {
        let rate = shortcut_bound(b, k).unwrap();
        // Independent recomputation: M = 2·b(b-1)…(b-k+2) / b^(k-1).
        let m = 2.0 * (0..k - 1).map(|i| (b - i) as f64 / b as f64).product::<f64>();
        let oracle = oracle_rate(b, k, k - 2, m);
        let printed = printed_ours(b, k);
        let rounded = round_up_str(rate, 5);
        if rounded != printed || (oracle - rate).abs() > 1e-12 {
            failures.push(format!("({b},{k}): computed {rate:.7} -> {rounded}, printed {printed}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 1.0 {
        failures.push(format!("took {secs:.2}s"));
    }
    report(2, &failures, &format!("{} pairs in {secs:.3}s", SHORTCUT_PAIRS.len()));
}

#[test]
fn criterion_3_combined_constants() {
    let mut failures = Vec::new();
    for &(b, k, printed) in &COMBINED_M {
        let start = Instant::now();
        let p = PARTITION_PRESETS
            .iter()
            .find(|p| p.b == b && p.k == k)
            .expect("preset exists");
        let spec = PartitionSpec::new(p.kind, p.epsilon(), b, p.j).unwrap();
        let out = partition_bound(b, k, p.j, spec, &EngineOptions::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let want = parse_printed(printed);
        let diff = (out.combined.m - want).abs();
        if diff > 1e-5 || secs > 60.0 {
            failures.push(format!(
                "({b},{k}): computed {:.7}, printed {printed}, |diff| {diff:.2e}, {secs:.1}s",
                out.combined.m
            ));
        }
    }
    report(3, &failures, &format!("{} constants", COMBINED_M.len()));
}

#[test]
fn criterion_4_subdomain_maxima() {
    let mut failures = Vec::new();
    let mut checked = 0;
    let tables = [
        (PartitionKind::MaxValue, &MAX_PARTITION_MI[..]),
        (PartitionKind::MinValue, &MIN_PARTITION_MI[..]),
    ];
    for (kind, rows) in tables {
        for row in rows {
            let p = PARTITION_PRESETS
                .iter()
                .find(|p| p.b == row.b && p.k == row.k && p.kind == kind)
                .expect("preset exists");
            let spec = PartitionSpec::new(kind, p.epsilon(), p.b, p.j).unwrap();
            for (i, which) in MSelector::ALL.iter().enumerate() {
                let got = compute_mi(spec, *which, p.b, p.j, &EngineOptions::default())
                    .unwrap()
                    .value;
                let printed = row.m[i];
                let want = parse_printed(printed);
                let ok = if is_rough(printed) {
                    ((got - want) / want).abs() <= 0.05
                } else {
                    (got - want).abs() <= 1e-5
                };
                checked += 1;
                if !ok {
                    failures.push(format!(
                        "{} ({},{}) M{}: computed {got:.6e}, printed {printed}, upward 2-sig {}",
                        kind.name(),
                        row.b,
                        row.k,
                        i + 1,
                        round_up_sig_str(got, 2)
                    ));
                }
            }
        }
    }
    report(4, &failures, &format!("{checked} entries"));
}

#[test]
fn criterion_5_classical_columns() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in MAIN_TABLE.iter().filter(|r| r.k >= 4) {
        let (v, _) = korner_marton(ProblemParams::new(r.b, r.k).unwrap()).unwrap();
        let got = round_up_str(v, 5);
        checked += 1;
        if got != r.korner_marton {
            failures.push(format!(
                "KM ({},{}): computed {v:.8} -> {got}, printed {}",
                r.b, r.k, r.korner_marton
            ));
        }
    }
    for r in NEAR_DIAGONAL_TABLE {
        let (v, _) = korner_marton(ProblemParams::new(r.b, r.k).unwrap()).unwrap();
        let got = round_up_sig_str(v, significant_digits(r.korner_marton));
        checked += 1;
        if got != r.korner_marton {
            failures.push(format!(
                "KM ({},{}): computed {v:.10e} -> {got}, printed {}",
                r.b, r.k, r.korner_marton
            ));
        }
    }
    for r in SMALL_K_TABLE {
        let v = dvj_bound(ProblemParams::new(r.b, r.k).unwrap()).unwrap();
        let got = round_up_str(v, 5);
        checked += 1;
        if got != r.dvj {
            failures.push(format!(
                "DVJ ({},{}): computed {v:.8} -> {got}, printed {}",
                r.b, r.k, r.dvj
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 1.0 {
        failures.push(format!("took {secs:.2}s"));
    }
    report(5, &failures, &format!("{checked} cells in {secs:.3}s"));
}

fn random_dist(rng: &mut ChaCha8Rng, b: usize) -> DistVec {
    let mut v: Vec<f64> = (0..b).map(|_| Exp1.sample(rng)).collect();
    // Exact zeros exercise the boundary of the simplex.
    if rng.random_bool(0.2) {
        let z = rng.random_range(0..b);
        v[z] = 0.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    DistVec::relaxed(v).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    match rng.random_range(0..4) {
        // Sparse weights reach the faces of the simplex.
        0 => {
            let keep = rng.random_range(0..n);
            v.iter_mut().enumerate().for_each(|(i, x)| {
                if i != keep && rng.random_bool(0.7) {
                    *x = 0.0
                }
            });
        }
        1 => v.iter_mut().for_each(|x| *x = x.powi(4)),
        _ => {}
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

#[test]
fn criterion_6_property_suites() {
    let start = Instant::now();
    let mut failures = Vec::new();

    // Fast evaluation against the tuple-enumeration oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for b in 3..=7 {
        for j in 2..b {
            let params = PsiParams::new(b, j).unwrap();
            for _ in 0..10_000 {
                let p = random_dist(&mut rng, b);
                let q = random_dist(&mut rng, b);
                let d = (psi_fast(&p, &q, params).unwrap() - psi_naive(&p, &q, params).unwrap())
                    .abs();
                worst = worst.max(d);
            }
        }
    }
    if worst > 1e-12 {
        failures.push(format!("fast vs naive: worst |diff| {worst:.2e}"));
    }

    // Structural inequalities.
    let mut lemma_runs = 0;
    for (b, j) in [(5, 3), (6, 4), (7, 5), (9, 7)] {
        for which in LemmaCheck::ALL {
            let r = check_lemma_inequalities(which, b, j, 10_000, 7).unwrap();
            lemma_runs += 1;
            if !r.passed() {
                failures.push(format!(
                    "{} at (b={b}, j={j}): {} violations, worst gap {:.2e}",
                    which.name(),
                    r.violations,
                    r.worst_gap
                ));
            }
        }
    }

    // Combiner maximality over random weights, for every printed tuple.
    let tuples = MAX_PARTITION_MI
        .iter()
        .chain(MIN_PARTITION_MI.iter())
        .map(|r| {
            let m = std::array::from_fn(|i| parse_printed(r.m[i]));
            MiTuple::new(m, r.b).unwrap()
        });
    for (n, mi) in tuples.enumerate() {
        let c = combine(&mi);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..100_000 {
            let eta = random_weights(&mut rng, mi.b + 1);
            best = best.max(f_eta(&mi, &eta).unwrap());
        }
        if best > c.m + 1e-12 {
            failures.push(format!("combiner b={}: random {best} beats {}", mi.b, c.m));
        }
    }

    // Sampling never beats the engine (plus its certified slack).
    let mut sample_runs = 0;
    for p in PARTITION_PRESETS {
        let spec = PartitionSpec::new(p.kind, p.epsilon(), p.b, p.j).unwrap();
        let opts = EngineOptions {
            certify: Some(1e-3),
            ..EngineOptions::default()
        };
        for which in MSelector::ALL {
            let engine = compute_mi(spec, which, p.b, p.j, &opts).unwrap();
            let r = sample_subdomain(spec, which, p.b, p.j, 100_000, 42)
                .unwrap()
                .with_engine(&engine);
            sample_runs += 1;
            if r.inconclusive || r.dominated() != Some(true) {
                failures.push(format!(
                    "sampling {} ({},{}) {which:?}: best {:.6e} vs engine {:.6e}, accepted {}/{}",
                    p.kind.name(),
                    p.b,
                    p.k,
                    r.best_value,
                    engine.certified_value(),
                    r.accepted,
                    r.count
                ));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 600.0 {
        failures.push(format!("took {secs:.0}s"));
    }
    report(
        6,
        &failures,
        &format!(
            "fast/naive worst {worst:.1e}, {lemma_runs} lemma suites, {sample_runs} sampling runs, {secs:.1}s"
        ),
    );
}

#[test]
fn criterion_7_plotkin_consistency() {
    let mut failures = Vec::new();
    for b in 5..=14usize {
        let combined = plotkin_combined_k4(b).unwrap();
        let dvj = dvj_bound(ProblemParams::new(b, 4).unwrap()).unwrap();
        if !(combined < dvj) {
            failures.push(format!("b={b}: plotkin-combined {combined} not below {dvj}"));
        }
        // Intersection of R = δ(b-2)/b with δ = (1 - R/log2 b)(b-1)/b, solved
        // by hand: R = (b-1)(b-2)L / ((b-1)(b-2) + b²L).
        let bf = b as f64;
        let l = bf.log2();
        let closed = (bf - 1.0) * (bf - 2.0) * l / ((bf - 1.0) * (bf - 2.0) + bf * bf * l);
        let solved = balanced_fixed_point(b, 4, |r| plotkin_distance(b, r)).unwrap();
        if (solved - closed).abs() > 1e-9 {
            failures.push(format!("b={b}: fixed point {solved} vs closed form {closed}"));
        }
    }
    report(7, &failures, "b = 5..14");
}

/// Largest `(b, k)`-hash code among all subsets of `{1..b}^n`, by subset
/// enumeration. Only usable when `b^n ≤ 16`.
fn brute_force_max(b: usize, k: usize, n: usize) -> usize {
    let words: Vec<Vec<usize>> = (0..b.pow(n as u32))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let s = x % b;
                    x /= b;
                    s
                })
                .collect()
        })
        .collect();
    let w = words.len();
    let separated = |set: &[usize]| {
        (0..n).any(|c| {
            let mut seen = 0u32;
            set.iter().all(|&i| {
                let bit = 1 << words[i][c];
                let fresh = seen & bit == 0;
                seen |= bit;
                fresh
            })
        })
    };
    let mut best = 0;
    for mask in 0u32..1 << w {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<usize> = (0..w).filter(|i| mask >> i & 1 == 1).collect();
        let mut ok = true;
        // Every k-subset of the members.
        for sub in 0u32..1 << members.len() {
            if sub.count_ones() as usize == k {
                let set: Vec<usize> = (0..members.len())
                    .filter(|i| sub >> i & 1 == 1)
                    .map(|i| members[i])
                    .collect();
                if !separated(&set) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = size;
        }
    }
    best
}

#[test]
fn criterion_8_exhaustive_codes() {
    let mut failures = Vec::new();
    for b in 3..=5 {
        let r = max_code_exhaustive(b, b, 1, usize::MAX, SearchOrder::Ascending, 1 << 24).unwrap();
        if r.size != b || !r.complete {
            failures.push(format!("A({b},{b},1) = {} (complete: {})", r.size, r.complete));
        }
    }
    let asc = max_code_exhaustive(3, 3, 2, usize::MAX, SearchOrder::Ascending, 1 << 24).unwrap();
    let desc = max_code_exhaustive(3, 3, 2, usize::MAX, SearchOrder::Descending, 1 << 24).unwrap();
    let oracle = brute_force_max(3, 3, 2);
    if asc.size != desc.size || !asc.complete || !desc.complete || asc.size != oracle {
        failures.push(format!(
            "A(3,3,2): ascending {}, descending {}, subset enumeration {oracle}",
            asc.size, desc.size
        ));
    }
    report(8, &failures, &format!("A(3,3,2) = {}", asc.size));
}
