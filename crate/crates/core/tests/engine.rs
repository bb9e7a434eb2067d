use hashbound::partition::{
    compute_mi, global_maximum, EngineOptions, Enumeration, MSelector, PartitionKind,
    PartitionSpec,
};
use hashbound::psi::{psi_uniform_closed_form, PsiParams};

fn both(spec: PartitionSpec, b: usize, j: usize) {
    let unrestricted = EngineOptions {
        enumeration: Enumeration::Unrestricted,
        ..EngineOptions::default()
    };
    for which in MSelector::ALL {
        let r = compute_mi(spec, which, b, j, &EngineOptions::default()).unwrap();
        let u = compute_mi(spec, which, b, j, &unrestricted).unwrap();
        assert!(
            (r.value - u.value).abs() <= 1e-12 * u.value.max(1e-300) + 1e-300,
            "{:?} {which:?} b={b} j={j}: restricted {} vs unrestricted {}",
            spec.kind,
            r.value,
            u.value
        );
        assert!(r.configs_examined <= u.configs_examined);
    }
}

#[test]
fn zero_count_rule_loses_nothing_on_max_partitions() {
    for (b, k, eps) in [(7, 7, 0.09), (8, 8, 0.12), (9, 8, 0.1), (6, 5, 0.15)] {
        let j = k - 2;
        both(PartitionSpec::new(PartitionKind::MaxValue, eps, b, j).unwrap(), b, j);
    }
}

#[test]
fn zero_count_rule_loses_nothing_on_min_partitions() {
    for (b, j, eps) in [(5, 3, 0.1417), (6, 3, 0.1), (6, 4, 0.05), (7, 4, 0.07)] {
        both(PartitionSpec::new(PartitionKind::MinValue, eps, b, j).unwrap(), b, j);
    }
}

#[test]
fn global_maximum_sits_at_uniform_for_shortcut_pairs() {
    for (b, k) in [(7, 6), (8, 6), (9, 7), (10, 8), (14, 11)] {
        let j = k - 2;
        let g = global_maximum(b, j, &EngineOptions::default()).unwrap();
        let u = psi_uniform_closed_form(PsiParams::new(b, j).unwrap());
        assert!(g.value <= u * (1.0 + 1e-12), "({b},{k}): {} > {u}", g.value);
        assert!(g.value >= u * (1.0 - 1e-9));
    }
}

#[test]
fn global_maximum_leaves_uniform_when_k_equals_b() {
    // At (6, 6) the concentrated pair beats the uniform one.
    let g = global_maximum(6, 4, &EngineOptions::default()).unwrap();
    let u = psi_uniform_closed_form(PsiParams::new(6, 4).unwrap());
    assert!((g.value - 0.192).abs() < 1e-9);
    assert!(g.value > u);
}

#[test]
fn global_path_matches_printed_columns() {
    use hashbound::combiner::global_only_bound;
    use hashbound::presets::{NEAR_DIAGONAL_TABLE, SMALL_K_TABLE};
    use hashbound::rounding::round_up_str;
    let rows = SMALL_K_TABLE
        .iter()
        .filter_map(|r| r.global_psi_max.map(|g| (r.b, r.k, g)))
        .chain(NEAR_DIAGONAL_TABLE.iter().map(|r| (r.b, r.k, r.global_psi_max)));
    for (b, k, printed) in rows {
        let r = global_only_bound(b, k, &EngineOptions::default()).unwrap();
        assert_eq!(round_up_str(r.rate, 5), printed, "({b},{k}) rate {}", r.rate);
    }
}
