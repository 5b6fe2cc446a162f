use super::*;
use crate::field::FieldSpec;
use crate::gibbs::energy_normalized_minus;
use crate::lattice::make_box;

fn minus_config(region: Region, plus: &[(i64, i64)]) -> SpinConfiguration {
    SpinConfiguration::with_plus_sites(
        region,
        BoundaryCondition::Minus,
        plus.iter().map(|&(x, y)| Site::new(x, y)),
    )
    .unwrap()
}

fn params(beta: f64, field: FieldSpec) -> ModelParams {
    ModelParams::new(1.0, beta, field).unwrap()
}

#[test]
fn all_minus_has_no_contours() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let family = extract_contours(&minus_config(region, &[])).unwrap();
    assert!(family.is_empty());
    let back = reconstruct_configuration(&family).unwrap();
    assert_eq!(back.plus_sites().count(), 0);
}

#[test]
fn single_plus_site() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let config = minus_config(region, &[(1, 0)]);
    let family = extract_contours(&config).unwrap();
    assert_eq!(family.len(), 1);
    let c = &family.contours()[0];
    assert_eq!(c.length(), 4);
    assert_eq!(c.sign(), Spin::Plus);
    assert_eq!(c.interior_closure(), &[Site::new(1, 0)]);
    assert!(c.interior().is_empty());
    assert_eq!(c.volume(), 1);
    assert!(c.involves(Site::new(1, 0)));
    assert!(!c.involves(Site::new(0, 0)));
    assert_eq!(c.vertices(), unit_loop(Site::new(1, 0)).as_slice());

    let p = params(0.7, FieldSpec::table([(Site::new(1, 0), 0.3)]));
    assert!((contour_weight_log(c, &p) - (-8.0 * 0.7 + 2.0 * 0.7 * 0.3)).abs() < 1e-15);

    let rebuilt = ContourFamily::new(
        region,
        vec![Contour::from_walk(&region, unit_loop(Site::new(1, 0)), Spin::Plus).unwrap()],
    );
    assert_eq!(reconstruct_configuration(&rebuilt).unwrap(), config);
}

#[test]
fn domino() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let family = extract_contours(&minus_config(region, &[(-1, 0), (0, 0)])).unwrap();
    assert_eq!(family.len(), 1);
    assert_eq!(family.contours()[0].length(), 6);
    assert_eq!(family.contours()[0].volume(), 2);
}

#[test]
fn corner_rule_separates_north_east_diagonal() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let ne = extract_contours(&minus_config(region, &[(0, 0), (1, 1)])).unwrap();
    assert_eq!(ne.len(), 2);
    assert!(ne.contours().iter().all(|c| c.length() == 4));
    let nw = extract_contours(&minus_config(region, &[(0, 1), (1, 0)])).unwrap();
    assert_eq!(nw.len(), 1);
    assert_eq!(nw.contours()[0].length(), 8);
    assert_eq!(nw.contours()[0].volume(), 2);
}

#[test]
fn ring_with_inner_minus_site_nests() {
    let region = make_box(Site::new(0, 0), 5).unwrap();
    let ring: Vec<(i64, i64)> = (-1..=1)
        .flat_map(|x| (-1..=1).map(move |y| (x, y)))
        .filter(|&p| p != (0, 0))
        .collect();
    let config = minus_config(region, &ring);
    let family = extract_contours(&config).unwrap();
    assert_eq!(family.len(), 2);
    let forest = nesting_forest(&family);
    assert_eq!(forest.roots().len(), 1);
    assert_eq!(forest.max_depth(), 2);
    let outer = forest.roots()[0];
    let inner = forest.children(outer)[0];
    let (o, i) = (&family.contours()[outer], &family.contours()[inner]);
    assert_eq!((o.sign(), o.length(), o.volume()), (Spin::Plus, 12, 9));
    assert_eq!((i.sign(), i.length(), i.volume()), (Spin::Minus, 4, 1));
    assert_eq!(o.interior(), &[Site::new(0, 0)]);
    assert!(o.involves_contour(i) && !i.involves_contour(o));
    assert_eq!(reconstruct_configuration(&family).unwrap(), config);
    assert!(family.type_reading_conflicts(&config).is_empty());
}

#[test]
fn side_by_side_contours_are_two_roots() {
    let region = make_box(Site::new(0, 0), 5).unwrap();
    let family = extract_contours(&minus_config(region, &[(-2, 0), (1, 0)])).unwrap();
    let forest = nesting_forest(&family);
    assert_eq!(forest.roots().len(), 2);
    assert!(forest.children(0).is_empty() && forest.children(1).is_empty());
}

#[test]
fn corner_touching_hole_is_flagged() {
    // a + square with a − site touching the ring's inner corner diagonally
    let region = make_box(Site::new(0, 0), 5).unwrap();
    let plus: Vec<(i64, i64)> = (-2..=2)
        .flat_map(|x| (-2..=2).map(move |y| (x, y)))
        .filter(|&p| p != (0, 0) && p != (1, -1))
        .collect();
    let config = minus_config(region, &plus);
    let family = extract_contours(&config).unwrap();
    assert_eq!(reconstruct_configuration(&family).unwrap(), config);
    for c in family.contours() {
        let layer: BTreeSet<Spin> = c.inner_layer().iter().map(|s| config.get(*s).unwrap()).collect();
        assert_eq!(layer.len(), 1);
        assert_eq!(layer.into_iter().next(), Some(c.sign()));
    }
}

#[test]
fn round_trip_is_exhaustive_on_three_by_three() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    for bits in 0..1u64 << 9 {
        let config = SpinConfiguration::from_bits(region, BoundaryCondition::Minus, bits).unwrap();
        let family = extract_contours(&config).unwrap();
        for c in family.contours() {
            assert!(c.length() >= 4 && c.length() % 2 == 0);
        }
        assert_eq!(reconstruct_configuration(&family).unwrap(), config);
    }
}

#[test]
fn weights_reproduce_the_normalized_hamiltonian() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let p = params(0.5, FieldSpec::power_law(0.3, 2.5));
    for bits in 0..1u64 << 9 {
        let config = SpinConfiguration::from_bits(region, BoundaryCondition::Minus, bits).unwrap();
        let family = extract_contours(&config).unwrap();
        let lhs = -p.beta * energy_normalized_minus(&config, &p).unwrap();
        assert!((lhs - family.log_weight(&p)).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn sign_flip_negates_field_term_only() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let p = params(1.3, FieldSpec::Uniform(0.2));
    let plus = Contour::from_walk(&region, unit_loop(Site::new(0, 0)), Spin::Plus).unwrap();
    let minus = Contour::from_walk(&region, unit_loop(Site::new(0, 0)), Spin::Minus).unwrap();
    let bare = -8.0 * 1.3;
    assert!((contour_weight_log(&plus, &p) - bare - 2.0 * 1.3 * 0.2).abs() < 1e-14);
    assert!((contour_weight_log(&minus, &p) - bare + 2.0 * 1.3 * 0.2).abs() < 1e-14);
    let zero = params(1.3, FieldSpec::zero());
    assert_eq!(contour_weight_log(&plus, &zero), contour_weight_log(&minus, &zero));
}

#[test]
fn incompatible_families_are_rejected() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let a = Contour::from_walk(&region, unit_loop(Site::new(0, 0)), Spin::Plus).unwrap();
    let b = Contour::from_walk(&region, unit_loop(Site::new(1, 0)), Spin::Plus).unwrap();
    let shared = ContourFamily::new(region, vec![a.clone(), b]);
    assert!(matches!(reconstruct_configuration(&shared), Err(Error::InvalidFamily(_))));
    let twice = ContourFamily::new(region, vec![a.clone(), a.clone()]);
    assert!(matches!(reconstruct_configuration(&twice), Err(Error::InvalidFamily(_))));
    let wrong_sign = Contour::from_walk(&region, unit_loop(Site::new(0, 0)), Spin::Minus).unwrap();
    let bad = ContourFamily::new(region, vec![wrong_sign]);
    assert!(matches!(reconstruct_configuration(&bad), Err(Error::InvalidFamily(_))));
    // the north-east diagonal pair traced as one loop violates the corner rule
    let walk = vec![
        DualPoint::new(0, 0),
        DualPoint::new(1, 0),
        DualPoint::new(1, 1),
        DualPoint::new(2, 1),
        DualPoint::new(2, 2),
        DualPoint::new(1, 2),
        DualPoint::new(1, 1),
        DualPoint::new(0, 1),
    ];
    let joined = Contour::from_walk(&region, walk, Spin::Plus).unwrap();
    let family = ContourFamily::new(region, vec![joined]);
    assert!(matches!(reconstruct_configuration(&family), Err(Error::InvalidFamily(_))));
    assert!(Contour::from_walk(&region, vec![DualPoint::new(0, 0); 3], Spin::Plus).is_err());
    let outside = unit_loop(Site::new(5, 5));
    assert!(Contour::from_walk(&region, outside, Spin::Plus).is_err());
}

#[test]
fn non_minus_boundary_is_a_contract_violation() {
    let region = make_box(Site::new(0, 0), 2).unwrap();
    let config = SpinConfiguration::uniform(region, BoundaryCondition::Plus, Spin::Plus).unwrap();
    assert!(matches!(extract_contours(&config), Err(Error::Contract(_))));
}

#[test]
fn one_site_contour_partition_function() {
    let region = make_box(Site::new(0, 0), 1).unwrap();
    for beta in [0.1, 1.0, 4.0] {
        let p = params(beta, FieldSpec::Uniform(0.35));
        let expected = crate::logsum::log_add(0.0, -8.0 * beta + 2.0 * beta * 0.35);
        assert!((log_partition_contour(&region, &p).unwrap() - expected).abs() < 1e-14);
    }
}

#[test]
fn contour_sum_matches_exact_normalized_partition() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    for beta in [0.2, 0.5, 1.0] {
        let p = params(beta, FieldSpec::zero());
        let exact = crate::gibbs::ExactSolver::brute().log_partition_normalized_minus(&region, &p).unwrap();
        assert!((log_partition_contour(&region, &p).unwrap() - exact).abs() < 1e-10);
    }
}

#[test]
fn sandwich_edge_cases() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let p = params(0.5, FieldSpec::power_law(0.02, 3.0));
    let l1 = p.field.l1_norm();
    let empty = lemma2_sandwich_check(&ContourFamily::empty(region), &p).unwrap();
    assert!(empty.holds);
    assert!((empty.slack_low - 2.0 * 0.5 * l1).abs() < 1e-15);
    assert!((empty.slack_high - 2.0 * 0.5 * l1).abs() < 1e-15);

    let family = extract_contours(&minus_config(region, &[(0, 0), (1, 1)])).unwrap();
    let zero = lemma2_sandwich_check(&family, &params(0.5, FieldSpec::zero())).unwrap();
    assert!(zero.holds && zero.slack_low == 0.0 && zero.slack_high == 0.0);

    let flat = params(0.5, FieldSpec::Uniform(0.1));
    assert!(matches!(lemma2_sandwich_check(&family, &flat), Err(Error::Inapplicable(_))));
}

#[test]
fn peierls_regime_errors() {
    let region = make_box(Site::new(0, 0), 3).unwrap();
    let boundary = ModelParams::new(0.75, 2.0, FieldSpec::table([(Site::new(0, 0), 0.25)])).unwrap();
    let err = minus_bc_plus_probability_bound(&region, &boundary, Site::new(0, 0)).unwrap_err();
    assert!(matches!(&err, Error::Regime(m) if m.contains("3‖h‖₁")));
    let hot = params(0.3, FieldSpec::zero());
    assert!(matches!(
        minus_bc_plus_probability_bound(&region, &hot, Site::new(0, 0)),
        Err(Error::Regime(_))
    ));
    let cold = params(2.0, FieldSpec::zero());
    let cmp = minus_bc_plus_probability_bound(&region, &cold, Site::new(0, 0)).unwrap();
    assert!(cmp.holds && cmp.exact > 0.0);
}

#[test]
fn json_form_uses_half_integer_coordinates() {
    let region = make_box(Site::new(0, 0), 1).unwrap();
    let family = extract_contours(&minus_config(region, &[(0, 0)])).unwrap();
    let json = family.to_json();
    assert_eq!(json.len(), 1);
    assert_eq!(json[0].edges[0], [[-0.5, -0.5], [0.5, -0.5]]);
    let text = serde_json::to_string(&json).unwrap();
    let back: Vec<ContourJson> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, json);
}
