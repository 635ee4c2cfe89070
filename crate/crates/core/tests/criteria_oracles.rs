mod common;

use bellbench_core::criteria::{
    chsh_from_tensor, chsh_value, classify, four_corner_bound, g_projector_form, g_value,
    separability_test, tsirelson_bound, CaseLabel, ConfigLabel,
};
use bellbench_core::quantum::correlation_tensor;
use bellbench_core::{ChshConfig, Direction, Error, TwoQubitState};
use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn planar_config(t: f64, p: f64, tp: f64, pp: f64) -> ChshConfig {
    ChshConfig::planar(t, p, tp, pp)
}

#[test]
fn named_configurations_have_the_stated_angles() {
    let expected = [
        (ConfigLabel::A, [PI / 3.0, PI / 8.0, PI / 4.0, PI / 6.0]),
        (ConfigLabel::B, [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, 0.0]),
        (ConfigLabel::C, [PI / 6.0, 3.0 * PI / 4.0, PI, 0.0]),
    ];
    for (label, angles) in expected {
        assert_eq!(ChshConfig::named(label).planar_angles(), Some(angles));
        assert_eq!(label.to_string().parse::<ConfigLabel>().unwrap(), label);
    }
    assert!("D".parse::<ConfigLabel>().is_err());
}

#[test]
fn chsh_matches_basis_sum_oracle() {
    let mut rng = rng(11);
    for _ in 0..1000 {
        let s = random_state(&mut rng);
        let dirs: [Direction; 4] = std::array::from_fn(|_| random_direction(&mut rng));
        let cfg = ChshConfig::new(dirs[0], dirs[1], dirs[2], dirs[3]);
        let oracle = chsh_oracle(
            &s,
            dirs[0].to_array(),
            dirs[1].to_array(),
            dirs[2].to_array(),
            dirs[3].to_array(),
        );
        assert!((chsh_value(&s, &cfg) - oracle).abs() < 1e-12);
        assert!((chsh_from_tensor(&correlation_tensor(&s), &cfg) - oracle).abs() < 1e-12);
    }
}

#[test]
fn named_configurations_against_closed_form() {
    for i in 0..=100 {
        let a2 = i as f64 / 100.0;
        let s = TwoQubitState::from_alpha_squared(a2).unwrap();
        for label in ConfigLabel::ALL {
            let [t, p, tp, pp] = label.angles::<f64>();
            let oracle =
                closed_form_e(a2, t, p) + closed_form_e(a2, t, pp) + closed_form_e(a2, tp, p)
                    - closed_form_e(a2, tp, pp);
            assert!((chsh_value(&s, &ChshConfig::named(label)) - oracle).abs() < 1e-12);
        }
    }
}

#[test]
fn g_matches_basis_sum_oracle_and_projector_form() {
    let mut rng = rng(12);
    for _ in 0..1000 {
        let s = random_state(&mut rng);
        let (a, b) = (random_direction(&mut rng), random_direction(&mut rng));
        let oracle = g_oracle(&s, a.to_array(), b.to_array());
        assert!((g_value(&s, &a, &b) - oracle).abs() < 1e-12);
        assert!((g_projector_form(&s, &a, &b) - oracle).abs() < 1e-12);
    }
}

#[test]
fn separability_singular_values_match_grid_oracle_on_general_states() {
    let mut rng = rng(13);
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let v = separability_test(&s, 1e-10).unwrap();
        let g = g_matrix_oracle(&s);
        let grid = max_g_grid_oracle(&g, PI / 90.0);
        assert!(
            (v.max_abs_g - grid).abs() < 1e-8,
            "{} vs {grid}",
            v.max_abs_g
        );
        let witness = g_value(&s, &v.witness_a, &v.witness_b).abs();
        assert!((witness - v.max_abs_g).abs() < 1e-10);
        assert!(v.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn separability_verdicts() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let v = separability_test(&random_product_state(&mut rng), 1e-10).unwrap();
        assert!(v.compatible && v.max_abs_g < 1e-12);
    }
    let s = TwoQubitState::from_alpha_squared(0.5).unwrap();
    let v = separability_test(&s, 1e-10).unwrap();
    assert!(!v.compatible);
    assert!((v.max_abs_g - 1.0).abs() < 1e-12);
    assert!(matches!(
        separability_test(&s, 0.0),
        Err(Error::BadTolerance(_))
    ));
}

#[test]
fn four_corner_bound_against_dense_grid() {
    let mut rng = rng(15);
    for _ in 0..40 {
        let m: [f64; 4] = std::array::from_fn(|_| rand::Rng::random_range(&mut rng, -1.0..=1.0));
        let (lo, hi) = four_corner_bound(m[0], m[1], m[2], m[3]).unwrap();
        let (glo, ghi) = four_corner_grid(m.map(f64::abs), 9);
        assert!(
            (lo - glo).abs() < 1e-12 && (hi - ghi).abs() < 1e-12,
            "{m:?}"
        );
        assert!(lo >= -2.0 - 1e-12 && hi <= 2.0 + 1e-12);
    }
    assert_eq!(four_corner_bound(1.0, 1.0, 1.0, 1.0).unwrap(), (-2.0, 2.0));
    assert!(matches!(
        four_corner_bound(0.0, 1.2, 0.0, 0.0),
        Err(Error::OutOfRange {
            name: "m1_a_prime",
            ..
        })
    ));
    assert!(four_corner_bound(f64::NAN, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn product_state_chsh_stays_within_the_four_corner_range() {
    let mut rng = rng(16);
    for _ in 0..300 {
        let s = random_product_state(&mut rng);
        let dirs: [Direction; 4] = std::array::from_fn(|_| random_direction(&mut rng));
        let cfg = ChshConfig::new(dirs[0], dirs[1], dirs[2], dirs[3]);
        let m = |d: &Direction, first: bool| {
            if first {
                first_marginal_oracle(&s, d.to_array())
            } else {
                second_marginal_oracle(&s, d.to_array())
            }
        };
        let (lo, hi) = four_corner_bound(
            m(&dirs[0], true),
            m(&dirs[1], true),
            m(&dirs[2], false),
            m(&dirs[3], false),
        )
        .unwrap();
        let v = chsh_value(&s, &cfg);
        assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        assert!(v.abs() <= 2.0 + 1e-12);
    }
}

#[test]
fn classification_labels() {
    let bell = TwoQubitState::from_alpha_squared(0.5).unwrap();
    let v = classify(&bell, &ChshConfig::named(ConfigLabel::B), 1e-10).unwrap();
    assert_eq!(v.case_label, CaseLabel::Qm);
    assert!(v.chsh_violated && v.tsirelson_ok && !v.g_zero);

    let weak = TwoQubitState::from_alpha_squared(0.02).unwrap();
    let v = classify(&weak, &ChshConfig::named(ConfigLabel::B), 1e-10).unwrap();
    assert_eq!(v.case_label, CaseLabel::ChshConsistent);
    assert!(!v.chsh_violated && v.g_max_abs() > 1e-3);

    let product = TwoQubitState::from_alpha_squared(1.0).unwrap();
    let v = classify(&product, &ChshConfig::named(ConfigLabel::A), 1e-10).unwrap();
    assert_eq!(v.case_label, CaseLabel::GConsistent);
    assert_eq!(v.case_label.to_string(), "G-consistent");

    assert!(classify(&bell, &planar_config(0.0, 0.0, 0.0, 0.0), -1.0).is_err());
}

#[test]
fn tsirelson_constant() {
    assert_eq!(tsirelson_bound::<f64>(), TSIRELSON);
}

proptest! {
    #[test]
    fn chsh_never_exceeds_tsirelson(a2 in 0.0f64..=1.0, t in 0.0f64..6.3, p in 0.0f64..6.3,
                                    tp in 0.0f64..6.3, pp in 0.0f64..6.3) {
        let s = TwoQubitState::from_alpha_squared(a2).unwrap();
        prop_assert!(chsh_value(&s, &planar_config(t, p, tp, pp)).abs() <= TSIRELSON + 1e-9);
    }

    #[test]
    fn g_is_antisymmetric_under_direction_flip(a2 in 0.0f64..=1.0, t in 0.0f64..6.3, p in 0.0f64..6.3) {
        let s = TwoQubitState::from_alpha_squared(a2).unwrap();
        let (a, b) = (Direction::planar(t), Direction::planar(p));
        prop_assert!((g_value(&s, &a.neg(), &b) + g_value(&s, &a, &b)).abs() < 1e-12);
    }

    #[test]
    fn g_is_bounded_by_its_largest_singular_value(a2 in 0.0f64..=1.0, t in 0.0f64..6.3, p in 0.0f64..6.3) {
        let s = TwoQubitState::from_alpha_squared(a2).unwrap();
        let bound = separability_test(&s, 1e-10).unwrap().max_abs_g;
        let g = g_value(&s, &Direction::planar(t), &Direction::planar(p));
        prop_assert!(g.abs() <= bound + 1e-12);
    }
}
