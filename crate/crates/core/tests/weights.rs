use proptest::prelude::*;

use msp_localization::graph::{Edge, EdgeClass, EdgeId, Level, VertexId};
use msp_localization::weights::{
    edge_tangent_weights, l1_weight_at_infinity, linearization_exponent, orbifold_exponent, vertex_bundle_weights,
    BundleWeights, WeightError,
};
use msp_localization::Rat;

fn edge(class: EdgeClass, d: Rat, orbifold: bool, special: bool) -> Edge {
    let (deg0, deg_inf) = match class {
        EdgeClass::E01 => (d, Rat::ZERO),
        EdgeClass::E1Inf => (Rat::ZERO, -d),
        EdgeClass::E0Inf => (d.clone(), d),
    };
    Edge {
        id: EdgeId(0),
        end_a: VertexId(0),
        end_b: VertexId(1),
        class,
        deg0,
        deg_inf,
        orbifold_at_inf: orbifold,
        special_at_inf: special,
    }
}

fn rat() -> impl Strategy<Value = Rat> {
    (-1000i64..1000, 1i64..60).prop_map(|(n, d)| Rat::frac(n, d))
}

/// A valid E1Inf degree: a negative integer, or a negative third for
/// orbifold ends.
fn e1inf_degree() -> impl Strategy<Value = (Rat, bool)> {
    prop_oneof![
        (1i64..200).prop_map(|n| (Rat::int(-n), false)),
        (1i64..600).prop_filter("not integral", |n| n % 3 != 0).prop_map(|n| (Rat::frac(-n, 3), true)),
    ]
}

proptest! {
    #[test]
    fn linearization_is_a_quotient(w0 in rat(), w1 in rat(), d in rat()) {
        match linearization_exponent(&w0, &w1, &d) {
            Ok(k) => prop_assert_eq!(k * &d, &w0 - &w1),
            Err(e) => prop_assert!(d.is_zero() && e == WeightError::DegenerateLinearization),
        }
        match orbifold_exponent(&w0, &w1, &d) {
            Ok(k) => prop_assert_eq!(k * Rat::int(3) * &d, w0 - w1),
            Err(_) => prop_assert!(d.is_zero()),
        }
    }

    #[test]
    fn e1inf_ends_are_inverse_on_scheme_points((d, orbifold) in e1inf_degree(), special: bool) {
        // Orbifold ends are always special; the pole case has its own test.
        let special = special || orbifold;
        let e = edge(EdgeClass::E1Inf, d.clone(), orbifold, special);
        let t = edge_tangent_weights(&e).unwrap();
        if orbifold {
            prop_assert_eq!(&t.at_low, &(Rat::int(-3) * &t.at_inf_or_high));
        } else {
            prop_assert_eq!(&t.at_inf_or_high, &-&t.at_low);
            let w = l1_weight_at_infinity(&e).unwrap();
            prop_assert_eq!(linearization_exponent(&Rat::int(-1), &w, &d).unwrap(), t.at_low.clone());
            if special {
                prop_assert!(w.is_zero());
            } else {
                prop_assert_eq!(w, -(Rat::int(3) * &d + Rat::ONE).recip().unwrap());
            }
        }
    }

    #[test]
    fn e0inf_cover_variants(n in 1i64..500) {
        let d = Rat::int(n);
        let scheme = edge_tangent_weights(&edge(EdgeClass::E0Inf, d.clone(), false, false)).unwrap();
        prop_assert!((&scheme.at_low + &scheme.at_inf_or_high).is_zero());
        let orb = edge_tangent_weights(&edge(EdgeClass::E0Inf, d.clone(), true, false)).unwrap();
        prop_assert!((&orb.at_low + Rat::int(3) * &orb.at_inf_or_high).is_zero());
        let k = orbifold_exponent(&Rat::ZERO, &Rat::int(-1), &d).unwrap();
        prop_assert_eq!(orb.at_low, Rat::int(3) * &k);
        prop_assert_eq!(orb.at_inf_or_high, -k);
    }
}

#[test]
fn exponent_examples() {
    let r = Rat::int;
    assert_eq!(linearization_exponent(&r(0), &r(-1), &r(1)), Ok(r(1)));
    assert_eq!(linearization_exponent(&r(0), &r(-1), &r(3)), Ok(Rat::frac(1, 3)));
    assert_eq!(linearization_exponent(&r(-1), &Rat::frac(-1, 4), &r(1)), Ok(Rat::frac(-3, 4)));
    assert_eq!(linearization_exponent(&r(1), &r(0), &r(0)), Err(WeightError::DegenerateLinearization));
    assert_eq!(orbifold_exponent(&r(3), &r(0), &r(1)), Ok(r(1)));
    assert_eq!(orbifold_exponent(&r(0), &r(-1), &r(1)), Ok(Rat::frac(1, 3)));
    assert_eq!(orbifold_exponent(&r(1), &r(1), &r(5)), Ok(Rat::ZERO));
    assert!(orbifold_exponent(&r(1), &r(1), &r(0)).is_err());
}

#[test]
fn bundle_weight_examples() {
    let r = Rat::int;
    assert!(vertex_bundle_weights(Level::Zero).admits(&r(0), &r(0), &r(0)));
    assert!(vertex_bundle_weights(Level::One).admits(&r(-1), &r(0), &r(0)));
    assert!(!vertex_bundle_weights(Level::One).admits(&r(0), &r(0), &r(0)));
    let inf = vertex_bundle_weights(Level::Infinity);
    assert!(matches!(inf, BundleWeights::InfinityConstraint { .. }));
    assert!(inf.admits(&Rat::frac(-1, 4), &r(0), &Rat::frac(-3, 4)));
    assert!(!inf.admits(&r(0), &r(0), &r(0)));
}

#[test]
fn tangent_weight_examples() {
    let w = |e: Edge| {
        let t = edge_tangent_weights(&e).unwrap();
        (t.at_low, t.at_inf_or_high)
    };
    assert_eq!(w(edge(EdgeClass::E01, Rat::int(2), false, false)), (Rat::frac(1, 2), Rat::frac(-1, 2)));
    assert_eq!(w(edge(EdgeClass::E1Inf, Rat::int(-1), false, false)), (Rat::frac(3, 2), Rat::frac(-3, 2)));
    assert_eq!(w(edge(EdgeClass::E1Inf, Rat::int(-1), true, true)), (Rat::int(1), Rat::frac(-1, 3)));
    assert_eq!(w(edge(EdgeClass::E0Inf, Rat::int(1), true, false)), (Rat::int(1), Rat::frac(-1, 3)));
}

#[test]
fn pole_and_scheme_only_helpers() {
    let pole = edge(EdgeClass::E1Inf, Rat::frac(-1, 3), true, false);
    assert_eq!(edge_tangent_weights(&pole), Err(WeightError::WeightPole));
    assert!(edge_tangent_weights(&edge(EdgeClass::E1Inf, Rat::frac(-1, 3), true, true)).is_ok());
    assert_eq!(l1_weight_at_infinity(&pole), Err(WeightError::NotSchemeE1Inf));
    assert_eq!(
        l1_weight_at_infinity(&edge(EdgeClass::E01, Rat::int(1), false, false)),
        Err(WeightError::NotSchemeE1Inf)
    );
}
