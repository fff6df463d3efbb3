//! Torus weights on fixed curves.
//!
//! The torus acts with rational weights, so no finite-cover bookkeeping is
//! needed: a `P^1` of degree `d` over a line whose endpoint fibres have
//! weights `w0`, `w1` carries tangent weight `(w0 - w1)/d` at the first
//! endpoint, and the `P(1,3)` analogue divides by `3d`.

use thiserror::Error;

use crate::graph::{Edge, EdgeClass, Level};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("degenerate linearization: degree is zero")]
    DegenerateLinearization,
    #[error("weight pole: 3d + 1 = 0 on a non-special infinity end")]
    WeightPole,
    #[error("edge {0} has zero degree")]
    ZeroDegree(crate::graph::EdgeId),
    #[error("L1 weight at infinity is only defined for scheme E1Inf edges")]
    NotSchemeE1Inf,
}

/// `k = (w0 - w1)/deg`, the tangent weight at the `w0` end of a degree-`deg`
/// cover of `P^1`.
pub fn linearization_exponent(w0: &Rat, w1: &Rat, deg: &Rat) -> Result<Rat, WeightError> {
    (w0 - w1).checked_div(deg).map_err(|_| WeightError::DegenerateLinearization)
}

/// `k = (w0 - w1)/(3 deg)` for a cover by `P(1,3)` of orbifold degree `deg`.
/// The companion tangent weights are `3k` at the scheme end and `-k` at the
/// orbifold end.
pub fn orbifold_exponent(w0: &Rat, w1: &Rat, deg: &Rat) -> Result<Rat, WeightError> {
    (w0 - w1).checked_div(&(Rat::int(3) * deg)).map_err(|_| WeightError::DegenerateLinearization)
}

/// Weights of `(L1, L2, N)` on a fixed component of the given level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleWeights {
    Fixed {
        w_l1: Rat,
        w_l2: Rat,
        w_n: Rat,
    },
    /// At level infinity only `wL2 = 0` and `wL1 + wN = -1` are forced.
    InfinityConstraint {
        w_l2: Rat,
        w_l1_plus_w_n: Rat,
    },
}

impl BundleWeights {
    /// Whether a concrete triple is compatible with these weights.
    pub fn admits(&self, w_l1: &Rat, w_l2: &Rat, w_n: &Rat) -> bool {
        match self {
            BundleWeights::Fixed { w_l1: a, w_l2: b, w_n: c } => a == w_l1 && b == w_l2 && c == w_n,
            BundleWeights::InfinityConstraint { w_l2: b, w_l1_plus_w_n: s } => b == w_l2 && &(w_l1 + w_n) == s,
        }
    }
}

pub fn vertex_bundle_weights(level: Level) -> BundleWeights {
    match level {
        Level::Zero => BundleWeights::Fixed { w_l1: Rat::ZERO, w_l2: Rat::ZERO, w_n: Rat::ZERO },
        Level::One => BundleWeights::Fixed { w_l1: Rat::int(-1), w_l2: Rat::ZERO, w_n: Rat::ZERO },
        Level::Infinity => BundleWeights::InfinityConstraint { w_l2: Rat::ZERO, w_l1_plus_w_n: Rat::int(-1) },
    }
}

/// Tangent weights of an edge curve at its two special points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTangentWeights {
    pub at_low: Rat,
    pub at_inf_or_high: Rat,
}

/// The tabulated tangent weights, selected by class and the infinity-end
/// flags. E0Inf edges use `orbifold_at_inf` to pick the variant of the
/// underlying cover; `special_at_inf` is irrelevant for them.
pub fn edge_tangent_weights(edge: &Edge) -> Result<EdgeTangentWeights, WeightError> {
    let pair = |a: Rat, b: Rat| EdgeTangentWeights { at_low: a, at_inf_or_high: b };
    let inv = |x: &Rat| x.recip().map_err(|_| WeightError::ZeroDegree(edge.id));
    match edge.class {
        EdgeClass::E01 => {
            let k = inv(&edge.d())?;
            Ok(pair(k.clone(), -k))
        }
        EdgeClass::E1Inf => {
            let d = edge.d();
            if d.is_zero() {
                return Err(WeightError::ZeroDegree(edge.id));
            }
            let three_d_plus_one = Rat::int(3) * &d + Rat::ONE;
            let pole = |x: &Rat| x.recip().map_err(|_| WeightError::WeightPole);
            match (edge.orbifold_at_inf, edge.special_at_inf) {
                (false, false) => {
                    let t = Rat::int(3) * pole(&three_d_plus_one)?;
                    Ok(pair(-&t, t))
                }
                (false, true) => {
                    let t = inv(&d)?;
                    Ok(pair(-&t, t))
                }
                (true, false) => {
                    let t = pole(&three_d_plus_one)?;
                    Ok(pair(Rat::int(-3) * &t, t))
                }
                (true, true) => {
                    let t = inv(&d)?;
                    Ok(pair(-&t, inv(&(Rat::int(3) * d))?))
                }
            }
        }
        EdgeClass::E0Inf => {
            let k = inv(&edge.deg_inf)?;
            if edge.orbifold_at_inf {
                let far = -(&k / &Rat::int(3));
                Ok(pair(k, far))
            } else {
                Ok(pair(k.clone(), -k))
            }
        }
    }
}

/// Weight of `L1` at the infinity end of a scheme E1Inf edge,
/// `-1 - k d_e` with `k` the tangent weight at the level-1 end.
pub fn l1_weight_at_infinity(edge: &Edge) -> Result<Rat, WeightError> {
    if edge.class != EdgeClass::E1Inf || edge.orbifold_at_inf {
        return Err(WeightError::NotSchemeE1Inf);
    }
    let k = edge_tangent_weights(edge)?.at_low;
    Ok(Rat::int(-1) - k * edge.d())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeId, VertexId};

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

    fn w(a: Rat, b: Rat) -> EdgeTangentWeights {
        EdgeTangentWeights { at_low: a, at_inf_or_high: b }
    }

    #[test]
    fn linearization_examples() {
        assert_eq!(linearization_exponent(&Rat::ZERO, &Rat::int(-1), &Rat::ONE), Ok(Rat::ONE));
        assert_eq!(linearization_exponent(&Rat::ZERO, &Rat::int(-1), &Rat::int(3)), Ok(Rat::frac(1, 3)));
        let w_inf = Rat::frac(-1, 4);
        assert_eq!(linearization_exponent(&Rat::int(-1), &w_inf, &Rat::ONE), Ok(Rat::frac(-3, 4)));
        assert_eq!(
            linearization_exponent(&Rat::ONE, &Rat::ZERO, &Rat::ZERO),
            Err(WeightError::DegenerateLinearization)
        );
    }

    #[test]
    fn orbifold_examples() {
        assert_eq!(orbifold_exponent(&Rat::int(3), &Rat::ZERO, &Rat::ONE), Ok(Rat::ONE));
        assert_eq!(orbifold_exponent(&Rat::ZERO, &Rat::int(-1), &Rat::ONE), Ok(Rat::frac(1, 3)));
        assert_eq!(orbifold_exponent(&Rat::ONE, &Rat::ONE, &Rat::int(5)), Ok(Rat::ZERO));
        assert!(orbifold_exponent(&Rat::ONE, &Rat::ZERO, &Rat::ZERO).is_err());
    }

    #[test]
    fn bundle_weights() {
        assert!(vertex_bundle_weights(Level::Zero).admits(&Rat::ZERO, &Rat::ZERO, &Rat::ZERO));
        assert!(vertex_bundle_weights(Level::One).admits(&Rat::int(-1), &Rat::ZERO, &Rat::ZERO));
        let inf = vertex_bundle_weights(Level::Infinity);
        assert!(inf.admits(&Rat::frac(-1, 4), &Rat::ZERO, &Rat::frac(-3, 4)));
        assert!(!inf.admits(&Rat::ZERO, &Rat::ZERO, &Rat::ZERO));
    }

    #[test]
    fn table_examples() {
        assert_eq!(
            edge_tangent_weights(&edge(EdgeClass::E01, Rat::int(2), false, false)),
            Ok(w(Rat::frac(1, 2), Rat::frac(-1, 2)))
        );
        // -3/(3d+1) at d = -1 is -3/(-2)
        assert_eq!(
            edge_tangent_weights(&edge(EdgeClass::E1Inf, Rat::int(-1), false, false)),
            Ok(w(Rat::frac(3, 2), Rat::frac(-3, 2)))
        );
        assert_eq!(
            edge_tangent_weights(&edge(EdgeClass::E1Inf, Rat::int(-1), true, true)),
            Ok(w(Rat::ONE, Rat::frac(-1, 3)))
        );
        assert_eq!(
            edge_tangent_weights(&edge(EdgeClass::E0Inf, Rat::ONE, true, true)),
            Ok(w(Rat::ONE, Rat::frac(-1, 3)))
        );
    }

    #[test]
    fn pole_is_reported() {
        let e = edge(EdgeClass::E1Inf, Rat::frac(-1, 3), true, false);
        assert_eq!(edge_tangent_weights(&e), Err(WeightError::WeightPole));
        let e = edge(EdgeClass::E1Inf, Rat::frac(-1, 3), true, true);
        assert_eq!(edge_tangent_weights(&e), Ok(w(Rat::int(3), Rat::int(-1))));
    }

    #[test]
    fn l1_at_infinity() {
        // non-special: -1 + 3d/(3d+1) = -1/(3d+1)
        for d in -20..=-1 {
            let e = edge(EdgeClass::E1Inf, Rat::int(d), false, false);
            assert_eq!(l1_weight_at_infinity(&e), Ok(Rat::frac(-1, 3 * d + 1)));
            let e = edge(EdgeClass::E1Inf, Rat::int(d), false, true);
            assert_eq!(l1_weight_at_infinity(&e), Ok(Rat::ZERO));
        }
        let e = edge(EdgeClass::E1Inf, Rat::frac(-2, 3), true, true);
        assert_eq!(l1_weight_at_infinity(&e), Err(WeightError::NotSchemeE1Inf));
    }
}
