use serde::{Deserialize, Serialize};

use super::orbit::{classify_point_orbit, OrbitOptions, PointReport};
use crate::dyadic::{Rational2, ValExponent};
use crate::poly::FamilyMember;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterLabel {
    InMandelbrot,
    NotInMandelbrot,
    Unknown,
}

/// How a parameter was classified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterRoute {
    /// `|t| <= 1/2`: `f_t` maps `Z_2` into itself and `0 -> 1 -> 1 - 3t/2 ∈ Z_2`.
    SmallParameter,
    /// `|t| > 1`: `f_t(1)` already satisfies the escape rule.
    LargeParameter,
    /// The critical orbit `1, f_t(1), ...` was followed.
    CriticalOrbit { report: Box<PointReport> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub t: Rational2,
    pub label: ParameterLabel,
    pub route: ParameterRoute,
}

/// Decide whether the critical orbit of `f_t` is bounded.
///
/// The critical points are `0` and `1`, and `f_t(0) = 1`, so the orbit of
/// `1` settles both.
pub fn classify_parameter(t: &Rational2, opts: &OrbitOptions) -> ParameterReport {
    let label_route = match t.val() {
        ValExponent::Infinity => {
            Some((ParameterLabel::InMandelbrot, ParameterRoute::SmallParameter))
        }
        ValExponent::Finite(v) if v >= 1 => {
            Some((ParameterLabel::InMandelbrot, ParameterRoute::SmallParameter))
        }
        ValExponent::Finite(v) if v < 0 => Some((
            ParameterLabel::NotInMandelbrot,
            ParameterRoute::LargeParameter,
        )),
        _ => None,
    };
    let (label, route) = label_route.unwrap_or_else(|| {
        let report = classify_point_orbit(&FamilyMember::new(t.clone()), &Rational2::one(), opts);
        let label = match report.class.bounded() {
            Some(true) => ParameterLabel::InMandelbrot,
            Some(false) => ParameterLabel::NotInMandelbrot,
            None => ParameterLabel::Unknown,
        };
        (
            label,
            ParameterRoute::CriticalOrbit {
                report: Box::new(report),
            },
        )
    });
    ParameterReport {
        t: t.clone(),
        label,
        route,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::classify_point_orbit;
    use crate::q;

    #[test]
    fn fast_paths() {
        let opts = OrbitOptions::default();
        assert_eq!(
            classify_parameter(&q(4, 1), &opts).label,
            ParameterLabel::InMandelbrot
        );
        assert_eq!(
            classify_parameter(&q(-6, 5), &opts).label,
            ParameterLabel::InMandelbrot
        );
        // |1/4| = 4 in the 2-adic absolute value
        assert_eq!(
            classify_parameter(&q(1, 4), &opts).label,
            ParameterLabel::NotInMandelbrot
        );
        assert_eq!(
            classify_parameter(&Rational2::zero(), &opts).label,
            ParameterLabel::InMandelbrot
        );
        let r = classify_parameter(&q(5, 8), &opts);
        assert_eq!(r.label, ParameterLabel::NotInMandelbrot);
        assert_eq!(r.route, ParameterRoute::LargeParameter);
    }

    #[test]
    fn fast_paths_agree_with_orbits() {
        let opts = OrbitOptions::default();
        for (n, d) in [(5, 8), (3, 2), (7, 4), (1, 6)] {
            let t = q(n, d);
            let orbit =
                classify_point_orbit(&FamilyMember::new(t.clone()), &Rational2::one(), &opts);
            assert_eq!(orbit.class.bounded(), Some(false), "t = {t}");
        }
        for (n, d) in [(2, 1), (4, 3), (-6, 5)] {
            let t = q(n, d);
            let orbit =
                classify_point_orbit(&FamilyMember::new(t.clone()), &Rational2::one(), &opts);
            assert_ne!(orbit.class.bounded(), Some(false), "t = {t}");
        }
    }

    #[test]
    fn unit_parameters_follow_the_orbit() {
        let opts = OrbitOptions::default();
        let r = classify_parameter(&Rational2::one(), &opts);
        assert_eq!(r.label, ParameterLabel::InMandelbrot);
        let r = classify_parameter(&q(3, 1), &opts);
        assert_eq!(r.label, ParameterLabel::NotInMandelbrot);
        let r = classify_parameter(&q(321, 1), &opts);
        assert_eq!(r.label, ParameterLabel::InMandelbrot);
    }
}
