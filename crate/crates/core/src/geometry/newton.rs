use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::Poly;

fn ratio_str<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio_from_str<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Ratio<i64>, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: (usize, i64),
    pub end: (usize, i64),
    #[serde(serialize_with = "ratio_str", deserialize_with = "ratio_from_str")]
    pub slope: Ratio<i64>,
}

impl Segment {
    /// Horizontal length: the number of roots with valuation `-slope`.
    pub fn length(&self) -> usize {
        self.end.0 - self.start.0
    }
}

/// Lower convex hull of `{(i, v2(a_i))}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
}

fn cross(o: (usize, i64), a: (usize, i64), b: (usize, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

impl NewtonPolygon {
    pub fn of(p: &Poly) -> Result<Self> {
        let points: Vec<(usize, i64)> = p
            .gauss_valuations()
            .into_iter()
            .map(|(i, v)| (i, v.finite().expect("nonzero coefficient")))
            .collect();
        if points.is_empty() {
            return Err(Error::Domain(
                "Newton polygon of the zero polynomial".into(),
            ));
        }
        let mut hull: Vec<(usize, i64)> = Vec::with_capacity(points.len());
        for &pt in &points {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        let segments = hull
            .windows(2)
            .map(|w| Segment {
                start: w[0],
                end: w[1],
                slope: Ratio::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64),
            })
            .collect();
        Ok(NewtonPolygon {
            vertices: hull,
            segments,
        })
    }

    /// `(valuation, multiplicity)` of the nonzero roots over `C_2`, one entry per segment.
    pub fn root_valuations(&self) -> Vec<(Ratio<i64>, usize)> {
        self.segments
            .iter()
            .map(|s| (-s.slope, s.length()))
            .collect()
    }

    /// Multiplicity of `0` as a root.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.vertices[0].0
    }
}

/// Newton polygon of `p`; fails on the zero polynomial.
pub fn newton_polygon(p: &Poly) -> Result<NewtonPolygon> {
    NewtonPolygon::of(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::build_gn;
    use crate::{q, Rational2};

    #[test]
    fn polygon_of_g3() {
        let np = newton_polygon(&build_gn(3).unwrap()).unwrap();
        assert_eq!(np.vertices, vec![(0, -1), (1, -3), (4, -3)]);
        assert_eq!(np.segments[0].slope, Ratio::from_integer(-2));
        assert_eq!(np.segments[0].length(), 1);
        assert_eq!(np.segments[1].slope, Ratio::from_integer(0));
        assert_eq!(np.segments[1].length(), 3);
    }

    #[test]
    fn small_polygons() {
        let np = newton_polygon(&Poly::from_ints(&[-1, -3, 6])).unwrap();
        assert_eq!(
            np.root_valuations(),
            vec![(Ratio::from_integer(0), 1), (Ratio::from_integer(-1), 1)]
        );
        let np = newton_polygon(&Poly::from_ints(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(np.root_valuations(), vec![(Ratio::new(1, 3), 3)]);
        let np = newton_polygon(&Poly::new(vec![
            Rational2::zero(),
            Rational2::zero(),
            q(1, 4),
        ]))
        .unwrap();
        assert_eq!(np.zero_root_multiplicity(), 2);
        assert!(np.segments.is_empty());
        assert!(newton_polygon(&Poly::zero()).is_err());
    }

    #[test]
    fn serializes_slopes_as_strings() {
        let np = newton_polygon(&Poly::from_ints(&[-2, 0, 0, 1])).unwrap();
        let js = serde_json::to_string(&np).unwrap();
        assert!(js.contains("\"-1/3\""), "{js}");
        let back: NewtonPolygon = serde_json::from_str(&js).unwrap();
        assert_eq!(back, np);
    }
}
