use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ComplexValue;

/// Affine chart of the sphere: `Finite` uses `z/w`, `Infinite` uses `w/z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Finite,
    Infinite,
}

/// A point of the Riemann sphere in homogeneous coordinates `(z : w)`.
///
/// The pair is normalized so that `max(|z|, |w|) = 1`; the point at infinity
/// is `(1 : 0)`. Use [`SpherePoint::approx_eq`] or [`chordal`] for
/// comparisons, the derived `PartialEq` compares representatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    z: ComplexValue,
    w: ComplexValue,
}

impl SpherePoint {
    pub const INFINITY: SpherePoint = SpherePoint {
        z: ComplexValue::new(1.0, 0.0),
        w: ComplexValue::new(0.0, 0.0),
    };

    pub fn finite(z: ComplexValue) -> Self {
        Self::from_homogeneous(z, ComplexValue::new(1.0, 0.0))
            .expect("w = 1 is never degenerate")
    }

    pub fn real(x: f64) -> Self {
        Self::finite(ComplexValue::new(x, 0.0))
    }

    /// Normalizes `(z : w)`. Returns `None` for `(0 : 0)` or non-finite input.
    pub fn from_homogeneous(z: ComplexValue, w: ComplexValue) -> Option<Self> {
        let scale = z.norm().max(w.norm());
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        Some(SpherePoint {
            z: z / scale,
            w: w / scale,
        })
    }

    pub fn homogeneous(&self) -> (ComplexValue, ComplexValue) {
        (self.z, self.w)
    }

    pub fn is_infinity(&self) -> bool {
        self.w == ComplexValue::new(0.0, 0.0)
    }

    /// Affine coordinate, or `None` at infinity.
    pub fn to_finite(&self) -> Option<ComplexValue> {
        if self.is_infinity() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    /// The chart in which this point has coordinate of modulus at most one.
    pub fn preferred_chart(&self) -> Chart {
        if self.z.norm() <= self.w.norm() {
            Chart::Finite
        } else {
            Chart::Infinite
        }
    }

    /// Coordinate in the given chart (`None` if the point is the chart's pole).
    pub fn coordinate(&self, chart: Chart) -> Option<ComplexValue> {
        match chart {
            Chart::Finite => self.to_finite(),
            Chart::Infinite => {
                if self.z == ComplexValue::new(0.0, 0.0) {
                    None
                } else {
                    Some(self.w / self.z)
                }
            }
        }
    }

    pub fn from_chart(chart: Chart, u: ComplexValue) -> Self {
        match chart {
            Chart::Finite => Self::finite(u),
            Chart::Infinite => Self::from_homogeneous(ComplexValue::new(1.0, 0.0), u)
                .expect("z = 1 is never degenerate"),
        }
    }

    pub fn conj(&self) -> Self {
        SpherePoint {
            z: self.z.conj(),
            w: self.w.conj(),
        }
    }

    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        chordal(self, other)
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        chordal(self, other) < tol
    }
}

impl From<ComplexValue> for SpherePoint {
    fn from(z: ComplexValue) -> Self {
        SpherePoint::finite(z)
    }
}

/// Chordal distance on the unit-diameter-2 sphere; values lie in `[0, 2]`.
pub fn chordal(a: &SpherePoint, b: &SpherePoint) -> f64 {
    let cross = a.z * b.w - b.z * a.w;
    let na = (a.z.norm_sqr() + a.w.norm_sqr()).sqrt();
    let nb = (b.z.norm_sqr() + b.w.norm_sqr()).sqrt();
    2.0 * cross.norm() / (na * nb)
}

// Finite points serialize as `[re, im]`, infinity as the string "inf".
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_finite() {
            Some(z) => [z.re, z.im].serialize(s),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(SpherePoint::finite(ComplexValue::new(re, im))),
            Repr::Tag(t) if t == "inf" => Ok(SpherePoint::INFINITY),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected [re, im] or \"inf\", got {t:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn normalization_uses_max_modulus() {
        let p = SpherePoint::from_homogeneous(c64(4.0, 0.0), c64(0.0, 2.0)).unwrap();
        let (z, w) = p.homogeneous();
        assert!((z.norm().max(w.norm()) - 1.0).abs() < 1e-15);
        assert!((p.to_finite().unwrap() - c64(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_pair_is_rejected() {
        assert!(SpherePoint::from_homogeneous(c64(0.0, 0.0), c64(0.0, 0.0)).is_none());
    }

    #[test]
    fn chordal_distance_to_infinity() {
        let far = SpherePoint::real(1e12);
        assert!(far.chordal(&SpherePoint::INFINITY) < 1e-11);
        let zero = SpherePoint::real(0.0);
        assert!((zero.chordal(&SpherePoint::INFINITY) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_does_not_change_the_point() {
        let a = SpherePoint::from_homogeneous(c64(1.0, 2.0), c64(3.0, -1.0)).unwrap();
        let b = SpherePoint::from_homogeneous(c64(1.0, 2.0) * c64(0.0, 7.0), c64(3.0, -1.0) * c64(0.0, 7.0))
            .unwrap();
        assert!(a.approx_eq(&b, 1e-15));
    }

    #[test]
    fn charts_agree() {
        let p = SpherePoint::finite(c64(3.0, 4.0));
        let u = p.coordinate(Chart::Infinite).unwrap();
        assert!((u - c64(3.0, 4.0).inv()).norm() < 1e-15);
        assert!(SpherePoint::from_chart(Chart::Infinite, u).approx_eq(&p, 1e-15));
        assert!(SpherePoint::INFINITY.coordinate(Chart::Finite).is_none());
        assert_eq!(SpherePoint::INFINITY.coordinate(Chart::Infinite), Some(c64(0.0, 0.0)));
    }

    #[test]
    fn json_representation() {
        let s = serde_json::to_string(&vec![SpherePoint::real(-2.0), SpherePoint::INFINITY]).unwrap();
        assert_eq!(s, "[[-2.0,0.0],\"inf\"]");
        let back: Vec<SpherePoint> = serde_json::from_str(&s).unwrap();
        assert!(back[1].is_infinity());
    }
}
