use thiserror::Error;

use super::poly::Polynomial;
use super::{ComplexValue, SpherePoint};

#[derive(Clone, Debug, Error, PartialEq)]
#[error("Moebius matrix is singular (|det| = {0:e})")]
pub struct SingularMoebius(pub f64);

/// `z -> (a z + b) / (c z + d)` stored as the matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusTransform {
    pub a: ComplexValue,
    pub b: ComplexValue,
    pub c: ComplexValue,
    pub d: ComplexValue,
}

impl MoebiusTransform {
    const DET_TOL: f64 = 1e-14;

    pub fn new(
        a: ComplexValue,
        b: ComplexValue,
        c: ComplexValue,
        d: ComplexValue,
    ) -> Result<Self, SingularMoebius> {
        let m = MoebiusTransform { a, b, c, d };
        let det = m.det().norm();
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !(det > Self::DET_TOL * scale * scale) {
            return Err(SingularMoebius(det));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = ComplexValue::new(1.0, 0.0);
        let zero = ComplexValue::new(0.0, 0.0);
        MoebiusTransform { a: one, b: zero, c: zero, d: one }
    }

    /// `z -> 1/z`
    pub fn inversion() -> Self {
        let one = ComplexValue::new(1.0, 0.0);
        let zero = ComplexValue::new(0.0, 0.0);
        MoebiusTransform { a: zero, b: one, c: one, d: zero }
    }

    /// `z -> 1/(z - p)`, sending `p` to infinity.
    pub fn send_to_infinity(p: ComplexValue) -> Self {
        let one = ComplexValue::new(1.0, 0.0);
        let zero = ComplexValue::new(0.0, 0.0);
        MoebiusTransform { a: zero, b: one, c: one, d: -p }
    }

    pub fn det(&self) -> ComplexValue {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        MoebiusTransform {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusTransform {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, x: &SpherePoint) -> SpherePoint {
        let (z, w) = x.homogeneous();
        SpherePoint::from_homogeneous(self.a * z + self.b * w, self.c * z + self.d * w)
            .expect("invertible matrix maps nonzero vectors to nonzero vectors")
    }
}

/// Coefficients of `m ∘ f ∘ m^{-1}` for `f = num/den`.
///
/// The result has the same degree as `f`; no cancellation is attempted
/// because conjugation preserves coprimality.
pub fn moebius_conjugate(
    num: &Polynomial,
    den: &Polynomial,
    m: &MoebiusTransform,
) -> (Polynomial, Polynomial) {
    let n = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    let inv = m.inverse();
    // f ∘ m^{-1} in homogeneous form: substitute z -> inv.a z + inv.b,
    // w -> inv.c z + inv.d.
    let sub_num = Polynomial::new(vec![inv.b, inv.a]);
    let sub_den = Polynomial::new(vec![inv.d, inv.c]);
    let p = super::homogeneous_compose(num, n, &sub_num, &sub_den);
    let q = super::homogeneous_compose(den, n, &sub_num, &sub_den);
    let out_num = &p.scale(m.a) + &q.scale(m.b);
    let out_den = &p.scale(m.c) + &q.scale(m.d);
    (out_num, out_den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn singular_matrix_is_rejected() {
        let one = c64(1.0, 0.0);
        assert!(MoebiusTransform::new(one, one, one, one).is_err());
    }

    #[test]
    fn inverse_undoes_apply() {
        let m = MoebiusTransform::new(c64(1.0, 2.0), c64(0.5, 0.0), c64(-1.0, 0.0), c64(3.0, 1.0)).unwrap();
        let x = SpherePoint::finite(c64(0.3, -0.8));
        assert!(m.inverse().apply(&m.apply(&x)).approx_eq(&x, 1e-14));
        let y = m.apply(&SpherePoint::INFINITY);
        assert!(y.approx_eq(&SpherePoint::finite(c64(1.0, 2.0) / c64(-1.0, 0.0)), 1e-14));
    }

    #[test]
    fn conjugating_z_squared_by_inversion() {
        let num = Polynomial::monomial(c64(1.0, 0.0), 2);
        let den = Polynomial::one();
        let (n, d) = moebius_conjugate(&num, &den, &MoebiusTransform::inversion());
        // 1/(1/z)^2 = z^2
        let lead = n.leading();
        assert_eq!(n.degree(), Some(2));
        assert_eq!(d.degree(), Some(0));
        assert!((lead / d.coeff(0) - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_conjugation_is_exact() {
        let num = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]);
        let den = Polynomial::from_real(&[-1.0, 1.5]);
        let (n, d) = moebius_conjugate(&num, &den, &MoebiusTransform::identity());
        assert_eq!(n, num);
        assert_eq!(d, den);
    }
}
