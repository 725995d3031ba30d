//! Rational maps of the Riemann sphere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    homogeneous_compose, moebius_conjugate, poly_roots, Chart, ComplexValue, MoebiusTransform,
    Polynomial, RootError, SpherePoint, ROOT_TOL,
};

/// Largest `degree^n` for which [`RationalMap::compose_self`] materializes coefficients.
pub const MAX_COMPOSED_DEGREE: usize = 4096;

/// Resultant threshold (after scaling both polynomials to unit max-coefficient).
pub const COPRIME_TOL: f64 = 1e-10;

/// Relative size below which a coefficient is treated as zero when reading
/// off degrees and vanishing orders.
const COEFF_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MapError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("map has degree {0} after cancellation; degree at least 2 is required")]
    DegreeTooLow(usize),
    #[error("numerator and denominator are not coprime (resultant factor {0:e})")]
    NotCoprime(f64),
    #[error("degree {degree}^{n} exceeds the composition bound {bound}")]
    DegreeBound { degree: usize, n: usize, bound: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// `f(z) = num(z) / den(z)` with coprime numerator and denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
    degree: usize,
    // z^d num(1/z) and z^d den(1/z), for evaluation in the chart at infinity.
    num_rev: Polynomial,
    den_rev: Polynomial,
}

/// Wire form `{"num": [[re, im], ...], "den": [[re, im], ...]}`, ascending degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl TryFrom<MapJson> for RationalMap {
    type Error = MapError;
    fn try_from(m: MapJson) -> Result<Self, MapError> {
        RationalMap::normalize(m.num, m.den)
    }
}

impl From<RationalMap> for MapJson {
    fn from(f: RationalMap) -> Self {
        MapJson {
            num: f.num,
            den: f.den,
        }
    }
}

/// A critical point with its local degree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: SpherePoint,
    pub local_degree: usize,
}

impl RationalMap {
    /// Cancels common roots of `raw_num` and `raw_den` and records the degree.
    pub fn normalize(raw_num: Polynomial, raw_den: Polynomial) -> Result<Self, MapError> {
        if raw_den.is_zero() {
            return Err(MapError::ZeroDenominator);
        }
        let (mut num, mut den) = (raw_num, raw_den);
        if !num.is_zero() && num.degree() > Some(0) && den.degree() > Some(0) {
            // Roots of the lower-degree side are candidates for common roots.
            let swap = num.degree() < den.degree();
            let (small, large) = if swap { (&num, &den) } else { (&den, &num) };
            let mut common = Vec::new();
            for r in poly_roots(small, ROOT_TOL)? {
                let scale = large.abs_scale(r.value).max(f64::MIN_POSITIVE);
                if large.eval(r.value).norm() <= 1e-8 * scale {
                    common.push(r);
                }
            }
            for r in common {
                // The multiplicity in the larger polynomial may be smaller.
                for _ in 0..r.multiplicity {
                    let s = den.abs_scale(r.value).max(f64::MIN_POSITIVE);
                    let t = num.abs_scale(r.value).max(f64::MIN_POSITIVE);
                    if den.eval(r.value).norm() > 1e-8 * s || num.eval(r.value).norm() > 1e-8 * t {
                        break;
                    }
                    num = num.deflate(r.value);
                    den = den.deflate(r.value);
                }
            }
        }
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        if num.is_zero() || degree < 2 {
            return Err(MapError::DegreeTooLow(if num.is_zero() { 0 } else { degree }));
        }
        let res = coprimality_margin(&num, &den)?;
        if res < COPRIME_TOL {
            return Err(MapError::NotCoprime(res));
        }
        Ok(Self::build(num, den, degree))
    }

    fn build(num: Polynomial, den: Polynomial, degree: usize) -> Self {
        let num_rev = num.reversed(degree);
        let den_rev = den.reversed(degree);
        RationalMap { num, den, degree, num_rev, den_rev }
    }

    /// Polynomial map `p(z)`.
    pub fn polynomial(p: Polynomial) -> Result<Self, MapError> {
        Self::normalize(p, Polynomial::one())
    }

    /// Builds a map from parts known to be coprime (compositions and
    /// conjugates of normalized maps).
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Result<Self, MapError> {
        if den.is_zero() {
            return Err(MapError::ZeroDenominator);
        }
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        if num.is_zero() || degree < 2 {
            return Err(MapError::DegreeTooLow(degree));
        }
        Ok(Self::build(num, den, degree))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.num.coeffs().iter().chain(self.den.coeffs()).all(|c| c.im == 0.0)
    }

    /// Value at a finite point; poles return infinity.
    pub fn eval(&self, z: ComplexValue) -> SpherePoint {
        self.eval_sphere(&SpherePoint::finite(z))
    }

    pub fn eval_sphere(&self, x: &SpherePoint) -> SpherePoint {
        self.eval_in_chart(x, x.preferred_chart())
    }

    /// Evaluates using the affine chart `chart` of the source point.
    ///
    /// # Panics
    /// If `x` is the pole of `chart`.
    pub fn eval_in_chart(&self, x: &SpherePoint, chart: Chart) -> SpherePoint {
        let u = x.coordinate(chart).expect("point lies outside the requested chart");
        let (a, b) = match chart {
            Chart::Finite => (self.num.eval(u), self.den.eval(u)),
            Chart::Infinite => (self.num_rev.eval(u), self.den_rev.eval(u)),
        };
        SpherePoint::from_homogeneous(a, b).unwrap_or_else(|| {
            // Both vanish only through underflow at extreme inputs; fall back
            // to homogeneous evaluation on the normalized representative.
            let (z, w) = x.homogeneous();
            SpherePoint::from_homogeneous(
                self.num.eval_homogeneous(z, w, self.degree),
                self.den.eval_homogeneous(z, w, self.degree),
            )
            .expect("coprime map has no common zero")
        })
    }

    /// Derivative of `f` read in the preferred charts of `x` and `f(x)`.
    pub fn chart_derivative(&self, x: &SpherePoint) -> ComplexValue {
        let fx = self.eval_sphere(x);
        self.derivative_in_charts(x, x.preferred_chart(), fx.preferred_chart())
            .expect("preferred charts contain their points")
    }

    /// Derivative of `f` at `x` from chart `src` to chart `dst`. Along a
    /// cycle where every point uses one chart as both source and target, the
    /// product of these values is the multiplier. `None` when `x` or `f(x)`
    /// lies at the pole of the requested chart.
    pub fn derivative_in_charts(
        &self,
        x: &SpherePoint,
        src: Chart,
        dst: Chart,
    ) -> Option<ComplexValue> {
        let u = x.coordinate(src)?;
        let (p, q) = match src {
            Chart::Finite => (&self.num, &self.den),
            Chart::Infinite => (&self.num_rev, &self.den_rev),
        };
        let (a, da) = p.eval_with_derivative(u);
        let (b, db) = q.eval_with_derivative(u);
        let d = match dst {
            Chart::Finite => (da * b - a * db) / (b * b),
            Chart::Infinite => (db * a - b * da) / (a * a),
        };
        d.is_finite().then_some(d)
    }

    /// The value `f(∞)`.
    pub fn value_at_infinity(&self) -> SpherePoint {
        self.eval_sphere(&SpherePoint::INFINITY)
    }

    /// `num' den - num den'`, whose roots are the finite critical points.
    pub fn wronskian(&self) -> Polynomial {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    /// Critical points with local degrees; `sum (local_degree - 1) = 2d - 2`.
    pub fn critical_points(&self) -> Result<Vec<CriticalPoint>, MapError> {
        let w = self.wronskian().trim_relative(COEFF_ZERO_TOL);
        let mut out = Vec::new();
        if w.degree().unwrap_or(0) >= 1 {
            for r in poly_roots(&w, ROOT_TOL)? {
                out.push(CriticalPoint {
                    location: SpherePoint::finite(r.value),
                    local_degree: r.multiplicity + 1,
                });
            }
        }
        // Infinity: order of vanishing at 0 of the conjugate by 1/z.
        let h = self.conjugate(&MoebiusTransform::inversion());
        let order = h.wronskian().order_at_zero(COEFF_ZERO_TOL);
        if order > 0 {
            out.push(CriticalPoint {
                location: SpherePoint::INFINITY,
                local_degree: order + 1,
            });
        }
        Ok(out)
    }

    pub fn critical_values(&self) -> Result<Vec<SpherePoint>, MapError> {
        Ok(self
            .critical_points()?
            .iter()
            .map(|c| self.eval_sphere(&c.location))
            .collect())
    }

    /// The fiber over `v`, with multiplicities summing to the degree.
    pub fn preimages(&self, v: &SpherePoint) -> Result<Vec<(SpherePoint, usize)>, MapError> {
        let (a, b) = v.homogeneous();
        // f(z) = a/b  <=>  b num(z) - a den(z) = 0
        let eq = (&self.num.scale(b) - &self.den.scale(a)).trim_relative(1e-14);
        let finite_degree = eq.degree().unwrap_or(0);
        let mut out = Vec::new();
        if finite_degree >= 1 {
            for r in poly_roots(&eq, ROOT_TOL)? {
                out.push((SpherePoint::finite(r.value), r.multiplicity));
            }
        }
        if finite_degree < self.degree {
            out.push((SpherePoint::INFINITY, self.degree - finite_degree));
        }
        Ok(out)
    }

    /// Finite preimages of a finite value, each listed once per multiplicity.
    pub fn fiber(&self, v: ComplexValue) -> Result<Vec<ComplexValue>, MapError> {
        let eq = (&self.num - &self.den.scale(v)).trim_relative(1e-14);
        let mut out = Vec::with_capacity(self.degree);
        if eq.degree().unwrap_or(0) >= 1 {
            for r in poly_roots(&eq, ROOT_TOL)? {
                out.extend(std::iter::repeat_n(r.value, r.multiplicity));
            }
        }
        Ok(out)
    }

    pub fn iterate(&self, x: &SpherePoint, n: usize) -> SpherePoint {
        (0..n).fold(*x, |p, _| self.eval_sphere(&p))
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &RationalMap) -> RationalMap {
        let n = self.degree;
        let num = homogeneous_compose(&self.num, n, &inner.num, &inner.den);
        let den = homogeneous_compose(&self.den, n, &inner.num, &inner.den);
        RationalMap::from_coprime(num, den).expect("composition of maps of degree >= 2")
    }

    /// Coefficients of the `n`-th iterate, for `degree^n <= MAX_COMPOSED_DEGREE`.
    pub fn compose_self(&self, n: usize) -> Result<RationalMap, MapError> {
        assert!(n >= 1, "compose_self needs n >= 1");
        let bound_err = MapError::DegreeBound {
            degree: self.degree,
            n,
            bound: MAX_COMPOSED_DEGREE,
        };
        let total = u32::try_from(n)
            .ok()
            .and_then(|e| self.degree.checked_pow(e))
            .ok_or(bound_err.clone())?;
        if total > MAX_COMPOSED_DEGREE {
            return Err(bound_err);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// `m ∘ f ∘ m^{-1}`
    pub fn conjugate(&self, m: &MoebiusTransform) -> RationalMap {
        let (num, den) = moebius_conjugate(&self.num, &self.den, m);
        let num = num.trim_relative(1e-15);
        let den = den.trim_relative(1e-15);
        RationalMap::from_coprime(num, den).expect("conjugation preserves degree")
    }

    /// Largest relative cross-multiplied discrepancy `|P1 Q2 - P2 Q1|` over
    /// the probe points, each term scaled by `|P1 Q2| + |P2 Q1|`.
    pub fn max_cross_error(&self, other: &RationalMap, probes: &[ComplexValue]) -> f64 {
        probes
            .iter()
            .map(|&z| {
                let a = self.num.eval(z) * other.den.eval(z);
                let b = other.num.eval(z) * self.den.eval(z);
                let scale = a.norm() + b.norm();
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Smallest factor of the resultant in product form: over the roots `β` of
/// the lower-degree polynomial, `|other(β)| / sum |c_k| |β|^k`. A common root
/// gives a factor at rounding level; unlike the full coefficient-scaled
/// resultant the value does not decay with the degree.
pub fn coprimality_margin(p: &Polynomial, q: &Polynomial) -> Result<f64, MapError> {
    let (m, n) = match (p.degree(), q.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return Ok(0.0),
    };
    if m == 0 || n == 0 {
        return Ok(1.0);
    }
    let (small, large) = if n <= m { (q, p) } else { (p, q) };
    let mut margin: f64 = 1.0;
    for r in poly_roots(small, ROOT_TOL)? {
        let scale = large.abs_scale(r.value).max(f64::MIN_POSITIVE);
        margin = margin.min(large.eval(r.value).norm() / scale);
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn g() -> RationalMap {
        RationalMap::normalize(
            Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]),
            Polynomial::from_real(&[-1.0, 1.5]),
        )
        .unwrap()
    }

    fn z_squared() -> RationalMap {
        RationalMap::polynomial(Polynomial::monomial(c64(1.0, 0.0), 2)).unwrap()
    }

    fn sorted_crit(f: &RationalMap) -> Vec<(Option<f64>, usize)> {
        let mut v: Vec<_> = f
            .critical_points()
            .unwrap()
            .iter()
            .map(|c| (c.location.to_finite().map(|z| z.re), c.local_degree))
            .collect();
        v.sort_by(|a, b| match (a.0, b.0) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, None) => std::cmp::Ordering::Equal,
        });
        v
    }

    #[test]
    fn cancellation_to_degree_one_is_rejected() {
        let err = RationalMap::normalize(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[-1.0, 1.0]),
        )
        .unwrap_err();
        assert_eq!(err, MapError::DegreeTooLow(1));
    }

    #[test]
    fn common_factor_is_cancelled() {
        let extra = Polynomial::from_real(&[0.5, 1.0]);
        let num = &Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]) * &extra;
        let den = &Polynomial::from_real(&[-1.0, 1.5]) * &extra;
        let f = RationalMap::normalize(num, den).unwrap();
        assert_eq!(f.degree(), 3);
        let probes = [c64(0.3, 0.1), c64(-1.7, 0.4), c64(2.5, -2.0)];
        assert!(f.max_cross_error(&g(), &probes) < 1e-12);
    }

    #[test]
    fn coprime_example_resultant() {
        let f = g();
        assert_eq!(f.degree(), 3);
        assert!(coprimality_margin(f.num(), f.den()).unwrap() > 1e-3);
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(
            RationalMap::normalize(Polynomial::one(), Polynomial::zero()),
            Err(MapError::ZeroDenominator)
        );
    }

    #[test]
    fn evaluation_examples() {
        let f = g();
        assert!(f.eval(c64(0.0, 0.0)).approx_eq(&SpherePoint::real(-2.0), 1e-15));
        assert!(f.value_at_infinity().is_infinity());
        assert!(f.eval(c64(2.0 / 3.0, 0.0)).approx_eq(&SpherePoint::INFINITY, 1e-12));
    }

    #[test]
    fn charts_agree_where_both_defined() {
        let f = g();
        for z in [c64(0.4, 0.9), c64(-3.0, 1.0), c64(1.1, -0.2)] {
            let x = SpherePoint::finite(z);
            let a = f.eval_in_chart(&x, Chart::Finite);
            let b = f.eval_in_chart(&x, Chart::Infinite);
            assert!(a.chordal(&b) < 1e-12);
        }
    }

    #[test]
    fn critical_points_of_examples() {
        assert_eq!(sorted_crit(&z_squared()), vec![(Some(0.0), 2), (None, 2)]);
        let c = sorted_crit(&g());
        assert_eq!(c.len(), 3);
        assert!(c[0].0.unwrap().abs() < 1e-12 && c[0].1 == 3);
        assert!((c[1].0.unwrap() - 1.0).abs() < 1e-12 && c[1].1 == 2);
        assert_eq!(c[2], (None, 2));
    }

    #[test]
    fn preimage_examples() {
        let sq = z_squared();
        let mut pre = sq.preimages(&SpherePoint::real(4.0)).unwrap();
        pre.sort_by(|a, b| a.0.to_finite().unwrap().re.total_cmp(&b.0.to_finite().unwrap().re));
        assert_eq!(pre.len(), 2);
        assert!(pre[0].0.approx_eq(&SpherePoint::real(-2.0), 1e-12));
        assert!(pre[1].0.approx_eq(&SpherePoint::real(2.0), 1e-12));

        let pre = g().preimages(&SpherePoint::real(0.0)).unwrap();
        assert_eq!(pre.len(), 2);
        for (p, m) in pre {
            let z = p.to_finite().unwrap();
            if m == 2 {
                assert!((z - 1.0).norm() < 1e-9);
            } else {
                assert!((z + 2.0).norm() < 1e-12);
            }
        }

        let pre = g().preimages(&SpherePoint::real(-2.0)).unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre[0].1, 3);
        assert!(pre[0].0.approx_eq(&SpherePoint::real(0.0), 1e-15));

        let pre = g().preimages(&SpherePoint::INFINITY).unwrap();
        let at_inf: usize = pre.iter().filter(|p| p.0.is_infinity()).map(|p| p.1).sum();
        assert_eq!(at_inf, 2);
    }

    #[test]
    fn iteration_examples() {
        let f = g();
        let one = SpherePoint::real(1.0);
        assert!(f.iterate(&one, 1).approx_eq(&SpherePoint::real(0.0), 1e-15));
        assert!(f.iterate(&one, 2).approx_eq(&SpherePoint::real(-2.0), 1e-15));
        assert!(f.iterate(&one, 3).approx_eq(&SpherePoint::real(0.0), 1e-15));
        assert!(z_squared().iterate(&SpherePoint::real(2.0), 3).approx_eq(&SpherePoint::real(256.0), 1e-15));
        let g2 = f.compose_self(2).unwrap();
        assert_eq!(g2.degree(), 9);
        assert!(g2.eval(c64(0.0, 0.0)).approx_eq(&SpherePoint::real(0.0), 1e-15));
    }

    #[test]
    fn composed_iterate_matches_pointwise() {
        let f = g();
        let f3 = f.compose_self(3).unwrap();
        for z in [c64(0.3, 0.2), c64(-1.0, 0.5), c64(2.2, -0.1)] {
            let x = SpherePoint::finite(z);
            assert!(f3.eval_sphere(&x).chordal(&f.iterate(&x, 3)) < 1e-9);
        }
    }

    #[test]
    fn degree_bound_is_enforced() {
        assert!(matches!(g().compose_self(8), Err(MapError::DegreeBound { .. })));
        assert!(z_squared().compose_self(12).is_ok());
    }

    #[test]
    fn conjugate_of_g_by_inversion_has_critical_fixed_point_at_zero() {
        let h = g().conjugate(&MoebiusTransform::inversion());
        assert!(h.eval(c64(0.0, 0.0)).approx_eq(&SpherePoint::real(0.0), 1e-15));
        let crit = h.critical_points().unwrap();
        let at_zero = crit
            .iter()
            .find(|c| c.location.approx_eq(&SpherePoint::real(0.0), 1e-9))
            .unwrap();
        assert_eq!(at_zero.local_degree, 2);
    }

    #[test]
    fn multiplier_chart_derivative() {
        // g'(2) = 3
        let d = g().chart_derivative(&SpherePoint::real(2.0));
        assert!((d - c64(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let f = g();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"num":[[2.0,0.0],[-3.0,0.0],[0.0,0.0],[1.0,0.0]],"den":[[-1.0,0.0],[1.5,0.0]]}"#);
        let back: RationalMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<RationalMap>(r#"{"num":[[1,0]],"den":[[1,0]]}"#).is_err());
    }
}
