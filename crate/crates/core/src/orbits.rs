//! Critical orbits, cycle detection and periodic points.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{
    aberth_refine, chordal, cluster_roots_by, root_approximations, ComplexValue, MoebiusTransform, Polynomial, SpherePoint, CHORDAL_TOL, ROOT_TOL,
};
use crate::ratmap::{CriticalPoint, MapError, RationalMap};

/// Number of trailing orbit points searched for a revisit.
pub const CYCLE_WINDOW: usize = 64;

/// `|multiplier|` below this counts as zero.
pub const SUPERATTRACTING_TOL: f64 = 1e-6;

/// `| |multiplier| - 1 |` below this counts as indifferent.
pub const INDIFFERENT_TOL: f64 = 1e-9;

/// Chordal distance between a cycle point and a critical point below which
/// the cycle is said to contain that critical point.
pub const CRITICAL_MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OrbitError {
    #[error("orbit did not close up within {iterations} iterations")]
    Unresolved {
        iterations: usize,
        last: SpherePoint,
    },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleClass {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl CycleClass {
    pub fn from_multiplier(m: Option<ComplexValue>) -> Self {
        match m.map(|m| m.norm()) {
            None => CycleClass::Repelling,
            Some(r) if r < SUPERATTRACTING_TOL => CycleClass::Superattracting,
            Some(r) if (r - 1.0).abs() < INDIFFERENT_TOL => CycleClass::Indifferent,
            Some(r) if r < 1.0 => CycleClass::Attracting,
            Some(_) => CycleClass::Repelling,
        }
    }

    pub fn is_attracting(self) -> bool {
        matches!(self, CycleClass::Superattracting | CycleClass::Attracting)
    }
}

/// Three-valued flag; `Unknown` serializes as `null`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tristate {
    True,
    False,
    Unknown,
}

impl Tristate {
    pub fn is_true(self) -> bool {
        self == Tristate::True
    }
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::True
        } else {
            Tristate::False
        }
    }
}

impl Serialize for Tristate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tristate::True => s.serialize_bool(true),
            Tristate::False => s.serialize_bool(false),
            Tristate::Unknown => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub start: SpherePoint,
    pub preperiod: usize,
    pub period: usize,
    pub cycle: Vec<SpherePoint>,
    /// `None` stands for an infinite multiplier.
    #[serde(serialize_with = "ser_multiplier")]
    pub multiplier: Option<ComplexValue>,
    pub class: CycleClass,
    /// The orbit `start, f(start), ..., f^(preperiod + period - 1)(start)`.
    #[serde(skip)]
    pub orbit: Vec<SpherePoint>,
    /// The orbit hit the cycle in one step (as opposed to converging onto it).
    #[serde(skip)]
    pub lands_exactly: bool,
}

fn ser_multiplier<S: Serializer>(m: &Option<ComplexValue>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(z) => [z.re, z.im].serialize(s),
        None => s.serialize_str("inf"),
    }
}

impl CycleReport {
    pub fn contains(&self, x: &SpherePoint, tol: f64) -> bool {
        self.cycle.iter().any(|c| chordal(c, x) < tol)
    }

    /// Index of the cycle point nearest to `x` within `tol`.
    pub fn index_of(&self, x: &SpherePoint, tol: f64) -> Option<usize> {
        self.cycle
            .iter()
            .enumerate()
            .map(|(i, c)| (i, chordal(c, x)))
            .filter(|&(_, d)| d < tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }
}

/// Follows the orbit of `start` until a point revisits one of the previous
/// [`CYCLE_WINDOW`] points within chordal distance `tol`.
pub fn detect_cycle(
    f: &RationalMap,
    start: &SpherePoint,
    tol: f64,
    max_iter: usize,
) -> Result<CycleReport, OrbitError> {
    assert!(tol > 0.0, "cycle tolerance must be positive");
    let mut orbit = vec![*start];
    for n in 1..=max_iter {
        let next = f.eval_sphere(&orbit[n - 1]);
        orbit.push(next);
        let hit = (1..=CYCLE_WINDOW.min(n)).find(|&k| chordal(&orbit[n], &orbit[n - k]) < tol);
        let Some(period) = hit else { continue };

        let gap = |j: usize| chordal(&orbit[j], &orbit[j + period]);
        let preperiod = (0..=n - period).find(|&j| gap(j) < tol).unwrap();
        let lands_exactly = preperiod == 0 || gap(preperiod - 1) > tol.sqrt();

        // Latest representative of each phase (the most accurate one for
        // converging orbits); cycle[0] is the first cycle point reached.
        let cycle: Vec<SpherePoint> = (0..period)
            .map(|i| orbit[n - (n - preperiod - i) % period])
            .collect();
        let multiplier = cycle_multiplier(f, &cycle);
        orbit.truncate(preperiod + period);
        return Ok(CycleReport {
            start: *start,
            preperiod,
            period,
            cycle,
            class: CycleClass::from_multiplier(multiplier),
            multiplier,
            orbit,
            lands_exactly,
        });
    }
    Err(OrbitError::Unresolved {
        iterations: max_iter,
        last: orbit[max_iter],
    })
}

/// Product of chart derivatives around the cycle.
pub fn cycle_multiplier(f: &RationalMap, cycle: &[SpherePoint]) -> Option<ComplexValue> {
    let charts: Vec<_> = cycle.iter().map(|c| c.preferred_chart()).collect();
    let mut m = ComplexValue::new(1.0, 0.0);
    for i in 0..cycle.len() {
        let j = (i + 1) % cycle.len();
        m *= f.derivative_in_charts(&cycle[i], charts[i], charts[j])?;
    }
    m.is_finite().then_some(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalOrbit {
    pub critical_point: CriticalPoint,
    /// `None` when the orbit did not resolve.
    pub report: Option<CycleReport>,
    /// The cycle the orbit falls into contains a critical point.
    pub cycle_is_critical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPortrait {
    pub critical_points: Vec<CriticalPoint>,
    pub orbits: Vec<CriticalOrbit>,
    /// `P(f)`; `None` unless the map is critically finite.
    pub postcritical_set: Option<Vec<SpherePoint>>,
    /// Postcritical points landing on cycles that contain critical points.
    pub q_set: Option<Vec<SpherePoint>>,
    #[serde(rename = "critically_finite")]
    pub is_critically_finite: Tristate,
    #[serde(rename = "hyperbolic")]
    pub is_hyperbolic: Tristate,
    pub all_postcritical_periodic: Tristate,
}

impl CriticalPortrait {
    /// Distinct cycles reached by critical orbits, in discovery order.
    pub fn cycles(&self) -> Vec<&CycleReport> {
        let mut out: Vec<&CycleReport> = Vec::new();
        for o in &self.orbits {
            if let Some(r) = &o.report {
                if !out.iter().any(|c| c.period == r.period && c.contains(&r.cycle[0], 1e-6)) {
                    out.push(r);
                }
            }
        }
        out
    }

    pub fn superattracting_cycles(&self) -> Vec<&CycleReport> {
        self.cycles()
            .into_iter()
            .filter(|c| c.class == CycleClass::Superattracting)
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PortraitOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            tol: CHORDAL_TOL,
            max_iter: 1000,
        }
    }
}

pub fn critical_portrait(f: &RationalMap) -> Result<CriticalPortrait, OrbitError> {
    critical_portrait_with(f, PortraitOptions::default())
}

pub fn critical_portrait_with(
    f: &RationalMap,
    opts: PortraitOptions,
) -> Result<CriticalPortrait, OrbitError> {
    let critical_points = f.critical_points()?;
    let is_critical = |x: &SpherePoint| {
        critical_points
            .iter()
            .any(|c| chordal(&c.location, x) < CRITICAL_MATCH_TOL)
    };

    let mut orbits = Vec::with_capacity(critical_points.len());
    for cp in &critical_points {
        let report = match detect_cycle(f, &cp.location, opts.tol, opts.max_iter) {
            Ok(r) => Some(r),
            Err(OrbitError::Unresolved { .. }) => None,
            Err(e) => return Err(e),
        };
        let cycle_is_critical = report
            .as_ref()
            .is_some_and(|r| r.cycle.iter().any(&is_critical));
        orbits.push(CriticalOrbit {
            critical_point: *cp,
            report,
            cycle_is_critical,
        });
    }

    let any_unresolved = orbits.iter().any(|o| o.report.is_none());
    let finite_orbits = orbits.iter().all(|o| {
        o.report.as_ref().is_some_and(|r| {
            r.lands_exactly && matches!(r.class, CycleClass::Superattracting | CycleClass::Repelling)
        })
    });
    let is_critically_finite = if finite_orbits {
        Tristate::True
    } else if any_unresolved {
        Tristate::Unknown
    } else {
        Tristate::False
    };

    // Every critical point converges to an attracting cycle.
    let is_hyperbolic = if orbits.iter().all(|o| o.report.as_ref().is_some_and(|r| r.class.is_attracting())) {
        Tristate::True
    } else if orbits
        .iter()
        .any(|o| o.report.as_ref().is_some_and(|r| !r.class.is_attracting()))
    {
        Tristate::False
    } else {
        Tristate::Unknown
    };

    let (postcritical_set, q_set, all_postcritical_periodic) = if finite_orbits {
        // (point, periodic, lands on a critical cycle)
        let mut pts: Vec<(SpherePoint, bool, bool)> = Vec::new();
        for o in &orbits {
            let r = o.report.as_ref().unwrap();
            for (i, x) in r.orbit.iter().enumerate().skip(1) {
                let periodic = i >= r.preperiod;
                match pts.iter_mut().find(|p| chordal(&p.0, x) < 1e-6) {
                    Some(p) => p.1 |= periodic,
                    None => pts.push((*x, periodic, o.cycle_is_critical)),
                }
            }
            // A periodic critical point is its own forward image after one period.
            if r.preperiod == 0 && !pts.iter().any(|p| chordal(&p.0, &r.orbit[0]) < 1e-6) {
                pts.push((r.orbit[0], true, o.cycle_is_critical));
            }
        }
        let all_periodic = pts.iter().all(|p| p.1);
        let q: Vec<SpherePoint> = pts.iter().filter(|p| p.2).map(|p| p.0).collect();
        (
            Some(pts.iter().map(|p| p.0).collect()),
            Some(q),
            Tristate::from(all_periodic),
        )
    } else {
        (None, None, Tristate::Unknown)
    };

    Ok(CriticalPortrait {
        critical_points,
        orbits,
        postcritical_set,
        q_set,
        is_critically_finite,
        is_hyperbolic,
        all_postcritical_periodic,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPoint {
    pub point: SpherePoint,
    pub multiplicity: usize,
    /// Smallest `k` dividing the requested period with `f^k(x) = x`.
    pub minimal_period: usize,
}

/// Chordal tolerance for minimal-period annotation.
pub const PERIOD_CHECK_TOL: f64 = 1e-7;

/// Solutions of `f^p(z) = z` on the sphere, counted with multiplicity
/// (`d^p + 1` in total).
pub fn periodic_points(f: &RationalMap, p: usize) -> Result<Vec<PeriodicPoint>, OrbitError> {
    assert!(p >= 1, "period must be at least 1");
    let fp = f.compose_self(p)?;
    let total = fp.degree() + 1;
    let full = fp.num() - &(&Polynomial::identity() * fp.den());
    // Expanded coefficients can span many orders of magnitude, so the degree
    // is fixed by the multiplicity at infinity rather than by trimming.
    let eq = match infinity_multiplicity(f, p) {
        Some(m) => Polynomial::new(full.coeffs()[..full.coeffs().len().min(total - m + 1)].to_vec()),
        None => full.trim_relative(1e-14),
    };
    let mut out = Vec::new();
    let finite_degree = eq.degree().unwrap_or(0);
    if finite_degree >= 1 {
        let start = root_approximations(&eq, 2000).map_err(MapError::from)?;
        let refined = aberth_refine(start, |z| iterate_residuals(f, p, z).0, 200);
        let multiple = |z: ComplexValue, _| iterate_residuals(f, p, z).2 < MULTIPLE_ROOT_TOL;
        for r in cluster_roots_by(&refined, ROOT_TOL, multiple) {
            let x = SpherePoint::finite(r.value);
            out.push(PeriodicPoint {
                point: x,
                multiplicity: r.multiplicity,
                minimal_period: minimal_period(f, &x, p),
            });
        }
    }
    if finite_degree < total {
        let x = SpherePoint::INFINITY;
        out.push(PeriodicPoint {
            point: x,
            multiplicity: total - finite_degree,
            minimal_period: minimal_period(f, &x, p),
        });
    }
    Ok(out)
}

/// Relative size of `f^p(0) - 0` in the inverted chart below which infinity
/// counts as `p`-periodic.
const INFINITY_PERIODIC_TOL: f64 = 1e-9;

/// Relative size of `(f^p - id)'` below which a root cluster of
/// `f^p(z) = z` is accepted as one multiple root (multiplier 1).
const MULTIPLE_ROOT_TOL: f64 = 1e-4;

/// Multiplicity of infinity as a solution of `f^p(z) = z`: 0 when it is not
/// `p`-periodic, 1 when its multiplier is not 1, and `None` (undecided) for
/// a parabolic point.
fn infinity_multiplicity(f: &RationalMap, p: usize) -> Option<usize> {
    let h = f.conjugate(&MoebiusTransform::inversion());
    let (_, value, slope) = iterate_residuals(&h, p, ComplexValue::new(0.0, 0.0));
    if value >= INFINITY_PERIODIC_TOL {
        Some(0)
    } else if slope >= MULTIPLE_ROOT_TOL {
        Some(1)
    } else {
        None
    }
}

/// Newton correction for `f^p(z) - z`, written `A - zB` with `(A, B)` the
/// homogeneous iterate of `(z, 1)`, followed by `|A - zB|` and
/// `|(A - zB)'|`, each relative to the size of its terms. Every step is
/// rescaled, which leaves all three unchanged and keeps high periods in
/// range.
fn iterate_residuals(f: &RationalMap, p: usize, z: ComplexValue) -> (ComplexValue, f64, f64) {
    let one = ComplexValue::new(1.0, 0.0);
    let (mut a, mut b, mut da, mut db) = (z, one, one, ComplexValue::new(0.0, 0.0));
    let d = f.degree();
    for _ in 0..p {
        let (n, n_a, n_b) = homogeneous_eval(f.num(), d, a, b);
        let (m, m_a, m_b) = homogeneous_eval(f.den(), d, a, b);
        let (na, nb) = (n_a * da + n_b * db, m_a * da + m_b * db);
        let s = n.norm().max(m.norm());
        (a, b, da, db) = (n / s, m / s, na / s, nb / s);
    }
    let value = a - z * b;
    let slope = da - b - z * db;
    (
        value / slope,
        value.norm() / (a.norm() + b.norm() + (z * b).norm()),
        slope.norm() / (da.norm() + b.norm() + (z * db).norm()),
    )
}

/// `P(a, b) = sum c_i a^i b^(d-i)` with both partial derivatives.
fn homogeneous_eval(
    poly: &Polynomial,
    d: usize,
    a: ComplexValue,
    b: ComplexValue,
) -> (ComplexValue, ComplexValue, ComplexValue) {
    let zero = ComplexValue::new(0.0, 0.0);
    let mut pa = vec![ComplexValue::new(1.0, 0.0); d + 1];
    let mut pb = pa.clone();
    for k in 1..=d {
        pa[k] = pa[k - 1] * a;
        pb[k] = pb[k - 1] * b;
    }
    let (mut v, mut va, mut vb) = (zero, zero, zero);
    for (i, &c) in poly.coeffs().iter().enumerate() {
        v += c * pa[i] * pb[d - i];
        if i > 0 {
            va += c * (i as f64) * pa[i - 1] * pb[d - i];
        }
        if i < d {
            vb += c * ((d - i) as f64) * pa[i] * pb[d - i - 1];
        }
    }
    (v, va, vb)
}

fn minimal_period(f: &RationalMap, x: &SpherePoint, p: usize) -> usize {
    (1..=p)
        .filter(|k| p.is_multiple_of(*k))
        .find(|&k| chordal(&f.iterate(x, k), x) < PERIOD_CHECK_TOL)
        .unwrap_or(p)
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

    fn quadratic(c: f64) -> RationalMap {
        RationalMap::polynomial(Polynomial::from_real(&[c, 0.0, 1.0])).unwrap()
    }

    #[test]
    fn cycle_of_zero_under_g() {
        let r = detect_cycle(&g(), &SpherePoint::real(0.0), 1e-8, 100).unwrap();
        assert_eq!((r.preperiod, r.period), (0, 2));
        assert_eq!(r.class, CycleClass::Superattracting);
        assert!(r.multiplier.unwrap().norm() < 1e-12);
        assert!(r.cycle[0].approx_eq(&SpherePoint::real(0.0), 1e-12));
        assert!(r.cycle[1].approx_eq(&SpherePoint::real(-2.0), 1e-12));
        assert!(r.lands_exactly);
    }

    #[test]
    fn one_is_preperiodic_under_g() {
        let r = detect_cycle(&g(), &SpherePoint::real(1.0), 1e-8, 100).unwrap();
        assert_eq!((r.preperiod, r.period), (1, 2));
        assert!(r.cycle[0].approx_eq(&SpherePoint::real(0.0), 1e-12));
    }

    #[test]
    fn converging_orbit_of_z_squared() {
        let r = detect_cycle(&quadratic(0.0), &SpherePoint::real(0.5), 1e-8, 100).unwrap();
        assert_eq!(r.period, 1);
        assert!(r.cycle[0].approx_eq(&SpherePoint::real(0.0), 1e-8));
        assert!(r.multiplier.unwrap().norm() < 1e-8);
        assert!(!r.lands_exactly);
    }

    #[test]
    fn julia_start_is_unresolved() {
        // e^{2 pi i sqrt(2)} on the unit circle under z^2 never revisits.
        let z = c64(0.0, std::f64::consts::TAU * std::f64::consts::SQRT_2).exp();
        let err = detect_cycle(&quadratic(0.0), &SpherePoint::finite(z), 1e-12, 30).unwrap_err();
        assert!(matches!(err, OrbitError::Unresolved { iterations: 30, .. }));
    }

    #[test]
    fn portrait_of_z_squared() {
        let p = critical_portrait(&quadratic(0.0)).unwrap();
        let pc = p.postcritical_set.unwrap();
        assert_eq!(pc.len(), 2);
        assert!(pc.iter().any(|x| x.is_infinity()));
        assert!(pc.iter().any(|x| x.approx_eq(&SpherePoint::real(0.0), 1e-12)));
        assert_eq!(p.is_critically_finite, Tristate::True);
        assert_eq!(p.is_hyperbolic, Tristate::True);
        assert_eq!(p.all_postcritical_periodic, Tristate::True);
    }

    #[test]
    fn chebyshev_is_critically_finite_but_not_hyperbolic() {
        let p = critical_portrait(&quadratic(-2.0)).unwrap();
        let pc = p.postcritical_set.clone().unwrap();
        assert_eq!(pc.len(), 3);
        for v in [-2.0, 2.0] {
            assert!(pc.iter().any(|x| x.approx_eq(&SpherePoint::real(v), 1e-9)));
        }
        assert_eq!(p.is_critically_finite, Tristate::True);
        assert_eq!(p.is_hyperbolic, Tristate::False);
        assert_eq!(p.all_postcritical_periodic, Tristate::False);
        let zero_orbit = p
            .orbits
            .iter()
            .find(|o| !o.critical_point.location.is_infinity())
            .unwrap();
        let r = zero_orbit.report.as_ref().unwrap();
        assert_eq!((r.preperiod, r.period), (2, 1));
        assert!((r.multiplier.unwrap() - c64(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.class, CycleClass::Repelling);
    }

    #[test]
    fn attracting_non_superattracting_cycle_is_not_critically_finite() {
        let p = critical_portrait(&quadratic(0.1)).unwrap();
        assert_eq!(p.is_critically_finite, Tristate::False);
        assert_eq!(p.is_hyperbolic, Tristate::True);
        assert!(p.postcritical_set.is_none());
    }

    #[test]
    fn portrait_of_g() {
        let p = critical_portrait(&g()).unwrap();
        let pc = p.postcritical_set.clone().unwrap();
        assert_eq!(pc.len(), 3);
        assert!(pc.iter().any(|x| x.is_infinity()));
        for v in [0.0, -2.0] {
            assert!(pc.iter().any(|x| x.approx_eq(&SpherePoint::real(v), 1e-9)));
        }
        assert_eq!(p.q_set.as_ref().unwrap().len(), 3);
        assert!(p.is_critically_finite.is_true());
        assert!(p.is_hyperbolic.is_true());
        assert!(p.all_postcritical_periodic.is_true());
        assert_eq!(p.superattracting_cycles().len(), 2);
    }

    #[test]
    fn periodic_points_of_z_squared() {
        let pts = periodic_points(&quadratic(0.0), 2).unwrap();
        assert_eq!(pts.iter().map(|p| p.multiplicity).sum::<usize>(), 5);
        let expected = [
            SpherePoint::real(0.0),
            SpherePoint::INFINITY,
            SpherePoint::real(1.0),
            SpherePoint::finite(c64(0.0, std::f64::consts::TAU / 3.0).exp()),
            SpherePoint::finite(c64(0.0, 2.0 * std::f64::consts::TAU / 3.0).exp()),
        ];
        for e in &expected {
            assert!(pts.iter().any(|p| p.point.approx_eq(e, 1e-10)), "{e:?}");
        }
        let fixed = pts.iter().filter(|p| p.minimal_period == 1).count();
        assert_eq!(fixed, 3);
    }

    #[test]
    fn fixed_points_of_g() {
        let pts = periodic_points(&g(), 1).unwrap();
        assert_eq!(pts.iter().map(|p| p.multiplicity).sum::<usize>(), 4);
        // z^3 - 1.5 z^2 - 2z + 2 = (z - 2)(z^2 + 0.5 z - 1)
        let disc = (0.25f64 + 4.0).sqrt();
        for v in [2.0, (-0.5 + disc) / 2.0, (-0.5 - disc) / 2.0] {
            assert!(pts.iter().any(|p| p.point.approx_eq(&SpherePoint::real(v), 1e-10)), "{v}");
        }
        assert!(pts.iter().any(|p| p.point.is_infinity()));
    }

    #[test]
    fn period_four_points_of_g_are_simple() {
        // g^4(z) - z has 81 simple finite roots, 37 of them real, packed as
        // close as 2e-4 near the pole at 2/3.
        let pts = periodic_points(&g(), 4).unwrap();
        assert_eq!(pts.len(), 82);
        assert!(pts.iter().all(|p| p.multiplicity == 1));
        let real = pts
            .iter()
            .filter_map(|p| p.point.to_finite())
            .filter(|z| z.im.abs() < 1e-9)
            .count();
        assert_eq!(real, 37);
        for p in &pts {
            assert!(chordal(&g().iterate(&p.point, 4), &p.point) < 1e-9);
        }
    }

    #[test]
    fn parabolic_fixed_point_is_double() {
        let f = RationalMap::polynomial(Polynomial::from_real(&[0.0, 1.0, 1.0])).unwrap();
        let pts = periodic_points(&f, 1).unwrap();
        let zero = pts.iter().find(|p| p.point.approx_eq(&SpherePoint::real(0.0), 1e-6)).unwrap();
        assert_eq!(zero.multiplicity, 2);
    }

    #[test]
    fn degree_bound_for_periodic_points() {
        assert!(matches!(
            periodic_points(&g(), 9),
            Err(OrbitError::Map(MapError::DegreeBound { .. }))
        ));
    }
}
