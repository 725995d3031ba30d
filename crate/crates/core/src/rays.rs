//! External rays in a superattracting basin, traced by backward iteration
//! from the linearized Böttcher coordinate.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{ComplexValue, MoebiusTransform, SpherePoint};
use crate::polyline;
use crate::ratmap::{MapError, RationalMap};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RayError {
    #[error("invalid angle {0:?}: expected a reduced fraction a/b with 0 <= a < b")]
    BadAngle(String),
    #[error("basin point is not fixed by the map (chordal gap {0:e})")]
    NotFixed(f64),
    #[error("basin point has local degree {0}; a superattracting point needs at least 2")]
    NotSuperattracting(usize),
    #[error("branch ambiguity at potential level {level} for angle {angle} after refinement")]
    Ambiguous { angle: RayAngle, level: usize },
    #[error("ray {0} did not land")]
    NotLanded(RayAngle),
    #[error("rays {0} and {1} do not land together (gap {2:e})")]
    NotColanding(RayAngle, RayAngle, f64),
    #[error("query point {0} lies within {1:e} of the curve")]
    OnCurve(ComplexValue, f64),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A rational angle `num/den` in `[0, 1)`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RayAngle {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RayAngle {
    pub fn new(num: u64, den: u64) -> Result<Self, RayError> {
        if den == 0 || num >= den {
            return Err(RayError::BadAngle(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(RayAngle {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `m t mod 1`, exactly.
    pub fn times(&self, m: u64) -> RayAngle {
        let num = ((self.num as u128 * m as u128) % self.den as u128) as u64;
        RayAngle::new(num, self.den).expect("reduced residue")
    }

    /// `t, m t, m^2 t, ...` up to the first repeat.
    pub fn orbit(&self, m: u64) -> Vec<RayAngle> {
        let mut out = vec![*self];
        loop {
            let next = out.last().unwrap().times(m);
            if out.contains(&next) {
                return out;
            }
            out.push(next);
        }
    }

    /// `1 - t mod 1`
    pub fn conj(&self) -> RayAngle {
        RayAngle::new((self.den - self.num) % self.den, self.den).unwrap()
    }
}

impl fmt::Display for RayAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RayAngle {
    type Err = RayError;

    /// Accepts `a/b` (and the bare integer `0`); decimals are rejected.
    fn from_str(s: &str) -> Result<Self, RayError> {
        let bad = || RayError::BadAngle(s.to_string());
        let s = s.trim();
        let (a, b) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None if s == "0" => ("0", "1"),
            None => return Err(bad()),
        };
        let num: u64 = a.parse().map_err(|_| bad())?;
        let den: u64 = b.parse().map_err(|_| bad())?;
        if den == 0 || num >= den || gcd(num, den) != 1 {
            return Err(bad());
        }
        RayAngle::new(num, den)
    }
}

impl Serialize for RayAngle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RayOptions {
    /// Number of whole potential shells `r0^(1/m^k)` below the start.
    pub depth: usize,
    pub r0: f64,
    pub landing_tol: f64,
    /// Final shells whose diameter decides landing.
    pub window: usize,
    /// Intermediate radii per shell used for continuation.
    pub shell_steps: usize,
    /// Maximum halvings of a continuation step when matching is ambiguous.
    pub max_refine: u32,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            depth: 120,
            r0: 100.0,
            landing_tol: 1e-6,
            window: 8,
            shell_steps: 4,
            max_refine: 6,
        }
    }
}

/// Samples of `R_t` at potentials `r0^(1/m^k)`, `k = 0..=depth`.
#[derive(Clone, Debug, Serialize)]
pub struct RayTrace {
    pub angle: RayAngle,
    pub samples: Vec<ComplexValue>,
    pub landing: Option<ComplexValue>,
    pub landed: bool,
    /// Diameter of the final `window` samples.
    pub residual: f64,
}

impl RayTrace {
    pub fn landing_point(&self) -> Result<ComplexValue, RayError> {
        self.landing.ok_or(RayError::NotLanded(self.angle))
    }
}

/// Basin data after moving the basin point to infinity.
struct Basin {
    map: RationalMap,
    m: usize,
    lambda: ComplexValue,
    back: Option<MoebiusTransform>,
}

impl Basin {
    fn new(f: &RationalMap, basin: &SpherePoint) -> Result<Self, RayError> {
        let image = f.eval_sphere(basin);
        let gap = image.chordal(basin);
        if gap > 1e-9 {
            return Err(RayError::NotFixed(gap));
        }
        let (map, back) = match basin.to_finite() {
            None => (f.clone(), None),
            Some(c) => {
                let to_inf = MoebiusTransform::send_to_infinity(c);
                (f.conjugate(&to_inf), Some(to_inf.inverse()))
            }
        };
        let dn = map.num().degree().unwrap_or(0);
        let dd = map.den().degree().unwrap_or(0);
        let m = dn.saturating_sub(dd);
        if m < 2 {
            return Err(RayError::NotSuperattracting(m.max(1)));
        }
        let a = map.num().leading() / map.den().leading();
        // φ(z) ≈ λ z with λ^(m-1) = a; the principal root is real positive
        // for real positive a.
        let lambda = a.powf(1.0 / (m - 1) as f64);
        Ok(Basin { map, m, lambda, back })
    }

    fn to_original(&self, z: ComplexValue) -> ComplexValue {
        match &self.back {
            None => z,
            Some(b) => b
                .apply(&SpherePoint::finite(z))
                .to_finite()
                .unwrap_or(ComplexValue::new(f64::INFINITY, 0.0)),
        }
    }

    /// Preimage of the segment `from -> to` continued from `start`, a point
    /// over `from`. The step is halved on ambiguity.
    fn follow(
        &self,
        start: ComplexValue,
        from: ComplexValue,
        to: ComplexValue,
        max_refine: u32,
    ) -> Result<Option<ComplexValue>, MapError> {
        'pieces: for level in 0..=max_refine {
            let n = 1usize << level;
            let mut cur = start;
            for s in 1..=n {
                let v = from + (to - from) * (s as f64 / n as f64);
                let fiber = self.map.fiber(v)?;
                let mut d: Vec<(f64, ComplexValue)> =
                    fiber.iter().map(|&z| ((z - cur).norm(), z)).collect();
                d.sort_by(|a, b| a.0.total_cmp(&b.0));
                if d.len() >= 2 && !(d[0].0 <= 0.5 * d[1].0) {
                    continue 'pieces;
                }
                match d.first() {
                    Some(&(_, z)) => cur = z,
                    None => continue 'pieces,
                }
            }
            return Ok(Some(cur));
        }
        Ok(None)
    }
}

/// Traces the rays of the requested angles together with every ray in their
/// forward orbits under `t -> m t`.
pub fn trace_rays(
    f: &RationalMap,
    basin: &SpherePoint,
    angles: &[RayAngle],
    opts: &RayOptions,
) -> Result<Vec<RayTrace>, RayError> {
    let b = Basin::new(f, basin)?;
    let m = b.m as u64;
    let mut all: Vec<RayAngle> = Vec::new();
    for t in angles {
        for s in t.orbit(m) {
            if !all.contains(&s) {
                all.push(s);
            }
        }
    }
    let index: BTreeMap<RayAngle, usize> = all.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let image: Vec<usize> = all.iter().map(|t| index[&t.times(m)]).collect();

    let steps = opts.shell_steps.max(1);
    let levels = steps * opts.depth;
    // paths[i][j + steps] is the point of R_{all[i]} at potential
    // r0^(m^(-j/steps)), j = -steps..=levels.
    let log_r0 = opts.r0.ln();
    let mf = b.m as f64;
    let mut paths: Vec<Vec<ComplexValue>> = all
        .iter()
        .map(|t| {
            (0..=steps)
                .map(|i| {
                    let j = i as f64 - steps as f64;
                    let rho = (log_r0 * mf.powf(-j / steps as f64)).exp();
                    ComplexValue::from_polar(rho, TAU * t.value()) / b.lambda
                })
                .collect()
        })
        .collect();

    for j in 1..=levels {
        let at = j + steps;
        for i in 0..all.len() {
            let img = &paths[image[i]];
            let (from, to) = (img[at - steps - 1], img[at - steps]);
            let start = paths[i][at - 1];
            let next = b.follow(start, from, to, opts.max_refine)?.ok_or(RayError::Ambiguous {
                angle: all[i],
                level: j,
            })?;
            paths[i].push(next);
        }
    }

    let window = opts.window.clamp(1, opts.depth + 1);
    Ok(angles
        .iter()
        .map(|t| {
            let path = &paths[index[t]];
            let samples: Vec<ComplexValue> = (0..=opts.depth)
                .map(|k| b.to_original(path[steps + steps * k]))
                .collect();
            let tail = &samples[samples.len() - window..];
            let mut residual: f64 = 0.0;
            for (i, a) in tail.iter().enumerate() {
                for c in &tail[i + 1..] {
                    residual = residual.max((a - c).norm());
                }
            }
            let landed = residual < opts.landing_tol;
            RayTrace {
                angle: *t,
                landing: landed.then(|| *samples.last().unwrap()),
                samples,
                landed,
                residual,
            }
        })
        .collect())
}

pub fn trace_ray(
    f: &RationalMap,
    basin: &SpherePoint,
    t: RayAngle,
    opts: &RayOptions,
) -> Result<RayTrace, RayError> {
    Ok(trace_rays(f, basin, &[t], opts)?.pop().unwrap())
}

/// Local degree of `f` at a fixed basin point.
pub fn basin_degree(f: &RationalMap, basin: &SpherePoint) -> Result<usize, RayError> {
    Ok(Basin::new(f, basin)?.m)
}

/// Largest chordal gap between `f(sample_{k+1}(R_t))` and `sample_k(R_{mt})`.
pub fn functoriality_residual(f: &RationalMap, ray: &RayTrace, image: &RayTrace) -> f64 {
    ray.samples
        .iter()
        .skip(1)
        .zip(&image.samples)
        .map(|(z, w)| f.eval(*z).chordal(&SpherePoint::finite(*w)))
        .fold(0.0, f64::max)
}

/// Chordal gap between two landed rays.
pub fn landing_gap(r1: &RayTrace, r2: &RayTrace) -> Result<f64, RayError> {
    let a = SpherePoint::finite(r1.landing_point()?);
    let b = SpherePoint::finite(r2.landing_point()?);
    Ok(a.chordal(&b))
}

pub fn coland(
    f: &RationalMap,
    basin: &SpherePoint,
    t1: RayAngle,
    t2: RayAngle,
    tol: f64,
    opts: &RayOptions,
) -> Result<bool, RayError> {
    let rays = trace_rays(f, basin, &[t1, t2], opts)?;
    Ok(landing_gap(&rays[0], &rays[1])? < tol)
}

/// Closed polyline `R_{t1} ∪ {x} ∪ R_{t2}` through the basin point. For a
/// basin at infinity the two outer ends are pushed radially to `radius`
/// and joined by a counterclockwise arc.
pub fn ray_loop(
    basin: &SpherePoint,
    r1: &RayTrace,
    r2: &RayTrace,
    radius: f64,
) -> Result<Vec<ComplexValue>, RayError> {
    let x = (r1.landing_point()? + r2.landing_point()?) / 2.0;
    let mut v: Vec<ComplexValue> = r1.samples.clone();
    v.push(x);
    v.extend(r2.samples.iter().rev());
    match basin.to_finite() {
        Some(c) => v.push(c),
        None => {
            let end2 = *r2.samples.first().unwrap();
            let end1 = *r1.samples.first().unwrap();
            let (a2, a1) = (end2.arg(), end1.arg());
            let sweep = (a1 - a2).rem_euclid(TAU);
            let n = 256;
            for k in 0..=n {
                v.push(ComplexValue::from_polar(radius, a2 + sweep * k as f64 / n as f64));
            }
        }
    }
    Ok(v)
}

/// True iff the closed curve through the common landing point of `t1` and
/// `t2` separates `a` from `b`.
pub fn separation_test(
    f: &RationalMap,
    basin: &SpherePoint,
    t1: RayAngle,
    t2: RayAngle,
    a: ComplexValue,
    b: ComplexValue,
    opts: &RayOptions,
) -> Result<bool, RayError> {
    let rays = trace_rays(f, basin, &[t1, t2], opts)?;
    let gap = landing_gap(&rays[0], &rays[1])?;
    if gap >= opts.landing_tol {
        return Err(RayError::NotColanding(t1, t2, gap));
    }
    let extent = rays
        .iter()
        .flat_map(|r| r.samples.iter())
        .chain([&a, &b])
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let curve = ray_loop(basin, &rays[0], &rays[1], 4.0 * extent + 1.0)?;
    for p in [a, b] {
        let tol = 1e-8 * (1.0 + p.norm());
        if polyline::distance_to(&curve, p) < tol {
            return Err(RayError::OnCurve(p, tol));
        }
    }
    Ok(polyline::odd_crossings(&curve, a) != polyline::odd_crossings(&curve, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::paper_g;
    use crate::numerics::{c64, Polynomial};

    fn angle(s: &str) -> RayAngle {
        s.parse().unwrap()
    }

    fn z_squared() -> RationalMap {
        RationalMap::polynomial(Polynomial::monomial(c64(1.0, 0.0), 2)).unwrap()
    }

    #[test]
    fn angle_arithmetic() {
        assert_eq!(angle("1/3").times(2), angle("2/3"));
        assert_eq!(angle("2/3").times(2), angle("1/3"));
        assert_eq!(angle("1/6").orbit(2), vec![angle("1/6"), angle("1/3"), angle("2/3")]);
        assert_eq!(angle("0"), RayAngle::new(0, 1).unwrap());
        assert_eq!(angle("1/6").conj(), angle("5/6"));
        for bad in ["0.5", "2/4", "3/3", "1/0", "-1/3", "x"] {
            assert!(bad.parse::<RayAngle>().is_err(), "{bad}");
        }
    }

    #[test]
    fn z_squared_zero_ray_lands_at_one() {
        let r = trace_ray(&z_squared(), &SpherePoint::INFINITY, angle("0"), &RayOptions::default()).unwrap();
        assert!(r.landed);
        assert!((r.landing.unwrap() - c64(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn z_squared_third_rays_are_distinct() {
        let opts = RayOptions::default();
        let z2 = z_squared();
        assert!(!coland(&z2, &SpherePoint::INFINITY, angle("1/3"), angle("2/3"), 1e-6, &opts).unwrap());
        let r = trace_ray(&z2, &SpherePoint::INFINITY, angle("1/3"), &opts).unwrap();
        let expect = ComplexValue::from_polar(1.0, TAU / 3.0);
        assert!((r.landing.unwrap() - expect).norm() < 1e-6);
    }

    #[test]
    fn g_zero_ray_lands_at_two() {
        let r = trace_ray(&paper_g(), &SpherePoint::INFINITY, angle("0"), &RayOptions::default()).unwrap();
        assert!((r.landing.unwrap() - c64(2.0, 0.0)).norm() < 1e-6, "{r:?}");
    }

    #[test]
    fn g_third_rays_coland_at_real_fixed_point() {
        let g = paper_g();
        let opts = RayOptions::default();
        let rays = trace_rays(&g, &SpherePoint::INFINITY, &[angle("1/3"), angle("2/3")], &opts).unwrap();
        let p = rays[0].landing.unwrap();
        // Root of 2z^2 + z - 2 between -2 and 0.
        let expect = (-1.0 - 17f64.sqrt()) / 4.0;
        assert!((p - c64(expect, 0.0)).norm() < 1e-6, "{p}");
        assert!(landing_gap(&rays[0], &rays[1]).unwrap() < 1e-6);
        assert!(functoriality_residual(&g, &rays[0], &rays[1]) < 1e-6);
        assert!(functoriality_residual(&g, &rays[1], &rays[0]) < 1e-6);
    }

    #[test]
    fn g_sixth_rays_are_distinct() {
        let opts = RayOptions::default();
        assert!(!coland(&paper_g(), &SpherePoint::INFINITY, angle("1/6"), angle("5/6"), 1e-6, &opts).unwrap());
    }

    #[test]
    fn separation() {
        let g = paper_g();
        let opts = RayOptions::default();
        let inf = SpherePoint::INFINITY;
        let (t1, t2) = (angle("1/3"), angle("2/3"));
        assert!(separation_test(&g, &inf, t1, t2, c64(0.0, 0.0), c64(-2.0, 0.0), &opts).unwrap());
        assert!(!separation_test(&g, &inf, t1, t2, c64(0.0, 0.0), c64(0.1, 0.0), &opts).unwrap());
        let rays = trace_rays(&g, &inf, &[t1], &opts).unwrap();
        let on = rays[0].samples[3];
        assert!(matches!(
            separation_test(&g, &inf, t1, t2, on, c64(0.0, 0.0), &opts),
            Err(RayError::OnCurve(..))
        ));
    }

    #[test]
    fn finite_basin_point() {
        // z^2 conjugated by 1/z has its superattracting fixed point at 0.
        let h = z_squared().conjugate(&MoebiusTransform::inversion());
        let r = trace_ray(&h, &SpherePoint::real(0.0), angle("0"), &RayOptions::default()).unwrap();
        assert!((r.landing.unwrap() - c64(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn rejects_non_superattracting_basin() {
        let g = paper_g();
        assert!(matches!(
            trace_ray(&g, &SpherePoint::real(1.0), angle("0"), &RayOptions::default()),
            Err(RayError::NotFixed(_))
        ));
        assert!(matches!(
            trace_ray(&g, &SpherePoint::real(2.0), angle("0"), &RayOptions::default()),
            Err(RayError::NotSuperattracting(_))
        ));
    }
}
