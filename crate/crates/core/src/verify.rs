//! Numerical checks of the explicit claims about the pseudo-basilica maps,
//! grouped so that subsets can be run on their own.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::basins::{classify_grid, component_of, label_components, Bounds, DEFAULT_MAX_ITER, DEFAULT_TRAP_RADIUS};
use crate::catalog;
use crate::lifting::{lift_curve, sign_change_sequence, OrientedPolyCurve, SequenceOptions, DEFAULT_EPS};
use crate::numerics::{c64, ComplexValue, SpherePoint};
use crate::orbits::{critical_portrait, periodic_points, CriticalPortrait};
use crate::rays::{functoriality_residual, separation_test, trace_rays, RayAngle, RayOptions};
use crate::ratmap::RationalMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Catalog,
    Portrait,
    Periodic,
    Rays,
    Lifting,
    Basins,
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::Catalog,
        Group::Portrait,
        Group::Periodic,
        Group::Rays,
        Group::Lifting,
        Group::Basins,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Catalog => "catalog",
            Group::Portrait => "portrait",
            Group::Periodic => "periodic",
            Group::Rays => "rays",
            Group::Lifting => "lifting",
            Group::Basins => "basins",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown check group {s:?} (expected one of catalog, portrait, periodic, rays, lifting, basins)"))
    }
}

/// The displayed maps under test. Dynamics checks run on `f3`.
#[derive(Clone, Debug)]
pub struct PaperMaps {
    pub f3: RationalMap,
    pub degree4: RationalMap,
}

impl Default for PaperMaps {
    fn default() -> Self {
        PaperMaps {
            f3: catalog::displayed_degree3(),
            degree4: catalog::displayed_degree4(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub group: Group,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub tolerance: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} (tolerance {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.group,
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

type Outcome = Result<(bool, String), String>;

struct Checks {
    out: Vec<Check>,
    group: Group,
}

impl Checks {
    fn run(&mut self, name: &str, tolerance: &str, f: impl FnOnce() -> Outcome) {
        let (passed, measured) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        self.out.push(Check {
            group: self.group,
            name: name.to_string(),
            passed,
            measured,
            tolerance: tolerance.to_string(),
        });
    }
}

/// Euclidean gap between finite points; 0 for two infinities.
pub fn point_gap(a: &SpherePoint, b: &SpherePoint) -> f64 {
    match (a.to_finite(), b.to_finite()) {
        (Some(x), Some(y)) => (x - y).norm(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Largest gap in a best matching of `found` against `expected` (greedy by
/// nearest); infinite when the sizes differ.
fn set_gap(found: &[SpherePoint], expected: &[SpherePoint]) -> f64 {
    if found.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; found.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let best = (0..found.len())
            .filter(|&i| !used[i])
            .min_by(|&i, &j| point_gap(&found[i], e).total_cmp(&point_gap(&found[j], e)));
        match best {
            Some(i) => {
                used[i] = true;
                worst = worst.max(point_gap(&found[i], e));
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn probes() -> Vec<ComplexValue> {
    // Fixed pseudo-random probe points in [-2, 2]^2.
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    (0..20)
        .map(|_| {
            let mut next = || {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
            };
            c64(next(), next())
        })
        .collect()
}

/// Critical points `{0: d, 1: d-1 (if critical), ∞: 2}` and the orbit
/// `1 -> 0 -> 1-d -> 0`; returns the largest location or orbit gap.
pub fn family_structure_gap(f: &RationalMap, d: usize) -> Result<f64, String> {
    let crit = f.critical_points().map_err(err)?;
    let mut expected = vec![(SpherePoint::real(0.0), d), (SpherePoint::INFINITY, 2)];
    if d > 2 {
        expected.push((SpherePoint::real(1.0), d - 1));
    }
    if crit.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for (p, deg) in &expected {
        let gap = crit
            .iter()
            .filter(|c| c.local_degree == *deg)
            .map(|c| point_gap(&c.location, p))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(gap);
    }
    let one_minus_d = SpherePoint::real(1.0 - d as f64);
    let zero = SpherePoint::real(0.0);
    for (from, to) in [(SpherePoint::real(1.0), zero), (zero, one_minus_d), (one_minus_d, zero)] {
        worst = worst.max(point_gap(&f.eval_sphere(&from), &to));
    }
    Ok(worst)
}

fn catalog_checks(c: &mut Checks, maps: &PaperMaps) {
    let probes = probes();
    c.run("f3-identity", "1e-9", || {
        let e = catalog::pseudo_basilica(3).map_err(err)?.max_cross_error(&maps.f3, &probes);
        Ok((e < 1e-9, format!("relative cross error {e:.3e}")))
    });
    c.run("degree4-identity", "1e-9", || {
        let e = catalog::pseudo_basilica(4).map_err(err)?.max_cross_error(&maps.degree4, &probes);
        Ok((e < 1e-9, format!("relative cross error {e:.3e}")))
    });
    c.run("family-structure-d2..6", "1e-9", || {
        let mut worst: f64 = 0.0;
        for d in 2..=6 {
            let f = catalog::pseudo_basilica(d).map_err(err)?;
            if f.degree() != d {
                return Ok((false, format!("degree {} for d = {d}", f.degree())));
            }
            worst = worst.max(family_structure_gap(&f, d)?);
        }
        Ok((worst < 1e-9, format!("max gap {worst:.3e}")))
    });
    c.run("family-critically-finite-d3..6", "flags", || {
        for d in 3..=6 {
            let p = critical_portrait(&catalog::pseudo_basilica(d).map_err(err)?).map_err(err)?;
            if !(p.is_critically_finite.is_true() && p.is_hyperbolic.is_true() && p.all_postcritical_periodic.is_true()) {
                return Ok((false, format!("d = {d}: flags not all true")));
            }
        }
        Ok((true, "critically finite, hyperbolic, postcritically periodic".into()))
    });
    c.run("pseudo-rabbit-root", "1e-3", || {
        let target = c64(1.34781, 1.02885);
        let roots = catalog::pseudo_rabbit_roots(3).map_err(err)?;
        let gap = roots.iter().map(|r| (r - target).norm()).fold(f64::INFINITY, f64::min);
        Ok((gap < 1e-3, format!("nearest root at distance {gap:.3e} among {} roots", roots.len())))
    });
    c.run("pinch-solver", "1e-9", || {
        let sol = catalog::solve_pinch_params().map_err(err)?;
        let ratio = sol.denominator.coeff(1) / sol.denominator.coeff(0);
        let shape = (ratio - c64(-1.5, 0.0)).norm();
        let res = catalog::pinch_residuals(&sol.map);
        let worst = res.iter().fold(shape, |a, b| a.max(*b));
        Ok((
            worst < 1e-9,
            format!("a = {}, b = {}, residuals {:.1e} {:.1e} {:.1e}", sol.a, sol.b, res[0], res[1], res[2]),
        ))
    });
}

fn portrait_checks(c: &mut Checks, g: &RationalMap) {
    let portrait: Result<CriticalPortrait, String> = critical_portrait(g).map_err(err);
    c.run("critical-points", "1e-9", || {
        let p = portrait.clone()?;
        let mut worst: f64 = 0.0;
        let expected = [(SpherePoint::real(0.0), 3), (SpherePoint::real(1.0), 2), (SpherePoint::INFINITY, 2)];
        if p.critical_points.len() != 3 {
            return Ok((false, format!("{} critical points", p.critical_points.len())));
        }
        for (loc, deg) in expected {
            let gap = p
                .critical_points
                .iter()
                .filter(|cp| cp.local_degree == deg)
                .map(|cp| point_gap(&cp.location, &loc))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(gap);
        }
        Ok((worst < 1e-9, format!("max location gap {worst:.3e}")))
    });
    c.run("critical-orbit-1-0-minus2", "1e-9", || {
        let worst = family_structure_gap(g, 3)?;
        Ok((worst < 1e-9, format!("max gap {worst:.3e}")))
    });
    c.run("postcritical-set", "1e-9", || {
        let p = portrait.clone()?;
        let set = p.postcritical_set.ok_or("postcritical set not finite")?;
        let gap = set_gap(&set, &[SpherePoint::INFINITY, SpherePoint::real(0.0), SpherePoint::real(-2.0)]);
        Ok((gap < 1e-9, format!("{} points, max gap {gap:.3e}", set.len())))
    });
    c.run("portrait-flags", "all true", || {
        let p = portrait.clone()?;
        let ok = p.is_critically_finite.is_true() && p.is_hyperbolic.is_true() && p.all_postcritical_periodic.is_true();
        Ok((
            ok,
            format!(
                "critically_finite={:?} hyperbolic={:?} all_postcritical_periodic={:?}",
                p.is_critically_finite, p.is_hyperbolic, p.all_postcritical_periodic
            ),
        ))
    });
}

fn periodic_checks(c: &mut Checks, g: &RationalMap) {
    c.run("period-2-points", "count 10, |Im| 1e-8, {0,-2,2} 1e-9", || {
        let pts = periodic_points(g, 2).map_err(err)?;
        let total: usize = pts.iter().map(|p| p.multiplicity).sum();
        let at_inf: usize = pts.iter().filter(|p| p.point.is_infinity()).map(|p| p.multiplicity).sum();
        let max_im = pts
            .iter()
            .filter_map(|p| p.point.to_finite())
            .map(|z| z.im.abs())
            .fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for x in [0.0, -2.0, 2.0] {
            let gap = pts
                .iter()
                .map(|p| point_gap(&p.point, &SpherePoint::real(x)))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(gap);
        }
        let ok = total == 10 && at_inf == 1 && max_im < 1e-8 && worst < 1e-9;
        Ok((ok, format!("{total} points ({at_inf} at infinity), max |Im| {max_im:.1e}, landmark gap {worst:.1e}")))
    });
    c.run("periodic-counts", "d^p + 1 (d^p <= 81), return 1e-6", || {
        let mut maps: Vec<(String, RationalMap)> = (2..=6)
            .map(|d| Ok((format!("pseudo-basilica:{d}"), catalog::pseudo_basilica(d).map_err(err)?)))
            .collect::<Result<_, String>>()?;
        maps.push(("paper-degree4".into(), catalog::displayed_degree4()));
        let mut checked = 0;
        for (name, f) in &maps {
            let d = f.degree();
            let mut p = 1;
            while d.pow(p as u32) <= 81 {
                let pts = periodic_points(f, p).map_err(err)?;
                let total: usize = pts.iter().map(|q| q.multiplicity).sum();
                if total != d.pow(p as u32) + 1 {
                    return Ok((false, format!("{name} period {p}: {total} points")));
                }
                let back = pts
                    .iter()
                    .map(|q| f.iterate(&q.point, p).chordal(&q.point))
                    .fold(0.0, f64::max);
                if back > 1e-6 {
                    return Ok((false, format!("{name} period {p}: a point returns with chordal error {back:.1e}")));
                }
                checked += 1;
                p += 1;
            }
        }
        Ok((true, format!("{checked} (map, period) pairs")))
    });
}

fn ray_checks(c: &mut Checks, g: &RationalMap) {
    let opts = RayOptions::default();
    let angles: Vec<RayAngle> = ["0", "1/3", "2/3", "1/6", "5/6"]
        .iter()
        .map(|s| s.parse().expect("literal angles"))
        .collect();
    let rays = trace_rays(g, &SpherePoint::INFINITY, &angles, &opts).map_err(err);
    let landing = |i: usize| -> Result<ComplexValue, String> { rays.as_ref().map_err(Clone::clone)?[i].landing_point().map_err(err) };
    c.run("r0-lands-at-2", "1e-6", || {
        let gap = (landing(0)? - c64(2.0, 0.0)).norm();
        Ok((gap < 1e-6, format!("|landing - 2| = {gap:.3e}")))
    });
    c.run("r1/3-r2/3-coland-at-fixed-point", "1e-6", || {
        let (a, b) = (landing(1)?, landing(2)?);
        let gap = (a - b).norm();
        let fixed = periodic_points(g, 1).map_err(err)?;
        let to_fixed = fixed
            .iter()
            .map(|p| point_gap(&p.point, &SpherePoint::finite(a)))
            .fold(f64::INFINITY, f64::min);
        Ok((gap < 1e-6 && to_fixed < 1e-6, format!("gap {gap:.3e}, distance to fixed point {to_fixed:.3e}, p = {a}")))
    });
    c.run("r1/6-r5/6-distinct", "> 1e-2", || {
        let gap = (landing(3)? - landing(4)?).norm();
        Ok((gap > 1e-2, format!("gap {gap:.3e}")))
    });
    c.run("three-preimages-of-p", "pairwise > 1e-3, images 1e-6", || {
        let pts = [landing(1)?, landing(3)?, landing(4)?];
        let p = pts[0];
        let mut sep = f64::INFINITY;
        for i in 0..3 {
            for j in i + 1..3 {
                sep = sep.min((pts[i] - pts[j]).norm());
            }
        }
        let img = pts
            .iter()
            .map(|z| point_gap(&g.eval(*z), &SpherePoint::finite(p)))
            .fold(0.0, f64::max);
        Ok((sep > 1e-3 && img < 1e-6, format!("min separation {sep:.3e}, max |g(x) - p| {img:.3e}")))
    });
    c.run("separation-0-vs-minus2", "crossing parity", || {
        let sep = separation_test(g, &SpherePoint::INFINITY, angles[1], angles[2], c64(0.0, 0.0), c64(-2.0, 0.0), &opts)
            .map_err(err)?;
        Ok((sep, format!("separates = {sep}")))
    });
    c.run("functoriality", "1e-6", || {
        let rays = rays.clone()?;
        let mut worst: f64 = 0.0;
        for r in &rays {
            let image = rays
                .iter()
                .find(|s| s.angle == r.angle.times(2))
                .ok_or("image ray missing")?;
            worst = worst.max(functoriality_residual(g, r, image));
        }
        Ok((worst < 1e-6, format!("max residual {worst:.3e}")))
    });
    c.run("conjugation-symmetry", "1e-6", || {
        let gap = (landing(3)? - landing(4)?.conj()).norm().max((landing(1)? - landing(2)?.conj()).norm());
        Ok((gap < 1e-6, format!("max gap {gap:.3e}")))
    });
}

fn lifting_checks(c: &mut Checks, g: &RationalMap) {
    let far = c64(1e6, 0.0);
    let circle = |x: f64| OrientedPolyCurve::circle(c64(x, 0.0), 0.1, 256, true).map_err(err);
    c.run("lift-around-minus2", "one lift, degree 3, encloses 0", || {
        let set = lift_curve(g, &circle(-2.0)?, far, DEFAULT_EPS).map_err(err)?;
        let ok = set.lifts.len() == 1 && set.lifts[0].degree == 3 && set.lifts[0].curve.winding(c64(0.0, 0.0)) != 0;
        let degrees: Vec<usize> = set.lifts.iter().map(|l| l.degree).collect();
        Ok((ok, format!("degrees {degrees:?}")))
    });
    c.run("lifts-around-0", "degrees {1, 2} enclosing -2 and 1", || {
        let set = lift_curve(g, &circle(0.0)?, far, DEFAULT_EPS).map_err(err)?;
        let mut found: Vec<(usize, bool, bool)> = set
            .lifts
            .iter()
            .map(|l| (l.degree, l.curve.winding(c64(-2.0, 0.0)) != 0, l.curve.winding(c64(1.0, 0.0)) != 0))
            .collect();
        found.sort();
        Ok((found == vec![(1, true, false), (2, false, true)], format!("(degree, encloses -2, encloses 1) = {found:?}")))
    });
    c.run("no-sign-changes-fixed-basin", "0 changes in 3 steps", || {
        let s = sign_change_sequence(g, &circle(-2.0)?, far, 3, &SequenceOptions::default()).map_err(err)?;
        Ok((s.changes.is_empty(), format!("signs {:?}", s.steps.iter().map(|t| t.sign).collect::<Vec<_>>())))
    });
    c.run("negative-lift-moving-basin", "step 1 sign -1", || {
        let s = sign_change_sequence(g, &circle(-2.0)?, c64(0.0, 0.0), 1, &SequenceOptions::default()).map_err(err)?;
        Ok((s.steps[1].sign == -1, format!("signs {:?}", s.steps.iter().map(|t| t.sign).collect::<Vec<_>>())))
    });
}

/// Basin checks on a `n x n` grid over `[-3, 3]^2`, sampling every
/// `stride`-th resolved cell for coherence.
fn basin_checks(c: &mut Checks, g: &RationalMap, n: usize) {
    let grid = critical_portrait(g).map_err(err).and_then(|p| {
        classify_grid(g, &p, Bounds::square(3.0), (n, n), DEFAULT_TRAP_RADIUS, DEFAULT_MAX_ITER).map_err(err)
    });
    c.run("components-0-and-minus2-distinct", "distinct labels", || {
        let grid = grid.as_ref().map_err(Clone::clone)?;
        let lab = label_components(grid);
        let a = component_of(&lab, c64(0.0, 0.0)).map_err(err)?;
        let b = component_of(&lab, c64(-2.0, 0.0)).map_err(err)?;
        Ok((a != b, format!("labels {a} and {b} of {}", lab.components.len())))
    });
    c.run("phase-coherence", ">= 95%", || {
        let grid = grid.as_ref().map_err(Clone::clone)?;
        let resolved: Vec<usize> = (0..grid.cells.len()).filter(|&i| grid.cells[i].is_resolved()).collect();
        let stride = (resolved.len() / 2000).max(1);
        let (mut good, mut total) = (0usize, 0usize);
        for &i in resolved.iter().step_by(stride) {
            let cell = grid.cells[i];
            let z = grid.center(i % grid.width, i / grid.width);
            let image = grid.classifier.classify(g, &g.eval(z));
            let period = grid.classifier.period(cell.cycle.unwrap()) as u32;
            total += 1;
            if image.cycle == cell.cycle && image.phase == (cell.phase + 1) % period {
                good += 1;
            }
        }
        let frac = good as f64 / total.max(1) as f64;
        Ok((frac >= 0.95, format!("{good}/{total} = {:.4}", frac)))
    });
    c.run("infinity-basin-invariant", "200 of 200", || {
        let grid = grid.as_ref().map_err(Clone::clone)?;
        let inf = grid
            .classifier
            .cycles
            .iter()
            .position(|cy| cy.len() == 1 && cy[0].is_infinity())
            .ok_or("no cycle at infinity")? as u32;
        let cells: Vec<usize> = (0..grid.cells.len()).filter(|&i| grid.cells[i].cycle == Some(inf)).collect();
        let stride = (cells.len() / 200).max(1);
        let sample: Vec<usize> = cells.iter().step_by(stride).take(200).copied().collect();
        let good = sample
            .iter()
            .filter(|&&i| {
                let z = grid.center(i % grid.width, i / grid.width);
                grid.classifier.classify(g, &g.eval(z)).cycle == Some(inf)
            })
            .count();
        Ok((good == sample.len() && sample.len() == 200, format!("{good}/{}", sample.len())))
    });
}

/// Runs the selected groups (all when `only` is empty) in a fixed order.
pub fn run(maps: &PaperMaps, only: &[Group]) -> Vec<Check> {
    let mut out = Vec::new();
    for group in Group::ALL {
        if !only.is_empty() && !only.contains(&group) {
            continue;
        }
        let mut c = Checks { out: Vec::new(), group };
        let g = &maps.f3;
        match group {
            Group::Catalog => catalog_checks(&mut c, maps),
            Group::Portrait => portrait_checks(&mut c, g),
            Group::Periodic => periodic_checks(&mut c, g),
            Group::Rays => ray_checks(&mut c, g),
            Group::Lifting => lifting_checks(&mut c, g),
            Group::Basins => basin_checks(&mut c, g, 400),
        }
        out.extend(c.out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Polynomial;

    #[test]
    fn catalog_group_passes() {
        let checks = run(&PaperMaps::default(), &[Group::Catalog]);
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
        assert!(checks.iter().all(|c| c.group == Group::Catalog));
    }

    #[test]
    fn tampered_denominator_fails_identity() {
        let maps = PaperMaps {
            f3: RationalMap::normalize(
                Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]),
                Polynomial::from_real(&[1.0, 1.5]),
            )
            .unwrap(),
            ..PaperMaps::default()
        };
        let checks = run(&maps, &[Group::Catalog]);
        let id = checks.iter().find(|c| c.name == "f3-identity").unwrap();
        assert!(!id.passed);
    }

    #[test]
    fn group_names_parse() {
        for g in Group::ALL {
            assert_eq!(g.name().parse::<Group>(), Ok(g));
        }
        assert!("ray".parse::<Group>().is_err());
    }
}
