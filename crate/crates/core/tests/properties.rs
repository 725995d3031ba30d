use fatou_core::lifting::{permutation_cycles, OrientedPolyCurve};
use fatou_core::numerics::{c64, MoebiusTransform};
use fatou_core::polyline;
use fatou_core::ratmap::MapJson;
use fatou_core::rays::RayAngle;
use fatou_core::{ComplexValue, Polynomial, RationalMap, SpherePoint};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = ComplexValue> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c64(re, im))
}

fn poly(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(complex(), 1..=max_degree + 1).prop_map(Polynomial::new)
}

/// Random maps of degree 2..=5; pairs that cancel are discarded.
fn map() -> impl Strategy<Value = RationalMap> {
    (poly(5), poly(5)).prop_filter_map("degree at least 2", |(n, d)| {
        RationalMap::normalize(n, d).ok().filter(|f| f.degree() >= 2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn riemann_hurwitz(f in map()) {
        let crit = f.critical_points().unwrap();
        let total: usize = crit.iter().map(|c| c.local_degree - 1).sum();
        prop_assert_eq!(total, 2 * f.degree() - 2);
    }

    #[test]
    fn conjugation_moves_critical_points(f in map(), c in complex()) {
        let m = MoebiusTransform::send_to_infinity(c);
        let h = f.conjugate(&m);
        prop_assert_eq!(h.degree(), f.degree());
        let moved: Vec<SpherePoint> = f.critical_points().unwrap().iter().map(|p| m.apply(&p.location)).collect();
        for p in h.critical_points().unwrap() {
            let gap = moved.iter().map(|q| q.chordal(&p.location)).fold(f64::INFINITY, f64::min);
            prop_assert!(gap < 1e-5, "gap {}", gap);
        }
    }

    #[test]
    fn map_json_round_trip(f in map()) {
        let text = serde_json::to_string(&MapJson::from(f.clone())).unwrap();
        let back = RationalMap::try_from(serde_json::from_str::<MapJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn fiber_has_degree_points(f in map(), v in complex()) {
        let fiber = f.fiber(v * 3.0).unwrap();
        prop_assert_eq!(fiber.len(), f.degree());
        for z in fiber {
            prop_assert!(f.eval(z).chordal(&SpherePoint::finite(v * 3.0)) < 1e-6);
        }
    }

    #[test]
    fn angle_doubling_is_periodic_eventually((num, den) in (1u64..1000).prop_flat_map(|den| (0..den, Just(den)))) {
        let g = gcd(num, den);
        let t = RayAngle::new(num / g, den / g).unwrap();
        let orbit = t.orbit(2);
        prop_assert!(orbit.contains(&orbit.last().unwrap().times(2)));
        let shown = t.to_string();
        prop_assert_eq!(shown.parse::<RayAngle>().unwrap(), t);
        prop_assert_eq!(t.conj().conj(), t);
    }

    #[test]
    fn circle_winding(cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.01..3.0f64, px in -5.0..5.0f64, py in -5.0..5.0f64, ccw: bool) {
        let c = c64(cx, cy);
        let p = c64(px, py);
        let dist = (p - c).norm();
        prop_assume!((dist - r).abs() > 0.05 * r);
        let curve = OrientedPolyCurve::circle(c, r, 400, ccw).unwrap();
        let expected = if dist < r { if ccw { 1 } else { -1 } } else { 0 };
        prop_assert_eq!(curve.winding(p), expected);
        prop_assert_eq!(polyline::odd_crossings(curve.vertices(), p), expected != 0);
    }

    #[test]
    fn cycles_partition_a_permutation(perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let cycles = permutation_cycles(&perm);
        let mut seen: Vec<usize> = cycles.iter().flatten().copied().collect();
        seen.sort();
        prop_assert_eq!(seen, (0..12).collect::<Vec<_>>());
        for cy in &cycles {
            for (k, &i) in cy.iter().enumerate() {
                prop_assert_eq!(perm[i], cy[(k + 1) % cy.len()]);
            }
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
