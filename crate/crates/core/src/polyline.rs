//! Integer-valued plane geometry on closed polylines: winding numbers by
//! signed crossings, even-odd parity, and the distance and intersection
//! predicates used to reject degenerate queries.

use crate::numerics::ComplexValue;

fn cross(a: ComplexValue, b: ComplexValue) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Closed-loop edges `(v[i], v[i+1 mod n])`.
pub fn edges(v: &[ComplexValue]) -> impl Iterator<Item = (ComplexValue, ComplexValue)> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

/// Winding number of the closed polyline around `p`, counting signed
/// crossings of the rightward horizontal ray from `p`.
pub fn winding_number(v: &[ComplexValue], p: ComplexValue) -> i64 {
    let mut w = 0;
    for (a, b) in edges(v) {
        if a.im <= p.im {
            if b.im > p.im && cross(b - a, p - a) > 0.0 {
                w += 1;
            }
        } else if b.im <= p.im && cross(b - a, p - a) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Even-odd crossing parity: true when `p` is enclosed an odd number of times.
pub fn odd_crossings(v: &[ComplexValue], p: ComplexValue) -> bool {
    winding_number(v, p).rem_euclid(2) == 1
}

/// Twice the signed area; positive for counterclockwise loops.
pub fn signed_area2(v: &[ComplexValue]) -> f64 {
    edges(v).map(|(a, b)| cross(a, b)).sum()
}

pub fn segment_distance(p: ComplexValue, a: ComplexValue, b: ComplexValue) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Distance from `p` to the closed polyline.
pub fn distance_to(v: &[ComplexValue], p: ComplexValue) -> f64 {
    edges(v).map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
}

/// Proper or touching intersection of two closed segments.
pub fn segments_intersect(a: ComplexValue, b: ComplexValue, c: ComplexValue, d: ComplexValue) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: ComplexValue, q: ComplexValue, r: ComplexValue, d: f64| {
        d == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// True when no two non-adjacent edges of the closed polyline meet.
///
/// Edges are bucketed on a uniform grid so long lifted curves stay cheap.
pub fn is_simple(v: &[ComplexValue]) -> bool {
    let n = v.len();
    if n < 3 {
        return false;
    }
    let (mut lo, mut hi) = (v[0], v[0]);
    for z in v {
        lo = ComplexValue::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = ComplexValue::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let cells = (n as f64).sqrt().ceil().max(1.0) as usize;
    let span = ComplexValue::new((hi.re - lo.re).max(1e-300), (hi.im - lo.im).max(1e-300));
    let index = |z: ComplexValue| {
        let i = (((z.re - lo.re) / span.re) * cells as f64).floor().clamp(0.0, (cells - 1) as f64) as usize;
        let j = (((z.im - lo.im) / span.im) * cells as f64).floor().clamp(0.0, (cells - 1) as f64) as usize;
        (i, j)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for e in 0..n {
        let (a, b) = (v[e], v[(e + 1) % n]);
        let (i0, j0) = index(a);
        let (i1, j1) = index(b);
        for i in i0.min(i1)..=i0.max(i1) {
            for j in j0.min(j1)..=j0.max(j1) {
                buckets[i * cells + j].push(e);
            }
        }
    }
    for bucket in &buckets {
        for (k, &e) in bucket.iter().enumerate() {
            for &f in &bucket[k + 1..] {
                let gap = (e as isize - f as isize).unsigned_abs();
                if gap <= 1 || gap == n - 1 {
                    continue;
                }
                if segments_intersect(v[e], v[(e + 1) % n], v[f], v[(f + 1) % n]) {
                    return false;
                }
            }
        }
    }
    true
}
