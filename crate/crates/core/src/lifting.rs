//! Lifts of oriented Jordan curves through a rational map.
//!
//! Fibers over the vertices of a curve are continued edge by edge; the
//! strand permutation after one traversal is the monodromy, and each of its
//! cycles is one lift whose covering degree is the cycle length. Signs and
//! nesting are integer winding numbers relative to a base point `ω` standing
//! in for the reference Fatou component.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{ComplexValue, SpherePoint};
use crate::polyline;
use crate::ratmap::{MapError, RationalMap};

pub const DEFAULT_EPS: f64 = 1e-3;
pub const MAX_SUBDIVISION: u32 = 10;
pub const DEFAULT_SEQUENCE_STEPS: usize = 8;
pub const DEFAULT_VERTEX_CAP: usize = 1024;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LiftError {
    #[error("a closed curve needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices {0} and {1} coincide")]
    ZeroSpacing(usize, usize),
    #[error("vertex {vertex} lies within {distance:e} of the critical value {value:?}")]
    NearCriticalValue {
        vertex: usize,
        value: SpherePoint,
        distance: f64,
    },
    #[error("strand matching stayed ambiguous on edge {0} after subdivision")]
    Ambiguous(usize),
    #[error("vertex {0} has a preimage at infinity")]
    InfinitePreimage(usize),
    #[error("base point {0} lies on a curve")]
    OnCurve(ComplexValue),
    #[error("winding number {0} is impossible for a Jordan curve")]
    Malformed(i64),
    #[error("no lifts to choose from")]
    NoLift,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Closed polyline; the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedPolyCurve {
    vertices: Vec<ComplexValue>,
}

impl OrientedPolyCurve {
    pub fn new(vertices: Vec<ComplexValue>) -> Result<Self, LiftError> {
        let n = vertices.len();
        if n < 3 {
            return Err(LiftError::TooFewVertices(n));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(LiftError::ZeroSpacing(i, (i + 1) % n));
            }
        }
        Ok(OrientedPolyCurve { vertices })
    }

    /// Circle with `n` vertices starting at angle 0.
    pub fn circle(center: ComplexValue, radius: f64, n: usize, ccw: bool) -> Result<Self, LiftError> {
        let s = if ccw { 1.0 } else { -1.0 };
        Self::new(
            (0..n)
                .map(|k| {
                    center
                        + ComplexValue::from_polar(radius, s * std::f64::consts::TAU * k as f64 / n as f64)
                })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[ComplexValue] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn winding(&self, p: ComplexValue) -> i64 {
        polyline::winding_number(&self.vertices, p)
    }

    pub fn is_ccw(&self) -> bool {
        polyline::signed_area2(&self.vertices) > 0.0
    }

    pub fn is_simple(&self) -> bool {
        polyline::is_simple(&self.vertices)
    }

    pub fn distance_to(&self, p: ComplexValue) -> f64 {
        polyline::distance_to(&self.vertices, p)
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        OrientedPolyCurve { vertices: v }
    }

    /// Keeps every k-th vertex so that at most `cap` remain.
    pub fn decimate(&self, cap: usize) -> Self {
        let n = self.vertices.len();
        if n <= cap.max(3) {
            return self.clone();
        }
        let k = n.div_ceil(cap.max(3));
        OrientedPolyCurve {
            vertices: self.vertices.iter().step_by(k).copied().collect(),
        }
    }
}

impl Serialize for OrientedPolyCurve {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.vertices.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrientedPolyCurve {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        OrientedPolyCurve::new(pairs.iter().map(|p| ComplexValue::new(p[0], p[1])).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// `+1` when `ω` lies to the right of `γ` (outside), `-1` when to the left.
///
/// In the plane the left side of a counterclockwise curve is the bounded
/// region (winding 1) and of a clockwise curve the unbounded one (winding 0).
pub fn sign_of(gamma: &OrientedPolyCurve, omega: ComplexValue) -> Result<i8, LiftError> {
    let tol = 1e-12 * (1.0 + omega.norm());
    if gamma.distance_to(omega) <= tol {
        return Err(LiftError::OnCurve(omega));
    }
    let w = gamma.winding(omega);
    let ccw = gamma.is_ccw();
    match (ccw, w) {
        (true, 1) | (false, 0) => Ok(-1),
        (true, 0) | (false, -1) => Ok(1),
        _ => Err(LiftError::Malformed(w)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lift {
    pub curve: OrientedPolyCurve,
    pub degree: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftSet {
    pub base: OrientedPolyCurve,
    pub lifts: Vec<Lift>,
    /// Strand `s` at the first vertex ends at strand `monodromy[s]`.
    pub monodromy: Vec<usize>,
}

impl LiftSet {
    pub fn degree_sum(&self) -> usize {
        self.lifts.iter().map(|l| l.degree).sum()
    }
}

/// Fibers continued along a closed vertex loop. `positions[k][s]` is strand
/// `s` over `points[k]`; the loop may be refined between input vertices.
struct Continuation {
    points: Vec<ComplexValue>,
    positions: Vec<Vec<ComplexValue>>,
    perm: Vec<usize>,
}

fn full_fiber(f: &RationalMap, v: ComplexValue, vertex: usize) -> Result<Vec<ComplexValue>, LiftError> {
    let fib = f.fiber(v)?;
    if fib.len() < f.degree() {
        return Err(LiftError::InfinitePreimage(vertex));
    }
    Ok(fib)
}

/// Index into `fib` for each strand, when nearest neighbours are
/// unambiguous (nearest at most half the second nearest) and bijective.
fn match_strands(cur: &[ComplexValue], fib: &[ComplexValue]) -> Option<Vec<usize>> {
    let mut taken = vec![false; fib.len()];
    let mut out = Vec::with_capacity(cur.len());
    for &z in cur {
        let (mut best, mut d1, mut d2) = (usize::MAX, f64::INFINITY, f64::INFINITY);
        for (j, w) in fib.iter().enumerate() {
            let d = (w - z).norm();
            if d < d1 {
                d2 = d1;
                d1 = d;
                best = j;
            } else if d < d2 {
                d2 = d;
            }
        }
        if best == usize::MAX || (fib.len() > 1 && !(d1 <= 0.5 * d2)) || taken[best] {
            return None;
        }
        taken[best] = true;
        out.push(best);
    }
    Some(out)
}

/// Carries strand positions `cur` over `a` to `b`, returning the
/// intermediate base points with positions, ending at `b`. The final
/// positions are exactly elements of `fib_b`.
#[allow(clippy::type_complexity)]
fn advance(
    f: &RationalMap,
    a: ComplexValue,
    b: ComplexValue,
    cur: &[ComplexValue],
    fib_b: &[ComplexValue],
    depth: u32,
    edge: usize,
) -> Result<Vec<(ComplexValue, Vec<ComplexValue>)>, LiftError> {
    if let Some(idx) = match_strands(cur, fib_b) {
        return Ok(vec![(b, idx.iter().map(|&j| fib_b[j]).collect())]);
    }
    if depth == 0 {
        return Err(LiftError::Ambiguous(edge));
    }
    let mid = (a + b) / 2.0;
    let fib_mid = full_fiber(f, mid, edge)?;
    let mut first = advance(f, a, mid, cur, &fib_mid, depth - 1, edge)?;
    let here = first.last().unwrap().1.clone();
    first.extend(advance(f, mid, b, &here, fib_b, depth - 1, edge)?);
    Ok(first)
}

fn continue_fibers(f: &RationalMap, verts: &[ComplexValue]) -> Result<Continuation, LiftError> {
    let fibers: Vec<Vec<ComplexValue>> = verts
        .par_iter()
        .enumerate()
        .map(|(i, &v)| full_fiber(f, v, i))
        .collect::<Result<_, _>>()?;
    let n = verts.len();
    let mut points = vec![verts[0]];
    let mut positions = vec![fibers[0].clone()];
    for i in 0..n {
        let j = (i + 1) % n;
        let cur = positions.last().unwrap().clone();
        let steps = advance(f, verts[i], verts[j], &cur, &fibers[j], MAX_SUBDIVISION, i)?;
        for (p, pos) in steps {
            points.push(p);
            positions.push(pos);
        }
    }
    // The loop closed on the first vertex; read off the permutation there.
    points.pop();
    let last = positions.pop().unwrap();
    let perm = last
        .iter()
        .map(|z| fibers[0].iter().position(|w| w == z).expect("closing positions come from the first fiber"))
        .collect();
    Ok(Continuation {
        points,
        positions,
        perm,
    })
}

/// Cycles of a permutation, each starting at its smallest element, in
/// increasing order of that element.
pub fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut cycle = vec![];
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            cycle.push(k);
            k = perm[k];
        }
        out.push(cycle);
    }
    out
}

fn check_critical_values(f: &RationalMap, gamma: &OrientedPolyCurve, eps: f64) -> Result<(), LiftError> {
    let values = f.critical_values()?;
    for (i, v) in gamma.vertices().iter().enumerate() {
        let p = SpherePoint::finite(*v);
        for c in &values {
            let distance = p.chordal(c);
            if distance <= eps {
                return Err(LiftError::NearCriticalValue {
                    vertex: i,
                    value: *c,
                    distance,
                });
            }
        }
    }
    Ok(())
}

/// All lifts of `γ` under `f`, each oriented so that `f` preserves
/// orientation, with covering degrees and signs relative to `ω`.
pub fn lift_curve(
    f: &RationalMap,
    gamma: &OrientedPolyCurve,
    omega: ComplexValue,
    eps: f64,
) -> Result<LiftSet, LiftError> {
    check_critical_values(f, gamma, eps)?;
    let cont = continue_fibers(f, gamma.vertices())?;
    let mut lifts = Vec::new();
    for cycle in permutation_cycles(&cont.perm) {
        let mut v = Vec::with_capacity(cycle.len() * cont.points.len());
        for &s in &cycle {
            v.extend(cont.positions.iter().map(|pos| pos[s]));
        }
        let curve = OrientedPolyCurve::new(v)?;
        let sign = sign_of(&curve, omega)?;
        lifts.push(Lift {
            curve,
            degree: cycle.len(),
            sign,
        });
    }
    Ok(LiftSet {
        base: gamma.clone(),
        lifts,
        monodromy: cont.perm,
    })
}

/// Strand permutation after traversing `γ` `laps` times.
pub fn monodromy_permutation(f: &RationalMap, gamma: &OrientedPolyCurve, laps: usize) -> Result<Vec<usize>, LiftError> {
    let v: Vec<ComplexValue> = gamma.vertices().iter().copied().cycle().take(gamma.len() * laps.max(1)).collect();
    Ok(continue_fibers(f, &v)?.perm)
}

/// Winding of `other` around some vertex of `curve` that is not on it.
fn winding_from(curve: &OrientedPolyCurve, other: &OrientedPolyCurve) -> Result<i64, LiftError> {
    let scale = curve.vertices().iter().map(|z| z.norm()).fold(1.0, f64::max);
    curve
        .vertices()
        .iter()
        .find(|&&q| other.distance_to(q) > 1e-12 * scale)
        .map(|&q| other.winding(q))
        .ok_or(LiftError::OnCurve(curve.vertices()[0]))
}

/// Indices of the lifts not separated from `ω` by another lift.
pub fn outermost_lifts(set: &LiftSet, omega: ComplexValue) -> Result<Vec<usize>, LiftError> {
    let mut out = Vec::new();
    'lifts: for (i, l) in set.lifts.iter().enumerate() {
        for (j, other) in set.lifts.iter().enumerate() {
            if i == j {
                continue;
            }
            if other.curve.distance_to(omega) <= 1e-12 * (1.0 + omega.norm()) {
                return Err(LiftError::OnCurve(omega));
            }
            if winding_from(&l.curve, &other.curve)? != other.curve.winding(omega) {
                continue 'lifts;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// How `sign_change_sequence` picks among several outermost lifts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Selector {
    /// Largest minimal vertex distance to `ω`; ties go to the lower index.
    #[default]
    FarthestFromOmega,
    /// First outermost lift in monodromy-cycle order.
    First,
}

impl Selector {
    fn choose(self, set: &LiftSet, candidates: &[usize], omega: ComplexValue) -> Option<usize> {
        match self {
            Selector::First => candidates.first().copied(),
            Selector::FarthestFromOmega => {
                let key = |i: usize| {
                    set.lifts[i]
                        .curve
                        .vertices()
                        .iter()
                        .map(|z| (z - omega).norm())
                        .fold(f64::INFINITY, f64::min)
                };
                let mut best: Option<(usize, f64)> = None;
                for &i in candidates {
                    let k = key(i);
                    if best.is_none_or(|(_, b)| k > b) {
                        best = Some((i, k));
                    }
                }
                best.map(|(i, _)| i)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignStep {
    pub curve: OrientedPolyCurve,
    pub sign: i8,
    /// Covering degree onto the previous curve; 1 for the starting curve.
    pub degree: usize,
    pub outermost: bool,
    /// Sign differs from the previous step.
    pub changed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignSequence {
    pub steps: Vec<SignStep>,
    /// Steps `k` with `sign_k != sign_{k-1}`.
    pub changes: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct SequenceOptions {
    pub eps: f64,
    pub selector: Selector,
    /// Chosen lifts are decimated to at most this many vertices.
    pub vertex_cap: usize,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            eps: DEFAULT_EPS,
            selector: Selector::default(),
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

/// `γ_0, γ_1, ...` with `γ_{k+1}` an outermost lift of `γ_k`.
pub fn sign_change_sequence(
    f: &RationalMap,
    gamma0: &OrientedPolyCurve,
    omega: ComplexValue,
    n: usize,
    opts: &SequenceOptions,
) -> Result<SignSequence, LiftError> {
    let mut steps = vec![SignStep {
        curve: gamma0.clone(),
        sign: sign_of(gamma0, omega)?,
        degree: 1,
        outermost: true,
        changed: false,
    }];
    let mut changes = Vec::new();
    for k in 1..=n {
        let prev = steps.last().unwrap();
        let set = lift_curve(f, &prev.curve, omega, opts.eps)?;
        let outer = outermost_lifts(&set, omega)?;
        let i = opts.selector.choose(&set, &outer, omega).ok_or(LiftError::NoLift)?;
        let lift = &set.lifts[i];
        let changed = lift.sign != prev.sign;
        if changed {
            changes.push(k);
        }
        steps.push(SignStep {
            curve: lift.curve.decimate(opts.vertex_cap),
            sign: lift.sign,
            degree: lift.degree,
            outermost: true,
            changed,
        });
    }
    Ok(SignSequence { steps, changes })
}
