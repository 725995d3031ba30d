//! The explicit maps: the pseudo-basilica family `N_d ∘ p_d ∘ M`, its scaled
//! pseudo-rabbit variant, the displayed degree-3 and degree-4 maps, and the
//! parameter solver that singles out the degree-3 map.

use thiserror::Error;

use crate::numerics::{
    homogeneous_compose, poly_compose, poly_roots, ComplexValue, Polynomial, SpherePoint, ROOT_TOL,
};
use crate::ratmap::{MapError, RationalMap};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("family degree must be at least 2, got {0}")]
    BadDegree(usize),
    #[error("scaling parameter r must be nonzero")]
    ZeroScale,
    #[error("unknown catalog name {0:?}")]
    UnknownName(String),
    #[error("root index {index} out of range ({count} roots)")]
    RootIndex { index: usize, count: usize },
    #[error("parameter system has {0} admissible solutions, expected exactly one")]
    NotUnique(usize),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Member of the family: `d`, and the pseudo-rabbit scaling `r` when present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub d: usize,
    pub r: Option<ComplexValue>,
}

impl FamilySpec {
    pub fn build(&self) -> Result<RationalMap, CatalogError> {
        match self.r {
            None => pseudo_basilica(self.d),
            Some(r) => pseudo_rabbit(self.d, r),
        }
    }
}

/// `p_d(z) = (d-1) z^d - d z^(d-1) + 1`
pub fn p_d(d: usize) -> Polynomial {
    let mut c = vec![0.0; d + 1];
    c[0] = 1.0;
    c[d - 1] = -(d as f64);
    c[d] = (d - 1) as f64;
    Polynomial::from_real(&c)
}

/// `(B - A, A)` where `p_d(M(z)) = A / B`, `M(z) = (z-1)/z`, `B = z^d`.
/// `f_d = (1-d) (A - B) / A = (d-1) (B - A) / A`.
fn family_parts(d: usize) -> (Polynomial, Polynomial) {
    let m_num = Polynomial::from_real(&[-1.0, 1.0]);
    let m_den = Polynomial::from_real(&[0.0, 1.0]);
    let (a, b) = poly_compose(&p_d(d), &m_num, &m_den);
    (&b - &a, a)
}

pub fn pseudo_basilica(d: usize) -> Result<RationalMap, CatalogError> {
    if d < 2 {
        return Err(CatalogError::BadDegree(d));
    }
    let (u, v) = family_parts(d);
    let scale = ComplexValue::new((d - 1) as f64, 0.0);
    Ok(RationalMap::normalize(u.scale(scale), v)?)
}

/// `g_r = r/(d-1) · f_d`
pub fn pseudo_rabbit(d: usize, r: ComplexValue) -> Result<RationalMap, CatalogError> {
    if d < 2 {
        return Err(CatalogError::BadDegree(d));
    }
    if r.norm() == 0.0 {
        return Err(CatalogError::ZeroScale);
    }
    let (u, v) = family_parts(d);
    Ok(RationalMap::normalize(u.scale(r), v)?)
}

/// `(z^3 - 3z + 2) / (1.5 z - 1)`, the degree-3 map as displayed.
pub fn displayed_degree3() -> RationalMap {
    RationalMap::normalize(
        Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]),
        Polynomial::from_real(&[-1.0, 1.5]),
    )
    .expect("coprime")
}

/// `3 (z-1)^3 (z+3) / (3 - 8z + 6z^2)`
pub fn displayed_degree4() -> RationalMap {
    let one = ComplexValue::new(1.0, 0.0);
    let num = &Polynomial::linear_factor(one).pow(3) * &Polynomial::from_real(&[9.0, 3.0]);
    RationalMap::normalize(num, Polynomial::from_real(&[3.0, -8.0, 6.0])).expect("coprime")
}

/// The degree-3 pseudo-basilica used throughout (the displayed form).
pub fn paper_g() -> RationalMap {
    displayed_degree3()
}

/// Parameters `r` with `g_r^3(0) = 0` and `g_r(0) != 0`, sorted by real then
/// imaginary part.
///
/// The orbit of 0 is carried symbolically in `r` as homogeneous pairs
/// `(X(r) : Y(r))`; the roots of `X_3` are then checked by direct iteration,
/// which discards spurious roots where `X_3` and `Y_3` vanish together.
pub fn pseudo_rabbit_roots(d: usize) -> Result<Vec<ComplexValue>, CatalogError> {
    if d < 2 {
        return Err(CatalogError::BadDegree(d));
    }
    let (u, v) = family_parts(d);
    let n = u.degree().unwrap_or(0).max(v.degree().unwrap_or(0));
    let r_var = Polynomial::identity();
    let mut x = Polynomial::zero();
    let mut y = Polynomial::one();
    for _ in 0..3 {
        let nx = &r_var * &homogeneous_compose(&u, n, &x, &y);
        let ny = homogeneous_compose(&v, n, &x, &y);
        x = nx;
        y = ny;
    }
    let candidates = poly_roots(&x.trim_relative(1e-14), ROOT_TOL).map_err(MapError::from)?;
    let zero = SpherePoint::real(0.0);
    let mut out = Vec::new();
    for c in candidates {
        let r = c.value;
        if r.norm() < 1e-9 {
            continue;
        }
        let g = pseudo_rabbit(d, r)?;
        let z1 = g.eval_sphere(&zero);
        let z3 = g.iterate(&zero, 3);
        if z1.chordal(&zero) > 1e-6 && z3.chordal(&zero) < 1e-6 {
            out.push(r);
        }
    }
    out.sort_by(|a, b| {
        let ka = ((a.re * 1e9).round(), (a.im * 1e9).round());
        let kb = ((b.re * 1e9).round(), (b.im * 1e9).round());
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(out)
}

/// Result of the parameter solve for `(z-1)^2 (z+2) / (a z - b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PinchSolution {
    pub a: ComplexValue,
    pub b: ComplexValue,
    /// `a z - b`
    pub denominator: Polynomial,
    pub map: RationalMap,
}

/// Solves for `(a, b)` such that `g(z) = (z-1)^2 (z+2) / (a z - b)` has a
/// critical point of local degree 3 at 0 and `g(g(0)) = 0`, with `g(0)` a
/// simple zero of `g` (the postcritical set stays `{∞, 0, -2}`).
///
/// The Wronskian `W = N' D - N D'` is linear in `(a, b)`, so the conditions
/// `W(0) = W'(0) = 0` form a homogeneous 2×2 system; its kernel fixes the
/// ratio `a : b`, and `g(0) ∈ N^{-1}(0)` fixes the scale.
pub fn solve_pinch_params() -> Result<PinchSolution, CatalogError> {
    let num = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]);
    let den_of = |a: ComplexValue, b: ComplexValue| Polynomial::new(vec![-b, a]);
    let conditions = |a: ComplexValue, b: ComplexValue| -> [ComplexValue; 2] {
        let den = den_of(a, b);
        let w = &(&num.derivative() * &den) - &(&num * &den.derivative());
        [w.coeff(0), w.coeff(1)]
    };
    let one = ComplexValue::new(1.0, 0.0);
    let zero = ComplexValue::new(0.0, 0.0);
    // Columns: response to a = 1 and to b = 1.
    let col_a = conditions(one, zero);
    let col_b = conditions(zero, one);
    // Kernel of [[col_a[0], col_b[0]], [col_a[1], col_b[1]]] from the first
    // nonzero row: (a, b) ∝ (col_b[i], -col_a[i]).
    let row = (0..2)
        .find(|&i| col_a[i].norm() + col_b[i].norm() > 1e-14)
        .ok_or(CatalogError::NotUnique(usize::MAX))?;
    let (ka, kb) = (col_b[row], -col_a[row]);
    for i in 0..2 {
        if (col_a[i] * ka + col_b[i] * kb).norm() > 1e-12 {
            return Err(CatalogError::NotUnique(0));
        }
    }

    // Scale s: g(0) = N(0) / (-s kb) must be a simple root of N.
    let mut solutions = Vec::new();
    for root in poly_roots(&num, ROOT_TOL).map_err(MapError::from)? {
        if root.multiplicity != 1 || kb.norm() == 0.0 || root.value.norm() == 0.0 {
            continue;
        }
        let s = num.eval(zero) / (-kb * root.value);
        let (a, b) = (ka * s, kb * s);
        let den = den_of(a, b);
        if den.eval(root.value).norm() < 1e-12 {
            continue;
        }
        solutions.push((a, b, den));
    }
    if solutions.len() != 1 {
        return Err(CatalogError::NotUnique(solutions.len()));
    }
    let (a, b, denominator) = solutions.pop().unwrap();
    let map = RationalMap::normalize(num, denominator.clone())?;
    Ok(PinchSolution {
        a,
        b,
        denominator,
        map,
    })
}

/// `|g'(0)|`, `|g''(0)|` and `|g(g(0))|` for a map finite at 0 and at `g(0)`.
pub fn pinch_residuals(g: &RationalMap) -> [f64; 3] {
    let z0 = ComplexValue::new(0.0, 0.0);
    let (n, dn) = g.num().eval_with_derivative(z0);
    let (d, dd) = g.den().eval_with_derivative(z0);
    let ddn = g.num().derivative().derivative().eval(z0);
    let ddd = g.den().derivative().derivative().eval(z0);
    let first = (dn * d - n * dd) / (d * d);
    // (N/D)'' = (N'' D - N D'')/D^2 - 2 D' (N' D - N D')/D^3
    let second = (ddn * d - n * ddd) / (d * d) - dd * (dn * d - n * dd) * 2.0 / (d * d * d);
    let g0 = n / d;
    let gg0 = g.num().eval(g0) / g.den().eval(g0);
    [first.norm(), second.norm(), gg0.norm()]
}

/// Looks up a map by CLI name: `paper-g`, `paper-degree4`,
/// `pseudo-basilica:<d>` or `pseudo-rabbit:<d>:<root-index>`.
pub fn by_name(name: &str) -> Result<RationalMap, CatalogError> {
    let unknown = || CatalogError::UnknownName(name.to_string());
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["paper-g"] => Ok(paper_g()),
        ["paper-degree4"] => Ok(displayed_degree4()),
        ["pseudo-basilica", d] => pseudo_basilica(d.parse().map_err(|_| unknown())?),
        ["pseudo-rabbit", d, idx] => {
            let d: usize = d.parse().map_err(|_| unknown())?;
            let idx: usize = idx.parse().map_err(|_| unknown())?;
            let roots = pseudo_rabbit_roots(d)?;
            let r = *roots.get(idx).ok_or(CatalogError::RootIndex {
                index: idx,
                count: roots.len(),
            })?;
            pseudo_rabbit(d, r)
        }
        _ => Err(unknown()),
    }
}

/// Names accepted by [`by_name`] for small parameters, for listings.
pub fn names() -> Vec<String> {
    let mut v = vec!["paper-g".to_string(), "paper-degree4".to_string()];
    v.extend((2..=6).map(|d| format!("pseudo-basilica:{d}")));
    v.push("pseudo-rabbit:3:<root-index>".to_string());
    v
}
