use std::f64::consts::TAU;

use thiserror::Error;

use super::poly::Polynomial;
use super::ComplexValue;

/// A root with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: ComplexValue,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RootError {
    #[error("polynomial of degree {0:?} has no roots to find")]
    Degenerate(Option<usize>),
    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        /// The last iterate, one entry per root counted with multiplicity.
        best: Vec<ComplexValue>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Residual tolerance relative to `sum |a_k| |r|^k`; also drives the
    /// multiplicity clustering radius `tol^(1/m)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: super::ROOT_TOL,
            max_iter: 2000,
        }
    }
}

/// All roots of `p` with multiplicities, by Aberth–Ehrlich iteration.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Root>, RootError> {
    poly_roots_with(
        p,
        RootOptions {
            tol,
            ..RootOptions::default()
        },
    )
}

pub fn poly_roots_with(p: &Polynomial, opts: RootOptions) -> Result<Vec<Root>, RootError> {
    assert!(opts.tol > 0.0, "root tolerance must be positive");
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        other => return Err(RootError::Degenerate(other)),
    };

    // Exact zero roots come off first; they are common in this crate
    // (superattracting points normalized to 0) and need no iteration.
    let zeros = p.coeffs().iter().take_while(|c| **c == ComplexValue::new(0.0, 0.0)).count();
    let reduced = Polynomial::new(p.coeffs()[zeros..].to_vec());

    let mut roots = Vec::new();
    if zeros > 0 {
        roots.push(Root {
            value: ComplexValue::new(0.0, 0.0),
            multiplicity: zeros,
        });
    }
    if degree > zeros {
        // Near-multiple roots can jitter at the rounding floor without ever
        // meeting the stopping rule; the residual check below judges them.
        let approx = match aberth(&reduced, opts.max_iter) {
            Ok(z) => z,
            Err(RootError::NoConvergence { best, .. }) => best,
            Err(e) => return Err(e),
        };
        for mut root in cluster_roots(&approx, opts.tol) {
            if root.multiplicity > 1 {
                root.value = polish_multiple(&reduced, root.value, root.multiplicity, opts.tol);
            }
            let backward = |z: ComplexValue| reduced.eval(z).norm() / reduced.abs_scale(z);
            // A perturbed multiple root splits into members that are each
            // good roots while their centroid is not.
            let radius = 2.0 * opts.tol.powf(1.0 / root.multiplicity as f64) * (1.0 + root.value.norm());
            let members_ok = root.multiplicity > 1
                && approx
                    .iter()
                    .filter(|z| (*z - root.value).norm() <= radius)
                    .all(|z| backward(*z) <= opts.tol);
            if !(backward(root.value) <= opts.tol || members_ok) {
                return Err(RootError::NoConvergence {
                    iterations: opts.max_iter,
                    best: approx,
                });
            }
            roots.push(root);
        }
    }
    debug_assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), degree);
    Ok(roots)
}

/// Aberth–Ehrlich approximations of every root of `p`, repeated by
/// multiplicity, with no clustering or residual check.
pub fn root_approximations(p: &Polynomial, max_iter: usize) -> Result<Vec<ComplexValue>, RootError> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        other => return Err(RootError::Degenerate(other)),
    };
    let zeros = p.coeffs().iter().take_while(|c| **c == ComplexValue::new(0.0, 0.0)).count();
    let mut out = vec![ComplexValue::new(0.0, 0.0); zeros];
    if degree > zeros {
        let reduced = Polynomial::new(p.coeffs()[zeros..].to_vec());
        out.extend(aberth(&reduced, max_iter).or_else(|e| match e {
            RootError::NoConvergence { best, .. } => Ok(best),
            other => Err(other),
        })?);
    }
    Ok(out)
}

/// Further Aberth–Ehrlich sweeps from `start` with a caller-supplied Newton
/// correction `p(z)/p'(z)`. For polynomials whose expanded coefficients lose
/// accuracy but which can be evaluated stably another way.
pub fn aberth_refine(
    mut z: Vec<ComplexValue>,
    ratio: impl Fn(ComplexValue) -> ComplexValue,
    max_iter: usize,
) -> Vec<ComplexValue> {
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let r = ratio(z[i]);
            if r == ComplexValue::new(0.0, 0.0) || !r.is_finite() {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: ComplexValue = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = r / (ComplexValue::new(1.0, 0.0) - r * repulsion);
            if step.is_finite() {
                z[i] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                    done[i] = true;
                }
            } else {
                let bump = ComplexValue::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

/// Radius of the disc containing all roots: the positive root of
/// `|a_n| x^n - sum_{k<n} |a_k| x^k`.
fn cauchy_bound(p: &Polynomial) -> f64 {
    let n = p.degree().unwrap();
    let lead = p.leading().norm();
    let abs: Vec<f64> = p.coeffs().iter().map(|c| c.norm() / lead).collect();
    let g = |x: f64| -> f64 {
        let mut acc = 1.0;
        for k in (0..n).rev() {
            acc = acc * x - abs[k];
        }
        acc
    };
    let mut hi = 1.0 + abs[..n].iter().cloned().fold(0.0, f64::max);
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.max(f64::MIN_POSITIVE)
}

/// Newton correction `p/p'` together with a flag saying the iterate already
/// sits at the rounding floor of `p`. Large iterates go through the reversed
/// polynomial so high degrees do not overflow.
fn newton_ratio(p: &Polynomial, rev: &Polynomial, z: ComplexValue) -> (ComplexValue, bool) {
    let n = p.degree().unwrap() as f64;
    let floor = 8.0 * (n + 1.0) * f64::EPSILON;
    if z.norm() <= 1.0 {
        let (v, d) = p.eval_with_derivative(z);
        let done = v.norm() <= floor * p.abs_scale(z);
        (v / d, done)
    } else {
        let u = z.inv();
        let (q, dq) = rev.eval_with_derivative(u);
        let done = q.norm() <= floor * rev.abs_scale(u);
        (z * q / (q * n - u * dq), done)
    }
}

fn aberth(p: &Polynomial, max_iter: usize) -> Result<Vec<ComplexValue>, RootError> {
    let n = p.degree().unwrap();
    if n == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let rev = p.reversed(n);
    let radius = cauchy_bound(p);
    // Fixed initialization rule: equally spaced on the bound circle with an
    // irrational phase offset, so conjugate-symmetric inputs do not start on
    // a symmetry line.
    let mut z: Vec<ComplexValue> = (0..n)
        .map(|k| ComplexValue::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];

    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, at_floor) = newton_ratio(p, &rev, z[i]);
            if at_floor {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: ComplexValue = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (ComplexValue::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                    done[i] = true;
                }
            } else {
                // Coincident iterates: nudge deterministically.
                let bump = ComplexValue::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(RootError::NoConvergence {
        iterations: max_iter,
        best: z,
    })
}

/// A root of multiplicity `m` is a simple root of `p^(m-1)`; Newton on that
/// derivative recovers the digits the cluster centroid loses. The polished
/// value is kept only if it stays inside the clustering radius.
fn polish_multiple(p: &Polynomial, start: ComplexValue, m: usize, tol: f64) -> ComplexValue {
    let mut dp = p.clone();
    for _ in 1..m {
        dp = dp.derivative();
    }
    let radius = tol.powf(1.0 / m as f64) * (1.0 + start.norm());
    let mut z = start;
    for _ in 0..20 {
        let (v, d) = dp.eval_with_derivative(z);
        let step = v / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 2.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    if (z - start).norm() <= radius {
        z
    } else {
        start
    }
}

/// Nearest non-member of a cluster must be this many cluster radii away.
const CLUSTER_ISOLATION: f64 = 4.0;

/// Groups approximate roots into clusters. A cluster of size `m` around a
/// seed has all members within `tol^(1/m) * (1 + |seed|)` of it and no
/// other approximation within `CLUSTER_ISOLATION` times that spread.
pub fn cluster_roots(approx: &[ComplexValue], tol: f64) -> Vec<Root> {
    cluster_roots_by(approx, tol, |_, _| true)
}

/// As [`cluster_roots`], keeping a candidate cluster only when
/// `accept(centroid, size)` agrees that it is a multiple root.
pub fn cluster_roots_by(
    approx: &[ComplexValue],
    tol: f64,
    accept: impl Fn(ComplexValue, usize) -> bool,
) -> Vec<Root> {
    let mut used = vec![false; approx.len()];
    let mut out = Vec::new();
    for i in 0..approx.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let seed = approx[i];
        let mut others: Vec<(f64, usize)> = (0..approx.len())
            .filter(|&j| !used[j])
            .map(|j| ((approx[j] - seed).norm(), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = 1.0 + seed.norm();
        let mut take = 0;
        for k in (0..others.len()).rev() {
            let spread = others[k].0;
            let isolated = others.get(k + 1).is_none_or(|next| next.0 >= CLUSTER_ISOLATION * spread);
            if isolated && spread <= tol.powf(1.0 / (k + 2) as f64) * scale {
                let centroid = others[..=k].iter().fold(seed, |acc, &(_, j)| acc + approx[j]) / (k + 2) as f64;
                if accept(centroid, k + 2) {
                    take = k + 1;
                    break;
                }
            }
        }
        let mut sum = seed;
        for &(_, j) in &others[..take] {
            used[j] = true;
            sum += approx[j];
        }
        out.push(Root {
            value: sum / (take + 1) as f64,
            multiplicity: take + 1,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn sorted_real(roots: &[Root]) -> Vec<(f64, usize)> {
        let mut v: Vec<(f64, usize)> = roots.iter().map(|r| (r.value.re, r.multiplicity)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    #[test]
    fn quadratic_pair() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        let mut roots = poly_roots(&p, 1e-10).unwrap();
        roots.sort_by(|a, b| a.value.im.total_cmp(&b.value.im));
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - c64(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1].value - c64(0.0, 1.0)).norm() < 1e-12);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_is_merged() {
        // z^3 - 3z + 2 = (z - 1)^2 (z + 2)
        let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]);
        let roots = poly_roots(&p, 1e-10).unwrap();
        let v = sorted_real(&roots);
        assert_eq!(v.len(), 2);
        assert!((v[0].0 + 2.0).abs() < 1e-12 && v[0].1 == 1);
        assert!((v[1].0 - 1.0).abs() < 1e-9 && v[1].1 == 2);
    }

    #[test]
    fn exact_zero_roots() {
        let p = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let roots = poly_roots(&p, 1e-10).unwrap();
        assert_eq!(roots, vec![Root { value: c64(0.0, 0.0), multiplicity: 3 }]);
    }

    #[test]
    fn triple_and_quadruple_roots() {
        let p = &Polynomial::linear_factor(c64(0.5, -0.25)).pow(3)
            * &Polynomial::linear_factor(c64(-1.0, 2.0)).pow(4);
        let roots = poly_roots(&p, 1e-10).unwrap();
        let mut m: Vec<usize> = roots.iter().map(|r| r.multiplicity).collect();
        m.sort();
        assert_eq!(m, vec![3, 4]);
        for r in &roots {
            let target = if r.multiplicity == 3 { c64(0.5, -0.25) } else { c64(-1.0, 2.0) };
            assert!((r.value - target).norm() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn perturbed_double_roots_are_accepted() {
        // i z^2 (z - 1.0233)^2 with a rounding-level constant term.
        let r = 1.0233;
        let p = Polynomial::new(vec![
            c64(2.2e-16, 0.0),
            c64(0.0, 0.0),
            c64(0.0, r * r),
            c64(0.0, -2.0 * r),
            c64(0.0, 1.0),
        ]);
        let roots = poly_roots(&p, 1e-10).unwrap();
        assert_eq!(roots.iter().map(|q| q.multiplicity).collect::<Vec<_>>(), vec![2, 2]);
        assert!(roots.iter().any(|q| q.value.norm() < 1e-6));
        assert!(roots.iter().any(|q| (q.value - r).norm() < 1e-6));
    }

    #[test]
    fn constant_is_degenerate() {
        assert_eq!(
            poly_roots(&Polynomial::one(), 1e-10),
            Err(RootError::Degenerate(Some(0)))
        );
        assert_eq!(poly_roots(&Polynomial::zero(), 1e-10), Err(RootError::Degenerate(None)));
    }

    #[test]
    fn deterministic() {
        let p = Polynomial::from_real(&[-4.0, 16.0, -15.0, -2.0, 4.0]);
        assert_eq!(poly_roots(&p, 1e-10).unwrap(), poly_roots(&p, 1e-10).unwrap());
    }

    #[test]
    fn cauchy_bound_encloses_roots() {
        let p = Polynomial::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let b = cauchy_bound(&p);
        assert!((3.0..13.0).contains(&b), "{b}");
    }
}
