use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::roots::{poly_roots, Root, RootError};
use super::ComplexValue;

const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);
const ONE: ComplexValue = ComplexValue::new(1.0, 0.0);

/// Dense polynomial with complex coefficients in ascending degree order.
///
/// Trailing zero coefficients are stripped on construction, so the degree is
/// the index of the last stored coefficient and the zero polynomial has no
/// coefficients at all.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polynomial {
    coeffs: Vec<ComplexValue>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ComplexValue>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ComplexValue::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: ComplexValue) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `z`
    pub fn identity() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// `c * z^k`
    pub fn monomial(c: ComplexValue, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `z - root`
    pub fn linear_factor(root: ComplexValue) -> Self {
        Self::new(vec![-root, ONE])
    }

    pub fn coeffs(&self) -> &[ComplexValue] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> ComplexValue {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with `-1` for the zero polynomial.
    pub fn signed_degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> ComplexValue {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: ComplexValue) -> ComplexValue {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: ComplexValue) -> (ComplexValue, ComplexValue) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |a_k| |z|^k`, the natural scale for the rounding error of `eval`.
    pub fn abs_scale(&self, z: ComplexValue) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Homogeneous evaluation `sum a_k z^k w^(n-k)` with formal degree `n`.
    pub fn eval_homogeneous(&self, z: ComplexValue, w: ComplexValue, n: usize) -> ComplexValue {
        debug_assert!(self.coeffs.len() <= n + 1);
        let mut acc = ZERO;
        let mut wpow = ONE;
        // Horner in z; the coefficient of z^k picks up w^(n-k).
        for k in (0..=n).rev() {
            acc = acc * z + self.coeff(k) * wpow;
            wpow *= w;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: ComplexValue) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// `z^n p(1/z)`, i.e. the coefficients reversed relative to formal degree `n`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(self.coeffs.len() <= n + 1, "formal degree below actual degree");
        Self::new((0..=n).map(|k| self.coeff(n - k)).collect())
    }

    /// Drops leading coefficients whose modulus is below `rel_tol` times the
    /// largest coefficient modulus.
    pub fn trim_relative(&self, rel_tol: f64) -> Self {
        let cut = self.norm_inf() * rel_tol;
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Number of vanishing low-order coefficients (relative to the largest).
    pub fn order_at_zero(&self, rel_tol: f64) -> usize {
        let cut = self.norm_inf() * rel_tol;
        self.coeffs.iter().take_while(|c| c.norm() <= cut).count()
    }

    /// Quotient of division by `z - root` (synthetic division, remainder dropped).
    pub fn deflate(&self, root: ComplexValue) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (1..n).rev() {
            acc = acc * root + self.coeffs[k];
            q[k - 1] = acc;
        }
        Self::new(q)
    }

    pub fn roots(&self, tol: f64) -> Result<Vec<Root>, RootError> {
        poly_roots(self, tol)
    }

    /// Monic product `prod (z - r_i)^{m_i}`.
    pub fn from_roots(roots: &[Root]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::linear_factor(r.value).pow(r.multiplicity)
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            match k {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{k}")?,
            }
        }
        Ok(())
    }
}

impl From<Vec<[f64; 2]>> for Polynomial {
    fn from(v: Vec<[f64; 2]>) -> Self {
        Self::new(v.into_iter().map(|[re, im]| ComplexValue::new(re, im)).collect())
    }
}

impl From<Polynomial> for Vec<[f64; 2]> {
    fn from(p: Polynomial) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-ONE)
    }
}

/// `sum_k a_k N^k D^(n-k)` for `outer = sum a_k z^k` and formal degree `n`.
///
/// With `n = deg outer` this is the numerator of `outer(N/D)` over `D^n`.
pub fn homogeneous_compose(
    outer: &Polynomial,
    formal_degree: usize,
    num: &Polynomial,
    den: &Polynomial,
) -> Polynomial {
    let n = formal_degree;
    let mut num_pows = Vec::with_capacity(n + 1);
    let mut den_pows = Vec::with_capacity(n + 1);
    num_pows.push(Polynomial::one());
    den_pows.push(Polynomial::one());
    for k in 1..=n {
        num_pows.push(&num_pows[k - 1] * num);
        den_pows.push(&den_pows[k - 1] * den);
    }
    let mut acc = Polynomial::zero();
    for k in 0..=n {
        let a = outer.coeff(k);
        if a == ZERO {
            continue;
        }
        acc = &acc + &(&num_pows[k] * &den_pows[n - k]).scale(a);
    }
    acc
}

/// `outer(inner_num / inner_den) = N / D` with `D = inner_den^deg(outer)`.
pub fn poly_compose(
    outer: &Polynomial,
    inner_num: &Polynomial,
    inner_den: &Polynomial,
) -> (Polynomial, Polynomial) {
    assert!(!inner_den.is_zero(), "inner denominator is the zero polynomial");
    let n = outer.degree().unwrap_or(0);
    (
        homogeneous_compose(outer, n, inner_num, inner_den),
        inner_den.pow(n),
    )
}
