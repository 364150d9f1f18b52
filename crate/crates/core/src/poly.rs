//! Dense real polynomials in one variable.
//!
//! Coefficients are stored in ascending powers: `coeffs[i]` multiplies `y^i`.
//! Trailing zeros are trimmed on construction, so the last stored coefficient
//! is the leading one (the zero polynomial has no coefficients).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The identity map `y`.
    pub fn identity() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    /// `lead * prod (y - r)` over the given roots.
    pub fn from_roots(lead: f64, roots: &[f64]) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        Polynomial::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value together with first and second derivative, in one Horner pass.
    pub fn eval_d2(&self, x: f64) -> (f64, f64, f64) {
        let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            d2 = d2 * x + 2.0 * d1;
            d1 = d1 * x + p;
            p = p * x + c;
        }
        (p, d1, d2)
    }

    pub fn derivative(&self, order: usize) -> Polynomial {
        let mut c = self.coeffs.clone();
        for _ in 0..order {
            if c.is_empty() {
                break;
            }
            c = c.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect();
        }
        Polynomial::new(c)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self ∘ inner`, i.e. `self(inner(y))`, expanded by Horner on polynomials.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Polynomial::constant(c);
        }
        acc
    }

    /// Schwarzian derivative `f'''/f' - 3/2 (f''/f')^2` at `x`.
    pub fn schwarzian(&self, x: f64) -> Schwarzian {
        let d1 = self.derivative(1).eval(x);
        let d2 = self.derivative(2).eval(x);
        let d3 = self.derivative(3).eval(x);
        if d1 == 0.0 {
            // Near a critical point f' ~ a t^k and S ~ -c/t^2, so any nonzero
            // higher derivative sends S to -inf.
            if d2 != 0.0 || d3 != 0.0 {
                Schwarzian::NegInfinity
            } else {
                Schwarzian::Indeterminate
            }
        } else {
            let r = d2 / d1;
            Schwarzian::Finite(d3 / d1 - 1.5 * r * r)
        }
    }
}

/// Value of a Schwarzian derivative, with the sentinels allowed at critical
/// points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schwarzian {
    Finite(f64),
    NegInfinity,
    Indeterminate,
}

impl Schwarzian {
    pub fn is_negative(self) -> bool {
        match self {
            Schwarzian::Finite(v) => v < 0.0,
            Schwarzian::NegInfinity => true,
            Schwarzian::Indeterminate => false,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Schwarzian::Finite(v) => Some(v),
            Schwarzian::NegInfinity => Some(f64::NEG_INFINITY),
            Schwarzian::Indeterminate => None,
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*y")?,
                _ => write!(f, "{a}*y^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 1.0]).eval(3.0), 9.0);
        assert_eq!(Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]).eval(1.0), 0.0);
        // logistic Q(y) = (lambda - 1) y - lambda y^2 at lambda = 4
        let q = Polynomial::new(vec![0.0, 3.0, -4.0]);
        assert_eq!(q.eval(0.75), 0.0);
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 1.0]).derivative(1).coeffs(), &[0.0, 2.0]);
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]).derivative(2).coeffs(), &[0.0, 6.0]);
        // g(x) = x - x (x - 2) = 3x - x^2
        let g = Polynomial::new(vec![0.0, 3.0, -1.0]);
        assert_eq!(g.derivative(1).coeffs(), &[3.0, -2.0]);
        assert!(Polynomial::constant(5.0).derivative(1).is_zero());
    }

    #[test]
    fn eval_d2_matches_derivatives() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0, -1.0]);
        let (v, d1, d2) = p.eval_d2(0.7);
        assert!((v - p.eval(0.7)).abs() < 1e-14);
        assert!((d1 - p.derivative(1).eval(0.7)).abs() < 1e-13);
        assert!((d2 - p.derivative(2).eval(0.7)).abs() < 1e-13);
    }

    #[test]
    fn schwarzian_examples() {
        // lambda x (1 - x), lambda = 2, at x = 0
        let f = Polynomial::new(vec![0.0, 2.0, -2.0]);
        assert_eq!(f.schwarzian(0.0), Schwarzian::Finite(-6.0));
        let cube = Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(cube.schwarzian(1.0), Schwarzian::Finite(-4.0));
        assert_eq!(cube.schwarzian(0.0), Schwarzian::NegInfinity);
        assert_eq!(Polynomial::constant(1.0).schwarzian(0.3), Schwarzian::Indeterminate);
    }

    #[test]
    fn compose_examples() {
        let q = Polynomial::new(vec![1.0, -3.0, 2.0]);
        assert_eq!(Polynomial::identity().compose(&q), q);
        // g(x) = x (1 - x); g∘g = x - 2x^2 + 2x^3 - x^4
        let g = Polynomial::new(vec![0.0, 1.0, -1.0]);
        let gg = g.compose(&g);
        assert_eq!(gg.degree(), 4);
        assert_eq!(gg.coeffs(), &[0.0, 1.0, -2.0, 2.0, -1.0]);
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(1.0, &[-1.0, 0.0, 1.0]);
        assert_eq!(p.coeffs(), &[0.0, -1.0, 0.0, 1.0]);
    }
}
