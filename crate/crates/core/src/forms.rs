//! General, linear-factors and canonical representations of a polynomial map,
//! the linear conjugacy between them, and product distance functions.
//!
//! A map of degree `n` is stored as `f(y) = y + Q(y)`. When every root of `Q`
//! is real, `Q(y) = (-1)^(n-1) s M̃ ∏ (y - y_i)` and the affine change of
//! variable `y = T(x) = s M̃^(-1/(n-1)) x + y_a` takes `f` to the canonical map
//! `g(x) = x + (-1)^(n-1) s^n x ∏ (x - x_i)` whose fixed points are `0` and
//! `x_i = s M̃^(1/(n-1)) (y_i - y_a)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::roots::{real_roots_with, RootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// `s^n`.
    pub fn pow(self, n: usize) -> f64 {
        match self {
            Sign::Minus if n % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be +1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

fn alt_sign(n: usize) -> f64 {
    // (-1)^(n-1)
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `f(y) = y + Q(y)` with `deg Q = n >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralMap {
    q: Polynomial,
}

impl GeneralMap {
    /// Builds the map from the coefficients of `f` itself.
    pub fn from_coefficients(f: &Polynomial) -> Result<GeneralMap> {
        GeneralMap::from_fixed_points_polynomial(&(f - &Polynomial::identity()))
    }

    /// Builds the map from `Q = f - id` directly.
    pub fn from_fixed_points_polynomial(q: &Polynomial) -> Result<GeneralMap> {
        if q.degree() < 2 {
            return Err(Error::DegenerateMap { degree: q.degree() });
        }
        Ok(GeneralMap { q: q.clone() })
    }

    pub fn degree(&self) -> usize {
        self.q.degree()
    }

    pub fn fixed_points_polynomial(&self) -> &Polynomial {
        &self.q
    }

    pub fn polynomial(&self) -> Polynomial {
        &self.q + &Polynomial::identity()
    }

    pub fn eval(&self, y: f64) -> f64 {
        y + self.q.eval(y)
    }

    /// `M = (-1)^(n-1) * lead(Q)`.
    pub fn amplitude(&self) -> f64 {
        alt_sign(self.degree()) * self.q.leading()
    }
}

/// How the fixed point sent to the origin is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPolicy {
    #[default]
    Smallest,
    Index(usize),
    /// The fixed point closest to the given value.
    Nearest(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFactorsMap {
    pub s: Sign,
    pub m_tilde: f64,
    /// Real fixed points, ascending, repeated by multiplicity.
    pub fixed_points: Vec<f64>,
    pub anchor: usize,
}

impl LinearFactorsMap {
    pub fn new(s: Sign, m_tilde: f64, fixed_points: Vec<f64>, anchor: usize) -> Result<Self> {
        if !(m_tilde > 0.0) || !m_tilde.is_finite() {
            return Err(Error::Invalid(format!("amplitude must be positive, got {m_tilde}")));
        }
        if fixed_points.len() < 2 {
            return Err(Error::DegenerateMap { degree: fixed_points.len() });
        }
        if anchor >= fixed_points.len() {
            return Err(Error::BadAnchor { index: anchor, count: fixed_points.len() });
        }
        Ok(LinearFactorsMap { s, m_tilde, fixed_points, anchor })
    }

    pub fn degree(&self) -> usize {
        self.fixed_points.len()
    }

    pub fn anchor_point(&self) -> f64 {
        self.fixed_points[self.anchor]
    }

    /// Product form of `f`, no expansion.
    pub fn eval(&self, y: f64) -> f64 {
        let n = self.degree();
        let prod: f64 = self.fixed_points.iter().map(|&yi| y - yi).product();
        y + alt_sign(n) * self.s.value() * self.m_tilde * prod
    }

    pub fn to_general(&self) -> GeneralMap {
        let n = self.degree();
        let lead = alt_sign(n) * self.s.value() * self.m_tilde;
        GeneralMap { q: Polynomial::from_roots(lead, &self.fixed_points) }
    }

    pub fn with_anchor(mut self, policy: AnchorPolicy) -> Result<Self> {
        self.anchor = resolve_anchor(&self.fixed_points, policy)?;
        Ok(self)
    }
}

fn resolve_anchor(points: &[f64], policy: AnchorPolicy) -> Result<usize> {
    match policy {
        AnchorPolicy::Smallest => points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .ok_or(Error::BadAnchor { index: 0, count: 0 }),
        AnchorPolicy::Index(i) if i < points.len() => Ok(i),
        AnchorPolicy::Index(i) => Err(Error::BadAnchor { index: i, count: points.len() }),
        AnchorPolicy::Nearest(v) => points
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
            .map(|(i, _)| i)
            .ok_or(Error::BadAnchor { index: 0, count: 0 }),
    }
}

/// Factors `Q` over the reals. Fails when any fixed point is complex.
pub fn to_linear_factors(g: &GeneralMap, opts: RootOptions) -> Result<LinearFactorsMap> {
    to_linear_factors_anchored(g, opts, AnchorPolicy::Smallest)
}

pub fn to_linear_factors_anchored(
    g: &GeneralMap,
    opts: RootOptions,
    anchor: AnchorPolicy,
) -> Result<LinearFactorsMap> {
    let n = g.degree();
    if n < 2 {
        return Err(Error::DegenerateMap { degree: n });
    }
    let roots = real_roots_with(&g.q, opts)?;
    if roots.complex_pair_count > 0 {
        return Err(Error::ComplexFixedPoints { pairs: roots.complex_pair_count });
    }
    let m = g.amplitude();
    let points = roots.expanded();
    let anchor = resolve_anchor(&points, anchor)?;
    LinearFactorsMap::new(Sign::of(m), m.abs(), points, anchor)
}

/// `y = scale * x + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyTransform {
    pub scale: f64,
    pub offset: f64,
}

impl ConjugacyTransform {
    pub const IDENTITY: ConjugacyTransform = ConjugacyTransform { scale: 1.0, offset: 0.0 };

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.offset) / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMap {
    degree: usize,
    s: Sign,
    /// `x_1 .. x_{n-1}`; `x_0 = 0` is implicit.
    nonzero: Vec<f64>,
}

impl CanonicalMap {
    pub fn new(s: Sign, nonzero_fixed_points: Vec<f64>) -> Result<CanonicalMap> {
        if nonzero_fixed_points.is_empty() {
            return Err(Error::DegenerateMap { degree: 1 });
        }
        if nonzero_fixed_points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("fixed points must be finite".into()));
        }
        Ok(CanonicalMap { degree: nonzero_fixed_points.len() + 1, s, nonzero: nonzero_fixed_points })
    }

    /// Quadratic canonical map `x - x (x - x1)`.
    pub fn quadratic(x1: f64) -> CanonicalMap {
        CanonicalMap { degree: 2, s: Sign::Plus, nonzero: vec![x1] }
    }

    /// Cubic canonical map `x + s x (x - x1)(x - x2)`.
    pub fn cubic(s: Sign, x1: f64, x2: f64) -> CanonicalMap {
        CanonicalMap { degree: 3, s, nonzero: vec![x1, x2] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sign(&self) -> Sign {
        self.s
    }

    pub fn nonzero_fixed_points(&self) -> &[f64] {
        &self.nonzero
    }

    /// All fixed points with `x_0 = 0` first.
    pub fn fixed_points(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.nonzero.iter().copied()).collect()
    }

    pub fn fixed_point(&self, k: usize) -> Result<f64> {
        match k {
            0 => Ok(0.0),
            _ if k < self.degree => Ok(self.nonzero[k - 1]),
            _ => Err(Error::IndexOutOfRange { index: k, len: self.degree }),
        }
    }

    /// `(-1)^(n-1) s^n`.
    pub fn sign_factor(&self) -> f64 {
        alt_sign(self.degree) * self.s.pow(self.degree)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let prod: f64 = self.nonzero.iter().map(|&xi| x - xi).product();
        x + self.sign_factor() * x * prod
    }

    /// Expanded polynomial of `g`.
    pub fn polynomial(&self) -> Polynomial {
        let roots = self.fixed_points();
        &Polynomial::identity() + &Polynomial::from_roots(self.sign_factor(), &roots)
    }

    /// The canonical map viewed as a linear-factors map with unit amplitude.
    pub fn as_linear_factors(&self) -> LinearFactorsMap {
        let m = self.sign_factor() * alt_sign(self.degree);
        LinearFactorsMap {
            s: Sign::of(m),
            m_tilde: 1.0,
            fixed_points: self.fixed_points(),
            anchor: 0,
        }
    }

    /// Product distance function `D_{n,k} = s^n ∏_{i≠k} (x_i - x_k)`.
    pub fn pdf(&self, k: usize) -> Result<f64> {
        let xk = self.fixed_point(k)?;
        let prod: f64 = self
            .fixed_points()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &xi)| xi - xk)
            .product();
        Ok(self.s.pow(self.degree) * prod)
    }

    /// `g'(x_k) = 1 + D_{n,k}`.
    pub fn multiplier_fixed(&self, k: usize) -> Result<f64> {
        Ok(1.0 + self.pdf(k)?)
    }

    /// Derivative of the product form at an arbitrary point.
    pub fn derivative_at(&self, x: f64) -> f64 {
        let pts = || std::iter::once(0.0).chain(self.nonzero.iter().copied());
        let mut sum = 0.0;
        for j in 0..self.degree {
            let prod: f64 = pts().enumerate().filter(|&(i, _)| i != j).map(|(_, xi)| x - xi).product();
            sum += prod;
        }
        1.0 + self.sign_factor() * sum
    }
}

/// Sends the anchor of `lff` to the origin.
pub fn to_canonical(
    lff: &LinearFactorsMap,
    anchor_index: usize,
) -> Result<(CanonicalMap, ConjugacyTransform)> {
    let n = lff.degree();
    if anchor_index >= n {
        return Err(Error::BadAnchor { index: anchor_index, count: n });
    }
    let ya = lff.fixed_points[anchor_index];
    let root = lff.m_tilde.powf(1.0 / (n - 1) as f64);
    let s = lff.s;
    let nonzero = lff
        .fixed_points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != anchor_index)
        .map(|(_, &yi)| s.value() * root * (yi - ya))
        .collect();
    let t = ConjugacyTransform { scale: s.value() / root, offset: ya };
    Ok((CanonicalMap { degree: n, s, nonzero }, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub max_error: f64,
    pub samples: usize,
}

const CONJUGACY_SEED: u64 = 0x5eed_c0de;

/// Max over seeded samples of `|f(T(x)) - T(g(x))| / (1 + |T(x)|)`.
pub fn verify_conjugacy(
    lff: &LinearFactorsMap,
    c: &CanonicalMap,
    t: &ConjugacyTransform,
    sample_count: usize,
) -> ConjugacyReport {
    let radius = 2.0 + 2.0 * c.nonzero.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(CONJUGACY_SEED);
    let max_error = (0..sample_count)
        .map(|_| {
            let x = rng.gen_range(-radius..=radius);
            let tx = t.apply(x);
            (lff.eval(tx) - t.apply(c.eval(x))).abs() / (1.0 + tx.abs())
        })
        .fold(0.0, f64::max);
    ConjugacyReport { max_error, samples: sample_count }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(lambda: f64) -> GeneralMap {
        GeneralMap::from_coefficients(&Polynomial::new(vec![0.0, lambda, -lambda])).unwrap()
    }

    #[test]
    fn from_coefficients_subtracts_identity() {
        assert_eq!(logistic(4.0).fixed_points_polynomial().coeffs(), &[0.0, 3.0, -4.0]);
        // f = y + y (y - 1)(y + 1)
        let f = Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]);
        let g = GeneralMap::from_coefficients(&f).unwrap();
        assert_eq!(g.fixed_points_polynomial().coeffs(), &[0.0, -1.0, 0.0, 1.0]);
        // harvesting (1 + r) y - r y^2 - b
        let (r, b) = (0.8, 0.1);
        let g = GeneralMap::from_coefficients(&Polynomial::new(vec![-b, 1.0 + r, -r])).unwrap();
        let q = g.fixed_points_polynomial().coeffs();
        assert!((q[0] + b).abs() < 1e-15 && (q[1] - r).abs() < 1e-15 && (q[2] + r).abs() < 1e-15);
    }

    #[test]
    fn affine_is_degenerate() {
        let f = Polynomial::new(vec![1.0, 3.0]);
        assert!(matches!(GeneralMap::from_coefficients(&f), Err(Error::DegenerateMap { .. })));
        // y + y^2 - y^2: quadratic coefficient cancels after trimming
        let f = Polynomial::new(vec![0.0, 2.0, 0.0]);
        assert!(GeneralMap::from_coefficients(&f).is_err());
    }

    #[test]
    fn logistic_linear_factors() {
        let lff = to_linear_factors(&logistic(4.0), RootOptions::default()).unwrap();
        assert_eq!(lff.s, Sign::Plus);
        assert!((lff.m_tilde - 4.0).abs() < 1e-15);
        assert!((lff.fixed_points[0]).abs() < 1e-15);
        assert!((lff.fixed_points[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cubic_linear_factors_and_canonical() {
        let q = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]);
        let g = GeneralMap::from_fixed_points_polynomial(&q).unwrap();
        let lff = to_linear_factors_anchored(&g, RootOptions::default(), AnchorPolicy::Nearest(0.0))
            .unwrap();
        assert_eq!(lff.s, Sign::Plus);
        assert_eq!(lff.m_tilde, 1.0);
        let (c, t) = to_canonical(&lff, lff.anchor).unwrap();
        assert_eq!(c.sign(), Sign::Plus);
        let xs = c.nonzero_fixed_points();
        assert!((xs[0] + 1.0).abs() < 1e-14 && (xs[1] - 1.0).abs() < 1e-14);
        assert!(verify_conjugacy(&lff, &c, &t, 500).max_error <= 1e-9);
    }

    #[test]
    fn complex_fixed_points_rejected() {
        let g = GeneralMap::from_fixed_points_polynomial(&Polynomial::new(vec![1.0, 0.0, 1.0]))
            .unwrap();
        assert_eq!(
            to_linear_factors(&g, RootOptions::default()),
            Err(Error::ComplexFixedPoints { pairs: 1 })
        );
    }

    #[test]
    fn logistic_canonical() {
        let lff = to_linear_factors(&logistic(3.2), RootOptions::default()).unwrap();
        let (c, t) = to_canonical(&lff, 0).unwrap();
        assert!((c.nonzero_fixed_points()[0] - 2.2).abs() < 1e-12);
        assert!(verify_conjugacy(&lff, &c, &t, 1000).max_error <= 1e-9);
        let lff = to_linear_factors(&logistic(3.5), RootOptions::default()).unwrap();
        let (c, t) = to_canonical(&lff, 0).unwrap();
        assert!(verify_conjugacy(&lff, &c, &t, 1000).max_error <= 1e-9);
        assert!(matches!(to_canonical(&lff, 2), Err(Error::BadAnchor { .. })));
    }

    #[test]
    fn harvest_canonical() {
        let (r, b) = (0.8, 0.1);
        let g = GeneralMap::from_coefficients(&Polynomial::new(vec![-b, 1.0 + r, -r])).unwrap();
        let lff = to_linear_factors(&g, RootOptions::default()).unwrap();
        let (c, _) = to_canonical(&lff, lff.anchor).unwrap();
        let want = (r * (r - 4.0 * b)).sqrt();
        assert!((c.nonzero_fixed_points()[0] - want).abs() < 1e-12);
    }

    #[test]
    fn identity_conjugacy_is_exact() {
        let c = CanonicalMap::cubic(Sign::Minus, 0.7, -1.3);
        let rep = verify_conjugacy(&c.as_linear_factors(), &c, &ConjugacyTransform::IDENTITY, 200);
        assert!(rep.max_error < 1e-14);
    }

    #[test]
    fn canonical_eval_fixes_points() {
        let c = CanonicalMap::quadratic(2.2);
        assert_eq!(c.eval(0.0), 0.0);
        assert!((c.eval(2.2) - 2.2).abs() < 1e-15);
        let c = CanonicalMap::quadratic(3.0);
        let s5 = 5f64.sqrt();
        assert!((c.eval((5.0 + s5) / 2.0) - (5.0 - s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn pdf_examples() {
        let lambda = 1.0;
        let c = CanonicalMap::new(Sign::Plus, vec![lambda, -lambda, 2.0 * lambda]).unwrap();
        assert_eq!(c.pdf(0).unwrap(), -2.0);
        assert_eq!(c.pdf(3).unwrap(), -6.0);
        let c = CanonicalMap::quadratic(2.5);
        assert_eq!(c.pdf(0).unwrap(), 2.5);
        assert_eq!(c.pdf(1).unwrap(), -2.5);
        let c = CanonicalMap::cubic(Sign::Plus, 1.0, -1.0);
        assert_eq!(c.pdf(0).unwrap(), -1.0);
        assert!(matches!(c.pdf(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(CanonicalMap::quadratic(1.5).multiplier_fixed(1).unwrap(), -0.5);
        assert_eq!(CanonicalMap::quadratic(0.5).multiplier_fixed(0).unwrap(), 1.5);
        assert_eq!(CanonicalMap::cubic(Sign::Plus, 1.0, -1.0).multiplier_fixed(0).unwrap(), 0.0);
    }

    #[test]
    fn quartic_sign_factor() {
        // g4(x) = x - x (x - x1)(x - x2)(x - x3) for s = +1
        let c = CanonicalMap::new(Sign::Plus, vec![1.0, -1.0, 2.0]).unwrap();
        assert_eq!(c.sign_factor(), -1.0);
        let x = 0.3;
        assert!((c.eval(x) - (x - x * (x - 1.0) * (x + 1.0) * (x - 2.0))).abs() < 1e-15);
    }
}
