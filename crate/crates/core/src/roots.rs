//! Real roots of real polynomials, with multiplicities.
//!
//! Degrees 1 and 2 use closed forms, degree 3 uses the Cardano/trigonometric
//! formulas driven by the discriminant `D = Q^3 + R^2`, and higher degrees use
//! simultaneous Aberth–Ehrlich iteration followed by a Newton polish.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Tolerances for [`real_roots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Relative tolerance used for snapping near-real roots to the real axis.
    pub tol: f64,
    /// Roots closer than `cluster_rel * (1 + max |root|)` are merged.
    pub cluster_rel: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: 1e-10, cluster_rel: 1e-7, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Sorted ascending.
    pub real_roots: Vec<RealRoot>,
    pub complex_pair_count: usize,
    /// Max `|p(r)|` over the reported real roots.
    pub residual: f64,
}

impl RootSet {
    /// Real roots with each value repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.real_roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }

    pub fn real_count(&self) -> usize {
        self.real_roots.iter().map(|r| r.multiplicity).sum()
    }
}

pub fn real_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    real_roots_with(p, RootOptions { tol, ..RootOptions::default() })
}

pub fn real_roots_with(p: &Polynomial, opts: RootOptions) -> Result<RootSet> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Err(Error::Invalid("root finding needs degree >= 1".into()));
    }
    let c = p.coeffs();
    let all = match n {
        1 => vec![Complex64::new(-c[0] / c[1], 0.0)],
        2 => quadratic(c[2], c[1], c[0]),
        3 => cubic(c[3], c[2], c[1], c[0]),
        _ => aberth(p, opts.max_iter)?,
    };
    Ok(collect_real(p, all, opts))
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + sq.copysign(b));
        if q == 0.0 {
            vec![Complex64::new(0.0, 0.0); 2]
        } else {
            vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
        }
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn cubic(d: f64, c: f64, b: f64, a: f64) -> Vec<Complex64> {
    // monic form y^3 + g y^2 + be y + al
    let (g, be, al) = (c / d, b / d, a / d);
    let q = (3.0 * be - g * g) / 9.0;
    let r = (9.0 * be * g - 27.0 * al - 2.0 * g * g * g) / 54.0;
    let disc = q * q * q + r * r;
    let shift = g / 3.0;
    let mut roots = if disc < 0.0 {
        // three distinct real roots; q < 0 here
        let cos_theta = (r / (-q * q * q).sqrt()).clamp(-1.0, 1.0);
        let theta = cos_theta.acos();
        let m = 2.0 * (-q).sqrt();
        (0..3)
            .map(|j| {
                let ang = (theta + 2.0 * std::f64::consts::PI * j as f64) / 3.0;
                Complex64::new(m * ang.cos() - shift, 0.0)
            })
            .collect::<Vec<_>>()
    } else {
        let sd = disc.sqrt();
        let s = (r + sd).cbrt();
        let t = (r - sd).cbrt();
        let re = -0.5 * (s + t) - shift;
        let im = 0.5 * 3f64.sqrt() * (s - t);
        vec![
            Complex64::new(s + t - shift, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    };
    let poly = Polynomial::new(vec![a, b, c, d]);
    for z in roots.iter_mut().filter(|z| z.im == 0.0) {
        z.re = newton_polish(&poly, z.re);
    }
    roots
}

/// One or two Newton steps, kept only when they reduce the residual.
fn newton_polish(p: &Polynomial, x: f64) -> f64 {
    let dp = p.derivative(1);
    let mut best = x;
    let mut best_res = p.eval(x).abs();
    let mut cur = x;
    for _ in 0..2 {
        let d = dp.eval(cur);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = cur - p.eval(cur) / d;
        let res = p.eval(next).abs();
        if !(res < best_res) {
            break;
        }
        best = next;
        best_res = res;
        cur = next;
    }
    best
}

fn horner_complex(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(p: &Polynomial, max_iter: usize) -> Result<Vec<Complex64>> {
    let c = p.coeffs();
    let n = p.degree();
    let lead = p.leading();
    // radius from the Fujiwara-style bound, centred on the root centroid
    let centre = -c[n - 1] / (n as f64 * lead);
    let radius = (0..n)
        .map(|i| (c[i] / lead).abs().powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, ang)
        })
        .collect();

    let mut converged = false;
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (pv, dpv) = horner_complex(c, z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let w = pv / dpv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * sum);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step <= 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }

    let norm = p.norm_inf();
    let bound = |r: Complex64| 1e-6 * norm * (1.0 + r.norm()).powi(n as i32);
    let residual = z.iter().map(|&r| horner_complex(c, r).0.norm()).fold(0.0, f64::max);
    if !converged && z.iter().any(|&r| horner_complex(c, r).0.norm() > bound(r)) {
        return Err(Error::NonConvergence { residual });
    }
    for r in z.iter_mut() {
        if r.im == 0.0 {
            r.re = newton_polish(p, r.re);
        }
    }
    Ok(z)
}

fn collect_real(p: &Polynomial, all: Vec<Complex64>, opts: RootOptions) -> RootSet {
    let scale = 1.0 + all.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cluster_tol = opts.cluster_rel * scale;
    let mut reals = Vec::new();
    let mut nonreal = 0usize;
    for z in &all {
        // A conjugate pair closer together than the cluster width is a
        // perturbed double real root.
        if z.im.abs() <= opts.tol * (1.0 + z.re.abs()) || 2.0 * z.im.abs() <= cluster_tol {
            reals.push(z.re);
        } else {
            nonreal += 1;
        }
    }
    reals.sort_by(|a, b| a.total_cmp(b));

    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in reals {
        match groups.last_mut() {
            Some(g) if r - g[g.len() - 1] <= cluster_tol => g.push(r),
            _ => groups.push(vec![r]),
        }
    }
    let real_roots: Vec<RealRoot> = groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let value = if g.len() == 1 { newton_polish(p, mean) } else { mean };
            RealRoot { value, multiplicity: g.len() }
        })
        .collect();
    let residual = real_roots.iter().map(|r| p.eval(r.value).abs()).fold(0.0, f64::max);
    RootSet { real_roots, complex_pair_count: nonreal / 2, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(rs: &RootSet) -> Vec<f64> {
        rs.real_roots.iter().map(|r| r.value).collect()
    }

    /// Sign-change bisection on a fine grid, independent of the closed forms.
    fn bisection_oracle(p: &Polynomial, lo: f64, hi: f64, cells: usize) -> Vec<f64> {
        let h = (hi - lo) / cells as f64;
        let mut out = Vec::new();
        for i in 0..cells {
            let (mut a, mut b) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
            if p.eval(a).signum() == p.eval(b).signum() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if p.eval(a).signum() == p.eval(m).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    #[test]
    fn factored_cubic() {
        let rs = real_roots(&Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]), 1e-10).unwrap();
        assert_eq!(rs.real_roots.len(), 3);
        for (got, want) in values(&rs).iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(rs.real_roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn golden_quadratic() {
        let rs = real_roots(&Polynomial::new(vec![-1.0, -1.0, 1.0]), 1e-10).unwrap();
        let s5 = 5f64.sqrt();
        let v = values(&rs);
        assert!((v[0] - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!((v[1] - (1.0 + s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn trigonometric_branch_matches_bisection() {
        let p = Polynomial::new(vec![1.0, -3.0, 0.0, 1.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        let oracle = bisection_oracle(&p, -3.0, 3.0, 600);
        assert_eq!(oracle.len(), 3);
        for (got, want) in values(&rs).iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        for (got, want) in values(&rs).iter().zip([-1.8794, 0.3473, 1.5321]) {
            assert!((got - want).abs() < 1e-4);
        }
    }

    #[test]
    fn complex_pairs_counted() {
        let rs = real_roots(&Polynomial::new(vec![1.0, 0.0, 1.0]), 1e-10).unwrap();
        assert!(rs.real_roots.is_empty());
        assert_eq!(rs.complex_pair_count, 1);
        // (y - 2)(y^2 + 1)
        let p = Polynomial::new(vec![-2.0, 1.0, -2.0, 1.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.complex_pair_count, 1);
        assert!((values(&rs)[0] - 2.0).abs() < 1e-13);
        // quartic with two complex pairs
        let p = &Polynomial::new(vec![1.0, 0.0, 1.0]) * &Polynomial::new(vec![4.0, 0.0, 1.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.complex_pair_count, 2);
    }

    #[test]
    fn multiplicities() {
        let p = Polynomial::from_roots(1.0, &[1.0, 1.0, -2.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.real_roots.len(), 2);
        assert_eq!(rs.real_roots[1].multiplicity, 2);
        let p = Polynomial::new(vec![0.0, 0.0, 0.0, 2.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.real_roots, vec![RealRoot { value: 0.0, multiplicity: 3 }]);
        let p = Polynomial::from_roots(-1.0, &[0.5, 0.5, 3.0, -1.0, 2.0]);
        let rs = real_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.real_count(), 5);
        assert_eq!(rs.real_roots.len(), 4);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(real_roots(&Polynomial::constant(3.0), 1e-10).is_err());
    }

    #[test]
    fn sextic_roots() {
        let want = [-2.5, -1.0, 0.0, 0.3, 1.7, 4.0];
        let p = Polynomial::from_roots(0.7, &want);
        let rs = real_roots(&p, 1e-10).unwrap();
        for (got, w) in values(&rs).iter().zip(want) {
            assert!((got - w).abs() < 1e-10, "{got} vs {w}");
        }
    }
}
