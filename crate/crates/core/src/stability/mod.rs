//! Classification of fixed points and cycles of canonical maps.

pub mod bands;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::CanonicalMap;
use crate::roots::{real_roots, RootOptions};

pub use bands::{band_lookup, BandTable, RegionKind, RegionType, Threshold};

pub const DEFAULT_HYPERBOLICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    Attractor,
    Repellor,
    NonhyperbolicStable,
    NonhyperbolicUnstable,
    /// Nonhyperbolic with multiplier +1, attracting from the right only.
    SemistableRight,
    /// Nonhyperbolic with multiplier +1, attracting from the left only.
    SemistableLeft,
    Indeterminate,
}

impl StabilityKind {
    pub fn is_stable(self) -> bool {
        matches!(self, StabilityKind::Attractor | StabilityKind::NonhyperbolicStable)
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, StabilityKind::Attractor | StabilityKind::Repellor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityClass {
    pub kind: StabilityKind,
    pub multiplier: f64,
    pub pdf_value: Option<f64>,
}

/// Classifies the fixed point `x_k` of `c`.
///
/// Hyperbolic points are decided by `|g'(x_k)|`. At multiplier `+1` the second
/// and third derivatives decide (a nonzero second derivative gives a
/// semistable point, on the side where `g` bends back towards the diagonal);
/// at multiplier `-1` the sign of the Schwarzian decides.
pub fn classify_fixed_point(c: &CanonicalMap, k: usize, tol: f64) -> Result<StabilityClass> {
    let xk = c.fixed_point(k)?;
    let pdf = c.pdf(k)?;
    let multiplier = 1.0 + pdf;
    let class = |kind| StabilityClass { kind, multiplier, pdf_value: Some(pdf) };

    if (multiplier.abs() - 1.0).abs() > tol {
        let kind = if multiplier.abs() < 1.0 { StabilityKind::Attractor } else { StabilityKind::Repellor };
        return Ok(class(kind));
    }

    let g = c.polynomial();
    let scale = g.norm_inf().max(1.0);
    let zero = |v: f64| v.abs() <= tol * scale;
    if multiplier > 0.0 {
        let d2 = g.derivative(2).eval(xk);
        let d3 = g.derivative(3).eval(xk);
        let kind = if !zero(d2) {
            if d2 < 0.0 {
                StabilityKind::SemistableRight
            } else {
                StabilityKind::SemistableLeft
            }
        } else if zero(d3) {
            StabilityKind::Indeterminate
        } else if d3 > 0.0 {
            StabilityKind::NonhyperbolicUnstable
        } else {
            StabilityKind::NonhyperbolicStable
        };
        Ok(class(kind))
    } else {
        let kind = match g.schwarzian(xk).value() {
            Some(s) if zero(s) => StabilityKind::Indeterminate,
            Some(s) if s < 0.0 => StabilityKind::NonhyperbolicStable,
            Some(_) => StabilityKind::NonhyperbolicUnstable,
            None => StabilityKind::Indeterminate,
        };
        Ok(class(kind))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCycle {
    pub points: [f64; 2],
    pub multiplier: f64,
}

/// The unique 2-cycle of the canonical quadratic map `x - x (x - x1)`, real
/// only for `|x1| >= 2`.
pub fn cqm_two_cycle(x1: f64) -> Option<TwoCycle> {
    let disc = x1 * x1 - 4.0;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    let points = [0.5 * (x1 + 2.0 + r), 0.5 * (x1 + 2.0 - r)];
    let c = CanonicalMap::quadratic(x1);
    let multiplier = c.derivative_at(points[0]) * c.derivative_at(points[1]);
    Some(TwoCycle { points, multiplier })
}

pub const DEFAULT_CYCLE_TOL: f64 = 1e-9;

/// Product of `g'` along a closed orbit.
pub fn cycle_multiplier(c: &CanonicalMap, orbit: &[f64], tol: f64) -> Result<f64> {
    if orbit.is_empty() {
        return Err(Error::NotACycle { gap: f64::INFINITY });
    }
    let mut gap = 0.0f64;
    for (i, &x) in orbit.iter().enumerate() {
        let next = orbit[(i + 1) % orbit.len()];
        gap = gap.max((c.eval(x) - next).abs() / (1.0 + next.abs()));
    }
    if !(gap <= tol) {
        return Err(Error::NotACycle { gap });
    }
    Ok(orbit.iter().map(|&x| c.derivative_at(x)).product())
}

/// Distinct real critical points of `g`, ascending.
pub fn critical_points(c: &CanonicalMap) -> Vec<f64> {
    let dg = c.polynomial().derivative(1);
    if dg.degree() == 0 {
        return Vec::new();
    }
    real_roots(&dg, RootOptions::default().tol)
        .map(|rs| rs.real_roots.iter().map(|r| r.value).collect())
        .unwrap_or_default()
}

/// Upper bound on the number of attracting periodic orbits when the
/// Schwarzian is negative away from critical points: the number of real
/// critical points plus two. `None` when a sampled Schwarzian is not negative.
pub fn singer_bound(c: &CanonicalMap) -> Option<usize> {
    const SAMPLES: usize = 512;
    let g = c.polynomial();
    let crit = critical_points(c);
    let fps = c.fixed_points();
    let lo = fps.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = fps.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let exclude = 1e-6 * (1.0 + lo.abs().max(hi.abs()));
    let negative_everywhere = (0..SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64)
        .filter(|x| crit.iter().all(|cp| (x - cp).abs() > exclude))
        .all(|x| g.schwarzian(x).is_negative());
    negative_everywhere.then_some(crit.len() + 2)
}

fn split_power_of_two(mut k: u64) -> (u32, u64) {
    let mut a = 0;
    while k % 2 == 0 {
        k /= 2;
        a += 1;
    }
    (a, k)
}

/// `k ⊳ l` in Sarkovskii's ordering: 3, 5, 7, ..., 2·3, 2·5, ..., 4·3, ...,
/// ..., 8, 4, 2, 1.
pub fn sarkovskii_precedes(k: u64, l: u64) -> bool {
    assert!(k >= 1 && l >= 1, "periods start at 1");
    // (tier, a, odd): odd > 1 ranks first by power of two, then by odd part;
    // pure powers of two come last in descending order
    let key = |n: u64| {
        let (a, m) = split_power_of_two(n);
        if m > 1 {
            (0u8, a as i64, m)
        } else {
            (1u8, -(a as i64), 0)
        }
    };
    key(k) < key(l)
}
