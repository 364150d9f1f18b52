//! Orbit iteration, period detection and attracting-cycle refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::CanonicalMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub n_transient: usize,
    pub n_keep: usize,
    pub escape_radius: f64,
    pub rel_tol: f64,
    pub p_max: usize,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams { n_transient: 4096, n_keep: 512, escape_radius: 1e6, rel_tol: 1e-9, p_max: 256 }
    }
}

impl OrbitParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_keep < 2 {
            return Err(Error::Invalid(format!("n_keep must be at least 2, got {}", self.n_keep)));
        }
        if !(self.escape_radius > 0.0) || !(self.rel_tol > 0.0) || self.p_max == 0 {
            return Err(Error::Invalid("escape radius, rel_tol and p_max must be positive".into()));
        }
        Ok(())
    }

    /// Largest period the tail can resolve.
    fn effective_p_max(&self) -> usize {
        self.p_max.min(self.n_keep / 2).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "period")]
pub enum OrbitStatus {
    Converged(usize),
    Aperiodic,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub tail: Vec<f64>,
    pub status: OrbitStatus,
    /// Mean of `ln|g'|` over the tail. Heuristic only.
    pub lyap_proxy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Period {
    Period(usize),
    Aperiodic,
}

/// Smallest `p <= p_max` with `max_i |tail[i+p] - tail[i]| <= rel_tol (1 + max|tail|)`.
pub fn detect_period(tail: &[f64], rel_tol: f64, p_max: usize) -> Result<Period> {
    if p_max == 0 || tail.len() < 2 * p_max {
        return Err(Error::TailTooShort { len: tail.len(), p_max });
    }
    let scale = 1.0 + tail.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = rel_tol * scale;
    for p in 1..=p_max {
        if tail.windows(p + 1).all(|w| (w[p] - w[0]).abs() <= tol) {
            return Ok(Period::Period(p));
        }
    }
    Ok(Period::Aperiodic)
}

fn escaped(x: f64, radius: f64) -> bool {
    !(x.abs() <= radius)
}

pub fn iterate_orbit(c: &CanonicalMap, x0: f64, n_transient: usize, n_keep: usize, escape_radius: f64) -> OrbitResult {
    let params = OrbitParams { n_transient, n_keep, escape_radius, ..OrbitParams::default() };
    iterate_orbit_with(c, x0, &params)
}

pub fn iterate_orbit_with(c: &CanonicalMap, x0: f64, params: &OrbitParams) -> OrbitResult {
    let divergent = |tail| OrbitResult { tail, status: OrbitStatus::Divergent, lyap_proxy: f64::INFINITY };
    let mut x = x0;
    if escaped(x, params.escape_radius) {
        return divergent(Vec::new());
    }
    for _ in 0..params.n_transient {
        x = c.eval(x);
        if escaped(x, params.escape_radius) {
            return divergent(Vec::new());
        }
    }
    let mut tail = Vec::with_capacity(params.n_keep);
    for _ in 0..params.n_keep {
        x = c.eval(x);
        if escaped(x, params.escape_radius) {
            return divergent(tail);
        }
        tail.push(x);
    }
    let lyap_proxy = tail.iter().map(|&t| c.derivative_at(t).abs().ln()).sum::<f64>() / tail.len() as f64;
    let status = match detect_period(&tail, params.rel_tol, params.effective_p_max()) {
        Ok(Period::Period(p)) => OrbitStatus::Converged(p),
        _ => OrbitStatus::Aperiodic,
    };
    OrbitResult { tail, status, lyap_proxy }
}

/// A periodic orbit with its multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub period: usize,
    pub points: Vec<f64>,
    pub multiplier: f64,
}

impl Cycle {
    pub fn is_attracting(&self) -> bool {
        self.multiplier.abs() < 1.0
    }

    /// Same orbit up to rotation, within `tol` relative.
    pub fn same_orbit(&self, other: &Cycle, tol: f64) -> bool {
        let x = self.points[0];
        self.period == other.period && other.points.iter().any(|&y| (x - y).abs() <= tol * (1.0 + x.abs()))
    }
}

fn iterate_n(c: &CanonicalMap, mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = c.eval(x);
    }
    x
}

const CYCLE_TOL: f64 = 1e-9;

fn minimal_period(c: &CanonicalMap, x: f64, q: usize) -> usize {
    let mut y = x;
    for d in 1..q {
        y = c.eval(y);
        if q % d == 0 && (y - x).abs() <= CYCLE_TOL * (1.0 + x.abs()) {
            return d;
        }
    }
    q
}

fn cycle_from(c: &CanonicalMap, x: f64, period: usize) -> Cycle {
    let mut points = Vec::with_capacity(period);
    let mut y = x;
    let mut multiplier = 1.0;
    for _ in 0..period {
        points.push(y);
        multiplier *= c.derivative_at(y);
        y = c.eval(y);
    }
    Cycle { period, points, multiplier }
}

/// Newton's method on `g^q(x) = x` from `x0`. The result is reduced to its
/// minimal period. `None` if Newton fails or wanders off.
pub fn refine_cycle(c: &CanonicalMap, x0: f64, q: usize) -> Option<Cycle> {
    if q == 0 || !x0.is_finite() {
        return None;
    }
    let reach = 0.25 * (1.0 + x0.abs());
    let mut x = x0;
    for _ in 0..80 {
        let (mut y, mut d) = (x, 1.0);
        for _ in 0..q {
            d *= c.derivative_at(y);
            y = c.eval(y);
        }
        let f = y - x;
        let fp = d - 1.0;
        if f == 0.0 || fp == 0.0 || !fp.is_finite() {
            break;
        }
        let step = f / fp;
        x -= step;
        if !x.is_finite() || (x - x0).abs() > reach {
            return None;
        }
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    if (iterate_n(c, x, q) - x).abs() > CYCLE_TOL * (1.0 + x.abs()) {
        return None;
    }
    Some(cycle_from(c, x, minimal_period(c, x, q)))
}

/// Tolerance for the coarse period guess handed to Newton.
const LOOSE_TOL: f64 = 1e-3;

/// The attracting cycle the tail is settling onto, if one can be identified.
///
/// A tail that passes strict detection is refined directly. Otherwise a loose
/// guess of the period is made and each divisor of it is tried by Newton's
/// method, smallest first; the first attracting cycle found wins. This
/// resolves cycles near their own bifurcation, where convergence of the
/// plain orbit is too slow for strict detection.
pub fn attracting_cycle(c: &CanonicalMap, tail: &[f64], params: &OrbitParams) -> Option<Cycle> {
    let p_max = params.effective_p_max();
    let x = *tail.last()?;
    if let Ok(Period::Period(p)) = detect_period(tail, params.rel_tol, p_max) {
        let cycle = refine_cycle(c, x, p).unwrap_or_else(|| cycle_from(c, x, p));
        return Some(cycle);
    }
    let guess = match detect_period(tail, LOOSE_TOL, p_max) {
        Ok(Period::Period(p)) => p,
        _ => return None,
    };
    (1..=guess)
        .filter(|d| guess % d == 0)
        .filter_map(|d| refine_cycle(c, x, d))
        .find(Cycle::is_attracting)
}
