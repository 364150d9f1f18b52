//! Bisection for the band edges `b_k`, Feigenbaum extrapolation.

use serde::{Deserialize, Serialize};

use super::orbit::OrbitParams;
use super::sweep::{attractor_census, seeds_for, SeedPolicy};
use crate::error::{Error, Result};
use crate::family::{family_at, preset, CanonicalFamily};
use crate::stability::BandTable;

pub const FEIGENBAUM_DELTA: f64 = 4.669201609;

/// A one-parameter slice along which one fixed point cascades.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSlice {
    pub family: CanonicalFamily,
    /// Fixed point whose PDF is reported.
    pub point: usize,
    pub seeds: SeedPolicy,
}

impl SearchSlice {
    /// `x1 = -λ` for degree 2, `x1 = λ, x2 = -λ` for degree 3; the zero
    /// point cascades in both.
    pub fn canonical(degree: usize) -> Result<SearchSlice> {
        let family = match degree {
            2 => preset("cqm_slice", None)?,
            3 => preset("ccm_slice", None)?,
            _ => return Err(Error::UnsupportedDegree { degree }),
        };
        Ok(SearchSlice { family, point: 0, seeds: SeedPolicy::Default })
    }

    pub fn degree(&self) -> usize {
        self.family.degree
    }

    /// `|D_{n,point}(λ)|`.
    pub fn pdf_magnitude(&self, lambda: f64) -> Result<f64> {
        Ok(family_at(&self.family, lambda)?.pdf(self.point)?.abs())
    }

    /// Inverse of `pdf_magnitude` on the domain, assuming it increases.
    pub fn lambda_for_pdf(&self, m: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.family.domain;
        let f = |l: f64| self.pdf_magnitude(l).map(|v| v - m);
        if f(lo)? > 0.0 || f(hi)? < 0.0 {
            return Err(Error::BracketInvalid(format!("|pdf| = {m} not reached on the slice domain")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Target half-width in `|pdf|` units.
    pub bisect_tol: f64,
    /// Bisect even where a closed form exists.
    pub force_bisection: bool,
    pub orbit: OrbitParams,
    /// Transient is multiplied by this per level above `growth_from`.
    pub transient_growth: usize,
    pub growth_from: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            bisect_tol: 1e-6,
            force_bisection: false,
            orbit: OrbitParams::default(),
            transient_growth: 4,
            growth_from: 5,
        }
    }
}

impl SearchOptions {
    fn orbit_for(&self, k: usize) -> OrbitParams {
        let levels = k.saturating_sub(self.growth_from) as u32;
        let factor = self.transient_growth.saturating_pow(levels).max(1);
        OrbitParams { n_transient: self.orbit.n_transient.saturating_mul(factor), ..self.orbit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
    /// Geometric extrapolation of computed values.
    Extrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationEstimate {
    pub degree: usize,
    /// Cascade level; 0 for the accumulation point.
    pub k: usize,
    pub value: f64,
    pub half_width: f64,
    pub method: Method,
}

impl BifurcationEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Exactly `2^{k-1}` attracting points and every bounded seed resolved.
    Low,
    High,
}

fn side(slice: &SearchSlice, lambda: f64, k: usize, params: &OrbitParams) -> Result<Side> {
    let c = family_at(&slice.family, lambda)?;
    let census = attractor_census(&c, &seeds_for(&c, &slice.seeds), params);
    let low = census.unresolved == 0 && census.point_count() == 1 << (k - 1);
    Ok(if low { Side::Low } else { Side::High })
}

fn closed_form(degree: usize, k: usize) -> Option<f64> {
    match (degree, k) {
        (2 | 3, 1) => Some(2.0),
        (2, 2) => Some(6f64.sqrt()),
        _ => None,
    }
}

/// Bracket in λ from the built-in table, for the canonical slices.
fn table_bracket(slice: &SearchSlice, k: usize) -> Result<(f64, f64)> {
    let table = BandTable::builtin(slice.degree())?;
    let edges: Vec<f64> =
        table.thresholds.iter().map(|t| t.value).chain(std::iter::once(table.b_inf.value)).collect();
    let v = *edges.get(k - 1).ok_or(Error::BracketInvalid(format!("no tabulated value for k = {k}")))?;
    let below = if k >= 2 { edges[k - 2] } else { 0.0 };
    let above = edges.get(k).copied().unwrap_or(v + (v - below) / FEIGENBAUM_DELTA);
    let lo = v - 0.5 * (v - below);
    let hi = v + 0.5 * (above - v).max((v - below) / (4.0 * FEIGENBAUM_DELTA));
    Ok((slice.lambda_for_pdf(lo)?, slice.lambda_for_pdf(hi)?))
}

/// First `Low -> High` change on an even grid over `[lo, hi]`.
fn scan_bracket(slice: &SearchSlice, k: usize, lo: f64, hi: f64, n: usize, params: &OrbitParams) -> Result<(f64, f64)> {
    let mut prev_low: Option<f64> = None;
    for i in 0..n {
        let l = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        match side(slice, l, k, params) {
            Ok(Side::Low) => prev_low = Some(l),
            Ok(Side::High) => {
                if let Some(a) = prev_low {
                    return Ok((a, l));
                }
            }
            Err(_) => {}
        }
    }
    Err(Error::BracketInvalid(format!("no period {} -> {} transition found on [{lo}, {hi}]", 1usize << (k - 1), 1usize << k)))
}

/// Bisects for the λ at which the attracting period on `slice` doubles from
/// `2^{k-1}` to `2^k`. `bracket` is in λ units. The value is reported as
/// `|pdf|` of the slice point.
pub fn find_bifurcation_value(
    degree: usize,
    slice: &SearchSlice,
    k: usize,
    bracket: Option<(f64, f64)>,
    opts: &SearchOptions,
) -> Result<BifurcationEstimate> {
    if k == 0 {
        return Err(Error::Invalid("cascade level starts at 1".into()));
    }
    if slice.degree() != degree {
        return Err(Error::Invalid(format!("slice has degree {}, asked for {degree}", slice.degree())));
    }
    if !opts.force_bisection {
        if let Some(value) = closed_form(degree, k) {
            return Ok(BifurcationEstimate { degree, k, value, half_width: 0.0, method: Method::ClosedForm });
        }
    }
    let params = opts.orbit_for(k);
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => match table_bracket(slice, k) {
            Ok(b) => b,
            Err(_) => {
                let (a, b) = slice.family.domain;
                scan_bracket(slice, k, a, b, 64, &params)?
            }
        },
    };
    if !(lo < hi) {
        return Err(Error::BracketInvalid(format!("empty bracket [{lo}, {hi}]")));
    }
    if side(slice, lo, k, &params)? != Side::Low {
        return Err(Error::BracketInvalid(format!("period at λ = {lo} is not {}", 1usize << (k - 1))));
    }
    if side(slice, hi, k, &params)? != Side::High {
        return Err(Error::BracketInvalid(format!("period at λ = {hi} is still {}", 1usize << (k - 1))));
    }
    let width = |lo: f64, hi: f64| -> Result<f64> {
        Ok(0.5 * (slice.pdf_magnitude(hi)? - slice.pdf_magnitude(lo)?).abs())
    };
    loop {
        let mid = 0.5 * (lo + hi);
        let floor = mid <= lo || mid >= hi || (hi - lo) <= 4.0 * f64::EPSILON * mid.abs();
        let hw = width(lo, hi)?;
        if hw <= opts.bisect_tol || floor {
            let value = slice.pdf_magnitude(mid)?;
            if hw > opts.bisect_tol {
                return Err(Error::NoiseFloor { value, half_width: hw });
            }
            return Ok(BifurcationEstimate { degree, k, value, half_width: hw, method: Method::Bisection });
        }
        match side(slice, mid, k, &params)? {
            Side::Low => lo = mid,
            Side::High => hi = mid,
        }
    }
}

/// `b_1 .. b_{k_max}` in sequence, bracketing each new value with the
/// Feigenbaum predictor from the two before it.
pub fn compute_band_values(slice: &SearchSlice, k_max: usize, opts: &SearchOptions) -> Result<Vec<BifurcationEstimate>> {
    let degree = slice.degree();
    let mut out: Vec<BifurcationEstimate> = Vec::with_capacity(k_max);
    let mut lambdas: Vec<f64> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let bracket = match lambdas.len() {
            0 => None,
            1 => {
                let a = lambdas[0];
                let (_, b) = slice.family.domain;
                let params = opts.orbit_for(k);
                Some(scan_bracket(slice, k, a + 1e-3 * (b - a), b, 64, &params)?)
            }
            n => {
                let (p, q) = (lambdas[n - 2], lambdas[n - 1]);
                let gap = q - p;
                Some((q + 0.05 * gap, q + 0.6 * gap))
            }
        };
        let bracket = if closed_form(degree, k).is_some() && !opts.force_bisection { None } else { bracket };
        let e = find_bifurcation_value(degree, slice, k, bracket, opts)?;
        lambdas.push(slice.lambda_for_pdf(e.value).unwrap_or(bracket_mid(bracket, e.value)));
        out.push(e);
    }
    Ok(out)
}

fn bracket_mid(bracket: Option<(f64, f64)>, fallback: f64) -> f64 {
    bracket.map(|(a, b)| 0.5 * (a + b)).unwrap_or(fallback)
}

/// `b_cur + (b_cur - b_prev) / δ`.
pub fn feigenbaum_predict(b_prev: f64, b_cur: f64) -> f64 {
    b_cur + (b_cur - b_prev) / FEIGENBAUM_DELTA
}

/// `δ_N = (b_{N+1} - b_N) / (b_{N+2} - b_{N+1})`, with `N` counted from 1.
pub fn feigenbaum_delta(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 3 {
        return Err(Error::Invalid(format!("need at least 3 values, got {}", values.len())));
    }
    values
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let den = w[2] - w[1];
            if den == 0.0 || w[1] == w[0] {
                return Err(Error::DegenerateGap { index: i + 1 });
            }
            Ok((w[1] - w[0]) / den)
        })
        .collect()
}

/// Geometric tail sum from the last two estimates.
pub fn extrapolate(estimates: &[BifurcationEstimate]) -> Result<BifurcationEstimate> {
    let n = estimates.len();
    if n < 3 {
        return Err(Error::Invalid("extrapolation needs at least 3 values".into()));
    }
    let (a, b, c) = (estimates[n - 3], estimates[n - 2], estimates[n - 1]);
    let gap = c.value - b.value;
    if gap == 0.0 || b.value == a.value {
        return Err(Error::DegenerateGap { index: n - 1 });
    }
    let value = c.value + gap / (FEIGENBAUM_DELTA - 1.0);
    // how far the observed ratio is from δ bounds the error of the tail sum
    let observed = (b.value - a.value) / gap;
    let tail_err = (gap / (observed - 1.0) - gap / (FEIGENBAUM_DELTA - 1.0)).abs();
    let half_width = tail_err + c.half_width + b.half_width;
    Ok(BifurcationEstimate { degree: c.degree, k: 0, value, half_width, method: Method::Extrapolation })
}

pub fn estimate_b_infinity(
    degree: usize,
    slice: &SearchSlice,
    k_max: usize,
    opts: &SearchOptions,
) -> Result<BifurcationEstimate> {
    if slice.degree() != degree {
        return Err(Error::Invalid(format!("slice has degree {}, asked for {degree}", slice.degree())));
    }
    extrapolate(&compute_band_values(slice, k_max, opts)?)
}
