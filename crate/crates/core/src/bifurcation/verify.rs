//! Numeric check of the period-doubling hypotheses at a fixed point.

use serde::{Deserialize, Serialize};

use crate::family::{family_at, CanonicalFamily};
use crate::forms::CanonicalMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "condition")]
pub enum PeriodDoublingCheck {
    Verified,
    /// 1: the fixed point does not persist; 2: multiplier is not -1;
    /// 3: `(g²)'` does not move with λ.
    FailedCondition(u8),
}

pub const MULTIPLIER_TOL: f64 = 1e-6;
pub const TRANSVERSALITY_TOL: f64 = 1e-6;

/// `(g∘g)'` at fixed point `k`, which is the squared multiplier.
fn second_iterate_slope(c: &CanonicalMap, k: usize) -> Option<f64> {
    let x = c.fixed_point(k).ok()?;
    Some(c.derivative_at(x) * c.derivative_at(c.eval(x)))
}

pub fn verify_period_doubling(fam: &CanonicalFamily, k_fp: usize, lambda0: f64, fd_step: f64) -> PeriodDoublingCheck {
    let at = |l: f64| family_at(fam, l).ok().filter(|c| c.fixed_point(k_fp).is_ok());
    let (Some(lo), Some(mid), Some(hi)) = (at(lambda0 - fd_step), at(lambda0), at(lambda0 + fd_step)) else {
        return PeriodDoublingCheck::FailedCondition(1);
    };
    let Ok(m) = mid.multiplier_fixed(k_fp) else {
        return PeriodDoublingCheck::FailedCondition(1);
    };
    if (m + 1.0).abs() > MULTIPLIER_TOL {
        return PeriodDoublingCheck::FailedCondition(2);
    }
    let (Some(a), Some(b)) = (second_iterate_slope(&lo, k_fp), second_iterate_slope(&hi, k_fp)) else {
        return PeriodDoublingCheck::FailedCondition(1);
    };
    let slope = (b - a) / (2.0 * fd_step);
    if !(slope.abs() > TRANSVERSALITY_TOL) {
        return PeriodDoublingCheck::FailedCondition(3);
    }
    PeriodDoublingCheck::Verified
}
