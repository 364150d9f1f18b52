//! One-parameter families of canonical maps.

pub mod expr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{to_canonical, to_linear_factors_anchored, AnchorPolicy, CanonicalMap, GeneralMap, LinearFactorsMap, Sign};
use crate::poly::Polynomial;
use crate::roots::RootOptions;
use crate::stability::{band_lookup, BandTable, RegionType};

pub use expr::{parse_param_expr, ParamExpr, Poison};

/// Sign of the amplitude `M` along the family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySign {
    Constant(Sign),
    /// Sign of `M(λ)` at each λ.
    FromExpr(ParamExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    /// `x_1(λ) .. x_{n-1}(λ)` of the canonical map directly.
    Canonical { sign: FamilySign, x_exprs: Vec<ParamExpr> },
    /// Coefficients of `f(y)`, ascending, reduced through the forms at each λ.
    General { coeffs: Vec<ParamExpr>, anchor: AnchorPolicy },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFamily {
    pub name: Option<String>,
    pub degree: usize,
    pub source: FamilySource,
    /// Closed interval of admissible λ.
    pub domain: (f64, f64),
}

fn parse_all(exprs: &[&str]) -> Result<Vec<ParamExpr>> {
    exprs.iter().map(|s| parse_param_expr(s)).collect()
}

fn poison(lambda: f64, index: usize, p: Poison) -> Error {
    Error::PoisonedExpression { lambda, index, reason: p.0 }
}

impl CanonicalFamily {
    pub fn canonical(sign: Sign, x_exprs: Vec<ParamExpr>, domain: (f64, f64)) -> Result<Self> {
        let fam = CanonicalFamily {
            name: None,
            degree: x_exprs.len() + 1,
            source: FamilySource::Canonical { sign: FamilySign::Constant(sign), x_exprs },
            domain,
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Shorthand taking expression strings.
    pub fn from_strs(sign: Sign, x_exprs: &[&str], domain: (f64, f64)) -> Result<Self> {
        Self::canonical(sign, parse_all(x_exprs)?, domain)
    }

    /// Family of general maps `f(y) = sum coeffs[i](λ) y^i`.
    pub fn general(coeffs: Vec<ParamExpr>, anchor: AnchorPolicy, domain: (f64, f64)) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::DegenerateMap { degree: coeffs.len().saturating_sub(1) });
        }
        let fam = CanonicalFamily {
            name: None,
            degree: coeffs.len() - 1,
            source: FamilySource::General { coeffs, anchor },
            domain,
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Invalid(format!("bad domain [{lo}, {hi}]")));
        }
        if self.degree < 2 {
            return Err(Error::DegenerateMap { degree: self.degree });
        }
        Ok(())
    }

    pub fn contains(&self, lambda: f64) -> bool {
        let (lo, hi) = self.domain;
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        lambda >= lo - slack && lambda <= hi + slack
    }

    /// The canonical map at `lambda`.
    pub fn at(&self, lambda: f64) -> Result<CanonicalMap> {
        family_at(self, lambda)
    }
}

pub fn family_at(fam: &CanonicalFamily, lambda: f64) -> Result<CanonicalMap> {
    if !fam.contains(lambda) {
        return Err(Error::Invalid(format!(
            "lambda = {lambda} outside domain [{}, {}]",
            fam.domain.0, fam.domain.1
        )));
    }
    match &fam.source {
        FamilySource::Canonical { sign, x_exprs } => {
            let s = match sign {
                FamilySign::Constant(s) => *s,
                FamilySign::FromExpr(m) => {
                    let m = m.eval(lambda).map_err(|p| poison(lambda, x_exprs.len(), p))?;
                    if m == 0.0 {
                        return Err(Error::DegenerateMap { degree: 1 });
                    }
                    Sign::of(m)
                }
            };
            let xs = x_exprs
                .iter()
                .enumerate()
                .map(|(i, e)| e.eval(lambda).map_err(|p| poison(lambda, i + 1, p)))
                .collect::<Result<Vec<_>>>()?;
            CanonicalMap::new(s, xs)
        }
        FamilySource::General { .. } => {
            let lff = general_at(fam, lambda)?.expect("general source");
            Ok(to_canonical(&lff, lff.anchor)?.0)
        }
    }
}

/// The factored original map at `lambda` for families given by
/// coefficients; `None` for families given in canonical form.
pub fn general_at(fam: &CanonicalFamily, lambda: f64) -> Result<Option<LinearFactorsMap>> {
    let FamilySource::General { coeffs, anchor } = &fam.source else {
        return Ok(None);
    };
    let c = coeffs
        .iter()
        .enumerate()
        .map(|(i, e)| e.eval(lambda).map_err(|p| poison(lambda, i, p)))
        .collect::<Result<Vec<_>>>()?;
    let g = GeneralMap::from_coefficients(&Polynomial::new(c))?;
    if g.degree() != fam.degree {
        return Err(Error::DegenerateMap { degree: g.degree() });
    }
    Ok(Some(to_linear_factors_anchored(&g, RootOptions::default(), *anchor)?))
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub value: f64,
}

/// A grid point that was dropped, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoisonPoint {
    pub lambda: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub poisoned: Vec<PoisonPoint>,
}

fn check_index(fam: &CanonicalFamily, k: usize) -> Result<()> {
    if k >= fam.degree {
        return Err(Error::IndexOutOfRange { index: k, len: fam.degree });
    }
    Ok(())
}

fn curve(fam: &CanonicalFamily, k: usize, grid: &[f64], f: impl Fn(&CanonicalMap) -> Result<f64> + Sync) -> Result<Curve> {
    check_index(fam, k)?;
    let vals: Vec<Result<f64>> = grid.par_iter().map(|&l| family_at(fam, l).and_then(|c| f(&c))).collect();
    let mut out = Curve::default();
    for (&lambda, v) in grid.iter().zip(vals) {
        match v {
            Ok(value) => out.points.push(CurvePoint { lambda, value }),
            Err(e) => out.poisoned.push(PoisonPoint { lambda, reason: e.to_string() }),
        }
    }
    Ok(out)
}

/// Multiplier `φ_k(λ)` of fixed point `k` over the grid.
pub fn eigenvalue_curve(fam: &CanonicalFamily, k: usize, grid: &[f64]) -> Result<Curve> {
    curve(fam, k, grid, |c| c.multiplier_fixed(k))
}

/// `D_{n,k}(λ)` over the grid.
pub fn pdf_curve(fam: &CanonicalFamily, k: usize, grid: &[f64]) -> Result<Curve> {
    curve(fam, k, grid, |c| c.pdf(k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionProfile {
    pub grid: Vec<f64>,
    pub types: Vec<RegionType>,
    pub poisoned: Vec<PoisonPoint>,
}

impl RegionProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,region,near_boundary,beyond_table\n");
        for (l, t) in self.grid.iter().zip(&self.types) {
            s.push_str(&format!("{l:.17e},{},{},{}\n", t.kind, t.near_boundary, t.beyond_table));
        }
        s
    }
}

pub fn region_profile(fam: &CanonicalFamily, k: usize, grid: &[f64], table: &BandTable) -> Result<RegionProfile> {
    if table.degree != fam.degree {
        return Err(Error::UnsupportedDegree { degree: fam.degree });
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("grid must be strictly increasing".into()));
    }
    let pdf = pdf_curve(fam, k, grid)?;
    let types = pdf
        .points
        .iter()
        .map(|p| band_lookup(table, p.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionProfile { grid: pdf.points.iter().map(|p| p.lambda).collect(), types, poisoned: pdf.poisoned })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalClass {
    Regular,
    Reversal,
    RegularReversal,
    ReversalRegular,
    Constant,
    Mixed,
}

impl std::fmt::Display for IntervalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IntervalClass::Regular => "regular",
            IntervalClass::Reversal => "reversal",
            IntervalClass::RegularReversal => "regular-reversal",
            IntervalClass::ReversalRegular => "reversal-regular",
            IntervalClass::Constant => "constant",
            IntervalClass::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Classifies the sequence of region types. An empty profile is `Constant`.
pub fn classify_interval(profile: &RegionProfile) -> IntervalClass {
    let ranks: Vec<usize> = profile.types.iter().map(|t| t.kind.rank()).collect();
    // direction of each change, consecutive repeats merged
    let mut runs: Vec<bool> = Vec::new();
    for w in ranks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let up = w[1] > w[0];
        if runs.last() != Some(&up) {
            runs.push(up);
        }
    }
    match runs.as_slice() {
        [] => IntervalClass::Constant,
        [true] => IntervalClass::Regular,
        [false] => IntervalClass::Reversal,
        [true, false] => IntervalClass::RegularReversal,
        [false, true] => IntervalClass::ReversalRegular,
        _ => IntervalClass::Mixed,
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "logistic",
    "harvest",
    "bmap",
    "ccm_exp",
    "quartic_demo",
    "cqm_quadratic",
    "cqm_linear",
    "cqm_slice",
    "ccm_linear",
    "ccm_slice",
];

/// Named families. `harvest` takes `r` and `bmap` takes the expression `b(λ)`
/// as `arg`; the others ignore it.
pub fn preset(name: &str, arg: Option<&str>) -> Result<CanonicalFamily> {
    let fam = match name {
        "logistic" => CanonicalFamily::from_strs(Sign::Plus, &["lambda-1"], (0.0, 4.0))?,
        "harvest" => {
            let r_text = arg.ok_or_else(|| Error::Invalid("harvest needs r".into()))?;
            let r: f64 = r_text
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("harvest: r must be a number, got '{r_text}'")))?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Invalid(format!("harvest: r must be positive, got {r}")));
            }
            let x1 = format!("sqrt({r:?}*({r:?}-4*lambda))");
            CanonicalFamily::from_strs(Sign::Plus, &[&x1], (0.0, r / 4.0))?
        }
        "bmap" => {
            let b = parse_param_expr(arg.ok_or_else(|| Error::Invalid("bmap needs b(lambda)".into()))?)?;
            CanonicalFamily::general(
                vec![ParamExpr::Num(0.0), -b, ParamExpr::Num(1.0)],
                AnchorPolicy::Nearest(0.0),
                (-10.0, 10.0),
            )?
        }
        "ccm_exp" => {
            CanonicalFamily::from_strs(Sign::Plus, &["1.817-exp(-lambda)", "-(1.817-exp(-lambda))"], (0.0, 20.0))?
        }
        "quartic_demo" => CanonicalFamily::from_strs(Sign::Plus, &["lambda", "-lambda", "2*lambda"], (0.0, 2.0))?,
        "cqm_quadratic" => CanonicalFamily::from_strs(Sign::Plus, &["lambda*(3-lambda)"], (0.0, 3.0))?,
        "cqm_linear" => CanonicalFamily::from_strs(Sign::Plus, &["lambda"], (-4.0, 4.0))?,
        "cqm_slice" => CanonicalFamily::from_strs(Sign::Plus, &["-lambda"], (0.0, 4.0))?,
        "ccm_linear" => CanonicalFamily::from_strs(Sign::Plus, &["-lambda", "lambda"], (0.0, 2.0))?,
        "ccm_slice" => CanonicalFamily::from_strs(Sign::Plus, &["lambda", "-lambda"], (0.0, 2.0))?,
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(fam.named(name))
}

/// On-disk family description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub degree: usize,
    pub s: i8,
    pub fixed_points: Vec<String>,
    pub domain: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl FamilySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<CanonicalFamily> {
        let s = Sign::try_from(self.s).map_err(Error::Invalid)?;
        if self.fixed_points.len() + 1 != self.degree {
            return Err(Error::Invalid(format!(
                "degree {} needs {} fixed point expressions, got {}",
                self.degree,
                self.degree.saturating_sub(1),
                self.fixed_points.len()
            )));
        }
        let exprs: Vec<&str> = self.fixed_points.iter().map(String::as_str).collect();
        let mut fam = CanonicalFamily::from_strs(s, &exprs, (self.domain[0], self.domain[1]))?;
        fam.name = self.name.clone();
        Ok(fam)
    }

    /// Spec for a family with constant sign and canonical expressions.
    pub fn of(fam: &CanonicalFamily) -> Option<FamilySpec> {
        match &fam.source {
            FamilySource::Canonical { sign: FamilySign::Constant(s), x_exprs } => Some(FamilySpec {
                degree: fam.degree,
                s: (*s).into(),
                fixed_points: x_exprs.iter().map(|e| e.to_string()).collect(),
                domain: [fam.domain.0, fam.domain.1],
                name: fam.name.clone(),
            }),
            _ => None,
        }
    }
}

pub fn load_family(path: &std::path::Path) -> Result<CanonicalFamily> {
    FamilySpec::from_json(&std::fs::read_to_string(path)?)?.build()
}
