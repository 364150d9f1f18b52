//! Stability bands: intervals of PDF values with a constant attracting period.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUILTIN_JSON: &str = include_str!("../../data/band_tables.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub k: usize,
    pub value: f64,
    pub uncertainty: f64,
    /// Closed form, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub degree: usize,
    pub provenance: String,
    /// `b_1 < b_2 < ...`.
    pub thresholds: Vec<Threshold>,
    pub b_inf: Threshold,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BandFile {
    version: u32,
    tables: Vec<BandTable>,
}

fn builtin_tables() -> &'static [BandTable] {
    static TABLES: OnceLock<Vec<BandTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let file: BandFile = serde_json::from_str(BUILTIN_JSON).expect("built-in band tables parse");
        assert_eq!(file.version, 1);
        for t in &file.tables {
            t.validate().expect("built-in band table is consistent");
        }
        file.tables
    })
}

impl BandTable {
    /// Built-in table for degree 2 or 3.
    pub fn builtin(degree: usize) -> Result<&'static BandTable> {
        builtin_tables()
            .iter()
            .find(|t| t.degree == degree)
            .ok_or(Error::UnsupportedDegree { degree })
    }

    /// Table assembled from computed values (e.g. for degree >= 4).
    pub fn from_values(degree: usize, values: &[(f64, f64)], b_inf: (f64, f64)) -> Result<Self> {
        let t = BandTable {
            degree,
            provenance: "computed".into(),
            thresholds: values
                .iter()
                .enumerate()
                .map(|(i, &(value, uncertainty))| Threshold { k: i + 1, value, uncertainty, exact: None })
                .collect(),
            b_inf: Threshold { k: 0, value: b_inf.0, uncertainty: b_inf.1, exact: None },
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::Invalid("band table has no thresholds".into()));
        }
        let mut prev = 0.0;
        for t in self.thresholds.iter().chain(std::iter::once(&self.b_inf)) {
            if !(t.value > prev) || t.uncertainty < 0.0 {
                return Err(Error::Invalid(format!("band thresholds not increasing at {}", t.value)));
            }
            prev = t.value;
        }
        Ok(())
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.thresholds.iter().find(|t| t.k == k).map(|t| t.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("band table serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum RegionKind {
    Outside,
    Type(usize),
    Infinity,
}

impl RegionKind {
    /// Ordering used for regular/reversal classification.
    pub fn rank(self) -> usize {
        match self {
            RegionKind::Outside => 0,
            RegionKind::Type(k) => k,
            RegionKind::Infinity => usize::MAX,
        }
    }
}

impl std::fmt::Display for RegionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionKind::Outside => write!(f, "outside"),
            RegionKind::Type(k) => write!(f, "{k}"),
            RegionKind::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionType {
    pub kind: RegionKind,
    /// Within a tabulated uncertainty of a band edge; the lower type is reported.
    pub near_boundary: bool,
    /// Past the last tabulated value but before `b_inf`; the type is a lower bound.
    pub beyond_table: bool,
}

pub fn band_lookup(table: &BandTable, pdf_value: f64) -> Result<RegionType> {
    if !pdf_value.is_finite() {
        return Err(Error::Invalid(format!("pdf value must be finite, got {pdf_value}")));
    }
    let plain = |kind| RegionType { kind, near_boundary: false, beyond_table: false };
    if pdf_value >= 0.0 {
        return Ok(plain(RegionKind::Outside));
    }
    let m = -pdf_value;
    let edges: Vec<&Threshold> = table.thresholds.iter().chain(std::iter::once(&table.b_inf)).collect();
    // index of the first edge strictly above m; that is the band number
    let band = edges.iter().position(|t| m < t.value).unwrap_or(edges.len());
    let kind_of = |band: usize| {
        if band >= edges.len() {
            RegionKind::Infinity
        } else {
            RegionKind::Type(band + 1)
        }
    };
    let mut kind = kind_of(band);
    let mut near_boundary = false;
    // the band's lower edge: being within its uncertainty means we may not
    // have crossed it yet
    if band > 0 {
        let lower = edges[band - 1];
        if (m - lower.value).abs() < lower.uncertainty {
            kind = kind_of(band - 1);
            near_boundary = true;
        }
    }
    if band < edges.len() && (edges[band].value - m).abs() < edges[band].uncertainty {
        near_boundary = true;
    }
    let beyond_table = band == table.thresholds.len() && !near_boundary;
    Ok(RegionType { kind, near_boundary, beyond_table })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables_load() {
        let q = BandTable::builtin(2).unwrap();
        assert_eq!(q.thresholds[0].value, 2.0);
        assert_eq!(q.thresholds[1].value, 6f64.sqrt());
        let c = BandTable::builtin(3).unwrap();
        assert_eq!(c.thresholds[0].value, 2.0);
        assert_eq!(c.b_inf.value, 3.30228);
        assert!(matches!(BandTable::builtin(4), Err(Error::UnsupportedDegree { degree: 4 })));
    }

    #[test]
    fn lookup_examples() {
        let q = BandTable::builtin(2).unwrap();
        assert_eq!(band_lookup(q, -1.0).unwrap().kind, RegionKind::Type(1));
        assert_eq!(band_lookup(q, -2.3).unwrap().kind, RegionKind::Type(2));
        assert_eq!(band_lookup(q, 0.5).unwrap().kind, RegionKind::Outside);
        assert_eq!(band_lookup(q, 0.0).unwrap().kind, RegionKind::Outside);
        assert_eq!(band_lookup(q, -2.0).unwrap().kind, RegionKind::Type(2));
        assert_eq!(band_lookup(q, -3.0).unwrap().kind, RegionKind::Infinity);
        let c = BandTable::builtin(3).unwrap();
        assert_eq!(band_lookup(c, -3.1).unwrap().kind, RegionKind::Type(3));
    }

    #[test]
    fn lookup_near_boundary_reports_lower_type() {
        let q = BandTable::builtin(2).unwrap();
        let r = band_lookup(q, -2.5443).unwrap();
        assert_eq!(r.kind, RegionKind::Type(3));
        assert!(r.near_boundary);
        let r = band_lookup(q, -2.5437).unwrap();
        assert_eq!(r.kind, RegionKind::Type(3));
        assert!(r.near_boundary);
        let r = band_lookup(q, -2.5300).unwrap();
        assert!(!r.near_boundary);
    }

    #[test]
    fn lookup_beyond_table() {
        let q = BandTable::builtin(2).unwrap();
        let r = band_lookup(q, -2.56992).unwrap();
        assert_eq!(r.kind, RegionKind::Type(8));
        assert!(r.beyond_table);
    }

    #[test]
    fn rejects_non_monotone_tables() {
        assert!(BandTable::from_values(4, &[(2.0, 0.0), (1.5, 0.0)], (3.0, 0.0)).is_err());
        assert!(BandTable::from_values(4, &[(2.0, 0.0), (2.5, 0.0)], (3.0, 0.0)).is_ok());
    }
}
