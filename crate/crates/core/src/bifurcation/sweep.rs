//! Bifurcation-diagram sweeps over a family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orbit::{attracting_cycle, iterate_orbit_with, Cycle, OrbitParams, OrbitStatus};
use crate::error::{Error, Result};
use crate::family::{family_at, CanonicalFamily};
use crate::forms::CanonicalMap;
use crate::stability::critical_points;

/// Offset applied on each side of every fixed point.
pub const FIXED_POINT_NUDGE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Critical points, 0.9, -0.01 and both sides of every fixed point.
    #[default]
    Default,
    /// Both sides of one fixed point only.
    Branch(usize),
    Explicit(Vec<f64>),
}

pub fn seeds_for(c: &CanonicalMap, policy: &SeedPolicy) -> Vec<f64> {
    let mut seeds = match policy {
        SeedPolicy::Default => {
            let mut s = critical_points(c);
            s.extend([0.9, -0.01]);
            for x in c.fixed_points() {
                s.extend([x - FIXED_POINT_NUDGE, x + FIXED_POINT_NUDGE]);
            }
            s
        }
        SeedPolicy::Branch(k) => match c.fixed_point(*k) {
            Ok(x) => vec![x - FIXED_POINT_NUDGE, x + FIXED_POINT_NUDGE],
            Err(_) => Vec::new(),
        },
        SeedPolicy::Explicit(v) => v.clone(),
    };
    let mut seen = Vec::with_capacity(seeds.len());
    seeds.retain(|x| {
        let fresh = !seen.contains(&x.to_bits());
        seen.push(x.to_bits());
        fresh
    });
    seeds
}

/// Attracting cycles reached from a set of seeds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Census {
    pub cycles: Vec<Cycle>,
    pub divergent: usize,
    /// Seeds whose orbit stayed bounded without settling on an identified cycle.
    pub unresolved: usize,
}

impl Census {
    /// Total number of attracting periodic points.
    pub fn point_count(&self) -> usize {
        self.cycles.iter().map(|c| c.period).sum()
    }

    pub fn periods(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.cycles.iter().map(|c| c.period).collect();
        p.sort_unstable();
        p
    }
}

const SAME_ORBIT_TOL: f64 = 1e-6;

fn add_cycle(cycles: &mut Vec<Cycle>, cycle: Cycle) {
    if !cycles.iter().any(|c| c.same_orbit(&cycle, SAME_ORBIT_TOL)) {
        cycles.push(cycle);
    }
}

pub fn attractor_census(c: &CanonicalMap, seeds: &[f64], params: &OrbitParams) -> Census {
    let mut census = Census::default();
    for &x0 in seeds {
        let r = iterate_orbit_with(c, x0, params);
        if r.status == OrbitStatus::Divergent {
            census.divergent += 1;
            continue;
        }
        match attracting_cycle(c, &r.tail, params) {
            Some(cycle) => add_cycle(&mut census.cycles, cycle),
            None => census.unresolved += 1,
        }
    }
    census
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: f64,
    pub status: OrbitStatus,
    /// Period of the attracting cycle this seed settled on, if identified.
    pub period: Option<usize>,
    pub lyap_proxy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub seeds: Vec<SeedRecord>,
    /// Periods of the distinct attracting cycles found, ascending.
    pub attractor_periods: Vec<usize>,
    /// Aperiodic with positive `lyap_proxy` on some seed.
    pub chaotic_heuristic: bool,
    /// Set when the map could not be built at this λ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poison: Option<String>,
    /// Post-transient points, one bag per seed.
    #[serde(skip)]
    pub points: Vec<Vec<f64>>,
}

impl SweepPoint {
    /// Largest attracting period, or `None` if none was identified.
    pub fn max_period(&self) -> Option<usize> {
        self.attractor_periods.iter().copied().max()
    }

    pub fn any_divergent(&self) -> bool {
        self.seeds.iter().any(|s| s.status == OrbitStatus::Divergent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDataset {
    pub family: Option<String>,
    pub params: OrbitParams,
    pub seed_policy: SeedPolicy,
    pub points: Vec<SweepPoint>,
}

fn sweep_point(fam: &CanonicalFamily, lambda: f64, policy: &SeedPolicy, params: &OrbitParams) -> SweepPoint {
    let c = match family_at(fam, lambda) {
        Ok(c) => c,
        Err(e) => {
            return SweepPoint {
                lambda,
                seeds: Vec::new(),
                attractor_periods: Vec::new(),
                chaotic_heuristic: false,
                poison: Some(e.to_string()),
                points: Vec::new(),
            }
        }
    };
    let mut cycles = Vec::new();
    let mut seeds = Vec::new();
    let mut bags = Vec::new();
    let mut chaotic = false;
    for x0 in seeds_for(&c, policy) {
        let r = iterate_orbit_with(&c, x0, params);
        let cycle = match r.status {
            OrbitStatus::Divergent => None,
            _ => attracting_cycle(&c, &r.tail, params),
        };
        chaotic |= r.status == OrbitStatus::Aperiodic && cycle.is_none() && r.lyap_proxy > 0.0;
        seeds.push(SeedRecord {
            seed: x0,
            status: r.status,
            period: cycle.as_ref().map(|c| c.period),
            lyap_proxy: r.lyap_proxy,
        });
        if let Some(cy) = cycle {
            add_cycle(&mut cycles, cy);
        }
        bags.push(if r.status == OrbitStatus::Divergent { Vec::new() } else { r.tail });
    }
    let mut attractor_periods: Vec<usize> = cycles.iter().map(|c| c.period).collect();
    attractor_periods.sort_unstable();
    SweepPoint { lambda, seeds, attractor_periods, chaotic_heuristic: chaotic, poison: None, points: bags }
}

/// Runs `f` on a pool capped by `POLYMAP_THREADS` when that is set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var("POLYMAP_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok());
    match cap {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

pub fn sweep(fam: &CanonicalFamily, grid: &[f64], policy: &SeedPolicy, params: &OrbitParams) -> Result<SweepDataset> {
    params.validate()?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("grid must be strictly increasing".into()));
    }
    if let Some(&l) = grid.iter().find(|&&l| !fam.contains(l)) {
        return Err(Error::Invalid(format!(
            "grid point {l} outside domain [{}, {}]",
            fam.domain.0, fam.domain.1
        )));
    }
    let points = with_thread_cap(|| grid.par_iter().map(|&l| sweep_point(fam, l, policy, params)).collect());
    Ok(SweepDataset { family: fam.name.clone(), params: *params, seed_policy: policy.clone(), points })
}

/// A change of the largest attracting period between neighbouring grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Midpoint of the two grid values.
    pub lambda: f64,
    pub from: usize,
    pub to: usize,
}

pub fn period_transitions(ds: &SweepDataset) -> Vec<Transition> {
    ds.points
        .windows(2)
        .filter_map(|w| match (w[0].max_period(), w[1].max_period()) {
            (Some(a), Some(b)) if a != b => Some(Transition { lambda: 0.5 * (w[0].lambda + w[1].lambda), from: a, to: b }),
            _ => None,
        })
        .collect()
}

/// 17 significant digits, round-trip exact.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepDataset {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,seed_index,x\n");
        for p in &self.points {
            let l = fmt_real(p.lambda);
            for (i, bag) in p.points.iter().enumerate() {
                for &x in bag {
                    out.push_str(&l);
                    out.push(',');
                    out.push_str(&i.to_string());
                    out.push(',');
                    out.push_str(&fmt_real(x));
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Per-λ periods and flags, without the orbit points.
    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep sidecar serializes")
    }
}
