//! Orbits, bifurcation diagrams and the period-doubling cascade.

pub mod orbit;
pub mod search;
pub mod sweep;
pub mod verify;

pub use orbit::{
    attracting_cycle, detect_period, iterate_orbit, iterate_orbit_with, refine_cycle, Cycle, OrbitParams,
    OrbitResult, OrbitStatus, Period,
};
pub use search::{
    compute_band_values, estimate_b_infinity, extrapolate, feigenbaum_delta, feigenbaum_predict,
    find_bifurcation_value, BifurcationEstimate, Method, SearchOptions, SearchSlice, FEIGENBAUM_DELTA,
};
pub use sweep::{
    attractor_census, period_transitions, seeds_for, sweep, Census, SeedPolicy, SweepDataset, SweepPoint,
    Transition,
};
pub use verify::{verify_period_doubling, PeriodDoublingCheck};
