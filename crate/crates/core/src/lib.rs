//! Stability, bifurcation and chaos analysis for one-parameter families of
//! real polynomial maps.
//!
//! Any polynomial map whose fixed points are real is conjugate, through an
//! affine change of variable, to a canonical map with one fixed point at the
//! origin and unit amplitude. Stability of each fixed point then depends only
//! on its product distance function (PDF), and period-doubling cascades are
//! organised by stability bands of PDF values.

// `!(x <= y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod error;
pub mod family;
pub mod forms;
pub mod poly;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};
pub use forms::{
    to_canonical, to_linear_factors, verify_conjugacy, AnchorPolicy, CanonicalMap,
    ConjugacyReport, ConjugacyTransform, GeneralMap, LinearFactorsMap, Sign,
};
pub use poly::{Polynomial, Schwarzian};
pub use roots::{real_roots, RealRoot, RootOptions, RootSet};
