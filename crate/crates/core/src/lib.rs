//! Directional derivatives of supremum-type functionals on grids, and
//! simulation of the limit laws they induce for Kolmogorov-Smirnov, Kuiper,
//! Berk-Jones, copula and maximum-mean-discrepancy statistics.

// `!(x > 0.0)` is the NaN-rejecting form of these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod empirical;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod harness;
pub mod limits;
pub mod linalg;
pub mod parallel;
pub mod reference;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod statistics;

pub use distributions::{CdfSpec, Copula, Joint, Univariate};
pub use empirical::Sample;
pub use error::{Error, Result};
pub use functionals::{
    argmax_set, argmin_set, difference_quotient, directional_derivative, evaluate,
    full_differentiability_witness, sublevel_set, superlevel_set, ExtremalSet, FunctionalKind,
    LevelSet, PreparedDerivative, Witness,
};
pub use grid::{Channel, Continuity, GridDomain, GridFunction, GridPoint, Topology};
pub use scalar::Scalar;

pub type GridDomainF64 = GridDomain<f64>;
pub type GridDomainF32 = GridDomain<f32>;
pub type GridFunctionF64 = GridFunction<f64>;
pub type GridFunctionF32 = GridFunction<f32>;
pub type LevelSetF64 = LevelSet<f64>;
pub type LevelSetF32 = LevelSet<f32>;
