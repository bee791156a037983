//! Burkholder functionals, extremal piecewise radial quasiconformal maps and
//! a spectral solver for the planar Beltrami equation, together with
//! quadrature checks of the sharp integral inequalities they satisfy.

// Negated comparisons reject NaN inputs along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functional;
pub mod grid;
pub mod inequality;
pub mod interpolation;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
