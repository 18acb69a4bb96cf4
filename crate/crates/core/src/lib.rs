//! Conserved charges of asymptotically de Sitter initial data.
//!
//! The crate covers the geometry needed to go from a spacetime or an initial
//! data set to its energy, linear momentum and angular momentum: tensor fields
//! and curvature, de Sitter charts, closed-form models (planar and hyperbolic de
//! Sitter slices, McVittie, Kerr-de Sitter), conformal reduction of the data,
//! and flux-integral charges with extrapolation to infinity.

pub mod ad;
pub mod charges;
pub mod charts;
pub mod error;
pub mod initial_data;
pub mod models;
pub mod tensor;

pub use error::{Error, Result};
