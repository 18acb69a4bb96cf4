//! Exact de Sitter slices as initial data.

use crate::charts::{slice_data, ChartId};
use crate::error::{check_lambda, Result};
use crate::initial_data::{Conformal, InitialDataSet};
use crate::tensor::{CoordSystem, TensorField3};

/// Planar slice `t`: `g = e^{2t/lambda} delta`, `h = 0`.
pub fn planar_slice(lambda: f64, t: f64) -> Result<InitialDataSet> {
    check_lambda(lambda)?;
    let (g, _) = slice_data(ChartId::PlanarUpper, t, lambda)?;
    InitialDataSet::from_momentum(
        g,
        TensorField3::zero(CoordSystem::Cartesian),
        3.0 / (lambda * lambda),
        Conformal::Planar {
            factor: (t / lambda).exp(),
        },
        "de-sitter",
    )
}

/// Hyperbolic slice `T`: `g = sinh^2(T/lambda) g_H`, `h = 0`.
pub fn hyperbolic_slice(lambda: f64, t: f64) -> Result<InitialDataSet> {
    check_lambda(lambda)?;
    let (g, _) = slice_data(ChartId::Hyperbolic, t, lambda)?;
    InitialDataSet::from_momentum(
        g,
        TensorField3::zero(CoordSystem::PolarSpherical),
        3.0 / (lambda * lambda),
        Conformal::Hyperbolic { t },
        "de-sitter-hyperbolic",
    )
}
