//! Tensor fields, curvature, constraint densities and slice geometry.

pub mod constraints;
pub mod curvature;
pub mod deform;
pub mod diff;
pub mod fields;
pub mod slice;

pub use constraints::{
    constraints, generalized_densities, momentum_coefficient, momentum_tensor_h, ConstraintSample,
    GeneralizedDensities, MomentumVariant,
};
pub use curvature::{curvature3, curvature4, einstein_lambda_residual, Curvature};
pub use deform::{mean_curvature_deform, Deformation, Foliation};
pub use diff::{DerivativeConfig, DerivativeMode};
pub use fields::{
    Background, CoordSystem, GeneralTensorField3, Mat3, Mat4, Metric4Field, MetricField3, Point3, Point4,
    SymTensorField3, TensorField3,
};
pub use slice::{slice_fields, slice_geometry, SliceGeometry};
