//! Charges at spatial infinity: planar `E`, `P`, `J`, hyperbolic `E^H`, and the mass inequalities.

pub mod adm;
pub mod extrapolate;
pub mod hyperbolic;
pub mod inequalities;
pub mod quadrature;
pub mod report;

pub use adm::{adm_charges_bar, planar_raw_charges, rescale_charges, ChargeOptions, PlanarCharges, RawPlanarCharges};
pub use extrapolate::{extrapolate, Extrapolation, ExtrapolationSpec, TailExponent};
pub use quadrature::{sphere_integral, surface_integral, QuadratureSpec, SphereNode};
pub use hyperbolic::{hyperbolic_charges, HyperbolicCharges, RawHyperbolicCharges};
pub use inequalities::{mass_inequalities, Margins};
pub use report::{charge_report, ChargeReport};
