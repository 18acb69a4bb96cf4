//! Initial data sets, their conformal reduction and derived diagnostics.

pub mod angular;
pub mod decay;
pub mod horizon;

use std::sync::Arc;

use nalgebra::{Matrix3, Rotation3};
use serde::Serialize;

use crate::error::{check_cosmological_constant, Error, Result};
use crate::tensor::{
    momentum_coefficient, Background, CoordSystem, Mat3, MetricField3, MomentumVariant, Point3, SymTensorField3,
    TensorField3,
};

pub use angular::{angular_density, EpsilonConvention};
pub use decay::{decay_fit, DecayFit, DecayReport};
pub use horizon::{find_horizon_spherical, horizon_residual, null_expansions, HorizonSign, Sphere};

/// How the data is asymptotic to a de Sitter slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Conformal {
    /// Asymptotic to a planar slice with scale factor `P = e^{t/lambda}`.
    Planar { factor: f64 },
    /// Asymptotic to the hyperbolic slice `T`; `H = sinh(T/lambda)`.
    Hyperbolic { t: f64 },
}

/// `(M, g, K)` together with the cosmological constant and the end structure.
#[derive(Clone)]
pub struct InitialDataSet {
    pub g: MetricField3,
    pub k: SymTensorField3,
    pub cosmological_constant: f64,
    pub conformal: Conformal,
    /// `h = K - c g` in closed form, when the source knows it.
    pub momentum: Option<SymTensorField3>,
    /// Reference point `z` for angular momentum.
    pub z: [f64; 3],
    /// Radius outside which the end chart is valid.
    pub inner_radius: f64,
    /// `psi` integration interval as a function of the sphere radius (default `[0, 2 pi)`).
    pub psi_interval: Option<PsiIntervalFn>,
    pub label: String,
}

pub type PsiIntervalFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// `(gbar, hbar)` with `g = P^2 gbar`, `h = P hbar` (and `H` in place of `P` on hyperbolic ends).
#[derive(Clone)]
pub struct ConformalData {
    pub gbar: MetricField3,
    pub hbar: SymTensorField3,
    pub factor: f64,
    pub lambda: f64,
    pub conformal: Conformal,
    pub z: [f64; 3],
}

impl InitialDataSet {
    pub fn new(
        g: MetricField3,
        k: SymTensorField3,
        cosmological_constant: f64,
        conformal: Conformal,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_cosmological_constant(cosmological_constant)?;
        let d = Self {
            g,
            k,
            cosmological_constant,
            conformal,
            momentum: None,
            z: [0.0; 3],
            inner_radius: 0.0,
            psi_interval: None,
            label: label.into(),
        };
        d.conformal_factor()?;
        Ok(d)
    }

    /// Data given by `g` and `h`; `K = h + c g` is derived.
    pub fn from_momentum(
        g: MetricField3,
        h: SymTensorField3,
        cosmological_constant: f64,
        conformal: Conformal,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_cosmological_constant(cosmological_constant)?;
        let c = momentum_coefficient(cosmological_constant, variant_of(conformal))?;
        let k = h.combine(1.0, &g, c);
        let mut d = Self::new(g, k, cosmological_constant, conformal, label)?;
        d.momentum = Some(h);
        Ok(d)
    }

    pub fn lambda(&self) -> f64 {
        (3.0 / self.cosmological_constant).sqrt()
    }

    pub fn with_z(mut self, z: [f64; 3]) -> Self {
        self.z = z;
        self
    }

    pub fn with_inner_radius(mut self, r: f64) -> Self {
        self.inner_radius = r;
        self
    }

    pub fn variant(&self) -> MomentumVariant {
        variant_of(self.conformal)
    }

    /// `P` or `H = sinh(T/lambda)`.
    pub fn conformal_factor(&self) -> Result<f64> {
        match self.conformal {
            Conformal::Planar { factor } => {
                if !(factor.is_finite() && factor > 0.0) {
                    return Err(Error::parameter("conformal_factor", format!("must be positive, got {factor}")));
                }
                Ok(factor)
            }
            Conformal::Hyperbolic { t } => {
                if t == 0.0 || !t.is_finite() {
                    return Err(Error::SingularSlice(format!("hyperbolic slice T = {t}")));
                }
                Ok((t / self.lambda()).sinh())
            }
        }
    }

    /// `h = K - c g`, from the closed form when available.
    pub fn momentum_tensor(&self) -> Result<SymTensorField3> {
        match &self.momentum {
            Some(h) => Ok(h.clone()),
            None => crate::tensor::momentum_tensor_h(&self.g, &self.k, self.cosmological_constant, self.variant()),
        }
    }

    /// Data in end coordinates rotated by `rot`: `x' = rot x`.
    ///
    /// Only Cartesian ends can be rotated.
    pub fn rotated(&self, rot: &Rotation3<f64>) -> Result<Self> {
        if self.g.coords() != CoordSystem::Cartesian {
            return Err(Error::parameter("rotation", "requires a Cartesian end"));
        }
        let rotate = |f: &TensorField3| -> TensorField3 {
            let f = f.clone();
            let r = *rot.matrix();
            let bg = match f.background() {
                Background::Identity(s) => Background::Identity(*s),
                Background::Zero => Background::Zero,
                _ => {
                    let f2 = f.clone();
                    return TensorField3::from_fn(CoordSystem::Cartesian, move |x| {
                        let y = back(&r, x);
                        Ok(r * f2.value(&y)? * r.transpose())
                    });
                }
            };
            TensorField3::from_background(bg, CoordSystem::Cartesian).with_deviation(move |x| {
                let y = back(&r, x);
                Ok(r * f.deviation(&y)? * r.transpose())
            })
        };
        let r = *rot.matrix();
        let z = r * nalgebra::Vector3::from(self.z);
        Ok(Self {
            g: MetricField3::new(rotate(&self.g)),
            k: rotate(&self.k),
            cosmological_constant: self.cosmological_constant,
            conformal: self.conformal,
            momentum: self.momentum.as_ref().map(rotate),
            z: [z[0], z[1], z[2]],
            inner_radius: self.inner_radius,
            psi_interval: self.psi_interval.clone(),
            label: format!("{} (rotated)", self.label),
        })
    }
}

fn back(r: &Matrix3<f64>, x: &Point3) -> Point3 {
    let y = r.transpose() * nalgebra::Vector3::new(x[0], x[1], x[2]);
    [y[0], y[1], y[2]]
}

fn variant_of(c: Conformal) -> MomentumVariant {
    match c {
        Conformal::Planar { .. } => MomentumVariant::Planar,
        Conformal::Hyperbolic { t } => MomentumVariant::Hyperbolic { t },
    }
}

/// Remove the conformal factor: `gbar = P^{-2} g`, `hbar = P^{-1} h`.
pub fn conformal_decompose(d: &InitialDataSet) -> Result<ConformalData> {
    let p = d.conformal_factor()?;
    let h = d.momentum_tensor()?;
    Ok(ConformalData {
        gbar: d.g.scaled(1.0 / (p * p)),
        hbar: h.scaled(1.0 / p),
        factor: p,
        lambda: d.lambda(),
        conformal: d.conformal,
        z: d.z,
    })
}

impl ConformalData {
    /// `htilde = hbar + gbar / lambda`.
    pub fn htilde(&self) -> SymTensorField3 {
        self.hbar.combine(1.0, &self.gbar, 1.0 / self.lambda)
    }
}

/// Frame component closure on a hyperbolic end, in the frame
/// `e1 = d_R`, `e2 = d_theta / f`, `e3 = d_psi / (f sin theta)`, `f = lambda sinh(R/lambda)`.
pub type FrameFn = Arc<dyn Fn(&Point3) -> Result<Mat3> + Send + Sync>;

/// Coordinate components `E a E` of frame components `a`, `E = diag(1, f, f sin theta)`.
pub fn frame_to_coordinates(a: &Mat3, lambda: f64, x: &Point3) -> Mat3 {
    let f = lambda * (x[0] / lambda).sinh();
    let e = nalgebra::Vector3::new(1.0, f, f * x[1].sin());
    Mat3::from_fn(|i, j| a[(i, j)] * e[i] * e[j])
}

/// Frame components of a coordinate tensor on a hyperbolic end.
pub fn coordinates_to_frame(t: &Mat3, lambda: f64, x: &Point3) -> Mat3 {
    let f = lambda * (x[0] / lambda).sinh();
    let e = nalgebra::Vector3::new(1.0, 1.0 / f, 1.0 / (f * x[1].sin()));
    Mat3::from_fn(|i, j| t[(i, j)] * e[i] * e[j])
}

/// Hyperbolic-end data from reduced frame components:
/// `gbar = g_H + a`, `hbar`, with `g = H^2 gbar`, `h = H hbar` on the slice `T`.
pub fn hyperbolic_data(
    lambda: f64,
    t: f64,
    a: FrameFn,
    hbar: FrameFn,
    label: impl Into<String>,
) -> Result<InitialDataSet> {
    crate::error::check_lambda(lambda)?;
    if t == 0.0 {
        return Err(Error::SingularSlice("hyperbolic slice T = 0".into()));
    }
    let hh = (t / lambda).sinh();
    let gbar = TensorField3::from_background(
        Background::HyperbolicPolar { lambda, scale: 1.0 },
        CoordSystem::PolarSpherical,
    )
    .with_deviation(move |x| Ok(frame_to_coordinates(&a(x)?, lambda, x)));
    let hb = TensorField3::from_fn(CoordSystem::PolarSpherical, move |x| {
        Ok(frame_to_coordinates(&hbar(x)?, lambda, x))
    });
    InitialDataSet::from_momentum(
        MetricField3::new(gbar.scaled(hh * hh)),
        hb.scaled(hh),
        3.0 / (lambda * lambda),
        Conformal::Hyperbolic { t },
        label,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{slice_data, ChartId};

    #[test]
    fn planar_slice_reduces_to_flat_data() {
        let (g, k) = slice_data(ChartId::PlanarUpper, 3.0, 10.0).unwrap();
        let d = InitialDataSet::new(g, k, 0.03, Conformal::Planar { factor: 0.3f64.exp() }, "planar").unwrap();
        let c = conformal_decompose(&d).unwrap();
        let x = [1.0, -2.0, 5.0];
        assert!((c.gbar.value(&x).unwrap() - Mat3::identity()).abs().max() < 1e-14);
        assert!(c.hbar.value(&x).unwrap().abs().max() < 1e-16);
    }

    #[test]
    fn hyperbolic_coordinate_frame_roundtrip() {
        let a = Mat3::new(1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0);
        let x = [7.0, 0.6, 1.0];
        let back = coordinates_to_frame(&frame_to_coordinates(&a, 10.0, &x), 10.0, &x);
        assert!((back - a).abs().max() < 1e-13);
    }

    #[test]
    fn rotated_data_transforms_as_tensor() {
        let g = MetricField3::new(
            TensorField3::from_background(Background::Identity(1.0), CoordSystem::Cartesian)
                .with_deviation(|x| Ok(Mat3::from_fn(|i, j| if i == 0 && j == 0 { x[0] * 1e-3 } else { 0.0 }))),
        );
        let d = InitialDataSet::new(
            g.clone(),
            TensorField3::zero(CoordSystem::Cartesian),
            0.03,
            Conformal::Planar { factor: 1.0 },
            "t",
        )
        .unwrap();
        let rot = Rotation3::from_euler_angles(0.2, -0.4, 1.1);
        let r = d.rotated(&rot).unwrap();
        let x = nalgebra::Vector3::new(0.3, 1.2, -0.7);
        let xr = rot * x;
        let lhs = r.g.value(&[xr[0], xr[1], xr[2]]).unwrap();
        let rhs = rot.matrix() * g.value(&[x[0], x[1], x[2]]).unwrap() * rot.matrix().transpose();
        assert!((lhs - rhs).abs().max() < 1e-14);
    }
}

impl ConformalData {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.conformal, Conformal::Hyperbolic { .. })
    }

    /// `gbar - gbar_background` in orthonormal components of the background
    /// (Cartesian components on planar ends, frame components on hyperbolic ends).
    pub fn metric_deviation(&self, x: &Point3) -> Result<Mat3> {
        let dev = self.gbar.deviation(x)?;
        match (self.gbar.background(), self.is_hyperbolic()) {
            (Background::Identity(s), false) => Ok(dev + Mat3::identity() * (s - 1.0)),
            (Background::Zero, false) => Ok(dev - Mat3::identity()),
            (_, false) => Ok(self.gbar.value(x)? - Mat3::identity()),
            (Background::HyperbolicPolar { scale, .. }, true) => {
                let bg = self.gbar.background().jet(x)?.value * ((scale - 1.0) / scale);
                Ok(coordinates_to_frame(&(dev + bg), self.lambda, x))
            }
            (_, true) => Ok(coordinates_to_frame(&self.gbar.value(x)?, self.lambda, x) - Mat3::identity()),
        }
    }

    /// `hbar` in the same orthonormal components as [`Self::metric_deviation`].
    pub fn hbar_orthonormal(&self, x: &Point3) -> Result<Mat3> {
        let h = self.hbar.value(x)?;
        if self.is_hyperbolic() {
            Ok(coordinates_to_frame(&h, self.lambda, x))
        } else {
            Ok(h)
        }
    }
}
