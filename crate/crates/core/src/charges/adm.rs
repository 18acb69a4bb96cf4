//! Planar-end charges `Ebar`, `Pbar`, `Jbar` and their rescaled versions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::extrapolate::{extrapolate, inverse_variable, Extrapolation, ExtrapolationSpec};
use super::quadrature::{sphere_integral, QuadratureSpec};
use crate::error::{Error, Result};
use crate::initial_data::angular::density_from_parts;
use crate::initial_data::{conformal_decompose, ConformalData, Conformal, EpsilonConvention, InitialDataSet};
use crate::tensor::{CoordSystem, DerivativeConfig, Mat3};

/// Numerical settings shared by the charge routines.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeOptions {
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub extrapolation: ExtrapolationSpec,
    #[serde(default)]
    pub epsilon: EpsilonConvention,
    #[serde(skip)]
    pub derivatives: DerivativeConfig,
}

/// Charges on one coordinate sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPlanarCharges {
    pub radius: f64,
    pub ebar: f64,
    pub pbar: [f64; 3],
    pub jbar: [f64; 3],
}

/// Extrapolated planar charges.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarCharges {
    pub ebar: Extrapolation,
    pub pbar: [Extrapolation; 3],
    pub jbar: [Extrapolation; 3],
    pub factor: f64,
    pub raw: Vec<RawPlanarCharges>,
}

impl PlanarCharges {
    pub fn bar_values(&self) -> (f64, [f64; 3], [f64; 3]) {
        (
            self.ebar.value,
            self.pbar.each_ref().map(|e| e.value),
            self.jbar.each_ref().map(|e| e.value),
        )
    }

    /// `(E, P, J)`.
    pub fn rescaled(&self) -> Result<(f64, [f64; 3], [f64; 3])> {
        let (e, p, j) = self.bar_values();
        rescale_charges(e, p, j, self.factor)
    }
}

/// `E = P Ebar`, `P = P^2 Pbar`, `J = P^2 Jbar`.
pub fn rescale_charges(ebar: f64, pbar: [f64; 3], jbar: [f64; 3], factor: f64) -> Result<(f64, [f64; 3], [f64; 3])> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::parameter("conformal_factor", format!("must be positive, got {factor}")));
    }
    let f2 = factor * factor;
    Ok((ebar * factor, pbar.map(|v| v * f2), jbar.map(|v| v * f2)))
}

fn check_planar(d: &InitialDataSet) -> Result<()> {
    if !matches!(d.conformal, Conformal::Planar { .. }) {
        return Err(Error::parameter("data", "planar charges need a planar-type data set"));
    }
    if d.g.coords() != CoordSystem::Cartesian {
        return Err(Error::parameter("data", "planar charges need Cartesian end coordinates"));
    }
    Ok(())
}

fn energy_momentum_integrand(
    cd: &ConformalData,
    x: &[f64; 3],
    n: &[f64; 3],
    cfg: &DerivativeConfig,
) -> Result<(f64, [f64; 3], Mat3, Mat3, Mat3)> {
    let dg = cd.gbar.first_derivatives(x, cfg)?;
    let mut e = 0.0;
    for i in 0..3 {
        let mut s = 0.0;
        for j in 0..3 {
            s += dg[j][(i, j)] - dg[i][(j, j)];
        }
        e += s * n[i];
    }
    let (g, inv) = cd.gbar.value_inverse(x)?;
    let h = cd.hbar.value(x)?;
    let tr = inv.component_mul(&h).sum();
    let pi = h - g * tr;
    let p = std::array::from_fn(|k| (0..3).map(|i| pi[(k, i)] * n[i]).sum());
    Ok((e, p, g, inv, h))
}

fn angular_flux(cd: &ConformalData, g: &Mat3, inv: &Mat3, h: &Mat3, x: &[f64; 3], n: &[f64; 3], eps: EpsilonConvention) -> [f64; 3] {
    let dx = [x[0] - cd.z[0], x[1] - cd.z[1], x[2] - cd.z[2]];
    let ht = density_from_parts(g, inv, h, &dx, eps);
    std::array::from_fn(|k| (0..3).map(|i| ht[(k, i)] * n[i]).sum())
}

/// `Ebar`, `Pbar`, `Jbar` on the coordinate sphere of radius `r` about the end origin.
pub fn planar_raw_charges(d: &InitialDataSet, cd: &ConformalData, r: f64, opts: &ChargeOptions) -> Result<RawPlanarCharges> {
    check_planar(d)?;
    if r <= d.inner_radius {
        return Err(Error::parameter("radius", format!("{r} is inside the data's inner radius {}", d.inner_radius)));
    }
    let cfg = &opts.derivatives;
    let interval = d.psi_interval.as_ref().map(|f| f(r));
    let r2 = r * r;
    let point = |n: &[f64; 3]| [r * n[0], r * n[1], r * n[2]];
    let (ebar, pbar, jbar) = match interval {
        None => {
            let v = sphere_integral::<7, _>(&opts.quadrature, |node| {
                let x = point(&node.n);
                let (e, p, g, inv, h) = energy_momentum_integrand(cd, &x, &node.n, cfg)?;
                let j = angular_flux(cd, &g, &inv, &h, &x, &node.n, opts.epsilon);
                Ok([e, p[0], p[1], p[2], j[0], j[1], j[2]])
            })?;
            (v[0], [v[1], v[2], v[3]], [v[4], v[5], v[6]])
        }
        Some((a, b)) => {
            let full = QuadratureSpec {
                psi_interval: None,
                ..opts.quadrature.clone()
            };
            let v = sphere_integral::<4, _>(&full, |node| {
                let (e, p, ..) = energy_momentum_integrand(cd, &point(&node.n), &node.n, cfg)?;
                Ok([e, p[0], p[1], p[2]])
            })?;
            let q = opts.quadrature.clone().with_psi_interval(a, b);
            let j = sphere_integral::<3, _>(&q, |node| {
                let x = point(&node.n);
                let (g, inv) = cd.gbar.value_inverse(&x)?;
                let h = cd.hbar.value(&x)?;
                Ok(angular_flux(cd, &g, &inv, &h, &x, &node.n, opts.epsilon))
            })?;
            (v[0], [v[1], v[2], v[3]], j)
        }
    };
    Ok(RawPlanarCharges {
        radius: r,
        ebar: ebar * r2 / (16.0 * PI),
        pbar: pbar.map(|v| v * r2 / (8.0 * PI)),
        jbar: jbar.map(|v| v * r2 / (8.0 * PI)),
    })
}

/// Extrapolated `Ebar`, `Pbar`, `Jbar(z)` with diagnostics.
pub fn adm_charges_bar(d: &InitialDataSet, opts: &ChargeOptions) -> Result<PlanarCharges> {
    check_planar(d)?;
    let cd = conformal_decompose(d)?;
    let radii = opts.extrapolation.planar_radii(d.lambda())?;
    let raw = radii
        .iter()
        .map(|&r| planar_raw_charges(d, &cd, r, opts))
        .collect::<Result<Vec<_>>>()?;
    let u = inverse_variable(&radii);
    let ex = |f: &dyn Fn(&RawPlanarCharges) -> f64| {
        let q: Vec<f64> = raw.iter().map(f).collect();
        extrapolate(&u, &q, opts.extrapolation.exponent)
    };
    let ebar = ex(&|c| c.ebar)?;
    let pbar = [ex(&|c| c.pbar[0])?, ex(&|c| c.pbar[1])?, ex(&|c| c.pbar[2])?];
    let jbar = [ex(&|c| c.jbar[0])?, ex(&|c| c.jbar[1])?, ex(&|c| c.jbar[2])?];
    Ok(PlanarCharges {
        ebar,
        pbar,
        jbar,
        factor: cd.factor,
        raw,
    })
}
