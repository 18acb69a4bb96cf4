//! Energy-momentum `E^H_ν` of a hyperbolic end.
//!
//! Frame `e1 = d_R`, `e2 = d_θ / f`, `e3 = d_ψ / (f sin θ)` with `f = λ sinh(R/λ)`. With
//! `a = gbar - g_H` in that frame, `F = coth(R/λ)/λ` and `G = cot θ / f`:
//!
//! `𝓔 = div(a)_1 - d_R tr a + (a22 + a33)/λ + 2 (hbar22 + hbar33)`,
//! `div(a)_1 = d_R a11 + e2(a12) + e3(a13) + F (2 a11 - a22 - a33) + G a12`,
//! `E^H_ν = (H² / 16π) lim ∫ 𝓔 n^ν e^{R/λ} f² dΩ`, `n = (1, sinθ cosψ, sinθ sinψ, cosθ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::adm::ChargeOptions;
use super::extrapolate::{exponential_variable, extrapolate, Extrapolation};
use super::quadrature::sphere_integral;
use crate::error::{Error, Result};
use crate::initial_data::{conformal_decompose, Conformal, ConformalData, InitialDataSet};
use crate::tensor::{diff, CoordSystem};

/// `E^H_ν` on one sphere `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawHyperbolicCharges {
    pub radius: f64,
    pub eh: [f64; 4],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperbolicCharges {
    pub eh: [Extrapolation; 4],
    pub raw: Vec<RawHyperbolicCharges>,
}

impl HyperbolicCharges {
    pub fn values(&self) -> [f64; 4] {
        self.eh.each_ref().map(|e| e.value)
    }
}

fn check_hyperbolic(d: &InitialDataSet) -> Result<()> {
    if !matches!(d.conformal, Conformal::Hyperbolic { .. }) {
        return Err(Error::parameter("data", "hyperbolic charges need a hyperbolic-type data set"));
    }
    if d.g.coords() != CoordSystem::PolarSpherical {
        return Err(Error::parameter("data", "hyperbolic charges need polar (R, theta, psi) coordinates"));
    }
    Ok(())
}

/// The density `𝓔` at `x = (R, θ, ψ)`.
pub fn energy_density(cd: &ConformalData, x: &[f64; 3]) -> Result<f64> {
    let l = cd.lambda;
    let (r, th) = (x[0], x[1]);
    let f = l * (r / l).sinh();
    let big_f = 1.0 / (l * (r / l).tanh());
    let g = th.cos() / (th.sin() * f);
    let a = cd.metric_deviation(x)?;
    let da = diff::first_derivatives(&|y: &[f64; 3]| cd.metric_deviation(y), x, true)?;
    let hb = cd.hbar_orthonormal(x)?;
    let div = da[0][(0, 0)]
        + da[1][(0, 1)] / f
        + da[2][(0, 2)] / (f * th.sin())
        + big_f * (2.0 * a[(0, 0)] - a[(1, 1)] - a[(2, 2)])
        + g * a[(0, 1)];
    let dtr = da[0].trace();
    Ok(div - dtr + (a[(1, 1)] + a[(2, 2)]) / l + 2.0 * (hb[(1, 1)] + hb[(2, 2)]))
}

/// `E^H_ν` on the sphere `R`.
pub fn hyperbolic_raw_charges(d: &InitialDataSet, cd: &ConformalData, r: f64, opts: &ChargeOptions) -> Result<RawHyperbolicCharges> {
    check_hyperbolic(d)?;
    let l = cd.lambda;
    let v = sphere_integral::<4, _>(&opts.quadrature, |node| {
        let e = energy_density(cd, &[r, node.theta, node.psi])?;
        Ok([e, e * node.n[0], e * node.n[1], e * node.n[2]])
    })?;
    let f = l * (r / l).sinh();
    let w = cd.factor * cd.factor / (16.0 * PI) * (r / l).exp() * f * f;
    Ok(RawHyperbolicCharges {
        radius: r,
        eh: v.map(|x| x * w),
    })
}

/// Extrapolated `E^H_ν`, `ν = 0..3`.
pub fn hyperbolic_charges(d: &InitialDataSet, opts: &ChargeOptions) -> Result<HyperbolicCharges> {
    check_hyperbolic(d)?;
    let cd = conformal_decompose(d)?;
    let radii = opts.extrapolation.hyperbolic_radii(cd.lambda)?;
    let raw = radii
        .iter()
        .map(|&r| hyperbolic_raw_charges(d, &cd, r, opts))
        .collect::<Result<Vec<_>>>()?;
    let u = exponential_variable(&radii, cd.lambda);
    let mut out = Vec::with_capacity(4);
    for nu in 0..4 {
        let q: Vec<f64> = raw.iter().map(|c| c.eh[nu]).collect();
        out.push(extrapolate(&u, &q, opts.extrapolation.exponent)?);
    }
    let eh: [Extrapolation; 4] = out.try_into().expect("four components");
    Ok(HyperbolicCharges { eh, raw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::QuadratureSpec;
    use crate::initial_data::hyperbolic_data;
    use crate::tensor::Mat3;
    use std::sync::Arc;

    fn opts() -> ChargeOptions {
        ChargeOptions {
            quadrature: QuadratureSpec::new(16, 32),
            ..Default::default()
        }
    }

    #[test]
    fn pure_de_sitter_vanishes() {
        let d = crate::models::desitter::hyperbolic_slice(10.0, 5.0).unwrap();
        let c = hyperbolic_charges(&d, &opts()).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-8), "{:?}", c.values());
    }

    #[test]
    fn radial_perturbation_energy() {
        let (l, t, eps) = (10.0, 5.0, 1e-3);
        let a: crate::initial_data::FrameFn = Arc::new(move |x| {
            let mut m = Mat3::zeros();
            m[(0, 0)] = eps * (-3.0 * x[0] / l).exp();
            Ok(m)
        });
        let zero: crate::initial_data::FrameFn = Arc::new(|_| Ok(Mat3::zeros()));
        let d = hyperbolic_data(l, t, a, zero, "a11").unwrap();
        let c = hyperbolic_charges(&d, &opts()).unwrap();
        let hh = (t / l).sinh();
        let expect = hh * hh * l * eps / 8.0;
        assert!((c.eh[0].value / expect - 1.0).abs() < 1e-6, "{:?}", c.eh[0]);
        assert!(c.eh[3].value.abs() < 1e-10 * expect);
    }

    #[test]
    fn slow_decay_is_flagged() {
        let (l, t, eps) = (10.0, 5.0, 1e-3);
        let a: crate::initial_data::FrameFn = Arc::new(move |x| {
            let mut m = Mat3::zeros();
            m[(0, 0)] = eps * (-2.0 * x[0] / l).exp();
            Ok(m)
        });
        let zero: crate::initial_data::FrameFn = Arc::new(|_| Ok(Mat3::zeros()));
        let d = hyperbolic_data(l, t, a, zero, "slow").unwrap();
        let c = hyperbolic_charges(&d, &opts()).unwrap();
        assert!(c.eh[0].diverging && c.eh[0].warning);
    }
}
