//! Conformal deformation of a foliation to prescribed mean curvature.
//!
//! Given `(a, g(t), k = d_t g / 2a)` the factor
//! `F(t, x) = (1/3) int_0^t (Theta - tr_g k) a ds` makes `g_F = e^{2F} g` carry
//! `K = e^{2F} k + a^{-1} e^{2F} (d_t F) g` with `tr K = Theta`.

use std::sync::Arc;

use super::curvature::inverse3;
use super::diff::{first_step, scalar_derivative};
use super::fields::{Mat3, Point3};
use crate::error::{Error, Result};

pub type ScalarTimeFn = Arc<dyn Fn(f64, &Point3) -> Result<f64> + Send + Sync>;
pub type MetricTimeFn = Arc<dyn Fn(f64, &Point3) -> Result<Mat3> + Send + Sync>;

/// A foliation `(a, g(t))` with prescribed target mean curvature `theta`.
#[derive(Clone)]
pub struct Foliation {
    pub lapse: ScalarTimeFn,
    pub metric: MetricTimeFn,
    pub theta: ScalarTimeFn,
}

#[derive(Clone, Copy, Debug)]
pub struct Deformation {
    pub f: f64,
    pub g: Mat3,
    pub k: Mat3,
    /// `tr_{g_F} K`, with `d_t F` and `d_t g` taken by finite differences.
    pub mean_curvature: f64,
}

/// Absolute tolerance of the time integral defining F.
pub const DEFORM_TOLERANCE: f64 = 1e-10;

fn dt_metric(fol: &Foliation, t: f64, x: &Point3) -> Result<Mat3> {
    let h = first_step(t, true);
    let d = |h: f64| -> Result<Mat3> { Ok(((fol.metric)(t + h, x)? - (fol.metric)(t - h, x)?) / (2.0 * h)) };
    Ok((d(0.5 * h)? * 4.0 - d(h)?) / 3.0)
}

fn trace_k(fol: &Foliation, s: f64, x: &Point3) -> Result<f64> {
    let g = (fol.metric)(s, x)?;
    let inv = inverse3(&g, x)?;
    let a = (fol.lapse)(s, x)?;
    let k = dt_metric(fol, s, x)? / (2.0 * a);
    Ok(inv.component_mul(&k).sum())
}

/// `F(t, x)` by adaptive double-exponential quadrature.
pub fn deformation_factor(fol: &Foliation, t: f64, x: &Point3) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let integrand = |s: f64| -> f64 {
        let v = (|| -> Result<f64> {
            let a = (fol.lapse)(s, x)?;
            Ok(((fol.theta)(s, x)? - trace_k(fol, s, x)?) * a)
        })();
        match v {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let out = quadrature::double_exponential::integrate(integrand, 0.0, t, DEFORM_TOLERANCE);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !out.integral.is_finite() || out.error_estimate > 1e3 * DEFORM_TOLERANCE {
        return Err(Error::Integration(format!(
            "deformation integral error estimate {:e}",
            out.error_estimate
        )));
    }
    Ok(out.integral / 3.0)
}

/// Deformed metric and second fundamental form at `(t, x)`.
pub fn mean_curvature_deform(fol: &Foliation, t: f64, x: &Point3) -> Result<Deformation> {
    let f = deformation_factor(fol, t, x)?;
    let dfdt = scalar_derivative(&|s| deformation_factor(fol, s, x), t, false)?;
    let g = (fol.metric)(t, x)?;
    let a = (fol.lapse)(t, x)?;
    if a == 0.0 {
        return Err(Error::SingularSlice("vanishing lapse".into()));
    }
    let k = dt_metric(fol, t, x)? / (2.0 * a);
    let e2f = (2.0 * f).exp();
    let gf = g * e2f;
    let kf = k * e2f + g * (e2f * dfdt / a);
    let inv = inverse3(&gf, x)?;
    Ok(Deformation {
        f,
        g: gf,
        k: kf,
        mean_curvature: inv.component_mul(&kf).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_flat(lapse: impl Fn(f64) -> f64 + Send + Sync + 'static, theta: f64) -> Foliation {
        Foliation {
            lapse: Arc::new(move |s, _| Ok(lapse(s))),
            metric: Arc::new(|_, _| Ok(Mat3::identity())),
            theta: Arc::new(move |_, _| Ok(theta)),
        }
    }

    #[test]
    fn factor_with_time_dependent_lapse() {
        let fol = static_flat(|s| 1.0 + (-s).exp(), 1.0);
        let f = deformation_factor(&fol, 1.0, &[0.0; 3]).unwrap();
        assert!((f - (2.0 - (-1.0f64).exp()) / 3.0).abs() < 1e-10);
    }

    #[test]
    fn flat_to_planar_de_sitter() {
        let lambda = 10.0;
        let fol = static_flat(|_| 1.0, 3.0 / lambda);
        let d = mean_curvature_deform(&fol, 2.5, &[1.0, 2.0, 3.0]).unwrap();
        let expect = Mat3::identity() * (2.0 * 2.5 / lambda).exp();
        assert!((d.g - expect).abs().max() < 1e-10);
        assert!((d.mean_curvature - 3.0 / lambda).abs() < 1e-6);
    }
}
