//! Limits `r -> infinity` from charges sampled at finitely many radii.
//!
//! Model: `Q(u) = Q_inf + sum_k c_k u^{s+k}` with `u = r0/r` on planar ends and
//! `u = e^{-(R - R0)/λ}` on hyperbolic ends.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents closer than this to an integer are snapped to it.
pub const SNAP_TOLERANCE: f64 = 0.05;
/// Raw sequences with spread below `this * max(1, |Q|)` count as converged.
pub const CONVERGED_SPREAD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "value")]
pub enum TailExponent {
    /// Fit `s`, then snap it to the nearest integer when within [`SNAP_TOLERANCE`].
    #[default]
    Auto,
    /// Use the given exponent.
    Pinned(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolationSpec {
    /// Planar: `r0 = r0_over_lambda * λ`; hyperbolic: `R0 = r0_over_lambda * λ`.
    #[serde(default)]
    pub r0_over_lambda: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Explicit radii; overrides `r0_over_lambda` and `count`.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub exponent: TailExponent,
}

fn default_count() -> usize {
    5
}

impl Default for ExtrapolationSpec {
    fn default() -> Self {
        Self {
            r0_over_lambda: None,
            count: default_count(),
            radii: None,
            exponent: TailExponent::Auto,
        }
    }
}

impl ExtrapolationSpec {
    pub fn with_radii(radii: Vec<f64>) -> Self {
        Self {
            radii: Some(radii),
            ..Self::default()
        }
    }

    /// Geometric radii `r0 2^k` with `r0 = 100 λ` by default.
    pub fn planar_radii(&self, lambda: f64) -> Result<Vec<f64>> {
        let radii = match &self.radii {
            Some(r) => r.clone(),
            None => {
                let r0 = self.r0_over_lambda.unwrap_or(100.0) * lambda;
                (0..self.count).map(|k| r0 * 2f64.powi(k as i32)).collect()
            }
        };
        validate(&radii)?;
        Ok(radii)
    }

    /// Arithmetic radii `R0 + k λ` with `R0 = 4 λ` by default.
    pub fn hyperbolic_radii(&self, lambda: f64) -> Result<Vec<f64>> {
        let radii = match &self.radii {
            Some(r) => r.clone(),
            None => {
                let r0 = self.r0_over_lambda.unwrap_or(4.0) * lambda;
                (0..self.count).map(|k| r0 + k as f64 * lambda).collect()
            }
        };
        validate(&radii)?;
        Ok(radii)
    }
}

fn validate(radii: &[f64]) -> Result<()> {
    if radii.len() < 3 {
        return Err(Error::parameter("radii", "need at least three radii"));
    }
    if !radii.windows(2).all(|w| w[1] > w[0]) || radii[0] <= 0.0 {
        return Err(Error::parameter("radii", "must be positive and strictly increasing"));
    }
    Ok(())
}

/// Fit diagnostics for one extrapolated quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// `|Q_inf(K) - Q_inf(K-1)|`.
    pub error_estimate: f64,
    /// Exponent used in the final fit.
    pub s: f64,
    /// Unsnapped fitted exponent, when one was fitted.
    pub s_free: Option<f64>,
    /// `"pinned"`, `"fitted"`, `"snapped"` or `"converged"`.
    pub source: String,
    /// Tail coefficients `c_k`.
    pub c: Vec<f64>,
    /// RMS residual of the final fit.
    pub residual: f64,
    pub condition_number: f64,
    /// Raw sequence changes monotonically.
    pub monotone: bool,
    /// Increments of the raw sequence do not shrink.
    pub diverging: bool,
    /// Residual above `1e-3 |Q_inf|` (absolute `1e-8` near zero), or diverging.
    pub warning: bool,
}

fn lstsq(u: &[f64], q: &[f64], s: f64, k: usize) -> (DVector<f64>, f64, f64) {
    let a = DMatrix::from_fn(u.len(), k + 1, |i, j| if j == 0 { 1.0 } else { u[i].powf(s + (j - 1) as f64) });
    let b = DVector::from_column_slice(q);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min().max(f64::MIN_POSITIVE);
    let x = svd.solve(&b, 1e-15 * sv.max()).unwrap_or_else(|_| DVector::zeros(k + 1));
    let r = &a * &x - b;
    let rms = (r.norm_squared() / u.len() as f64).sqrt();
    (x, rms, cond)
}

fn fit_exponent(u: &[f64], q: &[f64]) -> f64 {
    let rss = |s: f64| lstsq(u, q, s, 1).1;
    let (mut best, mut best_v) = (1.0, f64::INFINITY);
    let mut s = 0.25;
    while s <= 6.0 + 1e-12 {
        let v = rss(s);
        if v < best_v {
            best = s;
            best_v = v;
        }
        s += 0.05;
    }
    // Golden-section refinement.
    let (mut a, mut b) = ((best - 0.05_f64).max(0.05), best + 0.05);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if rss(x1) < rss(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}

/// Extrapolate `q(u) -> u = 0`.
pub fn extrapolate(u: &[f64], q: &[f64], exponent: TailExponent) -> Result<Extrapolation> {
    if u.len() != q.len() || u.len() < 3 {
        return Err(Error::parameter("extrapolate", "need at least three samples"));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("raw charge sequence".into()));
    }
    let diffs: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0);
    let last = *q.last().expect("non-empty");
    let (d_first, d_last) = (diffs[0].abs(), diffs[diffs.len() - 1].abs());
    let spread = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - q.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= CONVERGED_SPREAD * last.abs().max(1.0) {
        return Ok(Extrapolation {
            value: last,
            error_estimate: spread,
            s: 0.0,
            s_free: None,
            source: "converged".into(),
            c: vec![],
            residual: 0.0,
            condition_number: 1.0,
            monotone,
            diverging: false,
            warning: false,
        });
    }
    let (s, s_free, source) = match exponent {
        TailExponent::Pinned(s) => (s, None, "pinned"),
        TailExponent::Auto => {
            let f = fit_exponent(u, q);
            if (f - f.round()).abs() < SNAP_TOLERANCE && f.round() > 0.0 {
                (f.round(), Some(f), "snapped")
            } else {
                (f, Some(f), "fitted")
            }
        }
    };
    let k = 3.min(u.len() - 2);
    let (x, residual, cond) = lstsq(u, q, s, k);
    let (x0, _, _) = lstsq(u, q, s, k - 1);
    let value = x[0];
    let scale = value.abs();
    let diverging = d_last >= d_first;
    let warning = diverging || if scale > 1e-6 { residual > 1e-3 * scale } else { residual > 1e-8 };
    Ok(Extrapolation {
        value,
        error_estimate: (x[0] - x0[0]).abs(),
        s,
        s_free,
        source: source.into(),
        c: x.iter().skip(1).cloned().collect(),
        residual,
        condition_number: cond,
        monotone,
        diverging,
        warning,
    })
}

/// `u = r0 / r`.
pub fn inverse_variable(radii: &[f64]) -> Vec<f64> {
    radii.iter().map(|r| radii[0] / r).collect()
}

/// `u = e^{-(R - R0)/λ}`.
pub fn exponential_variable(radii: &[f64], lambda: f64) -> Vec<f64> {
    radii.iter().map(|r| (-(r - radii[0]) / lambda).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_limit_and_exponent() {
        let radii: Vec<f64> = (0..5).map(|k| 1e3 * 2f64.powi(k)).collect();
        let u = inverse_variable(&radii);
        let q: Vec<f64> = radii.iter().map(|r| 2.0 + 30.0 / r + 500.0 / (r * r)).collect();
        let e = extrapolate(&u, &q, TailExponent::Auto).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10, "{e:?}");
        assert_eq!(e.s, 1.0);
        assert_eq!(e.source, "snapped");
        assert!(e.monotone && !e.warning && !e.diverging);
        let grow: Vec<f64> = radii.iter().map(|r| r / 1e3).collect();
        assert!(extrapolate(&u, &grow, TailExponent::Auto).unwrap().diverging);
    }

    #[test]
    fn pinned_and_converged_paths() {
        let u = [1.0, 0.5, 0.25, 0.125];
        let q: Vec<f64> = u.iter().map(|x: &f64| -1.0 + 0.3 * x.powf(1.5)).collect();
        let e = extrapolate(&u, &q, TailExponent::Pinned(1.5)).unwrap();
        assert!((e.value + 1.0).abs() < 1e-12);
        let c = extrapolate(&u, &[4.0; 4], TailExponent::Auto).unwrap();
        assert_eq!(c.source, "converged");
        assert_eq!(c.value, 4.0);
    }

    #[test]
    fn radii_defaults() {
        let s = ExtrapolationSpec::default();
        assert_eq!(s.planar_radii(10.0).unwrap(), vec![1e3, 2e3, 4e3, 8e3, 1.6e4]);
        assert_eq!(s.hyperbolic_radii(10.0).unwrap(), vec![40.0, 50.0, 60.0, 70.0, 80.0]);
        assert!(ExtrapolationSpec::with_radii(vec![1.0, 2.0]).planar_radii(1.0).is_err());
    }
}
