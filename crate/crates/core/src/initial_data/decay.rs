//! Empirical decay rates of the reduced data.

use serde::Serialize;

use super::{conformal_decompose, ConformalData, InitialDataSet};
use crate::error::{Error, Result};
use crate::tensor::{Mat3, Point3};

/// Number of sample directions per radius.
pub const DECAY_DIRECTIONS: usize = 256;
/// Norms below this are treated as exactly zero.
pub const EXACT_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    /// Fitted rate; `None` when the quantity vanishes identically.
    pub tau: Option<f64>,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub radii: Vec<f64>,
    pub norms: Vec<f64>,
    pub exact: bool,
    /// Norms failed to decrease with radius.
    pub failed: bool,
    /// Whether the fitted rate exceeds the admissible threshold.
    pub meets_threshold: bool,
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    /// `gbar - background` (rate tau).
    pub metric: DecayFit,
    /// `hbar` (rate tau + 1 on planar ends, tau on hyperbolic ends).
    pub momentum: DecayFit,
}

/// Quasi-uniform unit vectors (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [s * phi.cos(), s * phi.sin(), z]
        })
        .collect()
}

fn sample_point(cd: &ConformalData, r: f64, n: &[f64; 3]) -> Point3 {
    if cd.is_hyperbolic() {
        let th = n[2].clamp(-1.0, 1.0).acos();
        let mut ps = n[1].atan2(n[0]);
        if ps < 0.0 {
            ps += 2.0 * std::f64::consts::PI;
        }
        [r, th, ps]
    } else {
        [cd.z[0] + r * n[0], cd.z[1] + r * n[1], cd.z[2] + r * n[2]]
    }
}

fn sup_norm<F>(cd: &ConformalData, r: f64, dirs: &[[f64; 3]], f: F) -> Result<f64>
where
    F: Fn(&ConformalData, &Point3) -> Result<Mat3>,
{
    let mut m: f64 = 0.0;
    for n in dirs {
        m = m.max(f(cd, &sample_point(cd, r, n))?.norm());
    }
    Ok(m)
}

fn fit(radii: &[f64], norms: &[f64], hyperbolic: bool, lambda: f64, threshold: f64) -> DecayFit {
    let exact = norms.iter().all(|v| *v < EXACT_FLOOR);
    let failed = !exact && norms.windows(2).any(|w| w[1] >= w[0]);
    let mut out = DecayFit {
        tau: None,
        residual: 0.0,
        radii: radii.to_vec(),
        norms: norms.to_vec(),
        exact,
        failed,
        meets_threshold: exact,
        threshold,
    };
    if exact || norms.iter().any(|v| *v <= 0.0) {
        return out;
    }
    let xs: Vec<f64> = radii
        .iter()
        .map(|r| if hyperbolic { r / lambda } else { r.ln() })
        .collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    out.tau = Some(-slope);
    out.residual = rms;
    out.meets_threshold = !failed && -slope > threshold;
    out
}

/// Fit `|gbar - background| ~ r^{-tau}` and `|hbar| ~ r^{-tau_h}` over the given radii
/// (`e^{-tau R/lambda}` on hyperbolic ends).
pub fn decay_fit(d: &InitialDataSet, radii: &[f64]) -> Result<DecayReport> {
    if radii.len() < 2 {
        return Err(Error::parameter("radii", "need at least two radii"));
    }
    let cd = conformal_decompose(d)?;
    let dirs = fibonacci_directions(DECAY_DIRECTIONS);
    let hyp = cd.is_hyperbolic();
    let mut gn = Vec::with_capacity(radii.len());
    let mut hn = Vec::with_capacity(radii.len());
    for &r in radii {
        gn.push(sup_norm(&cd, r, &dirs, |c, x| c.metric_deviation(x))?);
        hn.push(sup_norm(&cd, r, &dirs, |c, x| c.hbar_orthonormal(x))?);
    }
    let (tg, th) = if hyp { (1.5, 1.5) } else { (0.5, 1.5) };
    Ok(DecayReport {
        metric: fit(radii, &gn, hyp, cd.lambda, tg),
        momentum: fit(radii, &hn, hyp, cd.lambda, th),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_directions_are_unit_and_balanced() {
        let d = fibonacci_directions(256);
        let mut c = [0.0; 3];
        for v in &d {
            assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0).abs() < 1e-14);
            for i in 0..3 {
                c[i] += v[i] / 256.0;
            }
        }
        assert!(c.iter().all(|x| x.abs() < 1e-2));
    }

    #[test]
    fn log_linear_fit_recovers_power() {
        let radii = [1e2, 1e3, 1e4];
        let norms: Vec<f64> = radii.iter().map(|r: &f64| 3.0 * r.powf(-2.5)).collect();
        let f = fit(&radii, &norms, false, 10.0, 0.5);
        assert!((f.tau.unwrap() - 2.5).abs() < 1e-12);
        assert!(f.meets_threshold && !f.failed);
        let grow = fit(&radii, &[1.0, 2.0, 3.0], false, 10.0, 0.5);
        assert!(grow.failed && !grow.meets_threshold);
    }
}
