//! Quadrature on coordinate spheres with order-independent summation.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Product rule on the sphere: Gauss-Legendre in `cos(theta)`, periodic
/// trapezoid in `psi` (Gauss-Legendre when `psi_interval` is not a full turn).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_theta")]
    pub n_theta: usize,
    #[serde(default = "default_psi")]
    pub n_psi: usize,
    #[serde(default)]
    pub psi_interval: Option<(f64, f64)>,
}

fn default_theta() -> usize {
    64
}
fn default_psi() -> usize {
    128
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_theta: default_theta(),
            n_psi: default_psi(),
            psi_interval: None,
        }
    }
}

impl QuadratureSpec {
    pub fn new(n_theta: usize, n_psi: usize) -> Self {
        Self {
            n_theta,
            n_psi,
            psi_interval: None,
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_psi: 2 * self.n_psi,
            psi_interval: self.psi_interval,
        }
    }

    pub fn with_psi_interval(mut self, a: f64, b: f64) -> Self {
        self.psi_interval = Some((a, b));
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || self.n_psi < 16 {
            return Err(Error::parameter("quadrature", "requires n_theta >= 8 and n_psi >= 16"));
        }
        if let Some((a, b)) = self.psi_interval {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::parameter("psi_interval", format!("invalid interval ({a}, {b})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SphereNode {
    /// Unit outward normal `(sin th cos psi, sin th sin psi, cos th)`.
    pub n: [f64; 3],
    pub theta: f64,
    pub psi: f64,
    /// Weight for `dOmega = sin th dth dpsi`.
    pub weight: f64,
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn psi_nodes(spec: &QuadratureSpec) -> Vec<(f64, f64)> {
    match spec.psi_interval {
        Some((a, b)) if ((b - a) - 2.0 * PI).abs() > 1e-14 => {
            let gl = GaussLegendre::new(NonZeroUsize::new(spec.n_psi).expect("validated"));
            gl.as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w))
                .collect()
        }
        other => {
            let a = other.map_or(0.0, |(a, _)| a);
            let h = 2.0 * PI / spec.n_psi as f64;
            (0..spec.n_psi).map(|j| (a + h * j as f64, h)).collect()
        }
    }
}

/// Rows of nodes, one row per `theta` node.
pub fn sphere_nodes(spec: &QuadratureSpec) -> Result<Vec<Vec<SphereNode>>> {
    spec.validate()?;
    let gl = GaussLegendre::new(NonZeroUsize::new(spec.n_theta).expect("validated"));
    let psi = psi_nodes(spec);
    Ok(gl
        .as_node_weight_pairs()
        .iter()
        .map(|&(u, wu)| {
            let theta = u.clamp(-1.0, 1.0).acos();
            let s = (1.0 - u * u).max(0.0).sqrt();
            psi.iter()
                .map(|&(p, wp)| SphereNode {
                    n: [s * p.cos(), s * p.sin(), u],
                    theta,
                    psi: p,
                    weight: wu * wp,
                })
                .collect()
        })
        .collect())
}

/// `int f dOmega` for `M` integrands at once; bitwise reproducible across thread counts.
pub fn sphere_integral<const M: usize, F>(spec: &QuadratureSpec, f: F) -> Result<[f64; M]>
where
    F: Fn(&SphereNode) -> Result<[f64; M]> + Sync,
{
    let rows = sphere_nodes(spec)?;
    let partial: Vec<Result<[f64; M]>> = rows
        .par_iter()
        .map(|row| {
            let mut acc = [CompensatedSum::default(); M];
            for node in row {
                let v = f(node)?;
                for m in 0..M {
                    acc[m].add(node.weight * v[m]);
                }
            }
            Ok(std::array::from_fn(|m| acc[m].value()))
        })
        .collect();
    let mut acc = [CompensatedSum::default(); M];
    for p in partial {
        let p = p?;
        for m in 0..M {
            acc[m].add(p[m]);
        }
    }
    let out: [f64; M] = std::array::from_fn(|m| acc[m].value());
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sphere integral".into()));
    }
    Ok(out)
}

/// `int f r^2 dOmega` over the coordinate sphere of radius `r`; `f` receives the point and node.
pub fn surface_integral<F>(spec: &QuadratureSpec, r: f64, f: F) -> Result<f64>
where
    F: Fn(&[f64; 3], &SphereNode) -> Result<f64> + Sync,
{
    let [v] = sphere_integral(spec, |node| Ok([f(&node.n.map(|c| c * r), node)?]))?;
    Ok(v * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_and_moments() {
        let q = QuadratureSpec::default();
        let [a, z2, xy] = sphere_integral(&q, |n| Ok([1.0, n.n[2] * n.n[2], n.n[0] * n.n[1]])).unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-13);
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(xy.abs() < 1e-14);
    }

    #[test]
    fn surface_examples() {
        let q = QuadratureSpec::default();
        assert!((surface_integral(&q, 2.0, |_, _| Ok(1.0)).unwrap() - 16.0 * PI).abs() < 1e-12);
        assert!((surface_integral(&q, 1.0, |x, _| Ok(x[2] * x[2])).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn partial_interval_uses_gauss_legendre() {
        let q = QuadratureSpec::new(16, 32).with_psi_interval(0.0, 3.0);
        let [v] = sphere_integral(&q, |n| Ok([n.psi.cos()])).unwrap();
        assert!((v - 2.0 * 3f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }
}
