//! Christoffel symbols and curvature from a metric jet.
//!
//! Index conventions: `christoffel[i][j][k] = Gamma^i_{jk}`,
//! `riemann[i][j][k][l] = R_{ijkl} = g_{im} R^m_{jkl}` with
//! `R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}`,
//! `Ric_{jl} = R^i_{jil}` and `R = g^{jl} Ric_{jl}` (the round sphere is positive).

use nalgebra::SMatrix;

use super::diff::DerivativeConfig;
use super::fields::{positive_inverse, Metric4Field, MetricField3, Point3, Point4};
use crate::error::{Error, Result};

pub type Christoffel<const N: usize> = [[[f64; N]; N]; N];

#[derive(Clone, Debug)]
pub struct Curvature<const N: usize> {
    pub metric: SMatrix<f64, N, N>,
    pub inverse: SMatrix<f64, N, N>,
    pub christoffel: Christoffel<N>,
    pub riemann: [[[[f64; N]; N]; N]; N],
    pub ricci: SMatrix<f64, N, N>,
    pub scalar: f64,
}

/// `Gamma^i_{jk}` from the inverse metric and first derivatives.
pub fn christoffel<const N: usize>(inv: &SMatrix<f64, N, N>, dg: &[SMatrix<f64, N, N>; N]) -> Christoffel<N> {
    let mut low = [[[0.0; N]; N]; N];
    for l in 0..N {
        for j in 0..N {
            for k in 0..N {
                low[l][j][k] = 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
            }
        }
    }
    let mut gam = [[[0.0; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in j..N {
                let mut s = 0.0;
                for l in 0..N {
                    s += inv[(i, l)] * low[l][j][k];
                }
                gam[i][j][k] = s;
                gam[i][k][j] = s;
            }
        }
    }
    gam
}

/// Full curvature from value, first and second derivatives of the metric.
pub fn curvature_from_jet<const N: usize>(
    g: &SMatrix<f64, N, N>,
    inv: &SMatrix<f64, N, N>,
    dg: &[SMatrix<f64, N, N>; N],
    ddg: &[[SMatrix<f64, N, N>; N]; N],
) -> Curvature<N> {
    let gam = christoffel(inv, dg);
    // d_m g^{il}
    let dinv: [SMatrix<f64, N, N>; N] = std::array::from_fn(|m| -(inv * dg[m] * inv));
    // dgam[m][i][j][k] = d_m Gamma^i_{jk}
    let mut dgam = [[[[0.0; N]; N]; N]; N];
    for m in 0..N {
        let mut low = [[[0.0; N]; N]; N];
        let mut dlow = [[[0.0; N]; N]; N];
        for l in 0..N {
            for j in 0..N {
                for k in 0..N {
                    low[l][j][k] = 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    dlow[l][j][k] = 0.5 * (ddg[m][j][(l, k)] + ddg[m][k][(l, j)] - ddg[m][l][(j, k)]);
                }
            }
        }
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    let mut s = 0.0;
                    for l in 0..N {
                        s += dinv[m][(i, l)] * low[l][j][k] + inv[(i, l)] * dlow[l][j][k];
                    }
                    dgam[m][i][j][k] = s;
                }
            }
        }
    }
    let mut up = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for l in 0..N {
                    let mut s = dgam[k][i][l][j] - dgam[l][i][k][j];
                    for m in 0..N {
                        s += gam[i][k][m] * gam[m][l][j] - gam[i][l][m] * gam[m][k][j];
                    }
                    up[i][j][k][l] = s;
                }
            }
        }
    }
    let mut riemann = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for l in 0..N {
                    let mut s = 0.0;
                    for m in 0..N {
                        s += g[(i, m)] * up[m][j][k][l];
                    }
                    riemann[i][j][k][l] = s;
                }
            }
        }
    }
    let mut ricci = SMatrix::<f64, N, N>::zeros();
    for j in 0..N {
        for l in 0..N {
            let mut s = 0.0;
            for i in 0..N {
                s += up[i][j][i][l];
            }
            ricci[(j, l)] = s;
        }
    }
    // Symmetrize away round-off.
    ricci = (ricci + ricci.transpose()) * 0.5;
    let scalar = (inv.component_mul(&ricci)).sum();
    Curvature {
        metric: *g,
        inverse: *inv,
        christoffel: gam,
        riemann,
        ricci,
        scalar,
    }
}

/// Intrinsic curvature of a Riemannian 3-metric at `x`.
pub fn curvature3(g: &MetricField3, x: &Point3, cfg: &DerivativeConfig) -> Result<Curvature<3>> {
    let (gv, inv) = g.value_inverse(x)?;
    let dg = g.first_derivatives(x, cfg)?;
    let ddg = g.second_derivatives(x, cfg)?;
    Ok(curvature_from_jet(&gv, &inv, &dg, &ddg))
}

/// Spacetime curvature of a Lorentzian metric at `x`.
pub fn curvature4(g: &Metric4Field, x: &Point4, cfg: &DerivativeConfig) -> Result<Curvature<4>> {
    let gv = g.value(x)?;
    let det = gv.determinant();
    if !(det < 0.0) {
        return Err(Error::Signature {
            point: x.to_vec(),
            detail: format!("determinant {det:e} is not negative"),
        });
    }
    let inv = gv.try_inverse().ok_or_else(|| Error::DegenerateMetric {
        point: x.to_vec(),
        detail: "singular spacetime metric".into(),
    })?;
    let dg = g.first_derivatives(x, cfg)?;
    let ddg = g.second_derivatives(x, cfg)?;
    Ok(curvature_from_jet(&gv, &inv, &dg, &ddg))
}

/// `Ric - Lambda g` of a spacetime metric; vanishes for vacuum with cosmological constant.
pub fn einstein_lambda_residual(g: &Metric4Field, x: &Point4, cc: f64, cfg: &DerivativeConfig) -> Result<f64> {
    let c = curvature4(g, x, cfg)?;
    Ok((c.ricci - c.metric * cc).abs().max())
}

pub(crate) fn inverse3(g: &nalgebra::Matrix3<f64>, x: &Point3) -> Result<nalgebra::Matrix3<f64>> {
    positive_inverse(g, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::fields::{Background, CoordSystem, TensorField3};

    fn hyperbolic(lambda: f64) -> MetricField3 {
        MetricField3::new(TensorField3::from_background(
            Background::HyperbolicPolar { lambda, scale: 1.0 },
            CoordSystem::PolarSpherical,
        ))
    }

    #[test]
    fn hyperbolic_space_has_constant_negative_curvature() {
        let lambda = 10.0;
        let c = curvature3(&hyperbolic(lambda), &[10.0, 0.9, 0.3], &DerivativeConfig::default()).unwrap();
        assert!((c.scalar + 6.0 / (lambda * lambda)).abs() < 1e-14);
        let g = c.metric;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let model = -(g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]) / (lambda * lambda);
                        assert!((c.riemann[i][j][k][l] - model).abs() < 1e-10 * (1.0 + model.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_hand_value() {
        let c = curvature3(&hyperbolic(10.0), &[10.0, std::f64::consts::FRAC_PI_2, 0.0], &DerivativeConfig::default())
            .unwrap();
        let expect = -10.0 * 1f64.sinh() * 1f64.cosh();
        assert!((c.christoffel[0][1][1] - expect).abs() < 1e-12);
    }

    #[test]
    fn round_sphere_like_slice_positive() {
        // Round 3-sphere of radius a in hyperspherical coordinates.
        let a = 2.0;
        let g = MetricField3::new(TensorField3::from_fn(CoordSystem::Curvilinear, move |x| {
            let s = x[0].sin();
            let st = x[1].sin();
            Ok(nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(
                a * a,
                a * a * s * s,
                a * a * s * s * st * st,
            )))
        }));
        let c = curvature3(&g, &[1.1, 0.7, 0.2], &DerivativeConfig::default()).unwrap();
        assert!((c.scalar - 6.0 / (a * a)).abs() < 1e-6);
    }
}
