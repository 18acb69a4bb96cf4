//! Constraint densities, the momentum tensor h and the generalized densities.

use serde::Serialize;

use super::curvature::{christoffel, curvature3, inverse3, Christoffel};
use super::diff::DerivativeConfig;
use super::fields::{GeneralTensorField3, Mat3, MetricField3, Point3, SymTensorField3};
use crate::error::{check_cosmological_constant, Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstraintSample {
    pub t00: f64,
    pub t0i: [f64; 3],
    /// `|T_0i|_g`.
    pub t0i_norm: f64,
    pub trace_k: f64,
    /// `T00 - |T0i|_g`.
    pub dec_margin: f64,
    /// `sqrt(3 Lambda) - tr K`.
    pub mc_margin: f64,
}

fn covector_norm(inv: &Mat3, v: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += inv[(i, j)] * v[i] * v[j];
        }
    }
    s.max(0.0).sqrt()
}

/// `nabla_k T_ij` for a (not necessarily symmetric) covariant 2-tensor.
fn covariant_derivative(t: &Mat3, dt: &[Mat3; 3], gam: &Christoffel<3>) -> [Mat3; 3] {
    std::array::from_fn(|k| {
        let mut out = dt[k];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for m in 0..3 {
                    s += gam[m][k][i] * t[(m, j)] + gam[m][k][j] * t[(i, m)];
                }
                out[(i, j)] -= s;
            }
        }
        out
    })
}

/// Energy and momentum densities of data (g, K) with cosmological constant `cc`.
pub fn constraints(
    g: &MetricField3,
    k: &SymTensorField3,
    cc: f64,
    x: &Point3,
    cfg: &DerivativeConfig,
) -> Result<ConstraintSample> {
    check_cosmological_constant(cc)?;
    let curv = curvature3(g, x, cfg)?;
    let inv = curv.inverse;
    let kv = k.value(x)?;
    let dk = k.first_derivatives(x, cfg)?;
    let kup = inv * kv * inv;
    let tr = inv.component_mul(&kv).sum();
    let norm2 = kup.component_mul(&kv).sum();
    let t00 = 0.5 * (curv.scalar + tr * tr - norm2 - 2.0 * cc);
    let nk = covariant_derivative(&kv, &dk, &curv.christoffel);
    let mut t0i = [0.0; 3];
    for i in 0..3 {
        let mut s = 0.0;
        for j in 0..3 {
            for m in 0..3 {
                s += inv[(j, m)] * nk[m][(i, j)];
            }
        }
        // d_i tr K = g^{jm} nabla_i K_jm
        let mut dtr = 0.0;
        for j in 0..3 {
            for m in 0..3 {
                dtr += inv[(j, m)] * nk[i][(j, m)];
            }
        }
        t0i[i] = s - dtr;
    }
    let t0i_norm = covector_norm(&inv, &t0i);
    Ok(ConstraintSample {
        t00,
        t0i,
        t0i_norm,
        trace_k: tr,
        dec_margin: t00 - t0i_norm,
        mc_margin: (3.0 * cc).sqrt() - tr,
    })
}

/// Which background extrinsic curvature is subtracted from K.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MomentumVariant {
    /// `h = K - sqrt(Lambda/3) g`.
    Planar,
    /// `h = K - coth(T/lambda)/lambda g` on the slice `T`.
    Hyperbolic { t: f64 },
}

/// Coefficient `c` in `h = K - c g`.
pub fn momentum_coefficient(cc: f64, variant: MomentumVariant) -> Result<f64> {
    check_cosmological_constant(cc)?;
    let lambda = (3.0 / cc).sqrt();
    match variant {
        MomentumVariant::Planar => Ok(1.0 / lambda),
        MomentumVariant::Hyperbolic { t } => {
            if t == 0.0 || !t.is_finite() {
                return Err(Error::SingularSlice(format!("hyperbolic slice T = {t}")));
            }
            Ok(1.0 / ((t / lambda).tanh() * lambda))
        }
    }
}

/// `h = K - c g` as a field.
pub fn momentum_tensor_h(
    g: &MetricField3,
    k: &SymTensorField3,
    cc: f64,
    variant: MomentumVariant,
) -> Result<SymTensorField3> {
    let c = momentum_coefficient(cc, variant)?;
    Ok(k.combine(1.0, g, -c))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeneralizedDensities {
    pub mu: f64,
    pub omega: [f64; 3],
    pub chi: [f64; 3],
    /// `mu - max(|omega|, |omega + chi|)`.
    pub gdec_margin: f64,
}

/// Densities of a general 2-tensor `p` on `(M, gbar)`.
pub fn generalized_densities(
    gbar: &MetricField3,
    p: &GeneralTensorField3,
    x: &Point3,
    cfg: &DerivativeConfig,
) -> Result<GeneralizedDensities> {
    let curv = curvature3(gbar, x, cfg)?;
    let inv = curv.inverse;
    let pv = p.value(x)?;
    let dp = p.first_derivatives(x, cfg)?;
    let tr = inv.component_mul(&pv).sum();
    let pup = inv * pv * inv;
    let norm2 = pup.component_mul(&pv).sum();
    let mu = 0.5 * (curv.scalar + tr * tr - norm2);
    let np = covariant_derivative(&pv, &dp, &curv.christoffel);
    let mut omega = [0.0; 3];
    let mut chi = [0.0; 3];
    for j in 0..3 {
        let (mut div, mut dtr, mut anti) = (0.0, 0.0, 0.0);
        for i in 0..3 {
            for k in 0..3 {
                // nabla^i p_ji = g^{ik} nabla_k p_ji
                div += inv[(i, k)] * np[k][(j, i)];
                dtr += inv[(i, k)] * np[j][(i, k)];
                anti += inv[(i, k)] * (np[k][(i, j)] - np[k][(j, i)]);
            }
        }
        omega[j] = div - dtr;
        chi[j] = if p.antisymmetric.is_some() { 2.0 * anti } else { 0.0 };
    }
    let sum: [f64; 3] = std::array::from_fn(|i| omega[i] + chi[i]);
    let m = covector_norm(&inv, &omega).max(covector_norm(&inv, &sum));
    Ok(GeneralizedDensities {
        mu,
        omega,
        chi,
        gdec_margin: mu - m,
    })
}

/// Christoffel symbols of a 3-metric at a point.
pub fn christoffel3(g: &MetricField3, x: &Point3, cfg: &DerivativeConfig) -> Result<(Mat3, Mat3, Christoffel<3>)> {
    let gv = g.value(x)?;
    let inv = inverse3(&gv, x)?;
    let dg = g.first_derivatives(x, cfg)?;
    Ok((gv, inv, christoffel(&inv, &dg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::fields::{Background, CoordSystem, TensorField3};

    fn flat() -> MetricField3 {
        MetricField3::euclidean()
    }

    #[test]
    fn flat_time_symmetric_data() {
        let k = TensorField3::zero(CoordSystem::Cartesian);
        let s = constraints(&flat(), &k, 0.03, &[0.3, -1.0, 2.0], &DerivativeConfig::default()).unwrap();
        assert!((s.t00 + 0.03).abs() < 1e-15);
        assert!((s.mc_margin - 0.3).abs() < 1e-15);
        assert!(s.t0i_norm < 1e-15);
    }

    #[test]
    fn nonpositive_cosmological_constant_rejected() {
        let k = TensorField3::zero(CoordSystem::Cartesian);
        assert!(matches!(
            constraints(&flat(), &k, 0.0, &[0.0; 3], &DerivativeConfig::default()),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn momentum_density_of_linear_k() {
        // K = x^1 (dx^2 dx^2): T0i = d^j K_ij - d_i tr K = (-1, 0, 0).
        let k = TensorField3::from_fn(CoordSystem::Cartesian, |x| {
            let mut m = Mat3::zeros();
            m[(1, 1)] = x[0];
            Ok(m)
        });
        let s = constraints(&flat(), &k, 1.0, &[0.4, 0.1, 0.2], &DerivativeConfig::default()).unwrap();
        assert!((s.t0i[0] + 1.0).abs() < 1e-9);
        assert!(s.t0i[1].abs() < 1e-9 && s.t0i[2].abs() < 1e-9);
        assert!((s.t00 - 0.5 * (0.16 - 0.16 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_x3_example() {
        let p = GeneralTensorField3 {
            symmetric: TensorField3::zero(CoordSystem::Cartesian),
            antisymmetric: Some(TensorField3::from_fn(CoordSystem::Cartesian, |x| {
                let mut m = Mat3::zeros();
                m[(0, 1)] = x[2];
                m[(1, 0)] = -x[2];
                Ok(m)
            })),
        };
        let x = [0.2, 0.5, 0.7];
        let d = generalized_densities(&flat(), &p, &x, &DerivativeConfig::default()).unwrap();
        assert!((d.mu + 0.49).abs() < 1e-12);
        assert!(d.chi.iter().all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn antisymmetric_divergence_example() {
        // p_12 = -p_21 = x^2: chi_1 = 2 d^2(p_21 - p_12) = -4, omega_1 = d^2 p_12 = 1.
        let p = GeneralTensorField3 {
            symmetric: TensorField3::zero(CoordSystem::Cartesian),
            antisymmetric: Some(TensorField3::from_fn(CoordSystem::Cartesian, |x| {
                let mut m = Mat3::zeros();
                m[(0, 1)] = x[1];
                m[(1, 0)] = -x[1];
                Ok(m)
            })),
        };
        let d = generalized_densities(&flat(), &p, &[0.1, 0.3, -0.2], &DerivativeConfig::default()).unwrap();
        assert!((d.omega[0] - 1.0).abs() < 1e-9);
        assert!((d.chi[0] + 4.0).abs() < 1e-9);
        assert!((d.gdec_margin - (d.mu - 3.0)).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_coefficient_singular_at_zero() {
        assert!(matches!(
            momentum_coefficient(0.03, MomentumVariant::Hyperbolic { t: 0.0 }),
            Err(Error::SingularSlice(_))
        ));
        let g = MetricField3::new(TensorField3::from_background(Background::Identity(4.0), CoordSystem::Cartesian));
        let k = g.scaled(0.1);
        let h = momentum_tensor_h(&g, &k, 0.03, MomentumVariant::Planar).unwrap();
        assert!(h.value(&[1.0, 2.0, 3.0]).unwrap().abs().max() < 1e-15);
    }
}
