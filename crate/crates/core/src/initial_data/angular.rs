//! Angular momentum density `htilde^z`.

use serde::{Deserialize, Serialize};

use super::ConformalData;
use crate::error::{Error, Result};
use crate::tensor::{CoordSystem, Mat3, Point3};

/// Which Levi-Civita symbol enters `htilde^z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonConvention {
    /// Flat symbol, indices raised with `gbar`, and `d rho^2 = 2 (x - z)`.
    #[default]
    Flat,
    /// Volume form of `gbar`.
    MetricVolume,
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `htilde^z_ij = (1/2) eps_i^{uv} (d_u rho^2) (hbar_vj - gbar_vj tr hbar)` at a point of a Cartesian end.
pub fn angular_density(cd: &ConformalData, x: &Point3, convention: EpsilonConvention) -> Result<Mat3> {
    if cd.gbar.coords() != CoordSystem::Cartesian {
        return Err(Error::parameter("angular_density", "requires Cartesian end coordinates"));
    }
    let dx = [x[0] - cd.z[0], x[1] - cd.z[1], x[2] - cd.z[2]];
    if dx.iter().all(|v| *v == 0.0) {
        return Err(Error::UndefinedDirection);
    }
    let (g, inv) = cd.gbar.value_inverse(x)?;
    let h = cd.hbar.value(x)?;
    Ok(density_from_parts(&g, &inv, &h, &dx, convention))
}

/// [`angular_density`] from `gbar`, its inverse, `hbar` and `x - z`.
pub(crate) fn density_from_parts(g: &Mat3, inv: &Mat3, h: &Mat3, dx: &[f64; 3], convention: EpsilonConvention) -> Mat3 {
    let tr = inv.component_mul(h).sum();
    let pi = h - g * tr;
    let vol = match convention {
        EpsilonConvention::Flat => 1.0,
        EpsilonConvention::MetricVolume => g.determinant().sqrt(),
    };
    // w^v = eps_i^{uv} x_u for fixed i, i.e. eps_{iab} (g^{-1} x)^a g^{bv}.
    let xu = inv * nalgebra::Vector3::from(*dx);
    let mut out = Mat3::zeros();
    for i in 0..3 {
        let mut w = [0.0; 3];
        for v in 0..3 {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let e = levi_civita(i, a, b);
                    if e != 0.0 {
                        s += e * xu[a] * inv[(b, v)];
                    }
                }
            }
            w[v] = vol * s;
        }
        for j in 0..3 {
            out[(i, j)] = (0..3).map(|v| w[v] * pi[(v, j)]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{conformal_decompose, Conformal, InitialDataSet};
    use crate::tensor::{MetricField3, TensorField3};

    fn radial(f: fn(f64) -> f64) -> ConformalData {
        let h = TensorField3::from_fn(CoordSystem::Cartesian, move |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let n = nalgebra::Vector3::new(x[0], x[1], x[2]) / r;
            Ok(n * n.transpose() * f(r))
        });
        let d = InitialDataSet::from_momentum(
            MetricField3::euclidean(),
            h,
            0.03,
            Conformal::Planar { factor: 1.0 },
            "radial",
        )
        .unwrap();
        conformal_decompose(&d).unwrap()
    }

    #[test]
    fn radial_momentum_has_no_angular_flux() {
        let cd = radial(|r| 1.0 / (r * r * r));
        let x = [0.3, -1.2, 2.0];
        let ht = angular_density(&cd, &x, EpsilonConvention::Flat).unwrap();
        let r = (x.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let f = 1.0 / (r * r * r);
        for i in 0..3 {
            let flux: f64 = (0..3).map(|j| ht[(i, j)] * x[j] / r).sum();
            assert!(flux.abs() < 1e-15);
            for j in 0..3 {
                // htilde_ij = -f eps_{iuj} x_u
                let expect: f64 = -(0..3).map(|u| levi_civita(i, u, j) * x[u]).sum::<f64>() * f;
                assert!((ht[(i, j)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_free_and_undefined_at_z() {
        let cd = radial(|r| (-r).exp());
        let ht = angular_density(&cd, &[1.0, 0.5, -0.2], EpsilonConvention::MetricVolume).unwrap();
        assert!(ht.trace().abs() < 1e-15);
        assert!(matches!(
            angular_density(&cd, &[0.0; 3], EpsilonConvention::Flat),
            Err(Error::UndefinedDirection)
        ));
    }
}
