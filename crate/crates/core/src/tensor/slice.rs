//! Induced data on the level sets `x^0 = t` of a spacetime metric.

use nalgebra::Vector3;

use super::curvature::christoffel;
use super::diff::DerivativeConfig;
use super::fields::{CoordSystem, Mat3, Metric4Field, MetricField3, Point3, SymTensorField3, TensorField3};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SliceGeometry {
    pub g: Mat3,
    pub lapse: f64,
    /// `N_i = g_{0i}`.
    pub shift: [f64; 3],
    pub k: Mat3,
}

/// Lapse, shift, induced metric and extrinsic curvature at `(t, x)`.
///
/// `K_ij = (d_t g_ij - nabla_i N_j - nabla_j N_i) / (2N)`, so that expanding
/// slices have positive mean curvature with respect to the future normal.
pub fn slice_geometry(g4: &Metric4Field, t: f64, x: &Point3, cfg: &DerivativeConfig) -> Result<SliceGeometry> {
    let p = [t, x[0], x[1], x[2]];
    let m = g4.value(&p)?;
    let g = m.fixed_view::<3, 3>(1, 1).into_owned();
    let inv = nalgebra::Cholesky::new(g)
        .ok_or_else(|| Error::Signature {
            point: p.to_vec(),
            detail: "level set is not spacelike".into(),
        })?
        .inverse();
    let shift = Vector3::new(m[(0, 1)], m[(0, 2)], m[(0, 3)]);
    let n2 = (shift.transpose() * inv * shift)[(0, 0)] - m[(0, 0)];
    if !(n2 > 0.0) {
        return Err(Error::Signature {
            point: p.to_vec(),
            detail: format!("squared lapse {n2:e} is not positive"),
        });
    }
    let lapse = g4.lapse_sign(&p) * n2.sqrt();
    let d4 = g4.first_derivatives(&p, cfg)?;
    let dg: [Mat3; 3] = std::array::from_fn(|i| d4[i + 1].fixed_view::<3, 3>(1, 1).into_owned());
    let gam = christoffel(&inv, &dg);
    let dt = d4[0].fixed_view::<3, 3>(1, 1).into_owned();
    let mut k = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut cov = d4[i + 1][(0, j + 1)] + d4[j + 1][(0, i + 1)];
            for l in 0..3 {
                cov -= 2.0 * gam[l][i][j] * shift[l];
            }
            k[(i, j)] = (dt[(i, j)] - cov) / (2.0 * lapse);
        }
    }
    Ok(SliceGeometry {
        g,
        lapse,
        shift: [shift[0], shift[1], shift[2]],
        k,
    })
}

/// Induced metric and extrinsic curvature of the slice `x^0 = t` as fields.
pub fn slice_fields(
    g4: &Metric4Field,
    t: f64,
    coords: CoordSystem,
    cfg: DerivativeConfig,
) -> (MetricField3, SymTensorField3) {
    let a = g4.clone();
    let g = TensorField3::from_fn(coords, move |x| {
        let m = a.value(&[t, x[0], x[1], x[2]])?;
        Ok(m.fixed_view::<3, 3>(1, 1).into_owned())
    });
    let b = g4.clone();
    let k = TensorField3::from_fn(coords, move |x| Ok(slice_geometry(&b, t, x, &cfg)?.k));
    (MetricField3::new(g), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::fields::Mat4;

    #[test]
    fn planar_de_sitter_has_k_equal_g_over_lambda() {
        let lambda = 10.0;
        let g4 = Metric4Field::from_fn(move |p| {
            let a2 = (2.0 * p[0] / lambda).exp();
            Ok(Mat4::from_diagonal(&nalgebra::Vector4::new(-1.0, a2, a2, a2)))
        });
        let s = slice_geometry(&g4, 1.3, &[0.2, 4.0, -1.0], &DerivativeConfig::default()).unwrap();
        assert!((s.k - s.g / lambda).abs().max() < 1e-10);
        assert!((s.lapse - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boosted_shift_is_accounted_for() {
        // Minkowski in coordinates t' = t, x' = x - v t: the slices stay flat with K = 0.
        let v = 0.3;
        let g4 = Metric4Field::from_fn(move |_| {
            let mut m = Mat4::identity();
            m[(0, 0)] = -1.0 + v * v;
            m[(0, 1)] = v;
            m[(1, 0)] = v;
            Ok(m)
        });
        let s = slice_geometry(&g4, 0.0, &[1.0, 2.0, 3.0], &DerivativeConfig::default()).unwrap();
        assert!(s.k.abs().max() < 1e-12);
        assert!((s.lapse - 1.0).abs() < 1e-14);
    }

    #[test]
    fn timelike_level_set_rejected() {
        let g4 = Metric4Field::from_fn(|_| Ok(Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, 1.0))));
        assert!(matches!(
            slice_geometry(&g4, 0.0, &[0.0; 3], &DerivativeConfig::default()),
            Err(Error::Signature { .. })
        ));
    }
}
