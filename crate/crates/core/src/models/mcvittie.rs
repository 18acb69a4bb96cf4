//! McVittie spacetime in isotropic planar coordinates:
//! `-((1-u)/(1+u))^2 dt^2 + A^2 (1+u)^4 delta`, `u = m / (2 A r)`, `A = e^{t/lambda}`.

use num_dual::{Dual2SVec64, DualNum};

use crate::ad::{cst, mat_jet2, Real};
use crate::error::{check_lambda, Error, Result};
use crate::initial_data::{Conformal, InitialDataSet};
use crate::tensor::{Background, CoordSystem, Mat4, Metric4Field, MetricField3, TensorField3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McVittie {
    pub m: f64,
    pub lambda: f64,
}

impl McVittie {
    pub fn new(m: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::parameter("m", format!("must be non-negative, got {m}")));
        }
        Ok(Self { m, lambda })
    }

    /// Radius `m / (2A)` of the minimal sphere on the slice `t`.
    pub fn throat_radius(&self, t: f64) -> f64 {
        self.m / (2.0 * (t / self.lambda).exp())
    }

    fn metric_generic<D: Real>(&self, x: [D; 4]) -> [[D; 4]; 4] {
        let a = (x[0] / self.lambda).exp();
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        let u = (a * r * 2.0).recip() * self.m;
        let one = cst::<D>(1.0);
        let lapse = (one - u) / (one + u);
        let s = a * a * (one + u).powi(4);
        let z = cst::<D>(0.0);
        [
            [-lapse * lapse, z, z, z],
            [z, s, z, z],
            [z, z, s, z],
            [z, z, z, s],
        ]
    }

    /// Spacetime metric with exact jets, restricted to `r > m/(2A) (1 - 1e-8)`.
    pub fn metric4(&self) -> Metric4Field {
        let me = *self;
        let check = move |x: &[f64; 4]| -> Result<()> {
            let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            if r <= me.throat_radius(x[0]) * (1.0 - 1e-8) {
                return Err(Error::domain("mcvittie", x, "inside the minimal sphere"));
            }
            Ok(())
        };
        Metric4Field::from_jet(move |x| {
            check(x)?;
            mat_jet2(|y: [Dual2SVec64<4>; 4]| Ok(me.metric_generic(y)), *x)
        })
        .with_lapse_sign(move |x| {
            let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            if r >= me.throat_radius(x[0]) { 1.0 } else { -1.0 }
        })
    }

    /// Metric value only (for finite-difference checks).
    pub fn metric4_value(&self, x: &[f64; 4]) -> Mat4 {
        let m = self.metric_generic(*x);
        Mat4::from_fn(|i, j| m[i][j])
    }

    /// Slice `t`: `g = A^2 (1+u)^4 delta`, `K = g / lambda`, `h = 0`, valid for all `r > 0`.
    pub fn slice(&self, t: f64) -> Result<InitialDataSet> {
        let a = (t / self.lambda).exp();
        let a2 = a * a;
        let m = self.m;
        let dev = move |x: &[f64; 3]| -> Result<f64> {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r == 0.0 {
                return Err(Error::domain("mcvittie", x, "r = 0"));
            }
            let u = m / (2.0 * a * r);
            // (1 + u)^4 - 1 without cancellation
            Ok(a2 * u * (4.0 + u * (6.0 + u * (4.0 + u))))
        };
        let jet = move |x: &[f64; 3]| {
            dev(x)?;
            crate::ad::mat_jet2(
                |y: [Dual2SVec64<3>; 3]| {
                    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                    let u = r.recip() * (m / (2.0 * a));
                    let v = u * (u * (u * (u + 4.0) + 6.0) + 4.0) * a2;
                    let z = Dual2SVec64::<3>::from_re(0.0);
                    Ok([[v, z, z], [z, v, z], [z, z, v]])
                },
                *x,
            )
        };
        let g = TensorField3::from_background(Background::Identity(a2), CoordSystem::Cartesian).with_deviation_jet(jet);
        let d = InitialDataSet::from_momentum(
            MetricField3::new(g),
            TensorField3::zero(CoordSystem::Cartesian),
            3.0 / (self.lambda * self.lambda),
            Conformal::Planar { factor: a },
            "mcvittie",
        )?;
        Ok(d.with_inner_radius(self.throat_radius(t)))
    }

    /// Closed-form finite-radius energy `(m/A)(1 + u)^3` of the conformal metric.
    pub fn energy_at_radius(&self, t: f64, r: f64) -> f64 {
        let a = (t / self.lambda).exp();
        let u = self.m / (2.0 * a * r);
        self.m / a * (1.0 + u).powi(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{slice_geometry, DerivativeConfig};

    #[test]
    fn slice_geometry_gives_g_over_lambda() {
        let mc = McVittie::new(1.0, 10.0).unwrap();
        let g4 = mc.metric4();
        for (t, x) in [(0.0, [0.3, 2.0, -1.0]), (10f64 * 2f64.ln(), [5.0, 1.0, 0.2]), (5.0, [0.0, 0.0, 40.0])] {
            let s = slice_geometry(&g4, t, &x, &DerivativeConfig::default()).unwrap();
            let rel = (s.k - s.g / 10.0).abs().max() / s.g.abs().max();
            assert!(rel < 1e-14, "{rel:e}");
        }
    }

    #[test]
    fn interior_evaluation_rejected() {
        let mc = McVittie::new(1.0, 10.0).unwrap();
        assert!(matches!(mc.metric4().value(&[0.0, 0.1, 0.0, 0.0]), Err(Error::Domain { .. })));
    }

    #[test]
    fn slice_deviation_matches_total() {
        let mc = McVittie::new(1.0, 10.0).unwrap();
        let d = mc.slice(5.0).unwrap();
        let x = [3.0, -1.0, 2.0];
        let a = 0.5f64.exp();
        let r = 14f64.sqrt();
        let expect = a * a * (1.0 + 1.0 / (2.0 * a * r)).powi(4);
        assert!((d.g.value(&x).unwrap()[(1, 1)] - expect).abs() < 1e-14 * expect);
    }
}
