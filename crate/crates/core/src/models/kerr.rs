//! Kerr-de Sitter in Boyer-Lindquist coordinates `(tbar, rbar, thetabar, psibar)` and its
//! planar slices.
//!
//! With `ξ = 1 + a²/λ²`, `Δr = (r² + a²)(1 - r²/λ²) - 2 m r`, `Δθ = 1 + a² cos²θ / λ²`
//! and `U = r² + a² cos²θ`:
//!
//! `g = -(Δr/U)(dt - (a/ξ) sin²θ dψ)² + (U/Δr) dr² + (U/Δθ) dθ² + (Δθ sin²θ / U)(a dt - ((r² + a²)/ξ) dψ)²`.
//!
//! The hat coordinates `t̂ = t`, `r̂ cos θ̂ = r cos θ`, `ξ r̂² = r² + a² sin²θ + (a²/λ²) r² cos²θ`,
//! `ψ̂ = ψ - (a/λ²) t` turn the `m = 0` metric into static de Sitter, so the
//! mass-dependent part is a perturbation of de Sitter in any de Sitter chart.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_dual::{Dual2SVec64, DualNum, DualSVec64};
use serde::{Deserialize, Serialize};

use crate::ad::{cst, mat_jet2, vec_jacobian, Real};
use crate::charts::HORIZON_GUARD;
use crate::error::{check_lambda, Error, Result};
use crate::initial_data::{Conformal, InitialDataSet};
use crate::tensor::{diff, Background, CoordSystem, Mat3, Mat4, Metric4Field, MetricField3, TensorField3};

/// Maximum Newton iterations for the hat-to-BL inversion.
pub const NEWTON_MAX_ITER: usize = 50;
/// Relative residual accepted by the inversion.
pub const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiRange {
    /// `psi in [0, 2 pi)`.
    #[default]
    Standard,
    /// `psibar in [0, 2 pi)`, i.e. `psi in [-a tbar/λ², 2 pi ξ - a tbar/λ²)`.
    Shifted,
}

impl PsiRange {
    pub fn name(self) -> &'static str {
        match self {
            PsiRange::Standard => "standard",
            PsiRange::Shifted => "shifted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrDeSitter {
    pub m: f64,
    pub a: f64,
    pub lambda: f64,
}

impl KerrDeSitter {
    pub fn new(m: f64, a: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::parameter("m", format!("must be non-negative, got {m}")));
        }
        if !(a.is_finite() && a.abs() < lambda) {
            return Err(Error::parameter("a", format!("requires |a| < lambda, got {a}")));
        }
        Ok(Self { m, a, lambda })
    }

    pub fn xi(&self) -> f64 {
        1.0 + self.a * self.a / (self.lambda * self.lambda)
    }

    /// BL metric written with `c = cos(thetabar)` supplied separately from `thetabar`.
    fn bl_parts<D: Real>(&self, r: D, c: D, m: f64) -> [[D; 4]; 4] {
        let (a, l2, xi) = (self.a, self.lambda * self.lambda, self.xi());
        let s2 = cst::<D>(1.0) - c * c;
        let u = r * r + c * c * (a * a);
        let dr = (r * r + a * a) * (cst::<D>(1.0) - r * r / l2) - r * (2.0 * m);
        let dth = c * c * (a * a / l2) + 1.0;
        let ra = r * r + a * a;
        let z = cst::<D>(0.0);
        let tt = -dr / u + dth * s2 * (a * a) / u;
        let tp = dr / u * s2 * (a / xi) - dth * s2 * ra * (a / xi) / u;
        let pp = -dr / u * s2 * s2 * (a * a / (xi * xi)) + dth * s2 * ra * ra / (u * (xi * xi));
        [[tt, z, z, tp], [z, u / dr, z, z], [z, z, u / dth, z], [tp, z, z, pp]]
    }

    /// BL metric in `(tbar, rbar, thetabar, psibar)`.
    pub fn bl_metric_generic<D: Real>(&self, x: [D; 4]) -> [[D; 4]; 4] {
        self.bl_parts(x[1], x[2].cos(), self.m)
    }

    /// Mass-dependent part `a = g(m) - g(0)` in `(tbar, rbar, ., psibar)`; no theta components.
    pub fn bl_perturbation<D: Real>(&self, r: D, c: D) -> [[D; 4]; 4] {
        let (a, xi, m) = (self.a, self.xi(), self.m);
        let s2 = cst::<D>(1.0) - c * c;
        let u = r * r + c * c * (a * a);
        let l2 = self.lambda * self.lambda;
        let d0 = (r * r + a * a) * (cst::<D>(1.0) - r * r / l2);
        let dr = d0 - r * (2.0 * m);
        let two_mr_u = r * (2.0 * m) / u;
        let z = cst::<D>(0.0);
        let tt = two_mr_u;
        let tp = -two_mr_u * s2 * (a / xi);
        let pp = two_mr_u * s2 * s2 * (a * a / (xi * xi));
        let rr = u * r * (2.0 * m) / (dr * d0);
        [[tt, z, z, tp], [z, rr, z, z], [z, z, z, z], [tp, z, z, pp]]
    }

    /// BL metric as a spacetime field with exact jets.
    pub fn bl_metric4(&self) -> Metric4Field {
        let me = *self;
        Metric4Field::from_jet(move |x| {
            me.check_bl(x)?;
            mat_jet2(|y: [Dual2SVec64<4>; 4]| Ok(me.bl_metric_generic(y)), *x)
        })
    }

    /// BL metric without jets (finite-difference path).
    pub fn bl_metric4_fd(&self) -> Metric4Field {
        let me = *self;
        Metric4Field::from_fn(move |x| {
            me.check_bl(x)?;
            let g = me.bl_metric_generic(*x);
            Ok(Mat4::from_fn(|i, j| g[i][j]))
        })
    }

    fn check_bl(&self, x: &[f64; 4]) -> Result<()> {
        let r = x[1];
        let l2 = self.lambda * self.lambda;
        let dr = (r * r + self.a * self.a) * (1.0 - r * r / l2) - 2.0 * self.m * r;
        let scale = (r * r + self.a * self.a) * (1.0 + r * r / l2);
        if dr.abs() <= HORIZON_GUARD * scale {
            return Err(Error::Horizon { distance: dr.abs() });
        }
        if !(x[2] > 0.0 && x[2] < PI) {
            return Err(Error::domain("kerr-ds", x, "thetabar must lie in (0, pi)"));
        }
        Ok(())
    }

    /// BL to hat coordinates.
    pub fn bl_to_hat(&self, x: [f64; 4]) -> [f64; 4] {
        let [t, r, th, ps] = x;
        let (s, c) = th.sin_cos();
        let k = self.a * self.a / (self.lambda * self.lambda);
        let rh = ((r * r + self.a * self.a * s * s + k * r * r * c * c) / self.xi()).sqrt();
        let thh = if rh > 0.0 { (r * c / rh).clamp(-1.0, 1.0).acos() } else { th };
        [t, rh, thh, ps - self.a / (self.lambda * self.lambda) * t]
    }

    /// Generic version of [`Self::bl_to_hat`] (for Jacobians).
    pub fn bl_to_hat_generic<D: Real>(&self, x: [D; 4]) -> [D; 4] {
        let [t, r, th, ps] = x;
        let (s, c) = (th.sin(), th.cos());
        let k = self.a * self.a / (self.lambda * self.lambda);
        let rh = ((r * r + s * s * (self.a * self.a) + r * r * c * c * k) / self.xi()).sqrt();
        let thh = (r * c / rh).acos();
        [t, rh, thh, ps - t * (self.a / (self.lambda * self.lambda))]
    }

    /// Hat to BL: damped Newton on `(rbar, thetabar)` from `(sqrt(ξ) rhat, thetahat)`.
    pub fn hat_to_bl(&self, x: [f64; 4]) -> Result<[f64; 4]> {
        let [t, rh, thh, psh] = x;
        let (rb, thb) = self.invert_spheroidal(rh, thh)?;
        Ok([t, rb, thb, psh + self.a / (self.lambda * self.lambda) * t])
    }

    fn spheroidal_residual(&self, rh: f64, zh: f64, r: f64, th: f64) -> [f64; 2] {
        let (s, c) = th.sin_cos();
        let k = self.a * self.a / (self.lambda * self.lambda);
        [
            (r * c - zh) / rh,
            (r * r + self.a * self.a * s * s + k * r * r * c * c - self.xi() * rh * rh) / (2.0 * rh * rh),
        ]
    }

    /// `(rbar, thetabar)` from `(rhat, thetahat)`.
    pub fn invert_spheroidal(&self, rh: f64, thh: f64) -> Result<(f64, f64)> {
        if !(rh > 0.0 && rh.is_finite()) {
            return Err(Error::domain("kerr-ds", &[rh, thh], "requires rhat > 0"));
        }
        if thh == 0.0 || thh == PI {
            return Ok((rh, thh));
        }
        let zh = rh * thh.cos();
        let k = self.a * self.a / (self.lambda * self.lambda);
        let (mut r, mut th) = (self.xi().sqrt() * rh, thh);
        let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
        let mut f = self.spheroidal_residual(rh, zh, r, th);
        for it in 0..NEWTON_MAX_ITER {
            if norm(f) < NEWTON_TOL {
                return Ok((r, th));
            }
            let (s, c) = th.sin_cos();
            let j11 = c / rh;
            let j12 = -r * s / rh;
            let j21 = r * (1.0 + k * c * c) / (rh * rh);
            let j22 = (self.a * self.a - k * r * r) * s * c / (rh * rh);
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                return Err(Error::Inversion {
                    residual: norm(f),
                    iterations: it,
                });
            }
            let dr = -(j22 * f[0] - j12 * f[1]) / det;
            let dth = -(-j21 * f[0] + j11 * f[1]) / det;
            let mut step = 1.0;
            loop {
                let (r1, th1) = (r + step * dr, (th + step * dth).clamp(1e-300, PI - 1e-16));
                let f1 = self.spheroidal_residual(rh, zh, r1, th1);
                if norm(f1) < norm(f) || step < 1e-10 {
                    r = r1;
                    th = th1;
                    f = f1;
                    break;
                }
                step *= 0.5;
            }
        }
        if norm(f) < NEWTON_TOL {
            Ok((r, th))
        } else {
            Err(Error::Inversion {
                residual: norm(f),
                iterations: NEWTON_MAX_ITER,
            })
        }
    }

    /// Closed-form spheroidal inversion (quadratic in `rbar²`).
    pub fn invert_spheroidal_closed_form(&self, rh: f64, thh: f64) -> (f64, f64) {
        let zh = rh * thh.cos();
        let a2 = self.a * self.a;
        let b = a2 + a2 / (self.lambda * self.lambda) * zh * zh - self.xi() * rh * rh;
        let r2 = if b <= 0.0 {
            0.5 * (-b + (b * b + 4.0 * a2 * zh * zh).sqrt())
        } else {
            2.0 * a2 * zh * zh / (b + (b * b + 4.0 * a2 * zh * zh).sqrt())
        };
        let r = r2.sqrt();
        (r, (zh / r).clamp(-1.0, 1.0).acos())
    }

    /// Planar Cartesian `(t, x, y, z)` to `(tbar, rbar, cos thetabar, psibar)`.
    ///
    /// `guess` is the converged `(rbar, cos thetabar)` at the real part; two Newton
    /// steps in the scalar type `D` carry the derivatives.
    fn planar_to_bl_generic<D: Real>(&self, x: [D; 4], guess: (f64, f64)) -> [D; 4] {
        let l = self.lambda;
        let (a2, k, xi) = (self.a * self.a, self.a * self.a / (l * l), self.xi());
        let amp = (x[0] / l).exp();
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        let rho = amp * r;
        let zh = amp * x[3];
        let q = cst::<D>(1.0) - rho * rho / (l * l);
        let th = x[0] - q.abs().ln() * (0.5 * l);
        let psi_hat = x[2].atan2(x[1]);
        let (mut rb, mut c) = (cst::<D>(guess.0), cst::<D>(guess.1));
        for _ in 0..2 {
            let f1 = rb * c - zh;
            let f2 = rb * rb + (cst::<D>(1.0) - c * c) * a2 + rb * rb * c * c * k - rho * rho * xi;
            let j11 = c;
            let j12 = rb;
            let j21 = rb * (c * c * k + 1.0) * 2.0;
            let j22 = c * (rb * rb * k - a2) * 2.0;
            let det = j11 * j22 - j12 * j21;
            rb -= (j22 * f1 - j12 * f2) / det;
            c -= (j11 * f2 - j21 * f1) / det;
        }
        [th, rb, c, psi_hat + th * (self.a / (l * l))]
    }

    fn planar_guess(&self, x: &[f64; 4]) -> Result<(f64, f64)> {
        let amp = (x[0] / self.lambda).exp();
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        let rho = amp * r;
        if (rho - self.lambda).abs() <= HORIZON_GUARD * self.lambda {
            return Err(Error::Horizon {
                distance: (rho - self.lambda).abs(),
            });
        }
        if r == 0.0 {
            return Err(Error::domain("kerr-ds", x, "r = 0"));
        }
        let thh = (x[3] / r).clamp(-1.0, 1.0).acos();
        let (rb, thb) = self.invert_spheroidal(rho, thh)?;
        Ok((rb, thb.cos()))
    }

    /// Mass-dependent perturbation `P` of planar de Sitter in planar Cartesian `(t, x, y, z)`.
    pub fn planar_perturbation(&self, x: &[f64; 4]) -> Result<Mat4> {
        let guess = self.planar_guess(x)?;
        let (bl, jac) = vec_jacobian(|y: [DualSVec64<4>; 4]| Ok(self.planar_to_bl_generic(y, guess)), *x)?;
        self.pull_back_perturbation(&bl, &jac)
    }

    /// `P` in planar polar `(t, r, theta, psi)`, differentiated directly in polar coordinates so
    /// that small angular components are not obtained by cancellation.
    pub fn polar_perturbation(&self, t: f64, r: f64, th: f64, ps: f64) -> Result<Mat4> {
        let (s, c) = th.sin_cos();
        let (sp, cp) = ps.sin_cos();
        let guess = self.planar_guess(&[t, r * s * cp, r * s * sp, r * c])?;
        let (bl, jac) = vec_jacobian(
            |y: [DualSVec64<4>; 4]| {
                let (s, c) = (y[2].sin(), y[2].cos());
                let x = [y[0], y[1] * s * y[3].cos(), y[1] * s * y[3].sin(), y[1] * c];
                Ok(self.planar_to_bl_generic(x, guess))
            },
            [t, r, th, ps],
        )?;
        self.pull_back_perturbation(&bl, &jac)
    }

    fn pull_back_perturbation(&self, bl: &[f64; 4], jac: &Matrix4<f64>) -> Result<Mat4> {
        let ab = self.bl_perturbation(bl[1], bl[2]);
        let idx = [0usize, 1, 3];
        let mut p = Mat4::zeros();
        for mu in 0..4 {
            for nu in mu..4 {
                let mut s = 0.0;
                for &al in &idx {
                    for &be in &idx {
                        s += jac[(al, mu)] * jac[(be, nu)] * ab[al][be];
                    }
                }
                p[(mu, nu)] = s;
                p[(nu, mu)] = s;
            }
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("kerr-ds perturbation".into()));
        }
        Ok(p)
    }

    /// Full planar-coordinate metric pulled back from BL (cross-check of `eta + P`).
    pub fn planar_metric_pullback(&self, x: &[f64; 4]) -> Result<Mat4> {
        let guess = self.planar_guess(x)?;
        let (bl, jac) = vec_jacobian(|y: [DualSVec64<4>; 4]| Ok(self.planar_to_bl_generic(y, guess)), *x)?;
        let g = self.bl_parts(bl[1], bl[2], self.m);
        // theta-chart to cos-chart: d thetabar = -dc / sin thetabar.
        let mut gc = g;
        gc[2][2] = g[2][2] / (1.0 - bl[2] * bl[2]);
        Ok(Mat4::from_fn(|mu, nu| {
            let mut s = 0.0;
            for al in 0..4 {
                for be in 0..4 {
                    s += jac[(al, mu)] * jac[(be, nu)] * gc[al][be];
                }
            }
            s
        }))
    }

    /// `(P_spatial, h)` on the planar slice `t` at `x`.
    pub fn planar_momentum(&self, t: f64, x: &[f64; 3]) -> Result<(Mat3, Mat3)> {
        let p4 = [t, x[0], x[1], x[2]];
        let pert = self.planar_perturbation(&p4)?;
        let dp = diff::first_derivatives(&|y: &[f64; 4]| self.planar_perturbation(y), &p4, true)?;
        let amp2 = (2.0 * t / self.lambda).exp();
        let ps = pert.fixed_view::<3, 3>(1, 1).into_owned();
        let g = Mat3::identity() * amp2 + ps;
        let inv = g
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric {
                point: p4.to_vec(),
                detail: "spatial metric".into(),
            })?;
        let shift = Vector3::new(pert[(0, 1)], pert[(0, 2)], pert[(0, 3)]);
        let n2m1 = -pert[(0, 0)] + (shift.transpose() * inv * shift)[(0, 0)];
        let lapse = (1.0 + n2m1).sqrt();
        let inv_n_m1 = -n2m1 / (lapse * (lapse + 1.0));
        // Spatial derivatives of the spatial block and the shift.
        let dgs: [Mat3; 3] = std::array::from_fn(|i| dp[i + 1].fixed_view::<3, 3>(1, 1).into_owned());
        let gam = crate::tensor::curvature::christoffel(&inv, &dgs);
        let dtp = dp[0].fixed_view::<3, 3>(1, 1).into_owned();
        let l = self.lambda;
        let mut h = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut cov = dp[i + 1][(0, j + 1)] + dp[j + 1][(0, i + 1)];
                for k in 0..3 {
                    cov -= 2.0 * gam[k][i][j] * shift[k];
                }
                let delta = if i == j { amp2 / l * inv_n_m1 } else { 0.0 };
                h[(i, j)] = delta + (dtp[(i, j)] - cov) / (2.0 * lapse) - ps[(i, j)] / l;
            }
        }
        Ok((ps, h))
    }

    /// `tbar` (= `that`) on the sphere of planar radius `r` at time `t`.
    pub fn static_time(&self, t: f64, r: f64) -> f64 {
        let q = r * (t / self.lambda).exp() / self.lambda;
        t - 0.5 * self.lambda * (1.0 - q * q).abs().ln()
    }

    /// Planar slice `t` as an initial data set with conformal factor `e^{t/λ}`.
    pub fn planar_slice(&self, t: f64, psi_range: PsiRange) -> Result<InitialDataSet> {
        let me = *self;
        let amp = (t / self.lambda).exp();
        let g = TensorField3::from_background(Background::Identity(amp * amp), CoordSystem::Cartesian)
            .with_deviation(move |x| {
                let p = me.planar_perturbation(&[t, x[0], x[1], x[2]])?;
                Ok(p.fixed_view::<3, 3>(1, 1).into_owned())
            });
        let h = TensorField3::from_fn(CoordSystem::Cartesian, move |x| Ok(me.planar_momentum(t, x)?.1));
        let mut d = InitialDataSet::from_momentum(
            MetricField3::new(g),
            h,
            3.0 / (self.lambda * self.lambda),
            Conformal::Planar { factor: amp },
            "kerr-ds",
        )?;
        if psi_range == PsiRange::Shifted {
            let xi = self.xi();
            let coef = self.a / (self.lambda * self.lambda);
            d.psi_interval = Some(std::sync::Arc::new(move |r| {
                let p0 = -coef * me.static_time(t, r);
                (p0, p0 + 2.0 * PI * xi)
            }));
        }
        Ok(d.with_inner_radius(2.0 * self.lambda * (-t / self.lambda).exp()))
    }

    /// Perturbation and reduced data in planar polar components at `(t, r, theta, psi)`.
    pub fn polar_components(&self, t: f64, r: f64, th: f64, ps: f64) -> Result<KerrPolarComponents> {
        let (s, c) = th.sin_cos();
        let (sp, cp) = ps.sin_cos();
        let x = [r * s * cp, r * s * sp, r * c];
        // Columns: d(x, y, z) / d(r, theta, psi).
        let js = Matrix3::new(s * cp, r * c * cp, -r * s * sp, s * sp, r * c * sp, r * s * cp, c, -r * s, 0.0);
        let mut j4 = Matrix4::zeros();
        j4[(0, 0)] = 1.0;
        j4.fixed_view_mut::<3, 3>(1, 1).copy_from(&js);
        let (_, h) = self.planar_momentum(t, &x)?;
        let amp = (t / self.lambda).exp();
        Ok(KerrPolarComponents {
            a: self.polar_perturbation(t, r, th, ps)?,
            hbar: js.transpose() * (h / amp) * js,
            cartesian_point: x,
        })
    }
}

/// Planar polar components `(t, r, theta, psi)` of the perturbation and `(r, theta, psi)` of `hbar`.
#[derive(Clone, Copy, Debug)]
pub struct KerrPolarComponents {
    pub a: Mat4,
    pub hbar: Mat3,
    pub cartesian_point: [f64; 3],
}

/// One leading-order asymptotic term.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LeadingTerm {
    pub name: &'static str,
    pub value: f64,
    /// Power of `r` of the leading term.
    pub power: i32,
}

/// Leading large-`r` terms of the planar Kerr-de Sitter slice (`B = 1 + (a²/λ²) sin²θ`).
///
/// Frame components use `e1 = d_r`, `e2 = d_θ / r`, `e3 = d_ψ / (r sin θ)`. Signs of `hbar` and
/// `htilde` follow the `K = +g/λ` convention for de Sitter.
pub fn kerr_leading_terms(k: &KerrDeSitter, t: f64, r: f64, th: f64) -> Vec<LeadingTerm> {
    let (m, a, l) = (k.m, k.a, k.lambda);
    let amp = (t / l).exp();
    let (s, c) = th.sin_cos();
    let b = 1.0 + a * a / (l * l) * s * s;
    let b32 = b.powf(-1.5);
    let b52 = b.powf(-2.5);
    let a2b = amp * amp * b.powf(2.5);
    let term = |name, value, power| LeadingTerm { name, value, power };
    vec![
        term("a_tt", 2.0 * m * l * l / (r.powi(3) * amp.powi(3)) * b32, -3),
        term("a_tr", 2.0 * m * l.powi(3) / (r.powi(4) * amp.powi(3)) * b32 * (1.0 + 1.0 / b), -4),
        term("a_ttheta", 2.0 * m * a * a * l * s * c / (r.powi(3) * amp.powi(4)) * b52, -3),
        term("a_rr", 2.0 * m * l * l / (r.powi(3) * amp) * b52, -3),
        term("a_rtheta", 2.0 * m * a * a * l * l * s * c / (r.powi(4) * amp.powi(3)) * b52, -4),
        term("a_rpsi", 2.0 * m * l * a * s * s / (r * r * amp) * b52, -2),
        term("a_thetatheta", 2.0 * m * a.powi(4) * s * s * c * c / (r.powi(3) * amp.powi(3)) * b52 / b, -3),
        term("a_psipsi", 2.0 * m * a * a * s.powi(4) / (r * amp) * b52, -1),
        term("hbar_rr", -(2.0 * m * l * l - m * a * a * s * s) / (a2b * l * r.powi(3)), -3),
        term("hbar_rpsi", -3.0 * m * a * s * s / (a2b * r * r), -2),
        term("hbar_thetatheta", m * l / (amp * amp * b.powf(1.5) * r), -1),
        term("hbar_psipsi", -(-m * l * l + 2.0 * m * a * a * s * s) * s * s / (a2b * l * r), -1),
        term("htilde_21", 3.0 * m * a * s / (a2b * r * r), -2),
        term("htilde_23", -(m * l * l - 2.0 * m * a * a * s * s) / (a2b * l * r * r), -2),
        term("htilde_32", m * l / (amp * amp * b.powf(1.5) * r * r), -2),
    ]
}

/// Numerical counterparts of [`kerr_leading_terms`] at `(t, r, theta, psi)`, in the same order.
pub fn kerr_numeric_terms(k: &KerrDeSitter, t: f64, r: f64, th: f64, ps: f64) -> Result<Vec<(&'static str, f64)>> {
    use crate::initial_data::{angular_density, conformal_decompose, EpsilonConvention};
    let pc = k.polar_components(t, r, th, ps)?;
    let (a, hb) = (pc.a, pc.hbar);
    let d = k.planar_slice(t, PsiRange::Standard)?;
    let cd = conformal_decompose(&d)?;
    let ht = angular_density(&cd, &pc.cartesian_point, EpsilonConvention::Flat)?;
    let (s, c) = th.sin_cos();
    let (sp, cp) = ps.sin_cos();
    let e1 = Vector3::new(s * cp, s * sp, c);
    let e2 = Vector3::new(c * cp, c * sp, -s);
    let e3 = Vector3::new(-sp, cp, 0.0);
    let f = |u: &Vector3<f64>, v: &Vector3<f64>| (u.transpose() * ht * v)[(0, 0)];
    Ok(vec![
        ("a_tt", a[(0, 0)]),
        ("a_tr", a[(0, 1)]),
        ("a_ttheta", a[(0, 2)]),
        ("a_rr", a[(1, 1)]),
        ("a_rtheta", a[(1, 2)]),
        ("a_rpsi", a[(1, 3)]),
        ("a_thetatheta", a[(2, 2)]),
        ("a_psipsi", a[(3, 3)]),
        ("hbar_rr", hb[(0, 0)]),
        ("hbar_rpsi", hb[(0, 2)]),
        ("hbar_thetatheta", hb[(1, 1)]),
        ("hbar_psipsi", hb[(2, 2)]),
        ("htilde_21", f(&e2, &e1)),
        ("htilde_23", f(&e2, &e3)),
        ("htilde_32", f(&e3, &e2)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{curvature4, DerivativeConfig};

    fn kds() -> KerrDeSitter {
        KerrDeSitter::new(1.0, 0.5, 10.0).unwrap()
    }

    #[test]
    fn newton_matches_closed_form_and_roundtrips() {
        let k = kds();
        for (rh, th) in [(3.0, 0.3), (50.0, 1.2), (1e4, 2.9), (0.7, 1.5)] {
            let (r1, t1) = k.invert_spheroidal(rh, th).unwrap();
            let (r2, t2) = k.invert_spheroidal_closed_form(rh, th);
            assert!((r1 - r2).abs() < 1e-10 * r2 && (t1 - t2).abs() < 1e-10);
            let back = k.bl_to_hat([0.4, r1, t1, 1.0]);
            assert!((back[1] - rh).abs() < 1e-10 * rh && (back[2] - th).abs() < 1e-10);
        }
    }

    #[test]
    fn massless_bl_is_static_de_sitter_in_hat_coordinates() {
        let k = KerrDeSitter::new(0.0, 0.5, 10.0).unwrap();
        let x = [0.7, 4.0, 1.1, 0.3];
        let (h, jac) = vec_jacobian(|y: [DualSVec64<4>; 4]| Ok(k.bl_to_hat_generic(y)), x).unwrap();
        let st = crate::charts::metric_generic(crate::charts::ChartId::StaticInner, h, 10.0);
        let g = k.bl_metric_generic(x);
        for mu in 0..4 {
            for nu in 0..4 {
                let mut s = 0.0;
                for al in 0..4 {
                    for be in 0..4 {
                        s += jac[(al, mu)] * jac[(be, nu)] * st[al][be];
                    }
                }
                assert!((s - g[mu][nu]).abs() < 1e-12, "{mu}{nu}: {s} {}", g[mu][nu]);
            }
        }
    }

    #[test]
    fn bl_metric_is_einstein() {
        let k = kds();
        for x in [[0.0, 3.0, 0.7, 0.1], [1.0, 25.0, 2.0, 4.0]] {
            let c = curvature4(&k.bl_metric4(), &x, &DerivativeConfig::default()).unwrap();
            let res = (c.ricci - c.metric * 0.03).abs().max();
            assert!(res < 1e-12, "{res:e}");
        }
    }

    #[test]
    fn perturbation_plus_background_equals_pullback() {
        let k = kds();
        for x in [[0.0, 30.0, -20.0, 12.0], [0.5, 3.0, 1.0, -2.0], [0.0, 700.0, 100.0, 300.0]] {
            let full = k.planar_metric_pullback(&x).unwrap();
            let a2 = (2.0 * x[0] / 10.0).exp();
            let eta = Mat4::from_diagonal(&nalgebra::Vector4::new(-1.0, a2, a2, a2));
            let p = k.planar_perturbation(&x).unwrap();
            let err = (full - eta - p).abs().max();
            assert!(err < 1e-11 * full.abs().max(), "{err:e}");
        }
    }
}
