//! Coordinate charts on the de Sitter hyperboloid `-X0^2 + X1^2 + ... + X4^2 = lambda^2`.
//!
//! Chart coordinates are ordered time first:
//! global `(t, r, theta, psi)`, planar `(t, x1, x2, x3)`, static `(tbar, rbar, theta, psi)`,
//! hyperbolic `(T, R, theta, psi)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use num_dual::Dual2SVec64;
use serde::{Deserialize, Serialize};

use crate::ad::{cst, mat_jet2, Real};
use crate::error::{check_lambda, Error, Result};
use crate::tensor::{Background, CoordSystem, Mat4, Metric4Field, MetricField3, SymTensorField3, TensorField3};

/// Relative width of the excluded band around the cosmological horizon.
pub const HORIZON_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartId {
    Global,
    PlanarUpper,
    PlanarLower,
    StaticInner,
    StaticOuter,
    Hyperbolic,
}

impl ChartId {
    pub const ALL: [ChartId; 6] = [
        ChartId::Global,
        ChartId::PlanarUpper,
        ChartId::PlanarLower,
        ChartId::StaticInner,
        ChartId::StaticOuter,
        ChartId::Hyperbolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChartId::Global => "global",
            ChartId::PlanarUpper => "planar-upper",
            ChartId::PlanarLower => "planar-lower",
            ChartId::StaticInner => "static-inner",
            ChartId::StaticOuter => "static-outer",
            ChartId::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChartId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::parameter("chart", format!("unknown chart `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: [f64; 4],
    pub lambda: f64,
}

/// Point of the ambient Minkowski space R^{1,4}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmbientPoint(pub [f64; 5]);

impl AmbientPoint {
    /// `-X0^2 + sum Xi^2 - lambda^2`.
    pub fn hyperboloid_residual(&self, lambda: f64) -> f64 {
        let x = &self.0;
        -x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + x[4] * x[4] - lambda * lambda
    }

    /// The isometry `(X0, X4) -> (-X0, -X4)` exchanging the upper and lower halves.
    pub fn time_reflected(&self) -> AmbientPoint {
        let x = self.0;
        AmbientPoint([-x[0], x[1], x[2], x[3], -x[4]])
    }
}

impl ChartPoint {
    pub fn new(chart: ChartId, coords: [f64; 4], lambda: f64) -> Result<Self> {
        let p = Self { chart, coords, lambda };
        p.check_domain()?;
        Ok(p)
    }

    fn check_domain(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        let c = &self.coords;
        let fail = |detail: &str| Err(Error::domain(self.chart.name(), c, detail));
        if c.iter().any(|v| !v.is_finite()) {
            return fail("non-finite coordinate");
        }
        let angles_ok = |th: f64, ps: f64| (0.0..=PI).contains(&th) && (0.0..2.0 * PI).contains(&ps);
        match self.chart {
            ChartId::Global => {
                if !(0.0..=PI).contains(&c[1]) || !angles_ok(c[2], c[3]) {
                    return fail("hyperspherical angles out of range");
                }
            }
            ChartId::PlanarUpper | ChartId::PlanarLower => {}
            ChartId::StaticInner | ChartId::StaticOuter => {
                if !angles_ok(c[2], c[3]) {
                    return fail("angles out of range");
                }
                let l = self.lambda;
                if (c[1] - l).abs() <= HORIZON_GUARD * l {
                    return Err(Error::Horizon {
                        distance: (c[1] - l).abs(),
                    });
                }
                if self.chart == ChartId::StaticInner && !(c[1] >= 0.0 && c[1] < l) {
                    return fail("static-inner requires 0 <= rbar < lambda");
                }
                if self.chart == ChartId::StaticOuter && c[1] <= l {
                    return fail("static-outer requires rbar > lambda");
                }
            }
            ChartId::Hyperbolic => {
                if !angles_ok(c[2], c[3]) || c[1] < 0.0 {
                    return fail("requires R >= 0 and angles in range");
                }
                if c[0] == 0.0 {
                    return fail("T = 0 lies on the boundary X4 = -lambda");
                }
            }
        }
        Ok(())
    }
}

fn unit<D: Real>(th: D, ps: D) -> [D; 3] {
    [th.sin() * ps.cos(), th.sin() * ps.sin(), th.cos()]
}

/// Embedding map written for any scalar type (used for exact Jacobians).
pub fn embed_generic<D: Real>(chart: ChartId, x: [D; 4], lambda: f64) -> [D; 5] {
    let l = lambda;
    match chart {
        ChartId::Global => {
            let (t, r) = (x[0], x[1]);
            let n = unit(x[2], x[3]);
            let ch = (t / l).cosh() * l;
            [
                (t / l).sinh() * l,
                ch * r.sin() * n[0],
                ch * r.sin() * n[1],
                ch * r.sin() * n[2],
                ch * r.cos(),
            ]
        }
        ChartId::PlanarUpper | ChartId::PlanarLower => {
            let t = x[0];
            let e = (t / l).exp();
            let q = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) * e * (0.5 / l);
            let up = [
                (t / l).sinh() * l + q,
                x[1] * e,
                x[2] * e,
                x[3] * e,
                -(t / l).cosh() * l + q,
            ];
            if chart == ChartId::PlanarUpper {
                up
            } else {
                [-up[0], up[1], up[2], up[3], -up[4]]
            }
        }
        ChartId::StaticInner => {
            let (t, r) = (x[0], x[1]);
            let n = unit(x[2], x[3]);
            let w = (cst::<D>(l * l) - r * r).sqrt();
            [w * (t / l).sinh(), r * n[0], r * n[1], r * n[2], -w * (t / l).cosh()]
        }
        ChartId::StaticOuter => {
            let (t, r) = (x[0], x[1]);
            let n = unit(x[2], x[3]);
            let w = (r * r - l * l).sqrt();
            [w * (t / l).cosh(), r * n[0], r * n[1], r * n[2], -w * (t / l).sinh()]
        }
        ChartId::Hyperbolic => {
            let (tt, rr) = (x[0], x[1]);
            let n = unit(x[2], x[3]);
            let s = (tt / l).sinh() * l;
            let sh = s * (rr / l).sinh();
            [s * (rr / l).cosh(), sh * n[0], sh * n[1], sh * n[2], -(tt / l).cosh() * l]
        }
    }
}

pub fn embed(p: &ChartPoint) -> Result<AmbientPoint> {
    p.check_domain()?;
    Ok(AmbientPoint(embed_generic(p.chart, p.coords, p.lambda)))
}

/// Closed-form chart metric written for any scalar type.
pub fn metric_generic<D: Real>(chart: ChartId, x: [D; 4], lambda: f64) -> [[D; 4]; 4] {
    let l = lambda;
    let z = cst::<D>(0.0);
    let diag = |a: D, b: D, c: D, d: D| [[a, z, z, z], [z, b, z, z], [z, z, c, z], [z, z, z, d]];
    let m1 = cst::<D>(-1.0);
    match chart {
        ChartId::Global => {
            let c2 = (x[0] / l).cosh().powi(2) * (l * l);
            let s2 = x[1].sin().powi(2);
            diag(m1, c2, c2 * s2, c2 * s2 * x[2].sin().powi(2))
        }
        ChartId::PlanarUpper | ChartId::PlanarLower => {
            let a2 = (x[0] * (2.0 / l)).exp();
            diag(m1, a2, a2, a2)
        }
        ChartId::StaticInner | ChartId::StaticOuter => {
            let r = x[1];
            let f = cst::<D>(1.0) - r * r / (l * l);
            diag(-f, f.recip(), r * r, r * r * x[2].sin().powi(2))
        }
        ChartId::Hyperbolic => {
            let s2 = (x[0] / l).sinh().powi(2);
            let f2 = ((x[1] / l).sinh() * l).powi(2);
            diag(m1, s2, s2 * f2, s2 * f2 * x[2].sin().powi(2))
        }
    }
}

fn to_mat4(m: [[f64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| m[i][j])
}

/// Closed-form metric of a chart at a point.
pub fn chart_metric(p: &ChartPoint) -> Result<Mat4> {
    p.check_domain()?;
    Ok(to_mat4(metric_generic(p.chart, p.coords, p.lambda)))
}

/// Chart metric as a spacetime field with exact second-order jets.
pub fn chart_metric_field(chart: ChartId, lambda: f64) -> Metric4Field {
    Metric4Field::from_jet(move |x| {
        ChartPoint::new(chart, *x, lambda)?;
        mat_jet2(|y: [Dual2SVec64<4>; 4]| Ok(metric_generic(chart, y, lambda)), *x)
    })
}

/// Same metric without jets; derivatives by finite differences.
pub fn chart_metric_field_fd(chart: ChartId, lambda: f64) -> Metric4Field {
    Metric4Field::from_fn(move |x| chart_metric(&ChartPoint::new(chart, *x, lambda)?))
}

fn angles(v: &[f64; 3]) -> Result<(f64, f64, f64)> {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let th = (v[2] / r).clamp(-1.0, 1.0).acos();
    let mut ps = v[1].atan2(v[0]);
    if ps < 0.0 {
        ps += 2.0 * PI;
    }
    if ps >= 2.0 * PI {
        ps = 0.0;
    }
    Ok((r, th, ps))
}

/// Inverse of [`embed`]: coordinates of an ambient point in the given chart.
pub fn locate(x: &AmbientPoint, chart: ChartId, lambda: f64) -> Result<ChartPoint> {
    check_lambda(lambda)?;
    let l = lambda;
    let a = x.0;
    let spatial = [a[1], a[2], a[3]];
    let outside = |detail: &str| Err(Error::domain(chart.name(), &a, detail));
    let coords = match chart {
        ChartId::Global => {
            let t = l * (a[0] / l).asinh();
            let (s, th, ps) = angles(&spatial)?;
            let r = s.atan2(a[4]);
            [t, r, th, ps]
        }
        ChartId::PlanarUpper | ChartId::PlanarLower => {
            let b = if chart == ChartId::PlanarUpper { *x } else { x.time_reflected() }.0;
            let u = b[0] - b[4];
            if u <= 0.0 {
                return outside("requires X0 - X4 > 0");
            }
            let t = l * (u / l).ln();
            let e = (-t / l).exp();
            [t, b[1] * e, b[2] * e, b[3] * e]
        }
        ChartId::StaticInner => {
            let (r, th, ps) = angles(&spatial)?;
            if !(a[4] < 0.0 && a[0].abs() < -a[4]) {
                return outside("requires |X0| < -X4");
            }
            [l * (a[0] / -a[4]).atanh(), r, th, ps]
        }
        ChartId::StaticOuter => {
            let (r, th, ps) = angles(&spatial)?;
            if !(a[0] > 0.0 && a[4].abs() < a[0]) {
                return outside("requires |X4| < X0");
            }
            [l * (-a[4] / a[0]).atanh(), r, th, ps]
        }
        ChartId::Hyperbolic => {
            if a[4] >= -l {
                return outside("requires X4 < -lambda");
            }
            let sg = a[0].signum();
            let (s, th, ps) = angles(&[sg * a[1], sg * a[2], sg * a[3]])?;
            let tt = sg * l * (-a[4] / l).acosh();
            let sh = (tt / l).sinh().abs() * l;
            [tt, l * (s / sh).asinh(), th, ps]
        }
    };
    ChartPoint::new(chart, coords, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StaticBranch {
    Inner,
    Outer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaticCoords {
    pub t_bar: f64,
    pub r_bar: f64,
    pub branch: StaticBranch,
}

/// Planar `(t, r)` to static `(tbar, rbar)` on the upper half.
pub fn planar_to_static(t: f64, r: f64, lambda: f64) -> Result<StaticCoords> {
    check_lambda(lambda)?;
    if r < 0.0 || !r.is_finite() || !t.is_finite() {
        return Err(Error::domain("planar-upper", &[t, r], "requires finite t and r >= 0"));
    }
    let r_bar = r * (t / lambda).exp();
    let distance = (r_bar - lambda).abs();
    if distance <= HORIZON_GUARD * lambda {
        return Err(Error::Horizon { distance });
    }
    let q = r_bar / lambda;
    let t_bar = t - 0.5 * lambda * ((1.0 - q * q).abs()).ln();
    let branch = if r_bar < lambda { StaticBranch::Inner } else { StaticBranch::Outer };
    Ok(StaticCoords { t_bar, r_bar, branch })
}

/// Static `(tbar, rbar)` to planar `(t, r)`.
pub fn static_to_planar(t_bar: f64, r_bar: f64, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let distance = (r_bar - lambda).abs();
    if distance <= HORIZON_GUARD * lambda {
        return Err(Error::Horizon { distance });
    }
    if r_bar < 0.0 || !r_bar.is_finite() || !t_bar.is_finite() {
        return Err(Error::domain("static", &[t_bar, r_bar], "requires finite tbar and rbar >= 0"));
    }
    let q = r_bar / lambda;
    let t = t_bar + 0.5 * lambda * ((1.0 - q * q).abs()).ln();
    Ok((t, r_bar * (-t / lambda).exp()))
}

/// Induced metric and extrinsic curvature of a constant-time slice of a chart.
///
/// `K` is taken with respect to the future-pointing normal; for the lower
/// planar chart `d_t` is past-directed, so `K = -g/lambda` there. For
/// `static-outer` the time function is `rbar` and the slice coordinates are
/// `(tbar, theta, psi)`.
pub fn slice_data(chart: ChartId, time: f64, lambda: f64) -> Result<(MetricField3, SymTensorField3)> {
    check_lambda(lambda)?;
    let l = lambda;
    match chart {
        ChartId::PlanarUpper | ChartId::PlanarLower => {
            let a2 = (2.0 * time / l).exp();
            let g = MetricField3::new(TensorField3::from_background(Background::Identity(a2), CoordSystem::Cartesian));
            let sign = if chart == ChartId::PlanarUpper { 1.0 } else { -1.0 };
            let k = g.scaled(sign / l).0;
            Ok((g, k))
        }
        ChartId::Hyperbolic => {
            if time == 0.0 {
                return Err(Error::SingularSlice("hyperbolic slice T = 0".into()));
            }
            let s2 = (time / l).sinh().powi(2);
            let g = MetricField3::new(TensorField3::from_background(
                Background::HyperbolicPolar { lambda: l, scale: s2 },
                CoordSystem::PolarSpherical,
            ));
            let c = 1.0 / ((time / l).tanh() * l);
            let k = g.scaled(c).0;
            Ok((g, k))
        }
        ChartId::Global => {
            let c2 = (time / l).cosh().powi(2) * l * l;
            let round = move |x: &[f64; 3]| -> Result<Matrix3<f64>> {
                let s2 = x[0].sin().powi(2);
                Ok(Matrix3::from_diagonal(&Vector3::new(1.0, s2, s2 * x[1].sin().powi(2))))
            };
            let g = MetricField3::new(TensorField3::from_fn(CoordSystem::Curvilinear, move |x| Ok(round(x)? * c2)));
            let kc = (time / l).tanh() / l;
            let k = g.scaled(kc).0;
            Ok((g, k))
        }
        ChartId::StaticInner => {
            let g = MetricField3::new(TensorField3::from_fn(CoordSystem::PolarSpherical, move |x| {
                let r = x[0];
                if (r - l).abs() <= HORIZON_GUARD * l {
                    return Err(Error::Horizon { distance: (r - l).abs() });
                }
                if r >= l {
                    return Err(Error::domain("static-inner", x, "requires rbar < lambda"));
                }
                let f = 1.0 - r * r / (l * l);
                Ok(Matrix3::from_diagonal(&Vector3::new(1.0 / f, r * r, r * r * x[1].sin().powi(2))))
            }));
            Ok((g, TensorField3::zero(CoordSystem::PolarSpherical)))
        }
        ChartId::StaticOuter => {
            let r = time;
            if (r - l).abs() <= HORIZON_GUARD * l {
                return Err(Error::Horizon { distance: (r - l).abs() });
            }
            if r <= l {
                return Err(Error::domain("static-outer", &[r], "requires rbar > lambda"));
            }
            let w = r * r / (l * l) - 1.0;
            let g = MetricField3::new(TensorField3::from_fn(CoordSystem::Curvilinear, move |x| {
                Ok(Matrix3::from_diagonal(&Vector3::new(w, r * r, r * r * x[1].sin().powi(2))))
            }));
            // K_ij = d_rbar g_ij / (2N) with N = w^{-1/2}.
            let half_over_n = 0.5 * w.sqrt();
            let k = TensorField3::from_fn(CoordSystem::Curvilinear, move |x| {
                Ok(Matrix3::from_diagonal(&Vector3::new(
                    2.0 * r / (l * l),
                    2.0 * r,
                    2.0 * r * x[1].sin().powi(2),
                )) * half_over_n)
            });
            Ok((g, k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{constraints, curvature4, DerivativeConfig};

    const L: f64 = 10.0;

    #[test]
    fn planar_to_static_example() {
        let s = planar_to_static(0.0, 5.0, L).unwrap();
        assert!((s.t_bar - 1.438_410_362_258_904).abs() < 1e-12);
        assert_eq!(s.r_bar, 5.0);
        assert_eq!(s.branch, StaticBranch::Inner);
        let (t, r) = static_to_planar(s.t_bar, s.r_bar, L).unwrap();
        assert!(t.abs() < 1e-14 && (r - 5.0).abs() < 1e-13);
    }

    #[test]
    fn horizon_band_rejected() {
        assert!(matches!(planar_to_static(0.0, 10.0, L), Err(Error::Horizon { .. })));
        assert!(matches!(static_to_planar(0.0, 10.0 + 1e-8, L), Err(Error::Horizon { .. })));
    }

    #[test]
    fn hyperbolic_embedding_example() {
        let p = ChartPoint::new(ChartId::Hyperbolic, [5.0, 0.0, 0.3, 0.2], L).unwrap();
        let x = embed(&p).unwrap().0;
        assert!((x[0] - 5.210_953_054_937_474).abs() < 1e-12);
        assert!(x[1].abs() < 1e-15 && x[2].abs() < 1e-15 && x[3].abs() < 1e-15);
        assert!((x[4] + 11.276_259_652_063_807).abs() < 1e-12);
    }

    #[test]
    fn lower_planar_matches_explicit_formula() {
        let (t, xs) = (1.7, [0.4, -2.0, 3.0]);
        let p = ChartPoint::new(ChartId::PlanarLower, [t, xs[0], xs[1], xs[2]], L).unwrap();
        let x = embed(&p).unwrap().0;
        let q = 0.5 * L * (xs.iter().map(|v| v * v).sum::<f64>() / (L * L)) * (t / L).exp();
        assert!((x[0] - (-L * (t / L).sinh() - q)).abs() < 1e-12);
        assert!((x[4] - (L * (t / L).cosh() - q)).abs() < 1e-12);
        assert!((x[2] - xs[1] * (t / L).exp()).abs() < 1e-12);
    }

    #[test]
    fn static_and_planar_agree_on_the_hyperboloid() {
        let s = planar_to_static(0.7, 3.0, L).unwrap();
        let a = embed(&ChartPoint::new(ChartId::PlanarUpper, [0.7, 0.0, 0.0, 3.0], L).unwrap()).unwrap();
        let b = embed(&ChartPoint::new(ChartId::StaticInner, [s.t_bar, s.r_bar, 0.0, 0.0], L).unwrap()).unwrap();
        for i in 0..5 {
            assert!((a.0[i] - b.0[i]).abs() < 1e-12, "{i}: {a:?} {b:?}");
        }
        let s = planar_to_static(0.7, 30.0, L).unwrap();
        let a = embed(&ChartPoint::new(ChartId::PlanarUpper, [0.7, 30.0, 0.0, 0.0], L).unwrap()).unwrap();
        let b = embed(&ChartPoint::new(ChartId::StaticOuter, [s.t_bar, s.r_bar, PI / 2.0, 0.0], L).unwrap()).unwrap();
        for i in 0..5 {
            assert!((a.0[i] - b.0[i]).abs() < 1e-10, "{i}: {a:?} {b:?}");
        }
    }

    #[test]
    fn chart_metrics_are_einstein() {
        let pts = [
            (ChartId::Global, [0.3, 1.0, 0.8, 2.0]),
            (ChartId::PlanarUpper, [0.3, 1.0, -2.0, 3.0]),
            (ChartId::PlanarLower, [-0.3, 1.0, -2.0, 3.0]),
            (ChartId::StaticInner, [0.3, 4.0, 0.8, 2.0]),
            (ChartId::StaticOuter, [0.3, 14.0, 0.8, 2.0]),
            (ChartId::Hyperbolic, [3.0, 5.0, 0.8, 2.0]),
        ];
        for (c, x) in pts {
            let cv = curvature4(&chart_metric_field(c, L), &x, &DerivativeConfig::default()).unwrap();
            let res = (cv.ricci - cv.metric * (3.0 / (L * L))).abs().max();
            assert!(res < 1e-12, "{c}: {res:e}");
        }
    }

    #[test]
    fn slices_satisfy_vacuum_constraints() {
        let cc = 3.0 / (L * L);
        let cases = [
            (ChartId::PlanarUpper, 0.4, [1.0, 2.0, 3.0]),
            (ChartId::PlanarLower, 0.4, [1.0, 2.0, 3.0]),
            (ChartId::Hyperbolic, 5.0, [5.0, 0.8, 2.0]),
            (ChartId::Global, 2.0, [1.0, 0.8, 2.0]),
            (ChartId::StaticInner, 0.0, [4.0, 0.8, 2.0]),
            (ChartId::StaticOuter, 14.0, [0.5, 0.8, 2.0]),
        ];
        for (c, time, x) in cases {
            let (g, k) = slice_data(c, time, L).unwrap();
            let s = constraints(&g, &k, cc, &x, &DerivativeConfig::default()).unwrap();
            assert!(s.t00.abs() < 1e-8 && s.t0i_norm < 1e-8, "{c}: {s:?}");
        }
    }

    #[test]
    fn roundtrip_through_ambient_space() {
        let pts = [
            (ChartId::Global, [0.3, 1.0, 0.8, 2.0]),
            (ChartId::PlanarUpper, [0.3, 1.0, -2.0, 3.0]),
            (ChartId::PlanarLower, [-0.3, 1.0, -2.0, 3.0]),
            (ChartId::StaticInner, [0.3, 4.0, 0.8, 2.0]),
            (ChartId::StaticOuter, [0.3, 14.0, 0.8, 2.0]),
            (ChartId::Hyperbolic, [-3.0, 5.0, 0.8, 2.0]),
        ];
        for (c, x) in pts {
            let p = ChartPoint::new(c, x, L).unwrap();
            let back = locate(&embed(&p).unwrap(), c, L).unwrap();
            for i in 0..4 {
                assert!((back.coords[i] - x[i]).abs() < 1e-10, "{c}");
            }
        }
    }
}
