//! Spatial and spacetime tensor fields.
//!
//! A field is a closed-form background plus a deviation closure. Derivatives of
//! the background are always exact; the deviation is differentiated through its
//! own jet when one is supplied, otherwise by finite differences. Keeping the two
//! apart avoids cancellation when the deviation is small compared to the
//! background (asymptotic regions).

use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use super::diff::{self, DerivativeConfig, DerivativeMode};
use crate::ad::MatJet;
use crate::error::{Error, Result};

pub type Point3 = [f64; 3];
pub type Point4 = [f64; 4];
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;

pub type EvalFn3 = Arc<dyn Fn(&Point3) -> Result<Mat3> + Send + Sync>;
pub type JetFn3 = Arc<dyn Fn(&Point3) -> Result<MatJet<3>> + Send + Sync>;
pub type EvalFn4 = Arc<dyn Fn(&Point4) -> Result<Mat4> + Send + Sync>;
pub type JetFn4 = Arc<dyn Fn(&Point4) -> Result<MatJet<4>> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordSystem {
    Cartesian,
    /// (r, theta, psi).
    PolarSpherical,
    /// Any other coordinates (hyperspherical, static-time slices).
    Curvilinear,
}

/// Closed-form part of a field.
#[derive(Clone)]
pub enum Background {
    Zero,
    /// `scale * delta`.
    Identity(f64),
    /// `scale * (dR^2 + f^2 dtheta^2 + f^2 sin^2(theta) dpsi^2)`, `f = lambda sinh(R/lambda)`.
    HyperbolicPolar { lambda: f64, scale: f64 },
    /// `scale * (dr^2 + r^2 dtheta^2 + r^2 sin^2(theta) dpsi^2)`.
    FlatPolar { scale: f64 },
    Analytic(JetFn3),
}

impl Background {
    pub fn jet(&self, x: &Point3) -> Result<MatJet<3>> {
        let zero = [Mat3::zeros(); 3];
        match self {
            Background::Zero => Ok(MatJet {
                value: Mat3::zeros(),
                d1: zero,
                d2: Some([zero; 3]),
            }),
            Background::Identity(s) => Ok(MatJet {
                value: Mat3::identity() * *s,
                d1: zero,
                d2: Some([zero; 3]),
            }),
            Background::HyperbolicPolar { lambda, scale } => {
                let (r, th) = (x[0], x[1]);
                let f = lambda * (r / lambda).sinh();
                let fp = (r / lambda).cosh();
                let fpp = (r / lambda).sinh() / lambda;
                Ok(polar_jet(*scale, f, fp, fpp, th))
            }
            Background::FlatPolar { scale } => Ok(polar_jet(*scale, x[0], 1.0, 0.0, x[1])),
            Background::Analytic(j) => j(x),
        }
    }

    fn scaled(&self, c: f64) -> Background {
        match self {
            Background::Zero => Background::Zero,
            Background::Identity(s) => Background::Identity(s * c),
            Background::HyperbolicPolar { lambda, scale } => Background::HyperbolicPolar {
                lambda: *lambda,
                scale: scale * c,
            },
            Background::FlatPolar { scale } => Background::FlatPolar { scale: scale * c },
            Background::Analytic(j) => {
                let j = j.clone();
                Background::Analytic(Arc::new(move |x| scale_jet(j(x)?, c)))
            }
        }
    }
}

/// Jet of `dr^2 + f(r)^2 (dtheta^2 + sin^2 theta dpsi^2)` in (r, theta, psi).
fn polar_jet(scale: f64, f: f64, fp: f64, fpp: f64, th: f64) -> MatJet<3> {
    let (s, c) = th.sin_cos();
    let mut v = Mat3::zeros();
    v[(0, 0)] = 1.0;
    v[(1, 1)] = f * f;
    v[(2, 2)] = f * f * s * s;
    let mut d = [Mat3::zeros(); 3];
    d[0][(1, 1)] = 2.0 * f * fp;
    d[0][(2, 2)] = 2.0 * f * fp * s * s;
    d[1][(2, 2)] = 2.0 * f * f * s * c;
    let mut dd = [[Mat3::zeros(); 3]; 3];
    dd[0][0][(1, 1)] = 2.0 * (fp * fp + f * fpp);
    dd[0][0][(2, 2)] = 2.0 * (fp * fp + f * fpp) * s * s;
    dd[0][1][(2, 2)] = 4.0 * f * fp * s * c;
    dd[1][0][(2, 2)] = 4.0 * f * fp * s * c;
    dd[1][1][(2, 2)] = 2.0 * f * f * (c * c - s * s);
    scale_jet(
        MatJet {
            value: v,
            d1: d,
            d2: Some(dd),
        },
        scale,
    )
    .expect("infallible")
}

fn scale_jet<const N: usize>(mut j: MatJet<N>, c: f64) -> Result<MatJet<N>> {
    j.value *= c;
    for m in j.d1.iter_mut() {
        *m *= c;
    }
    if let Some(d2) = j.d2.as_mut() {
        for row in d2.iter_mut() {
            for m in row.iter_mut() {
                *m *= c;
            }
        }
    }
    Ok(j)
}

#[derive(Clone)]
struct Deviation {
    eval: EvalFn3,
    jet: Option<JetFn3>,
}

/// Symmetric (or general) rank-2 covariant field on a 3-dimensional end.
#[derive(Clone)]
pub struct TensorField3 {
    background: Background,
    deviation: Option<Deviation>,
    coords: CoordSystem,
}

pub type SymTensorField3 = TensorField3;

fn check_finite(m: &Mat3, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

impl TensorField3 {
    pub fn zero(coords: CoordSystem) -> Self {
        Self {
            background: Background::Zero,
            deviation: None,
            coords,
        }
    }

    pub fn from_background(background: Background, coords: CoordSystem) -> Self {
        Self {
            background,
            deviation: None,
            coords,
        }
    }

    /// Field given by a plain closure; derivatives by finite differences.
    pub fn from_fn<F>(coords: CoordSystem, f: F) -> Self
    where
        F: Fn(&Point3) -> Result<Mat3> + Send + Sync + 'static,
    {
        Self::zero(coords).with_deviation(f)
    }

    /// Field given by an exact jet closure.
    pub fn from_jet<F>(coords: CoordSystem, f: F) -> Self
    where
        F: Fn(&Point3) -> Result<MatJet<3>> + Send + Sync + 'static,
    {
        Self::zero(coords).with_deviation_jet(f)
    }

    pub fn with_deviation<F>(mut self, f: F) -> Self
    where
        F: Fn(&Point3) -> Result<Mat3> + Send + Sync + 'static,
    {
        self.deviation = Some(Deviation {
            eval: Arc::new(f),
            jet: None,
        });
        self
    }

    pub fn with_deviation_jet<F>(mut self, f: F) -> Self
    where
        F: Fn(&Point3) -> Result<MatJet<3>> + Send + Sync + 'static,
    {
        let jet: JetFn3 = Arc::new(f);
        let j2 = jet.clone();
        self.deviation = Some(Deviation {
            eval: Arc::new(move |x| Ok(j2(x)?.value)),
            jet: Some(jet),
        });
        self
    }

    pub fn coords(&self) -> CoordSystem {
        self.coords
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    pub fn has_analytic_jet(&self) -> bool {
        self.deviation.as_ref().is_none_or(|d| d.jet.is_some())
    }

    pub fn deviation(&self, x: &Point3) -> Result<Mat3> {
        match &self.deviation {
            None => Ok(Mat3::zeros()),
            Some(d) => {
                let v = (d.eval)(x)?;
                check_finite(&v, "tensor field deviation")?;
                Ok(v)
            }
        }
    }

    pub fn value(&self, x: &Point3) -> Result<Mat3> {
        let b = match &self.background {
            Background::Zero => Mat3::zeros(),
            Background::Identity(s) => Mat3::identity() * *s,
            bg => bg.jet(x)?.value,
        };
        Ok(b + self.deviation(x)?)
    }

    /// Exact-or-FD first derivatives of the deviation alone.
    pub fn deviation_first_derivatives(&self, x: &Point3, cfg: &DerivativeConfig) -> Result<[Mat3; 3]> {
        match &self.deviation {
            None => Ok([Mat3::zeros(); 3]),
            Some(d) => match (&d.jet, cfg.mode) {
                (Some(j), DerivativeMode::Auto) => Ok(j(x)?.d1),
                _ => diff::first_derivatives(&*d.eval, x, cfg.richardson),
            },
        }
    }

    /// `out[k] = d_k T`.
    pub fn first_derivatives(&self, x: &Point3, cfg: &DerivativeConfig) -> Result<[Mat3; 3]> {
        let mut d = self.deviation_first_derivatives(x, cfg)?;
        if !matches!(self.background, Background::Zero | Background::Identity(_)) {
            let b = self.background.jet(x)?;
            for k in 0..3 {
                d[k] += b.d1[k];
            }
        }
        Ok(d)
    }

    /// `out[k][l] = d_k d_l T`.
    pub fn second_derivatives(&self, x: &Point3, cfg: &DerivativeConfig) -> Result<[[Mat3; 3]; 3]> {
        let mut dd = match &self.deviation {
            None => [[Mat3::zeros(); 3]; 3],
            Some(d) => {
                let exact = match (&d.jet, cfg.mode) {
                    (Some(j), DerivativeMode::Auto) => j(x)?.d2,
                    _ => None,
                };
                match exact {
                    Some(v) => v,
                    None => diff::second_derivatives(&*d.eval, x, cfg.richardson)?,
                }
            }
        };
        if !matches!(self.background, Background::Zero | Background::Identity(_)) {
            let b = self.background.jet(x)?;
            let b2 = b
                .d2
                .ok_or_else(|| Error::NonFinite("background jet without second derivatives".into()))?;
            for k in 0..3 {
                for l in 0..3 {
                    dd[k][l] += b2[k][l];
                }
            }
        }
        Ok(dd)
    }

    /// `c * T`, preserving the background/deviation split.
    pub fn scaled(&self, c: f64) -> Self {
        let deviation = self.deviation.as_ref().map(|d| {
            let e = d.eval.clone();
            Deviation {
                eval: Arc::new(move |x| Ok(e(x)? * c)),
                jet: d.jet.as_ref().map(|j| {
                    let j = j.clone();
                    Arc::new(move |x: &Point3| scale_jet(j(x)?, c)) as JetFn3
                }),
            }
        });
        Self {
            background: self.background.scaled(c),
            deviation,
            coords: self.coords,
        }
    }

    /// `a * self + b * other`, taken as a new deviation over `a * background(self)`.
    pub fn combine(&self, a: f64, other: &TensorField3, b: f64) -> Self {
        let s = self.scaled(a);
        let o = other.clone();
        let sd = s.deviation.clone();
        let eval = move |x: &Point3| -> Result<Mat3> {
            let own = match &sd {
                Some(d) => (d.eval)(x)?,
                None => Mat3::zeros(),
            };
            Ok(own + o.value(x)? * b)
        };
        Self {
            background: s.background,
            deviation: Some(Deviation {
                eval: Arc::new(eval),
                jet: None,
            }),
            coords: self.coords,
        }
    }
}

/// Riemannian 3-metric; evaluation rejects degenerate or indefinite values.
#[derive(Clone)]
pub struct MetricField3(pub TensorField3);

impl std::ops::Deref for MetricField3 {
    type Target = TensorField3;
    fn deref(&self) -> &TensorField3 {
        &self.0
    }
}

impl MetricField3 {
    pub fn new(field: TensorField3) -> Self {
        Self(field)
    }

    pub fn euclidean() -> Self {
        Self(TensorField3::from_background(Background::Identity(1.0), CoordSystem::Cartesian))
    }

    /// Value together with its inverse; fails unless positive definite.
    pub fn value_inverse(&self, x: &Point3) -> Result<(Mat3, Mat3)> {
        let g = self.0.value(x)?;
        let inv = positive_inverse(&g, x)?;
        Ok((g, inv))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }
}

pub(crate) fn positive_inverse(g: &Mat3, x: &[f64]) -> Result<Mat3> {
    check_finite(g, "metric")?;
    let chol = nalgebra::Cholesky::new(*g).ok_or_else(|| Error::DegenerateMetric {
        point: x.to_vec(),
        detail: "metric is not positive definite".into(),
    })?;
    let scale = g.abs().max();
    let det = g.determinant();
    if det <= scale.powi(3) * 1e-14 {
        return Err(Error::DegenerateMetric {
            point: x.to_vec(),
            detail: format!("determinant {det:e}"),
        });
    }
    Ok(chol.inverse())
}

/// General 2-tensor split into symmetric and antisymmetric parts.
#[derive(Clone)]
pub struct GeneralTensorField3 {
    pub symmetric: TensorField3,
    pub antisymmetric: Option<TensorField3>,
}

impl GeneralTensorField3 {
    pub fn symmetric(t: TensorField3) -> Self {
        Self {
            symmetric: t,
            antisymmetric: None,
        }
    }

    pub fn value(&self, x: &Point3) -> Result<Mat3> {
        let mut v = self.symmetric.value(x)?;
        if let Some(a) = &self.antisymmetric {
            v += a.value(x)?;
        }
        Ok(v)
    }

    pub fn first_derivatives(&self, x: &Point3, cfg: &DerivativeConfig) -> Result<[Mat3; 3]> {
        let mut d = self.symmetric.first_derivatives(x, cfg)?;
        if let Some(a) = &self.antisymmetric {
            let da = a.first_derivatives(x, cfg)?;
            for k in 0..3 {
                d[k] += da[k];
            }
        }
        Ok(d)
    }
}

/// Lorentzian 4-metric in coordinates (x^0 = t, x^1, x^2, x^3).
#[derive(Clone)]
pub struct Metric4Field {
    eval: EvalFn4,
    jet: Option<JetFn4>,
    /// Sign of the lapse relative to the future normal, when not +1.
    lapse_sign: Option<Arc<dyn Fn(&Point4) -> f64 + Send + Sync>>,
}

impl Metric4Field {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&Point4) -> Result<Mat4> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            jet: None,
            lapse_sign: None,
        }
    }

    /// Metric with an exact jet (first and, optionally, second derivatives).
    pub fn from_jet<F>(f: F) -> Self
    where
        F: Fn(&Point4) -> Result<MatJet<4>> + Send + Sync + 'static,
    {
        let jet: JetFn4 = Arc::new(f);
        let j2 = jet.clone();
        Self {
            eval: Arc::new(move |x| Ok(j2(x)?.value)),
            jet: Some(jet),
            lapse_sign: None,
        }
    }

    pub fn with_lapse_sign<F>(mut self, f: F) -> Self
    where
        F: Fn(&Point4) -> f64 + Send + Sync + 'static,
    {
        self.lapse_sign = Some(Arc::new(f));
        self
    }

    pub fn lapse_sign(&self, x: &Point4) -> f64 {
        self.lapse_sign.as_ref().map_or(1.0, |f| f(x))
    }

    pub fn value(&self, x: &Point4) -> Result<Mat4> {
        let v = (self.eval)(x)?;
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("spacetime metric".into()));
        }
        Ok(v)
    }

    pub fn first_derivatives(&self, x: &Point4, cfg: &DerivativeConfig) -> Result<[Mat4; 4]> {
        match (&self.jet, cfg.mode) {
            (Some(j), DerivativeMode::Auto) => Ok(j(x)?.d1),
            _ => diff::first_derivatives(&*self.eval, x, cfg.richardson),
        }
    }

    pub fn second_derivatives(&self, x: &Point4, cfg: &DerivativeConfig) -> Result<[[Mat4; 4]; 4]> {
        if let (Some(j), DerivativeMode::Auto) = (&self.jet, cfg.mode) {
            if let Some(d2) = j(x)?.d2 {
                return Ok(d2);
            }
        }
        diff::second_derivatives(&*self.eval, x, cfg.richardson)
    }
}
