//! Mean curvature of coordinate spheres and apparent-horizon residuals.

use serde::{Deserialize, Serialize};

use super::{Conformal, InitialDataSet};
use crate::charges::quadrature::{sphere_integral, QuadratureSpec, SphereNode};
use crate::error::{Error, Result};
use crate::tensor::{CoordSystem, DerivativeConfig, Mat3, Point3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonSign {
    Future,
    Past,
}

impl HorizonSign {
    /// Coefficient of `H` in the residual: future horizons satisfy `-H = tr(h|S)`.
    fn coefficient(self) -> f64 {
        match self {
            HorizonSign::Future => -1.0,
            HorizonSign::Past => 1.0,
        }
    }
}

/// Coordinate sphere `|x - center| = radius` (Cartesian ends) or `R = radius` (hyperbolic ends).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sphere {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Sphere {
    pub fn centered(radius: f64) -> Self {
        Self {
            center: [0.0; 3],
            radius,
        }
    }
}

/// Default rule for horizon work; spherical data are resolved exactly by small rules.
pub fn horizon_quadrature() -> QuadratureSpec {
    QuadratureSpec::new(8, 16)
}

struct SurfaceGeometry {
    mean_curvature: f64,
    /// `tr_{g_S}(T|_S)` of the supplied tensor.
    trace: f64,
}

fn node_point(coords: CoordSystem, s: &Sphere, n: &SphereNode) -> Point3 {
    match coords {
        CoordSystem::PolarSpherical => [s.radius, n.theta, n.psi],
        _ => [
            s.center[0] + s.radius * n.n[0],
            s.center[1] + s.radius * n.n[1],
            s.center[2] + s.radius * n.n[2],
        ],
    }
}

/// `H = div(nu)` and the tangential trace of `t` on the sphere through `x`.
fn surface_geometry(d: &InitialDataSet, s: &Sphere, x: &Point3, t: &Mat3) -> Result<SurfaceGeometry> {
    let cfg = DerivativeConfig::default();
    let (_, inv) = d.g.value_inverse(x)?;
    let dg = d.g.first_derivatives(x, &cfg)?;
    let (n, dn) = match d.g.coords() {
        CoordSystem::Cartesian => {
            let v = nalgebra::Vector3::new(x[0] - s.center[0], x[1] - s.center[1], x[2] - s.center[2]);
            let rho = v.norm();
            if rho == 0.0 {
                return Err(Error::UndefinedDirection);
            }
            let n = v / rho;
            (n, (Mat3::identity() - n * n.transpose()) / rho)
        }
        CoordSystem::PolarSpherical => (nalgebra::Vector3::new(1.0, 0.0, 0.0), Mat3::zeros()),
        CoordSystem::Curvilinear => {
            return Err(Error::parameter("sphere", "coordinate spheres need Cartesian or polar ends"))
        }
    };
    let u = inv * n;
    let nn = u.dot(&n);
    let norm = nn.sqrt();
    let mut div_u = (inv.component_mul(&dn)).sum();
    let mut dnn = [0.0; 3];
    let mut log_vol = 0.0;
    for i in 0..3 {
        let dgi_u = dg[i] * u;
        div_u -= (inv.row(i) * dgi_u)[(0, 0)];
        dnn[i] = -u.dot(&dgi_u) + 2.0 * (dn.row(i) * u)[(0, 0)];
        log_vol += 0.5 * inv.component_mul(&dg[i]).sum() * u[i];
    }
    let u_dnn: f64 = (0..3).map(|i| u[i] * dnn[i]).sum();
    let mean_curvature = div_u / norm - u_dnn / (2.0 * norm * nn) + log_vol / norm;
    let nu = u / norm;
    let proj = inv - nu * nu.transpose();
    Ok(SurfaceGeometry {
        mean_curvature,
        trace: proj.component_mul(t).sum(),
    })
}

fn area_mean<F>(d: &InitialDataSet, s: &Sphere, q: &QuadratureSpec, f: F) -> Result<[f64; 2]>
where
    F: Fn(&Point3) -> Result<[f64; 2]> + Sync,
{
    if !(s.radius > 0.0) {
        return Err(Error::parameter("sphere", "radius must be positive"));
    }
    let coords = d.g.coords();
    let [a, b, w] = sphere_integral(q, |n| {
        let v = f(&node_point(coords, s, n))?;
        Ok([v[0], v[1], 1.0])
    })?;
    Ok([a / w, b / w])
}

/// Area-averaged `c H - tr_{g_S}(h|_S) - 2 kappa`, with `c = -1` (future) or `+1` (past).
///
/// `kappa = 0` on planar ends and `1/(lambda sinh(T/lambda))` on hyperbolic ends, so that
/// the hyperbolic condition reads `c H = tr(K|_S) - 2 sqrt(Lambda/3) tanh(T/2lambda)`.
pub fn horizon_residual(d: &InitialDataSet, s: &Sphere, sign: HorizonSign, q: &QuadratureSpec) -> Result<f64> {
    let h = d.momentum_tensor()?;
    let kappa = match d.conformal {
        Conformal::Planar { .. } => 0.0,
        Conformal::Hyperbolic { t } => 1.0 / (d.lambda() * (t / d.lambda()).sinh()),
    };
    let c = sign.coefficient();
    let [r, _] = area_mean(d, s, q, |x| {
        let geo = surface_geometry(d, s, x, &h.value(x)?)?;
        Ok([c * geo.mean_curvature - geo.trace - 2.0 * kappa, 0.0])
    })?;
    Ok(r)
}

/// Area-averaged null expansions `theta_pm = H +- tr(K|_S)`.
pub fn null_expansions(d: &InitialDataSet, s: &Sphere, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let [hm, tr] = area_mean(d, s, q, |x| {
        let geo = surface_geometry(d, s, x, &d.k.value(x)?)?;
        Ok([geo.mean_curvature, geo.trace])
    })?;
    Ok((hm + tr, hm - tr))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HorizonLocation {
    pub radius: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Tolerance on the residual at an accepted horizon.
pub const HORIZON_TOLERANCE: f64 = 1e-10;

/// Radius of a centered coordinate sphere with vanishing residual, by bisection
/// with a secant finish. Without a bracket a geometric scan over `(1e-3, 1e3) lambda` is used.
pub fn find_horizon_spherical(
    d: &InitialDataSet,
    sign: HorizonSign,
    bracket: Option<(f64, f64)>,
    q: &QuadratureSpec,
) -> Result<HorizonLocation> {
    let f = |r: f64| horizon_residual(d, &Sphere::centered(r), sign, q);
    let (mut a, mut b) = match bracket {
        Some(br) => br,
        None => scan_bracket(&f, d.lambda())?,
    };
    if !(a > 0.0 && b > a) {
        return Err(Error::parameter("bracket", format!("invalid bracket ({a}, {b})")));
    }
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(HorizonLocation { radius: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(HorizonLocation { radius: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotFound(format!(
            "residual has one sign on [{a}, {b}] ({fa:e}, {fb:e})"
        )));
    }
    let mut it = 0;
    while (b - a) > 1e-13 * b && it < 200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        it += 1;
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let r = 0.5 * (a + b);
    let res = f(r)?;
    if res.abs() > HORIZON_TOLERANCE {
        return Err(Error::NotFound(format!("bracket collapsed at r = {r} with residual {res:e}")));
    }
    Ok(HorizonLocation {
        radius: r,
        residual: res,
        iterations: it,
    })
}

fn scan_bracket<F: Fn(f64) -> Result<f64>>(f: &F, lambda: f64) -> Result<(f64, f64)> {
    let n = 120;
    let (lo, hi) = (1e-3 * lambda, 1e3 * lambda);
    let ratio = (hi / lo).powf(1.0 / n as f64);
    let mut r0 = lo;
    let mut f0 = f(r0)?;
    for _ in 0..n {
        let r1 = r0 * ratio;
        let f1 = f(r1)?;
        if f0.signum() != f1.signum() {
            return Ok((r0, r1));
        }
        r0 = r1;
        f0 = f1;
    }
    Err(Error::NotFound("residual keeps one sign on the scanned radii".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{slice_data, ChartId};

    const L: f64 = 10.0;

    fn planar(t: f64) -> InitialDataSet {
        let (g, k) = slice_data(ChartId::PlanarUpper, t, L).unwrap();
        InitialDataSet::new(g, k, 3.0 / (L * L), Conformal::Planar { factor: (t / L).exp() }, "dS").unwrap()
    }

    #[test]
    fn planar_sphere_expansions() {
        let d = planar(2.0);
        let (tp, tm) = null_expansions(&d, &Sphere::centered(3.0), &horizon_quadrature()).unwrap();
        let a = (2.0 / L).exp();
        assert!((tp - (2.0 / (3.0 * a) + 2.0 / L)).abs() < 1e-10);
        assert!((tm - (2.0 / (3.0 * a) - 2.0 / L)).abs() < 1e-10);
        let fut = horizon_residual(&d, &Sphere::centered(3.0), HorizonSign::Future, &horizon_quadrature()).unwrap();
        assert!(fut < 0.0 && (fut + 2.0 / (3.0 * a)).abs() < 1e-10);
    }

    #[test]
    fn off_center_sphere_in_flat_space() {
        let d = planar(0.0);
        let s = Sphere {
            center: [1.0, -2.0, 0.5],
            radius: 4.0,
        };
        let r = horizon_residual(&d, &s, HorizonSign::Past, &horizon_quadrature()).unwrap();
        assert!((r - 0.5).abs() < 1e-10);
    }

    #[test]
    fn planar_has_no_horizon() {
        let d = planar(0.0);
        assert!(matches!(
            find_horizon_spherical(&d, HorizonSign::Future, None, &horizon_quadrature()),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn hyperbolic_slice_closed_form() {
        let t = 5.0;
        let (g, k) = slice_data(ChartId::Hyperbolic, t, L).unwrap();
        let d = InitialDataSet::new(g, k, 3.0 / (L * L), Conformal::Hyperbolic { t }, "hyp").unwrap();
        let res = horizon_residual(&d, &Sphere::centered(5.0), HorizonSign::Future, &horizon_quadrature()).unwrap();
        let hh = (t / L).sinh();
        let mean = 2.0 / (hh * L * (5.0 / L).tanh());
        let trk = 2.0 / (L * (t / L).tanh());
        let expect = -mean - (trk - 2.0 / L * (t / (2.0 * L)).tanh());
        assert!((res - expect).abs() < 1e-10, "{res} {expect}");
    }
}
