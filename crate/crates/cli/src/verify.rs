//! Invariant suite: embeddings, vacuum equations, constraints, charges, asymptotics.

use std::f64::consts::PI;

use dscharge_core::charges::{adm_charges_bar, hyperbolic_charges, mass_inequalities, ChargeOptions, QuadratureSpec};
use dscharge_core::charts::{chart_metric_field, embed, locate, ChartId, ChartPoint};
use dscharge_core::initial_data::horizon::{find_horizon_spherical, horizon_quadrature, HorizonSign};
use dscharge_core::models::{desitter, kerr_leading_terms, kerr_numeric_terms, KerrDeSitter, McVittie};
use dscharge_core::tensor::{constraints, curvature4, DerivativeConfig, Metric4Field};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::JobConfig;
use crate::tasks::TaskError;

const LAMBDA: f64 = 10.0;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn check(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        value,
        tolerance,
        pass: value.is_finite() && value <= tolerance,
        note: None,
    }
}

fn random_point(chart: ChartId, rng: &mut ChaCha8Rng, l: f64) -> [f64; 4] {
    let mut u = |a: f64, b: f64| a + (b - a) * rng.random::<f64>();
    let th = u(0.05, PI - 0.05);
    let ps = u(0.0, 2.0 * PI);
    match chart {
        ChartId::Global => [u(-2.0 * l, 2.0 * l), u(0.05, PI - 0.05), th, ps],
        ChartId::PlanarUpper | ChartId::PlanarLower => [u(-l, l), u(-l, l), u(-l, l), u(-l, l)],
        ChartId::StaticInner => [u(-2.0 * l, 2.0 * l), u(0.01 * l, 0.99 * l), th, ps],
        ChartId::StaticOuter => [u(-2.0 * l, 2.0 * l), u(1.01 * l, 5.0 * l), th, ps],
        ChartId::Hyperbolic => {
            let s = if u(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
            [s * u(0.1 * l, 2.0 * l), u(0.01 * l, 3.0 * l), th, ps]
        }
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn embedding_checks(rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<Check>) -> Result<(), TaskError> {
    for chart in ChartId::ALL {
        let (mut res, mut trip) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let c = random_point(chart, rng, LAMBDA);
            let p = ChartPoint::new(chart, c, LAMBDA)?;
            let a = embed(&p)?;
            res = res.max(a.hyperboloid_residual(LAMBDA).abs());
            let q = locate(&a, chart, LAMBDA)?;
            for i in 0..4 {
                let d = if i == 3 { angle_gap(q.coords[i], c[i]) } else { (q.coords[i] - c[i]).abs() };
                trip = trip.max(d / c[i].abs().max(1.0));
            }
        }
        out.push(check(format!("embedding residual / lambda^2 ({chart})"), res / (LAMBDA * LAMBDA), 1e-12));
        out.push(check(format!("chart roundtrip ({chart})"), trip, 1e-10));
    }
    Ok(())
}

fn vacuum(g: &Metric4Field, pts: &[[f64; 4]]) -> Result<f64, TaskError> {
    let cc = 3.0 / (LAMBDA * LAMBDA);
    let mut worst = 0.0f64;
    for x in pts {
        let c = curvature4(g, x, &DerivativeConfig::default())?;
        worst = worst.max((c.ricci - c.metric * cc).abs().max());
    }
    Ok(worst)
}

fn vacuum_checks(rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<Check>) -> Result<(), TaskError> {
    for chart in ChartId::ALL {
        let pts: Vec<_> = (0..n).map(|_| random_point(chart, rng, LAMBDA)).collect();
        out.push(check(format!("|Ric - Lambda g| ({chart})"), vacuum(&chart_metric_field(chart, LAMBDA), &pts)?, 1e-6));
    }
    let mc = McVittie::new(1.0, LAMBDA)?;
    let pts: Vec<_> = (0..n)
        .map(|_| {
            let r = 1.0 + 40.0 * rng.random::<f64>();
            let d = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let nd = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            [5.0 * rng.random::<f64>(), r * d[0] / nd, r * d[1] / nd, r * d[2] / nd]
        })
        .collect();
    out.push(check("|Ric - Lambda g| (mcvittie)", vacuum(&mc.metric4(), &pts)?, 1e-6));
    let k = KerrDeSitter::new(1.0, 0.5, LAMBDA)?;
    let pts: Vec<_> = (0..n)
        .map(|i| {
            let r = if i % 2 == 0 { 3.0 + 5.0 * rng.random::<f64>() } else { 12.0 + 20.0 * rng.random::<f64>() };
            [rng.random::<f64>() * 10.0, r, 0.1 + (PI - 0.2) * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()]
        })
        .collect();
    out.push(check("|Ric - Lambda g| (kerr-ds boyer-lindquist)", vacuum(&k.bl_metric4(), &pts)?, 1e-6));
    Ok(())
}

fn constraint_checks(mismatch: f64, out: &mut Vec<Check>) -> Result<(), TaskError> {
    let cfg = DerivativeConfig::default();
    let cc = 3.0 / (LAMBDA * LAMBDA) * (1.0 + mismatch);
    for (name, d) in [
        ("de-sitter planar", desitter::planar_slice(LAMBDA, 0.0)?),
        ("mcvittie", McVittie::new(1.0, LAMBDA)?.slice(0.0)?),
    ] {
        let mut worst = 0.0f64;
        for x in [[3.0, 1.0, -2.0], [0.4, 5.0, 7.0], [-20.0, 3.0, 1.0]] {
            let c = constraints(&d.g, &d.k, cc, &x, &cfg)?;
            worst = worst.max(c.t00.abs()).max(c.t0i_norm);
        }
        let mut c = check(format!("vacuum constraints |T00|, |T0i| ({name})"), worst, 1e-8);
        if mismatch != 0.0 {
            c.note = Some(format!("Lambda perturbed by {:e}", cc - 3.0 / (LAMBDA * LAMBDA)));
        }
        out.push(c);
    }
    Ok(())
}

fn charge_checks(q: &QuadratureSpec, out: &mut Vec<Check>, warnings: &mut Vec<String>) -> Result<(), TaskError> {
    let coarse = q.n_theta < 32 || q.n_psi < 64;
    if coarse {
        warnings.push(format!(
            "coarse quadrature ({} x {}): charge tolerances relaxed to 1e-4",
            q.n_theta, q.n_psi
        ));
    }
    let tol = if coarse { 1e-4 } else { 1e-6 };
    let opts = ChargeOptions {
        quadrature: q.clone(),
        ..Default::default()
    };
    let c = adm_charges_bar(&McVittie::new(1.0, LAMBDA)?.slice(0.0)?, &opts)?;
    let (e, p, j) = c.rescaled()?;
    out.push(check("mcvittie |E - m|", (e - 1.0).abs(), tol));
    out.push(check("mcvittie |P|, |J|", p.iter().chain(&j).fold(0.0f64, |a, v| a.max(v.abs())), 1e-8));
    let d = desitter::planar_slice(LAMBDA, 0.0)?;
    let c = adm_charges_bar(&d, &opts)?;
    let (e, p, j) = c.rescaled()?;
    let m = mass_inequalities(Some((e, p, j, c.factor)), None, 1.0, 1.0)?;
    let worst = m.energy_momentum.unwrap_or(f64::NAN).abs().max(m.combined.unwrap_or(f64::NAN).abs());
    out.push(check("planar de Sitter margins", worst, 1e-8));
    let h = hyperbolic_charges(&desitter::hyperbolic_slice(LAMBDA, 5.0)?, &opts)?;
    out.push(check("hyperbolic de Sitter |E^H|", h.values().iter().fold(0.0f64, |a, v| a.max(v.abs())), 1e-8));
    for (m, t) in [(1.0, 0.0), (2.0, LAMBDA * 2f64.ln())] {
        let mc = McVittie::new(m, LAMBDA)?;
        let loc = find_horizon_spherical(&mc.slice(t)?, HorizonSign::Future, None, &horizon_quadrature())?;
        let expect = mc.throat_radius(t);
        out.push(check(format!("mcvittie horizon m={m} t={t:.4} relative error"), (loc.radius / expect - 1.0).abs(), 1e-9));
    }
    Ok(())
}

fn slope(rs: &[f64], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ls.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn asymptotic_checks(out: &mut Vec<Check>) -> Result<(), TaskError> {
    let k = KerrDeSitter::new(1.0, 0.5, LAMBDA)?;
    let radii = [1e2, 1e3, 1e4];
    let (th, ps) = (1.0, 0.3);
    let mut diffs: Vec<Vec<f64>> = vec![];
    let mut powers = vec![];
    let mut names = vec![];
    for (i, &r) in radii.iter().enumerate() {
        let lead = kerr_leading_terms(&k, 0.0, r, th);
        let num = kerr_numeric_terms(&k, 0.0, r, th, ps)?;
        for (j, (l, (_, v))) in lead.iter().zip(&num).enumerate() {
            if i == 0 {
                diffs.push(vec![]);
                powers.push(l.power);
                names.push(l.name);
            }
            diffs[j].push(v - l.value);
        }
    }
    for ((name, p), d) in names.iter().zip(&powers).zip(&diffs) {
        // Pass when the remainder decays at least 0.9 powers faster than the leading term.
        let s = slope(&radii, d);
        let mut c = check(format!("kerr asymptotics {name}: slope - leading power"), s - *p as f64, -0.9);
        c.note = Some(format!("slope {s:.3}, leading power {p}"));
        out.push(c);
    }
    Ok(())
}

/// Run the suite; returns the report and whether every check passed.
pub fn run(cfg: &JobConfig) -> Result<(Value, bool), TaskError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.verify.points.unwrap_or(50);
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    embedding_checks(&mut rng, 20 * n, &mut checks)?;
    vacuum_checks(&mut rng, n.min(20), &mut checks)?;
    constraint_checks(cfg.verify.lambda_mismatch, &mut checks)?;
    charge_checks(&cfg.quadrature, &mut checks, &mut warnings)?;
    asymptotic_checks(&mut checks)?;
    let passed = checks.iter().all(|c| c.pass);
    Ok((
        json!({
            "seed": cfg.seed,
            "passed": passed,
            "failures": checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect::<Vec<_>>(),
            "warnings": warnings,
            "checks": checks,
        }),
        passed,
    ))
}
