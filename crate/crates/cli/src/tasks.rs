//! Task implementations.

use std::f64::consts::PI;

use anyhow::Context;
use dscharge_core::charges::{charge_report, ChargeOptions};
use dscharge_core::charts::{embed, locate, ChartId, ChartPoint};
use dscharge_core::initial_data::horizon::{find_horizon_spherical, horizon_quadrature, null_expansions, Sphere};
use dscharge_core::initial_data::InitialDataSet;
use dscharge_core::models::{McVittie, ModelDescriptor};
use dscharge_core::tensor::{constraints, CoordSystem, DerivativeConfig};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{ChartJob, JobConfig, Task};

pub enum TaskError {
    Core(dscharge_core::Error),
    Io(anyhow::Error),
}

impl From<dscharge_core::Error> for TaskError {
    fn from(e: dscharge_core::Error) -> Self {
        TaskError::Core(e)
    }
}

impl From<anyhow::Error> for TaskError {
    fn from(e: anyhow::Error) -> Self {
        TaskError::Io(e)
    }
}

pub struct Outcome {
    pub failed: bool,
}

fn model(cfg: &JobConfig) -> &ModelDescriptor {
    cfg.model.as_ref().expect("validated")
}

fn write_json(cfg: &JobConfig, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &cfg.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(cfg: &JobConfig) -> Result<Outcome, TaskError> {
    let (report, failed) = match cfg.task {
        Task::Charges => (charges(cfg)?, false),
        Task::Horizon => (horizon(cfg)?, false),
        Task::Constraints => (constraints_task(cfg)?, false),
        Task::Chart => (chart(cfg.chart.as_ref().expect("validated"))?, false),
        Task::Verify => {
            let (v, ok) = crate::verify::run(cfg)?;
            (v, !ok)
        }
    };
    write_json(cfg, &report)?;
    Ok(Outcome { failed })
}

fn charges(cfg: &JobConfig) -> Result<Value, TaskError> {
    let m = model(cfg);
    let d = m.initial_data()?.with_z(cfg.z);
    let opts = ChargeOptions {
        quadrature: cfg.quadrature.clone(),
        extrapolation: cfg.extrapolation.clone(),
        epsilon: cfg.epsilon,
        derivatives: DerivativeConfig::default(),
    };
    let model_json = serde_json::to_value(m).expect("descriptor");
    let report = charge_report(&d, model_json, m.psi_range().name(), &opts, cfg.c1, cfg.c2)?;
    if let Some(p) = &cfg.csv {
        let mut w = csv::Writer::from_path(p).with_context(|| format!("creating {}", p.display()))?;
        w.write_record(["charge", "radius", "value"]).context("csv")?;
        for (k, r, v) in report.csv_rows() {
            w.write_record([k, format!("{r:e}"), format!("{v:e}")]).context("csv")?;
        }
        w.flush().context("csv")?;
    }
    Ok(serde_json::to_value(&report).expect("report"))
}

fn horizon(cfg: &JobConfig) -> Result<Value, TaskError> {
    let m = model(cfg);
    let d = m.initial_data()?;
    let q = horizon_quadrature();
    let loc = find_horizon_spherical(&d, cfg.horizon.sign, cfg.horizon.bracket, &q)?;
    let (tp, tm) = null_expansions(&d, &Sphere::centered(loc.radius), &q)?;
    let mut out = json!({
        "model": m,
        "sign": cfg.horizon.sign,
        "radius": loc.radius,
        "residual": loc.residual,
        "iterations": loc.iterations,
        "null_expansions": {"theta_plus": tp, "theta_minus": tm},
    });
    if let ModelDescriptor::Mcvittie { m: mass, lambda, t } = m {
        out["expected_radius"] = json!(McVittie::new(*mass, *lambda)?.throat_radius(*t));
    }
    Ok(out)
}

fn sample_point(d: &InitialDataSet, rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> [f64; 3] {
    let r = r_min * (r_max / r_min).powf(rng.random::<f64>());
    let u: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let ps = 2.0 * PI * rng.random::<f64>();
    match d.g.coords() {
        CoordSystem::Cartesian => {
            let s = (1.0 - u * u).sqrt();
            [r * s * ps.cos(), r * s * ps.sin(), r * u]
        }
        _ => [r, u.acos(), ps],
    }
}

fn constraints_task(cfg: &JobConfig) -> Result<Value, TaskError> {
    let m = model(cfg);
    let d = m.initial_data()?;
    let l = d.lambda();
    let r_min = cfg.constraints.r_min.map_or((2.0 * d.inner_radius).max(0.1 * l), |x| x * l);
    let r_max = cfg.constraints.r_max.map_or(20.0 * l, |x| x * l);
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(dscharge_core::Error::parameter("constraints", "need 0 < r_min < r_max").into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cfgd = DerivativeConfig::default();
    let mut samples = Vec::new();
    let (mut max_t00, mut max_t0i, mut min_dec, mut min_mc) = (0.0f64, 0.0f64, f64::INFINITY, f64::INFINITY);
    for _ in 0..cfg.constraints.points {
        let x = sample_point(&d, &mut rng, r_min, r_max);
        let c = constraints(&d.g, &d.k, d.cosmological_constant, &x, &cfgd)?;
        max_t00 = max_t00.max(c.t00.abs());
        max_t0i = max_t0i.max(c.t0i_norm);
        min_dec = min_dec.min(c.dec_margin);
        min_mc = min_mc.min(c.mc_margin);
        samples.push(json!({"x": x, "sample": c}));
    }
    Ok(json!({
        "model": m,
        "seed": cfg.seed,
        "summary": {
            "max_abs_t00": max_t00,
            "max_t0i_norm": max_t0i,
            "min_dec_margin": min_dec,
            "min_mean_curvature_margin": min_mc,
        },
        "samples": samples,
    }))
}

/// Charts given by name; `static` picks the inner or outer patch.
fn source_chart(name: &str, job: &ChartJob) -> Result<ChartId, TaskError> {
    if name == "static" {
        return Ok(if job.r < job.lambda { ChartId::StaticInner } else { ChartId::StaticOuter });
    }
    Ok(name.parse()?)
}

fn chart(job: &ChartJob) -> Result<Value, TaskError> {
    let from = source_chart(&job.from, job)?;
    let (s, c) = job.theta.sin_cos();
    let coords = match from {
        ChartId::PlanarUpper | ChartId::PlanarLower => [job.t, job.r * s * job.psi.cos(), job.r * s * job.psi.sin(), job.r * c],
        _ => [job.t, job.r, job.theta, job.psi],
    };
    let p = ChartPoint::new(from, coords, job.lambda)?;
    let amb = embed(&p)?;
    let target = if job.to == "static" {
        match locate(&amb, ChartId::StaticInner, job.lambda) {
            Ok(q) => q,
            Err(_) => locate(&amb, ChartId::StaticOuter, job.lambda)?,
        }
    } else {
        locate(&amb, job.to.parse()?, job.lambda)?
    };
    Ok(json!({
        "from": from,
        "to": target.chart,
        "lambda": job.lambda,
        "input": coords,
        "ambient": amb.0,
        "output": target.coords,
        "hyperboloid_residual": amb.hyperboloid_residual(job.lambda),
    }))
}
