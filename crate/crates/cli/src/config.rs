//! Job configuration: a JSON document, with command-line flags applied on top.

use std::path::{Path, PathBuf};

use dscharge_core::charges::{ExtrapolationSpec, QuadratureSpec};
use dscharge_core::initial_data::{EpsilonConvention, HorizonSign};
use dscharge_core::models::ModelDescriptor;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::Cli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Charges,
    Horizon,
    Constraints,
    Chart,
    Verify,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonJob {
    #[serde(default = "future")]
    pub sign: HorizonSign,
    #[serde(default)]
    pub bracket: Option<(f64, f64)>,
}

fn future() -> HorizonSign {
    HorizonSign::Future
}

impl Default for HorizonJob {
    fn default() -> Self {
        Self {
            sign: HorizonSign::Future,
            bracket: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsJob {
    #[serde(default = "twenty")]
    pub points: usize,
    /// Sampling shell in units of λ.
    #[serde(default)]
    pub r_min: Option<f64>,
    #[serde(default)]
    pub r_max: Option<f64>,
}

fn twenty() -> usize {
    20
}

impl Default for ConstraintsJob {
    fn default() -> Self {
        Self {
            points: 20,
            r_min: None,
            r_max: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartJob {
    pub from: String,
    pub to: String,
    #[serde(default = "ten")]
    pub lambda: f64,
    /// Time coordinate of the source chart.
    #[serde(default)]
    pub t: f64,
    /// Radial coordinate (planar charts use polar coordinates here).
    #[serde(default)]
    pub r: f64,
    #[serde(default = "half_pi")]
    pub theta: f64,
    #[serde(default)]
    pub psi: f64,
}

fn ten() -> f64 {
    10.0
}

fn half_pi() -> f64 {
    std::f64::consts::FRAC_PI_2
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    /// Relative change of Λ used when evaluating the constraints of the test data.
    #[serde(default)]
    pub lambda_mismatch: f64,
    /// Random points per check.
    #[serde(default)]
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub task: Task,
    #[serde(default)]
    pub model: Option<ModelDescriptor>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub extrapolation: ExtrapolationSpec,
    #[serde(default)]
    pub epsilon: EpsilonConvention,
    /// Reference point for angular momentum.
    #[serde(default)]
    pub z: [f64; 3],
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub c2: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub horizon: HorizonJob,
    #[serde(default)]
    pub constraints: ConstraintsJob,
    #[serde(default)]
    pub chart: Option<ChartJob>,
    #[serde(default)]
    pub verify: VerifyJob,
}

/// A configuration problem, with a JSON path to the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

fn object<'a>(v: &'a mut Value, key: &str) -> &'a mut Map<String, Value> {
    let root = v.as_object_mut().expect("root is an object");
    let entry = root.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    if !entry.is_object() {
        *entry = Value::Object(Map::new());
    }
    entry.as_object_mut().expect("object")
}

fn read_file(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| ConfigError::new("", format!("invalid JSON in {}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(ConfigError::new("", "config must be a JSON object"));
    }
    Ok(v)
}

/// Merge the config file (if any) with flags; flags take precedence.
pub fn build(cli: &Cli) -> Result<JobConfig, ConfigError> {
    let mut v = match &cli.config {
        Some(p) => read_file(p)?,
        None => Value::Object(Map::new()),
    };
    let root = v.as_object_mut().expect("object");
    root.insert("task".into(), serde_json::to_value(cli.task).expect("task"));
    let num = |x: f64| Value::from(x);
    if cli.task == Task::Chart {
        let c = object(&mut v, "chart");
        for (k, val) in [("from", cli.from.clone()), ("to", cli.to.clone())] {
            if let Some(s) = val {
                c.insert(k.into(), Value::from(s));
            }
        }
        for (k, val) in [("lambda", cli.lambda), ("t", cli.t), ("r", cli.r), ("theta", cli.theta), ("psi", cli.psi)] {
            if let Some(x) = val {
                c.insert(k.into(), num(x));
            }
        }
    } else {
        let has_model_flag = cli.model.is_some()
            || cli.m.is_some()
            || cli.a.is_some()
            || cli.lambda.is_some()
            || cli.t.is_some()
            || cli.psi_range.is_some();
        if has_model_flag {
            let file_tag = v
                .get("model")
                .and_then(|m| m.get("model"))
                .and_then(|t| t.as_str())
                .map(String::from);
            let m = object(&mut v, "model");
            if let Some(name) = &cli.model {
                if file_tag.as_deref() != Some(name.as_str()) {
                    m.clear();
                }
                m.insert("model".into(), Value::from(name.clone()));
            }
            for (k, val) in [("m", cli.m), ("a", cli.a), ("lambda", cli.lambda), ("t", cli.t)] {
                if let Some(x) = val {
                    m.insert(k.into(), num(x));
                }
            }
            if let Some(p) = &cli.psi_range {
                m.insert("psi_range".into(), Value::from(p.clone()));
            }
        }
    }
    let root = v.as_object_mut().expect("object");
    if let Some(p) = &cli.out {
        root.insert("out".into(), Value::from(p.display().to_string()));
    }
    if let Some(p) = &cli.csv {
        root.insert("csv".into(), Value::from(p.display().to_string()));
    }
    if let Some(s) = cli.seed {
        root.insert("seed".into(), Value::from(s));
    }
    if let Some(n) = cli.n_theta {
        object(&mut v, "quadrature").insert("n_theta".into(), Value::from(n));
    }
    if let Some(n) = cli.n_psi {
        object(&mut v, "quadrature").insert("n_psi".into(), Value::from(n));
    }
    if let Some(x) = cli.lambda_mismatch {
        object(&mut v, "verify").insert("lambda_mismatch".into(), num(x));
    }
    if let Some(s) = &cli.sign {
        object(&mut v, "horizon").insert("sign".into(), Value::from(s.clone()));
    }
    let text = v.to_string();
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cfg: JobConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().to_string();
        let pointer = match path.as_str() {
            "." => String::new(),
            "model" => model_field_pointer(&v, &message),
            _ => path,
        };
        ConfigError::new(pointer, message)
    })?;
    validate(&cfg)?;
    Ok(cfg)
}

/// The model object is internally tagged, so serde reports errors at `model`; narrow them to a field.
fn model_field_pointer(v: &Value, message: &str) -> String {
    let named = ["unknown field `", "missing field `"].iter().find_map(|p| {
        let rest = &message[message.find(p)? + p.len()..];
        Some(rest[..rest.find('`')?].to_string())
    });
    if let Some(field) = named {
        return format!("model.{field}");
    }
    let bad_number = v.get("model").and_then(Value::as_object).and_then(|m| {
        ["m", "a", "lambda", "t"]
            .into_iter()
            .find(|k| m.get(*k).is_some_and(|x| !x.is_number()))
    });
    match bad_number {
        Some(k) => format!("model.{k}"),
        None => "model".into(),
    }
}

fn validate(cfg: &JobConfig) -> Result<(), ConfigError> {
    let positive = |x: f64, p: &str| {
        if x.is_finite() && x > 0.0 {
            Ok(())
        } else {
            Err(ConfigError::new(p, format!("must be positive, got {x}")))
        }
    };
    match cfg.task {
        Task::Charges | Task::Horizon | Task::Constraints => {
            let m = cfg.model.as_ref().ok_or_else(|| ConfigError::new("model", "required for this task"))?;
            positive(m.lambda(), "model.lambda")?;
            match m {
                ModelDescriptor::Mcvittie { m, .. } | ModelDescriptor::KerrDs { m, .. } => positive(*m, "model.m")?,
                ModelDescriptor::DeSitter { .. } => {}
            }
        }
        Task::Chart => {
            let c = cfg.chart.as_ref().ok_or_else(|| ConfigError::new("chart", "required for the chart task (--from, --to)"))?;
            positive(c.lambda, "chart.lambda")?;
        }
        Task::Verify => {}
    }
    if cfg.quadrature.n_theta < 8 {
        return Err(ConfigError::new("quadrature.n_theta", "must be at least 8"));
    }
    if cfg.quadrature.n_psi < 16 {
        return Err(ConfigError::new("quadrature.n_psi", "must be at least 16"));
    }
    if cfg.constraints.points == 0 {
        return Err(ConfigError::new("constraints.points", "must be positive"));
    }
    if !cfg.verify.lambda_mismatch.is_finite() {
        return Err(ConfigError::new("verify.lambda_mismatch", "must be finite"));
    }
    Ok(())
}
