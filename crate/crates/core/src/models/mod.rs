//! Closed-form spacetimes and the initial data they induce.

pub mod desitter;
pub mod kerr;
pub mod mcvittie;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::initial_data::InitialDataSet;
use crate::tensor::Metric4Field;

pub use kerr::{kerr_leading_terms, kerr_numeric_terms, KerrDeSitter, LeadingTerm, PsiRange};
pub use mcvittie::McVittie;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Slicing {
    #[default]
    Planar,
    Hyperbolic,
}

fn default_lambda() -> f64 {
    10.0
}

/// Declarative model selection (`lambda` defaults to 10), e.g. `{"model":"kerr-ds","m":1.0,"a":0.5,"lambda":10.0,"t":0.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelDescriptor {
    DeSitter {
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        t: f64,
        #[serde(default)]
        slicing: Slicing,
    },
    Mcvittie {
        m: f64,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        t: f64,
    },
    KerrDs {
        m: f64,
        a: f64,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        t: f64,
        #[serde(default)]
        psi_range: PsiRange,
    },
}

impl ModelDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            ModelDescriptor::DeSitter { .. } => "de-sitter",
            ModelDescriptor::Mcvittie { .. } => "mcvittie",
            ModelDescriptor::KerrDs { .. } => "kerr-ds",
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            ModelDescriptor::DeSitter { lambda, .. }
            | ModelDescriptor::Mcvittie { lambda, .. }
            | ModelDescriptor::KerrDs { lambda, .. } => *lambda,
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            ModelDescriptor::DeSitter { t, .. } | ModelDescriptor::Mcvittie { t, .. } | ModelDescriptor::KerrDs { t, .. } => *t,
        }
    }

    pub fn psi_range(&self) -> PsiRange {
        match self {
            ModelDescriptor::KerrDs { psi_range, .. } => *psi_range,
            _ => PsiRange::Standard,
        }
    }

    /// Initial data on the model's slice.
    pub fn initial_data(&self) -> Result<InitialDataSet> {
        match *self {
            ModelDescriptor::DeSitter { lambda, t, slicing } => match slicing {
                Slicing::Planar => desitter::planar_slice(lambda, t),
                Slicing::Hyperbolic => desitter::hyperbolic_slice(lambda, t),
            },
            ModelDescriptor::Mcvittie { m, lambda, t } => McVittie::new(m, lambda)?.slice(t),
            ModelDescriptor::KerrDs {
                m,
                a,
                lambda,
                t,
                psi_range,
            } => KerrDeSitter::new(m, a, lambda)?.planar_slice(t, psi_range),
        }
    }

    /// Spacetime metric in the model's natural coordinates.
    pub fn spacetime(&self) -> Result<Metric4Field> {
        match *self {
            ModelDescriptor::DeSitter { lambda, slicing, .. } => {
                crate::error::check_lambda(lambda)?;
                let chart = match slicing {
                    Slicing::Planar => crate::charts::ChartId::PlanarUpper,
                    Slicing::Hyperbolic => crate::charts::ChartId::Hyperbolic,
                };
                Ok(crate::charts::chart_metric_field(chart, lambda))
            }
            ModelDescriptor::Mcvittie { m, lambda, .. } => Ok(McVittie::new(m, lambda)?.metric4()),
            ModelDescriptor::KerrDs { m, a, lambda, .. } => Ok(KerrDeSitter::new(m, a, lambda)?.bl_metric4()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_json_roundtrip() {
        let s = r#"{"model":"kerr-ds","m":1.0,"a":0.5,"lambda":10.0,"t":0.0,"psi_range":"standard"}"#;
        let d: ModelDescriptor = serde_json::from_str(s).unwrap();
        assert_eq!(d.name(), "kerr-ds");
        assert_eq!(d.psi_range(), PsiRange::Standard);
        let back: ModelDescriptor = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<ModelDescriptor>(r#"{"model":"kerr-ds","m":1.0}"#).is_err());
    }
}
