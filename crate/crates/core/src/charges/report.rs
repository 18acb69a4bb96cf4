//! Serializable charge report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::adm::{adm_charges_bar, ChargeOptions};
use super::extrapolate::Extrapolation;
use super::hyperbolic::hyperbolic_charges;
use super::inequalities::{mass_inequalities, Margins};
use crate::error::Result;
use crate::initial_data::{Conformal, EpsilonConvention, InitialDataSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionRecord {
    pub psi_range: String,
    pub epsilon: EpsilonConvention,
    pub z: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ChargeValues {
    pub E: Option<f64>,
    pub P: Option<[f64; 3]>,
    pub J: Option<[f64; 3]>,
    pub EH: Option<[f64; 4]>,
    pub Ebar: Option<f64>,
    pub Pbar: Option<[f64; 3]>,
    pub Jbar: Option<[f64; 3]>,
    /// Conformal factor `P` (planar) or `H` (hyperbolic).
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub radii: Vec<f64>,
    /// Raw per-radius values keyed by charge component.
    pub raw: BTreeMap<String, Vec<f64>>,
    pub fit: BTreeMap<String, Extrapolation>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub c1: f64,
    pub c2: f64,
    pub margins: Margins,
    pub violated: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub model: serde_json::Value,
    pub convention: ConventionRecord,
    pub charges: ChargeValues,
    pub diagnostics: Diagnostics,
    pub inequalities: InequalityRecord,
}

/// Tolerance below which a negative margin is not reported as violated.
pub const MARGIN_TOLERANCE: f64 = 1e-8;

fn push(diag: &mut Diagnostics, key: &str, raw: Vec<f64>, fit: &Extrapolation) {
    if fit.warning {
        let why = if fit.diverging { "raw sequence does not converge" } else { "fit residual above threshold" };
        diag.warnings.push(format!("{key}: {why}"));
    }
    diag.raw.insert(key.to_string(), raw);
    diag.fit.insert(key.to_string(), fit.clone());
}

/// Compute all charges the data set supports.
pub fn charge_report(
    d: &InitialDataSet,
    model: serde_json::Value,
    psi_range: &str,
    opts: &ChargeOptions,
    c1: f64,
    c2: f64,
) -> Result<ChargeReport> {
    let mut values = ChargeValues::default();
    let mut diag = Diagnostics {
        radii: vec![],
        raw: BTreeMap::new(),
        fit: BTreeMap::new(),
        warnings: vec![],
    };
    let margins = match d.conformal {
        Conformal::Planar { .. } => {
            let c = adm_charges_bar(d, opts)?;
            diag.radii = c.raw.iter().map(|r| r.radius).collect();
            push(&mut diag, "Ebar", c.raw.iter().map(|r| r.ebar).collect(), &c.ebar);
            for k in 0..3 {
                push(&mut diag, &format!("Pbar{}", k + 1), c.raw.iter().map(|r| r.pbar[k]).collect(), &c.pbar[k]);
                push(&mut diag, &format!("Jbar{}", k + 1), c.raw.iter().map(|r| r.jbar[k]).collect(), &c.jbar[k]);
            }
            let (eb, pb, jb) = c.bar_values();
            let (e, p, j) = c.rescaled()?;
            values = ChargeValues {
                E: Some(e),
                P: Some(p),
                J: Some(j),
                EH: None,
                Ebar: Some(eb),
                Pbar: Some(pb),
                Jbar: Some(jb),
                factor: c.factor,
            };
            mass_inequalities(Some((e, p, j, c.factor)), None, c1, c2)?
        }
        Conformal::Hyperbolic { .. } => {
            let c = hyperbolic_charges(d, opts)?;
            diag.radii = c.raw.iter().map(|r| r.radius).collect();
            for nu in 0..4 {
                push(&mut diag, &format!("EH{nu}"), c.raw.iter().map(|r| r.eh[nu]).collect(), &c.eh[nu]);
            }
            values.EH = Some(c.values());
            values.factor = d.conformal_factor()?;
            mass_inequalities(None, Some(c.values()), c1, c2)?
        }
    };
    Ok(ChargeReport {
        model,
        convention: ConventionRecord {
            psi_range: psi_range.to_string(),
            epsilon: opts.epsilon,
            z: d.z,
        },
        charges: values,
        diagnostics: diag,
        inequalities: InequalityRecord {
            c1,
            c2,
            violated: margins.violations(MARGIN_TOLERANCE).into_iter().map(String::from).collect(),
            margins,
        },
    })
}

impl ChargeReport {
    /// Rows `(charge, radius, value)` of the raw sequences.
    pub fn csv_rows(&self) -> Vec<(String, f64, f64)> {
        let mut rows = Vec::new();
        for (k, vals) in &self.diagnostics.raw {
            for (r, v) in self.diagnostics.radii.iter().zip(vals) {
                rows.push((k.clone(), *r, *v));
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::QuadratureSpec;

    #[test]
    fn de_sitter_report_is_deterministic_and_balanced() {
        let d = crate::models::desitter::planar_slice(10.0, 0.0).unwrap();
        let opts = ChargeOptions {
            quadrature: QuadratureSpec::new(8, 16),
            ..Default::default()
        };
        let a = charge_report(&d, serde_json::json!({"model": "de-sitter"}), "standard", &opts, 1.0, 1.0).unwrap();
        let b = charge_report(&d, serde_json::json!({"model": "de-sitter"}), "standard", &opts, 1.0, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.charges.E, Some(0.0));
        assert!(a.inequalities.violated.is_empty());
        assert_eq!(a.csv_rows().len(), 7 * 5);
    }
}
