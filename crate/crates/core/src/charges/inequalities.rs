//! Mass inequalities as signed margins (non-negative means satisfied).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `E - |P|_{g_P} = P (Ebar - |Pbar|)`.
    pub energy_momentum: Option<f64>,
    /// `E - |C1 P + C2 J|_{g_P}`.
    pub combined: Option<f64>,
    /// `E^H_0 - |(E^H_1, E^H_2, E^H_3)|`.
    pub hyperbolic: Option<f64>,
}

impl Margins {
    /// Margins that are present and below `-tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (name, m) in [
            ("energy_momentum", self.energy_momentum),
            ("combined", self.combined),
            ("hyperbolic", self.hyperbolic),
        ] {
            if m.is_some_and(|m| m < -tol) {
                v.push(name);
            }
        }
        v
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Margins from rescaled planar charges `(E, P, J)` with conformal factor `factor`,
/// and/or hyperbolic `E^H`.
///
/// `|V|_{g_P} = |V| / P` for the rescaled vectors, so the first margin equals `P (Ebar - |Pbar|)`.
pub fn mass_inequalities(
    planar: Option<(f64, [f64; 3], [f64; 3], f64)>,
    eh: Option<[f64; 4]>,
    c1: f64,
    c2: f64,
) -> Result<Margins> {
    if planar.is_none() && eh.is_none() {
        return Err(Error::IncompleteReport("no charges to compare".into()));
    }
    let mut m = Margins::default();
    if let Some((e, p, j, factor)) = planar {
        if !(factor > 0.0) {
            return Err(Error::parameter("conformal_factor", "must be positive"));
        }
        m.energy_momentum = Some(e - norm(p) / factor);
        let comb = std::array::from_fn(|k| c1 * p[k] + c2 * j[k]);
        m.combined = Some(e - norm(comb) / factor);
    }
    if let Some(eh) = eh {
        m.hyperbolic = Some(eh[0] - norm([eh[1], eh[2], eh[3]]));
    }
    Ok(m)
}
