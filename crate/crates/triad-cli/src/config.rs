//! JSON run configuration.
//!
//! A single top-level object with a mandatory `model` block and optional
//! `sim`, `scan`, `output` and `seed` entries. Field names mirror the model
//! symbols (`k0..k3`, `alpha0..alpha2`, `a1`, `a2`, `D`, `X0in`, `S1in`,
//! `S2in`, `k_hyd`). Unknown keys are rejected, and every model invariant is
//! re-checked on load.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use triad::diagram::ParamAxis;
use triad::kinetics::{CurveKind, GrowthCurve, KineticClass};
use triad::model::{Hydrolysis, HydrolysisMode, ModelParams, State};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub a1: f64,
    pub a2: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "X0in")]
    pub x0_in: f64,
    #[serde(rename = "S1in")]
    pub s1_in: f64,
    #[serde(rename = "S2in")]
    pub s2_in: f64,
    pub hydrolysis_mode: HydrolysisMode,
    /// Required in `first_order` mode, forbidden otherwise (0 tolerated).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hyd: Option<f64>,
    /// Required in `biomass_dependent` mode, forbidden otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<CurveKind<f64>>,
    pub mu1: CurveKind<f64>,
    pub mu2: CurveKind<f64>,
}

impl ModelConfig {
    /// Builds validated model parameters, rejecting contradictory
    /// mode/field combinations.
    pub fn to_params(&self) -> Result<ModelParams<f64>, String> {
        let hydrolysis = match self.hydrolysis_mode {
            HydrolysisMode::FirstOrder => {
                if self.mu0.is_some() {
                    return Err("mu0 is only meaningful in biomass_dependent mode".to_owned());
                }
                let k_hyd = self
                    .k_hyd
                    .ok_or_else(|| "first_order mode requires k_hyd".to_owned())?;
                Hydrolysis::FirstOrder { k_hyd }
            }
            HydrolysisMode::BiomassDependent => {
                if let Some(k_hyd) = self.k_hyd {
                    if k_hyd != 0.0 {
                        return Err(
                            "k_hyd must be absent or zero in biomass_dependent mode".to_owned()
                        );
                    }
                }
                let kind = self
                    .mu0
                    .ok_or_else(|| "biomass_dependent mode requires mu0".to_owned())?;
                Hydrolysis::BiomassDependent {
                    mu0: curve(kind, KineticClass::Concave, "mu0")?,
                }
            }
        };
        ModelParams {
            k0: self.k0,
            k1: self.k1,
            k2: self.k2,
            k3: self.k3,
            alpha0: self.alpha0,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            a1: self.a1,
            a2: self.a2,
            d: self.d,
            x0_in: self.x0_in,
            s1_in: self.s1_in,
            s2_in: self.s2_in,
            mu1: curve(self.mu1, KineticClass::Monotone, "mu1")?,
            mu2: curve(self.mu2, KineticClass::Inhibited, "mu2")?,
            hydrolysis,
        }
        .validated()
        .map_err(|e| e.to_string())
    }
}

fn curve(
    kind: CurveKind<f64>,
    class: KineticClass,
    field: &str,
) -> Result<GrowthCurve<f64>, String> {
    GrowthCurve::new(kind, class).map_err(|e| format!("{field}: {e}"))
}

impl From<&ModelParams<f64>> for ModelConfig {
    fn from(p: &ModelParams<f64>) -> Self {
        Self {
            k0: p.k0,
            k1: p.k1,
            k2: p.k2,
            k3: p.k3,
            alpha0: p.alpha0,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            a1: p.a1,
            a2: p.a2,
            d: p.d,
            x0_in: p.x0_in,
            s1_in: p.s1_in,
            s2_in: p.s2_in,
            hydrolysis_mode: p.mode(),
            k_hyd: p.k_hyd(),
            mu0: p.mu0().map(|c| c.kind()),
            mu1: p.mu1.kind(),
            mu2: p.mu2.kind(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub t_end: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default = "default_monitors")]
    pub monitors_enabled: bool,
    pub initial_state: State<f64>,
}

fn default_rtol() -> f64 {
    1e-8
}
fn default_atol() -> f64 {
    1e-10
}
fn default_max_steps() -> usize {
    1_000_000
}
fn default_stride() -> usize {
    1
}
fn default_monitors() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub axis_x: ParamAxis,
    pub axis_y: ParamAxis,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> &'static str {
        r#"{
            "model": {
                "k0": 0.8, "k1": 10.0, "k2": 2.0, "k3": 1.5,
                "alpha0": 0.9, "alpha1": 0.8, "alpha2": 0.7,
                "a1": 0.1, "a2": 0.05, "D": 0.5,
                "X0in": 5.0, "S1in": 2.0, "S2in": 1.0,
                "hydrolysis_mode": "first_order",
                "k_hyd": 1.2,
                "mu1": {"kind": "monod", "m": 1.2, "K": 7.1},
                "mu2": {"kind": "haldane", "m": 2.0, "K": 1.0, "KI": 4.0}
            }
        }"#
    }

    #[test]
    fn loads_and_round_trips() {
        let cfg: RunConfig = serde_json::from_str(sample()).unwrap();
        let params = cfg.model.to_params().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let again: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(again.model.to_params().unwrap(), params);
        // Reproduction dumps rebuild identical parameters too.
        let dumped = ModelConfig::from(&params);
        assert_eq!(dumped.to_params().unwrap(), params);
    }

    #[test]
    fn rejects_unknown_keys_and_contradictions() {
        let with_unknown = sample().replace("\"k_hyd\": 1.2,", "\"k_hyd\": 1.2, \"bogus\": 1,");
        assert!(serde_json::from_str::<RunConfig>(&with_unknown).is_err());

        let mut cfg: RunConfig = serde_json::from_str(sample()).unwrap();
        cfg.model.mu0 = Some(CurveKind::Monod { m: 1.0, k: 1.0 });
        assert!(cfg.model.to_params().is_err());

        let mut cfg: RunConfig = serde_json::from_str(sample()).unwrap();
        cfg.model.hydrolysis_mode = HydrolysisMode::BiomassDependent;
        assert!(cfg.model.to_params().is_err(), "k_hyd set but no mu0");

        let mut cfg: RunConfig = serde_json::from_str(sample()).unwrap();
        cfg.model.k_hyd = None;
        assert!(cfg.model.to_params().is_err(), "first_order needs k_hyd");
    }

    #[test]
    fn model_invariants_rechecked_on_load() {
        let bad = sample().replace("\"k1\": 10.0", "\"k1\": 2.5");
        let cfg: RunConfig = serde_json::from_str(&bad).unwrap();
        assert!(cfg.model.to_params().is_err());
    }
}
