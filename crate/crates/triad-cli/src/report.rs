//! JSON report assembly for the equilibria subcommand.

use serde::Serialize;
use triad::equilibria::{equilibria, multiplicity, EquilibriumRecord, Margin, MultiplicityReport};
use triad::kinetics::BreakEven;
use triad::model::{HydrolysisMode, ModelParams, RemovalRates, State};
use triad::stability::{classify, routh_from_branch, RouthReport, Verdict};

#[derive(Debug, Serialize)]
pub struct EquilibriaReport {
    pub mode: HydrolysisMode,
    pub removal_rates: RemovalRates<f64>,
    pub break_even: BreakEven<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<MultiplicityReport<f64>>,
    pub equilibria: Vec<EquilibriumEntry>,
}

#[derive(Debug, Serialize)]
pub struct EquilibriumEntry {
    pub label: String,
    pub exists: bool,
    pub state: Option<State<f64>>,
    pub existence_margins: Vec<Margin<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1_aux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2_aux: Option<f64>,
    /// Infinity norm of the field at the recorded state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routh: Option<RouthReport<f64>>,
}

#[derive(Debug, Serialize)]
pub struct StabilityEntry {
    pub analytic: Verdict,
    pub numeric: Verdict,
    pub max_real_part: f64,
    /// `[re, im]` pairs sorted by descending real part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub conditions: Vec<Margin<f64>>,
    pub diagnostics: Vec<Margin<f64>>,
    pub agreement: bool,
}

pub fn equilibria_report(p: &ModelParams<f64>) -> Result<EquilibriaReport, triad::Error> {
    let rates = p.removal_rates()?;
    let break_even = BreakEven::compute(&p.mu1, &p.mu2, rates.d1, rates.d2)?;
    let mult = match p.mode() {
        HydrolysisMode::BiomassDependent => Some(multiplicity(p)?),
        HydrolysisMode::FirstOrder => None,
    };
    let records = equilibria(p)?;
    let mut entries = Vec::with_capacity(records.len());
    for rec in &records {
        entries.push(entry_for(p, rec)?);
    }
    Ok(EquilibriaReport {
        mode: p.mode(),
        removal_rates: rates,
        break_even,
        multiplicity: mult,
        equilibria: entries,
    })
}

fn entry_for(
    p: &ModelParams<f64>,
    rec: &EquilibriumRecord<f64>,
) -> Result<EquilibriumEntry, triad::Error> {
    let stability = if rec.exists {
        let v = classify(p, rec)?;
        Some(StabilityEntry {
            analytic: v.analytic,
            numeric: v.numeric,
            max_real_part: v.max_real_part,
            eigenvalues: v.eigenvalues.iter().map(|e| [e.re, e.im]).collect(),
            conditions: v.conditions,
            diagnostics: v.diagnostics,
            agreement: v.agreement,
        })
    } else {
        None
    };
    let routh =
        if rec.exists && rec.label.x1_persists && p.mode() == HydrolysisMode::BiomassDependent {
            let st = rec.state.expect("existing record has a state");
            Some(routh_from_branch(p, st.x0, st.x1)?)
        } else {
            None
        };
    // Candidate states of non-existent records may carry negative
    // components; the field residual only makes sense where they exist.
    let residual_inf = if rec.exists { rec.residual(p)? } else { None };
    Ok(EquilibriumEntry {
        label: rec.label.to_string(),
        exists: rec.exists,
        state: rec.state,
        existence_margins: rec.margins.clone(),
        x1_aux: rec.x1_aux,
        s2_aux: rec.s2_aux,
        residual_inf,
        stability,
        routh,
    })
}
