//! Seeded randomized validation suites.
//!
//! Parameters are drawn log-uniformly over `[1e-2, 1e1]` per field, with the
//! structural constraints (yield ordering, washout fractions in `[0, 1]`)
//! enforced by restriction or joint redraw; conditional on the constraints
//! the marginals stay log-uniform. Suites run at `f64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibria::equilibria;
use crate::kinetics::{GrowthCurve, KineticClass};
use crate::model::{Hydrolysis, HydrolysisMode, ModelParams, State};
use crate::stability::{classify, routh_from_branch, Verdict};

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..=hi.log10()))
}

fn draw_curve(rng: &mut impl Rng, class: KineticClass) -> GrowthCurve<f64> {
    match class {
        KineticClass::Inhibited => GrowthCurve::haldane(
            log_uniform(rng, 1e-2, 1e1),
            log_uniform(rng, 1e-2, 1e1),
            log_uniform(rng, 1e-2, 1e1),
        )
        .expect("positive draws build a haldane curve"),
        _ => {
            if rng.gen_bool(0.7) {
                GrowthCurve::monod(
                    log_uniform(rng, 1e-2, 1e1),
                    log_uniform(rng, 1e-2, 1e1),
                    class,
                )
                .expect("positive draws build a monod curve")
            } else {
                GrowthCurve::linear(log_uniform(rng, 1e-2, 1e1), class)
                    .expect("positive draws build a linear curve")
            }
        }
    }
}

/// One random parameter set of the requested hydrolysis variant.
pub fn draw_params(rng: &mut impl Rng, mode: HydrolysisMode) -> ModelParams<f64> {
    // Joint redraw until the yield ordering holds.
    let (k1, k2) = loop {
        let k1 = log_uniform(rng, 1e-2, 1e1);
        let k2 = log_uniform(rng, 1e-2, 1e1);
        if k1 >= 1.0 + k2 {
            break (k1, k2);
        }
    };
    let hydrolysis = match mode {
        HydrolysisMode::FirstOrder => Hydrolysis::FirstOrder {
            k_hyd: log_uniform(rng, 1e-2, 1e1),
        },
        HydrolysisMode::BiomassDependent => Hydrolysis::BiomassDependent {
            mu0: draw_curve(rng, KineticClass::Concave),
        },
    };
    ModelParams {
        k0: log_uniform(rng, 1e-2, 1.0),
        k1,
        k2,
        k3: log_uniform(rng, 1.0, 1e1),
        alpha0: log_uniform(rng, 1e-2, 1.0),
        alpha1: log_uniform(rng, 1e-2, 1.0),
        alpha2: log_uniform(rng, 1e-2, 1.0),
        a1: log_uniform(rng, 1e-2, 1e1),
        a2: log_uniform(rng, 1e-2, 1e1),
        d: log_uniform(rng, 1e-2, 1e1),
        x0_in: log_uniform(rng, 1e-2, 1e1),
        s1_in: log_uniform(rng, 1e-2, 1e1),
        s2_in: log_uniform(rng, 1e-2, 1e1),
        mu1: draw_curve(rng, KineticClass::Monotone),
        mu2: draw_curve(rng, KineticClass::Inhibited),
        hydrolysis,
    }
    .validated()
    .expect("constrained draws satisfy the model invariants")
}

/// Random nonnegative state, log-uniform per component.
pub fn draw_state(rng: &mut impl Rng) -> State<f64> {
    State::new(
        log_uniform(rng, 1e-2, 1e1),
        log_uniform(rng, 1e-2, 1e1),
        log_uniform(rng, 1e-2, 1e1),
        log_uniform(rng, 1e-2, 1e1),
        log_uniform(rng, 1e-2, 1e1),
    )
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A failing case with enough context to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct FailureCase {
    pub draw_index: usize,
    pub label: String,
    pub detail: String,
    #[serde(skip)]
    pub params: ModelParams<f64>,
}

/// Field residuals at every existing equilibrium across random draws.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSuite {
    pub mode: HydrolysisMode,
    pub draws: usize,
    pub equilibria_checked: usize,
    /// Max of residual / (1 + |state|_inf).
    pub max_scaled_residual: f64,
    pub failures: Vec<FailureCase>,
}

pub fn residual_suite(mode: HydrolysisMode, draws: usize, seed: u64) -> ResidualSuite {
    let mut rng = seeded_rng(seed);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for i in 0..draws {
        let p = draw_params(&mut rng, mode);
        let records = equilibria(&p).expect("valid draws yield equilibria");
        for rec in records.iter().filter(|r| r.exists) {
            let state = rec.state.expect("existing records have states");
            let residual = p.rhs(&state).expect("equilibrium states are nonnegative");
            let scaled = residual.inf_norm() / (1.0 + state.inf_norm());
            worst = worst.max(scaled);
            checked += 1;
            if scaled > 1e-9 {
                failures.push(FailureCase {
                    draw_index: i,
                    label: rec.label.to_string(),
                    detail: format!("scaled residual {scaled:.3e}"),
                    params: p.clone(),
                });
            }
        }
    }
    ResidualSuite {
        mode,
        draws,
        equilibria_checked: checked,
        max_scaled_residual: worst,
        failures,
    }
}

/// Analytic-versus-numeric verdict agreement across random draws.
#[derive(Debug, Clone, Serialize)]
pub struct AgreementSuite {
    pub mode: HydrolysisMode,
    pub draws: usize,
    pub compared: usize,
    /// Cases skipped because a slack or the spectral margin was inside the
    /// confidence threshold.
    pub skipped_marginal: usize,
    pub disagreements: Vec<FailureCase>,
    /// Smallest confident slack seen, as a health indicator.
    pub min_confident_slack: f64,
}

/// Slack/margin threshold above which both verdicts must agree.
pub const CONFIDENCE_MARGIN: f64 = 1e-6;

pub fn agreement_suite(mode: HydrolysisMode, draws: usize, seed: u64) -> AgreementSuite {
    let mut rng = seeded_rng(seed);
    let mut compared = 0;
    let mut skipped = 0;
    let mut disagreements = Vec::new();
    let mut min_slack = f64::INFINITY;
    for i in 0..draws {
        let p = draw_params(&mut rng, mode);
        let records = equilibria(&p).expect("valid draws yield equilibria");
        for rec in records.iter().filter(|r| r.exists) {
            let verdict = classify(&p, rec).expect("existing records classify");
            let slack = verdict
                .conditions
                .iter()
                .map(|m| m.slack.abs())
                .fold(f64::INFINITY, f64::min);
            let confident = slack > CONFIDENCE_MARGIN
                && verdict.max_real_part.abs() > CONFIDENCE_MARGIN
                && verdict.analytic != Verdict::Marginal
                && verdict.numeric != Verdict::Marginal;
            if !confident {
                skipped += 1;
                continue;
            }
            compared += 1;
            min_slack = min_slack.min(slack);
            if verdict.analytic != verdict.numeric {
                disagreements.push(FailureCase {
                    draw_index: i,
                    label: rec.label.to_string(),
                    detail: format!(
                        "analytic {:?} vs numeric {:?} (min slack {:.3e}, max Re {:.3e})",
                        verdict.analytic, verdict.numeric, slack, verdict.max_real_part
                    ),
                    params: p.clone(),
                });
            }
        }
    }
    AgreementSuite {
        mode,
        draws,
        compared,
        skipped_marginal: skipped,
        disagreements,
        min_confident_slack: if min_slack.is_finite() {
            min_slack
        } else {
            0.0
        },
    }
}

/// Routh-Hurwitz identities on every persistence branch across draws.
#[derive(Debug, Clone, Serialize)]
pub struct RouthSuite {
    pub draws: usize,
    pub branches_checked: usize,
    pub max_c4_discrepancy: f64,
    pub failures: Vec<FailureCase>,
}

pub fn routh_suite(draws: usize, seed: u64) -> RouthSuite {
    let mut rng = seeded_rng(seed);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for i in 0..draws {
        let p = draw_params(&mut rng, HydrolysisMode::BiomassDependent);
        let records = equilibria(&p).expect("valid draws yield equilibria");
        for rec in records.iter().filter(|r| r.exists && r.label.x1_persists) {
            let state = rec.state.expect("existing records have states");
            let r = routh_from_branch(&p, state.x0, state.x1).expect("branch data");
            checked += 1;
            worst = worst.max(r.c4_discrepancy);
            if r.c4_discrepancy > 1e-9 {
                failures.push(FailureCase {
                    draw_index: i,
                    label: rec.label.to_string(),
                    detail: format!("c4 forms disagree by {:.3e}", r.c4_discrepancy),
                    params: p.clone(),
                });
            }
            if r.c3.signum() != r.slope_slack.signum() {
                failures.push(FailureCase {
                    draw_index: i,
                    label: rec.label.to_string(),
                    detail: format!(
                        "sign(c3) = {} but sign(slope slack) = {}",
                        r.c3.signum(),
                        r.slope_slack.signum()
                    ),
                    params: p.clone(),
                });
            }
        }
    }
    RouthSuite {
        draws,
        branches_checked: checked,
        max_c4_discrepancy: worst,
        failures,
    }
}

/// Combined validation run used by the command-line `validate` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub draws: usize,
    pub seed: u64,
    pub residual: Vec<ResidualSuite>,
    pub agreement: Vec<AgreementSuite>,
    pub routh: RouthSuite,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.residual.iter().all(|s| s.failures.is_empty())
            && self.agreement.iter().all(|s| s.disagreements.is_empty())
            && self.routh.failures.is_empty()
    }

    /// All failing cases, for reproduction dumps.
    pub fn failures(&self) -> Vec<&FailureCase> {
        self.residual
            .iter()
            .flat_map(|s| s.failures.iter())
            .chain(self.agreement.iter().flat_map(|s| s.disagreements.iter()))
            .chain(self.routh.failures.iter())
            .collect()
    }
}

pub fn run_validation(draws: usize, seed: u64) -> ValidationReport {
    let modes = [HydrolysisMode::FirstOrder, HydrolysisMode::BiomassDependent];
    let residual = modes
        .iter()
        .map(|&m| residual_suite(m, draws, seed ^ 0x5eed_0001))
        .collect();
    let agreement = modes
        .iter()
        .map(|&m| agreement_suite(m, draws, seed ^ 0x5eed_0002))
        .collect();
    let routh = routh_suite(draws, seed ^ 0x5eed_0003);
    ValidationReport {
        draws,
        seed,
        residual,
        agreement,
        routh,
    }
}
