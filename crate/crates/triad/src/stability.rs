//! Local stability classification of equilibria.
//!
//! Every verdict is produced twice. The analytic route evaluates the sign
//! conditions that characterize local exponential stability: break-even
//! comparisons for washout-type equilibria, and for persistence branches of
//! the biomass-dependent variant the Routh-Hurwitz conditions of the 3x3
//! hydrolysate/acidogenic block (`c1 > 0` automatically, `c3 > 0` equivalent
//! to a slope condition on the hydrolysate balance, plus `c4 = c1 c2 - c3 >
//! 0`) together with the methanogenic block, which is stable only on the low
//! branch where `mu2'(lambda2) > 0`. The numeric route solves the block
//! spectra of the 5x5 Jacobian directly. Agreement between the two is a
//! standing invariant away from marginal cases.

use num_complex::Complex;
use serde::Serialize;

use crate::equilibria::{effective_s1_in, multiplicity, xi_prime, EquilibriumRecord, Margin};
use crate::error::{Error, Result};
use crate::kinetics::lambda1;
use crate::linalg::{eig2, eigenvalues_5x5, sort_desc_by_real, Matrix5};
use crate::model::{Hydrolysis, HydrolysisMode, ModelParams, State};
use crate::scalar::{lit, Scalar};

/// Relative width of the marginal band on spectral margins and condition
/// slacks. Strict sign conditions say nothing at equality, so verdicts
/// inside the band are reported as [`Verdict::Marginal`].
const MARGINAL_BAND_REL: f64 = 1e-9;

/// Slack threshold below which analytic/numeric disagreement is not held
/// against either route.
const AGREEMENT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn letter(self) -> char {
        match self {
            Verdict::Stable => 'S',
            Verdict::Unstable => 'U',
            Verdict::Marginal => 'M',
        }
    }
}

/// Routh-Hurwitz data of the 3x3 block at a persistence branch.
///
/// The characteristic polynomial is `x^3 + c1 x^2 + c2 x + c3` with
/// `c1 = m11 + m22`, `c2 = m11 m22 - theta m32`,
/// `c3 = m32 (m21 m13 - theta m11)` and `c4 = c1 c2 - c3`. `c4_expanded`
/// recomputes `c4` through an algebraically equivalent grouping used as a
/// cross-check; `slope_slack` is positive exactly when the hydrolysate
/// balance crosses steeply enough for `c3 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouthReport<T> {
    pub m11: T,
    pub m13: T,
    pub m21: T,
    pub m22: T,
    pub m32: T,
    pub theta: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub c4_expanded: T,
    /// `-alpha0 D k0 / (k1 D1) - xi'(x0k)`; same sign as `c3`.
    pub slope_slack: T,
    /// `|c4 - c4_expanded|` relative to the magnitude of the expansion terms.
    pub c4_discrepancy: T,
}

/// Stability assessment of one equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict<T> {
    pub analytic: Verdict,
    pub numeric: Verdict,
    #[serde(skip)]
    pub eigenvalues: [Complex<T>; 5],
    pub max_real_part: T,
    /// Signed slacks of the analytic stability conditions.
    pub conditions: Vec<Margin<T>>,
    /// Informational slacks that do not enter the verdict.
    pub diagnostics: Vec<Margin<T>>,
    /// False only when both routes are confident yet disagree.
    pub agreement: bool,
}

/// Analytic Jacobian of the model field at a nonnegative state.
pub fn jacobian<T: Scalar>(p: &ModelParams<T>, x: &State<T>) -> Result<Matrix5<T>> {
    x.check_nonnegative()?;
    let rates = p.removal_rates()?;
    let mut m = Matrix5::zeros();

    let g1 = p.mu1.eval(x.s1)?;
    let dg1 = p.mu1.eval_deriv(x.s1)?;
    let g2 = p.mu2.eval(x.s2)?;
    let dg2 = p.mu2.eval_deriv(x.s2)?;

    match &p.hydrolysis {
        Hydrolysis::FirstOrder { k_hyd } => {
            m.0[0][0] = -p.alpha0 * p.d - *k_hyd;
            m.0[1][0] = p.k0 * *k_hyd;
            m.0[1][2] = -p.k1 * g1;
        }
        Hydrolysis::BiomassDependent { mu0 } => {
            let g0 = mu0.eval(x.x0)?;
            let dg0 = mu0.eval_deriv(x.x0)?;
            m.0[0][0] = -p.alpha0 * p.d - dg0 * x.x1;
            m.0[0][2] = -g0;
            m.0[1][0] = p.k0 * dg0 * x.x1;
            m.0[1][2] = p.k0 * g0 - p.k1 * g1;
        }
    }
    m.0[1][1] = -p.d - p.k1 * dg1 * x.x1;
    m.0[2][1] = dg1 * x.x1;
    m.0[2][2] = g1 - rates.d1;

    m.0[3][1] = p.k2 * dg1 * x.x1;
    m.0[3][2] = p.k2 * g1;
    m.0[3][3] = -p.d - p.k3 * dg2 * x.x2;
    m.0[3][4] = -p.k3 * g2;
    m.0[4][3] = dg2 * x.x2;
    m.0[4][4] = g2 - rates.d2;

    Ok(m)
}

/// Routh-Hurwitz report for the `k`-th hydrolysate branch (1-based).
pub fn routh_report<T: Scalar>(p: &ModelParams<T>, k_index: usize) -> Result<RouthReport<T>> {
    let mult = multiplicity(p)?;
    if k_index == 0 || k_index > mult.n {
        return Err(Error::BranchAbsent {
            k: k_index,
            n: mult.n,
        });
    }
    let x0k = mult.roots[k_index - 1];
    let x1k = crate::equilibria::xi(p, x0k)?;
    routh_from_branch(p, x0k, x1k)
}

/// Routh-Hurwitz report from a known branch point `(x0k, x1k)`.
pub fn routh_from_branch<T: Scalar>(p: &ModelParams<T>, x0k: T, x1k: T) -> Result<RouthReport<T>> {
    let mu0 = match &p.hydrolysis {
        Hydrolysis::BiomassDependent { mu0 } => mu0,
        Hydrolysis::FirstOrder { .. } => {
            return Err(Error::WrongHydrolysis {
                required: "biomass_dependent",
            })
        }
    };
    let rates = p.removal_rates()?;
    let l1 = lambda1(&p.mu1, rates.d1)?.ok_or_else(|| Error::BreakEvenUndefined {
        name: "lambda1",
        reason: "persistence branches require a defined lambda1".to_owned(),
    })?;

    let g0 = mu0.eval(x0k)?;
    let dg0 = mu0.eval_deriv(x0k)?;
    let dg1 = p.mu1.eval_deriv(l1)?;

    let m11 = p.alpha0 * p.d + dg0 * x1k;
    let m13 = g0;
    let m21 = p.k0 * dg0 * x1k;
    let m22 = p.d + p.k1 * dg1 * x1k;
    let m32 = dg1 * x1k;
    let theta = p.k0 * g0 - p.k1 * rates.d1;

    let c1 = m11 + m22;
    let c2 = m11 * m22 - theta * m32;
    let c3 = m32 * (m21 * m13 - theta * m11);
    let c4 = c1 * c2 - c3;

    let p_aux = p.d * m11 + p.k1 * rates.d1 * m32;
    let terms = [
        p.k1 * m11 * m32 * (p.alpha0 * p.d - rates.d1),
        dg0 * x1k * c2,
        p.alpha0 * p.d * p_aux,
        m22 * c2,
    ];
    let c4_expanded = terms[0] + terms[1] + terms[2] + terms[3];
    let term_scale = terms
        .iter()
        .fold(T::zero(), |m, t| m + t.abs())
        .max(c1.abs() * c2.abs() + c3.abs())
        .max(T::min_positive_value());
    let c4_discrepancy = (c4 - c4_expanded).abs() / term_scale;

    let rate = p.alpha0 * p.d * p.k0 / (p.k1 * rates.d1);
    let slope_slack = -rate - xi_prime(p, x0k)?;

    Ok(RouthReport {
        m11,
        m13,
        m21,
        m22,
        m32,
        theta,
        c1,
        c2,
        c3,
        c4,
        c4_expanded,
        slope_slack,
        c4_discrepancy,
    })
}

fn verdict_from_eigs<T: Scalar>(eigs: &[Complex<T>]) -> (Verdict, T) {
    let max_re = eigs.iter().map(|e| e.re).fold(T::neg_infinity(), T::max);
    let radius = eigs.iter().map(|e| e.norm()).fold(T::zero(), T::max);
    let band = lit::<T>(MARGINAL_BAND_REL) * (T::one() + radius);
    let verdict = if max_re.abs() <= band {
        Verdict::Marginal
    } else if max_re < T::zero() {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    (verdict, max_re)
}

fn verdict_from_conditions<T: Scalar>(conditions: &[Margin<T>]) -> Verdict {
    let band = lit::<T>(MARGINAL_BAND_REL);
    let mut marginal = false;
    for m in conditions {
        let tol = band * (T::one() + m.slack.abs());
        if m.slack < -tol {
            return Verdict::Unstable;
        }
        if m.slack.abs() <= tol {
            marginal = true;
        }
    }
    if marginal {
        Verdict::Marginal
    } else {
        Verdict::Stable
    }
}

fn build_verdict<T: Scalar>(
    eigenvalues: [Complex<T>; 5],
    conditions: Vec<Margin<T>>,
    diagnostics: Vec<Margin<T>>,
) -> StabilityVerdict<T> {
    let (numeric, max_real_part) = verdict_from_eigs(&eigenvalues);
    let analytic = verdict_from_conditions(&conditions);
    let margin = lit::<T>(AGREEMENT_MARGIN);
    let min_slack = conditions
        .iter()
        .map(|m| m.slack.abs())
        .fold(T::infinity(), T::min);
    let confident = min_slack > margin
        && max_real_part.abs() > margin
        && analytic != Verdict::Marginal
        && numeric != Verdict::Marginal;
    let agreement = !confident || analytic == numeric;
    StabilityVerdict {
        analytic,
        numeric,
        eigenvalues,
        max_real_part,
        conditions,
        diagnostics,
        agreement,
    }
}

fn existing_state<T: Scalar>(rec: &EquilibriumRecord<T>) -> Result<State<T>> {
    if !rec.exists {
        return Err(Error::NonExistentEquilibrium {
            label: rec.label.to_string(),
        });
    }
    rec.state.ok_or_else(|| Error::NonExistentEquilibrium {
        label: rec.label.to_string(),
    })
}

/// Classifies an existing equilibrium of the first-order variant.
///
/// Washout-side conditions are expressed through the eigenvalues they
/// generate: `D1 - mu1(S1in*)` for the acidogenic direction (the effective
/// inflow is what the reduced dynamics see) and `D2 - mu2(.)` or
/// `mu2'(lambda2)` for the methanogenic block. The plain-inflow comparison
/// `lambda1 - S1in` is reported as a diagnostic only.
pub fn classify_first_order<T: Scalar>(
    p: &ModelParams<T>,
    rec: &EquilibriumRecord<T>,
) -> Result<StabilityVerdict<T>> {
    if p.mode() != HydrolysisMode::FirstOrder {
        return Err(Error::WrongHydrolysis {
            required: "first_order",
        });
    }
    let state = existing_state(rec)?;
    let rates = p.removal_rates()?;
    let s1s = effective_s1_in(p)?;
    let be = crate::kinetics::BreakEven::compute(&p.mu1, &p.mu2, rates.d1, rates.d2)?;

    let mut conditions = Vec::new();
    let mut diagnostics = Vec::new();
    let label = rec.label;
    if !label.x1_persists {
        conditions.push(Margin::new(
            "D1_minus_mu1_at_S1in_star",
            rates.d1 - p.mu1.eval(s1s)?,
        ));
        if let Some(l1) = be.lambda1 {
            diagnostics.push(Margin::new("lambda1_minus_S1in_plain", l1 - p.s1_in));
        }
        if label.x2_branch == 0 {
            conditions.push(Margin::new(
                "D2_minus_mu2_at_S2in",
                rates.d2 - p.mu2.eval(p.s2_in)?,
            ));
        } else {
            conditions.push(branch_slope_margin(p, &be, label.x2_branch)?);
        }
    } else {
        // The (S1, X1) block is always stable at persistence equilibria;
        // only the methanogenic block decides.
        if label.x2_branch == 0 {
            let s2_star = state.s2;
            conditions.push(Margin::new(
                "D2_minus_mu2_at_S2_star",
                rates.d2 - p.mu2.eval(s2_star)?,
            ));
            if let (Some(l1), Some(_)) = (be.lambda1, be.lambda2) {
                let (h1, h2) = be.h_functions(p.k1, p.k2).expect("both defined");
                let v = p.s2_in + p.k2 / p.k1 * s1s;
                diagnostics.push(Margin::new("H_interval_exclusion", (h1 - v).max(v - h2)));
                let _ = l1;
            }
        } else {
            conditions.push(branch_slope_margin(p, &be, label.x2_branch)?);
        }
    }

    let eigs = eigenvalues_5x5(&jacobian(p, &state)?)?;
    Ok(build_verdict(eigs, conditions, diagnostics))
}

fn branch_slope_margin<T: Scalar>(
    p: &ModelParams<T>,
    be: &crate::kinetics::BreakEven<T>,
    branch: u8,
) -> Result<Margin<T>> {
    let pair = be.lambda2.ok_or_else(|| Error::BreakEvenUndefined {
        name: "lambda2",
        reason: "methanogenic branches require defined break-evens".to_owned(),
    })?;
    let l2 = if branch == 1 { pair.0 } else { pair.1 };
    Ok(Margin::new(
        if branch == 1 {
            "mu2_deriv_at_lambda2_low"
        } else {
            "mu2_deriv_at_lambda2_high"
        },
        p.mu2.eval_deriv(l2)?,
    ))
}

/// Classifies an existing equilibrium of the biomass-dependent variant.
pub fn classify_biomass<T: Scalar>(
    p: &ModelParams<T>,
    rec: &EquilibriumRecord<T>,
) -> Result<StabilityVerdict<T>> {
    if p.mode() != HydrolysisMode::BiomassDependent {
        return Err(Error::WrongHydrolysis {
            required: "biomass_dependent",
        });
    }
    let state = existing_state(rec)?;
    let rates = p.removal_rates()?;
    let be = crate::kinetics::BreakEven::compute(&p.mu1, &p.mu2, rates.d1, rates.d2)?;

    let mut conditions = Vec::new();
    let mut diagnostics = Vec::new();
    let label = rec.label;

    if !label.x1_persists {
        conditions.push(Margin::new(
            "D1_minus_mu1_at_S1in",
            rates.d1 - p.mu1.eval(p.s1_in)?,
        ));
        if label.x2_branch == 0 {
            conditions.push(Margin::new(
                "D2_minus_mu2_at_S2in",
                rates.d2 - p.mu2.eval(p.s2_in)?,
            ));
        } else {
            conditions.push(branch_slope_margin(p, &be, label.x2_branch)?);
        }
    } else {
        let routh = routh_from_branch(p, state.x0, state.x1)?;
        conditions.push(Margin::new("hydrolysate_slope_slack", routh.slope_slack));
        conditions.push(Margin::new("routh_c4", routh.c4));
        diagnostics.push(Margin::new("routh_c3", routh.c3));
        diagnostics.push(Margin::new("theta", routh.theta));
        if label.x2_branch == 0 {
            let s2_star = rec.s2_aux.unwrap_or(state.s2);
            conditions.push(Margin::new(
                "D2_minus_mu2_at_S2_star",
                rates.d2 - p.mu2.eval(s2_star)?,
            ));
        } else {
            conditions.push(branch_slope_margin(p, &be, label.x2_branch)?);
        }
    }

    let eigs = eigenvalues_5x5(&jacobian(p, &state)?)?;
    Ok(build_verdict(eigs, conditions, diagnostics))
}

/// Classifies an existing equilibrium under either hydrolysis variant.
pub fn classify<T: Scalar>(
    p: &ModelParams<T>,
    rec: &EquilibriumRecord<T>,
) -> Result<StabilityVerdict<T>> {
    match p.mode() {
        HydrolysisMode::FirstOrder => classify_first_order(p, rec),
        HydrolysisMode::BiomassDependent => classify_biomass(p, rec),
    }
}

/// Spectrum of the reduced 4-dimensional system that governs the first-order
/// variant once the hydrolysate has settled: the `(S1, X1)` block and the
/// `(S2, X2)` block of the full Jacobian. The full spectrum adds only the
/// hydrolysate eigenvalue `-(k_hyd + alpha0 D)`.
pub fn reduced4_eigenvalues<T: Scalar>(
    p: &ModelParams<T>,
    x: &State<T>,
) -> Result<[Complex<T>; 4]> {
    if p.mode() != HydrolysisMode::FirstOrder {
        return Err(Error::WrongHydrolysis {
            required: "first_order",
        });
    }
    let m = jacobian(p, x)?;
    let s1x1 = [[m.0[1][1], m.0[1][2]], [m.0[2][1], m.0[2][2]]];
    let s2x2 = m.block_lower();
    let a = eig2(&s1x1);
    let b = eig2(&s2x2);
    let mut all = [a[0], a[1], b[0], b[1]];
    sort_desc_by_real(&mut all);
    Ok(all)
}
