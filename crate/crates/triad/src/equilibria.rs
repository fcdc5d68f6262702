//! Equilibrium computation for both hydrolysis variants.
//!
//! Labels follow `E_j^i`: `j` marks washout (0) or persistence (1) of the
//! acidogenic population `X1`; `i` marks the methanogenic population `X2`
//! (0 washout, 1 the low-substrate branch, 2 the high-substrate branch).
//! Under biomass-dependent hydrolysis the persistence equilibria come in up
//! to two branches indexed by `k`, one per admissible hydrolysate level.
//!
//! First-order hydrolysis decouples `X0`, which converges to
//! `X0* = D X0in / (k_hyd + alpha0 D)` and feeds the soluble substrate an
//! effective inflow `S1in* = S1in + k0 k_hyd X0in / (k_hyd + alpha0 D)`.
//! All six candidate equilibria then have closed forms.
//!
//! With biomass-dependent hydrolysis, persistence equilibria require the
//! hydrolysate balance `xi(X0) = delta(X0)` on `(0, X0in/alpha0)`, where
//! `xi(X0) = D (X0in - alpha0 X0) / mu0(X0)` is decreasing and convex and
//! `delta` is affine with slope `-alpha0 D k0 / (k1 D1)`. The number of
//! solutions `N` is 0, 1 or 2 and is decided by comparing the inflow `S1in`
//! against the break-even `lambda1` and, when the slope condition
//! `k0 mu0(X0in/alpha0) > k1 D1` holds, against a tangency threshold
//! `S1in_bar` built from the unique point where `xi'` matches the slope of
//! `delta`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetics::{lambda1, BreakEven};
use crate::model::{Hydrolysis, HydrolysisMode, ModelParams, State};
use crate::scalar::{lit, Scalar};
use crate::solve::{bisect, BisectOptions, Root};

/// Residual bound every accepted hydrolysate root must satisfy.
const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Relative half-width of the tangency band in `S1in`.
const TANGENCY_REL_TOL: f64 = 1e-12;

/// Identity of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EquilibriumLabel {
    /// `true` when the acidogenic population persists (`j = 1`).
    pub x1_persists: bool,
    /// Methanogenic branch: 0 washout, 1 low branch, 2 high branch.
    pub x2_branch: u8,
    /// Hydrolysate root index (1-based), only for persistence equilibria of
    /// the biomass-dependent variant.
    pub root_index: Option<usize>,
}

impl EquilibriumLabel {
    pub fn new(x1_persists: bool, x2_branch: u8, root_index: Option<usize>) -> Self {
        Self {
            x1_persists,
            x2_branch,
            root_index,
        }
    }
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "E{}{}",
            if self.x1_persists { 1 } else { 0 },
            self.x2_branch
        )?;
        if let Some(k) = self.root_index {
            write!(f, "k{k}")?;
        }
        Ok(())
    }
}

/// Named signed slack; positive means the condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin<T> {
    pub name: &'static str,
    pub slack: T,
}

impl<T> Margin<T> {
    pub fn new(name: &'static str, slack: T) -> Self {
        Self { name, slack }
    }
}

/// One candidate equilibrium: its components when computable, whether it
/// exists, and the signed slacks of its existence conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumRecord<T> {
    pub label: EquilibriumLabel,
    /// `None` when a needed break-even concentration is undefined.
    pub state: Option<State<T>>,
    pub exists: bool,
    pub margins: Vec<Margin<T>>,
    /// Acidogenic biomass level `X1*` of the branch, for persistence records.
    pub x1_aux: Option<T>,
    /// Intermediate substrate level `S2*` reached without methanogens.
    pub s2_aux: Option<T>,
}

impl<T: Scalar> EquilibriumRecord<T> {
    fn candidate(
        label: EquilibriumLabel,
        state: Option<State<T>>,
        margins: Vec<Margin<T>>,
    ) -> Self {
        let exists = state.is_some() && margins.iter().all(|m| m.slack > T::zero());
        Self {
            label,
            state,
            exists,
            margins,
            x1_aux: None,
            s2_aux: None,
        }
    }

    /// Infinity norm of the model field at the recorded state.
    pub fn residual(&self, p: &ModelParams<T>) -> Result<Option<T>> {
        match &self.state {
            Some(state) => Ok(Some(p.rhs(state)?.inf_norm())),
            None => Ok(None),
        }
    }
}

fn require_mode<T: Scalar>(p: &ModelParams<T>, mode: HydrolysisMode) -> Result<()> {
    if p.mode() == mode {
        Ok(())
    } else {
        Err(Error::WrongHydrolysis {
            required: mode.name(),
        })
    }
}

/// Asymptotic hydrolysate level under first-order hydrolysis.
pub fn x0_star_first_order<T: Scalar>(p: &ModelParams<T>) -> Result<T> {
    require_mode(p, HydrolysisMode::FirstOrder)?;
    let k_hyd = p.k_hyd().expect("first-order mode");
    Ok(p.d * p.x0_in / (k_hyd + p.alpha0 * p.d))
}

/// Effective soluble-substrate inflow under first-order hydrolysis,
/// `S1in + k0 k_hyd X0in / (k_hyd + alpha0 D) >= S1in`.
pub fn effective_s1_in<T: Scalar>(p: &ModelParams<T>) -> Result<T> {
    require_mode(p, HydrolysisMode::FirstOrder)?;
    let k_hyd = p.k_hyd().expect("first-order mode");
    Ok(p.s1_in + p.k0 * k_hyd * p.x0_in / (k_hyd + p.alpha0 * p.d))
}

/// All six candidate equilibria of the first-order variant, in canonical
/// label order. Non-existence is reported through the record, not an error.
pub fn equilibria_first_order<T: Scalar>(p: &ModelParams<T>) -> Result<Vec<EquilibriumRecord<T>>> {
    require_mode(p, HydrolysisMode::FirstOrder)?;
    let rates = p.removal_rates()?;
    let be = BreakEven::compute(&p.mu1, &p.mu2, rates.d1, rates.d2)?;
    let x0s = x0_star_first_order(p)?;
    let s1s = effective_s1_in(p)?;
    let zero = T::zero();

    let mut records = Vec::with_capacity(6);

    // Total washout: always present.
    records.push(EquilibriumRecord::candidate(
        EquilibriumLabel::new(false, 0, None),
        Some(State::new(x0s, s1s, zero, p.s2_in, zero)),
        Vec::new(),
    ));

    // Methanogens only.
    for branch in [1u8, 2u8] {
        let label = EquilibriumLabel::new(false, branch, None);
        let rec = match be.lambda2 {
            None => {
                EquilibriumRecord::candidate(label, None, vec![lambda2_defined_margin(p, rates.d2)])
            }
            Some(pair) => {
                let l2 = if branch == 1 { pair.0 } else { pair.1 };
                let x2 = p.d / (p.k3 * rates.d2) * (p.s2_in - l2);
                let margin = Margin::new(
                    if branch == 1 {
                        "S2in_minus_lambda2_low"
                    } else {
                        "S2in_minus_lambda2_high"
                    },
                    p.s2_in - l2,
                );
                EquilibriumRecord::candidate(
                    label,
                    Some(State::new(x0s, s1s, zero, l2, x2)),
                    vec![margin],
                )
            }
        };
        records.push(rec);
    }

    // Acidogens persist.
    match be.lambda1 {
        None => {
            let sup = p.mu1.sup().expect("monotone curves without sup are linear");
            for branch in [0u8, 1, 2] {
                records.push(EquilibriumRecord::candidate(
                    EquilibriumLabel::new(true, branch, None),
                    None,
                    vec![Margin::new("mu1_sup_minus_D1", sup - rates.d1)],
                ));
            }
        }
        Some(l1) => {
            let x1 = p.d / (p.k1 * rates.d1) * (s1s - l1);
            let s2_free = p.s2_in + p.k2 / p.k1 * (s1s - l1);
            let persist = Margin::new("S1in_star_minus_lambda1", s1s - l1);

            let mut rec = EquilibriumRecord::candidate(
                EquilibriumLabel::new(true, 0, None),
                Some(State::new(x0s, l1, x1, s2_free, zero)),
                vec![persist],
            );
            rec.x1_aux = Some(x1);
            rec.s2_aux = Some(s2_free);
            records.push(rec);

            for branch in [1u8, 2u8] {
                let label = EquilibriumLabel::new(true, branch, None);
                let mut rec = match be.lambda2 {
                    None => EquilibriumRecord::candidate(
                        label,
                        None,
                        vec![persist, lambda2_defined_margin(p, rates.d2)],
                    ),
                    Some(pair) => {
                        let l2 = if branch == 1 { pair.0 } else { pair.1 };
                        let h = l2 + p.k2 / p.k1 * l1;
                        let total_in = p.s2_in + p.k2 / p.k1 * s1s;
                        let x2 = p.d / (p.k3 * rates.d2) * (total_in - h);
                        let margin = Margin::new(
                            if branch == 1 {
                                "S2_total_minus_H_low"
                            } else {
                                "S2_total_minus_H_high"
                            },
                            total_in - h,
                        );
                        EquilibriumRecord::candidate(
                            label,
                            Some(State::new(x0s, l1, x1, l2, x2)),
                            vec![persist, margin],
                        )
                    }
                };
                rec.x1_aux = Some(x1);
                rec.s2_aux = Some(s2_free);
                records.push(rec);
            }
        }
    }

    Ok(records)
}

fn lambda2_defined_margin<T: Scalar>(p: &ModelParams<T>, d2: T) -> Margin<T> {
    let (_, peak) = p.mu2.peak().expect("mu2 is inhibited");
    Margin::new("mu2_peak_minus_D2", peak - d2)
}

/// Acidogenic biomass consistent with the hydrolysate balance,
/// `xi(x0) = D (X0in - alpha0 x0) / mu0(x0)` on `(0, X0in/alpha0]`.
pub fn xi<T: Scalar>(p: &ModelParams<T>, x0: T) -> Result<T> {
    let mu0 = require_mu0(p)?;
    check_hydrolysate_domain(p, x0)?;
    Ok(p.d * (p.x0_in - p.alpha0 * x0) / mu0.eval_raw(x0))
}

/// Derivative of [`xi`]; strictly negative on the open interval.
pub fn xi_prime<T: Scalar>(p: &ModelParams<T>, x0: T) -> Result<T> {
    let mu0 = require_mu0(p)?;
    check_hydrolysate_domain(p, x0)?;
    let g = mu0.eval_raw(x0);
    let xi_val = p.d * (p.x0_in - p.alpha0 * x0) / g;
    Ok(-p.alpha0 * p.d / g - xi_val * mu0.deriv_raw(x0) / g)
}

/// Acidogenic biomass consistent with the soluble-substrate balance,
/// affine in `x0` with slope `-alpha0 D k0 / (k1 D1)`.
pub fn delta<T: Scalar>(p: &ModelParams<T>, x0: T) -> Result<T> {
    require_mode(p, HydrolysisMode::BiomassDependent)?;
    let rates = p.removal_rates()?;
    let l1 = lambda1(&p.mu1, rates.d1)?.ok_or_else(|| Error::BreakEvenUndefined {
        name: "lambda1",
        reason: format!("D1 = {} is not below the supremum of mu1", rates.d1),
    })?;
    Ok(p.d / (p.k1 * rates.d1) * ((p.s1_in - l1) + p.k0 * (p.x0_in - p.alpha0 * x0)))
}

fn require_mu0<T: Scalar>(p: &ModelParams<T>) -> Result<&crate::kinetics::GrowthCurve<T>> {
    match &p.hydrolysis {
        Hydrolysis::BiomassDependent { mu0 } => Ok(mu0),
        Hydrolysis::FirstOrder { .. } => Err(Error::WrongHydrolysis {
            required: "biomass_dependent",
        }),
    }
}

fn check_hydrolysate_domain<T: Scalar>(p: &ModelParams<T>, x0: T) -> Result<()> {
    if x0 <= T::zero() || x0 > p.x0_in / p.alpha0 {
        Err(Error::Domain {
            name: "x0",
            value: x0.to_f64_lossy(),
            domain: "(0, X0in/alpha0]",
        })
    } else {
        Ok(())
    }
}

/// Which branch of the root-count analysis applied.
///
/// `Monotone*` cases have `k0 mu0(X0in/alpha0) <= k1 D1`, so the balance gap
/// is monotone; `Steep*` cases have the reverse inequality, and the count
/// depends on the tangency threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityCase {
    /// Monotone gap with a sign change: one root.
    MonotoneRoot,
    /// Monotone gap without a sign change: no root.
    MonotoneEmpty,
    /// Steep hydrolysis, inflow at or above `lambda1`: one root.
    SteepSingle,
    /// Steep hydrolysis, inflow strictly between the thresholds: two roots.
    SteepPair,
    /// Steep hydrolysis, inflow at or below the tangency threshold: none.
    SteepEmpty,
    /// Inflow exactly at the tangency threshold: double root.
    SteepTangent,
    /// `lambda1` undefined; the acidogenic population cannot persist.
    NoBreakEven,
}

/// Roots of the hydrolysate balance and the data that classified them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport<T> {
    /// Number of admissible hydrolysate levels (0, 1 or 2).
    pub n: usize,
    /// Roots in ascending order, strictly inside `(0, X0in/alpha0)`.
    pub roots: Vec<T>,
    /// Point where `xi'` equals the slope of `delta`, when defined.
    pub x_bar: Option<T>,
    /// Tangency threshold for the inflow `S1in`, when defined.
    pub s1_in_bar: Option<T>,
    pub case: MultiplicityCase,
    /// Set when the two roots have collapsed to the tangency point.
    pub degenerate: bool,
}

/// Counts and locates the solutions of `xi(x0) = delta(x0)`.
pub fn multiplicity<T: Scalar>(p: &ModelParams<T>) -> Result<MultiplicityReport<T>> {
    let mu0 = require_mu0(p)?;
    let rates = p.removal_rates()?;
    let Some(l1) = lambda1(&p.mu1, rates.d1)? else {
        return Ok(MultiplicityReport {
            n: 0,
            roots: Vec::new(),
            x_bar: None,
            s1_in_bar: None,
            case: MultiplicityCase::NoBreakEven,
            degenerate: false,
        });
    };

    let right = p.x0_in / p.alpha0;
    let kappa = p.k0 * mu0.eval_raw(right) - p.k1 * rates.d1;
    let gap = |x0: T| {
        let g = mu0.eval_raw(x0);
        let xi_val = p.d * (p.x0_in - p.alpha0 * x0) / g;
        let delta_val =
            p.d / (p.k1 * rates.d1) * ((p.s1_in - l1) + p.k0 * (p.x0_in - p.alpha0 * x0));
        xi_val - delta_val
    };

    if kappa <= T::zero() {
        // The gap is non-increasing: at most one sign change, decided by the
        // value at the right endpoint.
        return if p.s1_in > l1 {
            let root = locate_root(p, &gap, None, right)?;
            Ok(MultiplicityReport {
                n: 1,
                roots: vec![root],
                x_bar: None,
                s1_in_bar: None,
                case: MultiplicityCase::MonotoneRoot,
                degenerate: false,
            })
        } else {
            Ok(MultiplicityReport {
                n: 0,
                roots: Vec::new(),
                x_bar: None,
                s1_in_bar: None,
                case: MultiplicityCase::MonotoneEmpty,
                degenerate: false,
            })
        };
    }

    // xi' grows from -inf to a value above the delta slope, so it crosses it
    // exactly once; that point carries the tangency threshold for S1in.
    let slope = -p.alpha0 * p.d * p.k0 / (p.k1 * rates.d1);
    let x_bar = {
        let f = |x0: T| xi_prime_raw(p, mu0, x0) - slope;
        let lo = expand_left(right, f, true)?;
        let root = bisect(f, lo, right, &BisectOptions::default())?;
        root.x
    };
    // Tangency level: the balance value xi(x_bar). The threshold is the
    // inflow at which the affine branch passes through that point.
    let x1_bar = p.d * (p.x0_in - p.alpha0 * x_bar) / mu0.eval_raw(x_bar);
    let s1_in_bar = l1 + p.k1 * rates.d1 / p.d * x1_bar - p.k0 * (p.x0_in - p.alpha0 * x_bar);
    let threshold = s1_in_bar.max(T::zero());

    let tangency_band = lit::<T>(TANGENCY_REL_TOL) * (T::one() + s1_in_bar.abs());
    let report = |n: usize, roots: Vec<T>, case, degenerate| MultiplicityReport {
        n,
        roots,
        x_bar: Some(x_bar),
        s1_in_bar: Some(s1_in_bar),
        case,
        degenerate,
    };

    if p.s1_in < l1 && (p.s1_in - s1_in_bar).abs() <= tangency_band {
        return Ok(report(1, vec![x_bar], MultiplicityCase::SteepTangent, true));
    }
    if p.s1_in >= l1 {
        let root = locate_root(p, &gap, None, x_bar)?;
        return Ok(report(1, vec![root], MultiplicityCase::SteepSingle, false));
    }
    if p.s1_in > threshold {
        let low = locate_root(p, &gap, None, x_bar)?;
        let high = locate_root(p, &gap, Some(x_bar), right)?;
        return Ok(report(
            2,
            vec![low, high],
            MultiplicityCase::SteepPair,
            false,
        ));
    }
    Ok(report(0, Vec::new(), MultiplicityCase::SteepEmpty, false))
}

fn xi_prime_raw<T: Scalar>(p: &ModelParams<T>, mu0: &crate::kinetics::GrowthCurve<T>, x0: T) -> T {
    let g = mu0.eval_raw(x0);
    let xi_val = p.d * (p.x0_in - p.alpha0 * x0) / g;
    -p.alpha0 * p.d / g - xi_val * mu0.deriv_raw(x0) / g
}

/// Finds a left endpoint where `f` has the sign it carries near 0.
///
/// `f` tends to +inf (gap) or -inf (shifted slope) as `x0 -> 0`; start at a
/// relative offset and shrink toward 0 until the sign shows.
fn expand_left<T: Scalar>(right: T, f: impl Fn(T) -> T, want_negative: bool) -> Result<T> {
    let mut lo = lit::<T>(1e-12) * right;
    let shrink = lit::<T>(1e-3);
    for _ in 0..200 {
        let v = f(lo);
        if (want_negative && v < T::zero()) || (!want_negative && v > T::zero()) {
            return Ok(lo);
        }
        lo = lo * shrink;
        if lo <= T::zero() || !lo.is_normal() {
            break;
        }
    }
    Err(Error::RootSolve(
        "could not establish a bracket near the left endpoint".to_owned(),
    ))
}

/// Bisects the balance gap on `(lo?, hi)` and enforces the residual bound.
fn locate_root<T: Scalar>(
    p: &ModelParams<T>,
    gap: &impl Fn(T) -> T,
    lo: Option<T>,
    hi: T,
) -> Result<T> {
    let right = p.x0_in / p.alpha0;
    let lo = match lo {
        Some(v) => v,
        None => expand_left(right, gap, false)?,
    };
    let root: Root<T> = bisect(gap, lo, hi, &BisectOptions::default())?;
    let tol = lit::<T>(ROOT_RESIDUAL_TOL);
    if root.residual.abs() > tol {
        return Err(Error::RootSolve(format!(
            "hydrolysate balance root at x0 = {} has residual {} above {tol} \
             (bracket width {}, {} iterations)",
            root.x, root.residual, root.width, root.iterations
        )));
    }
    Ok(root.x)
}

/// All candidate equilibria of the biomass-dependent variant in canonical
/// label order: washout records first, then one persistence triple per
/// hydrolysate root, grouped by methanogenic branch.
pub fn equilibria_biomass<T: Scalar>(p: &ModelParams<T>) -> Result<Vec<EquilibriumRecord<T>>> {
    require_mode(p, HydrolysisMode::BiomassDependent)?;
    let rates = p.removal_rates()?;
    let be = BreakEven::compute(&p.mu1, &p.mu2, rates.d1, rates.d2)?;
    let mult = multiplicity(p)?;
    let zero = T::zero();
    let x0_star = p.x0_in / p.alpha0;

    let mut records = Vec::with_capacity(3 + 3 * mult.n);

    records.push(EquilibriumRecord::candidate(
        EquilibriumLabel::new(false, 0, None),
        Some(State::new(x0_star, p.s1_in, zero, p.s2_in, zero)),
        Vec::new(),
    ));

    for branch in [1u8, 2u8] {
        let label = EquilibriumLabel::new(false, branch, None);
        let rec = match be.lambda2 {
            None => {
                EquilibriumRecord::candidate(label, None, vec![lambda2_defined_margin(p, rates.d2)])
            }
            Some(pair) => {
                let l2 = if branch == 1 { pair.0 } else { pair.1 };
                let x2 = p.d / (p.k3 * rates.d2) * (p.s2_in - l2);
                let margin = Margin::new(
                    if branch == 1 {
                        "S2in_minus_lambda2_low"
                    } else {
                        "S2in_minus_lambda2_high"
                    },
                    p.s2_in - l2,
                );
                EquilibriumRecord::candidate(
                    label,
                    Some(State::new(x0_star, p.s1_in, zero, l2, x2)),
                    vec![margin],
                )
            }
        };
        records.push(rec);
    }

    if mult.n == 0 {
        return Ok(records);
    }
    let l1 = lambda1(&p.mu1, rates.d1)?.expect("roots exist only when lambda1 is defined");

    // Canonical order sorts by (j, i, k).
    for branch in [0u8, 1, 2] {
        for (idx, &x0k) in mult.roots.iter().enumerate() {
            let k = idx + 1;
            let label = EquilibriumLabel::new(true, branch, Some(k));
            let x1k = xi(p, x0k)?;
            let s2k = p.s2_in + p.k2 * rates.d1 / p.d * x1k;
            let mut rec = if branch == 0 {
                EquilibriumRecord::candidate(
                    label,
                    Some(State::new(x0k, l1, x1k, s2k, zero)),
                    Vec::new(),
                )
            } else {
                match be.lambda2 {
                    None => EquilibriumRecord::candidate(
                        label,
                        None,
                        vec![lambda2_defined_margin(p, rates.d2)],
                    ),
                    Some(pair) => {
                        let l2 = if branch == 1 { pair.0 } else { pair.1 };
                        let x2 = p.d / (p.k3 * rates.d2) * (s2k - l2);
                        let margin = Margin::new(
                            if branch == 1 {
                                "S2_star_minus_lambda2_low"
                            } else {
                                "S2_star_minus_lambda2_high"
                            },
                            s2k - l2,
                        );
                        EquilibriumRecord::candidate(
                            label,
                            Some(State::new(x0k, l1, x1k, l2, x2)),
                            vec![margin],
                        )
                    }
                }
            };
            rec.x1_aux = Some(x1k);
            rec.s2_aux = Some(s2k);
            records.push(rec);
        }
    }

    Ok(records)
}

/// Candidate equilibria for whichever hydrolysis variant `p` uses.
pub fn equilibria<T: Scalar>(p: &ModelParams<T>) -> Result<Vec<EquilibriumRecord<T>>> {
    match p.mode() {
        HydrolysisMode::FirstOrder => equilibria_first_order(p),
        HydrolysisMode::BiomassDependent => equilibria_biomass(p),
    }
}
