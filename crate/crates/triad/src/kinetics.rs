//! Specific growth-rate laws and break-even concentrations.
//!
//! Three parametric laws are supported:
//!
//! * Monod, `mu(s) = m s / (K + s)`: saturating and strictly increasing;
//! * Haldane, `mu(s) = m s / (K + s + s^2/KI)`: substrate-inhibited, with a
//!   unique maximum at `s_m = sqrt(K KI)`;
//! * linear, `mu(s) = c s`.
//!
//! Each curve carries the kinetic class it is used under:
//! [`KineticClass::Monotone`] (increasing, `mu(0) = 0`),
//! [`KineticClass::Inhibited`] (non-monotone with one interior peak), or
//! [`KineticClass::Concave`] (increasing and concave). Monod and linear
//! curves qualify as Monotone or Concave; Haldane is the Inhibited law.
//!
//! The break-even concentration of a curve against a removal rate `d` is the
//! substrate level where `mu(s) = d`. Monotone curves have at most one
//! (`lambda1`), inhibited curves have an ordered pair `(lambda2_low,
//! lambda2_high)` when `d` does not exceed the peak value. Closed forms are
//! used where the law permits; a generic bisection path is kept alongside as
//! a cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::solve::{bisect, BisectOptions};

/// Relative band inside which a removal rate is treated as exactly the
/// Haldane peak value, yielding the double root `(s_m, s_m)`.
const PEAK_EQUALITY_REL_TOL: f64 = 1e-10;

/// Parametric form of a growth law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveKind<T> {
    Monod {
        m: T,
        #[serde(rename = "K")]
        k: T,
    },
    Haldane {
        m: T,
        #[serde(rename = "K")]
        k: T,
        #[serde(rename = "KI")]
        ki: T,
    },
    Linear {
        c: T,
    },
}

impl<T> CurveKind<T> {
    fn name(&self) -> &'static str {
        match self {
            CurveKind::Monod { .. } => "monod",
            CurveKind::Haldane { .. } => "haldane",
            CurveKind::Linear { .. } => "linear",
        }
    }
}

/// Qualitative class a growth curve is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticClass {
    /// Strictly increasing with value 0 at 0.
    Monotone,
    /// Zero at 0 and at infinity, one interior maximizer.
    Inhibited,
    /// Increasing and concave with value 0 at 0.
    Concave,
}

impl KineticClass {
    pub fn name(self) -> &'static str {
        match self {
            KineticClass::Monotone => "monotone",
            KineticClass::Inhibited => "inhibited",
            KineticClass::Concave => "concave",
        }
    }
}

/// A growth law together with its validated kinetic class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCurve<T> {
    kind: CurveKind<T>,
    class: KineticClass,
}

impl<T: Scalar> GrowthCurve<T> {
    /// Builds a curve, checking parameter positivity and that the law can
    /// serve the requested class.
    pub fn new(kind: CurveKind<T>, class: KineticClass) -> Result<Self> {
        let zero = T::zero();
        let positive = |name: &str, v: T| -> Result<()> {
            if v > zero && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "growth curve parameter {name} must be strictly positive, got {v}"
                )))
            }
        };
        match kind {
            CurveKind::Monod { m, k } => {
                positive("m", m)?;
                positive("K", k)?;
            }
            CurveKind::Haldane { m, k, ki } => {
                positive("m", m)?;
                positive("K", k)?;
                positive("KI", ki)?;
            }
            CurveKind::Linear { c } => positive("c", c)?,
        }
        let admissible = matches!(
            (kind, class),
            (
                CurveKind::Monod { .. } | CurveKind::Linear { .. },
                KineticClass::Monotone | KineticClass::Concave,
            ) | (CurveKind::Haldane { .. }, KineticClass::Inhibited)
        );
        if !admissible {
            return Err(Error::ClassMismatch {
                expected: class.name(),
                found: kind.name(),
            });
        }
        Ok(Self { kind, class })
    }

    pub fn monod(m: T, k: T, class: KineticClass) -> Result<Self> {
        Self::new(CurveKind::Monod { m, k }, class)
    }

    pub fn haldane(m: T, k: T, ki: T) -> Result<Self> {
        Self::new(CurveKind::Haldane { m, k, ki }, KineticClass::Inhibited)
    }

    pub fn linear(c: T, class: KineticClass) -> Result<Self> {
        Self::new(CurveKind::Linear { c }, class)
    }

    pub fn kind(&self) -> CurveKind<T> {
        self.kind
    }

    pub fn class(&self) -> KineticClass {
        self.class
    }

    fn check_nonneg(s: T) -> Result<()> {
        if s >= T::zero() {
            Ok(())
        } else {
            Err(Error::NegativeConcentration {
                name: "s",
                value: s.to_f64_lossy(),
            })
        }
    }

    /// Growth rate at substrate level `s >= 0`.
    pub fn eval(&self, s: T) -> Result<T> {
        Self::check_nonneg(s)?;
        Ok(self.eval_raw(s))
    }

    /// Analytic derivative at `s >= 0`.
    pub fn eval_deriv(&self, s: T) -> Result<T> {
        Self::check_nonneg(s)?;
        Ok(self.deriv_raw(s))
    }

    pub(crate) fn eval_raw(&self, s: T) -> T {
        match self.kind {
            CurveKind::Monod { m, k } => m * s / (k + s),
            CurveKind::Haldane { m, k, ki } => m * s / (k + s + s * s / ki),
            CurveKind::Linear { c } => c * s,
        }
    }

    pub(crate) fn deriv_raw(&self, s: T) -> T {
        match self.kind {
            CurveKind::Monod { m, k } => {
                let den = k + s;
                m * k / (den * den)
            }
            CurveKind::Haldane { m, k, ki } => {
                let den = k + s + s * s / ki;
                m * (k - s * s / ki) / (den * den)
            }
            CurveKind::Linear { c } => c,
        }
    }

    /// Evaluation clamped below at 0; the integrator feeds transiently
    /// negative stage states through this.
    pub(crate) fn eval_clamped(&self, s: T) -> T {
        self.eval_raw(s.max(T::zero()))
    }

    /// Supremum over `[0, inf)`. `None` means unbounded (linear law).
    pub fn sup(&self) -> Option<T> {
        match self.kind {
            CurveKind::Monod { m, .. } => Some(m),
            CurveKind::Haldane { .. } => self.peak().map(|(_, v)| v),
            CurveKind::Linear { .. } => None,
        }
    }

    /// Interior maximizer and peak value, for inhibited curves.
    pub fn peak(&self) -> Option<(T, T)> {
        match self.kind {
            CurveKind::Haldane { k, ki, .. } => {
                let sm = (k * ki).sqrt();
                Some((sm, self.eval_raw(sm)))
            }
            _ => None,
        }
    }
}

fn require_class<T: Scalar>(curve: &GrowthCurve<T>, class: KineticClass) -> Result<()> {
    if curve.class() == class {
        Ok(())
    } else {
        Err(Error::ClassMismatch {
            expected: class.name(),
            found: curve.class().name(),
        })
    }
}

fn require_positive_rate<T: Scalar>(name: &'static str, d: T) -> Result<()> {
    if d > T::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: d.to_f64_lossy(),
            domain: "(0, inf)",
        })
    }
}

/// Break-even concentration of a monotone curve against removal rate `d1`.
///
/// `Ok(None)` when `d1` is at or above the supremum of the curve, so the
/// equation `mu(s) = d1` has no solution.
pub fn lambda1<T: Scalar>(curve: &GrowthCurve<T>, d1: T) -> Result<Option<T>> {
    require_class(curve, KineticClass::Monotone)?;
    require_positive_rate("d1", d1)?;
    Ok(match curve.kind() {
        CurveKind::Monod { m, k } => {
            if d1 < m {
                Some(k * d1 / (m - d1))
            } else {
                None
            }
        }
        CurveKind::Linear { c } => Some(d1 / c),
        CurveKind::Haldane { .. } => unreachable!("haldane cannot be monotone"),
    })
}

/// Bisection route for [`lambda1`], kept as an independent cross-check of
/// the closed forms.
pub fn lambda1_bisect<T: Scalar>(curve: &GrowthCurve<T>, d1: T) -> Result<Option<T>> {
    require_class(curve, KineticClass::Monotone)?;
    require_positive_rate("d1", d1)?;
    if let Some(sup) = curve.sup() {
        if d1 >= sup {
            return Ok(None);
        }
    }
    // Double an upper bound until the curve passes d1; monotonicity
    // guarantees this terminates whenever d1 < sup.
    let mut hi = match curve.kind() {
        CurveKind::Monod { k, .. } => k,
        CurveKind::Linear { c } => d1 / c,
        CurveKind::Haldane { .. } => unreachable!(),
    };
    let two = lit::<T>(2.0);
    for _ in 0..2048 {
        if curve.eval_raw(hi) > d1 {
            break;
        }
        hi = hi * two;
    }
    if curve.eval_raw(hi) <= d1 {
        return Err(Error::RootSolve(format!(
            "failed to bracket mu(s) = {d1} from above"
        )));
    }
    let root = bisect(
        |s| curve.eval_raw(s) - d1,
        T::zero(),
        hi,
        &BisectOptions::default(),
    )?;
    Ok(Some(root.x))
}

/// Ordered pair of break-even concentrations of an inhibited curve against
/// removal rate `d2`.
///
/// Returns the double root `(s_m, s_m)` when `d2` equals the peak value to
/// within a relative tolerance, and `Ok(None)` when `d2` exceeds the peak.
pub fn lambda2_pair<T: Scalar>(curve: &GrowthCurve<T>, d2: T) -> Result<Option<(T, T)>> {
    require_class(curve, KineticClass::Inhibited)?;
    require_positive_rate("d2", d2)?;
    let CurveKind::Haldane { m, k, ki } = curve.kind() else {
        unreachable!("inhibited curves are haldane");
    };
    let (sm, peak) = curve.peak().expect("haldane has a peak");
    let band = lit::<T>(PEAK_EQUALITY_REL_TOL) * peak;
    if d2 > peak + band {
        return Ok(None);
    }
    if (d2 - peak).abs() <= band {
        return Ok(Some((sm, sm)));
    }
    // mu(s) = d2 reduces to s^2 + b s + c = 0 with b = KI (d2 - m)/d2 < 0
    // and c = K KI; the larger root is cancellation-free, the smaller one
    // follows from the product of roots.
    let b = ki * (d2 - m) / d2;
    let c = k * ki;
    let four = lit::<T>(4.0);
    let disc = b * b - four * c;
    if disc < T::zero() {
        // Only reachable within rounding of the peak; treat as the double root.
        return Ok(Some((sm, sm)));
    }
    let half = lit::<T>(0.5);
    let high = half * (-b + disc.sqrt());
    let low = c / high;
    Ok(Some((low, high)))
}

/// Bisection route for [`lambda2_pair`], independent of the quadratic form.
pub fn lambda2_pair_bisect<T: Scalar>(curve: &GrowthCurve<T>, d2: T) -> Result<Option<(T, T)>> {
    require_class(curve, KineticClass::Inhibited)?;
    require_positive_rate("d2", d2)?;
    let (sm, peak) = curve.peak().expect("haldane has a peak");
    let band = lit::<T>(PEAK_EQUALITY_REL_TOL) * peak;
    if d2 > peak + band {
        return Ok(None);
    }
    if (d2 - peak).abs() <= band {
        return Ok(Some((sm, sm)));
    }
    let opts = BisectOptions::default();
    let low = bisect(|s| curve.eval_raw(s) - d2, T::zero(), sm, &opts)?.x;
    let two = lit::<T>(2.0);
    let mut hi = sm * two;
    for _ in 0..2048 {
        if curve.eval_raw(hi) < d2 {
            break;
        }
        hi = hi * two;
    }
    let high = bisect(|s| curve.eval_raw(s) - d2, sm, hi, &opts)?.x;
    Ok(Some((low, high)))
}

/// Composite persistence thresholds `pair.i + (k2/k1) l1`.
pub fn h_values<T: Scalar>(l1: T, pair: (T, T), k1: T, k2: T) -> (T, T) {
    let shift = k2 / k1 * l1;
    (pair.0 + shift, pair.1 + shift)
}

/// Break-even concentrations of the acidogenic and methanogenic curves
/// against their removal rates. `None` components mean the corresponding
/// equation has no solution at these rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakEven<T> {
    pub lambda1: Option<T>,
    pub lambda2: Option<(T, T)>,
}

impl<T: Scalar> BreakEven<T> {
    pub fn compute(mu1: &GrowthCurve<T>, mu2: &GrowthCurve<T>, d1: T, d2: T) -> Result<Self> {
        Ok(Self {
            lambda1: lambda1(mu1, d1)?,
            lambda2: lambda2_pair(mu2, d2)?,
        })
    }

    /// Both composite thresholds, when every ingredient is defined.
    pub fn h_functions(&self, k1: T, k2: T) -> Option<(T, T)> {
        match (self.lambda1, self.lambda2) {
            (Some(l1), Some(pair)) => Some(h_values(l1, pair, k1, k2)),
            _ => None,
        }
    }
}
