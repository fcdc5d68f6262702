//! The three-stage chemostat model.
//!
//! State vector `(X0, S1, X1, S2, X2)`: particulate substrate, soluble
//! substrate, acidogenic biomass, intermediate substrate, methanogenic
//! biomass. The stages are hydrolysis (`X0 -> S1` at rate `r0`),
//! acidogenesis (`S1 -> S2` by `X1` at rate `mu1(S1) X1`) and methanogenesis
//! (`S2` consumed by `X2` at rate `mu2(S2) X2`):
//!
//! ```text
//! X0' = D X0in - alpha0 D X0 - r0
//! S1' = D (S1in - S1) + k0 r0 - k1 mu1(S1) X1
//! X1' = (mu1(S1) - D1) X1
//! S2' = D (S2in - S2) + k2 mu1(S1) X1 - k3 mu2(S2) X2
//! X2' = (mu2(S2) - D2) X2
//! ```
//!
//! Biomass removal rates combine hydraulic washout with intrinsic mortality,
//! `Di = alphai D + ai`, which decouples hydraulic and solid retention
//! times. Hydrolysis is either first order, `r0 = k_hyd X0`, or biomass
//! dependent, `r0 = mu0(X0) X1`.
//!
//! The weighted total mass `Z = k0 X0 + S1 + S2 + (k1 - k2) X1 + k3 X2`
//! decays toward the ball `Z <= (D / Dmin) Zin`, which makes that ball a
//! positively invariant global attractor and gives the runtime monitors
//! their envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::{GrowthCurve, KineticClass};
use crate::scalar::Scalar;

/// Hydrolysis mechanism, carrying its mode-specific data.
#[derive(Debug, Clone, PartialEq)]
pub enum Hydrolysis<T> {
    /// `r0 = k_hyd X0`.
    FirstOrder { k_hyd: T },
    /// `r0 = mu0(X0) X1`, with `mu0` increasing and concave.
    BiomassDependent { mu0: GrowthCurve<T> },
}

/// Discriminant of [`Hydrolysis`], used in reports and configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HydrolysisMode {
    FirstOrder,
    BiomassDependent,
}

impl HydrolysisMode {
    pub fn name(self) -> &'static str {
        match self {
            HydrolysisMode::FirstOrder => "first_order",
            HydrolysisMode::BiomassDependent => "biomass_dependent",
        }
    }
}

/// Effective biomass removal rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemovalRates<T> {
    /// `alpha1 D + a1`.
    pub d1: T,
    /// `alpha2 D + a2`.
    pub d2: T,
    /// `min(alpha0 D, D1, D2)`.
    pub d_min: T,
}

/// Full parameter set of the model.
///
/// Build with a struct literal and call [`ModelParams::validated`]; every
/// consumer of a `ModelParams` in this crate assumes the invariants below
/// hold:
///
/// * yields: `0 < k0 <= 1`, `k1 >= 1 + k2`, `k2 >= 0`, `k3 >= 1`;
/// * `d > 0`, inflows nonnegative, `alpha0` in `(0, 1]`, `alpha1`, `alpha2`
///   in `[0, 1]`, mortalities nonnegative, `d_min > 0`;
/// * `mu1` monotone, `mu2` inhibited, `mu0` concave, `k_hyd >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub k0: T,
    pub k1: T,
    pub k2: T,
    pub k3: T,
    pub alpha0: T,
    pub alpha1: T,
    pub alpha2: T,
    pub a1: T,
    pub a2: T,
    /// Dilution rate `D`.
    pub d: T,
    pub x0_in: T,
    pub s1_in: T,
    pub s2_in: T,
    pub mu1: GrowthCurve<T>,
    pub mu2: GrowthCurve<T>,
    pub hydrolysis: Hydrolysis<T>,
}

impl<T: Scalar> ModelParams<T> {
    /// Checks every construction invariant and returns the parameters.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        let one = T::one();
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        // Conditions are written positively so that NaN fields fail them.
        let k0_ok = self.k0 > zero && self.k0 <= one;
        if !k0_ok {
            return fail(format!("k0 = {} must lie in (0, 1]", self.k0));
        }
        let k2_ok = self.k2 >= zero;
        if !k2_ok {
            return fail(format!("k2 = {} must be nonnegative", self.k2));
        }
        let k1_ok = self.k1 >= one + self.k2;
        if !k1_ok {
            return fail(format!(
                "k1 = {} must be at least 1 + k2 = {}",
                self.k1,
                one + self.k2
            ));
        }
        let k3_ok = self.k3 >= one;
        if !k3_ok {
            return fail(format!("k3 = {} must be at least 1", self.k3));
        }
        let d_ok = self.d > zero && self.d.is_finite();
        if !d_ok {
            return fail(format!("dilution rate D = {} must be positive", self.d));
        }
        let alpha0_ok = self.alpha0 > zero && self.alpha0 <= one;
        if !alpha0_ok {
            return fail(format!("alpha0 = {} must lie in (0, 1]", self.alpha0));
        }
        for (name, v) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            let ok = v >= zero && v <= one;
            if !ok {
                return fail(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        for (name, v) in [("a1", self.a1), ("a2", self.a2)] {
            let ok = v >= zero && v.is_finite();
            if !ok {
                return fail(format!("{name} = {v} must be nonnegative"));
            }
        }
        for (name, v) in [
            ("X0in", self.x0_in),
            ("S1in", self.s1_in),
            ("S2in", self.s2_in),
        ] {
            let ok = v >= zero && v.is_finite();
            if !ok {
                return fail(format!("inflow {name} = {v} must be nonnegative"));
            }
        }
        if self.mu1.class() != KineticClass::Monotone {
            return fail("mu1 must be a monotone growth curve".to_owned());
        }
        if self.mu2.class() != KineticClass::Inhibited {
            return fail("mu2 must be an inhibited growth curve".to_owned());
        }
        match &self.hydrolysis {
            Hydrolysis::FirstOrder { k_hyd } => {
                let ok = *k_hyd >= zero && k_hyd.is_finite();
                if !ok {
                    return fail(format!("k_hyd = {k_hyd} must be nonnegative"));
                }
            }
            Hydrolysis::BiomassDependent { mu0 } => {
                if mu0.class() != KineticClass::Concave {
                    return fail("mu0 must be a concave growth curve".to_owned());
                }
            }
        }
        // d_min > 0 is what keeps the attractor ball finite.
        self.removal_rates().map(|_| ())
    }

    pub fn mode(&self) -> HydrolysisMode {
        match self.hydrolysis {
            Hydrolysis::FirstOrder { .. } => HydrolysisMode::FirstOrder,
            Hydrolysis::BiomassDependent { .. } => HydrolysisMode::BiomassDependent,
        }
    }

    pub fn k_hyd(&self) -> Option<T> {
        match self.hydrolysis {
            Hydrolysis::FirstOrder { k_hyd } => Some(k_hyd),
            Hydrolysis::BiomassDependent { .. } => None,
        }
    }

    pub fn mu0(&self) -> Option<&GrowthCurve<T>> {
        match &self.hydrolysis {
            Hydrolysis::FirstOrder { .. } => None,
            Hydrolysis::BiomassDependent { mu0 } => Some(mu0),
        }
    }

    /// Effective removal rates and their minimum.
    pub fn removal_rates(&self) -> Result<RemovalRates<T>> {
        let d1 = self.alpha1 * self.d + self.a1;
        let d2 = self.alpha2 * self.d + self.a2;
        let d_min = (self.alpha0 * self.d).min(d1).min(d2);
        if d_min > T::zero() {
            Ok(RemovalRates { d1, d2, d_min })
        } else {
            Err(Error::InvalidParameter(format!(
                "d_min = {d_min} must be positive (alpha0 D = {}, D1 = {d1}, D2 = {d2})",
                self.alpha0 * self.d
            )))
        }
    }

    /// Time derivative of the state. All components must be nonnegative.
    pub fn rhs(&self, x: &State<T>) -> Result<State<T>> {
        x.check_nonnegative()?;
        Ok(self.rhs_unchecked(x))
    }

    /// Derivative with growth curves evaluated at clamped (nonnegative)
    /// arguments; the integrator calls this on transiently undershooting
    /// stage states.
    pub(crate) fn rhs_unchecked(&self, x: &State<T>) -> State<T> {
        let rates = RemovalRates {
            d1: self.alpha1 * self.d + self.a1,
            d2: self.alpha2 * self.d + self.a2,
            d_min: T::zero(),
        };
        let r0 = match &self.hydrolysis {
            Hydrolysis::FirstOrder { k_hyd } => *k_hyd * x.x0,
            Hydrolysis::BiomassDependent { mu0 } => mu0.eval_clamped(x.x0) * x.x1,
        };
        let g1 = self.mu1.eval_clamped(x.s1);
        let g2 = self.mu2.eval_clamped(x.s2);
        State {
            x0: self.d * self.x0_in - self.alpha0 * self.d * x.x0 - r0,
            s1: self.d * (self.s1_in - x.s1) + self.k0 * r0 - self.k1 * g1 * x.x1,
            x1: (g1 - rates.d1) * x.x1,
            s2: self.d * (self.s2_in - x.s2) + self.k2 * g1 * x.x1 - self.k3 * g2 * x.x2,
            x2: (g2 - rates.d2) * x.x2,
        }
    }

    /// Weighted total mass `Z`.
    pub fn total_mass(&self, x: &State<T>) -> T {
        self.k0 * x.x0 + x.s1 + x.s2 + (self.k1 - self.k2) * x.x1 + self.k3 * x.x2
    }

    /// Inflow counterpart of `Z`.
    pub fn z_in(&self) -> T {
        self.k0 * self.x0_in + self.s1_in + self.s2_in
    }

    /// Radius `(D / Dmin) Zin` of the attracting ball for `Z`.
    pub fn omega_bound(&self) -> Result<T> {
        let rates = self.removal_rates()?;
        Ok(self.d / rates.d_min * self.z_in())
    }
}

/// Nonnegative concentrations `(X0, S1, X1, S2, X2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State<T> {
    #[serde(rename = "X0")]
    pub x0: T,
    #[serde(rename = "S1")]
    pub s1: T,
    #[serde(rename = "X1")]
    pub x1: T,
    #[serde(rename = "S2")]
    pub s2: T,
    #[serde(rename = "X2")]
    pub x2: T,
}

impl<T: Scalar> State<T> {
    pub fn new(x0: T, s1: T, x1: T, s2: T, x2: T) -> Self {
        Self { x0, s1, x1, s2, x2 }
    }

    pub fn zero() -> Self {
        let z = T::zero();
        Self::new(z, z, z, z, z)
    }

    pub fn as_array(&self) -> [T; 5] {
        [self.x0, self.s1, self.x1, self.s2, self.x2]
    }

    pub fn from_array(a: [T; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub const COMPONENT_NAMES: [&'static str; 5] = ["X0", "S1", "X1", "S2", "X2"];

    pub fn inf_norm(&self) -> T {
        self.as_array()
            .into_iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_component(&self) -> T {
        let a = self.as_array();
        a.into_iter().fold(a[0], |m, v| m.min(v))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.as_array()
            .into_iter()
            .zip(other.as_array())
            .fold(T::zero(), |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        for (name, v) in Self::COMPONENT_NAMES.into_iter().zip(self.as_array()) {
            if v < T::zero() {
                return Err(Error::NegativeConcentration {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}
