//! Adaptive time integration with positivity and mass-envelope monitors.
//!
//! The integrator is a Dormand-Prince 5(4) embedded pair with the usual
//! proportional step control. Two model-specific twists:
//!
//! * steps that drive any component below `-atol` are rejected and retried
//!   at half the step, so accepted states never undershoot beyond the
//!   absolute tolerance (the continuous model keeps them nonnegative);
//! * the weighted mass `Z` is recorded along the trajectory and checked
//!   against its exponential envelope
//!   `Z(0) e^(-Dmin t) + (D/Dmin) Zin (1 - e^(-Dmin t))`.

use serde::Serialize;

use crate::equilibria::{EquilibriumLabel, EquilibriumRecord};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::scalar::{lit, Scalar};

/// Integration settings.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimConfig<T> {
    pub t_end: T,
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// Record every n-th accepted step (the initial and final states are
    /// always recorded).
    pub record_stride: usize,
    pub monitors_enabled: bool,
}

impl<T: Scalar> SimConfig<T> {
    /// Defaults tight enough that analytic predictions dominate integrator
    /// error at bench scale.
    pub fn new(t_end: T) -> Self {
        Self {
            t_end,
            rtol: lit(1e-8),
            atol: lit(1e-10),
            max_steps: 1_000_000,
            record_stride: 1,
            monitors_enabled: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > T::zero() && self.rtol > T::zero() && self.atol > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "simulation config requires t_end, rtol, atol > 0 (got {}, {}, {})",
                self.t_end, self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

/// How a trajectory ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Terminal {
    /// Final state sits on an identified equilibrium.
    ConvergedTo(EquilibriumLabel),
    /// Reached `t_end` without a convergence verdict.
    Running,
    /// Step budget exhausted before `t_end`.
    MaxSteps,
}

/// A monitor firing: time, monitor name, violation magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorEvent<T> {
    pub t: T,
    pub monitor: &'static str,
    pub magnitude: T,
}

/// Recorded trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    /// Weighted total mass at each recorded point.
    pub z_values: Vec<T>,
    pub monitor_violations: Vec<MonitorEvent<T>>,
    pub terminal: Terminal,
    /// Accepted steps taken.
    pub steps: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_time(&self) -> T {
        *self
            .times
            .last()
            .expect("trajectory has at least one point")
    }

    pub fn final_state(&self) -> &State<T> {
        self.states
            .last()
            .expect("trajectory has at least one point")
    }
}

// Dormand-Prince 5(4) tableau. The last `a` row doubles as the fifth-order
// weights (FSAL), so only the stage matrix and error weights are stored.
fn dp_coeffs() -> ([[f64; 6]; 6], [f64; 7]) {
    let a = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // Error weights: difference between the fifth and fourth order solutions.
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    (a, e)
}

fn axpy<T: Scalar>(y: &[T; 5], h: T, coeffs: &[(T, [T; 5])]) -> [T; 5] {
    let mut out = *y;
    for (c, k) in coeffs {
        for i in 0..5 {
            out[i] = out[i] + h * *c * k[i];
        }
    }
    out
}

/// Integrates the model from `x0` to `cfg.t_end`.
///
/// Exhausting `max_steps` returns the partial trajectory with
/// [`Terminal::MaxSteps`]; an underflowing step size is a hard error.
pub fn integrate<T: Scalar>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    x0.check_nonnegative()?;
    p.validate()?;
    let (a_tab, e_tab) = dp_coeffs();
    let lift = |row: &[f64]| -> Vec<T> { row.iter().map(|&v| lit(v)).collect() };
    let a: Vec<Vec<T>> = a_tab.iter().map(|r| lift(r)).collect();
    let e: Vec<T> = lift(&e_tab);

    let zero = T::zero();
    let one = T::one();
    let stride = cfg.record_stride.max(1);
    let f = |y: &[T; 5]| -> [T; 5] { p.rhs_unchecked(&State::from_array(*y)).as_array() };

    let mut t = zero;
    let mut y = x0.as_array();
    let mut k1 = f(&y);

    // Monitors.
    let z0 = p.total_mass(x0);
    let bound = p.omega_bound()?;
    let d_min = p.removal_rates()?.d_min;
    let env_tol = lit::<T>(1e-6) * (one + z0);
    let envelope = |t: T| bound + (z0 - bound) * (-d_min * t).exp();

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        z_values: Vec::new(),
        monitor_violations: Vec::new(),
        terminal: Terminal::Running,
        steps: 0,
    };
    let record = |t: T, y: &[T; 5], traj: &mut Trajectory<T>| {
        let state = State::from_array(*y);
        let z = p.total_mass(&state);
        if cfg.monitors_enabled {
            let excess = z - envelope(t);
            if excess > env_tol {
                traj.monitor_violations.push(MonitorEvent {
                    t,
                    monitor: "omega_envelope",
                    magnitude: excess,
                });
            }
            let min = state.min_component();
            if min < -cfg.atol {
                traj.monitor_violations.push(MonitorEvent {
                    t,
                    monitor: "positivity",
                    magnitude: min,
                });
            }
        }
        traj.times.push(t);
        traj.states.push(state);
        traj.z_values.push(z);
    };
    record(t, &y, &mut traj);

    // Initial step from the local derivative scale.
    let f_norm = k1.iter().fold(zero, |m, v| m.max(v.abs()));
    let y_norm = y.iter().fold(zero, |m, v| m.max(v.abs()));
    let mut h = if f_norm > zero {
        (lit::<T>(0.01) * y_norm.max(cfg.atol) / f_norm).min(cfg.t_end * lit(0.1))
    } else {
        cfg.t_end * lit(0.01)
    };
    h = h.max(cfg.t_end * lit(1e-12));

    let mut attempts = 0usize;
    let clip_level = -cfg.atol * lit::<T>(1e-3);

    while t < cfg.t_end {
        attempts += 1;
        if attempts > cfg.max_steps {
            traj.terminal = Terminal::MaxSteps;
            if *traj.times.last().unwrap() < t {
                record(t, &y, &mut traj);
            }
            return Ok(traj);
        }
        let h_floor = lit::<T>(16.0) * T::epsilon() * t.max(cfg.t_end * lit(1e-6));
        if h <= h_floor {
            return Err(Error::StepUnderflow {
                t: t.to_f64_lossy(),
                h: h.to_f64_lossy(),
            });
        }
        h = h.min(cfg.t_end - t);

        let k2 = f(&axpy(&y, h, &[(a[0][0], k1)]));
        let k3 = f(&axpy(&y, h, &[(a[1][0], k1), (a[1][1], k2)]));
        let k4 = f(&axpy(&y, h, &[(a[2][0], k1), (a[2][1], k2), (a[2][2], k3)]));
        let k5 = f(&axpy(
            &y,
            h,
            &[(a[3][0], k1), (a[3][1], k2), (a[3][2], k3), (a[3][3], k4)],
        ));
        let k6 = f(&axpy(
            &y,
            h,
            &[
                (a[4][0], k1),
                (a[4][1], k2),
                (a[4][2], k3),
                (a[4][3], k4),
                (a[4][4], k5),
            ],
        ));
        let y_new = axpy(
            &y,
            h,
            &[
                (a[5][0], k1),
                (a[5][1], k2),
                (a[5][2], k3),
                (a[5][3], k4),
                (a[5][4], k5),
                (a[5][5], k6),
            ],
        );
        let k7 = f(&y_new);

        // Scaled error estimate. Non-finite proposals (overflowing fields)
        // must reject: T::max ignores NaN, so finiteness is checked
        // explicitly.
        let mut err = zero;
        for i in 0..5 {
            let e_i = h
                * (e[0] * k1[i]
                    + e[2] * k3[i]
                    + e[3] * k4[i]
                    + e[4] * k5[i]
                    + e[5] * k6[i]
                    + e[6] * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max(e_i.abs() / sc);
        }
        let finite = err.is_finite() && y_new.iter().all(|v| v.is_finite());
        let undershoot = !finite || y_new.iter().any(|&v| v < -cfg.atol);

        if err <= one && !undershoot {
            t = t + h;
            y = y_new;
            let mut clipped = false;
            for v in &mut y {
                if *v < clip_level {
                    *v = zero;
                    clipped = true;
                }
            }
            k1 = if clipped { f(&y) } else { k7 };
            traj.steps += 1;
            if traj.steps % stride == 0 {
                record(t, &y, &mut traj);
            }
            let factor = if err > zero {
                (lit::<T>(0.9) * err.powf(lit(-0.2)))
                    .min(lit(5.0))
                    .max(lit(0.2))
            } else {
                lit(5.0)
            };
            h = h * factor;
        } else if undershoot {
            h = h * lit(0.5);
        } else {
            let factor = (lit::<T>(0.9) * err.powf(lit(-0.2)))
                .min(lit(0.9))
                .max(lit(0.1));
            h = h * factor;
        }
    }

    if *traj.times.last().unwrap() < t {
        record(t, &y, &mut traj);
    }
    traj.terminal = Terminal::Running;
    Ok(traj)
}

/// Result of checking a trajectory against the mass envelope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OmegaCheck<T> {
    /// Largest excess of `Z(t)` over the envelope (negative when the
    /// envelope holds everywhere).
    pub worst_excess: T,
    pub worst_time: T,
    /// Points exceeding the envelope by more than the tolerance.
    pub violations: usize,
    pub tol: T,
}

/// Verifies `Z(t) <= envelope(t) + tol_env` at every recorded point.
pub fn check_omega<T: Scalar>(
    traj: &Trajectory<T>,
    p: &ModelParams<T>,
    tol_env: T,
) -> Result<OmegaCheck<T>> {
    let bound = p.omega_bound()?;
    let d_min = p.removal_rates()?.d_min;
    let z0 = *traj
        .z_values
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".to_owned()))?;
    let mut worst = T::neg_infinity();
    let mut worst_time = T::zero();
    let mut violations = 0;
    for (&t, &z) in traj.times.iter().zip(&traj.z_values) {
        let env = bound + (z0 - bound) * (-d_min * t).exp();
        let excess = z - env;
        if excess > worst {
            worst = excess;
            worst_time = t;
        }
        if excess > tol_env {
            violations += 1;
        }
    }
    Ok(OmegaCheck {
        worst_excess: worst,
        worst_time,
        violations,
        tol: tol_env,
    })
}

/// Upgrades a trajectory's terminal classification by matching its final
/// state against the equilibrium set: within `1e-6 (1 + |eq|_inf)` of an
/// existing equilibrium and with field residual below `1e-8`.
pub fn detect_convergence<T: Scalar>(
    traj: &Trajectory<T>,
    equilibria: &[EquilibriumRecord<T>],
    p: &ModelParams<T>,
) -> Terminal {
    let y = traj.final_state();
    let residual = p
        .rhs(y)
        .map(|dx| dx.inf_norm())
        .unwrap_or_else(|_| T::infinity());
    if residual > lit(1e-8) {
        return traj.terminal.clone();
    }
    let mut best: Option<(T, EquilibriumLabel)> = None;
    for rec in equilibria.iter().filter(|r| r.exists) {
        let Some(eq) = rec.state else { continue };
        let tol = lit::<T>(1e-6) * (T::one() + eq.inf_norm());
        let dist = y.max_abs_diff(&eq);
        if dist <= tol && best.is_none_or(|(d, _)| dist < d) {
            best = Some((dist, rec.label));
        }
    }
    match best {
        Some((_, label)) => Terminal::ConvergedTo(label),
        None => traj.terminal.clone(),
    }
}
