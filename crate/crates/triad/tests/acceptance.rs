//! Acceptance suite: one test per core guarantee, each printing a PASS line
//! with its headline numbers (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned here, not configurable:
//!
//! 1. field residuals at reported equilibria, `<= 1e-9 (1 + |state|)`;
//! 2. analytic vs numeric stability verdicts agree whenever every condition
//!    slack and the spectral margin exceed `1e-6`;
//! 3. the root-count formula matches a brute-force grid scan of the
//!    hydrolysate balance;
//! 4. both forms of the Routh-Hurwitz combination `c4` agree to `1e-9`
//!    (relative to the expression scale) and `sign(c3)` tracks the slope
//!    slack;
//! 5. trajectories stay nonnegative (>= -1e-10) and under the mass envelope
//!    (within `1e-6 Z(0)`);
//! 6. the hydrolysate settles at its closed-form level (first-order mode)
//!    and the full spectrum gives the same verdict as the reduced one;
//! 7. perturbed stable equilibria re-converge; generic starts never land on
//!    analytically unstable equilibria;
//! 8. one-dimensional operating-diagram scans flip signatures within one
//!    cell width of the analytic threshold curves.

use std::time::Instant;

use rand::Rng;
use triad::diagram::{scan, DiagramGrid, ParamAxis, ScanSpec};
use triad::equilibria::{delta, effective_s1_in, equilibria, multiplicity, xi, EquilibriumRecord};
use triad::kinetics::{CurveKind, GrowthCurve, KineticClass};
use triad::model::{Hydrolysis, HydrolysisMode, ModelParams, State};
use triad::simulator::{check_omega, detect_convergence, integrate, SimConfig, Terminal};
use triad::stability::{classify, jacobian, reduced4_eigenvalues, routh_from_branch, Verdict};
use triad::validation::{
    agreement_suite, draw_params, draw_state, residual_suite, routh_suite, seeded_rng,
    CONFIDENCE_MARGIN,
};

const SEED: u64 = 0x7a1d_2024;

/// Crude upper bound on explicit-integrator work (steps ~ horizon times the
/// fastest local rate). Used to filter randomized dynamics draws so the
/// suite runs inside its time budget; the properties being checked hold for
/// any parameters.
fn work_estimate(p: &ModelParams<f64>, horizon: f64) -> f64 {
    let rates = p.removal_rates().unwrap();
    let bound = p.omega_bound().unwrap();
    let x1_cap = bound; // (k1 - k2) X1 <= Z and k1 - k2 >= 1
    let x2_cap = bound / p.k3;
    let slope = |kind: CurveKind<f64>| match kind {
        CurveKind::Monod { m, k } => m / k,
        CurveKind::Haldane { m, k, .. } => m / k,
        CurveKind::Linear { c } => c,
    };
    let value_cap = |kind: CurveKind<f64>, arg_cap: f64| match kind {
        CurveKind::Monod { m, .. } => m,
        CurveKind::Haldane { m, .. } => m,
        CurveKind::Linear { c } => c * arg_cap,
    };
    let s_cap = bound;
    let mut rate = p.d * (1.0 + p.alpha0)
        + p.k_hyd().unwrap_or(0.0)
        + (p.k1 + p.k2 + 1.0) * slope(p.mu1.kind()) * x1_cap
        + (p.k3 + 1.0) * slope(p.mu2.kind()) * x2_cap
        + value_cap(p.mu1.kind(), s_cap)
        + value_cap(p.mu2.kind(), s_cap)
        + rates.d1
        + rates.d2;
    if let Some(mu0) = p.mu0() {
        rate += (1.0 + p.k0) * slope(mu0.kind()) * x1_cap + value_cap(mu0.kind(), bound / p.alpha0);
    }
    horizon * rate
}

#[test]
fn acceptance_1_equilibrium_residuals() {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for mode in [HydrolysisMode::FirstOrder, HydrolysisMode::BiomassDependent] {
        let suite = residual_suite(mode, 500, SEED);
        assert!(
            suite.failures.is_empty(),
            "{:?}: {} residual failures, worst {:.3e}",
            mode,
            suite.failures.len(),
            suite.max_scaled_residual
        );
        assert!(suite.equilibria_checked > 500, "too few equilibria");
        checked += suite.equilibria_checked;
        worst = worst.max(suite.max_scaled_residual);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "PASS residual suite: {checked} equilibria over 1000 draws, \
         worst scaled residual {worst:.3e} <= 1e-9, {elapsed:?}"
    );
}

#[test]
fn acceptance_2_analytic_numeric_agreement() {
    let start = Instant::now();
    let mut compared = 0;
    let mut skipped = 0;
    for mode in [HydrolysisMode::FirstOrder, HydrolysisMode::BiomassDependent] {
        let suite = agreement_suite(mode, 500, SEED);
        assert!(
            suite.disagreements.is_empty(),
            "{:?}: {} confident disagreements, first: {}",
            mode,
            suite.disagreements.len(),
            suite.disagreements[0].detail
        );
        assert!(suite.compared > 500, "too few confident comparisons");
        compared += suite.compared;
        skipped += suite.skipped_marginal;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "PASS stability agreement: {compared} confident verdicts identical \
         (margin {CONFIDENCE_MARGIN:.0e}, {skipped} marginal skipped), {elapsed:?}"
    );
}

#[test]
fn acceptance_3_multiplicity_grid_oracle() {
    let start = Instant::now();
    let mut rng = seeded_rng(SEED ^ 0x3333);
    let mut compared = 0;
    let mut excluded_tangent = 0;
    let mut steep = 0;
    let mut monotone = 0;
    while compared < 200 {
        let p = draw_params(&mut rng, HydrolysisMode::BiomassDependent);
        let report = multiplicity(&p).expect("multiplicity on valid draws");
        // The balance gap needs a defined break-even to be evaluable.
        if delta(&p, p.x0_in / p.alpha0 * 0.5).is_err() {
            continue;
        }
        let right = p.x0_in / p.alpha0;
        let points = 100_000usize;
        let mut sign_changes = 0;
        let mut min_abs = f64::INFINITY;
        let gap_at = |i: usize| {
            let x0 = right * (i as f64) / (points as f64 + 1.0);
            xi(&p, x0).unwrap() - delta(&p, x0).unwrap()
        };
        // The gap diverges to +inf at the left end of the open interval and
        // equals -delta(right) at the right end; folding those limits in
        // keeps the scan honest about roots between the boundary and the
        // first/last grid point.
        let mut prev = f64::INFINITY;
        for i in 1..=points {
            let v = gap_at(i);
            min_abs = min_abs.min(v.abs());
            if prev * v < 0.0 {
                sign_changes += 1;
            }
            prev = v;
        }
        let right_limit = -delta(&p, right).unwrap();
        if prev * right_limit < 0.0 && right_limit != 0.0 {
            sign_changes += 1;
        }
        if min_abs < 1e-8 || right_limit.abs() < 1e-8 {
            excluded_tangent += 1;
            continue;
        }
        let rates = p.removal_rates().unwrap();
        let kappa = p.k0 * p.mu0().unwrap().eval(right).unwrap() - p.k1 * rates.d1;
        if kappa > 0.0 {
            steep += 1;
        } else {
            monotone += 1;
        }
        assert_eq!(
            report.n, sign_changes,
            "root count {} vs grid count {} (kappa = {kappa:.3e}, case {:?})",
            report.n, sign_changes, report.case
        );
        compared += 1;
    }
    assert!(steep > 0 && monotone > 0, "both slope regimes must appear");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 20.0, "took {elapsed:?}");
    println!(
        "PASS multiplicity oracle: 200 draws match the 1e5-point grid count \
         ({steep} steep, {monotone} monotone, {excluded_tangent} tangency-adjacent excluded), {elapsed:?}"
    );
}

#[test]
fn acceptance_4_routh_identities() {
    let start = Instant::now();
    let suite = routh_suite(500, SEED);
    assert!(
        suite.failures.is_empty(),
        "{} Routh identity failures, first: {}",
        suite.failures.len(),
        suite.failures[0].detail
    );
    assert!(suite.branches_checked > 100, "too few persistence branches");
    let elapsed = start.elapsed();
    println!(
        "PASS Routh identities: {} branches, c4 forms within {:.3e} (<= 1e-9), \
         sign(c3) = sign(slope slack) throughout, {elapsed:?}",
        suite.branches_checked, suite.max_c4_discrepancy
    );
}

#[test]
fn acceptance_5_positivity_and_mass_envelope() {
    let start = Instant::now();
    let mut rng = seeded_rng(SEED ^ 0x5555);
    let mut done = 0;
    let mut filtered = 0;
    let mut worst_min = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    while done < 100 {
        let mode = if done % 2 == 0 {
            HydrolysisMode::FirstOrder
        } else {
            HydrolysisMode::BiomassDependent
        };
        let p = draw_params(&mut rng, mode);
        let x0 = draw_state(&mut rng);
        let rates = p.removal_rates().unwrap();
        let t_end = 50.0 / rates.d_min;
        if work_estimate(&p, t_end) > 2e5 {
            filtered += 1;
            continue;
        }
        let mut cfg = SimConfig::new(t_end);
        cfg.max_steps = 2_000_000;
        let traj = integrate(&p, &x0, &cfg).expect("integration completes");
        assert_eq!(traj.terminal, Terminal::Running, "budget exhausted");
        for st in &traj.states {
            let m = st.min_component();
            worst_min = worst_min.min(m);
            assert!(m >= -1e-10, "component undershoot {m:.3e}");
        }
        let z0 = traj.z_values[0];
        let check = check_omega(&traj, &p, 1e-6 * z0).unwrap();
        assert_eq!(
            check.violations, 0,
            "envelope exceeded by {:.3e} at t = {}",
            check.worst_excess, check.worst_time
        );
        worst_excess = worst_excess.max(check.worst_excess / z0);
        done += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "PASS dynamics invariants: 100 trajectories to t = 50/Dmin, min component \
         {worst_min:.3e} >= -1e-10, worst envelope excess {worst_excess:.3e} of Z(0) \
         ({filtered} stiff draws filtered), {elapsed:?}"
    );
}

fn numeric_verdict(eigs: &[num_complex::Complex<f64>]) -> Option<Verdict> {
    let max_re = eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let radius = eigs.iter().map(|e| e.norm()).fold(0.0f64, f64::max);
    if max_re.abs() <= 1e-9 * (1.0 + radius) {
        None
    } else if max_re < 0.0 {
        Some(Verdict::Stable)
    } else {
        Some(Verdict::Unstable)
    }
}

#[test]
fn acceptance_6_first_order_decoupling() {
    let start = Instant::now();
    let mut rng = seeded_rng(SEED ^ 0x6666);
    let mut done = 0;
    let mut verdicts = 0;
    let mut worst_gap = 0.0f64;
    while done < 50 {
        let p = draw_params(&mut rng, HydrolysisMode::FirstOrder);
        let rate = p.k_hyd().unwrap() + p.alpha0 * p.d;
        let t_end = 30.0 / rate;
        if work_estimate(&p, t_end) > 2e5 {
            continue;
        }
        let x0 = draw_state(&mut rng);
        let traj = integrate(&p, &x0, &SimConfig::new(t_end)).expect("integration completes");
        let x0_star = p.d * p.x0_in / rate;
        let gap = (traj.final_state().x0 - x0_star).abs();
        worst_gap = worst_gap.max(gap);
        assert!(gap <= 1e-6, "X0 missed its limit by {gap:.3e}");

        // Reduced four-dimensional spectrum decides stability identically.
        for rec in equilibria(&p).unwrap().iter().filter(|r| r.exists) {
            let st = rec.state.unwrap();
            let full = triad::linalg::eigenvalues_5x5(&jacobian(&p, &st).unwrap()).unwrap();
            let reduced = reduced4_eigenvalues(&p, &st).unwrap();
            if let (Some(a), Some(b)) = (numeric_verdict(&full), numeric_verdict(&reduced)) {
                assert_eq!(a, b, "{}: full {a:?} vs reduced {b:?}", rec.label);
                verdicts += 1;
            }
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "PASS first-order decoupling: 50 draws, |X0 - X0*| <= {worst_gap:.3e} (<= 1e-6), \
         {verdicts} full/reduced verdict pairs identical, {elapsed:?}"
    );
}

fn stable_records<'a>(
    p: &ModelParams<f64>,
    records: &'a [EquilibriumRecord<f64>],
) -> Vec<(&'a EquilibriumRecord<f64>, f64)> {
    records
        .iter()
        .filter(|r| r.exists)
        .filter_map(|r| {
            let v = classify(p, r).ok()?;
            (v.analytic == Verdict::Stable && v.numeric == Verdict::Stable)
                .then_some((r, v.max_real_part))
        })
        .collect()
}

#[test]
fn acceptance_7_dynamic_confirmation_of_stability() {
    let start = Instant::now();
    let mut rng = seeded_rng(SEED ^ 0x7777);
    let mut done = 0;
    let mut returns = 0;
    let mut attempts = 0;
    while done < 50 {
        attempts += 1;
        assert!(attempts < 60_000, "could not find 50 multistable draws");
        let mode = if attempts % 2 == 0 {
            HydrolysisMode::FirstOrder
        } else {
            HydrolysisMode::BiomassDependent
        };
        let p = draw_params(&mut rng, mode);
        let records = match equilibria(&p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let stables = stable_records(&p, &records);
        // Multistable-capable: at least two coexisting attractors, at
        // moderate scale, with real spectral margins.
        let rates = p.removal_rates().unwrap();
        if stables.len() < 2 {
            continue;
        }
        if stables.iter().any(|(r, margin)| {
            r.state.unwrap().inf_norm() > 20.0 || margin.abs() < 0.05 * rates.d_min
        }) {
            continue;
        }
        let chunk = 40.0 / rates.d_min;
        if work_estimate(&p, chunk * 8.0) > 4e5 {
            continue;
        }

        let mut cfg = SimConfig::new(chunk);
        cfg.rtol = 1e-10;
        cfg.atol = 1e-12;
        cfg.record_stride = 64;
        cfg.max_steps = 4_000_000;

        for (rec, _) in &stables {
            let eq = rec.state.unwrap();
            let mut state = eq;
            for v in [
                &mut state.x0,
                &mut state.s1,
                &mut state.x1,
                &mut state.s2,
                &mut state.x2,
            ] {
                *v += 1e-3;
            }
            let mut dist = f64::INFINITY;
            for _ in 0..8 {
                let traj = integrate(&p, &state, &cfg).expect("integration completes");
                state = *traj.final_state();
                dist = state.max_abs_diff(&eq);
                if dist <= 1e-6 {
                    break;
                }
            }
            assert!(
                dist <= 1e-6,
                "{}: perturbed start ended {dist:.3e} away",
                rec.label
            );
            returns += 1;
        }

        // A generic start must not settle on an unstable equilibrium.
        let span = records
            .iter()
            .filter_map(|r| r.state)
            .fold(1.0f64, |m, s| m.max(s.inf_norm()));
        let random_start = State::new(
            rng.gen_range(0.0..span),
            rng.gen_range(0.0..span),
            rng.gen_range(1e-6..span),
            rng.gen_range(0.0..span),
            rng.gen_range(1e-6..span),
        );
        let mut state = random_start;
        let mut terminal = Terminal::Running;
        for _ in 0..8 {
            let traj = integrate(&p, &state, &cfg).expect("integration completes");
            state = *traj.final_state();
            terminal = detect_convergence(&traj, &records, &p);
            if matches!(terminal, Terminal::ConvergedTo(_)) {
                break;
            }
        }
        if let Terminal::ConvergedTo(label) = terminal {
            let rec = records.iter().find(|r| r.label == label).unwrap();
            let verdict = classify(&p, rec).unwrap();
            assert_ne!(
                verdict.analytic,
                Verdict::Unstable,
                "generic start converged to unstable {label}"
            );
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "PASS dynamic stability confirmation: {returns} perturbed starts re-converged \
         (<= 1e-6) across 50 multistable draws; no generic start reached an unstable \
         equilibrium, {elapsed:?}"
    );
}

fn base_first_order() -> ModelParams<f64> {
    ModelParams {
        k0: 0.8,
        k1: 10.0,
        k2: 2.0,
        k3: 1.5,
        alpha0: 0.9,
        alpha1: 0.8,
        alpha2: 0.7,
        a1: 0.1,
        a2: 0.05,
        d: 0.5,
        x0_in: 5.0,
        s1_in: 2.0,
        s2_in: 1.0,
        mu1: GrowthCurve::monod(1.2, 7.1, KineticClass::Monotone).unwrap(),
        mu2: GrowthCurve::haldane(2.0, 1.0, 4.0).unwrap(),
        hydrolysis: Hydrolysis::FirstOrder { k_hyd: 1.2 },
    }
    .validated()
    .unwrap()
}

/// Break-even concentrations computed from the closed forms, test-side.
fn lambda1_monod(m: f64, k: f64, d1: f64) -> f64 {
    k * d1 / (m - d1)
}

fn lambda2_haldane(m: f64, k: f64, ki: f64, d2: f64) -> (f64, f64) {
    let b = ki * (d2 - m) / d2;
    let disc = (b * b - 4.0 * k * ki).sqrt();
    let high = 0.5 * (-b + disc);
    (k * ki / high, high)
}

/// Location of the signature change along a 1D scan in x.
fn boundary_crossings(grid: &DiagramGrid<f64>) -> Vec<f64> {
    grid.cells
        .windows(2)
        .filter(|w| w[0].signature != w[1].signature)
        .map(|w| 0.5 * (w[0].x + w[1].x))
        .collect()
}

fn scan_1d(
    base: ModelParams<f64>,
    axis: ParamAxis,
    lo: f64,
    hi: f64,
    n: usize,
) -> DiagramGrid<f64> {
    // The y axis is held at its base value with a single grid line.
    let (axis_y, y0) = if axis == ParamAxis::Dilution {
        (ParamAxis::S2In, base.s2_in)
    } else {
        (ParamAxis::Dilution, base.d)
    };
    scan(&ScanSpec {
        axis_x: axis,
        axis_y,
        x_range: (lo, hi),
        y_range: (y0, y0),
        nx: n,
        ny: 1,
        base,
    })
    .unwrap()
}

#[test]
fn acceptance_8_diagram_thresholds() {
    let start = Instant::now();
    let p = base_first_order();
    let rates = p.removal_rates().unwrap();
    let (m2, k2c, ki2) = match p.mu2.kind() {
        CurveKind::Haldane { m, k, ki } => (m, k, ki),
        _ => unreachable!(),
    };
    let (m1, k1c) = match p.mu1.kind() {
        CurveKind::Monod { m, k } => (m, k),
        _ => unreachable!(),
    };
    let l1 = lambda1_monod(m1, k1c, rates.d1);
    let (l2_low, _) = lambda2_haldane(m2, k2c, ki2, rates.d2);
    let k_hyd = p.k_hyd().unwrap();
    let shift = p.k0 * k_hyd * p.x0_in / (k_hyd + p.alpha0 * p.d);

    let n = 201usize;
    let assert_one_crossing_near = |grid: &DiagramGrid<f64>, threshold: f64, what: &str| {
        let width = (grid.cells[1].x - grid.cells[0].x).abs();
        let crossings = boundary_crossings(grid);
        let near: Vec<_> = crossings
            .iter()
            .filter(|&&c| (c - threshold).abs() <= width)
            .collect();
        assert!(
            !near.is_empty(),
            "{what}: no signature change within {width:.3e} of {threshold:.6} \
             (crossings at {crossings:?})"
        );
    };

    // Methanogen appearance: S2in through lambda2_low.
    let grid = scan_1d(p.clone(), ParamAxis::S2In, 0.2 * l2_low, 2.0 * l2_low, n);
    assert_one_crossing_near(&grid, l2_low, "S2in = lambda2_low");

    // Acidogen persistence: S1in through lambda1 - hydrolysis shift.
    let threshold = l1 - shift;
    assert!(threshold > 0.0, "setup: effective threshold positive");
    let grid = scan_1d(
        p.clone(),
        ParamAxis::S1In,
        0.5 * threshold,
        1.5 * threshold,
        n,
    );
    assert_one_crossing_near(&grid, threshold, "S1in* = lambda1");

    // Coexistence: S2in through H_low - (k2/k1) S1in*.
    let mut pc = base_first_order();
    pc.s1_in = 2.8;
    let pc = pc.validated().unwrap();
    let s1s = effective_s1_in(&pc).unwrap();
    assert!(s1s > l1, "setup: persistence holds");
    let h_low = l2_low + pc.k2 / pc.k1 * l1;
    let threshold = h_low - pc.k2 / pc.k1 * s1s;
    assert!(threshold > 0.0, "setup: coexistence threshold positive");
    let grid = scan_1d(
        pc.clone(),
        ParamAxis::S2In,
        0.2 * threshold,
        1.8 * threshold,
        n,
    );
    let width = (grid.cells[1].x - grid.cells[0].x).abs();
    let flip = grid
        .cells
        .windows(2)
        .find(|w| !w[0].signature.contains("E11:") && w[1].signature.contains("E11:"))
        .expect("coexistence branch appears in the scan");
    let mid = 0.5 * (flip[0].x + flip[1].x);
    assert!(
        (mid - threshold).abs() <= width,
        "E11 appearance at {mid:.6} vs threshold {threshold:.6} (width {width:.3e})"
    );

    // Biomass-dependent variant: S1in through the tangency threshold and
    // lambda1, stepping the root count 0 -> 2 -> 1.
    let pb = ModelParams {
        s1_in: 6.0,
        hydrolysis: Hydrolysis::BiomassDependent {
            mu0: GrowthCurve::monod(8.0, 1.0, KineticClass::Concave).unwrap(),
        },
        ..base_first_order()
    }
    .validated()
    .unwrap();
    // Independent tangency threshold: bisect xi' = delta' with local
    // formulas, then assemble the inflow level.
    let s1_bar = {
        let right = pb.x0_in / pb.alpha0;
        let mu0 = |x: f64| 8.0 * x / (1.0 + x);
        let dmu0 = |x: f64| 8.0 / ((1.0 + x) * (1.0 + x));
        let xi_l = |x: f64| pb.d * (pb.x0_in - pb.alpha0 * x) / mu0(x);
        let xi_p = |x: f64| -pb.alpha0 * pb.d / mu0(x) - xi_l(x) * dmu0(x) / mu0(x);
        let slope = -pb.alpha0 * pb.d * pb.k0 / (pb.k1 * rates.d1);
        let (mut lo, mut hi) = (1e-9 * right, right);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if xi_p(mid) - slope < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let xb = 0.5 * (lo + hi);
        l1 + pb.k1 * rates.d1 / pb.d * xi_l(xb) - pb.k0 * (pb.x0_in - pb.alpha0 * xb)
    };
    assert!(
        s1_bar > 0.0 && s1_bar < l1,
        "setup: tangency threshold {s1_bar:.6} inside (0, {l1:.6})"
    );
    let grid = scan_1d(pb.clone(), ParamAxis::S1In, 0.5 * s1_bar, 1.2 * l1, 401);
    let width = (grid.cells[1].x - grid.cells[0].x).abs();
    let mut steps = Vec::new();
    for w in grid.cells.windows(2) {
        if w[0].n_value != w[1].n_value {
            steps.push((
                w[0].n_value.unwrap(),
                w[1].n_value.unwrap(),
                0.5 * (w[0].x + w[1].x),
            ));
        }
    }
    assert_eq!(
        steps.iter().map(|s| (s.0, s.1)).collect::<Vec<_>>(),
        vec![(0, 2), (2, 1)],
        "root count must step 0 -> 2 -> 1, got {steps:?}"
    );
    assert!(
        (steps[0].2 - s1_bar).abs() <= width,
        "tangency crossing at {:.6} vs {s1_bar:.6}",
        steps[0].2
    );
    assert!(
        (steps[1].2 - l1).abs() <= width,
        "persistence crossing at {:.6} vs {l1:.6}",
        steps[1].2
    );

    let elapsed = start.elapsed();
    println!(
        "PASS diagram thresholds: signature changes within one cell of \
         lambda2_low, lambda1 - shift, H_low - (k2/k1) S1in*, S1in_bar and lambda1, {elapsed:?}"
    );
}

/// Routh data stays available through the public per-branch entry point.
#[test]
fn acceptance_routh_reachable_from_records() {
    let p = ModelParams {
        s1_in: 6.0,
        hydrolysis: Hydrolysis::BiomassDependent {
            mu0: GrowthCurve::monod(8.0, 1.0, KineticClass::Concave).unwrap(),
        },
        ..base_first_order()
    }
    .validated()
    .unwrap();
    for rec in equilibria(&p).unwrap().iter().filter(|r| r.exists) {
        if rec.label.x1_persists {
            let st = rec.state.unwrap();
            let r = routh_from_branch(&p, st.x0, st.x1).unwrap();
            assert!(r.c1 > 0.0);
        }
    }
}
