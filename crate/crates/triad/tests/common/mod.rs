//! Shared test oracles, independent of the library's solution paths.

use num_complex::Complex64;

/// Monic characteristic polynomial coefficients `[c1, ..., c5]` of a 5x5
/// matrix (`p(x) = x^5 + c1 x^4 + ... + c5`), by the Faddeev-LeVerrier
/// recursion.
pub fn char_poly5(a: &[[f64; 5]; 5]) -> [f64; 5] {
    let mul = |x: &[[f64; 5]; 5], y: &[[f64; 5]; 5]| {
        let mut out = [[0.0; 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for k in 0..5 {
                    s += x[i][k] * y[k][j];
                }
                out[i][j] = s;
            }
        }
        out
    };
    let trace = |x: &[[f64; 5]; 5]| (0..5).map(|i| x[i][i]).sum::<f64>();
    let mut coeffs = [0.0; 5];
    let mut m = *a;
    for step in 0..5 {
        let c = -trace(&m) / (step as f64 + 1.0);
        coeffs[step] = c;
        if step == 4 {
            break;
        }
        let mut shifted = m;
        for i in 0..5 {
            shifted[i][i] += c;
        }
        m = mul(a, &shifted);
    }
    coeffs
}

/// All roots of a monic polynomial given by `coeffs = [c1, ..., cn]`
/// (`p(x) = x^n + c1 x^(n-1) + ... + cn`), by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let eval = |z: Complex64| {
        let mut v = Complex64::new(1.0, 0.0);
        for &c in coeffs {
            v = v * z + Complex64::new(c, 0.0);
        }
        v
    };
    // Radius bound keeps the start points around the root annulus.
    let radius = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9) / Complex64::new(0.4, 0.9).norm() * radius.min(1e6);
    let mut roots: Vec<Complex64> = (0..n).map(|j| seed.powu(j as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            if denom.norm() == 0.0 {
                // Perturb coincident iterates.
                roots[j] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(roots[j]) / denom;
            roots[j] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Matches two spectra, requiring each expected value to be hit once within
/// `tol * (scale + |value|)`. `scale` should reflect the spectral radius;
/// a characteristic-polynomial oracle cannot certify small eigenvalues of a
/// large-norm matrix beyond that resolution.
pub fn assert_spectra_match(
    got: &[Complex64],
    expected: &[Complex64],
    tol: f64,
    scale: f64,
    context: &str,
) {
    assert_eq!(got.len(), expected.len(), "{context}: cardinality");
    let mut used = vec![false; expected.len()];
    for g in got {
        let mut best: Option<(usize, f64)> = None;
        for (i, e) in expected.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (g - e).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.expect("spectrum not empty");
        assert!(
            d <= tol * (scale + expected[i].norm()),
            "{context}: eigenvalue {g} is {d:.3e} from nearest expected {}",
            expected[i]
        );
        used[i] = true;
    }
}

/// Dense spectrum of a 5x5 matrix: balance by the largest entry, solve the
/// characteristic polynomial, unscale the roots.
pub fn dense_spectrum(a: &[[f64; 5]; 5]) -> (Vec<Complex64>, f64) {
    let s = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut scaled = *a;
    for row in &mut scaled {
        for v in row {
            *v /= s;
        }
    }
    let roots = poly_roots(&char_poly5(&scaled))
        .into_iter()
        .map(|r| r * s)
        .collect();
    (roots, s)
}
