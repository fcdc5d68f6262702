//! Small dense linear algebra for the 5x5 Jacobians.
//!
//! The cascade structure of the model makes every equilibrium Jacobian block
//! lower triangular: a 3x3 block for `(X0, S1, X1)`, a 2x2 block for
//! `(S2, X2)`, and zeros above the coupling block. The spectrum is therefore
//! the union of a cubic and a quadratic root set, both solved in closed form
//! (trigonometric/Cardano for the cubic) with a Newton polish on the
//! characteristic polynomial.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Dense 5x5 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix5<T>(pub [[T; 5]; 5]);

impl<T: Scalar> Matrix5<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); 5]; 5])
    }

    /// Upper-left 3x3 block (hydrolysate and acidogenic variables).
    pub fn block_upper(&self) -> [[T; 3]; 3] {
        let m = &self.0;
        [
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ]
    }

    /// Lower-right 2x2 block (methanogenic variables).
    pub fn block_lower(&self) -> [[T; 2]; 2] {
        let m = &self.0;
        [[m[3][3], m[3][4]], [m[4][3], m[4][4]]]
    }

    /// Checks the structural zeros of the cascade: rows 0..3, columns 3..5.
    pub fn check_block_pattern(&self) -> Result<()> {
        for row in 0..3 {
            for col in 3..5 {
                if self.0[row][col] != T::zero() {
                    return Err(Error::BlockPattern {
                        row,
                        col,
                        value: self.0[row][col].to_f64_lossy(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Roots of `x^2 + b x + c`, accurate for real and complex pairs.
pub fn quadratic_roots<T: Scalar>(b: T, c: T) -> [Complex<T>; 2] {
    let zero = T::zero();
    let half = lit::<T>(0.5);
    let disc = b * b - lit::<T>(4.0) * c;
    if disc >= zero {
        let s = disc.sqrt();
        // Compute the larger-magnitude root first to avoid cancellation.
        let q = if b >= zero {
            -half * (b + s)
        } else {
            -half * (b - s)
        };
        if q == zero {
            // b and disc both vanished, so c = 0 as well.
            return [Complex::new(zero, zero); 2];
        }
        [Complex::new(q, zero), Complex::new(c / q, zero)]
    } else {
        let re = -half * b;
        let im = half * (-disc).sqrt();
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}

/// Roots of the monic cubic `x^3 + a x^2 + b x + c`.
pub fn cubic_roots<T: Scalar>(a: T, b: T, c: T) -> [Complex<T>; 3] {
    let zero = T::zero();
    let one = T::one();
    // Balance the coefficients so the depressed-cubic arithmetic runs at
    // magnitude one regardless of the Jacobian scale.
    let scale = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt()).max(one);
    let (a, b, c) = (a / scale, b / (scale * scale), c / (scale * scale * scale));

    let third = one / lit::<T>(3.0);
    let half = lit::<T>(0.5);
    let shift = a * third;
    let p = b - a * a * third;
    let q = (lit::<T>(2.0) * a * a * a - lit::<T>(9.0) * a * b) / lit::<T>(27.0) + c;

    let disc = (half * q) * (half * q) + (p * third) * (p * third) * (p * third);

    let mut roots = if disc > zero {
        // One real root; pick the cancellation-free Cardano branch.
        let sq = disc.sqrt();
        let big = if q >= zero {
            -half * q - sq
        } else {
            -half * q + sq
        };
        let u = big.cbrt();
        let v = if u == zero { zero } else { -p * third / u };
        let t1 = u + v;
        // Deflate: t^2 + t1 t + (t1^2 + p) has the remaining pair.
        let pair = quadratic_roots(t1, t1 * t1 + p);
        [Complex::new(t1, zero), pair[0], pair[1]]
    } else if p < zero {
        // Three real roots via the trigonometric form.
        let m = lit::<T>(2.0) * (-p * third).sqrt();
        let arg = (lit::<T>(3.0) * q / (p * m)).max(-one).min(one);
        let theta = arg.acos() * third;
        let tau = lit::<T>(2.0) * lit::<T>(std::f64::consts::PI) * third;
        [
            Complex::new(m * theta.cos(), zero),
            Complex::new(m * (theta - tau).cos(), zero),
            Complex::new(m * (theta + tau).cos(), zero),
        ]
    } else {
        // disc <= 0 with p >= 0 forces p = q = 0: triple root.
        [Complex::new(zero, zero); 3]
    };

    for r in &mut roots {
        *r = *r - Complex::new(shift, zero);
        *r = polish_cubic(*r, a, b, c);
        *r = *r * scale;
    }
    roots
}

/// A couple of Newton steps on the monic cubic; skipped near multiple roots
/// where the derivative degenerates.
fn polish_cubic<T: Scalar>(mut x: Complex<T>, a: T, b: T, c: T) -> Complex<T> {
    let ca = Complex::new(a, T::zero());
    let cb = Complex::new(b, T::zero());
    let cc = Complex::new(c, T::zero());
    let three = Complex::new(lit::<T>(3.0), T::zero());
    let two = Complex::new(lit::<T>(2.0), T::zero());
    for _ in 0..2 {
        let f = ((x + ca) * x + cb) * x + cc;
        let df = (three * x + two * ca) * x + cb;
        if df.norm() <= lit::<T>(1e-3) * T::epsilon() {
            break;
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        x = x - step;
    }
    x
}

/// Eigenvalues of a 2x2 block.
pub fn eig2<T: Scalar>(m: &[[T; 2]; 2]) -> [Complex<T>; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    quadratic_roots(-tr, det)
}

/// Eigenvalues of a 3x3 block via its characteristic cubic.
pub fn eig3<T: Scalar>(m: &[[T; 3]; 3]) -> [Complex<T>; 3] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[1][1] * m[2][2] - m[1][2] * m[2][1] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[0][0] * m[1][1]
        - m[0][1] * m[1][0];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    cubic_roots(-tr, minors, -det)
}

/// Residual of `lambda` against the characteristic polynomial of a block,
/// scaled by the block magnitude and `(1 + |lambda|)^n`.
fn char_residual_ok<T: Scalar>(coeffs: &[T], lambda: Complex<T>, tol: T) -> bool {
    // coeffs are [a_{n-1}, ..., a_0] of a monic polynomial.
    let one = T::one();
    let mut value = Complex::new(one, T::zero());
    for &c in coeffs {
        value = value * lambda + Complex::new(c, T::zero());
    }
    let degree = coeffs.len() as i32;
    let scale = (one + lambda.norm()).powi(degree)
        * coeffs.iter().fold(one, |m, c| m.max(c.abs()).max(one));
    value.norm() <= tol * scale
}

/// Sorted eigenvalues (descending real part) of a block lower triangular
/// 5x5 matrix: the union of the 3x3 and 2x2 block spectra.
pub fn eigenvalues_5x5<T: Scalar>(m: &Matrix5<T>) -> Result<[Complex<T>; 5]> {
    m.check_block_pattern()?;
    let upper = m.block_upper();
    let lower = m.block_lower();
    let e3 = eig3(&upper);
    let e2 = eig2(&lower);

    let tol = lit::<T>(1e-8);
    let tr = upper[0][0] + upper[1][1] + upper[2][2];
    let minors = upper[1][1] * upper[2][2] - upper[1][2] * upper[2][1] + upper[0][0] * upper[2][2]
        - upper[0][2] * upper[2][0]
        + upper[0][0] * upper[1][1]
        - upper[0][1] * upper[1][0];
    let det = upper[0][0] * (upper[1][1] * upper[2][2] - upper[1][2] * upper[2][1])
        - upper[0][1] * (upper[1][0] * upper[2][2] - upper[1][2] * upper[2][0])
        + upper[0][2] * (upper[1][0] * upper[2][1] - upper[1][1] * upper[2][0]);
    for &l in &e3 {
        if !char_residual_ok(&[-tr, minors, -det], l, tol) {
            return Err(Error::RootSolve(format!(
                "cubic eigenvalue {l} fails the characteristic residual check"
            )));
        }
    }
    let tr2 = lower[0][0] + lower[1][1];
    let det2 = lower[0][0] * lower[1][1] - lower[0][1] * lower[1][0];
    for &l in &e2 {
        if !char_residual_ok(&[-tr2, det2], l, tol) {
            return Err(Error::RootSolve(format!(
                "quadratic eigenvalue {l} fails the characteristic residual check"
            )));
        }
    }

    let mut all = [e3[0], e3[1], e3[2], e2[0], e2[1]];
    sort_desc_by_real(&mut all);
    Ok(all)
}

pub fn sort_desc_by_real<T: Scalar>(eigs: &mut [Complex<T>]) {
    eigs.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
