//! Real roots of `a x³ + b x² + c x + d = 0`.
//!
//! Uses the shifted form `x = ∛(q + √(q² + (r − p²)³)) + ∛(q − √(…)) + p`
//! with `p = −b/3a`, `q = p³ + (bc − 3ad)/6a²`, `r = c/3a`. When
//! `q² + (r − p²)³ < 0` all three roots are real and the radicals are taken
//! through the trigonometric form. `a = 0` falls back to quadratic or linear
//! solving.

use crate::error::{Error, Result};

/// Shifted-cubic parameters `(p, q, r)` for `a ≠ 0`.
pub fn shift_params(a: f64, b: f64, c: f64, d: f64) -> (f64, f64, f64) {
    let p = -b / (3.0 * a);
    let q = p * p * p + (b * c - 3.0 * a * d) / (6.0 * a * a);
    let r = c / (3.0 * a);
    (p, q, r)
}

fn eval(coeffs: [f64; 4], x: f64) -> f64 {
    ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3]
}

fn deriv(coeffs: [f64; 4], x: f64) -> f64 {
    (3.0 * coeffs[0] * x + 2.0 * coeffs[1]) * x + coeffs[2]
}

/// A few Newton steps, kept only while they shrink the residual.
fn polish(coeffs: [f64; 4], mut x: f64) -> f64 {
    let mut fx = eval(coeffs, x).abs();
    for _ in 0..4 {
        let dfx = deriv(coeffs, x);
        if dfx == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - eval(coeffs, x) / dfx;
        let fn_ = eval(coeffs, next).abs();
        if !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a), -b / (2.0 * a)];
    }
    // avoids cancellation between -b and the square root
    let t = -0.5 * (b + disc.sqrt().copysign(b));
    let mut roots = vec![t / a, c / t];
    roots.sort_by(f64::total_cmp);
    roots
}

/// All real roots in ascending order, repeated roots listed with their
/// multiplicity when the three-real-root branch detects them.
pub fn real_roots(a: f64, b: f64, c: f64, d: f64) -> Result<Vec<f64>> {
    let coeffs = [a, b, c, d];
    if coeffs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("cubic coefficients must be finite"));
    }
    let largest = coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if largest == 0.0 {
        return Err(Error::invalid("all cubic coefficients are zero"));
    }
    // power-of-two scaling is exact
    let scale = largest.log2().round().exp2();
    let [a, b, c, d] = coeffs.map(|x| x / scale);
    if a == 0.0 {
        return Ok(quadratic_roots(b, c, d));
    }
    let (p, q, r) = shift_params(a, b, c, d);
    let m = p * p - r;
    let disc = q * q - m * m * m;
    let norm = [a, b, c, d];
    // rounding can push a repeated-root discriminant just above zero
    let one_real = disc > 1e-14 * (q * q).max((m * m * m).abs());
    let mut roots = if one_real {
        let s = disc.sqrt();
        let u = (q + s.copysign(q)).cbrt();
        // u·v = p² − r
        let v = if u == 0.0 { 0.0 } else { m / u };
        vec![u + v + p]
    } else if m <= 0.0 {
        vec![p, p, p]
    } else {
        let sm = m.sqrt();
        let cos3 = (q / (m * sm)).clamp(-1.0, 1.0);
        let theta = cos3.acos() / 3.0;
        let third = std::f64::consts::TAU / 3.0;
        (0..3)
            .map(|j| p + 2.0 * sm * (theta - third * j as f64).cos())
            .collect()
    };
    for x in roots.iter_mut() {
        *x = polish(norm, *x);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}
