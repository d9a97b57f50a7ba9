//! Truncated powers, basic splines and their antiderivatives, plus the two
//! integral reconstructions of a divided difference they enable.

use num_complex::Complex64;

use crate::divdiff::{divided_difference, KnotMultiset};
use crate::error::{Error, Result};
use crate::factorial;
use crate::funcspace::{Differentiable, SmoothFunction};
use crate::piecewise::PiecewisePolynomial;

/// `x_+^k`, with `0_+^0 = 1`.
pub fn truncated_power(x: f64, k: usize) -> f64 {
    if x >= 0.0 {
        x.powi(k as i32)
    } else {
        0.0
    }
}

/// `λ ↦ (λ - shift)_+^exponent`, seen as a function of `λ`.
///
/// Its jets are exact at every `λ ≠ shift`, which is all a divided difference
/// needs when `shift` is not a knot.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedTruncatedPower {
    pub shift: f64,
    pub exponent: usize,
}

impl Differentiable for ShiftedTruncatedPower {
    fn derivative(&self, x: f64, j: usize) -> Result<Complex64> {
        let d = x - self.shift;
        if d < 0.0 || j > self.exponent {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ff = ((self.exponent - j + 1)..=self.exponent).fold(1.0, |a, m| a * m as f64);
        Ok(Complex64::new(ff * d.powi((self.exponent - j) as i32), 0.0))
    }
}

/// `t ↦ Δ^{(p)}_{knots}((λ - t)_+^exponent)` for `exponent ∈ {p-1, p}`.
///
/// Between consecutive distinct knot values the map is a polynomial of degree
/// at most `exponent`; each piece is recovered by interpolating the confluent
/// divided difference at `exponent + 1` Chebyshev points of the interval.
pub fn truncated_power_spline(
    knots: &KnotMultiset,
    exponent: usize,
) -> Result<PiecewisePolynomial> {
    let p = knots.order();
    if exponent > p || exponent + 1 < p {
        return Err(Error::InvalidPiecewise(format!(
            "exponent {exponent} not supported for order {p}"
        )));
    }
    // Left of every knot the kernel is a degree-`exponent` polynomial in λ, so
    // the order-p difference is its λ^p coefficient: 1 when exponent = p.
    let left = Complex64::new(if exponent == p { 1.0 } else { 0.0 }, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let values: Vec<f64> = knots.distinct().into_iter().map(|(x, _)| x).collect();
    if values.len() == 1 {
        return Ok(PiecewisePolynomial::step(values[0], left, zero));
    }
    let pieces = values
        .windows(2)
        .map(|w| interpolate_piece(knots, exponent, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    PiecewisePolynomial::new(values, pieces, left, zero)
}

/// Monomial coefficients in `t - lo` of the degree-`degree` interpolant of
/// the kernel on `(lo, hi)`.
fn interpolate_piece(
    knots: &KnotMultiset,
    degree: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<Complex64>> {
    let n = degree + 1;
    let len = hi - lo;
    // Chebyshev points of the first kind in the unit variable u = (t - lo) / len.
    let us: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect();
    let mut dd = Vec::with_capacity(n);
    for &u in &us {
        let kernel = ShiftedTruncatedPower {
            shift: lo + u * len,
            exponent: degree,
        };
        dd.push(divided_difference(&kernel, knots)?);
    }
    // Newton form in u, then expand to monomials.
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (us[i] - us[i - j]);
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n).rev() {
        // coeffs <- coeffs * (u - us[j]) + dd[j]
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for (m, &c) in coeffs.iter().enumerate().take(n - 1) {
            next[m + 1] += c;
            next[m] -= c * us[j];
        }
        next[0] += dd[j];
        coeffs = next;
    }
    let mut scale = 1.0;
    for c in coeffs.iter_mut() {
        *c /= scale;
        scale *= len;
    }
    Ok(coeffs)
}

/// `t ↦ Δ^{(p)}((λ - t)_+^{p-1})`, nonnegative with integral `1/p`.
pub fn basic_spline(knots: &KnotMultiset) -> Result<PiecewisePolynomial> {
    let p = knots.order();
    if p < 1 {
        return Err(Error::OrderTooSmall { order: p, min: 1 });
    }
    if knots.all_equal() {
        return Err(Error::AllKnotsEqual);
    }
    truncated_power_spline(knots, p - 1)
}

/// `t ↦ Δ^{(p)}((λ - t)_+^p)`: decreasing from 1 to 0 across the knot hull.
pub fn spline_antiderivative(knots: &KnotMultiset) -> Result<PiecewisePolynomial> {
    truncated_power_spline(knots, knots.order())
}

/// Divided difference through its Peano kernel:
/// `(1/(p-1)!) ∫ f^{(p)} B`, or `f^{(p)}(λ)/p!` when all knots coincide.
pub fn dd_via_peano(f: &SmoothFunction, knots: &KnotMultiset) -> Result<Complex64> {
    let p = knots.order();
    if knots.all_equal() {
        return Ok(f.eval_derivative(knots.knots()[0], p)? / factorial(p));
    }
    let b = basic_spline(knots)?;
    Ok(b.integrate_against(f, p)? / factorial(p - 1))
}

/// Divided difference through the antiderivative spline:
/// `(1/p!) f^{(p)}(a) + (1/p!) ∫_a^b f^{(p+1)}(t) Δ^{(p)}((λ-t)_+^p) dt`.
pub fn dd_via_antiderivative(f: &SmoothFunction, knots: &KnotMultiset) -> Result<Complex64> {
    let p = knots.order();
    let (a, b) = (knots.min(), knots.max());
    let spline = spline_antiderivative(knots)?;
    let boundary = f.eval_derivative(a, p)?;
    let body = spline.integrate_against_over(f, p + 1, a, b)?;
    Ok((boundary + body) / factorial(p))
}
