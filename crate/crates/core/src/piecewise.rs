//! Exact piecewise-polynomial calculus.
//!
//! A [`PiecewisePolynomial`] is a right-continuous function that is constant
//! left of its first breakpoint and right of its last one, and polynomial on
//! each half-open interval `[b_k, b_{k+1})` in the local variable `t - b_k`.
//! Splines, Krein's function, counting functions and the densities `eta_p`
//! all live in this representation, so sums and antiderivatives stay exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{Differentiable, SmoothFunction};
use crate::quadrature::gl24;

/// Longest panel handed to the 24-point rule; longer intervals are subdivided.
const MAX_PANEL: f64 = 0.5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRecord")]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<Complex64>>,
    left_value: Complex64,
    right_value: Complex64,
}

/// Unvalidated serialized form; complex numbers are `[re, im]` pairs.
#[derive(Deserialize)]
struct PiecewiseRecord {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<Complex64>>,
    left_value: Complex64,
    right_value: Complex64,
}

impl TryFrom<PiecewiseRecord> for PiecewisePolynomial {
    type Error = Error;

    fn try_from(r: PiecewiseRecord) -> Result<Self> {
        Self::new(r.breakpoints, r.pieces, r.left_value, r.right_value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Segment {
    Left,
    Piece(usize),
    Right,
}

impl PiecewisePolynomial {
    pub fn new(
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<Complex64>>,
        left_value: Complex64,
        right_value: Complex64,
    ) -> Result<Self> {
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPiecewise("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPiecewise(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if pieces.len() != breakpoints.len().saturating_sub(1) {
            return Err(Error::InvalidPiecewise(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.is_empty() && left_value != right_value {
            return Err(Error::InvalidPiecewise(
                "a function without breakpoints must be constant".into(),
            ));
        }
        let pieces = pieces
            .into_iter()
            .map(|p| if p.is_empty() { vec![ZERO] } else { p })
            .collect();
        Ok(Self {
            breakpoints,
            pieces,
            left_value,
            right_value,
        })
    }

    pub fn constant(value: Complex64) -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
            left_value: value,
            right_value: value,
        }
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// `left` for `t < at`, `right` for `t ≥ at`.
    pub fn step(at: f64, left: Complex64, right: Complex64) -> Self {
        Self {
            breakpoints: vec![at],
            pieces: Vec::new(),
            left_value: left,
            right_value: right,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Complex64>] {
        &self.pieces
    }

    pub fn left_value(&self) -> Complex64 {
        self.left_value
    }

    pub fn right_value(&self) -> Complex64 {
        self.right_value
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    /// `[b_0, b_K]`, or `None` for a constant.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    fn locate(&self, t: f64) -> Segment {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 {
            Segment::Left
        } else if idx == self.breakpoints.len() {
            Segment::Right
        } else {
            Segment::Piece(idx - 1)
        }
    }

    /// Polynomial of `segment` re-centred at `t0`.
    fn local_poly(&self, segment: Segment, t0: f64) -> Vec<Complex64> {
        match segment {
            Segment::Left => vec![self.left_value],
            Segment::Right => vec![self.right_value],
            Segment::Piece(k) => taylor_shift(&self.pieces[k], t0 - self.breakpoints[k]),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match self.locate(t) {
            Segment::Left => self.left_value,
            Segment::Right => self.right_value,
            Segment::Piece(k) => horner(&self.pieces[k], t - self.breakpoints[k]),
        }
    }

    pub fn sample(&self, grid: &[f64]) -> Vec<Complex64> {
        grid.iter().map(|&t| self.eval(t)).collect()
    }

    /// Exact `Σ a_j P_j` on the merged breakpoint set.
    pub fn linear_combination(terms: &[(Complex64, &PiecewisePolynomial)]) -> Self {
        let mut merged: Vec<f64> = terms
            .iter()
            .flat_map(|(_, p)| p.breakpoints.iter().copied())
            .collect();
        merged.sort_by(f64::total_cmp);
        merged.dedup();
        let left_value = terms.iter().map(|(a, p)| a * p.left_value).sum();
        let right_value = terms.iter().map(|(a, p)| a * p.right_value).sum();
        if merged.is_empty() {
            return Self::constant(left_value);
        }
        let pieces = merged
            .windows(2)
            .map(|w| {
                let t0 = w[0];
                let mut acc: Vec<Complex64> = Vec::new();
                for (a, p) in terms {
                    let local = p.local_poly(p.locate(t0), t0);
                    if acc.len() < local.len() {
                        acc.resize(local.len(), ZERO);
                    }
                    for (slot, c) in acc.iter_mut().zip(local) {
                        *slot += a * c;
                    }
                }
                acc
            })
            .collect();
        Self {
            breakpoints: merged,
            pieces,
            left_value,
            right_value,
        }
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|c| a * c).collect())
                .collect(),
            left_value: a * self.left_value,
            right_value: a * self.right_value,
        }
    }

    /// The same function with both tails replaced by zero.
    ///
    /// Used for densities known to be supported on `[b_0, b_K]`, where the
    /// computed tails are only round-off.
    pub fn with_zero_tails(&self) -> Self {
        Self {
            left_value: ZERO,
            right_value: ZERO,
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.clone(),
        }
        .normalized_constant()
    }

    fn normalized_constant(self) -> Self {
        if self.breakpoints.is_empty() && self.left_value != self.right_value {
            Self::constant(self.left_value)
        } else {
            self
        }
    }

    fn require_zero_tails(&self) -> Result<()> {
        if self.left_value != ZERO {
            return Err(Error::NonzeroTail {
                side: "left",
                value: self.left_value.norm(),
            });
        }
        if self.right_value != ZERO {
            return Err(Error::NonzeroTail {
                side: "right",
                value: self.right_value.norm(),
            });
        }
        Ok(())
    }

    /// `t ↦ ∫_{-∞}^t P(s) ds`; both tails of `P` must vanish.
    pub fn cumulative(&self) -> Result<Self> {
        self.require_zero_tails()?;
        if self.breakpoints.is_empty() {
            return Ok(Self::zero());
        }
        let mut acc = ZERO;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (k, p) in self.pieces.iter().enumerate() {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(acc);
            q.extend(p.iter().enumerate().map(|(j, c)| c / (j as f64 + 1.0)));
            let len = self.breakpoints[k + 1] - self.breakpoints[k];
            acc = horner(&q, len);
            pieces.push(q);
        }
        Ok(Self {
            breakpoints: self.breakpoints.clone(),
            pieces,
            left_value: ZERO,
            right_value: acc,
        })
    }

    /// Sub-intervals of `[a, b]` that each lie inside one segment.
    fn panels(&self, a: f64, b: f64) -> Vec<(f64, f64, Segment)> {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[0], w[1], self.locate(w[0])))
            .collect()
    }

    /// Exact `∫_a^b P(t) dt`, tails included as constants.
    pub fn integral_between(&self, a: f64, b: f64) -> Complex64 {
        if b < a {
            return -self.integral_between(b, a);
        }
        self.panels(a, b)
            .into_iter()
            .map(|(u, v, seg)| {
                let poly = self.local_poly(seg, u);
                let len = v - u;
                let mut pw = len;
                let mut acc = ZERO;
                for (j, c) in poly.iter().enumerate() {
                    acc += c * pw / (j as f64 + 1.0);
                    pw *= len;
                }
                acc
            })
            .sum()
    }

    /// `∫_ℝ P`; both tails must vanish.
    pub fn integral(&self) -> Result<Complex64> {
        self.require_zero_tails()?;
        Ok(match self.span() {
            Some((a, b)) => self.integral_between(a, b),
            None => ZERO,
        })
    }

    /// `∫_a^b f^{(k)}(t) P(t) dt` by 24-point Gauss–Legendre on every panel.
    pub fn integrate_against_over<F: Differentiable + ?Sized>(
        &self,
        f: &F,
        k: usize,
        a: f64,
        b: f64,
    ) -> Result<Complex64> {
        if b < a {
            return Ok(-self.integrate_against_over(f, k, b, a)?);
        }
        let rule = gl24();
        let mut total = ZERO;
        for (u, v, seg) in self.panels(a, b) {
            let poly = self.local_poly(seg, u);
            let count = ((v - u) / MAX_PANEL).ceil().max(1.0) as usize;
            let width = (v - u) / count as f64;
            for m in 0..count {
                let lo = u + m as f64 * width;
                let hi = if m + 1 == count { v } else { lo + width };
                for (t, w) in rule.mapped(lo, hi) {
                    total += f.derivative(t, k)? * horner(&poly, t - u) * w;
                }
            }
        }
        Ok(total)
    }

    /// `∫_ℝ f^{(k)}(t) P(t) dt`.
    ///
    /// Constant tails are integrated in closed form through the limit of
    /// `f^{(k-1)}` at infinity; tails without such a limit are an error.
    pub fn integrate_against(&self, f: &SmoothFunction, k: usize) -> Result<Complex64> {
        let Some((a, b)) = self.span() else {
            return if self.left_value == ZERO {
                Ok(ZERO)
            } else {
                self.tail_limit(f, k).map(|_| ZERO)
            };
        };
        let mut total = self.integrate_against_over(f, k, a, b)?;
        if self.left_value != ZERO || self.right_value != ZERO {
            let limit = self.tail_limit(f, k)?;
            let fa = f.eval_derivative(a, k - 1)?;
            let fb = f.eval_derivative(b, k - 1)?;
            total += self.left_value * (fa - limit) + self.right_value * (limit - fb);
        }
        Ok(total)
    }

    fn tail_limit(&self, f: &SmoothFunction, k: usize) -> Result<Complex64> {
        if k == 0 {
            return Err(Error::NonDecayingTail);
        }
        f.derivative_limit_at_infinity(k - 1)
            .ok_or(Error::NonDecayingTail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn horner(c: &[Complex64], s: f64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &x| acc * s + x)
}

/// Coefficients of `s ↦ p(s + delta)`.
fn taylor_shift(c: &[Complex64], delta: f64) -> Vec<Complex64> {
    let mut a = c.to_vec();
    if delta == 0.0 {
        return a;
    }
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = a[j + 1];
            a[j] += next * delta;
        }
    }
    a
}
