//! Operator derivatives and their trace reductions in finite dimensions.
//!
//! With `H0 = Σ λ_i P_i` every multiple operator integral collapses to a
//! finite sum over eigen-atoms, e.g.
//!
//! ```text
//! d^p/dx^p f(H0 + xV)|_{x=0} = p! Σ Δ^{(p)}_{λ_{i_1},…,λ_{i_{p+1}}}(f) P_{i_1} V P_{i_2} ⋯ V P_{i_{p+1}}
//! ```

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::divdiff::{divided_difference, KnotMultiset};
use crate::error::{Error, Result};
use crate::factorial;
use crate::funcspace::{DerivativeOf, Differentiable, SmoothFunction};
use crate::multimeasure::{build_m, build_m1, check_envelope, MultiSpectralMeasure};
use crate::piecewise::PiecewisePolynomial;
use crate::spectral::{
    decompose, decompose_default, hs_norm, HermitianOperator, SpectralDecomposition,
};
use crate::splines::spline_antiderivative;
use crate::CMatrix;

/// Highest order the finite-difference oracle supports.
pub const FD_MAX_ORDER: usize = 4;

/// `H0`, `V` and the spectral decompositions of `H0` and `H0 + V`.
#[derive(Debug, Clone)]
pub struct PerturbedPair {
    h0: HermitianOperator,
    v: HermitianOperator,
    d0: SpectralDecomposition,
    d1: SpectralDecomposition,
}

impl PerturbedPair {
    pub fn new(h0: HermitianOperator, v: HermitianOperator) -> Result<Self> {
        Self::build(h0, v, None)
    }

    /// Uses `cluster_tol` for both decompositions.
    pub fn with_cluster_tol(
        h0: HermitianOperator,
        v: HermitianOperator,
        cluster_tol: f64,
    ) -> Result<Self> {
        Self::build(h0, v, Some(cluster_tol))
    }

    fn build(h0: HermitianOperator, v: HermitianOperator, tol: Option<f64>) -> Result<Self> {
        if h0.dimension() != v.dimension() {
            return Err(Error::DimensionMismatch {
                left: h0.dimension(),
                right: v.dimension(),
            });
        }
        let h1 = h0.add_scaled(&v, 1.0)?;
        let (d0, d1) = match tol {
            Some(t) => (decompose(&h0, t)?, decompose(&h1, t)?),
            None => (decompose_default(&h0)?, decompose_default(&h1)?),
        };
        Ok(Self { h0, v, d0, d1 })
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn v(&self) -> &HermitianOperator {
        &self.v
    }

    /// Decomposition of `H0`.
    pub fn d0(&self) -> &SpectralDecomposition {
        &self.d0
    }

    /// Decomposition of `H0 + V`.
    pub fn d1(&self) -> &SpectralDecomposition {
        &self.d1
    }

    pub fn dimension(&self) -> usize {
        self.h0.dimension()
    }

    /// Convex hull `[c, d]` of `σ(H0) ∪ σ(H0 + V)`.
    pub fn hull(&self) -> (f64, f64) {
        (
            self.d0.min().min(self.d1.min()),
            self.d0.max().max(self.d1.max()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMethod {
    /// `p! ∫ Δ^{(p)}(f) dm^{(1)}_p`.
    M1Form,
    /// `(p-1)! ∫ Δ^{(p-1)}(f') dm_p`.
    MForm,
    /// Trace of [`operator_derivative`].
    OperatorTrace,
    /// Central differences of `x ↦ Tr f(H0 + xV)`.
    FiniteDifference,
}

impl TraceMethod {
    pub const ALL: [TraceMethod; 4] = [
        TraceMethod::M1Form,
        TraceMethod::MForm,
        TraceMethod::OperatorTrace,
        TraceMethod::FiniteDifference,
    ];
}

/// The three sides of the spline-kernel trace identity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelIdentity {
    pub lhs: Complex64,
    pub rhs_m1: Complex64,
    pub rhs_m: Complex64,
}

/// Nondecreasing index tuples of length `k` over `0..r`.
pub(crate) fn multisets(r: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(r: usize, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..r {
            cur.push(i);
            rec(r, k, i, cur, out);
            cur.pop();
        }
    }
    rec(r, k, 0, &mut cur, &mut out);
    out
}

/// Knot multiset at the atoms named by `indices`. Atoms are already distinct
/// cluster representatives, so no further clustering is applied.
pub(crate) fn atom_knots(atoms: &[f64], indices: &[usize]) -> Result<KnotMultiset> {
    KnotMultiset::with_tolerance(indices.iter().map(|&i| atoms[i]).collect(), 0.0)
}

/// `Δ^{(k-1)}(f)` at every sorted `k`-tuple of atoms.
fn dd_table<F: Differentiable + Sync + ?Sized>(
    f: &F,
    atoms: &[f64],
    k: usize,
) -> Result<HashMap<Vec<usize>, Complex64>> {
    multisets(atoms.len(), k)
        .into_par_iter()
        .map(|idx| {
            let value = divided_difference(f, &atom_knots(atoms, &idx)?)?;
            Ok((idx, value))
        })
        .collect()
}

fn sorted_key(indices: &[usize]) -> Vec<usize> {
    let mut key = indices.to_vec();
    key.sort_unstable();
    key
}

/// `d^p/dx^p f(H0 + xV)` at `x = 0`; `p = 0` gives `f(H0)`.
pub fn operator_derivative(pair: &PerturbedPair, f: &SmoothFunction, p: usize) -> Result<CMatrix> {
    let d = pair.d0();
    if p == 0 {
        return d.apply_function(f);
    }
    let r = d.len();
    check_envelope(r, p + 1)?;
    let table = dd_table(f, d.eigenvalues(), p + 1)?;
    let pv: Vec<CMatrix> = d
        .projections()
        .iter()
        .map(|proj| proj * pair.v().matrix())
        .collect();
    let n = pair.dimension();
    let sum = (0..r)
        .into_par_iter()
        .map(|i| {
            let mut acc = CMatrix::zeros(n, n);
            let mut path = vec![i];
            accumulate_operator(&pv, d.projections(), &table, p, &pv[i], &mut path, &mut acc);
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CMatrix::zeros(n, n), |a, b| a + b);
    Ok(sum * Complex64::new(factorial(p), 0.0))
}

fn accumulate_operator(
    pv: &[CMatrix],
    proj: &[CMatrix],
    table: &HashMap<Vec<usize>, Complex64>,
    p: usize,
    prefix: &CMatrix,
    path: &mut Vec<usize>,
    acc: &mut CMatrix,
) {
    if path.len() == p {
        for (j, pj) in proj.iter().enumerate() {
            path.push(j);
            let coeff = table[&sorted_key(path)];
            path.pop();
            if coeff != Complex64::new(0.0, 0.0) {
                *acc += prefix * pj * coeff;
            }
        }
        return;
    }
    for (j, q) in pv.iter().enumerate() {
        path.push(j);
        accumulate_operator(pv, proj, table, p, &(prefix * q), path, acc);
        path.pop();
    }
}

/// `Σ w(i) Δ(f)(λ_i)` over a measure, with divided differences shared across
/// permutations of each index tuple.
fn integrate_divided_difference<F: Differentiable + Sync + ?Sized>(
    measure: &MultiSpectralMeasure,
    f: &F,
) -> Result<Complex64> {
    let table = dd_table(f, measure.atoms(), measure.arity())?;
    Ok(measure
        .tuples()
        .map(|(idx, w)| w * table[&sorted_key(&idx)])
        .sum())
}

/// `d^p/dx^p Tr f(H0 + xV)` at `x = 0` by the chosen method (`p ≥ 1`).
pub fn trace_derivative(
    pair: &PerturbedPair,
    f: &SmoothFunction,
    p: usize,
    method: TraceMethod,
) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    match method {
        TraceMethod::M1Form => {
            let m1 = build_m1(pair.d0(), pair.v(), p)?;
            Ok(integrate_divided_difference(&m1, f)? * factorial(p))
        }
        TraceMethod::MForm => {
            let m = build_m(pair.d0(), pair.v(), p)?;
            let df = DerivativeOf { inner: f, order: 1 };
            Ok(integrate_divided_difference(&m, &df)? * factorial(p - 1))
        }
        TraceMethod::OperatorTrace => Ok(operator_derivative(pair, f, p)?.trace()),
        TraceMethod::FiniteDifference => Ok(finite_difference_derivative(pair, f, p)?.trace()),
    }
}

/// Largest step of the finite-difference tableau.
pub fn finite_difference_step(pair: &PerturbedPair) -> f64 {
    0.08 * (1.0 + pair.d0().spectral_radius()) / (1.0 + hs_norm(pair.v()))
}

const RIDDERS_SHRINK: f64 = 1.4;
const RIDDERS_LEVELS: usize = 10;

/// `d^p/dx^p f(H0 + xV)` at `x = 0` (`1 ≤ p ≤ 4`).
///
/// Five-point central stencils evaluated at geometrically shrinking steps and
/// extrapolated to zero step (Ridders); the estimate with the smallest
/// tableau discrepancy is returned.
pub fn finite_difference_derivative(
    pair: &PerturbedPair,
    f: &SmoothFunction,
    p: usize,
) -> Result<CMatrix> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    if p > FD_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: p,
            max: FD_MAX_ORDER,
        });
    }
    let g = |x: f64| -> Result<CMatrix> {
        let hx = pair.h0().add_scaled(pair.v(), x)?;
        decompose(&hx, pair.d0().cluster_tol())?.apply_function(f)
    };
    // (offset, weight) pairs and the constant in the denominator.
    let (weights, scale): (&[(i32, f64)], f64) = match p {
        1 => (&[(2, -1.0), (1, 8.0), (-1, -8.0), (-2, 1.0)], 12.0),
        2 => (
            &[(2, -1.0), (1, 16.0), (0, -30.0), (-1, 16.0), (-2, -1.0)],
            12.0,
        ),
        3 => (&[(2, 1.0), (1, -2.0), (-1, 2.0), (-2, -1.0)], 2.0),
        _ => (&[(2, 1.0), (1, -4.0), (0, 6.0), (-1, -4.0), (-2, 1.0)], 1.0),
    };
    let n = pair.dimension();
    let center = g(0.0)?;
    let stencil = |h: f64| -> Result<CMatrix> {
        let den = scale * h.powi(p as i32);
        let mut acc = CMatrix::zeros(n, n);
        for &(k, w) in weights {
            let value = if k == 0 {
                center.clone()
            } else {
                g(k as f64 * h)?
            };
            acc += value.map(|z| z * (w / den));
        }
        Ok(acc)
    };
    let max_abs = |m: &CMatrix| m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));

    let c2 = RIDDERS_SHRINK * RIDDERS_SHRINK;
    let mut h = finite_difference_step(pair);
    let mut prev: Vec<CMatrix> = vec![stencil(h)?];
    let mut best = prev[0].clone();
    let mut best_err = f64::INFINITY;
    for _ in 1..RIDDERS_LEVELS {
        h /= RIDDERS_SHRINK;
        let mut row = vec![stencil(h)?];
        let mut fac = c2;
        for j in 1..=prev.len() {
            let next = (row[j - 1].map(|z| z * fac) - &prev[j - 1]).map(|z| z / (fac - 1.0));
            fac *= c2;
            let err = max_abs(&(&next - &row[j - 1])).max(max_abs(&(&next - &prev[j - 1])));
            if err <= best_err {
                best_err = err;
                best = next.clone();
            }
            row.push(next);
        }
        let k = prev.len();
        let drift = max_abs(&(&row[k] - &prev[k - 1]));
        prev = row;
        if drift >= 2.0 * best_err {
            break;
        }
    }
    Ok(best)
}

/// `Σ w(i) Δ^{(k)}_{λ_i}((λ - t)_+^k)` as a function of `t`, where `k + 1` is
/// the arity of the measure.
pub fn antiderivative_kernel(measure: &MultiSpectralMeasure) -> Result<PiecewisePolynomial> {
    let mut grouped: HashMap<Vec<usize>, Complex64> = HashMap::new();
    for (idx, w) in measure.tuples() {
        *grouped.entry(sorted_key(&idx)).or_default() += w;
    }
    let mut keys: Vec<Vec<usize>> = grouped.keys().cloned().collect();
    keys.sort();
    let splines = keys
        .par_iter()
        .map(|key| spline_antiderivative(&atom_knots(measure.atoms(), key)?))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(Complex64, &PiecewisePolynomial)> =
        keys.iter().map(|k| grouped[k]).zip(&splines).collect();
    Ok(PiecewisePolynomial::linear_combination(&terms))
}

/// `Tr D^p - Tr(V^p) f^{(p)}(a)` against the two spline-kernel integrals over
/// `[a, b]`, which must contain both spectra.
pub fn kernel_trace_identity(
    pair: &PerturbedPair,
    f: &SmoothFunction,
    p: usize,
    a: f64,
    b: f64,
) -> Result<KernelIdentity> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    let (c, d) = pair.hull();
    if !(a <= c && b >= d) {
        return Err(Error::IntervalTooSmall { a, b, c, d });
    }
    let trace = trace_derivative(pair, f, p, TraceMethod::OperatorTrace)?;
    let lhs = trace - pair.v().power_trace(p) * f.eval_derivative(a, p)?;
    let k1 = antiderivative_kernel(&build_m1(pair.d0(), pair.v(), p)?)?;
    let k = antiderivative_kernel(&build_m(pair.d0(), pair.v(), p)?)?;
    Ok(KernelIdentity {
        lhs,
        rhs_m1: k1.integrate_against_over(f, p + 1, a, b)?,
        rhs_m: k.integrate_against_over(f, p + 1, a, b)?,
    })
}
