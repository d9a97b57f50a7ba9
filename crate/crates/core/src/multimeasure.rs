//! Discrete multiple spectral measures.
//!
//! In finite dimensions the spectral measure of `H0` is a sum of atoms
//! `λ_i ↦ P_i`, so the multiple spectral measures are finite sums of atoms on
//! eigenvalue tuples:
//!
//! * `m_p`:     `w(i_1..i_p)       = Tr[P_{i_1} V P_{i_2} V ⋯ P_{i_p} V]`
//! * `m_p^(1)`: `w(i_1..i_{p+1})   = Tr[P_{i_1} V ⋯ P_{i_p} V P_{i_{p+1}}]`
//!
//! Weights are stored densely, first index most significant.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{HermitianOperator, SpectralDecomposition};
use crate::CMatrix;

/// Largest number of atoms a measure may carry.
pub const ATOM_ENVELOPE: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasureVariant {
    /// `m_{p,H0,V}` on `p`-tuples.
    M,
    /// `m^{(1)}_{p,H0,V}` on `(p+1)`-tuples.
    M1,
}

#[derive(Debug, Clone)]
pub struct MultiSpectralMeasure {
    variant: MeasureVariant,
    order: usize,
    arity: usize,
    atoms: Vec<f64>,
    weights: Vec<Complex64>,
}

/// One atom of the debug dump.
#[derive(Debug, Clone, Serialize)]
pub struct AtomRecord {
    pub indices: Vec<usize>,
    pub lambda_tuple: Vec<f64>,
    pub weight_re: f64,
    pub weight_im: f64,
}

/// Builds `m_{p,H0,V}`.
pub fn build_m(
    d: &SpectralDecomposition,
    v: &HermitianOperator,
    p: usize,
) -> Result<MultiSpectralMeasure> {
    build(d, v, p, MeasureVariant::M)
}

/// Builds `m^{(1)}_{p,H0,V}`.
pub fn build_m1(
    d: &SpectralDecomposition,
    v: &HermitianOperator,
    p: usize,
) -> Result<MultiSpectralMeasure> {
    build(d, v, p, MeasureVariant::M1)
}

/// Errors when `r^arity` exceeds [`ATOM_ENVELOPE`].
pub fn check_envelope(r: usize, arity: usize) -> Result<()> {
    let atoms = (r as f64).powi(arity as i32);
    if atoms > ATOM_ENVELOPE {
        return Err(Error::EnvelopeExceeded {
            atoms,
            limit: ATOM_ENVELOPE,
        });
    }
    Ok(())
}

fn build(
    d: &SpectralDecomposition,
    v: &HermitianOperator,
    p: usize,
    variant: MeasureVariant,
) -> Result<MultiSpectralMeasure> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    if d.dimension() != v.dimension() {
        return Err(Error::DimensionMismatch {
            left: d.dimension(),
            right: v.dimension(),
        });
    }
    let arity = match variant {
        MeasureVariant::M => p,
        MeasureVariant::M1 => p + 1,
    };
    let r = d.len();
    check_envelope(r, arity)?;

    let pv: Vec<CMatrix> = d
        .projections()
        .iter()
        .map(|proj| proj * v.matrix())
        .collect();
    let mut factors: Vec<&[CMatrix]> = vec![&pv; p];
    if variant == MeasureVariant::M1 {
        factors.push(d.projections());
    }

    let weights: Vec<Complex64> = if arity == 1 {
        factors[0].iter().map(|m| m.trace()).collect()
    } else {
        (0..r)
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::with_capacity(r.pow(arity as u32 - 1));
                accumulate(&factors, 1, &factors[0][i], &mut out);
                out
            })
            .collect::<Vec<_>>()
            .concat()
    };
    Ok(MultiSpectralMeasure {
        variant,
        order: p,
        arity,
        atoms: d.eigenvalues().to_vec(),
        weights,
    })
}

fn accumulate(factors: &[&[CMatrix]], depth: usize, prefix: &CMatrix, out: &mut Vec<Complex64>) {
    if depth + 1 == factors.len() {
        for last in factors[depth] {
            out.push(trace_of_product(prefix, last));
        }
    } else {
        for next in factors[depth] {
            accumulate(factors, depth + 1, &(prefix * next), out);
        }
    }
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

impl MultiSpectralMeasure {
    pub fn variant(&self) -> MeasureVariant {
        self.variant
    }

    /// The `p` in `m_p` / `m_p^(1)`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Length of the index tuples.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Distinct eigenvalues indexing each coordinate.
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn linear_index(&self, indices: &[usize]) -> usize {
        let r = self.atoms.len();
        indices.iter().fold(0, |acc, &i| acc * r + i)
    }

    pub fn index_tuple(&self, mut linear: usize) -> Vec<usize> {
        let r = self.atoms.len();
        let mut out = vec![0; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = linear % r;
            linear /= r;
        }
        out
    }

    pub fn weight(&self, indices: &[usize]) -> Complex64 {
        assert_eq!(
            indices.len(),
            self.arity,
            "tuple length must equal the arity"
        );
        self.weights[self.linear_index(indices)]
    }

    /// `(index tuple, weight)` pairs in storage order.
    pub fn tuples(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(k, &w)| (self.index_tuple(k), w))
    }

    /// `Σ w`, equal to `Tr(V^p)` for both variants.
    pub fn total_mass(&self) -> Complex64 {
        self.weights.iter().sum()
    }

    /// `Σ |w|`.
    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }

    /// `Σ w(i) φ(λ_{i_1}, …, λ_{i_arity})`.
    pub fn integrate(&self, phi: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        self.try_integrate(|l| Ok(phi(l)))
            .expect("infallible integrand")
    }

    pub fn try_integrate(&self, phi: impl Fn(&[f64]) -> Result<Complex64>) -> Result<Complex64> {
        let mut lam = vec![0.0; self.arity];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &w) in self.weights.iter().enumerate() {
            for (slot, i) in lam.iter_mut().zip(self.index_tuple(k)) {
                *slot = self.atoms[i];
            }
            acc += w * phi(&lam)?;
        }
        Ok(acc)
    }

    /// Weights summed over the last index (`m^(1) → m` when `Σ P_i = I`).
    pub fn marginal_last(&self) -> Vec<Complex64> {
        self.weights
            .chunks(self.atoms.len())
            .map(|c| c.iter().sum())
            .collect()
    }

    pub fn dump(&self) -> Vec<AtomRecord> {
        self.tuples()
            .map(|(indices, w)| AtomRecord {
                lambda_tuple: indices.iter().map(|&i| self.atoms[i]).collect(),
                indices,
                weight_re: w.re,
                weight_im: w.im,
            })
            .collect()
    }
}
