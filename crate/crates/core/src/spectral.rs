//! Hermitian operators, clustered spectral decompositions and matrix functions.

use std::fs;
use std::path::Path;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::SmoothFunction;
use crate::piecewise::PiecewisePolynomial;
use crate::CMatrix;

/// Hermitian check: max |A - A*| ≤ 1e-10 (1 + max|a_ij|).
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Default cluster tolerance scale: `1e-8 (1 + max|λ|)`.
pub const EIGEN_CLUSTER_SCALE: f64 = 1e-8;

/// An `n × n` complex matrix that is exactly Hermitian once stored.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

/// On-disk matrix record: `{"n": .., "re": [[..]], "im": [[..]]}`; `im` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl HermitianOperator {
    /// Validates Hermitianity within tolerance, then stores `(A + A*)/2`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteMatrix);
        }
        let adjoint = matrix.adjoint();
        let deviation = (&matrix - &adjoint)
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()));
        let scale = matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let tolerance = HERMITIAN_TOLERANCE * (1.0 + scale);
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let matrix = (matrix + adjoint) * Complex64::new(0.5, 0.0);
        Ok(Self { matrix })
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::MatrixFormat(format!(
                "{} entries for n = {n}",
                entries.len()
            )));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(entries[i * n + j], 0.0)
        }))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0)
        }))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(CMatrix::identity(n, n))
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `self + x · other`.
    pub fn add_scaled(&self, other: &Self, x: f64) -> Result<Self> {
        check_dims(self.dimension(), other.dimension())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix * Complex64::new(x, 0.0),
        })
    }

    /// `U A U*` for a unitary `U`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Self> {
        check_dims(self.dimension(), unitary.nrows())?;
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr(A^p)`.
    pub fn power_trace(&self, p: usize) -> Complex64 {
        let n = self.dimension();
        let mut acc = CMatrix::identity(n, n);
        for _ in 0..p {
            acc = &acc * &self.matrix;
        }
        acc.trace()
    }

    /// Largest entry modulus.
    pub fn max_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn to_record(&self) -> MatrixRecord {
        let n = self.dimension();
        let re = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)].re).collect())
            .collect();
        let has_im = self.matrix.iter().any(|z| z.im != 0.0);
        let im = has_im.then(|| {
            (0..n)
                .map(|i| (0..n).map(|j| self.matrix[(i, j)].im).collect())
                .collect()
        });
        MatrixRecord { n, re, im }
    }

    pub fn from_record(record: &MatrixRecord) -> Result<Self> {
        let n = record.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&record.re) {
            return Err(Error::MatrixFormat(format!("`re` is not {n}x{n}")));
        }
        if let Some(im) = &record.im {
            if !shape_ok(im) {
                return Err(Error::MatrixFormat(format!("`im` is not {n}x{n}")));
            }
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            let im = record.im.as_ref().map_or(0.0, |m| m[i][j]);
            Complex64::new(record.re[i][j], im)
        }))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `H = Σ λ_i P_i` over clustered distinct eigenvalues `λ_1 < … < λ_r`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projections: Vec<CMatrix>,
    multiplicities: Vec<usize>,
    cluster_tol: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn dimension(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// Matrix `Σ_i f(λ_i) P_i`.
    pub fn apply_function(&self, f: &SmoothFunction) -> Result<CMatrix> {
        self.apply_scalar(|x| f.eval_derivative(x, 0))
    }

    /// `Σ_i g(λ_i) P_i` for an arbitrary scalar map.
    pub fn apply_scalar(&self, g: impl Fn(f64) -> Result<Complex64>) -> Result<CMatrix> {
        let n = self.dimension();
        let mut out = CMatrix::zeros(n, n);
        for (lam, proj) in self.eigenvalues.iter().zip(&self.projections) {
            out += proj * g(*lam)?;
        }
        Ok(out)
    }

    /// `Tr f(H) = Σ_i m_i f(λ_i)`.
    pub fn trace_function(&self, f: &SmoothFunction) -> Result<Complex64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .map(|(&lam, &m)| Ok(f.eval_derivative(lam, 0)? * m as f64))
            .sum()
    }

    /// Right-continuous eigenvalue counting function `N_H(t) = Σ_{λ_i ≤ t} m_i`.
    pub fn counting_step(&self) -> PiecewisePolynomial {
        let mut running = 0usize;
        let mut pieces = Vec::with_capacity(self.len().saturating_sub(1));
        for &m in &self.multiplicities[..self.len() - 1] {
            running += m;
            pieces.push(vec![Complex64::new(running as f64, 0.0)]);
        }
        PiecewisePolynomial::new(
            self.eigenvalues.clone(),
            pieces,
            Complex64::new(0.0, 0.0),
            Complex64::new(self.dimension() as f64, 0.0),
        )
        .expect("eigenvalues are strictly increasing")
    }
}

/// Eigendecomposition with clustering at `1e-8 (1 + max|λ|)`.
pub fn decompose_default(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    decompose_impl(h, None)
}

/// Eigendecomposition; eigenvalues within `cluster_tol` of their neighbour are
/// merged into one cluster represented by the cluster mean.
pub fn decompose(h: &HermitianOperator, cluster_tol: f64) -> Result<SpectralDecomposition> {
    if !(cluster_tol >= 0.0 && cluster_tol.is_finite()) {
        return Err(Error::InvalidTolerance(cluster_tol));
    }
    decompose_impl(h, Some(cluster_tol))
}

fn decompose_impl(
    h: &HermitianOperator,
    cluster_tol: Option<f64>,
) -> Result<SpectralDecomposition> {
    let n = h.dimension();
    let eig =
        SymmetricEigen::try_new(h.matrix.clone(), 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let radius = sorted[0].abs().max(sorted[n - 1].abs());
    let tol = cluster_tol.unwrap_or(EIGEN_CLUSTER_SCALE * (1.0 + radius));

    let mut eigenvalues = Vec::new();
    let mut projections = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted[end] - sorted[end - 1] <= tol {
            end += 1;
        }
        let members = &order[start..end];
        eigenvalues.push(sorted[start..end].iter().sum::<f64>() / members.len() as f64);
        let block = CMatrix::from_fn(n, members.len(), |i, j| eig.eigenvectors[(i, members[j])]);
        let block = symmetric_orthogonalize(block)?;
        projections.push(&block * block.adjoint());
        multiplicities.push(members.len());
        start = end;
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projections,
        multiplicities,
        cluster_tol: tol,
    })
}

/// Löwdin orthogonalization `U (U*U)^{-1/2}`.
fn symmetric_orthogonalize(block: CMatrix) -> Result<CMatrix> {
    let gram = block.adjoint() * &block;
    let eig = SymmetricEigen::try_new(gram, 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let inv_sqrt =
        CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(1.0 / x.sqrt(), 0.0)));
    let root = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    Ok(block * root)
}

/// Trace norm `Tr|V|`.
pub fn trace_norm(v: &HermitianOperator) -> Result<f64> {
    let d = decompose_default(v)?;
    Ok(d.eigenvalues()
        .iter()
        .zip(d.multiplicities())
        .map(|(x, &m)| x.abs() * m as f64)
        .sum())
}

/// Hilbert–Schmidt norm `Tr(|V|^2)^{1/2}`.
pub fn hs_norm(v: &HermitianOperator) -> f64 {
    v.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
