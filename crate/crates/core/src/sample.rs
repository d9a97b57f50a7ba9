//! Seedable random inputs for property checks and verification suites.

use num_complex::Complex64;
use rand::Rng;

use crate::funcspace::SmoothFunction;
use crate::spectral::{decompose_default, hs_norm, HermitianOperator};
use crate::CMatrix;

/// Hermitian matrix with entries uniform in `[-scale, scale]` (real and
/// imaginary parts independently off the diagonal).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> HermitianOperator {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-scale..=scale), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).expect("constructed Hermitian")
}

/// `(H0, V)` with `‖V‖₂ = v_norm`.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    v_norm: f64,
) -> (HermitianOperator, HermitianOperator) {
    let h0 = random_hermitian(rng, n, 1.0);
    let raw = random_hermitian(rng, n, 1.0);
    let norm = hs_norm(&raw);
    let v = if norm == 0.0 {
        raw
    } else {
        HermitianOperator::new(raw.matrix() * Complex64::new(v_norm / norm, 0.0))
            .expect("scaled Hermitian")
    };
    (h0, v)
}

/// Unitary `e^{iA}` for a random Hermitian `A`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let a = random_hermitian(rng, n, 2.0);
    decompose_default(&a)
        .and_then(|d| d.apply_scalar(|x| Ok(Complex64::new(0.0, x).exp())))
        .expect("random Hermitian decomposes")
}

pub fn random_knots<R: Rng + ?Sized>(rng: &mut R, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(lo..hi)).collect()
}

/// One member of the built-in families with moderate parameters.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R) -> SmoothFunction {
    match rng.gen_range(0..4) {
        0 => {
            let degree = rng.gen_range(0..=7);
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
            SmoothFunction::real_polynomial(&coeffs).expect("non-empty")
        }
        1 => SmoothFunction::exponential(rng.gen_range(-2.0..2.0)),
        2 => SmoothFunction::gaussian(rng.gen_range(-1.0..1.0), rng.gen_range(0.7..2.0))
            .expect("positive width"),
        _ => {
            let im = rng.gen_range(0.5..2.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            SmoothFunction::simple_pole(Complex64::new(rng.gen_range(-1.0..1.0), im))
                .expect("nonreal pole")
        }
    }
}

/// The verification suite at order `p`: a random polynomial of degree `p + 3`,
/// `λ^p`, `e^{isλ}` for `s = ±1, ±2`, a gaussian and simple poles at `±i, ±2i`.
pub fn function_suite<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Vec<SmoothFunction> {
    let coeffs: Vec<f64> = (0..=p + 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut out = vec![
        SmoothFunction::real_polynomial(&coeffs).expect("non-empty"),
        SmoothFunction::monomial(p),
    ];
    out.extend([1.0, -1.0, 2.0, -2.0].map(SmoothFunction::exponential));
    out.push(SmoothFunction::gaussian(0.0, 1.0).expect("positive width"));
    out.extend(
        [1.0, -1.0, 2.0, -2.0]
            .map(|im| SmoothFunction::simple_pole(Complex64::new(0.0, im)).expect("nonreal pole")),
    );
    out
}
