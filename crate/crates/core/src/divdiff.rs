//! Confluent divided differences.
//!
//! `Δ^{(p)}_{λ_1..λ_{p+1}}(f)` is evaluated with a Hermite–Newton table over
//! the knots sorted so that equal knots are adjacent; a run of `m` equal knots
//! is seeded with `f^{(j)}(λ)/j!`, `j < m`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorial;
use crate::funcspace::Differentiable;
use crate::quadrature::gl32;

/// Relative clustering scale: knots closer than `1e-8 (1 + max|λ|)` are merged.
pub const KNOT_CLUSTER_SCALE: f64 = 1e-8;

/// Highest order supported by [`exponential_simplex_dd`].
pub const SIMPLEX_MAX_ORDER: usize = 3;

/// An ordered knot list of length `p + 1` with near-coincident knots snapped
/// to their cluster mean.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotMultiset {
    knots: Vec<f64>,
    tolerance: f64,
}

impl KnotMultiset {
    /// Clusters with the default tolerance `1e-8 (1 + max|λ|)`.
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        let scale = knots.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Self::with_tolerance(knots, KNOT_CLUSTER_SCALE * (1.0 + scale))
    }

    pub fn with_tolerance(mut knots: Vec<f64>, tolerance: f64) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::EmptyKnots);
        }
        if knots.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteKnot);
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidTolerance(tolerance));
        }
        let mut order: Vec<usize> = (0..knots.len()).collect();
        order.sort_by(|&a, &b| knots[a].total_cmp(&knots[b]));
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && knots[order[end]] - knots[order[end - 1]] <= tolerance {
                end += 1;
            }
            let first = knots[order[start]];
            if order[start..end].iter().any(|&i| knots[i] != first) {
                let mean =
                    order[start..end].iter().map(|&i| knots[i]).sum::<f64>() / (end - start) as f64;
                for &i in &order[start..end] {
                    knots[i] = mean;
                }
            }
            start = end;
        }
        Ok(Self { knots, tolerance })
    }

    /// Knots after clustering, in their original order.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `p` for a list of `p + 1` knots.
    pub fn order(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn min(&self) -> f64 {
        self.knots.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.knots.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut s = self.knots.clone();
        s.sort_by(f64::total_cmp);
        s
    }

    /// Distinct values, increasing, with multiplicities.
    pub fn distinct(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for x in self.sorted() {
            match out.last_mut() {
                Some((v, m)) if *v == x => *m += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    pub fn max_multiplicity(&self) -> usize {
        self.distinct().iter().map(|&(_, m)| m).max().unwrap_or(0)
    }

    pub fn all_equal(&self) -> bool {
        self.distinct().len() == 1
    }
}

/// `Δ^{(p)}(f)` over the knot multiset.
pub fn divided_difference<F: Differentiable + ?Sized>(
    f: &F,
    knots: &KnotMultiset,
) -> Result<Complex64> {
    newton_table(f, &knots.sorted())
}

/// Hermite–Newton table on knots sorted with equal values adjacent.
fn newton_table<F: Differentiable + ?Sized>(f: &F, z: &[f64]) -> Result<Complex64> {
    let n = z.len();
    let mut jets: HashMap<(u64, usize), Complex64> = HashMap::new();
    let mut jet = |x: f64, j: usize| -> Result<Complex64> {
        if let Some(v) = jets.get(&(x.to_bits(), j)) {
            return Ok(*v);
        }
        let v = f.derivative(x, j)? / factorial(j);
        jets.insert((x.to_bits(), j), v);
        Ok(v)
    };
    let mut col = Vec::with_capacity(n);
    for &x in z {
        col.push(jet(x, 0)?);
    }
    for j in 1..n {
        for i in (j..n).rev() {
            col[i] = if z[i] == z[i - j] {
                jet(z[i], j)?
            } else {
                (col[i] - col[i - 1]) / (z[i] - z[i - j])
            };
        }
    }
    Ok(col[n - 1])
}

/// Partial-fraction form `Σ_j f(λ_j) / Π_{k≠j} (λ_j - λ_k)` for pairwise distinct knots.
pub fn distinct_knot_sum<F: Differentiable + ?Sized>(f: &F, knots: &[f64]) -> Result<Complex64> {
    check_distinct(knots)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &x) in knots.iter().enumerate() {
        let denom: f64 = knots
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &y)| x - y)
            .product();
        acc += f.derivative(x, 0)? / denom;
    }
    Ok(acc)
}

/// `Δ^{(p)}_{λ_1..λ_p, λ_i}(f)` from the closed form for one repeated knot.
///
/// `base` holds the `p` pairwise distinct knots; `index` selects the knot that
/// appears twice.
pub fn repeated_knot_formula<F: Differentiable + ?Sized>(
    f: &F,
    base: &[f64],
    index: usize,
) -> Result<Complex64> {
    check_distinct(base)?;
    if index >= base.len() {
        return Err(Error::KnotIndex {
            index,
            len: base.len(),
        });
    }
    let xi = base[index];
    let prod_excluding = |x: f64, skip: &[usize]| -> f64 {
        base.iter()
            .enumerate()
            .filter(|(k, _)| !skip.contains(k))
            .map(|(_, &y)| x - y)
            .product()
    };
    let fi = f.derivative(xi, 0)?;
    let mut acc = f.derivative(xi, 1)? / prod_excluding(xi, &[index]);
    for (j, &xj) in base.iter().enumerate() {
        if j == index {
            continue;
        }
        let fj = f.derivative(xj, 0)?;
        let skip = [index, j];
        let term = fj / prod_excluding(xj, &skip) - fi / prod_excluding(xi, &skip);
        acc += term / ((xi - xj) * (xi - xj));
    }
    Ok(acc)
}

fn check_distinct(knots: &[f64]) -> Result<()> {
    if knots.is_empty() {
        return Err(Error::EmptyKnots);
    }
    for (i, a) in knots.iter().enumerate() {
        if knots[i + 1..].iter().any(|b| a == b) {
            return Err(Error::NonDistinctKnots);
        }
    }
    Ok(())
}

/// `Δ^{(p)}(e^{isλ})` through the ordered-simplex integral of products of
/// exponentials, one per knot.
///
/// With `s_j = s u_j` and `1 ≥ u_1 ≥ … ≥ u_p ≥ 0`,
/// `Δ = (is)^p ∫ e^{is[(1-u_1)λ_1 + (u_1-u_2)λ_2 + … + u_p λ_{p+1}]} du`.
/// The simplex is mapped to the unit cube by `u_k = v_1 ⋯ v_k` and integrated
/// with a tensor 32-point Gauss–Legendre rule.
pub fn exponential_simplex_dd(frequency: f64, knots: &KnotMultiset) -> Result<Complex64> {
    let p = knots.order();
    if p > SIMPLEX_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: p,
            max: SIMPLEX_MAX_ORDER,
        });
    }
    let lam = knots.knots();
    let is = Complex64::new(0.0, frequency);
    if p == 0 {
        return Ok((is * lam[0]).exp());
    }
    let nodes: Vec<(f64, f64)> = gl32().mapped(0.0, 1.0).collect();
    let mut idx = vec![0usize; p];
    let mut u = vec![0.0; p];
    let mut acc = Complex64::new(0.0, 0.0);
    'outer: loop {
        let mut weight = 1.0;
        let mut prod = 1.0;
        for k in 0..p {
            let (v, w) = nodes[idx[k]];
            // Jacobian of u_k = v_1 ⋯ v_k is Π_k v_1 ⋯ v_{k-1}.
            weight *= w * prod;
            prod *= v;
            u[k] = prod;
        }
        let mut phase = (1.0 - u[0]) * lam[0];
        for k in 1..p {
            phase += (u[k - 1] - u[k]) * lam[k];
        }
        phase += u[p - 1] * lam[p];
        acc += (is * phase).exp() * weight;

        for k in (0..p).rev() {
            idx[k] += 1;
            if idx[k] < nodes.len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    Ok(is.powu(p as u32) * acc)
}
