//! Taylor remainders and higher-order spectral shift densities.
//!
//! `η_1 = ξ = N_{H0} - N_{H0+V}`, and for `p ≥ 2`
//!
//! ```text
//! η_p(t) = Tr(V^{p-1})/(p-1)! - ∫_{-∞}^t η_{p-1} - K_p(t)/(p-1)!
//! ```
//!
//! where `K_p` integrates an antiderivative spline against a multiple spectral
//! measure of order `p - 1`. Every density is an exact piecewise polynomial
//! with breakpoints at the eigenvalues of `H0` and `H0 + V`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorial;
use crate::funcspace::SmoothFunction;
use crate::moi::{antiderivative_kernel, operator_derivative, PerturbedPair};
use crate::multimeasure::{build_m, build_m1, check_envelope};
use crate::piecewise::PiecewisePolynomial;
use crate::CMatrix;

/// Which measure drives the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `Δ^{(p-1)}` splines on `p` atoms against `m^{(1)}_{p-1}`.
    Nup1,
    /// `Δ^{(p-2)}` splines on `p - 1` atoms against `m_{p-1}`.
    Nup2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Nup1 => "nup1",
            Variant::Nup2 => "nup2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nup1" => Ok(Variant::Nup1),
            "nup2" => Ok(Variant::Nup2),
            other => Err(Error::SpecParse(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SsfResult {
    pub order: usize,
    pub density: PiecewisePolynomial,
    pub variant: Variant,
    pub hull: (f64, f64),
    /// `∫ η_p`.
    pub mass: Complex64,
    /// Largest computed tail value; zero up to round-off.
    pub tail_residual: f64,
}

impl SsfResult {
    /// Density values on `m` equispaced points of the hull.
    pub fn hull_grid(&self, m: usize) -> Vec<f64> {
        uniform_grid(self.hull.0, self.hull.1, m)
    }
}

/// `m ≥ 2` equispaced points on `[a, b]`, endpoints included.
pub fn uniform_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    if m < 2 {
        return vec![a];
    }
    let step = (b - a) / (m - 1) as f64;
    (0..m)
        .map(|i| if i + 1 == m { b } else { a + i as f64 * step })
        .collect()
}

/// Outcome of comparing `Tr R_p(f)` with `∫ f^{(p)} η_p`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceFormulaCheck {
    pub trace_side: Complex64,
    pub integral_side: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// `R_p(f) = f(H0 + V) - Σ_{j<p} D^j f(H0)[V]/j!`.
pub fn taylor_remainder(pair: &PerturbedPair, f: &SmoothFunction, p: usize) -> Result<CMatrix> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    let mut r = pair.d1().apply_function(f)?;
    for j in 0..p {
        r -= operator_derivative(pair, f, j)? / Complex64::new(factorial(j), 0.0);
    }
    Ok(r)
}

/// Krein's spectral shift function `ξ = N_{H0} - N_{H0+V}`.
pub fn krein_xi(pair: &PerturbedPair) -> PiecewisePolynomial {
    let one = Complex64::new(1.0, 0.0);
    PiecewisePolynomial::linear_combination(&[
        (one, &pair.d0().counting_step()),
        (-one, &pair.d1().counting_step()),
    ])
}

/// `η_q` for every `q = 1..=p`.
pub fn ssf_densities(
    pair: &PerturbedPair,
    p: usize,
    variant: Variant,
) -> Result<Vec<PiecewisePolynomial>> {
    if p == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    if p >= 2 {
        let arity = match variant {
            Variant::Nup1 => p,
            Variant::Nup2 => p - 1,
        };
        check_envelope(pair.d0().len(), arity)?;
    }
    let mut out = vec![krein_xi(pair)];
    for q in 2..=p {
        let prev = out[q - 2].with_zero_tails().cumulative()?;
        let kernel = match variant {
            Variant::Nup1 => antiderivative_kernel(&build_m1(pair.d0(), pair.v(), q - 1)?)?,
            Variant::Nup2 => antiderivative_kernel(&build_m(pair.d0(), pair.v(), q - 1)?)?,
        };
        let fact = factorial(q - 1);
        let constant = PiecewisePolynomial::constant(pair.v().power_trace(q - 1) / fact);
        let one = Complex64::new(1.0, 0.0);
        out.push(PiecewisePolynomial::linear_combination(&[
            (one, &constant),
            (-one, &prev),
            (-one / fact, &kernel),
        ]));
    }
    Ok(out)
}

/// `η_p` with its hull, mass and tail residual.
pub fn ssf_density(pair: &PerturbedPair, p: usize, variant: Variant) -> Result<SsfResult> {
    let density = ssf_densities(pair, p, variant)?
        .pop()
        .expect("p ≥ 1 densities");
    Ok(summarize(pair, p, variant, density))
}

/// Wraps an externally produced density with the derived quantities.
pub fn summarize(
    pair: &PerturbedPair,
    p: usize,
    variant: Variant,
    density: PiecewisePolynomial,
) -> SsfResult {
    let hull = pair.hull();
    SsfResult {
        order: p,
        mass: density.integral_between(hull.0, hull.1),
        tail_residual: density
            .left_value()
            .norm()
            .max(density.right_value().norm()),
        density,
        variant,
        hull,
    }
}

/// `Tr R_p(f)` against `∫ f^{(p)} η_p` for a given density.
pub fn trace_formula_against(
    pair: &PerturbedPair,
    result: &SsfResult,
    f: &SmoothFunction,
) -> Result<TraceFormulaCheck> {
    let trace_side = taylor_remainder(pair, f, result.order)?.trace();
    let (c, d) = result.hull;
    let integral_side = result
        .density
        .integrate_against_over(f, result.order, c, d)?;
    let abs_err = (trace_side - integral_side).norm();
    Ok(TraceFormulaCheck {
        trace_side,
        integral_side,
        abs_err,
        rel_err: abs_err / (1.0 + trace_side.norm()),
    })
}

pub fn trace_formula_check(
    pair: &PerturbedPair,
    p: usize,
    f: &SmoothFunction,
    variant: Variant,
) -> Result<TraceFormulaCheck> {
    trace_formula_against(pair, &ssf_density(pair, p, variant)?, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::HermitianOperator;

    fn scalar(a: f64, v: f64) -> PerturbedPair {
        PerturbedPair::new(
            HermitianOperator::diagonal(&[a]).unwrap(),
            HermitianOperator::diagonal(&[v]).unwrap(),
        )
        .unwrap()
    }

    fn three_by_three() -> PerturbedPair {
        let h0 = HermitianOperator::from_real(3, &[0.3, 0.2, -0.1, 0.2, -0.7, 0.4, -0.1, 0.4, 1.1])
            .unwrap();
        let mut vm =
            HermitianOperator::from_real(3, &[0.1, -0.2, 0.3, -0.2, 0.25, 0.05, 0.3, 0.05, -0.15])
                .unwrap()
                .into_matrix();
        vm[(0, 2)] += Complex64::new(0.0, 0.1);
        vm[(2, 0)] -= Complex64::new(0.0, 0.1);
        PerturbedPair::new(h0, HermitianOperator::new(vm).unwrap()).unwrap()
    }

    #[test]
    fn krein_sign_convention() {
        let xi = krein_xi(&scalar(0.0, 2.0));
        for (t, v) in [(-0.1, 0.0), (0.0, 1.0), (1.9, 1.0), (2.0, 0.0)] {
            assert_eq!(xi.eval(t).re, v, "t={t}");
        }
        assert!(krein_xi(&scalar(0.3, 0.0)).eval(0.3).norm() == 0.0);
    }

    #[test]
    fn scalar_closed_form() {
        for &(a, v) in &[(0.0, 1.0), (0.4, 0.7), (1.0, -0.6)] {
            let (lo, hi) = if v > 0.0 { (a, a + v) } else { (a + v, a) };
            for p in 1..=5 {
                for variant in [Variant::Nup1, Variant::Nup2] {
                    let r = ssf_density(&scalar(a, v), p, variant).unwrap();
                    for k in 0..=40 {
                        let t = lo - 0.2 + (hi - lo + 0.4) * k as f64 / 40.0;
                        let expect = if t >= lo && t < hi {
                            v.signum() * (a + v - t).powi(p as i32 - 1) / factorial(p - 1)
                        } else {
                            0.0
                        };
                        let got = r.density.eval(t);
                        assert!(
                            (got.re - expect).abs() < 1e-12 && got.im.abs() < 1e-12,
                            "p={p} t={t}"
                        );
                    }
                    assert!((r.mass.re - v.powi(p as i32) / factorial(p)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_perturbation() {
        let pair = PerturbedPair::new(
            three_by_three().h0().clone(),
            HermitianOperator::zeros(3).unwrap(),
        )
        .unwrap();
        for p in 1..=4 {
            let r = ssf_density(&pair, p, Variant::Nup1).unwrap();
            assert!(r
                .density
                .sample(&uniform_grid(-2.0, 2.0, 101))
                .iter()
                .all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn mass_support_and_variants() {
        let pair = three_by_three();
        let (c, d) = pair.hull();
        let grid = uniform_grid(c, d, 1000);
        for p in 1..=4 {
            let r1 = ssf_density(&pair, p, Variant::Nup1).unwrap();
            let r2 = ssf_density(&pair, p, Variant::Nup2).unwrap();
            let expect = pair.v().power_trace(p) / factorial(p);
            assert!((r1.mass - expect).norm() < 1e-9, "p={p}");
            assert!(r1.tail_residual <= 1e-12);
            for t in [c - 1.0, c - 1e-9, d, d + 0.5] {
                assert!(r1.density.eval(t).norm() <= 1e-12);
            }
            for (x, y) in r1
                .density
                .sample(&grid)
                .iter()
                .zip(r2.density.sample(&grid))
            {
                assert!((x - y).norm() < 1e-9);
                assert!(x.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn koplienko_density() {
        // η_2(t) = Tr[E_{H0}((-∞, t]) V] - ∫_{-∞}^t ξ
        let pair = three_by_three();
        let r = ssf_density(&pair, 2, Variant::Nup1).unwrap();
        let xi_cum = krein_xi(&pair).cumulative().unwrap();
        for t in uniform_grid(pair.hull().0, pair.hull().1, 57) {
            let e = pair
                .d0()
                .apply_scalar(|x| Ok(Complex64::new(if x <= t { 1.0 } else { 0.0 }, 0.0)))
                .unwrap();
            let expect = (e * pair.v().matrix()).trace() - xi_cum.eval(t);
            assert!((r.density.eval(t) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_covariance() {
        let pair = three_by_three();
        let shift = 0.75;
        let shifted = PerturbedPair::new(
            pair.h0()
                .add_scaled(&HermitianOperator::identity(3).unwrap(), shift)
                .unwrap(),
            pair.v().clone(),
        )
        .unwrap();
        let (c, d) = pair.hull();
        for p in 1..=3 {
            let a = ssf_density(&pair, p, Variant::Nup2).unwrap();
            let b = ssf_density(&shifted, p, Variant::Nup2).unwrap();
            // stay off the breakpoints, where a 1-ulp shift flips a step
            for t in uniform_grid(c, d, 200).into_iter().map(|t| t + 1e-7) {
                assert!(
                    (a.density.eval(t) - b.density.eval(t + shift)).norm() < 1e-9,
                    "p={p} t={t}"
                );
            }
        }
    }

    #[test]
    fn taylor_remainder_examples() {
        let pair = three_by_three();
        let zero =
            PerturbedPair::new(pair.h0().clone(), HermitianOperator::zeros(3).unwrap()).unwrap();
        let f = SmoothFunction::gaussian(0.2, 0.9).unwrap();
        assert!(taylor_remainder(&zero, &f, 3)
            .unwrap()
            .iter()
            .all(|z| z.norm() < 1e-15));
        let quad = SmoothFunction::real_polynomial(&[1.0, -2.0, 0.5]).unwrap();
        assert!(taylor_remainder(&pair, &quad, 3)
            .unwrap()
            .iter()
            .all(|z| z.norm() < 1e-10));
        let cube = SmoothFunction::monomial(3);
        let v = pair.v().matrix();
        let r = taylor_remainder(&pair, &cube, 3).unwrap();
        assert!((r - v * v * v).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn trace_formula_on_three_by_three() {
        let pair = three_by_three();
        let fs = [
            "exp:1",
            "exp:-2",
            "gauss:0,1",
            "rat:0+1i",
            "poly:0.5,-1,0,2,1,0.3",
        ];
        for p in 1..=4 {
            for spec in fs {
                let f = SmoothFunction::parse(spec).unwrap();
                for variant in [Variant::Nup1, Variant::Nup2] {
                    let check = trace_formula_check(&pair, p, &f, variant).unwrap();
                    assert!(check.rel_err < 1e-8, "p={p} {spec} {variant}: {check:?}");
                }
            }
        }
    }

    #[test]
    fn oversized_orders_are_refused_up_front() {
        let d: Vec<f64> = (0..10).map(f64::from).collect();
        let h = HermitianOperator::diagonal(&d).unwrap();
        let pair = PerturbedPair::new(h.clone(), h).unwrap();
        assert!(matches!(
            ssf_density(&pair, 8, Variant::Nup1),
            Err(Error::EnvelopeExceeded { .. })
        ));
        assert!(matches!(
            ssf_density(&pair, 9, Variant::Nup2),
            Err(Error::EnvelopeExceeded { .. })
        ));
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("nup2".parse::<Variant>().unwrap(), Variant::Nup2);
        assert_eq!(Variant::Nup1.to_string(), "nup1");
        assert!("nup3".parse::<Variant>().is_err());
    }
}
