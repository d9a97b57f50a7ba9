//! Property checks behind `verify` and `report`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ssf_core::funcspace::SmoothFunction;
use ssf_core::moi::{
    kernel_trace_identity, trace_derivative, PerturbedPair, TraceMethod, FD_MAX_ORDER,
};
use ssf_core::multimeasure::build_m;
use ssf_core::piecewise::PiecewisePolynomial;
use ssf_core::sample::function_suite;
use ssf_core::spectral::{hs_norm, trace_norm};
use ssf_core::ssf::{
    ssf_density, summarize, trace_formula_against, uniform_grid, SsfResult, Variant,
};
use ssf_core::{factorial, rel_err};

pub const TRACE_TOL_EXACT: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-6;
pub const METHOD_TOL: f64 = 1e-9;
pub const FD_TOL: f64 = 1e-5;
pub const KERNEL_TOL: f64 = 1e-8;
pub const VARIANT_TOL: f64 = 1e-9;
pub const MASS_TOL: f64 = 1e-9;
pub const SUPPORT_TOL: f64 = 1e-12;
pub const VARIATION_SLACK: f64 = 1e-9;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Size of a deliberate density defect used as a negative control.
pub const CORRUPTION: f64 = 1e-3;

/// One line of a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub pair: String,
    pub p: usize,
    pub function_spec: Option<String>,
    pub variant: Option<Variant>,
    pub method: Option<TraceMethod>,
    pub trace_side: Complex64,
    pub integral_side: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(check: &'static str, pair: &str, p: usize) -> Self {
        Self {
            check,
            pair: pair.to_string(),
            p,
            function_spec: None,
            variant: None,
            method: None,
            trace_side: Complex64::new(0.0, 0.0),
            integral_side: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            rel_err: 0.0,
            tolerance: 0.0,
            pass: false,
        }
    }

    /// Compares `value` with `reference`; passes when `rel_err ≤ tolerance`.
    fn relative(mut self, reference: Complex64, value: Complex64, tolerance: f64) -> Self {
        self.trace_side = reference;
        self.integral_side = value;
        self.abs_err = (value - reference).norm();
        self.rel_err = rel_err(value, reference);
        self.tolerance = tolerance;
        self.pass = self.rel_err <= tolerance;
        self
    }

    /// Passes when `abs_err ≤ tolerance`.
    fn absolute(
        mut self,
        reference: Complex64,
        value: Complex64,
        abs_err: f64,
        tolerance: f64,
    ) -> Self {
        self.trace_side = reference;
        self.integral_side = value;
        self.abs_err = abs_err;
        self.rel_err = abs_err / (1.0 + reference.norm());
        self.tolerance = tolerance;
        self.pass = abs_err <= tolerance;
        self
    }

    fn with_function(mut self, f: &SmoothFunction) -> Self {
        self.function_spec = Some(f.to_string());
        self
    }

    fn with_variant(mut self, v: Variant) -> Self {
        self.variant = Some(v);
        self
    }

    fn with_method(mut self, m: TraceMethod) -> Self {
        self.method = Some(m);
        self
    }
}

/// A labelled matrix pair.
pub struct NamedPair {
    pub name: String,
    pub pair: PerturbedPair,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub p_max: usize,
    pub seed: u64,
    pub corrupt_eta: bool,
}

/// Trace-formula tolerance for `f`.
pub fn trace_tolerance(f: &SmoothFunction) -> f64 {
    if f.is_polynomial() || f.is_rational() {
        TRACE_TOL_EXACT
    } else {
        TRACE_TOL
    }
}

/// Adds `CORRUPTION` on the hull.
pub fn corrupt(result: SsfResult, pair: &PerturbedPair) -> SsfResult {
    let (c, d) = result.hull;
    let bump = if d > c {
        PiecewisePolynomial::new(
            vec![c, d],
            vec![vec![Complex64::new(CORRUPTION, 0.0)]],
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .expect("valid bump")
    } else {
        PiecewisePolynomial::constant(Complex64::new(CORRUPTION, 0.0))
    };
    let one = Complex64::new(1.0, 0.0);
    let density = PiecewisePolynomial::linear_combination(&[(one, &result.density), (one, &bump)]);
    summarize(pair, result.order, result.variant, density)
}

fn suite_rng(seed: u64, pair_index: usize, p: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ ((pair_index as u64) << 32) ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
    )
}

/// For a 1×1 pair `a`, `v`: `η_p(t) = sign(v) (a + v - t)^{p-1} / (p-1)!`
/// between `a` and `a + v`. Reports the worst interior point.
fn scalar_closed_form(name: &str, pair: &PerturbedPair, r: &SsfResult) -> CheckRecord {
    let a = pair.h0().matrix()[(0, 0)].re;
    let v = pair.v().matrix()[(0, 0)].re;
    let p = r.order;
    let (c, d) = r.hull;
    let mut worst = (0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    if d > c {
        for k in 1..200 {
            let t = c + (d - c) * k as f64 / 200.0;
            let expect = Complex64::new(
                v.signum() * (a + v - t).powi(p as i32 - 1) / factorial(p - 1),
                0.0,
            );
            let got = r.density.eval(t);
            let e = (got - expect).norm();
            if e > worst.0 || e.is_nan() {
                worst = (e, expect, got);
            }
        }
    }
    CheckRecord::new("scalar_closed_form", name, p)
        .with_variant(r.variant)
        .absolute(worst.1, worst.2, worst.0, CLOSED_FORM_TOL)
}

/// Every check for one pair at one order.
fn checks_at(
    index: usize,
    named: &NamedPair,
    p: usize,
    cfg: &SuiteConfig,
) -> ssf_core::Result<Vec<CheckRecord>> {
    let pair = &named.pair;
    let name = named.name.as_str();
    let functions = function_suite(&mut suite_rng(cfg.seed, index, p), p);
    let mut out = Vec::new();

    let mut densities = Vec::new();
    for variant in [Variant::Nup1, Variant::Nup2] {
        let mut r = ssf_density(pair, p, variant)?;
        if cfg.corrupt_eta {
            r = corrupt(r, pair);
        }
        densities.push(r);
    }

    for r in &densities {
        for f in &functions {
            let t = trace_formula_against(pair, r, f)?;
            out.push(
                CheckRecord::new("trace_formula", name, p)
                    .with_function(f)
                    .with_variant(r.variant)
                    .relative(t.trace_side, t.integral_side, trace_tolerance(f)),
            );
        }
        let expect = pair.v().power_trace(p) / factorial(p);
        out.push(
            CheckRecord::new("mass", name, p)
                .with_variant(r.variant)
                .absolute(expect, r.mass, (r.mass - expect).norm(), MASS_TOL),
        );
        let (c, d) = r.hull;
        let width = (d - c).max(1.0);
        let exterior: Vec<f64> = (1..=50)
            .flat_map(|k| {
                let s = width * k as f64 / 50.0;
                [c - s, d + s]
            })
            .collect();
        let worst = r
            .density
            .sample(&exterior)
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()));
        out.push(
            CheckRecord::new("support", name, p)
                .with_variant(r.variant)
                .absolute(
                    Complex64::new(0.0, 0.0),
                    Complex64::new(worst, 0.0),
                    worst,
                    SUPPORT_TOL,
                ),
        );
    }

    if pair.dimension() == 1 {
        for r in &densities {
            out.push(scalar_closed_form(name, pair, r));
        }
    }

    let grid = uniform_grid(pair.hull().0, pair.hull().1, 1000);
    let a = densities[0].density.sample(&grid);
    let b = densities[1].density.sample(&grid);
    let gap = a
        .iter()
        .zip(&b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
    out.push(CheckRecord::new("variant_agreement", name, p).absolute(
        Complex64::new(0.0, 0.0),
        Complex64::new(gap, 0.0),
        gap,
        VARIANT_TOL,
    ));

    let m = build_m(pair.d0(), pair.v(), p)?;
    let bound = if p == 1 {
        trace_norm(pair.v())?
    } else {
        hs_norm(pair.v()).powi(p as i32)
    };
    let tv = m.total_variation();
    out.push(CheckRecord::new("variation", name, p).absolute(
        Complex64::new(bound, 0.0),
        Complex64::new(tv, 0.0),
        (tv - bound).max(0.0),
        VARIATION_SLACK,
    ));

    let (c, d) = pair.hull();
    for f in &functions {
        let reference = trace_derivative(pair, f, p, TraceMethod::OperatorTrace)?;
        for method in TraceMethod::ALL {
            if method == TraceMethod::OperatorTrace
                || (method == TraceMethod::FiniteDifference && p > FD_MAX_ORDER)
            {
                continue;
            }
            let tol = if method == TraceMethod::FiniteDifference {
                FD_TOL
            } else {
                METHOD_TOL
            };
            let value = trace_derivative(pair, f, p, method)?;
            out.push(
                CheckRecord::new("method_agreement", name, p)
                    .with_function(f)
                    .with_method(method)
                    .relative(reference, value, tol),
            );
        }
        let k = kernel_trace_identity(pair, f, p, c, d)?;
        out.push(
            CheckRecord::new("kernel_identity", name, p)
                .with_function(f)
                .with_variant(Variant::Nup1)
                .relative(k.lhs, k.rhs_m1, KERNEL_TOL),
        );
        out.push(
            CheckRecord::new("kernel_identity", name, p)
                .with_function(f)
                .with_variant(Variant::Nup2)
                .relative(k.lhs, k.rhs_m, KERNEL_TOL),
        );
    }
    Ok(out)
}

/// Runs the suite on every pair and order; records come back in a fixed order
/// regardless of scheduling.
pub fn run_suite(pairs: &[NamedPair], cfg: &SuiteConfig) -> ssf_core::Result<Vec<CheckRecord>> {
    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|i| (1..=cfg.p_max).map(move |p| (i, p)))
        .collect();
    let chunks = jobs
        .par_iter()
        .map(|&(i, p)| checks_at(i, &pairs[i], p, cfg))
        .collect::<ssf_core::Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Trace-formula records for `f` at orders `1..=p_max`.
pub fn trace_report(
    named: &NamedPair,
    f: &SmoothFunction,
    p_max: usize,
    variants: &[Variant],
) -> ssf_core::Result<Vec<CheckRecord>> {
    let jobs: Vec<(usize, Variant)> = (1..=p_max)
        .flat_map(|p| variants.iter().map(move |&v| (p, v)))
        .collect();
    jobs.par_iter()
        .map(|&(p, variant)| {
            let r = ssf_density(&named.pair, p, variant)?;
            let t = trace_formula_against(&named.pair, &r, f)?;
            Ok(CheckRecord::new("trace_formula", &named.name, p)
                .with_function(f)
                .with_variant(variant)
                .relative(t.trace_side, t.integral_side, trace_tolerance(f)))
        })
        .collect()
}
