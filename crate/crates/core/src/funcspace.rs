//! Test functions with exact derivatives.
//!
//! Every built-in family has a closed-form `k`-th derivative, so divided
//! differences with repeated knots, Taylor jets and trace formulas can all be
//! evaluated without numerical differentiation.
//!
//! The families double as concrete stand-ins for the function classes used by
//! trace formulas: complex exponentials `e^{isλ}` (whose Fourier measure is a
//! point mass), gaussians, and rational functions with poles off the real axis.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorial;

/// Anything that can report exact derivatives at a real point.
///
/// Divided differences only ever need jets at their knots, so this is the one
/// interface the [`crate::divdiff`] routines require.
pub trait Differentiable {
    fn derivative(&self, t: f64, k: usize) -> Result<Complex64>;
}

/// Function-class membership, tracked as bookkeeping only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunctionClass {
    /// Derivatives up to the working order are Fourier transforms of finite measures.
    Wp,
    /// Rational with nonreal poles.
    Rational,
    /// Bounded rational with nonreal poles.
    BoundedRational,
    /// Compactly supported and `p` times differentiable.
    CompactSupport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Coefficients `c_0, c_1, ...` of `Σ c_j λ^j`.
    Polynomial(Vec<Complex64>),
    /// `e^{isλ}` with real frequency `s`.
    Exponential { frequency: f64 },
    /// `exp(-((λ - center) / width)^2)`.
    Gaussian { center: f64, width: f64 },
    /// `Σ residue_j / (λ - pole_j)`.
    Rational {
        poles: Vec<Complex64>,
        residues: Vec<Complex64>,
    },
    /// `Σ a_j f_j`.
    Combination(Vec<(Complex64, SmoothFunction)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFunction {
    family: Family,
    max_order: Option<usize>,
    classes: BTreeSet<FunctionClass>,
}

impl SmoothFunction {
    pub fn polynomial(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        Ok(Self::from_family(Family::Polynomial(coefficients)))
    }

    /// Real-coefficient convenience wrapper around [`SmoothFunction::polynomial`].
    pub fn real_polynomial(coefficients: &[f64]) -> Result<Self> {
        Self::polynomial(
            coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        )
    }

    /// `λ ↦ λ^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::from_family(Family::Polynomial(c))
    }

    pub fn exponential(frequency: f64) -> Self {
        Self::from_family(Family::Exponential { frequency })
    }

    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidWidth(width));
        }
        Ok(Self::from_family(Family::Gaussian { center, width }))
    }

    pub fn rational(poles: Vec<Complex64>, residues: Vec<Complex64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if poles.len() != residues.len() {
            return Err(Error::ResidueMismatch {
                poles: poles.len(),
                residues: residues.len(),
            });
        }
        if let Some(p) = poles.iter().find(|p| p.im == 0.0 || !p.im.is_finite()) {
            return Err(Error::RealPole { re: p.re, im: p.im });
        }
        Ok(Self::from_family(Family::Rational { poles, residues }))
    }

    /// `1 / (λ - pole)`.
    pub fn simple_pole(pole: Complex64) -> Result<Self> {
        Self::rational(vec![pole], vec![Complex64::new(1.0, 0.0)])
    }

    pub fn combination(terms: Vec<(Complex64, SmoothFunction)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        Ok(Self::from_family(Family::Combination(terms)))
    }

    /// Caps the available derivative order; requests beyond it fail.
    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = Some(max_order);
        self
    }

    fn from_family(family: Family) -> Self {
        let classes = match &family {
            Family::Polynomial(_) => BTreeSet::new(),
            Family::Exponential { .. } | Family::Gaussian { .. } => {
                [FunctionClass::Wp].into_iter().collect()
            }
            Family::Rational { .. } => [
                FunctionClass::Wp,
                FunctionClass::Rational,
                FunctionClass::BoundedRational,
            ]
            .into_iter()
            .collect(),
            Family::Combination(terms) => {
                let mut it = terms.iter().map(|(_, f)| f.classes.clone());
                let first = it.next().unwrap_or_default();
                it.fold(first, |acc, c| acc.intersection(&c).copied().collect())
            }
        };
        let max_order = match &family {
            Family::Combination(terms) => terms.iter().filter_map(|(_, f)| f.max_order).min(),
            _ => None,
        };
        Self {
            family,
            max_order,
            classes,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `None` means derivatives of every order are available.
    pub fn max_order(&self) -> Option<usize> {
        self.max_order
    }

    pub fn classes(&self) -> &BTreeSet<FunctionClass> {
        &self.classes
    }

    pub fn is_polynomial(&self) -> bool {
        match &self.family {
            Family::Polynomial(_) => true,
            Family::Combination(t) => t.iter().all(|(_, f)| f.is_polynomial()),
            _ => false,
        }
    }

    pub fn is_rational(&self) -> bool {
        match &self.family {
            Family::Rational { .. } => true,
            Family::Combination(t) => t.iter().all(|(_, f)| f.is_rational()),
            _ => false,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.raw_derivative(t, 0)
    }

    /// Exact `k`-th derivative at `t`.
    pub fn eval_derivative(&self, t: f64, k: usize) -> Result<Complex64> {
        if let Some(max) = self.max_order {
            if k > max {
                return Err(Error::DerivativeUnavailable { requested: k, max });
            }
        }
        Ok(self.raw_derivative(t, k))
    }

    fn raw_derivative(&self, t: f64, k: usize) -> Complex64 {
        match &self.family {
            Family::Polynomial(c) => {
                // Horner on the k-th derivative coefficients.
                let mut acc = Complex64::new(0.0, 0.0);
                for j in (k..c.len()).rev() {
                    acc = acc * t + c[j] * falling_factorial(j, k);
                }
                acc
            }
            Family::Exponential { frequency } => {
                let is = Complex64::new(0.0, *frequency);
                is.powu(k as u32) * (is * t).exp()
            }
            Family::Gaussian { center, width } => {
                let x = (t - center) / width;
                let h = hermite(k, x);
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                Complex64::new(sign * h * (-x * x).exp() / width.powi(k as i32), 0.0)
            }
            Family::Rational { poles, residues } => {
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                let scale = sign * factorial(k);
                poles
                    .iter()
                    .zip(residues)
                    .map(|(z, r)| r * scale / (Complex64::new(t, 0.0) - z).powu(k as u32 + 1))
                    .sum()
            }
            Family::Combination(terms) => {
                terms.iter().map(|(a, f)| a * f.raw_derivative(t, k)).sum()
            }
        }
    }

    /// Common limit of `f^{(k)}(t)` as `t → ±∞`, when it exists and is known.
    ///
    /// Used to integrate derivatives against constant tails exactly.
    pub fn derivative_limit_at_infinity(&self, k: usize) -> Option<Complex64> {
        match &self.family {
            Family::Polynomial(c) => {
                let degree = c.len() - 1;
                match k.cmp(&degree) {
                    std::cmp::Ordering::Greater => Some(Complex64::new(0.0, 0.0)),
                    std::cmp::Ordering::Equal => Some(c[k] * factorial(k)),
                    std::cmp::Ordering::Less => {
                        if c[k + 1..].iter().all(|x| *x == Complex64::new(0.0, 0.0)) {
                            Some(c[k] * factorial(k))
                        } else {
                            None
                        }
                    }
                }
            }
            Family::Exponential { frequency } => {
                if *frequency == 0.0 {
                    Some(Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0))
                } else {
                    None
                }
            }
            Family::Gaussian { .. } | Family::Rational { .. } => Some(Complex64::new(0.0, 0.0)),
            Family::Combination(terms) => terms
                .iter()
                .map(|(a, f)| f.derivative_limit_at_infinity(k).map(|l| a * l))
                .sum(),
        }
    }

    /// Parses the compact spec language used on the command line.
    ///
    /// ```text
    /// poly:c0,c1,...          coefficients, lowest degree first (complex allowed)
    /// exp:s                   e^{isλ}
    /// gauss:center,width      exp(-((λ-center)/width)^2)
    /// rat:z1,z2,...           Σ 1/(λ - z_j), poles like 0+1i or -2i
    /// sum:(a*spec;spec;...)   linear combination, optional complex prefixes
    /// ```
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let err = |msg: &str| Error::SpecParse(format!("{msg}: `{spec}`"));
        if let Some((scalar, rest)) = split_scalar_prefix(spec) {
            let a = parse_complex(scalar)?;
            return Self::combination(vec![(a, Self::parse(rest)?)]);
        }
        let (tag, body) = spec
            .split_once(':')
            .ok_or_else(|| err("missing family tag"))?;
        let body = body.trim();
        match tag.trim() {
            "poly" => Self::polynomial(parse_list(body, parse_complex)?),
            "exp" => Ok(Self::exponential(parse_real(body)?)),
            "gauss" => {
                let v = parse_list(body, parse_real)?;
                if v.len() != 2 {
                    return Err(err("gauss expects center,width"));
                }
                Self::gaussian(v[0], v[1])
            }
            "rat" => {
                let poles = parse_list(body, parse_complex)?;
                let residues = vec![Complex64::new(1.0, 0.0); poles.len()];
                Self::rational(poles, residues)
            }
            "sum" => {
                let inner = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(|| err("sum expects (spec;spec;...)"))?;
                let mut terms = Vec::new();
                for part in split_top_level(inner, ';') {
                    match split_scalar_prefix(part) {
                        Some((scalar, rest)) => {
                            terms.push((parse_complex(scalar)?, Self::parse(rest)?))
                        }
                        None => terms.push((Complex64::new(1.0, 0.0), Self::parse(part)?)),
                    }
                }
                Self::combination(terms)
            }
            other => Err(Error::SpecParse(format!("unknown family `{other}`"))),
        }
    }
}

impl Differentiable for SmoothFunction {
    fn derivative(&self, t: f64, k: usize) -> Result<Complex64> {
        self.eval_derivative(t, k)
    }
}

/// The derivative `g = f^{(order)}` of another function, as a function in its own right.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeOf<'a, F: ?Sized> {
    pub inner: &'a F,
    pub order: usize,
}

impl<F: Differentiable + ?Sized> Differentiable for DerivativeOf<'_, F> {
    fn derivative(&self, t: f64, k: usize) -> Result<Complex64> {
        self.inner.derivative(t, k + self.order)
    }
}

impl fmt::Display for SmoothFunction {
    /// Writes the function back in spec-language form; `parse` accepts the output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|z| format_complex(*z)).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            Family::Exponential { frequency } => write!(f, "exp:{frequency}"),
            Family::Gaussian { center, width } => write!(f, "gauss:{center},{width}"),
            Family::Rational { poles, residues } => {
                if residues.iter().all(|r| *r == Complex64::new(1.0, 0.0)) {
                    let parts: Vec<String> = poles.iter().map(|z| format_complex(*z)).collect();
                    write!(f, "rat:{}", parts.join(","))
                } else {
                    let parts: Vec<String> = poles
                        .iter()
                        .zip(residues)
                        .map(|(z, r)| {
                            format!("({})*rat:{}", format_complex(*r), format_complex(*z))
                        })
                        .collect();
                    write!(f, "sum:({})", parts.join(";"))
                }
            }
            Family::Combination(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(a, g)| format!("({})*{}", format_complex(*a), g))
                    .collect();
                write!(f, "sum:({})", parts.join(";"))
            }
        }
    }
}

fn falling_factorial(j: usize, k: usize) -> f64 {
    ((j + 1 - k)..=j).fold(1.0, |acc, m| acc * m as f64)
}

/// Physicists' Hermite polynomial `H_k(x)`.
fn hermite(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if k == 0 {
        return prev;
    }
    for n in 1..k {
        let next = 2.0 * x * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::SpecParse(format!("bad number `{s}`")))
}

/// Parses `3`, `-2.5`, `1+2i`, `-i`, `0.5e-3-4i`, optionally parenthesised.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let mut s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        s = inner.trim();
    }
    let bad = || Error::SpecParse(format!("bad complex number `{s}`"));
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i]).map_err(|_| bad())?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse_real(x).map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_list<T>(body: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    if body.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    split_top_level(body, ',').into_iter().map(item).collect()
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// Splits `a*spec` at the first top-level `*` that precedes the family tag.
fn split_scalar_prefix(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ':' if depth == 0 => return None,
            '*' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}
