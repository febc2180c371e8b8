//! Sparse multivariate polynomials with real coefficients.
//!
//! A [`Polynomial`] is always kept in canonical form: like terms combined,
//! exact zeros dropped and terms sorted in graded order (total degree
//! ascending, lexicographically descending within a degree). The same order
//! is used by [`crate::basis::MultiIndexSet`], so a basis function and its
//! monomial expansion line up column for column.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{KoopmanError, Result};

/// Graded order on exponent tuples of equal length.
pub fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GradedKey(Vec<u32>);

impl Ord for GradedKey {
    fn cmp(&self, other: &Self) -> Ordering {
        graded_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for GradedKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One term `coef * x_0^exp[0] * ... * x_{m-1}^exp[m-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exp: Vec<u32>,
}

impl Monomial {
    pub fn new(coef: f64, exp: impl Into<Vec<u32>>) -> Self {
        Monomial { coef, exp: exp.into() }
    }

    pub fn degree(&self) -> u32 {
        self.exp.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    m: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(m: usize) -> Self {
        Polynomial { m, terms: Vec::new() }
    }

    pub fn constant(m: usize, value: f64) -> Self {
        let terms = if value == 0.0 {
            Vec::new()
        } else {
            vec![Monomial::new(value, vec![0; m])]
        };
        Polynomial { m, terms }
    }

    /// The coordinate function `x_var`.
    pub fn variable(m: usize, var: usize) -> Result<Self> {
        if var >= m {
            return Err(KoopmanError::IndexOutOfRange { index: var, len: m });
        }
        let mut exp = vec![0; m];
        exp[var] = 1;
        Ok(Polynomial {
            m,
            terms: vec![Monomial::new(1.0, exp)],
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn max_exponent(&self) -> u32 {
        self.terms.iter().flat_map(|t| t.exp.iter().copied()).max().unwrap_or(0)
    }

    /// Coefficient of the monomial with exponent `exp` (0 if absent).
    pub fn coefficient(&self, exp: &[u32]) -> f64 {
        self.terms
            .binary_search_by(|t| graded_cmp(&t.exp, exp))
            .map(|i| self.terms[i].coef)
            .unwrap_or(0.0)
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        if factor == 0.0 {
            return Polynomial::zero(self.m);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial::new(t.coef * factor, t.exp.clone()))
            .filter(|t| t.coef != 0.0)
            .collect();
        Polynomial { m: self.m, terms }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        evaluate(self, x)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(KoopmanError::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn collect_sorted(m: usize, acc: BTreeMap<GradedKey, f64>) -> Polynomial {
    let terms = acc
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(k, c)| Monomial { coef: c, exp: k.0 })
        .collect();
    Polynomial { m, terms }
}

/// Combine like terms, drop exact zeros, sort in graded order.
pub fn canonicalize(terms: impl IntoIterator<Item = Monomial>, m: usize) -> Result<Polynomial> {
    let mut acc: BTreeMap<GradedKey, f64> = BTreeMap::new();
    for t in terms {
        check_dims(m, t.exp.len())?;
        if !t.coef.is_finite() {
            return Err(KoopmanError::NonFinite(format!(
                "coefficient {} of monomial {:?}",
                t.coef, t.exp
            )));
        }
        *acc.entry(GradedKey(t.exp)).or_insert(0.0) += t.coef;
    }
    Ok(collect_sorted(m, acc))
}

pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    check_dims(a.m, b.m)?;
    let mut acc: BTreeMap<GradedKey, f64> = BTreeMap::new();
    for t in a.terms.iter().chain(&b.terms) {
        *acc.entry(GradedKey(t.exp.clone())).or_insert(0.0) += t.coef;
    }
    Ok(collect_sorted(a.m, acc))
}

/// Double-double accumulator: `hi + lo` carries about 106 bits.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
        self.lo += err;
    }

    /// Adds the exact product `a * b`.
    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let err = a.mul_add(b, -p);
        self.add(p);
        self.lo += err;
    }

    fn add_compensated(&mut self, other: Compensated) {
        self.add(other.hi);
        self.lo += other.lo;
    }

    fn scale(self, factor: f64) -> Compensated {
        let mut out = Compensated::default();
        out.add_product(self.hi, factor);
        out.add_product(self.lo, factor);
        out
    }

    fn divide(self, d: f64) -> Compensated {
        let q1 = self.hi / d;
        let r = (-q1).mul_add(d, self.hi) + self.lo;
        let q2 = r / d;
        Compensated { hi: q1, lo: 0.0 }.plus(q2)
    }

    fn plus(mut self, x: f64) -> Compensated {
        self.add(x);
        self
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn product_buckets(a: &Polynomial, b: &Polynomial) -> BTreeMap<GradedKey, Compensated> {
    let mut acc: BTreeMap<GradedKey, Compensated> = BTreeMap::new();
    for ta in &a.terms {
        for tb in &b.terms {
            let exp: Vec<u32> = ta.exp.iter().zip(&tb.exp).map(|(x, y)| x + y).collect();
            acc.entry(GradedKey(exp)).or_default().add_product(ta.coef, tb.coef);
        }
    }
    acc
}

/// Product; coefficients multiply and exponents add. Like terms are
/// accumulated in double-double and rounded once.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    check_dims(a.m, b.m)?;
    let acc = product_buckets(a, b).into_iter().map(|(k, c)| (k, c.value())).collect();
    Ok(collect_sorted(a.m, acc))
}

pub fn partial_derivative(p: &Polynomial, var: usize) -> Result<Polynomial> {
    if var >= p.m {
        return Err(KoopmanError::IndexOutOfRange { index: var, len: p.m });
    }
    let terms = p.terms.iter().filter(|t| t.exp[var] > 0).map(|t| {
        let mut exp = t.exp.clone();
        let power = exp[var];
        exp[var] -= 1;
        Monomial::new(t.coef * power as f64, exp)
    });
    canonicalize(terms, p.m)
}

/// `∫_{[-1,1]^m} x^exp dx` in closed form.
pub fn box_monomial_integral(exp: &[u32]) -> f64 {
    let mut w = 1.0;
    for &e in exp {
        if e % 2 == 1 {
            return 0.0;
        }
        w *= 2.0 / (e as f64 + 1.0);
    }
    w
}

/// `⟨a, b⟩ = ∫_{[-1,1]^m} a·b dx` with unit weight.
///
/// Each product monomial with all-even exponents contributes
/// `coef · 2^m / ∏(α_k + 1)`. Contributions are summed in canonical term
/// order without intermediate rounding, which matters because monomial
/// expansions of high-order Legendre products cancel heavily.
pub fn box_inner_product(a: &Polynomial, b: &Polynomial) -> Result<f64> {
    check_dims(a.m, b.m)?;
    let volume = 2f64.powi(a.m as i32);
    let mut total = Compensated::default();
    for (key, coef) in product_buckets(a, b) {
        if key.0.iter().any(|e| e % 2 == 1) {
            continue;
        }
        let denom: f64 = key.0.iter().map(|&e| e as f64 + 1.0).product();
        total.add_compensated(coef.scale(volume).divide(denom));
    }
    Ok(total.value())
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0; n as usize + 1];
    for j in 1..n as usize {
        row[j] = row[j - 1] * (n as usize - j + 1) as f64 / j as f64;
    }
    row
}

/// Expand `p(center + half_width ∘ y)` as a polynomial in `y`.
pub fn affine_substitute(p: &Polynomial, center: &[f64], half_width: &[f64]) -> Result<Polynomial> {
    check_dims(p.m, center.len())?;
    check_dims(p.m, half_width.len())?;
    if let Some(&h) = half_width.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(KoopmanError::InvalidHalfWidth(h));
    }
    let mut out: Vec<Monomial> = Vec::new();
    for term in &p.terms {
        let mut partial = vec![Monomial::new(term.coef, vec![0; p.m])];
        for (k, &e) in term.exp.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let binom = binomial_row(e);
            let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
            for j in 0..=e {
                let factor = binom[j as usize] * center[k].powi((e - j) as i32) * half_width[k].powi(j as i32);
                if factor == 0.0 {
                    continue;
                }
                for t in &partial {
                    let mut exp = t.exp.clone();
                    exp[k] = j;
                    next.push(Monomial::new(t.coef * factor, exp));
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    canonicalize(out, p.m)
}

pub fn evaluate(p: &Polynomial, x: &[f64]) -> Result<f64> {
    check_dims(p.m, x.len())?;
    Ok(p.terms
        .iter()
        .map(|t| {
            t.exp
                .iter()
                .zip(x)
                .fold(t.coef, |acc, (&e, &xi)| acc * xi.powi(e as i32))
        })
        .sum())
}
