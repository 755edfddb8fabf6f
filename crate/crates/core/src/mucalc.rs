//! μ-derivatives and μ-binomial coefficients.
//!
//! For weights `μ = (μ₀,…,μₙ)` the μ-binomial coefficient `binom(z,n)_μ` is the
//! (confluent) divided difference of `s ↦ s^z` on the nodes `μ₀,…,μₙ`, so that
//! `∂_μ(t^z) = binom(z,n)_μ · t^{z−n}`.  Two independent routes are provided:
//!
//! * an exact route over ℚ(q^{1/2}) for weights `μᵢ = q^{kᵢ}`, expressed as a
//!   polynomial in `Z = q^z` (and in `z` itself when weights repeat);
//! * a floating-point route via a Newton divided-difference table with
//!   derivative jets at merged nodes.
//!
//! A Hermite-interpolation solve and a vertical-contour quadrature serve as
//! oracles for both.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{MuCalcError, ParseError};
use crate::parse::{self, Expr};
use crate::scalar::{eval_scalar, Poly, QScalar};

pub const DEFAULT_NODE_MERGE_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DIGITS_LOST: f64 = 10.0;
/// Absolute tail budget used when the contour truncation height is not given.
pub const DEFAULT_CONTOUR_TAIL: f64 = 1e-10;

/// Weights `μᵢ = q^{kᵢ}` keyed by their integer exponents, optionally with an
/// explicit list of positive reals for the general numeric path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTuple {
    pub exponents: Vec<i32>,
    pub alt_reals: Option<Vec<f64>>,
}

impl WeightTuple {
    pub fn from_exponents(exponents: Vec<i32>) -> Result<Self, MuCalcError> {
        if exponents.is_empty() {
            return Err(MuCalcError::EmptyWeights);
        }
        Ok(WeightTuple { exponents, alt_reals: None })
    }

    pub fn from_reals(reals: Vec<f64>) -> Result<Self, MuCalcError> {
        if reals.is_empty() {
            return Err(MuCalcError::EmptyWeights);
        }
        check_positive(&reals)?;
        Ok(WeightTuple { exponents: Vec::new(), alt_reals: Some(reals) })
    }

    pub fn len(&self) -> usize {
        match &self.alt_reals {
            Some(r) => r.len(),
            None => self.exponents.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `n` of `binom(z, n)`: one less than the number of weights.
    pub fn order(&self) -> usize {
        self.len().saturating_sub(1)
    }

    /// Numeric weights; explicit reals win over `q^{kᵢ}`.
    pub fn reals(&self, q: f64) -> Vec<f64> {
        match &self.alt_reals {
            Some(r) => r.clone(),
            None => self.exponents.iter().map(|&k| q.powi(k)).collect(),
        }
    }

    /// Distinct exponents with their multiplicities, in increasing order.
    pub fn multiplicities(&self) -> Vec<(i32, usize)> {
        let mut m: BTreeMap<i32, usize> = BTreeMap::new();
        for &k in &self.exponents {
            *m.entry(k).or_default() += 1;
        }
        m.into_iter().collect()
    }

    /// Drops `μ₀`, the tuple appearing on the right of the Pascal identity.
    pub fn without_first(&self) -> Option<WeightTuple> {
        if self.len() < 2 {
            return None;
        }
        Some(WeightTuple {
            exponents: self.exponents.iter().skip(1).copied().collect(),
            alt_reals: self.alt_reals.as_ref().map(|r| r[1..].to_vec()),
        })
    }
}

fn check_positive(mu: &[f64]) -> Result<(), MuCalcError> {
    match mu.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
        Some(&bad) => Err(MuCalcError::NonPositiveWeight(bad)),
        None => Ok(()),
    }
}

/// Exact μ-binomial coefficient as `Σ c_{k,d} Z^k z^d` with `Z = q^z`.
///
/// Powers of `z` only appear for repeated weights. Coefficients are kept in
/// lowest terms; [`numerator`](Self::numerator) and
/// [`denominator`](Self::denominator) expose the common-denominator form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MuBinomialExact {
    terms: BTreeMap<(i32, u32), QScalar>,
}

impl MuBinomialExact {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: QScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(0, 0, c);
        out
    }

    /// `c · Z^k · z^d`.
    pub fn monomial(c: QScalar, k: i32, d: u32) -> Self {
        let mut out = Self::zero();
        out.add_term(k, d, c);
        out
    }

    fn add_term(&mut self, k: i32, d: u32, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((k, d)).or_insert_with(QScalar::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(k, d));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, &QScalar)> {
        self.terms.iter().map(|(&(k, d), c)| (k, d, c))
    }

    pub fn coefficient(&self, k: i32, d: u32) -> QScalar {
        self.terms.get(&(k, d)).cloned().unwrap_or_else(QScalar::zero)
    }

    /// True when no explicit power of `z` occurs (all weights distinct).
    pub fn is_pure_in_z_power(&self) -> bool {
        self.terms.keys().all(|&(_, d)| d == 0)
    }

    /// Least common denominator of the coefficients, a monic polynomial in `q^{1/2}`.
    pub fn denominator(&self) -> QScalar {
        let mut den = Poly::one();
        for c in self.terms.values() {
            den = Poly::lcm(&den, c.denominator());
        }
        QScalar::from_parts(0, den, Poly::one())
    }

    /// Numerator over [`denominator`](Self::denominator): each coefficient is a
    /// Laurent polynomial in `q^{1/2}`.
    pub fn numerator(&self) -> MuBinomialExact {
        self.scale(&self.denominator())
    }

    pub fn scale(&self, c: &QScalar) -> MuBinomialExact {
        let mut out = Self::zero();
        for (&(k, d), a) in &self.terms {
            out.add_term(k, d, a * c);
        }
        out
    }

    /// Substitutes `z → z + 1`, i.e. `Z → qZ` together with `z → z + 1`.
    pub fn shift_z(&self) -> MuBinomialExact {
        let mut out = Self::zero();
        for (&(k, d), c) in &self.terms {
            let c = c * &QScalar::q_pow(k);
            let mut binom = BigRational::from_integer(1.into());
            for j in 0..=d {
                out.add_term(k, j, &c * &QScalar::from_rational(binom.clone()));
                binom = binom * BigRational::from_integer((d - j).into())
                    / BigRational::from_integer((j + 1).into());
            }
        }
        out
    }

    /// Value at `z = 0` (so `Z = 1`).
    pub fn value_at_origin(&self) -> QScalar {
        self.terms.iter().filter(|((_, d), _)| *d == 0).map(|(_, c)| c.clone()).sum()
    }

    /// Numerical value at a given `q` and complex `z`, principal branch.
    pub fn eval(&self, q: f64, z: Complex64) -> Complex64 {
        let lq = q.ln();
        self.terms
            .iter()
            .map(|(&(k, d), c)| {
                let zk = (z * (k as f64 * lq)).exp();
                zk * z.powu(d) * c.eval(q)
            })
            .sum()
    }
}

impl Add for &MuBinomialExact {
    type Output = MuBinomialExact;
    fn add(self, rhs: &MuBinomialExact) -> MuBinomialExact {
        let mut out = self.clone();
        for (&(k, d), c) in &rhs.terms {
            out.add_term(k, d, c.clone());
        }
        out
    }
}

impl Neg for &MuBinomialExact {
    type Output = MuBinomialExact;
    fn neg(self) -> MuBinomialExact {
        self.scale(&QScalar::from_int(-1))
    }
}

impl Sub for &MuBinomialExact {
    type Output = MuBinomialExact;
    fn sub(self, rhs: &MuBinomialExact) -> MuBinomialExact {
        self + &(-rhs)
    }
}

impl fmt::Display for MuBinomialExact {
    /// Canonical form: `(numerator)/(denominator)`, numerator expanded with
    /// terms ordered by decreasing power of `Z`, then of `z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.denominator();
        let num = self.scale(&den);
        let body = if num.is_zero() {
            "0".to_string()
        } else {
            num.terms
                .iter()
                .rev()
                .map(|(&(k, d), c)| {
                    let mut parts = Vec::new();
                    if !c.is_one() || (k == 0 && d == 0) {
                        parts.push(format!("({c})"));
                    }
                    match k {
                        0 => {}
                        1 => parts.push("Z".into()),
                        _ => parts.push(format!("Z^{k}")),
                    }
                    match d {
                        0 => {}
                        1 => parts.push("z".into()),
                        _ => parts.push(format!("z^{d}")),
                    }
                    parts.join("*")
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/({den})")
        }
    }
}

impl FromStr for MuBinomialExact {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        eval_zpoly(&parse::parse_expr(s)?)
    }
}

fn mentions_z(e: &Expr) -> bool {
    match e {
        Expr::Num(_) => false,
        Expr::Var(v) => v == "Z" || v == "z",
        Expr::Neg(a) | Expr::Pow(a, _) => mentions_z(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            mentions_z(a) || mentions_z(b)
        }
    }
}

fn zpoly_mul(a: &MuBinomialExact, b: &MuBinomialExact) -> MuBinomialExact {
    let mut out = MuBinomialExact::zero();
    for (&(k1, d1), c1) in &a.terms {
        for (&(k2, d2), c2) in &b.terms {
            out.add_term(k1 + k2, d1 + d2, c1 * c2);
        }
    }
    out
}

fn eval_zpoly(e: &Expr) -> Result<MuBinomialExact, ParseError> {
    if !mentions_z(e) {
        return Ok(MuBinomialExact::constant(eval_scalar(e)?));
    }
    Ok(match e {
        Expr::Var(v) if v == "Z" => MuBinomialExact::monomial(QScalar::one(), 1, 0),
        Expr::Var(_) => MuBinomialExact::monomial(QScalar::one(), 0, 1),
        Expr::Neg(a) => -&eval_zpoly(a)?,
        Expr::Add(a, b) => &eval_zpoly(a)? + &eval_zpoly(b)?,
        Expr::Sub(a, b) => &eval_zpoly(a)? - &eval_zpoly(b)?,
        Expr::Mul(a, b) => zpoly_mul(&eval_zpoly(a)?, &eval_zpoly(b)?),
        Expr::Div(a, b) => {
            if mentions_z(b) {
                return Err(ParseError::MalformedTerm("division by an expression in Z or z".into()));
            }
            let d = eval_scalar(b)?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero);
            }
            eval_zpoly(a)?.scale(&d.recip())
        }
        Expr::Pow(base, exp) => {
            let bad = || ParseError::BadExponent(exp.to_string());
            if !exp.is_integer() {
                return Err(bad());
            }
            let n = exp.to_integer().to_i32().ok_or_else(bad)?;
            let b = eval_zpoly(base)?;
            if n < 0 {
                // Only Z^k monomials are invertible.
                let mut it = b.terms.iter();
                match (it.next(), it.next()) {
                    (Some((&(k, 0), c)), None) => {
                        MuBinomialExact::monomial(c.pow(n), k * n, 0)
                    }
                    _ => return Err(bad()),
                }
            } else {
                let mut acc = MuBinomialExact::constant(QScalar::one());
                for _ in 0..n {
                    acc = zpoly_mul(&acc, &b);
                }
                acc
            }
        }
        Expr::Num(_) => unreachable!(),
    })
}

/// Polynomial in `z` with exact coefficients, low degree first.
type ZSeries = Vec<QScalar>;

fn series_mul_trunc(a: &[QScalar], b: &[QScalar], len: usize) -> Vec<QScalar> {
    let mut out = vec![QScalar::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `z(z−1)⋯(z−r+1)/r!` as a polynomial in `z`.
fn falling_over_factorial(r: usize) -> ZSeries {
    let mut p: ZSeries = vec![QScalar::one()];
    for j in 0..r {
        // multiply by (z − j)/(j+1)
        let inv = QScalar::from_ratio(1, j as i64 + 1);
        let mut next = vec![QScalar::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            let c = c * &inv;
            next[i + 1] = &next[i + 1] + &c;
            next[i] = &next[i] - &(&c * &QScalar::from_int(j as i64));
        }
        p = next;
    }
    p
}

/// Exact μ-binomial coefficient for weights `q^{kᵢ}`.
///
/// Repeated exponents are handled by the confluent divided-difference formula:
/// at a node `x` of multiplicity `m` the contribution is the `h^{m−1}` Taylor
/// coefficient of `(x+h)^z / ∏_{y≠x}(x+h−y)^{m_y}`.
pub fn mu_binomial_exact(n: usize, weights: &WeightTuple) -> Result<MuBinomialExact, MuCalcError> {
    if weights.exponents.is_empty() {
        return Err(MuCalcError::EmptyWeights);
    }
    if weights.exponents.len() != n + 1 {
        return Err(MuCalcError::WrongLength { expected: n + 1, got: weights.exponents.len() });
    }
    let nodes = weights.multiplicities();
    let mut out = MuBinomialExact::zero();
    for (i, &(k, m)) in nodes.iter().enumerate() {
        let x = QScalar::q_pow(k);
        // Taylor series of ∏_{j≠i} (x − x_j + h)^{−m_j} up to h^{m−1}.
        let mut g: Vec<QScalar> = vec![QScalar::one()];
        g.resize(m, QScalar::zero());
        for (j, &(kj, mj)) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = &x - &QScalar::q_pow(kj);
            let dinv = d.recip();
            let lead = dinv.pow(mj as i32);
            // (1 + h/d)^{−mj} = Σ_r (−1)^r C(mj+r−1, r) (h/d)^r
            let mut factor = Vec::with_capacity(m);
            let mut binom = BigRational::from_integer(1.into());
            let mut hpow = QScalar::one();
            for r in 0..m {
                let sign = if r % 2 == 0 { 1 } else { -1 };
                factor.push(&(&lead * &hpow) * &QScalar::from_rational(binom.clone() * BigRational::from_integer(sign.into())));
                binom = binom * BigRational::from_integer((mj + r).into())
                    / BigRational::from_integer((r + 1).into());
                hpow = &hpow * &dinv;
            }
            g = series_mul_trunc(&g, &factor, m);
        }
        // (x+h)^z = Z^k Σ_r [falling(z,r)/r!] x^{−r} h^r; take the h^{m−1} coefficient.
        let mut contrib: ZSeries = vec![QScalar::zero(); m];
        for r in 0..m {
            let gr = &g[m - 1 - r];
            if gr.is_zero() {
                continue;
            }
            let c = gr * &x.pow(-(r as i32));
            for (deg, fc) in falling_over_factorial(r).iter().enumerate() {
                contrib[deg] = &contrib[deg] + &(fc * &c);
            }
        }
        for (deg, c) in contrib.into_iter().enumerate() {
            out.add_term(k, deg as u32, c);
        }
    }
    Ok(out)
}

/// Knobs for the floating-point μ-binomial path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericOptions {
    /// Nodes closer than this (relative) are merged into one node of higher multiplicity.
    pub node_merge_tol: f64,
    /// Maximum tolerated digit loss in the divided-difference table.
    pub max_digits_lost: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { node_merge_tol: DEFAULT_NODE_MERGE_TOL, max_digits_lost: DEFAULT_MAX_DIGITS_LOST }
    }
}

/// `d^k/ds^k s^z / k!` at `x > 0`.
fn power_jet(z: Complex64, x: f64, k: usize) -> Complex64 {
    let mut c = Complex64::new(1.0, 0.0);
    for j in 0..k {
        c *= (z - j as f64) / (j as f64 + 1.0);
    }
    c * ((z - k as f64) * x.ln()).exp()
}

/// Sorts the nodes and snaps each cluster of nearly-equal nodes to its mean.
fn merge_nodes(mu: &[f64], tol: f64) -> Vec<f64> {
    let mut xs = mu.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(xs.len());
    let mut i = 0;
    while i < xs.len() {
        let start = xs[i];
        let mut j = i + 1;
        while j < xs.len() && (xs[j] - start) <= tol * start {
            j += 1;
        }
        let mean = xs[i..j].iter().sum::<f64>() / (j - i) as f64;
        out.extend(std::iter::repeat(mean).take(j - i));
        i = j;
    }
    out
}

/// `binom(z,n)_μ` by confluent divided differences with the default digit-loss limit.
pub fn mu_binomial_numeric(
    z: Complex64,
    n: usize,
    mu: &[f64],
    node_merge_tol: f64,
) -> Result<Complex64, MuCalcError> {
    mu_binomial_numeric_with(z, n, mu, &NumericOptions { node_merge_tol, ..Default::default() })
}

pub fn mu_binomial_numeric_with(
    z: Complex64,
    n: usize,
    mu: &[f64],
    opts: &NumericOptions,
) -> Result<Complex64, MuCalcError> {
    if mu.is_empty() {
        return Err(MuCalcError::EmptyWeights);
    }
    if mu.len() != n + 1 {
        return Err(MuCalcError::WrongLength { expected: n + 1, got: mu.len() });
    }
    check_positive(mu)?;
    let xs = merge_nodes(mu, opts.node_merge_tol);
    let mut d: Vec<Complex64> = xs.iter().map(|&x| power_jet(z, x, 0)).collect();
    // Running bound on the propagated magnitude, used to estimate cancellation.
    let mut e: Vec<f64> = d.iter().map(|v| v.norm()).collect();
    let fmax = e.iter().cloned().fold(0.0, f64::max);
    for k in 1..=n {
        for i in 0..=(n - k) {
            let (a, b) = (xs[i], xs[i + k]);
            if a == b {
                d[i] = power_jet(z, a, k);
                e[i] = d[i].norm();
            } else {
                d[i] = (d[i + 1] - d[i]) / (b - a);
                e[i] = (e[i + 1] + e[i]) / (b - a);
            }
        }
    }
    let result = d[0];
    let xmax = xs[n];
    let scale = result.norm().max(fmax / xmax.powi(n as i32));
    if e[0] > 0.0 && scale > 0.0 {
        let lost = (e[0] / scale).log10();
        if lost > opts.max_digits_lost {
            return Err(MuCalcError::IllConditioned { lost, limit: opts.max_digits_lost });
        }
    }
    Ok(result)
}

/// `∂_μ(t^z) = binom(z,n)_μ · t^{z−n}` with `n = μ.len() − 1`.
pub fn mu_derivative_power(z: Complex64, mu: &[f64], t: f64) -> Result<Complex64, MuCalcError> {
    if !(t > 0.0) {
        return Err(MuCalcError::NonPositiveT(t));
    }
    if mu.is_empty() {
        return Err(MuCalcError::EmptyWeights);
    }
    let n = mu.len() - 1;
    let b = mu_binomial_numeric(z, n, mu, DEFAULT_NODE_MERGE_TOL)?;
    Ok(b * ((z - n as f64) * t.ln()).exp())
}

/// Independent oracle: solves the confluent Vandermonde system for the
/// Hermite interpolant of the given jets and returns `p^{(n)} = n!·(leading
/// coefficient)`.
///
/// `jets[i]` holds `f(xᵢ), f′(xᵢ), …` — as many entries as the node's multiplicity.
pub fn hermite_leading_coefficient(nodes: &[(f64, usize)], jets: &[Vec<f64>]) -> Result<f64, MuCalcError> {
    if nodes.is_empty() {
        return Err(MuCalcError::EmptyWeights);
    }
    for (i, &(x, _)) in nodes.iter().enumerate() {
        if nodes[..i].iter().any(|&(y, _)| y == x) {
            return Err(MuCalcError::DuplicateNode(i));
        }
    }
    if jets.len() != nodes.len() {
        return Err(MuCalcError::WrongLength { expected: nodes.len(), got: jets.len() });
    }
    for (i, (&(_, m), jet)) in nodes.iter().zip(jets).enumerate() {
        if jet.len() != m {
            return Err(MuCalcError::JetLength { node: i, expected: m, got: jet.len() });
        }
    }
    let size: usize = nodes.iter().map(|&(_, m)| m).sum();
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    let mut row = 0;
    for (&(x, m), jet) in nodes.iter().zip(jets) {
        for r in 0..m {
            for col in r..size {
                // d^r/ds^r s^col = col!/(col−r)! s^{col−r}
                let fall: f64 = (0..r).map(|j| (col - j) as f64).product();
                a[(row, col)] = fall * x.powi((col - r) as i32);
            }
            rhs[row] = jet[r];
            row += 1;
        }
    }
    let coeffs = a.lu().solve(&rhs).ok_or(MuCalcError::SingularSystem)?;
    let n = size - 1;
    let nfact: f64 = (1..=n).map(|j| j as f64).product();
    Ok(coeffs[n] * nfact)
}

/// Exact partial-fraction residues `cᵢ = ∏_{j≠i}(aᵢ−aⱼ)^{−1}` over ℚ(q^{1/2}).
pub fn partial_fractions_exact(poles: &[QScalar]) -> Result<Vec<QScalar>, MuCalcError> {
    for i in 0..poles.len() {
        if poles[..i].contains(&poles[i]) {
            return Err(MuCalcError::RepeatedPole(i));
        }
    }
    Ok(poles
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(QScalar::one(), |acc, (_, aj)| &acc * &(ai - aj))
                .recip()
        })
        .collect())
}

/// Floating-point partial-fraction residues; poles closer than `tol`
/// (relative) count as repeated.
pub fn partial_fractions(poles: &[Complex64], tol: f64) -> Result<Vec<Complex64>, MuCalcError> {
    for i in 0..poles.len() {
        for j in 0..i {
            let scale = poles[i].norm().max(poles[j].norm());
            if (poles[i] - poles[j]).norm() <= tol * scale {
                return Err(MuCalcError::RepeatedPole(i));
            }
        }
    }
    Ok(poles
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let p: Complex64 = poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &aj)| ai - aj)
                .product();
            p.inv()
        })
        .collect())
}

/// Contour quadrature settings; `None` picks the documented default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourOptions {
    pub abscissa: Option<f64>,
    pub truncation_height: Option<f64>,
    /// Step of the trapezoid rule in the `sinh`-substituted variable.
    pub quadrature_step: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { abscissa: None, truncation_height: None, quadrature_step: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourValue {
    pub value: Complex64,
    /// Quadrature (step-halving) plus truncation-tail estimate.
    pub error_bound: f64,
}

/// Largest `sinh` argument before `cosh` overflows comfortably.
const MAX_SINH_ARG: f64 = 700.0;

/// Evaluates `(1/2πi) ∫_Γ λ^z ∏(λ − μᵢt)^{−1} dλ` over the vertical line
/// `Re λ = c`, oriented so the poles lie inside; this reproduces
/// `binom(z,n)_μ · t^{z−n}`.
///
/// The line is parametrised by `λ = c + i·c·sinh(u)` and integrated with the
/// trapezoid rule, which converges geometrically because the nearest
/// singularity (branch point or pole) sits at distance `π/2` from the real
/// `u`-axis whenever `c ≤ min(μᵢt)/2`.
pub fn contour_mu_cauchy_oracle(
    z: Complex64,
    mu: &[f64],
    t: f64,
    opts: &ContourOptions,
) -> Result<ContourValue, MuCalcError> {
    if mu.is_empty() {
        return Err(MuCalcError::EmptyWeights);
    }
    check_positive(mu)?;
    if !(t > 0.0) {
        return Err(MuCalcError::NonPositiveT(t));
    }
    if z.re >= 0.0 {
        return Err(MuCalcError::NonConvergent(z.re));
    }
    let poles: Vec<f64> = mu.iter().map(|m| m * t).collect();
    let min_pole = poles.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = opts.abscissa.unwrap_or(0.5 * min_pole);
    if !(c > 0.0 && c < min_pole) {
        return Err(MuCalcError::ContourDoesNotSeparate { abscissa: c, min_pole });
    }
    let n = poles.len() - 1;
    let decay = n as f64 - z.re; // integrand ~ |y|^{−decay−1}
    let growth = (0.5 * std::f64::consts::PI * z.im.abs()).exp();
    let tail = |y: f64| growth * y.powf(-decay) / (std::f64::consts::PI * decay);
    let height = opts.truncation_height.unwrap_or_else(|| {
        (DEFAULT_CONTOUR_TAIL * std::f64::consts::PI * decay / growth).powf(-1.0 / decay)
    });
    let u_max = (height / c).asinh().min(MAX_SINH_ARG);
    let h = opts.quadrature_step;
    let steps = (u_max / h).ceil() as i64;

    let integrand = |u: f64| -> Complex64 {
        let lambda = Complex64::new(c, c * u.sinh());
        let denom: Complex64 = poles.iter().map(|&p| lambda - p).product();
        lambda.powc(z) / denom * (c * u.cosh())
    };
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for k in -steps..=steps {
        let v = integrand(k as f64 * h);
        fine += v;
        if k % 2 == 0 {
            coarse += v;
        }
    }
    fine *= h;
    coarse *= 2.0 * h;
    // Upward traversal leaves the poles on the right, hence the sign flip.
    let scale = -1.0 / (2.0 * std::f64::consts::PI);
    let value = fine * scale;
    let quad_err = (fine - coarse).norm() * scale.abs();
    let used_height = c * (steps as f64 * h).sinh();
    Ok(ContourValue { value, error_bound: quad_err + tail(used_height) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn wt(k: &[i32]) -> WeightTuple {
        WeightTuple::from_exponents(k.to_vec()).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn single_weight_is_a_power() {
        let b = mu_binomial_exact(0, &wt(&[3])).unwrap();
        assert_eq!(b, MuBinomialExact::monomial(QScalar::one(), 3, 0));
        assert_eq!(b.to_string(), "Z^3");
    }

    #[test]
    fn two_weights_give_gaussian_binomial() {
        let b = mu_binomial_exact(1, &wt(&[0, 1])).unwrap();
        let expected: MuBinomialExact = "(1 - Z)/(1 - q)".parse().unwrap();
        assert_eq!(b, expected);
    }

    #[test]
    fn vanishes_at_origin_for_positive_order() {
        for ks in [[0, 1, 2], [-3, 2, 5], [4, -1, 0]] {
            let b = mu_binomial_exact(2, &wt(&ks)).unwrap();
            assert!(b.value_at_origin().is_zero());
        }
        let b = mu_binomial_exact(0, &wt(&[0])).unwrap();
        assert!(b.value_at_origin().is_one());
    }

    #[test]
    fn confluent_exact_is_falling_factorial() {
        // weights (0,0,0): binom(z,2) = z(z−1)/2
        let b = mu_binomial_exact(2, &wt(&[0, 0, 0])).unwrap();
        let expected: MuBinomialExact = "(z^2 - z)/2".parse().unwrap();
        assert_eq!(b, expected);
    }

    #[test]
    fn exact_display_round_trip() {
        let b = mu_binomial_exact(3, &wt(&[2, -1, 2, 0])).unwrap();
        let back: MuBinomialExact = b.to_string().parse().unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn numeric_basic_values() {
        let v = mu_binomial_numeric(c(3.0), 2, &[1.0, 1.0, 1.0], 1e-10).unwrap();
        assert!((v - 3.0).norm() < 1e-12);
        let v = mu_binomial_numeric(c(2.0), 1, &[2.0, 2.0], 1e-10).unwrap();
        assert!((v - 4.0).norm() < 1e-12);
    }

    #[test]
    fn numeric_matches_exact() {
        let q = 0.5;
        let z = c(-1.5);
        let exact = mu_binomial_exact(2, &wt(&[0, 1, 2])).unwrap().eval(q, z);
        let num = mu_binomial_numeric(z, 2, &[1.0, 0.5, 0.25], 1e-10).unwrap();
        assert!(rel(num, exact) < 1e-10, "{num} vs {exact}");
    }

    #[test]
    fn derivative_power_examples() {
        let v = mu_derivative_power(c(2.0), &[1.0, 1.0], 3.0).unwrap();
        assert!((v - 6.0).norm() < 1e-12);
        for t in [0.3, 1.0, 7.0] {
            let v = mu_derivative_power(c(1.0), &[1.0, 0.5], t).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn hermite_oracle_basics() {
        let v = hermite_leading_coefficient(&[(1.0, 3)], &[vec![1.0, 3.0, 6.0]]).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
        let v = hermite_leading_coefficient(&[(2.5, 1)], &[vec![7.0]]).unwrap();
        assert_eq!(v, 7.0);
        assert_eq!(
            hermite_leading_coefficient(&[(1.0, 1), (1.0, 1)], &[vec![1.0], vec![1.0]]),
            Err(MuCalcError::DuplicateNode(1))
        );
    }

    #[test]
    fn hermite_oracle_agrees_with_mu_derivative() {
        // p^{(n)} = n! · divided difference
        let f = |s: f64| s.powi(5);
        let nodes = [(1.0, 1), (2.0, 1), (4.0, 1)];
        let jets: Vec<Vec<f64>> = nodes.iter().map(|&(x, _)| vec![f(x)]).collect();
        let oracle = hermite_leading_coefficient(&nodes, &jets).unwrap();
        let v = mu_derivative_power(c(5.0), &[1.0, 2.0, 4.0], 1.0).unwrap();
        assert!((2.0 * v.re - oracle).abs() < 1e-10 * oracle.abs());
    }

    #[test]
    fn partial_fraction_examples() {
        let r = partial_fractions(&[c(1.0), c(2.0)], 1e-12).unwrap();
        assert!((r[0] + 1.0).norm() < 1e-15 && (r[1] - 1.0).norm() < 1e-15);
        let r = partial_fractions_exact(&[QScalar::one(), QScalar::q()]).unwrap();
        assert_eq!(r[0], "1/(1-q)".parse().unwrap());
        assert_eq!(r[1], "1/(q-1)".parse().unwrap());
        assert_eq!(partial_fractions_exact(&[QScalar::q(), QScalar::q()]), Err(MuCalcError::RepeatedPole(1)));
    }

    #[test]
    fn contour_examples() {
        let opts = ContourOptions::default();
        let v = contour_mu_cauchy_oracle(c(-1.0), &[1.0], 2.0, &opts).unwrap();
        assert!((v.value - 0.5).norm() < 1e-9, "{:?}", v);
        let v = contour_mu_cauchy_oracle(c(-1.0), &[1.0, 1.0], 1.0, &opts).unwrap();
        assert!((v.value + 1.0).norm() < 1e-9, "{:?}", v);
        let z = c(-1.5);
        let mu = [1.0, 0.5, 0.25];
        let v = contour_mu_cauchy_oracle(z, &mu, 1.0, &opts).unwrap();
        let closed = mu_derivative_power(z, &mu, 1.0).unwrap();
        assert!(rel(v.value, closed) < 1e-8);
        assert!(v.error_bound < 1e-8);
    }

    #[test]
    fn contour_rejects_bad_parameters() {
        let bad = ContourOptions { abscissa: Some(1.5), ..Default::default() };
        assert!(matches!(
            contour_mu_cauchy_oracle(c(-1.0), &[1.0], 1.0, &bad),
            Err(MuCalcError::ContourDoesNotSeparate { .. })
        ));
        assert!(matches!(
            contour_mu_cauchy_oracle(c(0.5), &[1.0], 1.0, &ContourOptions::default()),
            Err(MuCalcError::NonConvergent(_))
        ));
    }

    #[test]
    fn nearly_coincident_nodes_flag_ill_conditioning() {
        let opts = NumericOptions { node_merge_tol: 0.0, max_digits_lost: 6.0 };
        let r = mu_binomial_numeric_with(c(2.5), 1, &[1.0, 1.0 + 1e-9], &opts);
        assert!(matches!(r, Err(MuCalcError::IllConditioned { .. })));
        // merging the nodes restores a well-posed confluent evaluation
        let v = mu_binomial_numeric(c(2.5), 1, &[1.0, 1.0 + 1e-12], 1e-10).unwrap();
        assert!((v - 2.5).norm() < 1e-9);
    }

    fn distinct_exponents(max_len: usize) -> impl Strategy<Value = Vec<i32>> {
        proptest::collection::btree_set(-6i32..=6, 1..=max_len)
            .prop_flat_map(|s| Just(s.into_iter().collect::<Vec<_>>()).prop_shuffle())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pascal_identity(ks in distinct_exponents(5)) {
            prop_assume!(ks.len() >= 2);
            let n = ks.len() - 1;
            let w = wt(&ks);
            let lhs = mu_binomial_exact(n, &w).unwrap().shift_z();
            let rhs = &mu_binomial_exact(n, &w).unwrap().scale(&QScalar::q_pow(ks[0]))
                + &mu_binomial_exact(n - 1, &w.without_first().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn permutation_symmetry(ks in proptest::collection::vec(-4i32..=4, 1..=5), seed in any::<u64>()) {
            let n = ks.len() - 1;
            let mut perm = ks.clone();
            let len = perm.len();
            perm.rotate_left((seed as usize) % len);
            if seed % 2 == 1 { perm.reverse(); }
            prop_assert_eq!(mu_binomial_exact(n, &wt(&ks)).unwrap(), mu_binomial_exact(n, &wt(&perm)).unwrap());
        }

        #[test]
        fn exact_and_numeric_agree(ks in proptest::collection::vec(-3i32..=3, 1..=5), zr in -3.0f64..3.0, zi in -1.0f64..1.0) {
            let q = 0.7;
            let n = ks.len() - 1;
            let z = Complex64::new(zr, zi);
            let exact = mu_binomial_exact(n, &wt(&ks)).unwrap().eval(q, z);
            let num = mu_binomial_numeric(z, n, &wt(&ks).reals(q), 1e-10).unwrap();
            prop_assert!((num - exact).norm() <= 1e-8 * (1.0 + exact.norm()), "{} vs {}", num, exact);
        }

        #[test]
        fn zero_argument_vanishes(mu in proptest::collection::vec(0.1f64..5.0, 2..=5)) {
            let v = mu_binomial_numeric(c(0.0), mu.len() - 1, &mu, 1e-10).unwrap();
            prop_assert!(v.norm() < 1e-9);
        }
    }
}
