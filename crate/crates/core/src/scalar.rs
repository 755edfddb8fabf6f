//! Exact coefficient field ℚ(q^{1/2}).
//!
//! Every coefficient in the symbolic engine is a rational function of the
//! formal parameter `q`. Half-integer powers appear as soon as the fundamental
//! pairing is involved (`K ▷ a = q^{1/2} a`), so internally the variable is
//! `v = q^{1/2}` and a value is stored as `v^shift · num(v) / den(v)` with
//! `num`, `den` coprime, `den` monic, and neither divisible by `v`. That form is
//! unique, so structural equality is field equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::parse::{self, Expr};

/// Dense univariate polynomial in `v` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c · v^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Number of factors of `v` dividing the polynomial (0 for the zero polynomial).
    fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs[k..].to_vec())
    }

    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    fn add_ref(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }

    fn neg_ref(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    fn mul_ref(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) if !l.is_one() => {
                let inv = l.recip();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Monic least common multiple.
    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(a, b);
        a.div_rem(&g).0.mul_ref(b).monic()
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * v + rational_to_f64(c))
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Element of ℚ(q^{1/2}) in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QScalar {
    shift: i32,
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QScalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            return QScalar::zero();
        }
        QScalar { shift: 0, num: Poly::constant(r), den: Poly::one() }
    }

    /// `q^{k/2}`.
    pub fn q_half_pow(k: i32) -> Self {
        QScalar { shift: k, num: Poly::one(), den: Poly::one() }
    }

    /// `q^k`.
    pub fn q_pow(k: i32) -> Self {
        QScalar::q_half_pow(2 * k)
    }

    pub fn q() -> Self {
        QScalar::q_pow(1)
    }

    /// Builds `v^shift · num / den` and brings it to canonical form.
    pub fn from_parts(shift: i32, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return QScalar::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let mut shift = shift;
        let lo = num.low_order();
        if lo > 0 {
            num = num.shift_down(lo);
            shift += lo as i32;
        }
        let lo = den.low_order();
        if lo > 0 {
            den = den.shift_down(lo);
            shift -= lo as i32;
        }
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        QScalar { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial in `q^{1/2}`.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// If the value is `c · q^{k/2}` for a rational `c`, returns `(c, k)`.
    pub fn as_monomial(&self) -> Option<(BigRational, i32)> {
        if self.den.is_one() && self.num.coeffs().len() == 1 {
            Some((self.num.coeffs()[0].clone(), self.shift))
        } else {
            None
        }
    }

    /// If the value is a rational constant, returns it.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        match self.as_monomial() {
            Some((c, 0)) => Some(c),
            _ => None,
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn recip(&self) -> QScalar {
        assert!(!self.is_zero(), "reciprocal of zero");
        let lead = self.num.leading().unwrap().recip();
        QScalar {
            shift: -self.shift,
            num: self.den.scale(&lead),
            den: self.num.scale(&lead),
        }
    }

    pub fn pow(&self, e: i32) -> QScalar {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = QScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Multiplies by `q^{k/2}` (cheap: only the shift changes).
    pub fn mul_q_half_pow(&self, k: i32) -> QScalar {
        if self.is_zero() {
            return QScalar::zero();
        }
        QScalar { shift: self.shift + k, num: self.num.clone(), den: self.den.clone() }
    }

    /// Evaluates at a positive real `q`.
    pub fn eval(&self, q: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let v = q.sqrt();
        v.powi(self.shift) * self.num.eval_f64(v) / self.den.eval_f64(v)
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(rhs.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = rhs.num.shift_up((rhs.shift - s) as usize);
        if self.den == rhs.den {
            QScalar::from_parts(s, a.add_ref(&b), self.den.clone())
        } else {
            let num = a.mul_ref(&rhs.den).add_ref(&b.mul_ref(&self.den));
            QScalar::from_parts(s, num, self.den.mul_ref(&rhs.den))
        }
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { shift: self.shift, num: self.num.neg_ref(), den: self.den.clone() }
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar {
                shift: self.shift + rhs.shift,
                num: self.num.mul_ref(&rhs.num),
                den: Poly::one(),
            };
        }
        // num/den pairs are already coprime, so only cross factors can cancel
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_rem(&g1).0 };
        let d2 = if g1.is_one() { rhs.den.clone() } else { rhs.den.div_rem(&g1).0 };
        let n2 = if g2.is_one() { rhs.num.clone() } else { rhs.num.div_rem(&g2).0 };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_rem(&g2).0 };
        let num = n1.mul_ref(&n2);
        let den = d1.mul_ref(&d2);
        let lead = den.leading().unwrap().recip();
        QScalar { shift: self.shift + rhs.shift, num: num.scale(&lead), den: den.scale(&lead) }
    }
}

impl Div for &QScalar {
    type Output = QScalar;
    fn div(self, rhs: &QScalar) -> QScalar {
        self * &rhs.recip()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &QScalar) -> QScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl std::iter::Sum for QScalar {
    fn sum<I: Iterator<Item = QScalar>>(iter: I) -> QScalar {
        iter.fold(QScalar::zero(), |a, b| &a + &b)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `q^{k/2}` as text; `None` for `k = 0`.
fn fmt_q_power(k: i64) -> Option<String> {
    match k {
        0 => None,
        2 => Some("q".to_string()),
        k if k % 2 == 0 => Some(format!("q^{}", k / 2)),
        k => Some(format!("q^({}/2)", k)),
    }
}

/// Writes `Σ c_k v^{k + offset}` in descending powers of `q`.
pub(crate) fn fmt_poly_in_q(p: &Poly, offset: i64) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match fmt_q_power(k as i64 + offset) {
            None => out.push_str(&fmt_rational(&abs)),
            Some(qp) if abs.is_one() => out.push_str(&qp),
            Some(qp) => {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
                out.push_str(&qp);
            }
        }
    }
    out
}

impl fmt::Display for QScalar {
    /// Canonical text: expanded numerator over monic denominator, both as
    /// (half-integer) polynomials in `q`. Negative powers of `q^{1/2}` are moved
    /// into the denominator so that both parts are genuine polynomials.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (num_off, den_off) = match self.shift.cmp(&0) {
            Ordering::Less => (0, -self.shift as i64),
            _ => (self.shift as i64, 0),
        };
        let num = fmt_poly_in_q(&self.num, num_off);
        if self.den.is_one() && den_off == 0 {
            return write!(f, "{num}");
        }
        let den = fmt_poly_in_q(&self.den, den_off);
        write!(f, "({num})/({den})")
    }
}

impl FromStr for QScalar {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let expr = parse::parse_expr(s)?;
        eval_scalar(&expr)
    }
}

/// Evaluates a parsed expression that only mentions `q`.
pub(crate) fn eval_scalar(e: &Expr) -> Result<QScalar, ParseError> {
    Ok(match e {
        Expr::Num(r) => QScalar::from_rational(r.clone()),
        Expr::Var(v) if v == "q" => QScalar::q(),
        Expr::Var(v) => return Err(ParseError::UnknownSymbol(v.clone())),
        Expr::Neg(a) => -eval_scalar(a)?,
        Expr::Add(a, b) => eval_scalar(a)? + eval_scalar(b)?,
        Expr::Sub(a, b) => eval_scalar(a)? - eval_scalar(b)?,
        Expr::Mul(a, b) => eval_scalar(a)? * eval_scalar(b)?,
        Expr::Div(a, b) => {
            let d = eval_scalar(b)?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero);
            }
            eval_scalar(a)? / d
        }
        Expr::Pow(base, exp) => {
            let twice = exp * BigRational::from_integer(2.into());
            if !twice.is_integer() {
                return Err(ParseError::BadExponent(fmt_rational(exp)));
            }
            let k = twice.to_integer().to_i32().ok_or_else(|| ParseError::BadExponent(fmt_rational(exp)))?;
            match base.as_ref() {
                Expr::Var(v) if v == "q" => QScalar::q_half_pow(k),
                other if exp.is_integer() => eval_scalar(other)?.pow(k / 2),
                _ => return Err(ParseError::BadExponent(fmt_rational(exp))),
            }
        }
    })
}
