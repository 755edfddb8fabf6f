//! Text forms of crossed-product elements.
//!
//! Canonical: `(coef) * <word> | F^i K^j E^k` joined by ` + `, where `word`
//! is `1` or space-separated powers such as `a^2 b c`. Free expressions in
//! `a b c d E F K q` with `+ - * / ^` are accepted by
//! [`AlgebraElement::from_expression`].

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;

use super::coord::{normalize_letters, Letter};
use super::{AlgebraElement, Generator, Monomial, UWord};
use crate::error::ParseError;
use crate::parse::{self, Expr};
use crate::scalar::{eval_scalar, QScalar};

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms().map(|(m, c)| format!("({c}) * <{}> | {}", m.coord, m.u)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.s[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.s[self.pos..].chars().next() {
            Some(c) if c == ch => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(ParseError::UnexpectedChar(c, self.pos)),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.s.len()
    }

    /// Text up to the parenthesis closing one that was just consumed.
    fn balanced(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        let mut depth = 1;
        for (i, ch) in self.s[start..].char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = start + i + 1;
                        return Ok(&self.s[start..start + i]);
                    }
                }
                _ => {}
            }
        }
        Err(ParseError::UnexpectedEnd)
    }

    fn until(&mut self, ch: char) -> Result<&'a str, ParseError> {
        let start = self.pos;
        let i = self.s[start..].find(ch).ok_or(ParseError::UnexpectedEnd)?;
        self.pos = start + i + ch.len_utf8();
        Ok(&self.s[start..start + i])
    }
}

fn parse_power(tok: &str) -> Result<(&str, i64), ParseError> {
    match tok.split_once('^') {
        None => Ok((tok, 1)),
        Some((base, e)) => {
            let e: i64 = e.parse().map_err(|_| ParseError::BadExponent(e.to_string()))?;
            Ok((base, e))
        }
    }
}

fn parse_word(s: &str) -> Result<Vec<Letter>, ParseError> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        let (base, e) = parse_power(tok)?;
        if e < 0 {
            return Err(ParseError::BadExponent(e.to_string()));
        }
        let l = match base {
            "a" => Letter::A,
            "b" => Letter::B,
            "c" => Letter::C,
            "d" => Letter::D,
            other => return Err(ParseError::UnknownSymbol(other.to_string())),
        };
        letters.extend(std::iter::repeat(l).take(e as usize));
    }
    Ok(letters)
}

fn parse_u(s: &str) -> Result<UWord, ParseError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(ParseError::MalformedTerm(s.to_string()));
    }
    let mut vals = [0i64; 3];
    for (slot, (tok, name)) in vals.iter_mut().zip(toks.iter().zip(["F", "K", "E"])) {
        let (base, e) = parse_power(tok)?;
        if base != name {
            return Err(ParseError::MalformedTerm(s.to_string()));
        }
        *slot = e;
    }
    if vals[0] < 0 || vals[2] < 0 {
        return Err(ParseError::BadExponent(s.to_string()));
    }
    Ok(UWord { f: vals[0] as u32, k: vals[1] as i32, e: vals[2] as u32 })
}

impl FromStr for AlgebraElement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut cur = Cursor { s, pos: 0 };
        if s.trim() == "0" {
            return Ok(AlgebraElement::zero());
        }
        let mut out = AlgebraElement::zero();
        loop {
            cur.expect('(')?;
            let coef: QScalar = cur.balanced()?.parse()?;
            cur.expect('*')?;
            cur.expect('<')?;
            let word = parse_word(cur.until('>')?)?;
            cur.expect('|')?;
            let rest = &cur.s[cur.pos..];
            let end = rest.find('+').unwrap_or(rest.len());
            let u = parse_u(&rest[..end])?;
            cur.pos += end;
            for (w, c) in normalize_letters(&word) {
                out.add_term(Monomial { coord: w, u }, &c * &coef);
            }
            if cur.at_end() {
                return Ok(out);
            }
            cur.expect('+')?;
        }
    }
}

fn mentions_generator(e: &Expr) -> bool {
    match e {
        Expr::Num(_) => false,
        Expr::Var(v) => v != "q",
        Expr::Neg(a) | Expr::Pow(a, _) => mentions_generator(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            mentions_generator(a) || mentions_generator(b)
        }
    }
}

fn eval_algebra(e: &Expr) -> Result<AlgebraElement, ParseError> {
    if !mentions_generator(e) {
        return Ok(AlgebraElement::scalar(eval_scalar(e)?));
    }
    Ok(match e {
        Expr::Var(v) => {
            let g = match v.as_str() {
                "a" => Generator::A,
                "b" => Generator::B,
                "c" => Generator::C,
                "d" => Generator::D,
                "E" => Generator::E,
                "F" => Generator::F,
                "K" => Generator::K,
                other => return Err(ParseError::UnknownSymbol(other.to_string())),
            };
            AlgebraElement::generator(g)
        }
        Expr::Neg(a) => -&eval_algebra(a)?,
        Expr::Add(a, b) => &eval_algebra(a)? + &eval_algebra(b)?,
        Expr::Sub(a, b) => &eval_algebra(a)? - &eval_algebra(b)?,
        Expr::Mul(a, b) => &eval_algebra(a)? * &eval_algebra(b)?,
        Expr::Div(a, b) => {
            if mentions_generator(b) {
                return Err(ParseError::MalformedTerm("division by a non-scalar".into()));
            }
            let d = eval_scalar(b)?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero);
            }
            eval_algebra(a)?.scale(&d.recip())
        }
        Expr::Pow(base, exp) => {
            let bad = || ParseError::BadExponent(exp.to_string());
            if !exp.is_integer() {
                return Err(bad());
            }
            let n = exp.to_integer().to_i64().ok_or_else(bad)?;
            let x = eval_algebra(base)?;
            if n >= 0 {
                x.pow(n as u32)
            } else {
                // Only group-like monomials c·K^j are invertible here.
                let mut it = x.terms();
                match (it.next(), it.next()) {
                    (Some((m, c)), None) if m.coord.is_one() && m.u.f == 0 && m.u.e == 0 => {
                        let u = UWord { k: m.u.k * n as i32, ..UWord::ONE };
                        AlgebraElement::term(Monomial { u, ..Monomial::ONE }, c.pow(n as i32))
                    }
                    _ => return Err(bad()),
                }
            }
        }
        Expr::Num(_) => unreachable!(),
    })
}

impl AlgebraElement {
    /// Normal form of a free expression such as `E*F - F*E` or `q^(1/2)*a*K^-1`.
    pub fn from_expression(s: &str) -> Result<Self, ParseError> {
        eval_algebra(&parse::parse_expr(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for s in ["0", "1", "a*E + b*c*F*K^-2", "(q^2 + 1)/(q - 2) * d^3*b*E^2", "E*F - F*E"] {
            let x = AlgebraElement::from_expression(s).unwrap();
            let back: AlgebraElement = x.to_string().parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn canonical_text_shape() {
        let x = AlgebraElement::from_expression("2*a^2*b*F*K^-1").unwrap();
        assert_eq!(x.to_string(), "(2) * <a^2 b> | F^1 K^-1 E^0");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(AlgebraElement::from_expression("E^-1").is_err());
        assert!(AlgebraElement::from_expression("x").is_err());
        assert!(AlgebraElement::from_expression("a/E").is_err());
        assert!("(1) * <e> | F^0 K^0 E^0".parse::<AlgebraElement>().is_err());
    }
}
