//! Small recursive-descent parser for the arithmetic text forms used by the
//! serializers (`+ - * / ^`, parentheses, rational numerals, identifiers).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Expr {
    Num(BigRational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, BigRational),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = bytes[start..i].iter().collect();
            out.push(Tok::Num(text.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(bytes[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar(c, i));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Op(x)) if x == c => Ok(()),
            Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    /// Exponents are rational constants: `3`, `-2`, or a parenthesized
    /// constant expression such as `(-3/2)`.
    fn exponent(&mut self) -> Result<BigRational, ParseError> {
        let neg = self.eat('-');
        let val = match self.next() {
            Some(Tok::Num(n)) => BigRational::from_integer(n),
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                self.expect(')')?;
                const_value(&e)?
            }
            Some(t) => return Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => return Err(ParseError::UnexpectedEnd),
        };
        Ok(if neg { -val } else { val })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::Num(BigRational::from_integer(n))),
            Some(Tok::Ident(s)) => Ok(Expr::Var(s)),
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

fn const_value(e: &Expr) -> Result<BigRational, ParseError> {
    Ok(match e {
        Expr::Num(r) => r.clone(),
        Expr::Neg(a) => -const_value(a)?,
        Expr::Add(a, b) => const_value(a)? + const_value(b)?,
        Expr::Sub(a, b) => const_value(a)? - const_value(b)?,
        Expr::Mul(a, b) => const_value(a)? * const_value(b)?,
        Expr::Div(a, b) => {
            let d = const_value(b)?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero);
            }
            const_value(a)? / d
        }
        Expr::Pow(a, k) if k.is_integer() => {
            let base = const_value(a)?;
            let n: i64 = k.to_integer().try_into().map_err(|_| ParseError::BadExponent(k.to_string()))?;
            let mut acc = BigRational::one();
            for _ in 0..n.unsigned_abs() {
                acc *= &base;
            }
            if n < 0 {
                if acc.is_zero() {
                    return Err(ParseError::DivisionByZero);
                }
                acc = acc.recip();
            }
            acc
        }
        Expr::Pow(_, k) => return Err(ParseError::BadExponent(k.to_string())),
        Expr::Var(v) => return Err(ParseError::UnknownSymbol(v.clone())),
    })
}

pub(crate) fn parse_expr(s: &str) -> Result<Expr, ParseError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(ParseError::UnexpectedEnd);
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::UnexpectedToken(format!("{t:?}")));
    }
    Ok(e)
}
