//! Exact normal-form engine for the crossed product O(SU_q(2)) # U_q(su2).
//!
//! Elements are finite sums of `w · F^i K^j E^k` with `w` a PBW word in the
//! coordinate generators. Products are computed by pushing U-generators to
//! the right through `h ξ = (h₍₁₎ ▷ ξ) h₍₂₎` and normal-ordering each side.

mod coord;
mod hopf;
mod text;
mod twist;
mod uq;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::QScalar;

pub use coord::{CoordPoly, CoordWord, Letter};
pub use hopf::{act, coproduct, counit, TensorElement};
pub use twist::{
    casimir, centrality_defect, expansion_terms, nabla, nabla_mu, twist_theta, twisted_commutator,
    weight_decompose, CasimirVariant, ExpansionTerm,
};
pub use uq::{UPoly, UWord};

/// Basis monomial `w · F^i K^j E^k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub coord: CoordWord,
    pub u: UWord,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { coord: CoordWord::ONE, u: UWord::ONE };

    pub fn order(&self) -> u32 {
        self.u.order()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
    C,
    D,
    E,
    F,
    K,
    KInv,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::A,
        Generator::B,
        Generator::C,
        Generator::D,
        Generator::E,
        Generator::F,
        Generator::K,
        Generator::KInv,
    ];

    pub fn monomial(self) -> Monomial {
        let (coord, u) = match self {
            Generator::A => (Letter::A.word(), UWord::ONE),
            Generator::B => (Letter::B.word(), UWord::ONE),
            Generator::C => (Letter::C.word(), UWord::ONE),
            Generator::D => (Letter::D.word(), UWord::ONE),
            Generator::E => (CoordWord::ONE, UWord::E),
            Generator::F => (CoordWord::ONE, UWord::F),
            Generator::K => (CoordWord::ONE, UWord::K),
            Generator::KInv => (CoordWord::ONE, UWord::KINV),
        };
        Monomial { coord, u }
    }
}

/// Filtration degree; the zero element sits at −∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FiltrationOrder {
    NegInfinity,
    Finite(u32),
}

impl FiltrationOrder {
    pub fn as_i64(self) -> Option<i64> {
        match self {
            FiltrationOrder::NegInfinity => None,
            FiltrationOrder::Finite(n) => Some(n as i64),
        }
    }

    /// Whether `self ≤ bound` (always true at −∞).
    pub fn at_most(self, bound: i64) -> bool {
        match self {
            FiltrationOrder::NegInfinity => true,
            FiltrationOrder::Finite(n) => (n as i64) <= bound,
        }
    }
}

impl fmt::Display for FiltrationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationOrder::NegInfinity => write!(f, "-inf"),
            FiltrationOrder::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Normal-form element of the crossed product; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, QScalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(QScalar::one())
    }

    pub fn scalar(c: QScalar) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: QScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    pub fn generator(g: Generator) -> Self {
        Self::term(g.monomial(), QScalar::one())
    }

    pub fn a() -> Self {
        Self::generator(Generator::A)
    }
    pub fn b() -> Self {
        Self::generator(Generator::B)
    }
    pub fn c() -> Self {
        Self::generator(Generator::C)
    }
    pub fn d() -> Self {
        Self::generator(Generator::D)
    }
    pub fn e() -> Self {
        Self::generator(Generator::E)
    }
    pub fn f() -> Self {
        Self::generator(Generator::F)
    }
    pub fn k() -> Self {
        Self::generator(Generator::K)
    }
    pub fn k_inv() -> Self {
        Self::generator(Generator::KInv)
    }

    pub fn from_coord(p: &CoordPoly) -> Self {
        let mut out = Self::zero();
        for (w, c) in p {
            out.add_term(Monomial { coord: *w, u: UWord::ONE }, c.clone());
        }
        out
    }

    pub fn from_u(p: &UPoly) -> Self {
        let mut out = Self::zero();
        for (w, c) in p {
            out.add_term(Monomial { coord: CoordWord::ONE, u: *w }, c.clone());
        }
        out
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        AlgebraElement { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    /// No coordinate letters occur.
    pub fn is_in_u(&self) -> bool {
        self.terms.keys().all(|m| m.coord.is_one())
    }

    /// No U-letters occur.
    pub fn is_coordinate(&self) -> bool {
        self.terms.keys().all(|m| m.u.is_one())
    }

    pub fn coord_part(&self) -> Option<CoordPoly> {
        self.is_coordinate().then(|| self.terms.iter().map(|(m, c)| (m.coord, c.clone())).collect())
    }

    pub fn u_part(&self) -> Option<UPoly> {
        self.is_in_u().then(|| self.terms.iter().map(|(m, c)| (m.u, c.clone())).collect())
    }

    pub fn filtration_order(&self) -> FiltrationOrder {
        self.terms
            .keys()
            .map(|m| m.order())
            .max()
            .map_or(FiltrationOrder::NegInfinity, FiltrationOrder::Finite)
    }

    /// Terms of filtration order exactly `n`.
    pub fn homogeneous_order_part(&self, n: u32) -> Self {
        AlgebraElement {
            terms: self.terms.iter().filter(|(m, _)| m.order() == n).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Left multiplication by a single U-generator through the crossed relation.
    fn left_u_generator(&self, g: Generator) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let kx = QScalar::q_half_pow(m.coord.weight2());
            match g {
                Generator::E | Generator::F => {
                    let raise = g == Generator::E;
                    // (K ▷ ξ) (g u)
                    let first: Vec<(UWord, QScalar)> = if raise {
                        uq::left_e(m.u)
                    } else {
                        vec![(uq::left_f(m.u), QScalar::one())]
                    };
                    let ck = c * &kx;
                    for (u, cu) in first {
                        out.add_term(Monomial { coord: m.coord, u }, &cu * &ck);
                    }
                    // (g ▷ ξ) (K⁻¹ u)
                    let (u, cu) = uq::left_k(-1, m.u);
                    let cu = &cu * c;
                    for (w, cw) in coord::ladder_action(raise, m.coord) {
                        out.add_term(Monomial { coord: w, u }, &cw * &cu);
                    }
                }
                Generator::K | Generator::KInv => {
                    let s = if g == Generator::K { 1 } else { -1 };
                    let (u, cu) = uq::left_k(s, m.u);
                    let coef = &(&cu * c) * &QScalar::q_half_pow(s * m.coord.weight2());
                    out.add_term(Monomial { coord: m.coord, u }, coef);
                }
                _ => unreachable!("coordinate letters multiply directly"),
            }
        }
        out
    }

    fn left_coord(&self, w: CoordWord) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (nw, cw) in coord::mul_words(w, m.coord) {
                out.add_term(Monomial { coord: nw, u: m.u }, &cw * c);
            }
        }
        out
    }

    /// `m · self` for a basis monomial `m`.
    pub fn left_monomial(&self, m: &Monomial) -> Self {
        let mut acc = self.clone();
        for _ in 0..m.u.e {
            acc = acc.left_u_generator(Generator::E);
        }
        let kg = if m.u.k >= 0 { Generator::K } else { Generator::KInv };
        for _ in 0..m.u.k.unsigned_abs() {
            acc = acc.left_u_generator(kg);
        }
        for _ in 0..m.u.f {
            acc = acc.left_u_generator(Generator::F);
        }
        if m.coord.is_one() {
            acc
        } else {
            acc.left_coord(m.coord)
        }
    }

    /// The involution `E* = F`, `K* = K`, `a* = d`, `b* = −q c`, `c* = −q⁻¹ b`,
    /// extended antilinearly (coefficients are real) and antimultiplicatively.
    pub fn star(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            // (ξ F^i K^j E^k)* = F^k K^j E^i · ξ*
            let u_star = UWord { f: m.u.e, k: m.u.k, e: m.u.f };
            let mut xi_star = Self::one();
            for l in m.coord.letters() {
                let ls = match l {
                    Letter::A => Self::d(),
                    Letter::D => Self::a(),
                    Letter::B => Self::c().scale(&-QScalar::q()),
                    Letter::C => Self::b().scale(&-QScalar::q_pow(-1)),
                };
                xi_star = &ls * &xi_star;
            }
            let t = xi_star.left_monomial(&Monomial { coord: CoordWord::ONE, u: u_star });
            out = &out + &t.scale(c);
        }
        out
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in &self.terms {
            let t = rhs.left_monomial(m);
            for (m2, c2) in t.terms {
                out.add_term(m2, &c2 * c);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgebraElement {
            type Output = AlgebraElement;
            fn $m(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        -&self
    }
}

impl std::iter::Sum for AlgebraElement {
    fn sum<I: Iterator<Item = AlgebraElement>>(iter: I) -> Self {
        iter.fold(AlgebraElement::zero(), |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> AlgebraElement {
        AlgebraElement::from_expression(s).unwrap()
    }

    #[test]
    fn quantum_group_relations() {
        let lhs = el("E*F - F*E");
        let rhs = el("(K^2 - K^-2)/(q - q^-1)");
        assert_eq!(lhs, rhs);
        assert_eq!(el("K*E"), el("q*E*K"));
        assert_eq!(el("K*K^-1"), AlgebraElement::one());
        assert_eq!(el("K*F*K^-1"), el("q^-1*F"));
    }

    #[test]
    fn crossed_relation_for_e() {
        // E a = (K ▷ a) E + (E ▷ a) K⁻¹ and E ▷ a = 0
        assert_eq!(el("E*a"), el("q^(1/2)*a*E"));
        // E b = (K ▷ b) E + (E ▷ b) K⁻¹ = q^{-1/2} b E + a K⁻¹
        assert_eq!(el("E*b"), el("q^(-1/2)*b*E + a*K^-1"));
    }

    #[test]
    fn filtration_examples() {
        assert_eq!(el("E*F").filtration_order(), FiltrationOrder::Finite(2));
        assert_eq!(el("K").filtration_order(), FiltrationOrder::Finite(0));
        assert_eq!(el("a*E").filtration_order(), FiltrationOrder::Finite(1));
        assert_eq!(AlgebraElement::one().filtration_order(), FiltrationOrder::Finite(0));
        assert_eq!(AlgebraElement::zero().filtration_order(), FiltrationOrder::NegInfinity);
    }

    #[test]
    fn product_of_order_one_elements() {
        let p = &el("a*E") * &el("a*F");
        assert!(p.filtration_order().at_most(2));
        assert_eq!(&AlgebraElement::one() * &p, p);
    }

    #[test]
    fn star_is_involutive_and_antimultiplicative() {
        for s in ["a", "b*E", "c*d*F", "K*a*E", "E*F + b"] {
            let x = el(s);
            assert_eq!(x.star().star(), x, "{s}");
        }
        let (x, y) = (el("a*E + b"), el("c*F*K"));
        assert_eq!((&x * &y).star(), &y.star() * &x.star());
    }
}
