//! Coproduct, counit and the Hopf action on coordinates.
//!
//! `ΔK = K⊗K`, `ΔE = K⊗E + E⊗K⁻¹`, `ΔF = K⊗F + F⊗K⁻¹`; the action is
//! `X ▷ t_ij = Σ_k t_ik ρ(X)_kj` for the fundamental matrix `t = (a b; c d)`
//! with `ρ(K) = diag(q^{1/2}, q^{−1/2})`, `ρ(E) = e₁₂`, `ρ(F) = e₂₁`.

use std::collections::BTreeMap;
use std::fmt;

use super::coord::{self, CoordPoly};
use super::{AlgebraElement, FiltrationOrder, Generator, Monomial, UWord};
use crate::error::AlgebraError;
use crate::scalar::QScalar;

/// Finite sum of pure tensors `x₁ ⊗ ⋯ ⊗ x_r` of basis monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<Vec<Monomial>, QScalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pure(legs: &[AlgebraElement]) -> Self {
        let mut out = TensorElement::zero();
        let mut acc: Vec<(Vec<Monomial>, QScalar)> = vec![(Vec::new(), QScalar::one())];
        for leg in legs {
            let mut next = Vec::new();
            for (ms, c) in &acc {
                for (m, cm) in leg.terms() {
                    let mut v = ms.clone();
                    v.push(*m);
                    next.push((v, c * cm));
                }
            }
            acc = next;
        }
        for (ms, c) in acc {
            out.add_term(ms, c);
        }
        out
    }

    fn add_term(&mut self, legs: Vec<Monomial>, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&legs) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&legs);
                }
            }
            None => {
                self.terms.insert(legs, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Monomial], &QScalar)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -v);
        }
        out
    }

    pub fn scale(&self, c: &QScalar) -> TensorElement {
        let mut out = TensorElement::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// Leg-wise product.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                assert_eq!(l1.len(), l2.len(), "tensor rank mismatch");
                let legs: Vec<AlgebraElement> = l1
                    .iter()
                    .zip(l2)
                    .map(|(x, y)| &AlgebraElement::term(*x, QScalar::one()) * &AlgebraElement::term(*y, QScalar::one()))
                    .collect();
                out = out.add(&TensorElement::pure(&legs).scale(&(c1 * c2)));
            }
        }
        out
    }

    /// Maximal filtration order appearing in the given leg.
    pub fn leg_order(&self, leg: usize) -> FiltrationOrder {
        self.terms
            .keys()
            .map(|ms| ms[leg].order())
            .max()
            .map_or(FiltrationOrder::NegInfinity, FiltrationOrder::Finite)
    }

    /// Applies Δ to one leg (which must lie in U), raising the rank by one.
    pub fn coproduct_on_leg(&self, leg: usize) -> Result<TensorElement, AlgebraError> {
        let mut out = TensorElement::zero();
        for (ms, c) in &self.terms {
            let d = coproduct(&AlgebraElement::term(ms[leg], QScalar::one()))?;
            for (dm, dc) in &d.terms {
                let mut legs = ms[..leg].to_vec();
                legs.extend_from_slice(dm);
                legs.extend_from_slice(&ms[leg + 1..]);
                out.add_term(legs, dc * c);
            }
        }
        Ok(out)
    }

    /// Multiplies the legs together: `x₁ ⊗ ⋯ ⊗ x_r ↦ x₁⋯x_r`.
    pub fn multiply_out(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (ms, c) in &self.terms {
            let mut p = AlgebraElement::one();
            for m in ms {
                p = &p * &AlgebraElement::term(*m, QScalar::one());
            }
            out = &out + &p.scale(c);
        }
        out
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(ms, c)| {
                let legs: Vec<String> =
                    ms.iter().map(|m| AlgebraElement::term(*m, QScalar::one()).to_string()).collect();
                format!("({c}) * [{}]", legs.join(" ⊗ "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn generator_coproduct(g: Generator) -> TensorElement {
    let k = AlgebraElement::k();
    let kinv = AlgebraElement::k_inv();
    match g {
        Generator::K => TensorElement::pure(&[k.clone(), k]),
        Generator::KInv => TensorElement::pure(&[kinv.clone(), kinv]),
        Generator::E | Generator::F => {
            let x = AlgebraElement::generator(g);
            TensorElement::pure(&[k, x.clone()]).add(&TensorElement::pure(&[x, kinv]))
        }
        _ => unreachable!(),
    }
}

fn u_word_coproduct(w: UWord) -> TensorElement {
    let mut acc = TensorElement::pure(&[AlgebraElement::one(), AlgebraElement::one()]);
    for _ in 0..w.f {
        acc = acc.mul(&generator_coproduct(Generator::F));
    }
    let kg = if w.k >= 0 { Generator::K } else { Generator::KInv };
    for _ in 0..w.k.unsigned_abs() {
        acc = acc.mul(&generator_coproduct(kg));
    }
    for _ in 0..w.e {
        acc = acc.mul(&generator_coproduct(Generator::E));
    }
    acc
}

/// Δ on the U-subalgebra.
pub fn coproduct(u: &AlgebraElement) -> Result<TensorElement, AlgebraError> {
    let p = u.u_part().ok_or(AlgebraError::NotInU)?;
    let mut out = TensorElement::zero();
    for (w, c) in p {
        out = out.add(&u_word_coproduct(w).scale(&c));
    }
    Ok(out)
}

/// ε(F^i K^j E^k) = δ_{i0} δ_{k0}.
pub fn counit(u: &AlgebraElement) -> Result<QScalar, AlgebraError> {
    let p = u.u_part().ok_or(AlgebraError::NotInU)?;
    Ok(p.into_iter().filter(|(w, _)| w.f == 0 && w.e == 0).map(|(_, c)| c).sum())
}

fn act_word(w: UWord, xi: &CoordPoly) -> CoordPoly {
    let mut acc = xi.clone();
    let ladder = |raise: bool, p: &CoordPoly| {
        let mut out = CoordPoly::new();
        for (x, c) in p {
            for (y, cy) in coord::ladder_action(raise, *x) {
                coord::add_into(&mut out, y, &cy * c);
            }
        }
        out
    };
    for _ in 0..w.e {
        acc = ladder(true, &acc);
    }
    acc = acc
        .into_iter()
        .map(|(x, c)| {
            let f = QScalar::q_half_pow(w.k * x.weight2());
            (x, &c * &f)
        })
        .collect();
    for _ in 0..w.f {
        acc = ladder(false, &acc);
    }
    acc
}

/// Left Hopf action `u ▷ ξ` of U on the coordinate algebra.
pub fn act(u: &AlgebraElement, xi: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    let up = u.u_part().ok_or(AlgebraError::NotInU)?;
    let cp = xi.coord_part().ok_or(AlgebraError::NotCoordinate)?;
    let mut out = AlgebraElement::zero();
    for (w, c) in up {
        out = &out + &AlgebraElement::from_coord(&act_word(w, &cp)).scale(&c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> AlgebraElement {
        AlgebraElement::from_expression(s).unwrap()
    }

    #[test]
    fn generator_coproducts() {
        assert_eq!(coproduct(&el("K")).unwrap(), TensorElement::pure(&[el("K"), el("K")]));
        assert_eq!(
            coproduct(&AlgebraElement::one()).unwrap(),
            TensorElement::pure(&[AlgebraElement::one(), AlgebraElement::one()])
        );
        let expected = TensorElement::pure(&[el("K^2"), el("E*F")])
            .add(&TensorElement::pure(&[el("K*F"), el("E*K^-1")]))
            .add(&TensorElement::pure(&[el("E*K"), el("K^-1*F")]))
            .add(&TensorElement::pure(&[el("E*F"), el("K^-2")]));
        assert_eq!(coproduct(&el("E*F")).unwrap(), expected);
    }

    #[test]
    fn action_on_generators() {
        assert_eq!(act(&el("K"), &el("a")).unwrap(), el("q^(1/2)*a"));
        assert_eq!(act(&el("E"), &AlgebraElement::one()).unwrap(), AlgebraElement::zero());
        assert_eq!(act(&el("E"), &el("b")).unwrap(), el("a"));
        assert_eq!(act(&el("F"), &el("c")).unwrap(), el("d"));
        assert!(matches!(act(&el("a"), &el("b")), Err(AlgebraError::NotInU)));
        assert!(matches!(act(&el("E"), &el("E")), Err(AlgebraError::NotCoordinate)));
    }

    #[test]
    fn action_respects_coordinate_relations() {
        // ad − q bc = 1 must be annihilated by E and F, fixed by K
        for u in ["E", "F", "K", "E*F", "F^2*E"] {
            let u = el(u);
            let x = el("a*d - q*b*c - 1");
            assert!(x.is_zero());
            let y = el("d*a - q^-1*b*c");
            assert_eq!(act(&u, &y).unwrap(), AlgebraElement::scalar(counit(&u).unwrap()));
        }
    }
}
