//! Twisting `θ(ξh) = (K ▷ ξ)h`, its weight decomposition, twisted
//! commutators with the Casimir and the iterated, weight-projected `∇^μ`.

use std::collections::BTreeMap;

use super::{AlgebraElement, Monomial};
use crate::error::AlgebraError;
use crate::mucalc::{mu_binomial_exact, MuBinomialExact, WeightTuple};
use crate::scalar::QScalar;

/// `θ^{s}` with `s = half_steps / 2`.
///
/// On `ξh` with `K ▷ ξ = q^{w/2} ξ` this multiplies by `q^{s w / 2}`, which
/// needs a quarter power of `q` when `half_steps · w` is odd.
pub fn twist_theta(x: &AlgebraElement, half_steps: i32) -> Result<AlgebraElement, AlgebraError> {
    let mut out = AlgebraElement::zero();
    for (m, c) in x.terms() {
        let w = m.coord.weight2();
        let e = half_steps * w;
        if e % 2 != 0 {
            return Err(AlgebraError::QuarterPower { half_steps, weight2: w });
        }
        out.add_term(*m, c * &QScalar::q_half_pow(e / 2));
    }
    Ok(out)
}

fn theta2(x: &AlgebraElement) -> AlgebraElement {
    twist_theta(x, 4).expect("integer powers of θ never need quarter powers")
}

/// Splits `x` into θ²-eigencomponents, keyed by the exponent `w` of the
/// eigenvalue `q^w`.
pub fn weight_decompose(x: &AlgebraElement) -> BTreeMap<i32, AlgebraElement> {
    let mut out: BTreeMap<i32, AlgebraElement> = BTreeMap::new();
    for (m, c) in x.terms() {
        out.entry(m.coord.weight2()).or_default().add_term(*m, c.clone());
    }
    out
}

/// `[Δ, x]_{θ^s} = Δx − θ^s(x)Δ`.
pub fn twisted_commutator(
    delta: &AlgebraElement,
    x: &AlgebraElement,
    half_steps: i32,
) -> Result<AlgebraElement, AlgebraError> {
    Ok(&(delta * x) - &(&twist_theta(x, half_steps)? * delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CasimirVariant {
    /// `EF + ((q^{−1/2}K + q^{1/2}K⁻¹)/(q − q⁻¹))²` — central.
    Corrected,
    /// `EF + ((q^{−1/2}K² + q^{1/2}K⁻²)/(q − q⁻¹))²` — not central.
    Printed,
    /// `EF + ((q^{−1/2}K − q^{1/2}K⁻¹)/(q − q⁻¹))²` — central; differs from
    /// `Corrected` by the constant `4/(q − q⁻¹)²`.
    Minus,
}

pub fn casimir(variant: CasimirVariant) -> AlgebraElement {
    let (kp, sign) = match variant {
        CasimirVariant::Corrected => (1, 1),
        CasimirVariant::Printed => (2, 1),
        CasimirVariant::Minus => (1, -1),
    };
    let inv = (QScalar::q() - QScalar::q_pow(-1)).recip();
    let mut inner = AlgebraElement::zero();
    inner.add_term(
        Monomial { u: super::UWord { k: kp, ..Default::default() }, ..Default::default() },
        &QScalar::q_half_pow(-1) * &inv,
    );
    inner.add_term(
        Monomial { u: super::UWord { k: -kp, ..Default::default() }, ..Default::default() },
        &(&QScalar::q_half_pow(1) * &inv) * &QScalar::from_int(sign),
    );
    &(&AlgebraElement::e() * &AlgebraElement::f()) + &(&inner * &inner)
}

/// `Cx − xC`.
pub fn centrality_defect(x: &AlgebraElement, variant: CasimirVariant) -> AlgebraElement {
    casimir(variant).commutator(x)
}

/// `∇(x) = Cx − θ²(x)C` with the central Casimir.
pub fn nabla(x: &AlgebraElement) -> AlgebraElement {
    let c = casimir(CasimirVariant::Corrected);
    &(&c * x) - &(&theta2(x) * &c)
}

/// Iterated weight-projected twisted commutator: `∇^{(μ₀)}(x) = x^{μ₀}` and
/// `∇^{(μ₀,…,μ_k)}(x) = (∇(∇^{(μ₀,…,μ_{k−1})}(x)))^{μ_k}`; weights are given by
/// their θ²-exponents.
pub fn nabla_mu(x: &AlgebraElement, mu: &WeightTuple) -> AlgebraElement {
    let mut it = mu.exponents.iter();
    let Some(&w0) = it.next() else {
        return AlgebraElement::zero();
    };
    let mut cur = weight_decompose(x).remove(&w0).unwrap_or_default();
    for &w in it {
        if cur.is_zero() {
            break;
        }
        cur = weight_decompose(&nabla(&cur)).remove(&w).unwrap_or_default();
    }
    cur
}

/// One term `binom(z,k)_μ · ∇^μ(Y) · Δ^{z−k}` of the expansion of `Δ^z Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub coefficient: MuBinomialExact,
    pub weights: WeightTuple,
    pub element: AlgebraElement,
    /// The `k` in `Δ^{z−k}`.
    pub shift: usize,
}

/// All nonzero terms with `k ≤ n`, enumerated depth-first over weight tuples.
pub fn expansion_terms(y: &AlgebraElement, n: usize) -> Vec<ExpansionTerm> {
    let mut out = Vec::new();
    let mut level: Vec<(Vec<i32>, AlgebraElement)> =
        weight_decompose(y).into_iter().map(|(w, x)| (vec![w], x)).collect();
    for k in 0..=n {
        let mut next = Vec::new();
        for (mu, x) in level {
            let weights = WeightTuple { exponents: mu.clone(), alt_reals: None };
            let coefficient = mu_binomial_exact(k, &weights).expect("tuple length is k+1");
            if k < n {
                for (w, comp) in weight_decompose(&nabla(&x)) {
                    let mut m2 = mu.clone();
                    m2.push(w);
                    next.push((m2, comp));
                }
            }
            out.push(ExpansionTerm { coefficient, weights, element: x, shift: k });
        }
        level = next;
    }
    out
}
