//! Twisted commutators, regularity iterates and expansion remainders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{self, Matrix};
use super::norms::{analytic_order_estimate, op_norm_interior, OrderEstimate, OrderOptions};
use super::TruncatedRep;
use crate::error::SpectralError;
use crate::mucalc::{mu_binomial_exact, WeightTuple};
use crate::qsymbolic::{casimir, twist_theta, twisted_commutator, weight_decompose, AlgebraElement, CasimirVariant};

/// Weight-zero generators of the Podleś sphere, by name.
pub fn podles_generators() -> Vec<(&'static str, AlgebraElement)> {
    vec![("ab", &AlgebraElement::a() * &AlgebraElement::b()), ("bc", &AlgebraElement::b() * &AlgebraElement::c()), (
        "cd",
        &AlgebraElement::c() * &AlgebraElement::d(),
    )]
}

/// `θ^s(T) = K̂^s T K̂^{−s}`.
pub fn theta_conj(t: &Matrix, s: f64, rep: &TruncatedRep) -> Matrix {
    let k = rep.k_hat_diag();
    let left: Vec<f64> = k.iter().map(|v| v.powf(s)).collect();
    let right: Vec<f64> = k.iter().map(|v| v.powf(-s)).collect();
    linalg::scale_rows_cols(t, &left, &right)
}

/// `δ_θ(T) = Δ̂^{1/2} T − θ(T) Δ̂^{1/2}`.
pub fn delta_theta(t: &Matrix, rep: &TruncatedRep) -> Matrix {
    let half = rep.laplace_power_diag(0.5);
    let ones = vec![1.0; rep.dim()];
    let lhs = linalg::scale_rows_cols(t, &half, &ones);
    let rhs = linalg::scale_rows_cols(&theta_conj(t, 1.0, rep), &ones, &half);
    linalg::sub(&lhs, &rhs)
}

/// `[D̂, T]_θ = D̂T − θ(T)D̂`.
pub fn twisted_commutator_dirac(t: &Matrix, rep: &TruncatedRep) -> Matrix {
    let d = rep.dirac();
    linalg::sub(&linalg::mul(d, t), &linalg::mul(&theta_conj(t, 1.0, rep), d))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterateTrace {
    /// Interior operator norms of `δ_θ^k(T)` for `k = 0..=n`.
    pub norms: Vec<f64>,
}

/// `δ_θ^n(T)` with the interior norms of every iterate.
pub fn delta_theta_iterate(t: &Matrix, n: usize, rep: &TruncatedRep) -> (Matrix, IterateTrace) {
    let mut cur = t.clone();
    let mut norms = vec![op_norm_interior(&cur, rep)];
    for _ in 0..n {
        cur = delta_theta(&cur, rep);
        norms.push(op_norm_interior(&cur, rep));
    }
    (cur, IterateTrace { norms })
}

/// `Δ = C₋ + 1`, the symbolic element represented by `Δ̂ = D̂² + 1`.
pub fn laplace_element() -> AlgebraElement {
    &casimir(CasimirVariant::Minus) + &AlgebraElement::one()
}

#[derive(Clone, Debug)]
pub struct ExpansionRemainder {
    /// `Q = Δ̂ᶻŶ − Σ_{k≤n} Σ_𝛍 binom(z,k)_𝛍 (∇^𝛍Y)^ Δ̂^{z−k}`.
    pub remainder: Matrix,
    /// The `k = 0` part of the sum.
    pub leading: Matrix,
    /// Number of `(k, 𝛍)` terms with nonzero `∇^𝛍Y`.
    pub terms: usize,
}

/// Remainder of the order-`n` expansion of `Δᶻ Y` for real `z`, with
/// `∇(X) = ΔX − θ²(X)Δ` taken for the represented Laplacian and the
/// coefficients evaluated at `Z = q^z`.
pub fn expansion_remainder(
    y: &AlgebraElement,
    z: f64,
    n: usize,
    rep: &TruncatedRep,
) -> Result<ExpansionRemainder, SpectralError> {
    let delta = laplace_element();
    let q = rep.q();
    let ones = vec![1.0; rep.dim()];
    let mut level: Vec<(Vec<i32>, AlgebraElement)> =
        weight_decompose(y).into_iter().map(|(w, x)| (vec![w], x)).collect();
    let mut sum = linalg::zeros(rep.dim(), rep.dim());
    let mut leading = sum.clone();
    let mut terms = 0;
    for k in 0..=n {
        let mut next = Vec::new();
        let right = rep.laplace_power_diag(z - k as f64);
        for (mu, x) in level {
            let weights = WeightTuple { exponents: mu.clone(), alt_reals: None };
            let coef = mu_binomial_exact(k, &weights)?.eval(q, Complex64::new(z, 0.0)).re;
            let term = linalg::scale(&linalg::scale_rows_cols(&rep.represent(&x)?, &ones, &right), coef);
            sum = linalg::add(&sum, &term);
            if k == 0 {
                leading = linalg::add(&leading, &term);
            }
            terms += 1;
            if k < n {
                let nx = twisted_commutator(&delta, &x, 4).expect("θ² never needs quarter powers");
                for (w, comp) in weight_decompose(&nx) {
                    let mut m2 = mu.clone();
                    m2.push(w);
                    next.push((m2, comp));
                }
            }
        }
        level = next;
    }
    let lhs = linalg::scale_rows_cols(&rep.represent(y)?, &rep.laplace_power_diag(z), &ones);
    Ok(ExpansionRemainder { remainder: linalg::sub(&lhs, &sum), leading, terms })
}

/// Largest interior entry of `leading − θ^{2z}(Y)^ Δ̂ᶻ` for integer `z`,
/// with `θ^{2z}` applied symbolically, relative to the leading term.
pub fn leading_term_defect(y: &AlgebraElement, z: i32, rep: &TruncatedRep) -> Result<f64, SpectralError> {
    let exp = expansion_remainder(y, f64::from(z), 0, rep)?;
    let twisted = twist_theta(y, 4 * z).expect("integer powers of θ² never need quarter powers");
    let ones = vec![1.0; rep.dim()];
    let oracle = linalg::scale_rows_cols(&rep.represent(&twisted)?, &ones, &rep.laplace_power_diag(f64::from(z)));
    let interior = rep.interior_mask();
    let diff = linalg::mask(&linalg::sub(&exp.leading, &oracle), &interior, &interior);
    let scale = linalg::max_abs(&linalg::mask(&oracle, &interior, &interior)).max(f64::MIN_POSITIVE);
    Ok(linalg::max_abs(&diff) / scale)
}

/// Order estimate of the expansion remainder across a cutoff schedule.
pub fn remainder_order(
    y: &AlgebraElement,
    z: f64,
    n: usize,
    q: f64,
    cutoffs2: &[i32],
    buffer: i32,
    opts: &OrderOptions,
) -> Result<OrderEstimate, SpectralError> {
    analytic_order_estimate(q, cutoffs2, buffer, opts, |rep| Ok(expansion_remainder(y, z, n, rep)?.remainder))
}

/// `Θ′(T) − θ(T)` with `Θ′(T) = Δ̂^{1/2} T Δ̂^{−1/2}` and `θ(T) = K̂TK̂⁻¹`.
pub fn theta_prime_defect(t: &Matrix, rep: &TruncatedRep) -> Matrix {
    let big = linalg::scale_rows_cols(t, &rep.laplace_power_diag(0.5), &rep.laplace_power_diag(-0.5));
    linalg::sub(&big, &theta_conj(t, 1.0, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_rep;

    #[test]
    fn trivial_derivations_vanish() {
        let rep = build_rep(0.5, 11, 2).unwrap();
        let id = linalg::identity(rep.dim());
        assert_eq!(linalg::max_abs(&delta_theta(&id, &rep)), 0.0);
        let k = rep.represent(&AlgebraElement::k()).unwrap();
        assert_eq!(linalg::max_abs(&delta_theta(&k, &rep)), 0.0);
    }

    #[test]
    fn expansion_of_k_is_exact() {
        let rep = build_rep(0.5, 11, 2).unwrap();
        for n in 0..=2 {
            let r = expansion_remainder(&AlgebraElement::k(), -1.0, n, &rep).unwrap();
            assert_eq!(linalg::max_abs(&r.remainder), 0.0);
        }
    }

    #[test]
    fn leading_term_matches_twist() {
        let rep = build_rep(0.5, 13, 2).unwrap();
        for (_, a) in podles_generators() {
            assert!(leading_term_defect(&a, -1, &rep).unwrap() < 1e-12);
        }
        let mixed = &(&AlgebraElement::a() * &AlgebraElement::f()) + &AlgebraElement::e();
        assert!(leading_term_defect(&mixed, -1, &rep).unwrap() < 1e-12);
    }

    #[test]
    fn podles_generators_are_untwisted() {
        let rep = build_rep(0.5, 11, 2).unwrap();
        for (_, a) in podles_generators() {
            let m = rep.represent(&a).unwrap();
            assert!(linalg::max_abs(&linalg::sub(&theta_conj(&m, 1.0, &rep), &m)) < 1e-15);
        }
    }
}
