//! Truncated Peter–Weyl representation of the crossed product on the
//! Podleś-sphere spinor space.
//!
//! Basis vectors `e(l,m,w)` are Haar-normalised matrix coefficients
//! `t^l_{m,w}`; `U` acts by `▷` on the column weight `w`, coordinates act by
//! left multiplication (shell coupling `l → l ± ½` per generator). The
//! spinor space keeps `w = ±½`; products are computed on an ambient space
//! with `|w| ≤ window/2` and then compressed.

pub mod cg;
pub mod linalg;
pub mod norms;
pub mod probes;
pub mod report;

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sprs::TriMat;

use crate::error::SpectralError;
use crate::qsymbolic::{AlgebraElement, CasimirVariant, CoordWord};
use crate::scalar::QScalar;
use cg::{cg_half, lower_coefficient, q_int, raise_coefficient};
pub use linalg::Matrix;
pub use norms::{
    analytic_order_estimate, elliptic_constant, op_norm_interior, shell_sobolev_norm, sobolev_norm,
    EllipticReport, OrderEstimate, OrderOptions,
};
pub use probes::{
    delta_theta, delta_theta_iterate, expansion_remainder, leading_term_defect, podles_generators,
    remainder_order, theta_conj, theta_prime_defect, twisted_commutator_dirac, ExpansionRemainder, IterateTrace,
};

pub const DEFAULT_BUFFER: i32 = 2;
/// Doubled ambient weight window: `|w| ≤ 7/2`.
pub const DEFAULT_WINDOW2: i32 = 7;

/// Doubled spin labels of a basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub l2: i32,
    pub m2: i32,
    pub w2: i32,
}

struct Ambient {
    basis: Vec<BasisIndex>,
    /// Generator matrices for a, b, c, d.
    gens: [Matrix; 4],
    e: Matrix,
    f: Matrix,
    spinor_of: Vec<Option<usize>>,
}

/// Immutable truncated representation. The ambient generator matrices are
/// built on first use, so spectrum-only consumers (zeta sums at large
/// cutoffs) stay cheap.
pub struct TruncatedRep {
    q: f64,
    cutoff2: i32,
    buffer: i32,
    window2: i32,
    spinor: Vec<BasisIndex>,
    dirac: Matrix,
    laplace: Vec<f64>,
    ambient: OnceLock<Ambient>,
}

impl std::fmt::Debug for TruncatedRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedRep")
            .field("q", &self.q)
            .field("cutoff2", &self.cutoff2)
            .field("buffer", &self.buffer)
            .field("window2", &self.window2)
            .field("dim", &self.spinor.len())
            .finish()
    }
}

/// Builds the representation for `0 < q ≤ 1`, cutoff `L = cutoff2/2 ≥ 5/2`
/// and buffer `B ≥ 1`.
pub fn build_rep(q: f64, cutoff2: i32, buffer: i32) -> Result<TruncatedRep, SpectralError> {
    build_rep_with_window(q, cutoff2, buffer, DEFAULT_WINDOW2)
}

pub fn build_rep_with_window(q: f64, cutoff2: i32, buffer: i32, window2: i32) -> Result<TruncatedRep, SpectralError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(SpectralError::InvalidQ(q));
    }
    if cutoff2 < 5 {
        return Err(SpectralError::InvalidCutoff(cutoff2));
    }
    if buffer < 1 || 2 * buffer >= cutoff2 {
        return Err(SpectralError::InvalidBuffer(buffer));
    }
    if window2 < 1 || window2 % 2 == 0 {
        return Err(SpectralError::WindowTooSmall { needed: 1, available: window2 });
    }
    let mut spinor = Vec::new();
    for l2 in (1..=cutoff2).step_by(2) {
        for m2 in (-l2..=l2).step_by(2) {
            for w2 in [-1, 1] {
                spinor.push(BasisIndex { l2, m2, w2 });
            }
        }
    }
    // D = [[0, E], [F, 0]] on (w = ½, w = −½): E raises −½ → ½, F lowers ½ → −½.
    let n = spinor.len();
    let mut t = TriMat::new((n, n));
    for (i, b) in spinor.iter().enumerate() {
        if b.w2 == -1 {
            t.add_triplet(i + 1, i, raise_coefficient(b.l2, -1, q));
        } else {
            t.add_triplet(i - 1, i, lower_coefficient(b.l2, 1, q));
        }
    }
    let dirac: Matrix = t.to_csr();
    let d2 = linalg::mul(&dirac, &dirac);
    let mut laplace = vec![1.0; n];
    for (&v, (i, j)) in d2.iter() {
        debug_assert_eq!(i, j, "D² must be diagonal in the Peter–Weyl basis");
        laplace[i] += v;
    }
    Ok(TruncatedRep { q, cutoff2, buffer, window2, spinor, dirac, laplace, ambient: OnceLock::new() })
}

/// Smallest ambient window (doubled) that can represent `x`.
pub fn required_window2(x: &AlgebraElement) -> i32 {
    x.terms().map(|(m, _)| 1 + 2 * (m.u.e + m.u.f) as i32 + m.coord.degree() as i32).max().unwrap_or(1)
}

/// Haar norm ratio `N(L,M)/N(l,m)` with `N(l,m) = q^{m}/√[2l+1]`; the sign
/// of the exponent is the one making `a* = d` and `b* = −qc` transposes.
fn haar_ratio(from: BasisIndex, to: BasisIndex, q: f64) -> f64 {
    let n = |l2: i32, m2: i32| q.powf(f64::from(m2) / 2.0) / q_int(l2 + 1, q).sqrt();
    n(to.l2, to.m2) / n(from.l2, from.m2)
}

impl TruncatedRep {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cutoff2(&self) -> i32 {
        self.cutoff2
    }

    pub fn buffer(&self) -> i32 {
        self.buffer
    }

    pub fn window2(&self) -> i32 {
        self.window2
    }

    pub fn dim(&self) -> usize {
        self.spinor.len()
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.spinor
    }

    /// Largest doubled spin whose vectors count as interior.
    pub fn interior_l2(&self) -> i32 {
        self.cutoff2 - 2 * self.buffer
    }

    /// Largest spinor shell (odd `l2`) inside the interior.
    pub fn top_interior_shell(&self) -> i32 {
        let l2 = self.interior_l2();
        if l2 % 2 == 0 {
            l2 - 1
        } else {
            l2
        }
    }

    pub fn interior_mask(&self) -> Vec<bool> {
        let top = self.interior_l2();
        self.spinor.iter().map(|b| b.l2 <= top).collect()
    }

    pub fn shell_mask(&self, l2: i32) -> Vec<bool> {
        self.spinor.iter().map(|b| b.l2 == l2).collect()
    }

    pub fn dirac(&self) -> &Matrix {
        &self.dirac
    }

    /// Eigenvalues of `Δ̂ = D̂² + 1`, indexed like [`basis`](Self::basis).
    pub fn laplace_eigenvalues(&self) -> &[f64] {
        &self.laplace
    }

    pub fn laplace(&self) -> Matrix {
        linalg::diag(&self.laplace)
    }

    /// `Δ̂^{p}` by spectral calculus.
    pub fn laplace_power(&self, p: f64) -> Matrix {
        linalg::diag(&self.laplace_power_diag(p))
    }

    pub fn laplace_power_diag(&self, p: f64) -> Vec<f64> {
        self.laplace.iter().map(|l| l.powf(p)).collect()
    }

    /// `K̂` (the `▷`-action) on the spinor space: `q^w`.
    pub fn k_hat_diag(&self) -> Vec<f64> {
        self.spinor.iter().map(|b| self.q.powf(f64::from(b.w2) / 2.0)).collect()
    }

    /// `K` acting on the row weight: `q^m`. Generates the modular weights
    /// used by the zeta functions.
    pub fn modular_k_diag(&self) -> Vec<f64> {
        self.spinor.iter().map(|b| self.q.powf(f64::from(b.m2) / 2.0)).collect()
    }

    /// `[l + ½]_q` for doubled spin `l2`: the positive Dirac eigenvalue.
    pub fn dirac_eigenvalue(&self, l2: i32) -> f64 {
        q_int((l2 + 1) / 2, self.q)
    }

    /// `ln(1 + [l + ½]²)` without forming `[l + ½]`, finite far beyond the
    /// cutoffs where `λ` itself overflows.
    pub fn laplace_log_eigenvalue(&self, l2: i32) -> f64 {
        let n = f64::from((l2 + 1) / 2);
        let h = -self.q.ln();
        if h == 0.0 || n * h < 300.0 {
            return self.dirac_eigenvalue(l2).powi(2).ln_1p();
        }
        // [n] = e^{nh}(1 − e^{−2nh})/(2 sinh h)
        let log_n = n * h + (-(-2.0 * n * h).exp()).ln_1p() - (2.0 * h.sinh()).ln();
        2.0 * log_n + (-2.0 * log_n).exp().ln_1p()
    }

    fn ambient(&self) -> &Ambient {
        self.ambient.get_or_init(|| build_ambient(self.q, self.cutoff2, self.window2))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient().basis.len()
    }

    /// Compression `P X P` of an ambient matrix to the spinor space.
    pub fn compress(&self, x: &Matrix) -> Matrix {
        let amb = self.ambient();
        let n = self.dim();
        let mut t = TriMat::new((n, n));
        for (&v, (i, j)) in x.iter() {
            if let (Some(si), Some(sj)) = (amb.spinor_of[i], amb.spinor_of[j]) {
                t.add_triplet(si, sj, v);
            }
        }
        t.to_csr()
    }

    /// Ambient matrix of a coordinate generator (`a, b, c, d` ↦ 0..4).
    pub fn generator_ambient(&self, idx: usize) -> &Matrix {
        &self.ambient().gens[idx]
    }

    pub fn e_ambient(&self) -> &Matrix {
        &self.ambient().e
    }

    pub fn f_ambient(&self) -> &Matrix {
        &self.ambient().f
    }

    pub fn ambient_basis(&self) -> &[BasisIndex] {
        &self.ambient().basis
    }

    /// Ambient columns whose products of up to `margin2/2` weight steps and
    /// `margin2/2` shells stay inside the truncation.
    pub fn ambient_interior_mask(&self, margin2: i32) -> Vec<bool> {
        let top = self.interior_l2();
        self.ambient()
            .basis
            .iter()
            .map(|b| b.l2 <= top && b.w2.abs() <= self.window2 - margin2)
            .collect()
    }

    fn coord_word_matrix(&self, w: CoordWord) -> Matrix {
        let amb = self.ambient();
        let n = amb.basis.len();
        let mut acc = linalg::identity(n);
        let (lead, count) = if w.ad >= 0 { (0, w.ad) } else { (3, -w.ad) };
        for _ in 0..count {
            acc = linalg::mul(&acc, &amb.gens[lead]);
        }
        for _ in 0..w.b {
            acc = linalg::mul(&acc, &amb.gens[1]);
        }
        for _ in 0..w.c {
            acc = linalg::mul(&acc, &amb.gens[2]);
        }
        acc
    }

    /// Ambient matrix of a crossed-product element: `ξ F^i K^j E^k` acts as
    /// `M(ξ) F̂^i K̂^j Ê^k`. K-parts are summed exactly per weight before
    /// evaluation, so removable singularities at `q = 1` cancel.
    pub fn represent_ambient(&self, x: &AlgebraElement) -> Result<Matrix, SpectralError> {
        let amb = self.ambient();
        let n = amb.basis.len();
        let mut groups: BTreeMap<(CoordWord, u32, u32), Vec<(i32, QScalar)>> = BTreeMap::new();
        for (m, c) in x.terms() {
            let needed = 1 + 2 * (m.u.e + m.u.f) as i32 + m.coord.degree() as i32;
            if needed > self.window2 {
                return Err(SpectralError::WindowTooSmall { needed, available: self.window2 });
            }
            groups.entry((m.coord, m.u.f, m.u.e)).or_default().push((m.u.k, c.clone()));
        }
        let mut total = linalg::zeros(n, n);
        for ((coord, f, e), ks) in groups {
            let mut cache: HashMap<i32, f64> = HashMap::new();
            let kdiag: Vec<f64> = amb
                .basis
                .iter()
                .map(|b| {
                    *cache.entry(b.w2).or_insert_with(|| {
                        ks.iter().map(|(j, c)| c.mul_q_half_pow(j * b.w2)).sum::<QScalar>().eval(self.q)
                    })
                })
                .collect();
            let mut m = linalg::diag(&kdiag);
            for _ in 0..e {
                m = linalg::mul(&m, &amb.e);
            }
            for _ in 0..f {
                m = linalg::mul(&amb.f, &m);
            }
            if !coord.is_one() {
                m = linalg::mul(&self.coord_word_matrix(coord), &m);
            }
            total = linalg::add(&total, &m);
        }
        Ok(total)
    }

    /// Spinor-space operator of `x`.
    pub fn represent(&self, x: &AlgebraElement) -> Result<Matrix, SpectralError> {
        Ok(self.compress(&self.represent_ambient(x)?))
    }
}

fn build_ambient(q: f64, cutoff2: i32, window2: i32) -> Ambient {
    let mut basis = Vec::new();
    for l2 in 0..=cutoff2 {
        for m2 in (-l2..=l2).step_by(2) {
            for w2 in (-l2..=l2).step_by(2) {
                if w2.abs() <= window2 {
                    basis.push(BasisIndex { l2, m2, w2 });
                }
            }
        }
    }
    let lookup: HashMap<BasisIndex, usize> = basis.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let n = basis.len();
    // (row weight i, column weight j) of a, b, c, d
    let shifts = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let gens = shifts.map(|(i2, j2)| {
        let mut t = TriMat::new((n, n));
        for (col, b) in basis.iter().enumerate() {
            for up in [true, false] {
                let to = BasisIndex { l2: if up { b.l2 + 1 } else { b.l2 - 1 }, m2: b.m2 + i2, w2: b.w2 + j2 };
                let Some(&row) = lookup.get(&to) else { continue };
                let v = cg_half(b.l2, up, i2, to.m2, q) * cg_half(b.l2, up, j2, to.w2, q) * haar_ratio(*b, to, q);
                if v != 0.0 {
                    t.add_triplet(row, col, v);
                }
            }
        }
        t.to_csr()
    });
    let ladder = |raise: bool| {
        let mut t = TriMat::new((n, n));
        for (col, b) in basis.iter().enumerate() {
            let (w2, v) = if raise {
                (b.w2 + 2, raise_coefficient(b.l2, b.w2, q))
            } else {
                (b.w2 - 2, lower_coefficient(b.l2, b.w2, q))
            };
            if let Some(&row) = lookup.get(&BasisIndex { w2, ..*b }) {
                if v != 0.0 {
                    t.add_triplet(row, col, v);
                }
            }
        }
        t.to_csr()
    };
    let e = ladder(true);
    let f = ladder(false);
    let mut spinor_of = vec![None; n];
    let mut k = 0;
    for (i, b) in basis.iter().enumerate() {
        if b.l2 % 2 == 1 && b.w2.abs() == 1 {
            spinor_of[i] = Some(k);
            k += 1;
        }
    }
    Ambient { basis, gens, e, f, spinor_of }
}

/// One transported relation `lhs − rhs` on interior vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationResidual {
    pub name: String,
    /// Largest interior entry of `lhs − rhs`, relative to `max(1, scale)`.
    pub residual: f64,
    /// Largest interior entry among the terms.
    pub scale: f64,
}

/// Coordinate, `U_q(su2)`, crossed, and star relations checked on ambient
/// columns with `l ≤ L − B` and two weight steps of margin.
pub fn relation_residuals(rep: &TruncatedRep) -> Vec<RelationResidual> {
    let q = rep.q;
    let [a, b, c, d] = rep.ambient().gens.clone();
    let e = rep.e_ambient().clone();
    let f = rep.f_ambient().clone();
    let basis = rep.ambient_basis();
    let n = basis.len();
    let cols = rep.ambient_interior_mask(4);
    let all = vec![true; n];
    let one = linalg::identity(n);
    let kpow = |p: f64| linalg::diag(&basis.iter().map(|bi| q.powf(p * f64::from(bi.w2) / 2.0)).collect::<Vec<_>>());
    // (K² − K⁻²)/(q − q⁻¹) = [2w] with the sign of w
    let bracket = linalg::diag(
        &basis
            .iter()
            .map(|bi| f64::from(bi.w2.signum()) * q_int(bi.w2.abs(), q))
            .collect::<Vec<_>>(),
    );
    let k = kpow(1.0);
    let kinv = kpow(-1.0);
    let m = linalg::mul;
    let s = linalg::scale;
    let qh = q.sqrt();
    let t = linalg::transpose;
    let rels: Vec<(&str, Vec<Matrix>, Vec<Matrix>)> = vec![
        ("ab = q ba", vec![m(&a, &b)], vec![s(&m(&b, &a), q)]),
        ("ac = q ca", vec![m(&a, &c)], vec![s(&m(&c, &a), q)]),
        ("bd = q db", vec![m(&b, &d)], vec![s(&m(&d, &b), q)]),
        ("cd = q dc", vec![m(&c, &d)], vec![s(&m(&d, &c), q)]),
        ("bc = cb", vec![m(&b, &c)], vec![m(&c, &b)]),
        ("ad - q bc = 1", vec![m(&a, &d), s(&m(&b, &c), -q)], vec![one.clone()]),
        ("da - q^-1 bc = 1", vec![m(&d, &a), s(&m(&b, &c), -1.0 / q)], vec![one.clone()]),
        ("KE = q EK", vec![m(&k, &e)], vec![s(&m(&e, &k), q)]),
        ("KF = q^-1 FK", vec![m(&k, &f)], vec![s(&m(&f, &k), 1.0 / q)]),
        ("EF - FE = (K^2 - K^-2)/(q - q^-1)", vec![m(&e, &f), s(&m(&f, &e), -1.0)], vec![bracket]),
        ("Ea = q^1/2 aE", vec![m(&e, &a)], vec![s(&m(&a, &e), qh)]),
        ("Eb = q^-1/2 bE + aK^-1", vec![m(&e, &b)], vec![s(&m(&b, &e), 1.0 / qh), m(&a, &kinv)]),
        ("Ec = q^1/2 cE", vec![m(&e, &c)], vec![s(&m(&c, &e), qh)]),
        ("Ed = q^-1/2 dE + cK^-1", vec![m(&e, &d)], vec![s(&m(&d, &e), 1.0 / qh), m(&c, &kinv)]),
        ("Fa = q^1/2 aF + bK^-1", vec![m(&f, &a)], vec![s(&m(&a, &f), qh), m(&b, &kinv)]),
        ("Fb = q^-1/2 bF", vec![m(&f, &b)], vec![s(&m(&b, &f), 1.0 / qh)]),
        ("Fc = q^1/2 cF + dK^-1", vec![m(&f, &c)], vec![s(&m(&c, &f), qh), m(&d, &kinv)]),
        ("Fd = q^-1/2 dF", vec![m(&f, &d)], vec![s(&m(&d, &f), 1.0 / qh)]),
        ("Ka = q^1/2 aK", vec![m(&k, &a)], vec![s(&m(&a, &k), qh)]),
        ("Kb = q^-1/2 bK", vec![m(&k, &b)], vec![s(&m(&b, &k), 1.0 / qh)]),
        ("a* = d", vec![t(&a)], vec![d.clone()]),
        ("b* = -q c", vec![t(&b)], vec![s(&c, -q)]),
        ("E* = F", vec![t(&e)], vec![f.clone()]),
    ];
    rels.into_iter()
        .map(|(name, lhs, rhs)| {
            let mut diff = linalg::zeros(n, n);
            let mut scale = 0.0f64;
            for x in &lhs {
                let xm = linalg::mask(x, &all, &cols);
                scale = scale.max(linalg::max_abs(&xm));
                diff = linalg::add(&diff, &xm);
            }
            for x in &rhs {
                let xm = linalg::mask(x, &all, &cols);
                scale = scale.max(linalg::max_abs(&xm));
                diff = linalg::sub(&diff, &xm);
            }
            RelationResidual { name: name.to_string(), residual: linalg::max_abs(&diff) / scale.max(1.0), scale }
        })
        .collect()
}

/// `D̂² − represent(C)` on one spinor shell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellDiscrepancy {
    pub l2: i32,
    /// Mean diagonal entry of the discrepancy block.
    pub scalar: f64,
    /// `[l + ½]²`, the size of the entries that cancel in the difference;
    /// relative measures are taken against `max(1, |scalar|, dirac_scale)`.
    pub dirac_scale: f64,
    /// Largest off-diagonal entry, relative.
    pub off_diagonal: f64,
    /// Largest deviation of a diagonal entry from `scalar`, relative.
    pub diagonal_spread: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CasimirComparison {
    pub variant: CasimirVariant,
    pub shells: Vec<ShellDiscrepancy>,
    /// Largest shell-to-shell variation of the scalar, relative to each
    /// shell's scale.
    pub shell_variation: f64,
    /// Mean of the per-shell scalars.
    pub constant: f64,
}

/// Per-shell table of `D̂² − represent(C)` on the interior.
pub fn dirac_squared_vs_casimir(
    rep: &TruncatedRep,
    variant: CasimirVariant,
) -> Result<CasimirComparison, SpectralError> {
    let c = rep.represent(&crate::qsymbolic::casimir(variant))?;
    let d2 = linalg::mul(&rep.dirac, &rep.dirac);
    let diff = linalg::sub(&d2, &c);
    let top = rep.interior_l2();
    let mut shells: BTreeMap<i32, (Vec<f64>, f64)> = BTreeMap::new();
    for (i, b) in rep.spinor.iter().enumerate() {
        if b.l2 <= top {
            shells.entry(b.l2).or_default().0.push(diff.get(i, i).copied().unwrap_or(0.0));
        }
    }
    for (&v, (i, j)) in diff.iter() {
        let (bi, bj) = (rep.spinor[i], rep.spinor[j]);
        if i != j && bj.l2 <= top {
            let slot = shells.entry(bj.l2).or_default();
            slot.1 = slot.1.max(v.abs());
            let _ = bi;
        }
    }
    let shells: Vec<ShellDiscrepancy> = shells
        .into_iter()
        .map(|(l2, (diag, off))| {
            let scalar = diag.iter().sum::<f64>() / diag.len() as f64;
            let dirac_scale = rep.dirac_eigenvalue(l2).powi(2);
            let denom = scalar.abs().max(1.0).max(dirac_scale);
            let spread = diag.iter().map(|v| (v - scalar).abs()).fold(0.0, f64::max) / denom;
            ShellDiscrepancy { l2, scalar, dirac_scale, off_diagonal: off / denom, diagonal_spread: spread }
        })
        .collect();
    // The lowest shell has the least cancellation and fixes the constant.
    let constant = shells.first().map_or(0.0, |s| s.scalar);
    let shell_variation = shells
        .iter()
        .map(|s| (s.scalar - constant).abs() / s.scalar.abs().max(constant.abs()).max(1.0).max(s.dirac_scale))
        .fold(0.0, f64::max);
    Ok(CasimirComparison { variant, shells, shell_variation, constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> AlgebraElement {
        AlgebraElement::from_expression(s).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_rep(1.5, 9, 2), Err(SpectralError::InvalidQ(_))));
        assert!(matches!(build_rep(0.0, 9, 2), Err(SpectralError::InvalidQ(_))));
        assert!(matches!(build_rep(0.5, 3, 1), Err(SpectralError::InvalidCutoff(3))));
        assert!(matches!(build_rep(0.5, 9, 0), Err(SpectralError::InvalidBuffer(0))));
    }

    #[test]
    fn relations_hold_on_interior() {
        for q in [0.5, 1.0, 0.8] {
            let rep = build_rep(q, 13, 2).unwrap();
            for r in relation_residuals(&rep) {
                assert!(r.residual <= 1e-12, "q={q} {}: {:e}", r.name, r.residual);
            }
        }
    }

    #[test]
    fn dirac_is_compressed_e_plus_f() {
        let rep = build_rep(0.5, 9, 2).unwrap();
        let d = rep.compress(&linalg::add(rep.e_ambient(), rep.f_ambient()));
        assert!(linalg::max_abs(&linalg::sub(&d, rep.dirac())) < 1e-12);
        assert!(linalg::max_abs(&linalg::sub(&d, &linalg::transpose(&d))) < 1e-12);
    }

    #[test]
    fn represent_units_and_relations() {
        let rep = build_rep(0.5, 11, 2).unwrap();
        let id = rep.represent(&AlgebraElement::one()).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&id, &linalg::identity(rep.dim()))) == 0.0);
        let kk = rep.represent(&el("K*K^-1")).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&kk, &linalg::identity(rep.dim()))) == 0.0);
        // product transport on interior columns
        let x = el("a*b*E + c*d");
        let y = el("b*K + c");
        let lhs = linalg::mul(&rep.represent_ambient(&x).unwrap(), &rep.represent_ambient(&y).unwrap());
        let rhs = rep.represent_ambient(&(&x * &y)).unwrap();
        let cols = rep.ambient_interior_mask(4);
        let all = vec![true; cols.len()];
        let diff = linalg::mask(&linalg::sub(&lhs, &rhs), &all, &cols);
        assert!(linalg::max_abs(&diff) <= 1e-12 * linalg::max_abs(&rhs).max(1.0));
    }

    #[test]
    fn classical_dirac_spectrum() {
        let rep = build_rep(1.0, 21, 2).unwrap();
        let (dense, _, _) = linalg::dense_support(rep.dirac());
        let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = Vec::new();
        for l2 in (1..=21).step_by(2) {
            let v = f64::from(l2 + 1) / 2.0;
            for _ in 0..=l2 {
                expected.push(v);
                expected.push(-v);
            }
        }
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev.len(), expected.len());
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn casimir_discrepancy_is_constant() {
        let q = 0.5;
        let rep = build_rep(q, 15, 2).unwrap();
        let cmp = dirac_squared_vs_casimir(&rep, CasimirVariant::Corrected).unwrap();
        let expected = -4.0 / (q - 1.0 / q).powi(2);
        assert!((cmp.constant - expected).abs() < 1e-10 * expected.abs());
        assert!(cmp.shell_variation < 1e-10);
        for s in &cmp.shells {
            assert!(s.off_diagonal < 1e-10 && s.diagonal_spread < 1e-10);
        }
        let minus = dirac_squared_vs_casimir(&build_rep(1.0, 9, 2).unwrap(), CasimirVariant::Minus).unwrap();
        assert!(minus.constant.abs() < 1e-10);
    }
}
