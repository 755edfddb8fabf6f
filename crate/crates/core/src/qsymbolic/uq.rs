//! U_q(su2) on E, F, K^{±1} with `KEK⁻¹ = qE`, `KFK⁻¹ = q⁻¹F` and
//! `[E,F] = (K² − K⁻²)/(q − q⁻¹)`, PBW basis `F^i K^j E^k`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::QScalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UWord {
    pub f: u32,
    pub k: i32,
    pub e: u32,
}

impl UWord {
    pub const ONE: UWord = UWord { f: 0, k: 0, e: 0 };
    pub const E: UWord = UWord { f: 0, k: 0, e: 1 };
    pub const F: UWord = UWord { f: 1, k: 0, e: 0 };
    pub const K: UWord = UWord { f: 0, k: 1, e: 0 };
    pub const KINV: UWord = UWord { f: 0, k: -1, e: 0 };

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn order(&self) -> u32 {
        self.f + self.e
    }
}

impl fmt::Display for UWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F^{} K^{} E^{}", self.f, self.k, self.e)
    }
}

pub type UPoly = BTreeMap<UWord, QScalar>;

#[cfg(test)]
fn add_into(acc: &mut UPoly, w: UWord, c: QScalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&w) {
        Some(slot) => {
            *slot = &*slot + &c;
            if slot.is_zero() {
                acc.remove(&w);
            }
        }
        None => {
            acc.insert(w, c);
        }
    }
}

/// `1/(q − q⁻¹)`.
pub(crate) fn inv_qdiff() -> QScalar {
    (QScalar::q() - QScalar::q_pow(-1)).recip()
}

/// `K^s · F^l K^j E^m = q^{−sl} F^l K^{j+s} E^m`.
pub fn left_k(s: i32, w: UWord) -> (UWord, QScalar) {
    (UWord { k: w.k + s, ..w }, QScalar::q_pow(-s * w.f as i32))
}

/// `E · F^l K^j E^m`.
pub fn left_e(w: UWord) -> Vec<(UWord, QScalar)> {
    let mut out = vec![(UWord { e: w.e + 1, ..w }, QScalar::q_pow(-w.k))];
    if w.f > 0 {
        // [E, F^l] = F^{l−1} (Σ_s q^{−2s} K² − Σ_s q^{2s} K⁻²)/(q − q⁻¹), s = 0..l−1
        let l = w.f as i32;
        let inv = inv_qdiff();
        let plus: QScalar = (0..l).map(|s| QScalar::q_pow(-2 * s)).sum();
        let minus: QScalar = (0..l).map(|s| QScalar::q_pow(2 * s)).sum();
        out.push((UWord { f: w.f - 1, k: w.k + 2, e: w.e }, &plus * &inv));
        out.push((UWord { f: w.f - 1, k: w.k - 2, e: w.e }, -(&minus * &inv)));
    }
    out
}

pub fn left_f(w: UWord) -> UWord {
    UWord { f: w.f + 1, ..w }
}

/// Product of PBW monomials in normal form (U-only reference route).
#[cfg(test)]
fn mul_words(x: UWord, y: UWord) -> UPoly {
    let mut acc = UPoly::new();
    acc.insert(y, QScalar::one());
    for _ in 0..x.e {
        let mut next = UPoly::new();
        for (w, c) in &acc {
            for (nw, nc) in left_e(*w) {
                add_into(&mut next, nw, &nc * c);
            }
        }
        acc = next;
    }
    if x.k != 0 {
        acc = acc
            .into_iter()
            .map(|(w, c)| {
                let (nw, nc) = left_k(x.k, w);
                (nw, &nc * &c)
            })
            .collect();
    }
    if x.f != 0 {
        acc = acc.into_iter().map(|(w, c)| (UWord { f: w.f + x.f, ..w }, c)).collect();
    }
    acc
}
