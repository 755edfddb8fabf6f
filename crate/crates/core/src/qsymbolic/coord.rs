//! The coordinate algebra O(SU_q(2)) on generators a, b, c, d with
//!
//! ```text
//! ab = q ba   ac = q ca   bd = q db   cd = q dc   bc = cb
//! ad − q bc = 1           da − q⁻¹ bc = 1
//! ```
//!
//! and its PBW basis `a^α b^β c^γ`, `d^δ b^β c^γ` (δ ≥ 1).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::QScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    /// Twice the K-weight: `K ▷ x = q^{w/2} x`.
    pub fn weight2(self) -> i32 {
        match self {
            Letter::A | Letter::C => 1,
            Letter::B | Letter::D => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
        }
    }

    pub fn word(self) -> CoordWord {
        match self {
            Letter::A => CoordWord { ad: 1, b: 0, c: 0 },
            Letter::B => CoordWord { ad: 0, b: 1, c: 0 },
            Letter::C => CoordWord { ad: 0, b: 0, c: 1 },
            Letter::D => CoordWord { ad: -1, b: 0, c: 0 },
        }
    }
}

/// PBW monomial: `a^{ad} b^b c^c` when `ad ≥ 0`, `d^{−ad} b^b c^c` otherwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordWord {
    pub ad: i32,
    pub b: u32,
    pub c: u32,
}

impl CoordWord {
    pub const ONE: CoordWord = CoordWord { ad: 0, b: 0, c: 0 };

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn degree(&self) -> u32 {
        self.ad.unsigned_abs() + self.b + self.c
    }

    /// Twice the K-weight of the monomial.
    pub fn weight2(&self) -> i32 {
        self.ad - self.b as i32 + self.c as i32
    }

    pub fn letters(&self) -> Vec<Letter> {
        let head = if self.ad >= 0 { Letter::A } else { Letter::D };
        let mut out = vec![head; self.ad.unsigned_abs() as usize];
        out.extend(std::iter::repeat(Letter::B).take(self.b as usize));
        out.extend(std::iter::repeat(Letter::C).take(self.c as usize));
        out
    }
}

impl fmt::Display for CoordWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let mut push = |sym: char, e: u32| match e {
            0 => {}
            1 => parts.push(sym.to_string()),
            _ => parts.push(format!("{sym}^{e}")),
        };
        if self.ad >= 0 {
            push('a', self.ad as u32);
        } else {
            push('d', self.ad.unsigned_abs());
        }
        push('b', self.b);
        push('c', self.c);
        write!(f, "{}", parts.join(" "))
    }
}

/// Finite combination of PBW monomials.
pub type CoordPoly = BTreeMap<CoordWord, QScalar>;

pub(crate) fn add_into(acc: &mut CoordPoly, w: CoordWord, c: QScalar) {
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

/// `∏_{s}(1 + q^{e_s} bc)` expanded as coefficients of `(bc)^j`.
fn bc_product(exps: impl Iterator<Item = i32>) -> Vec<QScalar> {
    let mut p = vec![QScalar::one()];
    for e in exps {
        let qe = QScalar::q_pow(e);
        let mut next = p.clone();
        next.push(QScalar::zero());
        for (j, c) in p.iter().enumerate() {
            next[j + 1] = &next[j + 1] + &(c * &qe);
        }
        p = next;
    }
    p
}

/// Product of two PBW monomials, in normal form.
pub fn mul_words(x: CoordWord, y: CoordWord) -> CoordPoly {
    // Move b^{β₁}c^{γ₁} past the a/d head of y.
    let tail = (x.b + x.c) as i32;
    // b^β c^γ a^α = q^{−α(β+γ)} a^α b^β c^γ and b^β c^γ d^δ = q^{δ(β+γ)} d^δ b^β c^γ.
    let base = QScalar::q_pow(-y.ad * tail);
    let (b, c) = (x.b + y.b, x.c + y.c);
    let mut out = CoordPoly::new();
    let same_kind = x.ad == 0 || y.ad == 0 || (x.ad > 0) == (y.ad > 0);
    if same_kind {
        out.insert(CoordWord { ad: x.ad + y.ad, b, c }, base);
        return out;
    }
    let (head, bc) = if x.ad > 0 {
        // a^α d^δ = a^{α−m} d^{δ−m} ∏_{s=1}^{m} (1 + q^{2(δ−m+s)−1} bc)
        let (alpha, delta) = (x.ad, -y.ad);
        let m = alpha.min(delta);
        (alpha - delta, bc_product((1..=m).map(|s| 2 * (delta - m + s) - 1)))
    } else {
        // d^δ a^α = d^{δ−m} a^{α−m} ∏_{s=1}^{m} (1 + q^{1−2(α−m+s)} bc)
        let (delta, alpha) = (-x.ad, y.ad);
        let m = alpha.min(delta);
        (alpha - delta, bc_product((1..=m).map(|s| 1 - 2 * (alpha - m + s))))
    };
    for (j, coef) in bc.into_iter().enumerate() {
        let j = j as u32;
        add_into(&mut out, CoordWord { ad: head, b: b + j, c: c + j }, &coef * &base);
    }
    out
}

#[cfg(test)]
pub fn mul_polys(x: &CoordPoly, y: &CoordPoly) -> CoordPoly {
    let mut out = CoordPoly::new();
    for (wx, cx) in x {
        for (wy, cy) in y {
            let cxy = cx * cy;
            for (w, c) in mul_words(*wx, *wy) {
                add_into(&mut out, w, &c * &cxy);
            }
        }
    }
    out
}

/// Normal form of an arbitrary word in the letters.
pub fn normalize_letters(letters: &[Letter]) -> CoordPoly {
    let mut acc = CoordPoly::new();
    acc.insert(CoordWord::ONE, QScalar::one());
    for l in letters {
        let mut next = CoordPoly::new();
        for (w, c) in &acc {
            for (w2, c2) in mul_words(*w, l.word()) {
                add_into(&mut next, w2, &c2 * c);
            }
        }
        acc = next;
    }
    acc
}

/// Raising/lowering part of the action of `E` (`b ↦ a`, `d ↦ c`) or `F`
/// (`a ↦ b`, `c ↦ d`) on single letters.
fn ladder(raise: bool, l: Letter) -> Option<Letter> {
    match (raise, l) {
        (true, Letter::B) => Some(Letter::A),
        (true, Letter::D) => Some(Letter::C),
        (false, Letter::A) => Some(Letter::B),
        (false, Letter::C) => Some(Letter::D),
        _ => None,
    }
}

/// `E ▷ w` (raise) or `F ▷ w` (lower) through the module-algebra rule with
/// `ΔE = K⊗E + E⊗K⁻¹` (same shape for F): the letter at position i is hit,
/// the prefix picks up K and the suffix K⁻¹.
pub fn ladder_action(raise: bool, w: CoordWord) -> CoordPoly {
    let letters = w.letters();
    let mut out = CoordPoly::new();
    let total: i32 = letters.iter().map(|l| l.weight2()).sum();
    let mut prefix = 0;
    for (i, &l) in letters.iter().enumerate() {
        let suffix = total - prefix - l.weight2();
        if let Some(new) = ladder(raise, l) {
            let mut word = letters.clone();
            word[i] = new;
            // q^{(prefix − suffix)/2}
            let coef = QScalar::q_half_pow(prefix - suffix);
            for (nw, c) in normalize_letters(&word) {
                add_into(&mut out, nw, &c * &coef);
            }
        }
        prefix += l.weight2();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> CoordPoly {
        let letters: Vec<Letter> = s
            .chars()
            .map(|ch| match ch {
                'a' => Letter::A,
                'b' => Letter::B,
                'c' => Letter::C,
                'd' => Letter::D,
                _ => panic!(),
            })
            .collect();
        normalize_letters(&letters)
    }

    fn poly(terms: &[(CoordWord, &str)]) -> CoordPoly {
        let mut out = CoordPoly::new();
        for (w, c) in terms {
            add_into(&mut out, *w, c.parse().unwrap());
        }
        out
    }

    const A: CoordWord = CoordWord { ad: 1, b: 0, c: 0 };
    const B: CoordWord = CoordWord { ad: 0, b: 1, c: 0 };
    const C: CoordWord = CoordWord { ad: 0, b: 0, c: 1 };
    const BC: CoordWord = CoordWord { ad: 0, b: 1, c: 1 };

    #[test]
    fn defining_relations() {
        assert_eq!(word("ba"), poly(&[(CoordWord { ad: 1, b: 1, c: 0 }, "q^-1")]));
        assert_eq!(word("ca"), poly(&[(CoordWord { ad: 1, b: 0, c: 1 }, "q^-1")]));
        assert_eq!(word("bd"), poly(&[(CoordWord { ad: -1, b: 1, c: 0 }, "q")]));
        assert_eq!(word("cd"), poly(&[(CoordWord { ad: -1, b: 0, c: 1 }, "q")]));
        assert_eq!(word("cb"), poly(&[(BC, "1")]));
        assert_eq!(word("ad"), poly(&[(CoordWord::ONE, "1"), (BC, "q")]));
        assert_eq!(word("da"), poly(&[(CoordWord::ONE, "1"), (BC, "q^-1")]));
    }

    #[test]
    fn associativity_on_words() {
        let words = ["adda", "bdac", "cadb", "ddaab", "abcdd", "daadc"];
        for w in words {
            // left-to-right folding vs splitting in the middle
            let (l, r) = w.split_at(w.len() / 2);
            assert_eq!(word(w), mul_polys(&word(l), &word(r)), "{w}");
        }
    }

    #[test]
    fn ladder_on_generators() {
        assert_eq!(ladder_action(true, B), poly(&[(A, "1")]));
        assert!(ladder_action(true, A).is_empty());
        assert_eq!(ladder_action(false, A), poly(&[(B, "1")]));
        assert_eq!(ladder_action(false, C), poly(&[(CoordWord { ad: -1, b: 0, c: 0 }, "1")]));
    }
}
