//! q-integers, spin-l ladder coefficients and spin-½ Clebsch–Gordan
//! coefficients for the coproduct `ΔE = K⊗E + E⊗K⁻¹`.
//!
//! Spins and weights are passed doubled (`l2 = 2l`, `m2 = 2m`) so that all
//! indices stay integral.

/// `[n]_q = sinh(n h)/sinh(h)` with `q = e^{−h}`, and `n` at `q = 1`.
pub fn q_int(n: i32, q: f64) -> f64 {
    if n <= 0 {
        return 0.0;
    }
    let h = -q.ln();
    if h == 0.0 {
        return f64::from(n);
    }
    (f64::from(n) * h).sinh() / h.sinh()
}

/// Coefficient of `E|l,w⟩ = √([l−w][l+w+1]) |l,w+1⟩`.
pub fn raise_coefficient(l2: i32, w2: i32, q: f64) -> f64 {
    let a = (l2 - w2) / 2;
    let b = (l2 + w2) / 2 + 1;
    (q_int(a, q) * q_int(b, q)).sqrt()
}

/// Coefficient of `F|l,w⟩ = √([l+w][l−w+1]) |l,w−1⟩`.
pub fn lower_coefficient(l2: i32, w2: i32, q: f64) -> f64 {
    let a = (l2 + w2) / 2;
    let b = (l2 - w2) / 2 + 1;
    (q_int(a, q) * q_int(b, q)).sqrt()
}

/// `⟨½, i; l, M−i | L, M⟩` with `L = l ± ½`.
///
/// `i2 = ±1` is the doubled spin-½ weight, `up` selects `L = l + ½`, and
/// `big_m2` is the doubled total weight. Zero when `|M| > L`.
pub fn cg_half(l2: i32, up: bool, i2: i32, big_m2: i32, q: f64) -> f64 {
    let big_l2 = if up { l2 + 1 } else { l2 - 1 };
    if big_l2 < 0 || big_m2.abs() > big_l2 {
        return 0.0;
    }
    // l ± M + ½ as integers
    let plus = (l2 + big_m2 + 1) / 2;
    let minus = (l2 - big_m2 + 1) / 2;
    let norm = q_int(l2 + 1, q);
    // exponents (l − M + ½)/2 and −(l + M + ½)/2, doubled once more
    let e_minus = f64::from(minus) / 2.0;
    let e_plus = -f64::from(plus) / 2.0;
    match (up, i2 > 0) {
        (true, true) => q.powf(e_minus) * (q_int(plus, q) / norm).sqrt(),
        (true, false) => q.powf(e_plus) * (q_int(minus, q) / norm).sqrt(),
        (false, true) => q.powf(e_plus) * (q_int(minus, q) / norm).sqrt(),
        (false, false) => -q.powf(e_minus) * (q_int(plus, q) / norm).sqrt(),
    }
}
