//! Plain-text tables for spectra and norm profiles.

use std::fmt::Write;

use super::norms::OrderEstimate;
use super::TruncatedRep;

/// Doubled label as `n` or `n/2`.
pub fn half_label(x2: i32) -> String {
    if x2 % 2 == 0 {
        (x2 / 2).to_string()
    } else {
        format!("{x2}/2")
    }
}

/// `l,m,w,eigenvalue` rows of `Δ̂` in lexicographic `(l, m, w)` order.
pub fn spectrum_csv(rep: &TruncatedRep) -> String {
    let mut out = String::from("l,m,w,eigenvalue\n");
    let mut rows: Vec<_> = rep.basis().iter().zip(rep.laplace_eigenvalues()).collect();
    rows.sort_by_key(|(b, _)| **b);
    for (b, ev) in rows {
        writeln!(out, "{},{},{},{:.17e}", half_label(b.l2), half_label(b.m2), half_label(b.w2), ev).unwrap();
    }
    out
}

/// `cutoff,shell,laplace_eigenvalue,s,norm` rows of an order estimate.
pub fn norm_profile_csv(est: &OrderEstimate, s_grid: &[f64]) -> String {
    let mut out = String::from("cutoff,shell,laplace_eigenvalue,s,norm\n");
    for smp in &est.samples {
        for (s, n) in s_grid.iter().zip(&smp.norms) {
            writeln!(
                out,
                "{},{},{:.17e},{},{:.17e}",
                half_label(smp.cutoff2),
                half_label(smp.shell_l2),
                smp.laplace_eigenvalue,
                s,
                n
            )
            .unwrap();
        }
    }
    out
}
