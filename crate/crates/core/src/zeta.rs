//! Weighted zeta functions `ζ_X(z) = Tr(ρ X Δ̂^{−z/2})` on the spinor space,
//! their residues at `z = 0`, pole-order fits and twisted-trace defects.
//!
//! The weight is `ρ = K̂_m^p Δ̂^{−p/2}` where `K̂_m = q^m` acts on the row
//! weight. For `p ≠ 0` the `K̂_m^p` shell sums grow like `λ^{p/2}` and the
//! Laplacian factor brings them back to a bounded geometric profile, which
//! turns the double pole of `ρ = 1` into a simple pole at the origin.

use std::fmt::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ZetaError;
use crate::spectral::norms::regress;
use sprs::TriMat;

use crate::qsymbolic::AlgebraElement;
use crate::spectral::{build_rep, build_rep_with_window, required_window2, Matrix, TruncatedRep};

pub const DEFAULT_S_GRID: [f64; 7] = [0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.07];
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;
/// Hard ceiling on the doubled cutoff of the automatic schedule.
pub const MAX_CUTOFF2: i32 = 4001;

/// `ln ρ_i` for `ρ = K̂_m^p Δ̂^{−p/2}`.
fn log_rho(rep: &TruncatedRep, p: i32, log_lam: &[f64]) -> Vec<f64> {
    let pf = f64::from(p);
    let lq = rep.q().ln();
    rep.basis().iter().zip(log_lam).map(|(b, ll)| pf * (f64::from(b.m2) / 2.0 * lq - ll / 2.0)).collect()
}

fn log_laplace(rep: &TruncatedRep) -> Vec<f64> {
    rep.basis().iter().map(|b| rep.laplace_log_eigenvalue(b.l2)).collect()
}

/// Diagonal of `ρ = K̂_m^p Δ̂^{−p/2}`.
pub fn rho_diag(rep: &TruncatedRep, p: i32) -> Vec<f64> {
    if p == 0 {
        return vec![1.0; rep.dim()];
    }
    log_rho(rep, p, &log_laplace(rep)).into_iter().map(f64::exp).collect()
}

/// `σ(X) = ρ X ρ⁻¹`.
pub fn sigma(x: &Matrix, rep: &TruncatedRep, p: i32) -> Matrix {
    let lr = log_rho(rep, p, &log_laplace(rep));
    let mut t = TriMat::new(x.shape());
    for (&v, (i, j)) in x.iter() {
        t.add_triplet(i, j, v * (lr[i] - lr[j]).exp());
    }
    t.to_csr()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub cutoff2: i32,
}

/// Per-shell sums `Σ_{i ∈ shell} ρ_i X_ii λ_i^{−z/2}` and their absolute
/// counterparts at `Re z`.
fn shell_terms(x: &Matrix, p: i32, z: Complex64, rep: &TruncatedRep) -> Vec<(i32, Complex64, f64)> {
    let log_lam = log_laplace(rep);
    let log_rho = log_rho(rep, p, &log_lam);
    let mut out: Vec<(i32, Complex64, f64)> = Vec::new();
    for (i, b) in rep.basis().iter().enumerate() {
        if out.last().map_or(true, |t| t.0 != b.l2) {
            out.push((b.l2, Complex64::new(0.0, 0.0), 0.0));
        }
        let xi = x.get(i, i).copied().unwrap_or(0.0);
        if xi == 0.0 {
            continue;
        }
        let slot = out.last_mut().unwrap();
        slot.1 += (Complex64::new(log_rho[i], 0.0) - z / 2.0 * log_lam[i]).exp() * xi;
        slot.2 += (log_rho[i] - z.re / 2.0 * log_lam[i]).exp() * xi.abs();
    }
    out
}

/// Geometric tail bound from the last shells: with `r` the largest of the
/// last three absolute shell ratios, the tail is at most `A_L r/(1−r)`.
fn tail_bound(shells: &[(i32, Complex64, f64)]) -> f64 {
    let abs: Vec<f64> = shells.iter().map(|s| s.2).collect();
    let last = *abs.last().unwrap_or(&0.0);
    if last == 0.0 {
        return 0.0;
    }
    let n = abs.len();
    let r = (n.saturating_sub(3)..n)
        .filter(|&i| i > 0 && abs[i - 1] > 0.0)
        .map(|i| abs[i] / abs[i - 1])
        .fold(0.0, f64::max);
    if r >= 1.0 {
        f64::INFINITY
    } else {
        last * r / (1.0 - r)
    }
}

/// Partial sum of `ζ_X(z)` over the spinor basis, with a geometric tail
/// bound. Only the diagonal of `X` enters because `ρ` and `Δ̂` are diagonal.
pub fn zeta_partial(x: &Matrix, p: i32, z: Complex64, rep: &TruncatedRep, tol: f64) -> Result<ZetaValue, ZetaError> {
    if z.re <= 0.0 {
        return Err(ZetaError::OutsideConvergence(z.re));
    }
    let shells = shell_terms(x, p, z, rep);
    let value = shells.iter().map(|s| s.1).sum();
    let tail = tail_bound(&shells);
    if tail > tol {
        return Err(ZetaError::TailTooLarge { bound: tail, tol, cutoff2: rep.cutoff2() });
    }
    Ok(ZetaValue { value, tail_bound: tail, cutoff2: rep.cutoff2() })
}

/// Largest doubled cutoff whose Dirac eigenvalues `[l + ½] ≈ q^{−l}/(q⁻¹ − q)`
/// stay inside the `f64` range, capped at [`MAX_CUTOFF2`].
pub fn max_cutoff2(q: f64) -> i32 {
    let h = -q.ln();
    if h <= 0.0 {
        return MAX_CUTOFF2;
    }
    ((2.0 * 700.0 / h) as i32).clamp(11, MAX_CUTOFF2) | 1
}

/// Cutoff predicted for `ρ = 1`, the slowest case: the last shell carries
/// about `4L q^{Ls}` and the geometric tail multiplies it by `1/(s h)`.
fn predicted_cutoff2(q: f64, s: f64, tol: f64) -> i32 {
    let h = -q.ln();
    if h <= 0.0 {
        return 101;
    }
    let mut l = 10.0f64;
    for _ in 0..8 {
        l = ((4.0 * l / (s * h * tol)).ln() / (s * h)).max(10.0);
    }
    (2.0 * l.ceil()) as i32 + 1
}

/// Smallest cutoff from a geometric schedule whose tail bound at real `s`
/// meets `tol`, together with the resulting value.
pub fn zeta_converged<F>(p: i32, q: f64, s: f64, tol: f64, build: &mut F) -> Result<ZetaValue, ZetaError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, ZetaError>,
{
    if s <= 0.0 {
        return Err(ZetaError::OutsideConvergence(s));
    }
    let cap = max_cutoff2(q);
    let mut cutoff2 = predicted_cutoff2(q, s, tol).clamp(11, cap) | 1;
    loop {
        let rep = build_rep(q, cutoff2, 2)?;
        let x = build(&rep)?;
        match zeta_partial(&x, p, Complex64::new(s, 0.0), &rep, tol) {
            Ok(v) => return Ok(v),
            Err(ZetaError::TailTooLarge { .. }) if cutoff2 < cap => {
                cutoff2 = ((cutoff2 as f64 * 1.3) as i32).min(cap) | 1;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaRow {
    pub s: f64,
    pub zeta: f64,
    pub s_zeta: f64,
    pub tail_bound: f64,
    pub cutoff2: i32,
}

fn sample_grid<F>(p: i32, q: f64, s_grid: &[f64], tol: f64, mut build: F) -> Result<Vec<ZetaRow>, ZetaError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, ZetaError>,
{
    s_grid
        .iter()
        .map(|&s| {
            let v = zeta_converged(p, q, s, tol, &mut build)?;
            Ok(ZetaRow { s, zeta: v.value.re, s_zeta: s * v.value.re, tail_bound: v.tail_bound, cutoff2: v.cutoff2 })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoleOrder {
    pub order: f64,
    pub uncertainty: f64,
    /// RMS residual of the log–log fit.
    pub rms: f64,
}

/// Threshold on the log–log RMS residual above which a fit is rejected.
pub const MAX_FIT_RMS: f64 = 0.05;

/// Fits `|ζ(s)| ≈ c s^{−k}` by log–log regression; identically vanishing
/// sums give `k = 0`.
pub fn fit_pole_order(rows: &[ZetaRow]) -> Result<PoleOrder, ZetaError> {
    let scale = rows.iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(PoleOrder { order: 0.0, uncertainty: 0.0, rms: 0.0 });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.s.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.zeta.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept, stderr) = regress(&x, &y);
    let rms = (x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    if rms > MAX_FIT_RMS {
        return Err(ZetaError::PoorFit(rms));
    }
    Ok(PoleOrder { order: -slope, uncertainty: 2.0 * stderr, rms })
}

/// Pole order of `ζ_X` at the origin from the sampled grid.
pub fn pole_order_probe<F>(p: i32, q: f64, s_grid: &[f64], tol: f64, build: F) -> Result<PoleOrder, ZetaError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, ZetaError>,
{
    fit_pole_order(&sample_grid(p, q, s_grid, tol, build)?)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ResidueEstimate {
    pub value: f64,
    pub error: f64,
}

/// Neville extrapolation of `(x_i, y_i)` to `x = 0`.
fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i]);
        }
    }
    p[0]
}

/// Richardson extrapolation of `s·ζ(s) → Res_{z=0} ζ_X`. The error is the
/// change when the largest `s` is dropped. A fitted pole order above 1.5
/// is reported as divergence.
pub fn residue_from_rows(rows: &[ZetaRow]) -> Result<ResidueEstimate, ZetaError> {
    let pole = fit_pole_order(rows)?;
    if pole.order > 1.5 {
        return Err(ZetaError::ExtrapolationDivergent { order: pole.order });
    }
    let mut sorted: Vec<&ZetaRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    let x: Vec<f64> = sorted.iter().map(|r| r.s).collect();
    let y: Vec<f64> = sorted.iter().map(|r| r.s_zeta).collect();
    let full = extrapolate_to_zero(&x, &y);
    let reduced = extrapolate_to_zero(&x[..x.len() - 1], &y[..y.len() - 1]);
    let tails: f64 = sorted.iter().map(|r| r.s * r.tail_bound).fold(0.0, f64::max);
    Ok(ResidueEstimate { value: full, error: (full - reduced).abs() + tails })
}

pub fn zeta_residue<F>(p: i32, q: f64, s_grid: &[f64], tol: f64, build: F) -> Result<ResidueEstimate, ZetaError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, ZetaError>,
{
    residue_from_rows(&sample_grid(p, q, s_grid, tol, build)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDefect {
    pub label: String,
    /// `Φ(XY)` and `Φ(Yσ(X))`.
    pub lhs: ResidueEstimate,
    pub rhs: ResidueEstimate,
    /// `|Φ(XY) − Φ(Yσ(X))| / max(|Φ(XY)|, |Φ(Yσ(X))|, floor)`; callers pass
    /// the scale of the functional (e.g. `|Φ(1)|`) as `floor`.
    pub defect: f64,
}

/// Relative defects of `Φ(XY) = Φ(Yσ(X))` for represented pairs. All
/// elements are represented once per `s` on a shared truncation whose
/// cutoff is grown until every product meets the tail tolerance.
pub fn twisted_trace_defects(
    p: i32,
    q: f64,
    s_grid: &[f64],
    tol: f64,
    pairs: &[(String, AlgebraElement, AlgebraElement)],
    floor: f64,
) -> Result<Vec<TraceDefect>, ZetaError> {
    let window2 = pairs
        .iter()
        .flat_map(|(_, x, y)| [required_window2(x), required_window2(y)])
        .max()
        .unwrap_or(1)
        .max(1)
        | 1;
    let cap = max_cutoff2(q);
    let mut rows: Vec<[Vec<ZetaRow>; 2]> = vec![[Vec::new(), Vec::new()]; pairs.len()];
    for &s in s_grid {
        if s <= 0.0 {
            return Err(ZetaError::OutsideConvergence(s));
        }
        let z = Complex64::new(s, 0.0);
        let mut cutoff2 = predicted_cutoff2(q, s, tol).clamp(11, cap) | 1;
        let values = loop {
            let rep = build_rep_with_window(q, cutoff2, 2, window2)?;
            let attempt: Result<Vec<[ZetaValue; 2]>, ZetaError> = pairs
                .iter()
                .map(|(_, x, y)| {
                    let xm = rep.represent(x)?;
                    let ym = rep.represent(y)?;
                    let lhs = zeta_partial(&(&xm * &ym), p, z, &rep, tol)?;
                    let rhs = zeta_partial(&(&ym * &sigma(&xm, &rep, p)), p, z, &rep, tol)?;
                    Ok([lhs, rhs])
                })
                .collect();
            match attempt {
                Err(ZetaError::TailTooLarge { .. }) if cutoff2 < cap => {
                    cutoff2 = ((cutoff2 as f64 * 1.3) as i32).min(cap) | 1;
                }
                other => break other?,
            }
        };
        for (slot, v) in rows.iter_mut().zip(values) {
            for k in 0..2 {
                let zeta = v[k].value.re;
                slot[k].push(ZetaRow { s, zeta, s_zeta: s * zeta, tail_bound: v[k].tail_bound, cutoff2 });
            }
        }
    }
    pairs
        .iter()
        .zip(rows)
        .map(|((label, _, _), [l, r])| {
            let lhs = residue_from_rows(&l)?;
            let rhs = residue_from_rows(&r)?;
            let defect = (lhs.value - rhs.value).abs() / lhs.value.abs().max(rhs.value.abs()).max(floor);
            Ok(TraceDefect { label: label.clone(), lhs, rhs, defect })
        })
        .collect()
}

/// Weight-zero sample pairs. Products containing `b` or `c` have residues
/// near zero (the `ρ`-weighted trace concentrates where `b = c = 0`), so
/// the set mixes those with `a`/`d` pairs carrying nonzero residues.
pub fn default_trace_pairs() -> Vec<(String, AlgebraElement, AlgebraElement)> {
    let (a, b, c, d) = (AlgebraElement::a(), AlgebraElement::b(), AlgebraElement::c(), AlgebraElement::d());
    let ab = &a * &b;
    let bc = &b * &c;
    let cd = &c * &d;
    let ad = &a * &d;
    let da = &d * &a;
    let k = AlgebraElement::k();
    vec![
        ("ab,cd".into(), ab.clone(), cd.clone()),
        ("cd,ab".into(), cd, ab),
        ("ad,da".into(), ad.clone(), da.clone()),
        ("da,adK".into(), da, &ad * &k),
        ("bc,ad".into(), bc, ad),
    ]
}

/// Smallest `|p|` whose `ρ`-weighted shell sums settle to a constant, i.e.
/// whose zeta function has a simple pole at the origin.
pub fn select_rho_exponent(q: f64, max_p: i32) -> Option<i32> {
    if q >= 1.0 {
        return None;
    }
    let rep = build_rep(q, 61, 2).ok()?;
    for p in 0..=max_p {
        let rho = rho_diag(&rep, p);
        let mut sums: Vec<f64> = Vec::new();
        for (i, b) in rep.basis().iter().enumerate() {
            if sums.len() < ((b.l2 + 1) / 2) as usize {
                sums.push(0.0);
            }
            *sums.last_mut().unwrap() += rho[i];
        }
        let n = sums.len();
        if (sums[n - 1] / sums[n - 2] - 1.0).abs() < 1e-6 {
            return Some(p);
        }
    }
    None
}

/// Closed-form residue for `X = 1` and `p ≥ 1` from the leading
/// exponential model of the shell sums: shells approach
/// `A = 2 q^{p/2} (q⁻¹ − q)^p / (1 − q^p)` and `Σ_l q^{(l+½)s}` has residue
/// `1/ln(1/q)`.
pub fn geometric_model_residue(q: f64, p: i32) -> f64 {
    let pf = f64::from(p);
    let a = 2.0 * q.powf(pf / 2.0) * (1.0 / q - q).powf(pf) / (1.0 - q.powf(pf));
    a / (1.0 / q).ln()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaReport {
    pub q: f64,
    pub rho_exponent: i32,
    /// Whether `rho_exponent` came from [`select_rho_exponent`].
    pub rho_selected: bool,
    pub rows: Vec<ZetaRow>,
    pub residue: Option<ResidueEstimate>,
    /// Why the residue is missing, when it is.
    pub residue_failure: Option<String>,
    pub pole_order: PoleOrder,
    pub defects: Vec<TraceDefect>,
}

impl ZetaReport {
    /// Samples `ζ_1` for `ρ = K̂_m^p Δ̂^{−p/2}` and fills in residue and pole
    /// order; defects are appended by the caller.
    pub fn for_identity(q: f64, p: i32, rho_selected: bool, s_grid: &[f64], tol: f64) -> Result<Self, ZetaError> {
        let rows = sample_grid(p, q, s_grid, tol, |rep| Ok(crate::spectral::linalg::identity(rep.dim())))?;
        let pole_order = fit_pole_order(&rows)?;
        let (residue, residue_failure) = match residue_from_rows(&rows) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(ZetaReport { q, rho_exponent: p, rho_selected, rows, residue, residue_failure, pole_order, defects: Vec::new() })
    }

    /// `s,zeta,s_zeta,tail_bound` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,zeta,s_zeta,tail_bound\n");
        for r in &self.rows {
            writeln!(out, "{},{:.17e},{:.17e},{:.17e}", r.s, r.zeta, r.s_zeta, r.tail_bound).unwrap();
        }
        out
    }
}
