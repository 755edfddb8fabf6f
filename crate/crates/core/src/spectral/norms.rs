//! Sobolev-scale norms, analytic order estimates and elliptic constants.

use serde::{Deserialize, Serialize};

use super::linalg::{self, Matrix};
use super::{build_rep, TruncatedRep};
use crate::error::SpectralError;

/// `‖Δ̂^{(s−t)/2} T Δ̂^{−s/2}‖` on the interior.
pub fn sobolev_norm(t_mat: &Matrix, s: f64, t: f64, rep: &TruncatedRep) -> f64 {
    let interior = rep.interior_mask();
    let left = rep.laplace_power_diag((s - t) / 2.0);
    let right = rep.laplace_power_diag(-s / 2.0);
    let scaled = linalg::scale_rows_cols(t_mat, &left, &right);
    linalg::op_norm(&linalg::mask(&scaled, &interior, &interior))
}

/// `‖P_int T P_int‖`.
pub fn op_norm_interior(t_mat: &Matrix, rep: &TruncatedRep) -> f64 {
    let interior = rep.interior_mask();
    linalg::op_norm(&linalg::mask(t_mat, &interior, &interior))
}

/// `‖Δ̂^{s/2} T Δ̂^{−s/2} P_l‖` for the columns of one shell.
pub fn shell_sobolev_norm(t_mat: &Matrix, s: f64, rep: &TruncatedRep, l2: i32) -> f64 {
    let left = rep.laplace_power_diag(s / 2.0);
    let right = rep.laplace_power_diag(-s / 2.0);
    let scaled = linalg::scale_rows_cols(t_mat, &left, &right);
    let rows = vec![true; rep.dim()];
    linalg::op_norm(&linalg::mask(&scaled, &rows, &rep.shell_mask(l2)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderOptions {
    pub s_grid: Vec<f64>,
    /// Norms at or below this count as exact zeros.
    pub zero_floor: f64,
    /// Largest tolerated step against the fitted trend, in units of `log λ`.
    pub monotone_slack: f64,
}

impl Default for OrderOptions {
    fn default() -> Self {
        Self { s_grid: vec![-2.0, -1.0, 0.0, 1.0, 2.0], zero_floor: 1e-300, monotone_slack: 0.05 }
    }
}

/// Doubled cutoffs for `L ∈ {10, 15, 20, 30}`.
pub const DEFAULT_CUTOFFS2: [i32; 4] = [20, 30, 40, 60];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderSample {
    pub cutoff2: i32,
    pub shell_l2: i32,
    pub laplace_eigenvalue: f64,
    /// One norm per entry of the Sobolev grid.
    pub norms: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderFit {
    pub s: f64,
    pub order: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// `−∞` when every sample vanishes.
    pub order: f64,
    pub uncertainty: f64,
    pub fits: Vec<OrderFit>,
    pub samples: Vec<OrderSample>,
}

impl OrderEstimate {
    pub fn vanishes(&self) -> bool {
        self.order == f64::NEG_INFINITY
    }
}

/// Least-squares slope and its standard error.
pub(crate) fn regress(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

/// Estimates the analytic order of `T` from the growth of the shell-local
/// Sobolev norms at the top interior shell across a cutoff schedule:
/// `‖Δ̂^{s/2} T Δ̂^{−s/2} P_{l*}‖ ∼ λ_{l*}^{t/2}`. The estimate is the largest
/// order over the Sobolev grid; its uncertainty covers the spread over the
/// grid and twice the regression standard error.
pub fn analytic_order_estimate<F>(
    q: f64,
    cutoffs2: &[i32],
    buffer: i32,
    opts: &OrderOptions,
    mut build: F,
) -> Result<OrderEstimate, SpectralError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, SpectralError>,
{
    if cutoffs2.len() < 2 {
        return Err(SpectralError::TooFewPoints(cutoffs2.len()));
    }
    let mut samples = Vec::new();
    for &c2 in cutoffs2 {
        let rep = build_rep(q, c2, buffer)?;
        let t_mat = build(&rep)?;
        let shell = rep.top_interior_shell();
        let idx = rep.basis().iter().position(|b| b.l2 == shell).expect("shell present");
        let norms = opts.s_grid.iter().map(|&s| shell_sobolev_norm(&t_mat, s, &rep, shell)).collect();
        samples.push(OrderSample {
            cutoff2: c2,
            shell_l2: shell,
            laplace_eigenvalue: rep.laplace_eigenvalues()[idx],
            norms,
        });
    }
    order_from_samples(samples, opts)
}

pub(crate) fn order_from_samples(samples: Vec<OrderSample>, opts: &OrderOptions) -> Result<OrderEstimate, SpectralError> {
    let zero = |v: f64| v <= opts.zero_floor;
    let all_zero = samples.iter().all(|s| s.norms.iter().all(|&v| zero(v)));
    if all_zero {
        return Ok(OrderEstimate { order: f64::NEG_INFINITY, uncertainty: 0.0, fits: Vec::new(), samples });
    }
    let x: Vec<f64> = samples.iter().map(|s| s.laplace_eigenvalue.ln()).collect();
    let mut fits = Vec::new();
    for (k, &s) in opts.s_grid.iter().enumerate() {
        let vals: Vec<f64> = samples.iter().map(|smp| smp.norms[k]).collect();
        if vals.iter().any(|&v| zero(v)) {
            return Err(SpectralError::NonMonotone(format!("norm profile at s = {s} vanishes only at some cutoffs")));
        }
        let y: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        let (slope, _, stderr) = regress(&x, &y);
        for i in 1..y.len() {
            let dx = x[i] - x[i - 1];
            let dy = y[i] - y[i - 1];
            let expected = slope * dx;
            if (dy - expected).abs() > opts.monotone_slack * dx.abs() && dy.signum() != expected.signum() {
                return Err(SpectralError::NonMonotone(format!(
                    "at s = {s}: step {} → {} moves against the fitted trend",
                    samples[i - 1].cutoff2,
                    samples[i].cutoff2
                )));
            }
        }
        fits.push(OrderFit { s, order: 2.0 * slope, std_error: 2.0 * stderr });
    }
    let order = fits.iter().map(|f| f.order).fold(f64::NEG_INFINITY, f64::max);
    let low = fits.iter().map(|f| f.order).fold(f64::INFINITY, f64::min);
    let se = fits.iter().map(|f| f.std_error).fold(0.0, f64::max);
    Ok(OrderEstimate { order, uncertainty: (order - low).max(2.0 * se), fits, samples })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipticReport {
    pub order: f64,
    /// `(cutoff2, C(L))`.
    pub constants: Vec<(i32, f64)>,
    /// `(max C − min C)/max C` over the schedule.
    pub relative_spread: f64,
}

/// `C(L) = ‖X̂ Δ̂^{−m/2} P_int‖`, the best constant in `‖X̂v‖ ≤ C‖Δ̂^{m/2}v‖`
/// over interior vectors, across a cutoff schedule.
pub fn elliptic_constant<F>(
    q: f64,
    cutoffs2: &[i32],
    buffer: i32,
    order: f64,
    mut build: F,
) -> Result<EllipticReport, SpectralError>
where
    F: FnMut(&TruncatedRep) -> Result<Matrix, SpectralError>,
{
    let mut constants = Vec::new();
    for &c2 in cutoffs2 {
        let rep = build_rep(q, c2, buffer)?;
        let x = build(&rep)?;
        let right = rep.laplace_power_diag(-order / 2.0);
        let left = vec![1.0; rep.dim()];
        let rows = vec![true; rep.dim()];
        let scaled = linalg::scale_rows_cols(&x, &left, &right);
        constants.push((c2, linalg::op_norm(&linalg::mask(&scaled, &rows, &rep.interior_mask()))));
    }
    let hi = constants.iter().map(|c| c.1).fold(0.0, f64::max);
    let lo = constants.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let relative_spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    Ok(EllipticReport { order, constants, relative_spread })
}
