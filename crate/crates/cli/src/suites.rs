//! Suite execution: each suite appends checks to a shared report.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use qpsido_core::mucalc::{contour_mu_cauchy_oracle, mu_binomial_exact, ContourOptions, MuBinomialExact, WeightTuple};
use qpsido_core::qsymbolic::{
    act, casimir, centrality_defect, coproduct, twisted_commutator, CasimirVariant, CoordWord, Monomial, UWord,
};
use qpsido_core::spectral::report::half_label;
use qpsido_core::spectral::{
    analytic_order_estimate, build_rep, delta_theta_iterate, dirac_squared_vs_casimir, elliptic_constant,
    expansion_remainder, leading_term_defect, linalg, op_norm_interior, podles_generators, relation_residuals,
    remainder_order, theta_prime_defect, twisted_commutator_dirac, OrderOptions,
};
use qpsido_core::zeta::{
    default_trace_pairs, geometric_model_residue, select_rho_exponent, twisted_trace_defects, zeta_residue,
    DEFAULT_S_GRID,
};
use qpsido_core::{AlgebraElement, QScalar, TruncatedRep, ZetaReport};

use crate::config::{RunConfig, Suite};
use crate::report::{Check, Kind, SpectrumRow, Status, SuiteReport};

/// An internal numerical failure that prevents a check from producing a value.
#[derive(Debug, Error)]
#[error("{suite}: check {check:?} could not be evaluated: {message}")]
pub struct SuiteError {
    pub suite: &'static str,
    pub check: String,
    pub message: String,
}

fn fail_in(suite: Suite, check: impl Into<String>) -> impl FnOnce(String) -> SuiteError {
    let check = check.into();
    move |message| SuiteError { suite: suite.name(), check, message }
}

/// Order-preserving map, concurrent when requested.
fn map_items<T, R, F>(parallel: bool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Runs every selected suite in a fixed order.
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport, SuiteError> {
    let mut report = SuiteReport::new(config.clone());
    let mut timings = BTreeMap::new();
    for suite in Suite::ALL.into_iter().filter(|s| config.suites.contains(s)) {
        let start = Instant::now();
        match suite {
            Suite::Mucalc => mucalc(config, &mut report.checks),
            Suite::Hopf => hopf(config, &mut report.checks),
            Suite::Spectrum => spectrum(config, &mut report)?,
            Suite::Expansion => expansion(config, &mut report.checks)?,
            Suite::Regularity => regularity(config, &mut report.checks)?,
            Suite::Zeta => zeta(config, &mut report)?,
        }
        timings.insert(suite.name().to_string(), start.elapsed().as_secs_f64());
    }
    if config.timings {
        report.timings = Some(timings);
    }
    Ok(report)
}

fn wt(ks: &[i32]) -> WeightTuple {
    WeightTuple::from_exponents(ks.to_vec()).expect("non-empty weight tuple")
}

/// `binom(z, n)` expanded in powers of `z`.
fn standard_binomial(n: usize) -> MuBinomialExact {
    let mut c = vec![1i64];
    for j in 0..n as i64 {
        let mut next = vec![0i64; c.len() + 1];
        for (d, &v) in c.iter().enumerate() {
            next[d + 1] += v;
            next[d] -= j * v;
        }
        c = next;
    }
    let fact: i64 = (1..=n as i64).product();
    c.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(d, &v)| MuBinomialExact::monomial(QScalar::from_ratio(v, fact), 0, d as u32))
        .fold(MuBinomialExact::zero(), |acc, t| &acc + &t)
}

/// Divided difference of `λ^z` at `1, q, …, q^n`.
fn gaussian_binomial(n: usize) -> MuBinomialExact {
    let mut c: Vec<QScalar> = vec![QScalar::one()];
    for j in 0..n as i32 {
        let mut next = vec![QScalar::zero(); c.len() + 1];
        for (d, v) in c.iter().enumerate() {
            next[d + 1] = &next[d + 1] + v;
            next[d] = &next[d] - &(v * &QScalar::q_pow(j));
        }
        c = next;
    }
    let mut norm = QScalar::q_pow(-((n * n.saturating_sub(1)) as i32) / 2);
    for j in 1..=n as i32 {
        norm = &norm * &(&QScalar::q_pow(j) - &QScalar::one()).recip();
    }
    c.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| MuBinomialExact::monomial(v * &norm, k as i32, 0))
        .fold(MuBinomialExact::zero(), |acc, t| &acc + &t)
}

fn mucalc(config: &RunConfig, checks: &mut Vec<Check>) {
    let s = Suite::Mucalc;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tuples: Vec<(usize, Vec<i32>)> = (0..500)
        .map(|_| {
            let n = rng.gen_range(1..=6usize);
            let mut ks: Vec<i32> = (-6..=6).collect();
            for i in 0..ks.len() {
                let j = rng.gen_range(i..ks.len());
                ks.swap(i, j);
            }
            ks.truncate(n + 1);
            (n, ks)
        })
        .collect();
    let bad = map_items(config.parallel, &tuples, |(n, ks)| {
        let w = wt(ks);
        let lhs = mu_binomial_exact(*n, &w).map(|b| b.shift_z());
        let rhs = mu_binomial_exact(*n, &w).and_then(|b| {
            let tail = mu_binomial_exact(*n - 1, &w.without_first().expect("n ≥ 1"))?;
            Ok(&b.scale(&QScalar::q_pow(ks[0])) + &tail)
        });
        !matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
    })
    .into_iter()
    .filter(|b| *b)
    .count();
    checks.push(Check::exact(s, "pascal identity on 500 random tuples", bad));

    let bad = (0..=6).filter(|&n| mu_binomial_exact(n, &wt(&vec![0; n + 1])).ok() != Some(standard_binomial(n))).count();
    checks.push(Check::exact(s, "equal weights give binom(z,n), n <= 6", bad));
    let bad = (0..=6)
        .filter(|&n| {
            let ks: Vec<i32> = (0..=n as i32).collect();
            mu_binomial_exact(n, &wt(&ks)).ok() != Some(gaussian_binomial(n))
        })
        .count();
    checks.push(Check::exact(s, "geometric weights give the gaussian product form, n <= 6", bad));

    let q = config.q.value;
    let mut worst = 0.0f64;
    let mut note = String::new();
    for z in [Complex64::new(-0.5, 0.0), Complex64::new(-1.25, 0.5), Complex64::new(-2.5, 0.0)] {
        for n in 0..4usize {
            let w = wt(&(0..=n as i32).collect::<Vec<_>>());
            let closed = match mu_binomial_exact(n, &w) {
                Ok(b) => b.eval(q, z),
                Err(e) => {
                    note = e.to_string();
                    worst = f64::NAN;
                    continue;
                }
            };
            match contour_mu_cauchy_oracle(z, &w.reals(q), 1.0, &ContourOptions::default()) {
                Ok(v) => worst = worst.max((v.value - closed).norm() / closed.norm()),
                Err(e) => {
                    note = e.to_string();
                    worst = f64::NAN;
                }
            }
        }
    }
    checks.push(
        Check::at_most(s, "contour oracle vs closed form, max relative error", Kind::Numeric, worst, config.tolerances.contour)
            .with_note(note),
    );
}

fn random_element(rng: &mut ChaCha8Rng, coord_only: bool) -> AlgebraElement {
    let terms = rng.gen_range(1..=2);
    (0..terms)
        .map(|_| {
            let coord = CoordWord { ad: rng.gen_range(-2..=2), b: rng.gen_range(0..=1), c: rng.gen_range(0..=1) };
            let u = if coord_only {
                UWord::ONE
            } else {
                let f = rng.gen_range(0..=2);
                UWord { f, k: rng.gen_range(-2..=2), e: rng.gen_range(0..=2 - f) }
            };
            let c = match rng.gen_range(0..3) {
                0 => QScalar::from_int(rng.gen_range(1..=3)),
                1 => QScalar::q_pow(rng.gen_range(-2..=2)),
                _ => &QScalar::q() + &QScalar::from_int(rng.gen_range(1..=3)),
            };
            AlgebraElement::term(Monomial { coord, u }, c)
        })
        .sum()
}

fn hopf(config: &RunConfig, checks: &mut Vec<Check>) {
    let s = Suite::Hopf;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let triples: Vec<_> = (0..200)
        .map(|_| (random_element(&mut rng, false), random_element(&mut rng, false), random_element(&mut rng, false)))
        .collect();
    let bad = map_items(config.parallel, &triples, |(x, y, z)| &(x * y) * z != x * &(y * z))
        .into_iter()
        .filter(|b| *b)
        .count();
    checks.push(Check::exact(s, "associativity on 200 random triples", bad));

    let mut bad = 0;
    for h in [AlgebraElement::e(), AlgebraElement::f(), AlgebraElement::k()] {
        let Ok(dh) = coproduct(&h) else {
            bad += 1;
            continue;
        };
        let split = |x: &AlgebraElement, y: &AlgebraElement, act_right: bool| -> Option<AlgebraElement> {
            let mut out = AlgebraElement::zero();
            for (legs, c) in dh.terms() {
                let h1 = AlgebraElement::term(legs[0], QScalar::one());
                let h2 = AlgebraElement::term(legs[1], QScalar::one());
                let right = if act_right { act(&h2, y).ok()? } else { h2 };
                out = &out + &(&act(&h1, x).ok()? * &right).scale(c);
            }
            Some(out)
        };
        for _ in 0..20 {
            let (x, y) = (random_element(&mut rng, true), random_element(&mut rng, true));
            if act(&h, &(&x * &y)).ok() != split(&x, &y, true) {
                bad += 1;
            }
        }
        for a in [AlgebraElement::a(), AlgebraElement::b(), AlgebraElement::c(), AlgebraElement::d()] {
            if Some(&h * &a) != split(&a, &AlgebraElement::one(), false) {
                bad += 1;
            }
        }
    }
    checks.push(Check::exact(s, "module-algebra and crossed relations", bad));

    let gens = [AlgebraElement::e(), AlgebraElement::f(), AlgebraElement::k(), AlgebraElement::k_inv()];
    let bad = gens.iter().filter(|g| !centrality_defect(g, CasimirVariant::Corrected).is_zero()).count();
    checks.push(Check::exact(s, "corrected casimir central in U_q(su2)", bad));
    let printed = gens.iter().filter(|g| !centrality_defect(g, CasimirVariant::Printed).is_zero()).count();
    checks.push(
        Check::info(s, "printed casimir non-central generators", Kind::Exact, printed as f64)
            .with_status(if printed > 0 { Status::Flagged } else { Status::Pass })
            .with_note("the printed normalization fails to commute; the corrected variant is used downstream"),
    );

    let c = casimir(CasimirVariant::Corrected);
    let coords = [
        CoordWord::ONE,
        CoordWord { ad: 1, b: 0, c: 0 },
        CoordWord { ad: -1, b: 0, c: 0 },
        CoordWord { ad: 0, b: 1, c: 0 },
        CoordWord { ad: 0, b: 0, c: 1 },
        CoordWord { ad: 1, b: 1, c: 0 },
        CoordWord { ad: 0, b: 1, c: 1 },
    ];
    let mut basis = Vec::new();
    for coord in coords {
        for f in 0..=3u32 {
            for e in 0..=(3 - f) {
                for k in -1..=1 {
                    basis.push((Monomial { coord, u: UWord { f, k, e } }, (f + e) as i64));
                }
            }
        }
    }
    let bad = map_items(config.parallel, &basis, |(m, ord)| {
        let x = AlgebraElement::term(*m, QScalar::one());
        !matches!(twisted_commutator(&c, &x, 4), Ok(t) if t.filtration_order().at_most(ord + 1))
    })
    .into_iter()
    .filter(|b| *b)
    .count();
    checks.push(Check::exact(s, format!("ord([C,x]_theta2) <= ord(x)+1 on {} basis elements", basis.len()), bad));
}

/// Four cutoffs ending at `cutoff2`, for order fits.
fn order_schedule(cutoff2: i32, buffer: i32) -> Vec<i32> {
    let floor = (2 * buffer + 3).max(5);
    let mut s: Vec<i32> = [cutoff2 / 2, 2 * cutoff2 / 3, 5 * cutoff2 / 6, cutoff2].map(|c| c.max(floor)).to_vec();
    s.dedup();
    s
}

fn spectrum(config: &RunConfig, report: &mut SuiteReport) -> Result<(), SuiteError> {
    let s = Suite::Spectrum;
    let (q, c2, b) = (config.q.value, config.cutoff2, config.buffer);
    let tol = &config.tolerances;
    let rep = build_rep(q, c2, b).map_err(|e| fail_in(s, "build representation")(e.to_string()))?;

    let worst = relation_residuals(&rep).into_iter().map(|r| r.residual).fold(0.0, f64::max);
    report.checks.push(Check::at_most(s, "max relation residual", Kind::Numeric, worst, tol.relation));

    let classical = build_rep(1.0, c2, b).map_err(|e| fail_in(s, "q=1 spectrum")(e.to_string()))?;
    let mut worst = 0.0f64;
    let mut mult_bad = 0;
    for l2 in (1..=c2).step_by(2) {
        let count = classical.basis().iter().filter(|x| x.l2 == l2).count();
        mult_bad += usize::from(count != 2 * (l2 as usize + 1));
        worst = worst.max((classical.dirac_eigenvalue(l2) - f64::from(l2 + 1) / 2.0).abs());
    }
    let d2 = linalg::mul(classical.dirac(), classical.dirac());
    for (i, x) in classical.basis().iter().enumerate() {
        let lam = f64::from(x.l2 + 1) / 2.0;
        worst = worst.max((d2.get(i, i).copied().unwrap_or(0.0) - lam * lam).abs());
    }
    report.checks.push(Check::at_most(s, "q=1 spectrum +-(l+1/2)", Kind::Numeric, worst, tol.spectrum));
    report.checks.push(Check::exact(s, "q=1 multiplicities 2l+1 per sign", mult_bad));

    let cmp = dirac_squared_vs_casimir(&rep, CasimirVariant::Corrected)
        .map_err(|e| fail_in(s, "dirac squared vs casimir")(e.to_string()))?;
    let off = cmp.shells.iter().map(|x| x.off_diagonal.max(x.diagonal_spread)).fold(0.0, f64::max);
    report.checks.push(
        Check::at_most(s, "D^2 - C scalar, relative variation", Kind::Numeric, cmp.shell_variation.max(off), tol.spectrum)
            .with_note(format!("constant {:.12}", cmp.constant)),
    );

    let schedule = order_schedule(c2, b);
    let opts = OrderOptions::default();
    let ks: Vec<i32> = (-2..=2).collect();
    let fits = map_items(config.parallel, &ks, |&k| {
        analytic_order_estimate(q, &schedule, b, &opts, |r| Ok(r.laplace_power(f64::from(k) / 2.0)))
    });
    for (k, fit) in ks.iter().zip(fits) {
        let name = format!("ord(Delta^{k}/2) - {k}");
        let est = fit.map_err(|e| fail_in(s, name.clone())(e.to_string()))?;
        report.checks.push(
            Check::at_most(s, name, Kind::Numeric, (est.order - f64::from(*k)).abs(), tol.order)
                .with_note(format!("order {:.6}", est.order)),
        );
    }

    let ellip: Vec<(&str, AlgebraElement)> = vec![("E", AlgebraElement::e()), ("F", AlgebraElement::f())];
    let reports = map_items(config.parallel, &ellip, |(_, x)| elliptic_constant(q, &schedule, b, 1.0, |r| r.represent(x)));
    for ((name, _), r) in ellip.iter().zip(reports) {
        let check = format!("{name}: elliptic constant spread");
        let r = r.map_err(|e| fail_in(s, check.clone())(e.to_string()))?;
        report.checks.push(Check::at_most(s, check, Kind::Numeric, r.relative_spread, tol.elliptic));
    }

    let gens = podles_generators();
    let fits = map_items(config.parallel, &gens, |(_, a)| {
        analytic_order_estimate(q, &schedule, b, &opts, |r| Ok(theta_prime_defect(&r.represent(a)?, r)))
    });
    for ((name, _), fit) in gens.iter().zip(fits) {
        let check = format!("ord(Theta'({name}) - theta({name}))");
        let est = fit.map_err(|e| fail_in(s, check.clone())(e.to_string()))?;
        report.checks.push(Check::at_most(s, check, Kind::Numeric, est.order, -1.0 + tol.order));
    }

    report.spectrum = spectrum_rows(&rep);
    Ok(())
}

/// `Δ̂` eigenvalues in lexicographic `(l, m, w)` order.
pub fn spectrum_rows(rep: &TruncatedRep) -> Vec<SpectrumRow> {
    let mut rows: Vec<SpectrumRow> = rep
        .basis()
        .iter()
        .zip(rep.laplace_eigenvalues())
        .map(|(x, ev)| SpectrumRow {
            key: (x.l2, x.m2, x.w2),
            l: half_label(x.l2),
            m: half_label(x.m2),
            w: half_label(x.w2),
            eigenvalue: format!("{ev:.17e}"),
        })
        .collect();
    rows.sort();
    rows
}

/// Expansion targets: `K`, `E` and the Podleś generators.
fn expansion_targets() -> Vec<(String, AlgebraElement)> {
    let mut ys = vec![("K".to_string(), AlgebraElement::k()), ("E".to_string(), AlgebraElement::e())];
    ys.extend(podles_generators().into_iter().map(|(n, a)| (n.to_string(), a)));
    ys
}

fn expansion(config: &RunConfig, checks: &mut Vec<Check>) -> Result<(), SuiteError> {
    let s = Suite::Expansion;
    let (q, c2, b) = (config.q.value, config.cutoff2, config.buffer);
    let tol = &config.tolerances;
    let floor = (2 * b + 3).max(5);
    let mut cutoffs: Vec<i32> = [c2 - 12, c2 - 8, c2 - 4, c2].map(|c| c.max(floor)).to_vec();
    cutoffs.dedup();
    let opts = OrderOptions::default();
    let z = -1.0;
    let rep = build_rep(q, c2, b).map_err(|e| fail_in(s, "build representation")(e.to_string()))?;
    let targets = expansion_targets();

    for (name, y) in &targets {
        let check = format!("{name}: leading term vs theta^(2z)(Y) Delta^z");
        let d = leading_term_defect(y, z as i32, &rep).map_err(|e| fail_in(s, check.clone())(e.to_string()))?;
        checks.push(Check::at_most(s, check, Kind::Numeric, d, tol.leading));
    }

    let depth = config.depth;
    let results = map_items(config.parallel, &targets, |(_, y)| {
        (0..=depth)
            .map(|n| {
                let vanishes = expansion_remainder(y, z, n, &rep).map(|r| linalg::max_abs(&r.remainder) <= tol.leading);
                let order = remainder_order(y, z, n, q, &cutoffs, b, &opts);
                (vanishes, order)
            })
            .collect::<Vec<_>>()
    });
    for ((name, _), per_n) in targets.iter().zip(results) {
        let mut orders = Vec::new();
        let mut all_vanish = true;
        for (n, (vanishes, order)) in per_n.into_iter().enumerate() {
            let check = format!("{name}: remainder order, n={n}");
            all_vanish &= vanishes.map_err(|e| fail_in(s, check.clone())(e.to_string()))?;
            match order {
                Ok(est) => orders.push((est.order, String::new())),
                Err(e) => orders.push((f64::NAN, e.to_string())),
            }
        }
        if all_vanish {
            checks.push(
                Check::info(s, format!("{name}: remainder vanishes for n <= {depth}"), Kind::Numeric, f64::NEG_INFINITY)
                    .with_status(Status::Flagged)
                    .with_note("expansion is exact at this order; no finite remainder order to compare"),
            );
            continue;
        }
        for n in 1..orders.len() {
            let (prev, cur) = (orders[n - 1].0, orders[n].0);
            let drop = if prev.is_finite() && cur.is_finite() { prev - cur } else { f64::NAN };
            let note = [&orders[n - 1].1, &orders[n].1]
                .into_iter()
                .filter(|x| !x.is_empty())
                .cloned()
                .collect::<Vec<_>>()
                .join("; ");
            checks.push(
                Check::at_least(s, format!("{name}: remainder order drop n={} -> {n}", n - 1), Kind::Numeric, drop, tol.remainder_drop)
                    .with_note(if note.is_empty() { format!("orders {prev:.4} -> {cur:.4}") } else { note }),
            );
        }
    }
    Ok(())
}

const REGULARITY_ITERATES: usize = 3;

fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn regularity(config: &RunConfig, checks: &mut Vec<Check>) -> Result<(), SuiteError> {
    let s = Suite::Regularity;
    let (q, c2, b) = (config.q.value, config.cutoff2, config.buffer);
    let cutoffs = [c2, 2 * c2];
    let reps: Vec<TruncatedRep> = cutoffs
        .iter()
        .map(|&c| build_rep(q, c, b))
        .collect::<Result<_, _>>()
        .map_err(|e| fail_in(s, "build representation")(e.to_string()))?;
    let gens = podles_generators();
    let jobs: Vec<(usize, usize)> = (0..gens.len()).flat_map(|g| (0..reps.len()).map(move |r| (g, r))).collect();
    let profiles = map_items(config.parallel, &jobs, |&(g, r)| {
        let rep = &reps[r];
        let a = rep.represent(&gens[g].1)?;
        let comm = twisted_commutator_dirac(&a, rep);
        let (_, ta) = delta_theta_iterate(&a, REGULARITY_ITERATES, rep);
        let (_, tc) = delta_theta_iterate(&comm, REGULARITY_ITERATES, rep);
        Ok::<_, qpsido_core::SpectralError>((op_norm_interior(&comm, rep), ta.norms, tc.norms))
    });
    let mut by_gen: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for (&(g, _), p) in jobs.iter().zip(profiles) {
        let p = p.map_err(|e| fail_in(s, format!("{}: norm profile", gens[g].0))(e.to_string()))?;
        by_gen.entry(g).or_default().push(p);
    }
    let tol = config.tolerances.regularity;
    let labels = (half_label(cutoffs[0]), half_label(cutoffs[1]));
    for (g, p) in by_gen {
        let name = gens[g].0;
        let (lo, hi) = (&p[0], &p[1]);
        let note = |a: f64, b: f64| format!("L={}: {a:.6e}, L={}: {b:.6e}", labels.0, labels.1);
        checks.push(
            Check::at_most(s, format!("{name}: ||[D,a]_theta|| variation"), Kind::Numeric, relative_change(lo.0, hi.0), tol)
                .with_note(note(lo.0, hi.0)),
        );
        for n in 0..=REGULARITY_ITERATES {
            checks.push(
                Check::at_most(s, format!("{name}: ||delta^{n}(a)|| variation"), Kind::Numeric, relative_change(lo.1[n], hi.1[n]), tol)
                    .with_note(note(lo.1[n], hi.1[n])),
            );
            checks.push(
                Check::at_most(
                    s,
                    format!("{name}: ||delta^{n}([D,a]_theta)|| variation"),
                    Kind::Numeric,
                    relative_change(lo.2[n], hi.2[n]),
                    tol,
                )
                .with_note(note(lo.2[n], hi.2[n])),
            );
        }
    }
    Ok(())
}

/// Largest `p` tried when selecting the ρ exponent.
const MAX_RHO_EXPONENT: i32 = 4;

fn zeta(config: &RunConfig, report: &mut SuiteReport) -> Result<(), SuiteError> {
    let s = Suite::Zeta;
    let q = config.q.value;
    let tol = &config.tolerances;
    let (p, selected) = match config.rho_exp {
        Some(p) => (p, false),
        None => match select_rho_exponent(q, MAX_RHO_EXPONENT) {
            Some(p) => (p, true),
            None => {
                report.checks.push(
                    Check::info(s, "rho exponent selection", Kind::Numeric, f64::NAN)
                        .with_status(Status::Flagged)
                        .with_note(format!("no p <= {MAX_RHO_EXPONENT} gives a simple pole at q={}", config.q.text)),
                );
                return Ok(());
            }
        },
    };
    let mut zr = ZetaReport::for_identity(q, p, selected, &DEFAULT_S_GRID, tol.zeta_tail)
        .map_err(|e| fail_in(s, "zeta of the identity")(e.to_string()))?;
    let worst_tail = zr.rows.iter().map(|r| r.tail_bound).fold(0.0, f64::max);
    report.checks.push(Check::at_most(s, "max tail bound over the s grid", Kind::Numeric, worst_tail, tol.zeta_tail));

    let order = zr.pole_order.order;
    if p == 0 {
        let status = if (order - 2.0).abs() <= tol.pole { Status::Flagged } else { Status::Fail };
        report.checks.push(
            Check::at_most(s, "double pole: rho=1 pole order - 2", Kind::Numeric, (order - 2.0).abs(), tol.pole)
                .with_status(status)
                .with_note(format!("pole order {order:.4}; no residue functional for rho=1")),
        );
        report.zeta = Some(zr);
        return Ok(());
    }
    report.checks.push(
        Check::at_most(s, format!("rho exponent p={p}: pole order - 1"), Kind::Numeric, (order - 1.0).abs(), tol.pole)
            .with_note(format!("pole order {order:.4}, fit rms {:.2e}", zr.pole_order.rms)),
    );

    let model = geometric_model_residue(q, p);
    let scale = match (&zr.residue, &zr.residue_failure) {
        (Some(r), _) => {
            report.checks.push(
                Check::at_most(s, "residue vs geometric model", Kind::Numeric, (r.value - model).abs() / model.abs(), tol.residue)
                    .with_note(format!("residue {:.12e} (+- {:.1e}), model {model:.12e}", r.value, r.error)),
            );
            r.value.abs()
        }
        (None, why) => {
            report.checks.push(
                Check::at_most(s, "residue vs geometric model", Kind::Numeric, f64::NAN, tol.residue)
                    .with_note(why.clone().unwrap_or_default()),
            );
            model.abs()
        }
    };

    let defects = twisted_trace_defects(p, q, &DEFAULT_S_GRID, tol.zeta_tail, &default_trace_pairs(), scale)
        .map_err(|e| fail_in(s, "twisted trace defects")(e.to_string()))?;
    for d in &defects {
        report.checks.push(
            Check::at_most(s, format!("twisted trace ({})", d.label), Kind::Numeric, d.defect, tol.defect)
                .with_note(format!("{:.6e} vs {:.6e}", d.lhs.value, d.rhs.value)),
        );
    }
    zr.defects = defects;

    let finite = |rep: &TruncatedRep| {
        Ok(linalg::diag(&rep.basis().iter().map(|x| if x.l2 <= 3 { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
    };
    let r = zeta_residue(p, q, &DEFAULT_S_GRID, tol.zeta_tail, finite)
        .map_err(|e| fail_in(s, "residue on shells l <= 3/2")(e.to_string()))?;
    report.checks.push(Check::at_most(s, "residue on shells l <= 3/2", Kind::Numeric, r.value.abs(), tol.finite_residue));
    report.zeta = Some(zr);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_end_at_the_cutoff() {
        assert_eq!(order_schedule(21, 2), vec![10, 14, 17, 21]);
        assert_eq!(order_schedule(7, 2), vec![7]);
    }

    #[test]
    fn oracles_agree_at_low_order() {
        assert_eq!(mu_binomial_exact(2, &wt(&[0, 0, 0])).unwrap(), standard_binomial(2));
        assert_eq!(mu_binomial_exact(2, &wt(&[0, 1, 2])).unwrap(), gaussian_binomial(2));
    }
}
