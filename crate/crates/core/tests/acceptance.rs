//! End-to-end acceptance run: one PASS/FAIL line per criterion at the pinned
//! tolerances, then a single assertion listing every failure.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpsido_core::mucalc::{contour_mu_cauchy_oracle, mu_binomial_exact, ContourOptions, MuBinomialExact, WeightTuple};
use qpsido_core::qsymbolic::{
    act, casimir, centrality_defect, coproduct, twisted_commutator, CasimirVariant, CoordWord, Monomial, UWord,
};
use qpsido_core::spectral::norms::DEFAULT_CUTOFFS2;
use qpsido_core::spectral::{
    analytic_order_estimate, build_rep, delta_theta_iterate, dirac_squared_vs_casimir, elliptic_constant, linalg,
    op_norm_interior, podles_generators, relation_residuals, remainder_order, theta_prime_defect,
    twisted_commutator_dirac, OrderOptions,
};
use qpsido_core::zeta::{
    default_trace_pairs, pole_order_probe, select_rho_exponent, twisted_trace_defects, zeta_residue, DEFAULT_S_GRID,
    DEFAULT_TAIL_TOL,
};
use qpsido_core::{AlgebraElement, QScalar};

struct Outcome {
    id: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
    elapsed: Duration,
    budget: Duration,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.elapsed <= self.budget && self.checks.iter().all(|c| c.1)
    }
}

fn check(checks: &mut Vec<(String, bool)>, ok: bool, msg: String) {
    checks.push((msg, ok));
}

fn run(id: u32, name: &'static str, budget_s: u64, body: impl FnOnce(&mut Vec<(String, bool)>)) -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    body(&mut checks);
    Outcome { id, name, checks, elapsed: start.elapsed(), budget: Duration::from_secs(budget_s) }
}

fn wt(ks: &[i32]) -> WeightTuple {
    WeightTuple::from_exponents(ks.to_vec()).unwrap()
}

/// `binom(z, n)` as a polynomial in `z` (weights all equal to 1).
fn standard_binomial(n: usize) -> MuBinomialExact {
    // coefficients of z(z−1)…(z−n+1), lowest degree first
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

/// Divided difference of `λ^z` at `1, q, …, q^n`:
/// `q^{−n(n−1)/2} ∏_{j<n}(Z − q^j) / ∏_{j=1}^{n}(q^j − 1)`.
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

fn criterion_1(ch: &mut Vec<(String, bool)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=6usize);
        let mut ks: Vec<i32> = (-6..=6).collect();
        for i in 0..ks.len() {
            let j = rng.gen_range(i..ks.len());
            ks.swap(i, j);
        }
        ks.truncate(n + 1);
        let w = wt(&ks);
        let lhs = mu_binomial_exact(n, &w).unwrap().shift_z();
        let rhs = &mu_binomial_exact(n, &w).unwrap().scale(&QScalar::q_pow(ks[0]))
            + &mu_binomial_exact(n - 1, &w.without_first().unwrap()).unwrap();
        if lhs != rhs {
            failures += 1;
        }
    }
    check(ch, failures == 0, format!("Pascal identity exact on 500 random tuples ({failures} mismatches)"));

    let standard_ok = (0..=6).all(|n| mu_binomial_exact(n, &wt(&vec![0; n + 1])).unwrap() == standard_binomial(n));
    check(ch, standard_ok, "equal weights give binom(z,n) exactly for n ≤ 6".into());
    let gauss_ok = (0..=6).all(|n| {
        let ks: Vec<i32> = (0..=n as i32).collect();
        mu_binomial_exact(n, &wt(&ks)).unwrap() == gaussian_binomial(n)
    });
    check(ch, gauss_ok, "geometric weights give the Gaussian product form exactly for n ≤ 6".into());

    let q = 0.5;
    let mut worst = 0.0f64;
    for z in [Complex64::new(-0.5, 0.0), Complex64::new(-1.25, 0.5), Complex64::new(-2.5, 0.0)] {
        for n in 0..4usize {
            let ks: Vec<i32> = (0..=n as i32).collect();
            let w = wt(&ks);
            let closed = mu_binomial_exact(n, &w).unwrap().eval(q, z);
            let v = contour_mu_cauchy_oracle(z, &w.reals(q), 1.0, &ContourOptions::default()).unwrap();
            worst = worst.max((v.value - closed).norm() / closed.norm());
        }
    }
    check(ch, worst <= 1e-8, format!("contour oracle vs closed form on 3×4 (z,n) grid: max rel {worst:.2e} ≤ 1e-8"));
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

fn criterion_2(ch: &mut Vec<(String, bool)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for _ in 0..200 {
        let (x, y, z) =
            (random_element(&mut rng, false), random_element(&mut rng, false), random_element(&mut rng, false));
        if &(&x * &y) * &z != &x * &(&y * &z) {
            bad += 1;
        }
    }
    check(ch, bad == 0, format!("associativity / confluence on 200 random triples ({bad} failures)"));

    let mut bad = 0;
    for h in [AlgebraElement::e(), AlgebraElement::f(), AlgebraElement::k()] {
        let dh = coproduct(&h).unwrap();
        for _ in 0..20 {
            let (x, y) = (random_element(&mut rng, true), random_element(&mut rng, true));
            let lhs = act(&h, &(&x * &y)).unwrap();
            let mut rhs = AlgebraElement::zero();
            for (legs, c) in dh.terms() {
                let h1 = AlgebraElement::term(legs[0], QScalar::one());
                let h2 = AlgebraElement::term(legs[1], QScalar::one());
                rhs = &rhs + &(&act(&h1, &x).unwrap() * &act(&h2, &y).unwrap()).scale(c);
            }
            if lhs != rhs {
                bad += 1;
            }
        }
        for a in [AlgebraElement::a(), AlgebraElement::b(), AlgebraElement::c(), AlgebraElement::d()] {
            let mut rhs = AlgebraElement::zero();
            for (legs, c) in dh.terms() {
                let h1 = AlgebraElement::term(legs[0], QScalar::one());
                let h2 = AlgebraElement::term(legs[1], QScalar::one());
                rhs = &rhs + &(&act(&h1, &a).unwrap() * &h2).scale(c);
            }
            if &h * &a != rhs {
                bad += 1;
            }
        }
    }
    check(ch, bad == 0, format!("module-algebra and crossed relations exact ({bad} failures)"));

    // centrality is a statement in U_q(su2); coordinates are moved by ▷
    let gens = [AlgebraElement::e(), AlgebraElement::f(), AlgebraElement::k(), AlgebraElement::k_inv()];
    let corrected = gens.iter().all(|g| centrality_defect(g, CasimirVariant::Corrected).is_zero());
    check(ch, corrected, "corrected Casimir commutes with E, F, K, K⁻¹ exactly".into());
    let printed = gens.iter().filter(|g| !centrality_defect(g, CasimirVariant::Printed).is_zero()).count();
    check(ch, printed > 0, format!("printed Casimir flagged non-central ({printed} generators with nonzero defect)"));

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
    let mut bad = 0;
    let mut total = 0;
    for coord in coords {
        for f in 0..=3u32 {
            for e in 0..=(3 - f) {
                for k in -1..=1 {
                    let x = AlgebraElement::term(Monomial { coord, u: UWord { f, k, e } }, QScalar::one());
                    let t = twisted_commutator(&c, &x, 4).unwrap();
                    total += 1;
                    if !t.filtration_order().at_most((f + e) as i64 + 1) {
                        bad += 1;
                    }
                }
            }
        }
    }
    check(ch, bad == 0, format!("ord([C,x]_θ²) ≤ ord(x)+1 on {total} basis elements of order ≤ 3 ({bad} violations)"));
}

fn criterion_3(ch: &mut Vec<(String, bool)>) {
    for c2 in [20, 40, 60] {
        let rep = build_rep(0.5, c2, 2).unwrap();
        let worst = relation_residuals(&rep).into_iter().map(|r| r.residual).fold(0.0, f64::max);
        check(ch, worst <= 1e-12, format!("q=0.5 L={}: max relation residual {worst:.2e} ≤ 1e-12", c2 / 2));
    }
    let rep = build_rep(1.0, 61, 2).unwrap();
    let mut worst = 0.0f64;
    let mut mult_ok = true;
    for l2 in (1..=61).step_by(2) {
        let lam = f64::from(l2 + 1) / 2.0;
        let count = rep.basis().iter().filter(|b| b.l2 == l2).count();
        mult_ok &= count == 2 * (l2 as usize + 1);
        worst = worst.max((rep.dirac_eigenvalue(l2) - lam).abs());
    }
    // direct check on D̂ itself: D̂² is diagonal with entries (l+½)²
    let d2 = linalg::mul(rep.dirac(), rep.dirac());
    for (i, b) in rep.basis().iter().enumerate() {
        let lam = f64::from(b.l2 + 1) / 2.0;
        worst = worst.max((d2.get(i, i).copied().unwrap_or(0.0) - lam * lam).abs());
    }
    check(
        ch,
        worst <= 1e-10 && mult_ok,
        format!("q=1 spectrum ±(l+½) with multiplicity 2l+1 per sign: max error {worst:.2e}"),
    );
    for c2 in [20, 40, 60] {
        let rep = build_rep(0.5, c2, 2).unwrap();
        let cmp = dirac_squared_vs_casimir(&rep, CasimirVariant::Corrected).unwrap();
        let off = cmp.shells.iter().map(|s| s.off_diagonal.max(s.diagonal_spread)).fold(0.0, f64::max);
        let var = cmp.shell_variation.max(off);
        check(
            ch,
            var <= 1e-10,
            format!(
                "L={}: D̂² − C is the scalar {:.6} on every shell (variation {var:.2e}, relative to max(1, [l+½]²))",
                c2 / 2,
                cmp.constant
            ),
        );
    }
}

fn criterion_4(ch: &mut Vec<(String, bool)>) {
    let opts = OrderOptions::default();
    for k in -2..=2 {
        let est = analytic_order_estimate(0.5, &DEFAULT_CUTOFFS2, 2, &opts, |rep| {
            Ok(rep.laplace_power(f64::from(k) / 2.0))
        })
        .unwrap();
        check(ch, (est.order - f64::from(k)).abs() <= 0.05, format!("ord(Δ̂^{k}/2) = {:.4}", est.order));
    }
    let cutoffs = [20, 30, 40, 50, 60];
    for (name, x) in [("Ê", AlgebraElement::e()), ("F̂", AlgebraElement::f())] {
        let ell = elliptic_constant(0.5, &cutoffs, 2, 1.0, |rep| rep.represent(&x)).unwrap();
        check(ch, ell.relative_spread <= 0.05, format!("{name}: elliptic constant spread {:.2e} ≤ 5%", ell.relative_spread));
    }
    for (name, a) in podles_generators() {
        let est =
            analytic_order_estimate(0.5, &DEFAULT_CUTOFFS2, 2, &opts, |rep| Ok(theta_prime_defect(&rep.represent(&a)?, rep)))
                .unwrap();
        check(ch, est.order <= -0.9, format!("ord(Θ′({name}) − θ({name})) = {:.4} ≤ −0.9", est.order));
    }
}

const EXPANSION_CUTOFFS2: [i32; 4] = [17, 21, 25, 29];

fn criterion_5(ch: &mut Vec<(String, bool)>) {
    let q = 0.5;
    let opts = OrderOptions::default();
    let k = AlgebraElement::k();
    let mut worst = 0.0f64;
    for c2 in EXPANSION_CUTOFFS2 {
        let rep = build_rep(q, c2, 2).unwrap();
        for n in 0..=2 {
            let r = qpsido_core::spectral::expansion_remainder(&k, -1.0, n, &rep).unwrap();
            worst = worst.max(linalg::max_abs(&r.remainder));
        }
    }
    check(ch, worst <= 1e-12, format!("K̂: remainder max entry {worst:.2e} (identically ~0)"));

    let mut ys = vec![("Ê".to_string(), AlgebraElement::e())];
    ys.extend(podles_generators().into_iter().map(|(n, a)| (format!("â={n}"), a)));
    for (name, y) in &ys {
        let orders: Vec<f64> = (0..=2)
            .map(|n| match remainder_order(y, -1.0, n, q, &EXPANSION_CUTOFFS2, 2, &opts) {
                Ok(e) => e.order,
                Err(_) => f64::NAN,
            })
            .collect();
        let decreasing = orders.windows(2).all(|w| w[0].is_finite() && w[1].is_finite() && w[1] <= w[0] - 0.8);
        let shown: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
        check(
            ch,
            decreasing,
            format!("{name}: remainder orders n=0,1,2 = [{}], need finite drops ≥ 0.8", shown.join(", ")),
        );
    }

    let rep = build_rep(q, 29, 2).unwrap();
    for (name, y) in &ys {
        let d = qpsido_core::spectral::leading_term_defect(y, -1, &rep).unwrap();
        check(ch, d <= 1e-8, format!("{name}: leading term vs θ^(2z)(Y)Δ̂^z defect {d:.2e}"));
    }
    let d = qpsido_core::spectral::leading_term_defect(&k, -1, &rep).unwrap();
    check(ch, d <= 1e-8, format!("K̂: leading term defect {d:.2e}"));
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_6(ch: &mut Vec<(String, bool)>) {
    let reps = [build_rep(0.5, 30, 2).unwrap(), build_rep(0.5, 60, 2).unwrap()];
    for (name, a) in podles_generators() {
        let mut profiles = Vec::new();
        for rep in &reps {
            let ah = rep.represent(&a).unwrap();
            let comm = twisted_commutator_dirac(&ah, rep);
            let (_, ta) = delta_theta_iterate(&ah, 3, rep);
            let (_, tc) = delta_theta_iterate(&comm, 3, rep);
            profiles.push((op_norm_interior(&comm, rep), ta.norms, tc.norms));
        }
        let (c15, a15, d15) = &profiles[0];
        let (c30, a30, d30) = &profiles[1];
        let var = relative_change(*c15, *c30);
        check(ch, c15.is_finite() && var <= 0.1, format!("{name}: ‖[D̂,â]_θ‖ {c15:.4} → {c30:.4} (Δ {:.1}%)", 100.0 * var));
        for n in 0..=3 {
            let var = relative_change(a15[n], a30[n]);
            check(
                ch,
                a30[n].is_finite() && var <= 0.1,
                format!("{name}: ‖δ_θ^{n}(â)‖ {:.4e} → {:.4e} (Δ {:.1}%)", a15[n], a30[n], 100.0 * var),
            );
            let var = relative_change(d15[n], d30[n]);
            check(
                ch,
                d30[n].is_finite() && var <= 0.1,
                format!("{name}: ‖δ_θ^{n}([D̂,â]_θ)‖ {:.4e} → {:.4e} (Δ {:.1}%)", d15[n], d30[n], 100.0 * var),
            );
        }
    }
}

fn criterion_7(ch: &mut Vec<(String, bool)>) {
    let q = 0.5;
    let tol = DEFAULT_TAIL_TOL;
    let id = |rep: &qpsido_core::TruncatedRep| Ok(linalg::identity(rep.dim()));
    let p = select_rho_exponent(q, 4);
    check(ch, p.is_some(), format!("selected ρ exponent p = {p:?}"));
    let p = p.unwrap_or(1);
    match pole_order_probe(0, q, &DEFAULT_S_GRID, tol, id) {
        Ok(k) => check(ch, (k.order - 2.0).abs() <= 0.2, format!("ρ=1: pole order {:.3} ± {:.3}", k.order, k.uncertainty)),
        Err(e) => check(ch, false, format!("ρ=1: pole-order probe failed: {e}")),
    }
    let scale = match pole_order_probe(p, q, &DEFAULT_S_GRID, tol, id) {
        Ok(k) => {
            check(ch, (k.order - 1.0).abs() <= 0.2, format!("ρ=K̂_m^{p}Δ̂^(−{p}/2): pole order {:.3} ± {:.3}", k.order, k.uncertainty));
            zeta_residue(p, q, &DEFAULT_S_GRID, tol, id).map(|r| r.value.abs()).unwrap_or(1.0)
        }
        Err(e) => {
            check(ch, false, format!("simple-pole ρ: pole-order probe failed: {e}"));
            1.0
        }
    };
    match twisted_trace_defects(p, q, &DEFAULT_S_GRID, tol, &default_trace_pairs(), scale) {
        Ok(ds) => {
            for d in ds {
                check(
                    ch,
                    d.defect <= 1e-3,
                    format!(
                        "Φ(XY) vs Φ(Yσ(X)) for ({}): {:.6e} vs {:.6e}, defect {:.2e} (scale |Φ(1)| = {scale:.4})",
                        d.label, d.lhs.value, d.rhs.value, d.defect
                    ),
                );
            }
        }
        Err(e) => check(ch, false, format!("twisted-trace defects failed: {e}")),
    }
    let finite = |rep: &qpsido_core::TruncatedRep| {
        Ok(linalg::diag(&rep.basis().iter().map(|b| if b.l2 <= 3 { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
    };
    match zeta_residue(p, q, &DEFAULT_S_GRID, tol, finite) {
        Ok(r) => check(ch, r.value.abs() <= 1e-6, format!("Φ on shells l ≤ 3/2: {:.2e}", r.value)),
        Err(e) => check(ch, false, format!("Φ on finite support failed: {e}")),
    }
}

#[test]
fn acceptance() {
    let outcomes = vec![
        run(1, "mu-binomial suite", 60, criterion_1),
        run(2, "Hopf suite", 120, criterion_2),
        run(3, "spectral suite", 180, criterion_3),
        run(4, "elliptic/order suite", 180, criterion_4),
        run(5, "expansion suite", 180, criterion_5),
        run(6, "regularity probe", 120, criterion_6),
        run(7, "zeta suite", 300, criterion_7),
    ];
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {} — {} ({:.1?}, budget {:?})", o.id, o.name, o.elapsed, o.budget);
        for (msg, ok) in &o.checks {
            println!("    {} {msg}", if *ok { "ok  " } else { "FAIL" });
        }
        if !o.passed() {
            failed.push(o.id);
        }
    }
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
}
