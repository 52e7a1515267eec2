//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::time::Instant;

use asep_core::asep::{self, bernoulli_product, partition_sign, Dist};
use asep_core::exact::{qpow, rat};
use asep_core::matmodel::{associativity_gap, build_finite, build_model, words_up_to};
use asep_core::qspecial::{
    a_equals_g, askey_wilson, b_recursion_holds, identities, orthogonality_value, seq_b, seq_f,
    seq_g, verify_t3, AwFamily, Mode,
};
use asep_core::tasep::{self, SeriesKind};
use asep_core::{build_phi0, build_phi1, oracle, AsepParams, QExt, Rat, ThetaCtx};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Singular set with `abcd q^N = 1`: `a = 2, b = d = −1/2, c = 2^{N+1}, q = 1/2`.
fn singular(n: u32) -> AsepParams {
    AsepParams::from_awparams(
        rat(2, 1),
        rat(-1, 2),
        rat(2i64.pow(n + 1), 1),
        rat(-1, 2),
        rat(1, 2),
    )
    .unwrap()
}

fn nonsingular() -> Vec<(&'static str, AsepParams)> {
    vec![
        (
            "generic",
            AsepParams::from_rates(rat(1, 1), rat(1, 2), rat(1, 5), rat(1, 3), rat(1, 3)).unwrap(),
        ),
        (
            "gamma=0",
            AsepParams::from_rates(rat(1, 1), rat(1, 2), rat(0, 1), rat(1, 3), rat(1, 3)).unwrap(),
        ),
        (
            "q=0",
            AsepParams::from_rates(rat(1, 1), rat(2, 3), rat(1, 4), rat(1, 5), rat(0, 1)).unwrap(),
        ),
    ]
}

/// Non-singular quadruples `(a, b, c, d, q)` with rational entries; the rate
/// sets above have irrational Askey-Wilson parameters.
fn nonsingular_aw() -> Vec<(&'static str, [Rat; 5])> {
    vec![
        ("generic", [rat(1, 2), rat(-1, 3), rat(2, 3), rat(-1, 5), rat(1, 3)]),
        ("c=0", [rat(1, 2), rat(-1, 3), rat(0, 1), rat(-1, 5), rat(1, 3)]),
        ("q=0", [rat(1, 2), rat(-1, 3), rat(1, 3), rat(-1, 4), rat(0, 1)]),
    ]
}

/// Net current on any bond; for `L = 1`, the left boundary flux.
fn dist_current(d: &Dist, p: &AsepParams) -> Rat {
    if d.l == 1 {
        &p.alpha * &d.probs[0] - &p.gamma * &d.probs[1]
    } else {
        d.bond_current(1, &p.q)
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut sets: Vec<(String, AsepParams)> = (0..=3).map(|n| (format!("N={n}"), singular(n))).collect();
    sets.extend(nonsingular().into_iter().map(|(s, p)| (s.to_string(), p)));
    let mut bad = Vec::new();
    let mut count = 0;
    for (name, p) in &sets {
        for l in 1..=6 {
            let ansatz = asep::stationary(p, l).unwrap();
            let g = oracle::generator(p, l).unwrap();
            let exact = oracle::stationary_exact(&g).unwrap();
            count += 1;
            if ansatz.probs != exact.probs {
                bad.push(format!("{name} L={l}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 60.0,
        format!("{count} (set, L) pairs exact, mismatches {bad:?}, {secs:.2}s (limit 60s)"),
    )
}

fn crit2() -> Outcome {
    let mut bad = Vec::new();
    for n in 0..=4 {
        let p = singular(n);
        let l = n as usize + 1;
        let d = asep::stationary(&p, l).unwrap();
        if d.probs != bernoulli_product(&p).unwrap().probs {
            bad.push(format!("N={n} product"));
        }
        if !dist_current(&d, &p).is_zero() {
            bad.push(format!("N={n} J"));
        }
        if l >= 2 && !asep::current(&p, l).unwrap().is_zero() {
            bad.push(format!("N={n} J via partition functions"));
        }
    }
    outcome(bad.is_empty(), format!("N = 0..4, failures {bad:?}"))
}

fn crit3() -> Outcome {
    let mut bad = Vec::new();
    let mut tables = 0;
    let mut record = |name: String, t: asep_core::PhiTable, k: usize| {
        tables += 1;
        if !t.check_invariance(k).unwrap() || !t.check_consistency() {
            bad.push(name);
        }
    };
    for n in 0..=4u32 {
        let p = singular(n);
        if n >= 1 {
            record(format!("phi0 N={n}"), build_phi0(&p, n as usize).unwrap(), n as usize - 1);
        }
        record(format!("phi1 N={n}"), build_phi1(&p, 13).unwrap(), 12);
    }
    for (name, p) in nonsingular() {
        record(format!("phi0 {name}"), build_phi0(&p, 13).unwrap(), 12);
    }
    outcome(bad.is_empty(), format!("{tables} tables, failures {bad:?}"))
}

fn crit4() -> Outcome {
    let mut bad = Vec::new();
    for n in 0..=4u32 {
        let p = singular(n);
        for l in 1..=10usize {
            let s = partition_sign(&p, l).unwrap();
            let want = if l <= n as usize { if l % 2 == 0 { 1 } else { -1 } } else { 1 };
            if s != want {
                bad.push(format!("N={n} L={l}"));
            }
        }
    }
    // abcd = 3 with q = 1/2, so gamma delta > alpha beta > q^2 gamma delta.
    let p = AsepParams::from_awparams(rat(2, 1), rat(-1, 2), rat(6, 1), rat(-1, 2), rat(1, 2)).unwrap();
    let ab = &p.alpha * &p.beta;
    let gd = &p.gamma * &p.delta;
    let window = gd > ab && ab > &gd * qpow(&p.q, 2) && p.singular_index.is_none();
    let m = p.reversal_index();
    for l in 1..=10usize {
        let j = dist_current(&asep::stationary(&p, l).unwrap(), &p);
        let ok = if l <= 2 { j.is_negative() } else { j.is_positive() };
        if !ok {
            bad.push(format!("M-set L={l}"));
        }
    }
    for l in 1..=10usize {
        let s = partition_sign(&p, l).unwrap();
        let want = if l <= m {
            if l % 2 == 0 { 1 } else { -1 }
        } else if m % 2 == 0 {
            1
        } else {
            -1
        };
        if s != want {
            bad.push(format!("M-set sign L={l}"));
        }
    }
    outcome(
        bad.is_empty() && window && m == 2,
        format!("singular N=0..4 to L=10, M={m}, failures {bad:?}"),
    )
}

fn crit5() -> Outcome {
    let mut bad = Vec::new();
    let mut zeros = 0;
    let ts = [rat(1, 1), rat(2, 1), rat(1, 3)];
    let mut fams: Vec<(String, AwFamily, usize)> = (1..=3u32)
        .map(|n| (format!("N={n}"), AwFamily::from_params(&singular(n)).unwrap(), n as usize))
        .collect();
    for (name, quad) in nonsingular_aw() {
        let [a, b, c, d, q] = quad;
        fams.push((name.to_string(), AwFamily::new(a, b, c, d, q).unwrap(), 8));
    }
    for (name, fam, top) in &fams {
        let table = fam.phi0(*top).unwrap();
        for t in &ts {
            let t = QExt::from_rat(t.clone(), fam.ctx());
            for n in 1..=*top {
                match verify_t3(n, fam, &t, &table) {
                    Ok(v) if v.is_zero() => zeros += 1,
                    _ => bad.push(format!("vanishing {name} n={n}")),
                }
            }
        }
        if fam.singular_index().is_none() {
            let table = fam.phi0(12).unwrap();
            for n in 1..=6 {
                for m in 0..n {
                    match orthogonality_value(m, n, fam, &table) {
                        Ok(v) if v.is_zero() => zeros += 1,
                        _ => bad.push(format!("ortho {name} ({m},{n})")),
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{zeros} exact zeros, failures {bad:?}"))
}

fn small(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        if n != 0 {
            return rat(n, rng.gen_range(1..=7));
        }
    }
}

fn q_draw(rng: &mut ChaCha8Rng) -> Rat {
    let d: i64 = rng.gen_range(3..=9);
    rat(rng.gen_range(1..d), d)
}

fn crit6() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0usize;
    let mut tally = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            bad.push(what);
        }
    };

    let generic = AwFamily::new(rat(1, 2), rat(-1, 3), rat(2, 3), rat(-1, 5), rat(1, 3)).unwrap();
    let table = generic.phi0(10).unwrap();
    let t = QExt::from_rat(rat(3, 4), generic.ctx());
    for n in 0..=10 {
        let d = seq_g(Mode::Definition, n, &t, &generic, &table).unwrap();
        let r = seq_g(Mode::Recursion, n, &t, &generic, &table).unwrap();
        tally(d == r, format!("G n={n}"));
    }
    for n_sing in 1..=3u32 {
        let fam = AwFamily::from_params(&singular(n_sing)).unwrap();
        let phi1 = fam.phi1(n_sing as usize + 10).unwrap();
        let t = QExt::from_rat(rat(3, 7), fam.ctx());
        for n in 0..=10 {
            let d = seq_f(Mode::Definition, n, &t, &fam, &phi1).unwrap();
            let r = seq_f(Mode::Recursion, n, &t, &fam, &phi1).unwrap();
            tally(d == r, format!("F N={n_sing} n={n}"));
        }
        let phi0 = fam.phi0(n_sing as usize).unwrap();
        for n in 0..=n_sing as usize {
            let d = seq_g(Mode::Definition, n, &t, &fam, &phi0).unwrap();
            let r = seq_g(Mode::Recursion, n, &t, &fam, &phi0).unwrap();
            tally(d == r, format!("G N={n_sing} n={n}"));
        }
    }

    let one = QExt::one(generic.ctx());
    for n in 0..=6 {
        let base = seq_b(n, &generic, &one).unwrap();
        for tv in [rat(2, 1), rat(5, 7)] {
            let tv = QExt::from_rat(tv, generic.ctx());
            tally(seq_b(n, &generic, &tv).unwrap() == base, format!("B n={n}"));
        }
        if n >= 1 {
            for tv in [rat(1, 1), rat(2, 1), rat(5, 7)] {
                let tv = QExt::from_rat(tv, generic.ctx());
                tally(b_recursion_holds(n, &generic, &tv).unwrap(), format!("B-rec n={n}"));
            }
        }
    }

    let table8 = generic.phi0(10).unwrap();
    for tv in [rat(1, 1), rat(2, 1), rat(1, 3)] {
        let tv = QExt::from_rat(tv, generic.ctx());
        for n in 0..=8 {
            let (l, r) = a_equals_g(n, &generic, &tv, &table8).unwrap();
            tally(l == r, format!("A=G n={n}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut draws = 0;
    while draws < 20 {
        let q = q_draw(&mut rng);
        let ctx = ThetaCtx::for_q(&q).unwrap();
        let v: Vec<QExt> = (0..4).map(|_| QExt::from_rat(small(&mut rng), &ctx)).collect();
        draws += 1;
        for n in 0..=6i64 {
            for k in 0..=n + 1 {
                tally(identities::c_recursion(n, k, &v[0], &v[1], &q), format!("c-rec ({n},{k})"));
                if n >= 1 {
                    tally(identities::c_lowering(n, k, &v[0], &v[1], &q), format!("c-lowering ({n},{k})"));
                }
                match identities::c_corollary(n, k, &v[0], &v[1], &q) {
                    Ok(ok) => tally(ok, format!("c-corollary ({n},{k})")),
                    Err(asep_core::QSpecialError::Singular(_)) => {}
                    Err(e) => tally(false, format!("c-corollary ({n},{k}): {e}")),
                }
            }
            match identities::beta_recursion(n as usize, [&v[0], &v[1], &v[2], &v[3]], &q) {
                Ok(ok) => tally(ok, format!("beta-rec n={n}")),
                Err(asep_core::QSpecialError::Singular(_)) => {}
                Err(e) => tally(false, format!("beta-rec n={n}: {e}")),
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checks} exact checks, {draws} random draws, failures {bad:?}"),
    )
}

fn crit7() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let q = q_draw(&mut rng);
        let ctx = ThetaCtx::for_q(&q).unwrap();
        let x = small(&mut rng);
        let b = QExt::from_rat(small(&mut rng), &ctx);
        let c = QExt::from_rat(small(&mut rng), &ctx);
        let t = QExt::from_rat(small(&mut rng), &ctx);
        for n in 0..=10 {
            checks += 1;
            if !identities::cauchy(n, &x, &q) {
                bad.push(format!("Cauchy n={n} q={q}"));
            }
        }
        for n in 0..=8 {
            match identities::heine(n, &b, &c, &q) {
                Ok(ok) => {
                    checks += 1;
                    if !ok {
                        bad.push(format!("Heine n={n}"));
                    }
                }
                Err(asep_core::QSpecialError::Singular(_)) => {}
                Err(e) => bad.push(format!("Heine n={n}: {e}")),
            }
        }
        let alg = asep_core::Algebra::new(&q, &ctx);
        for n in 0..=10 {
            checks += 1;
            if !identities::bks(n, &t, &alg) {
                bad.push(format!("BKS n={n}"));
            }
        }
    }
    for n_sing in 0..=4u32 {
        let fam = AwFamily::from_params(&singular(n_sing)).unwrap();
        let n_sing = n_sing as usize;
        for n in 0..=n_sing + 1 {
            checks += 1;
            let p = askey_wilson(n, fam.params(), &fam.q).unwrap();
            if p.degree() != Some(n.min(n_sing + 1 - n)) {
                bad.push(format!("degree N={n_sing} n={n}: {:?}", p.degree()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checks} exact checks, failures {bad:?}"))
}

fn crit8() -> Outcome {
    let mut bad = Vec::new();
    let nonsing = [rat(1, 2), rat(-1, 3), rat(1, 3), rat(-1, 4)];
    let sing = [rat(2, 1), rat(-1, 2), rat(3, 1), rat(-1, 3)];
    let g = tasep::moment_series(SeriesKind::Phi0, &nonsing, 12).unwrap();
    if !tasep::eqnt_residuals(&g.coeffs, &nonsing).iter().all(Zero::is_zero) {
        bad.push("linear relations".to_string());
    }
    for n in 0..=12 {
        if tasep::tasep_g(n, &nonsing).unwrap() != g.coeffs[n] {
            bad.push(format!("G closed form n={n}"));
        }
    }
    let f = tasep::moment_series(SeriesKind::Phi1, &sing, 12).unwrap();
    for n in 0..=12 {
        if tasep::tasep_f(n, &sing).unwrap() != f.coeffs[n] {
            bad.push(format!("F closed form n={n}"));
        }
    }
    if tasep::resolvent_series(SeriesKind::Phi0, &nonsing, 12).unwrap() != g {
        bad.push("phi0 series".to_string());
    }
    if tasep::resolvent_series(SeriesKind::Phi1, &sing, 12).unwrap() != f {
        bad.push("phi1 series".to_string());
    }
    outcome(bad.is_empty(), format!("n <= 12, series order 12, failures {bad:?}"))
}

fn crit9() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let words = words_up_to(5);
    let mut word_checks = 0;
    for m in 1..=4u32 {
        let c = rat(2i64.pow(m - 1), 1);
        let fm = build_finite(rat(2, 1), rat(-1, 3), c, rat(-1, 5), rat(1, 2)).unwrap();
        if fm.m != m as usize {
            bad.push(format!("m={m}: built m={}", fm.m));
        }
        if !fm.relation_holds() {
            bad.push(format!("m={m} relation"));
        }
        let ok = fm.check_words(&words).unwrap();
        word_checks += ok.len();
        if !ok.iter().all(|&x| x) {
            bad.push(format!("m={m} words"));
        }
    }
    let generic = build_model(0.5, -1.0 / 3.0, 1.0 / 3.0, -0.25, 0.5, 500).unwrap();
    let gap = associativity_gap(&generic);
    if !(gap.rel_err <= 1e-6) {
        bad.push(format!("generic gap rel err {:e}", gap.rel_err));
    }
    let term = build_model(2.0, -1.0 / 3.0, 4.0, -0.2, 0.5, 500).unwrap();
    let tgap = associativity_gap(&term);
    if !(tgap.measured.abs() <= 1e-12) {
        bad.push(format!("terminating gap {:e}", tgap.measured));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 30.0,
        format!(
            "{word_checks} word checks, generic rel err {:.1e}, terminating gap {:.1e}, {secs:.2}s (limit 30s), failures {bad:?}",
            gap.rel_err,
            tgap.measured.abs()
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", crit1),
        ("Bernoulli product at L = N+1", crit2),
        ("invariance and path independence", crit3),
        ("sign laws", crit4),
        ("Askey-Wilson vanishing and orthogonality", crit5),
        ("moment recursions", crit6),
        ("identity suite", crit7),
        ("TASEP", crit8),
        ("matrix model", crit9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let flag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {flag}  {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
