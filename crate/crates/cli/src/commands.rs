use std::io::Write;

use asep_core::algebra::Word;
use asep_core::asep::{self, regime_for, DistRow};
use asep_core::exact::{fmt_rat, rat, rat_to_f64};
use asep_core::matmodel::{self, associativity_gap, build_finite, build_model, words_up_to};
use asep_core::oracle::{self, DEFAULT_MAX_SITES};
use asep_core::qspecial::{
    self, a_equals_g, askey_wilson, b_recursion_holds, identities, orthogonality_value, seq_b,
    seq_f, seq_g, verify_t3, AwFamily, Mode,
};
use asep_core::tasep::{self, SeriesKind};
use asep_core::{Algebra, QExt, Rat, ThetaCtx};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::params::{show, sig15, ParamArgs};
use crate::{CliError, Format};

fn emit_json(v: &serde_json::Value) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Failure(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{s}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failure(e.to_string())),
        _ => Ok(()),
    }
}

fn emit_csv<T: Serialize>(rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Failure(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Failure(e.to_string()))
}

fn core_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failure(e.to_string())
}

fn check_l(l: usize) -> Result<(), CliError> {
    if l == 0 {
        return Err(CliError::Usage("--L must be at least 1".into()));
    }
    Ok(())
}

pub fn stationary(p: &ParamArgs, l: usize, fmt: Format) -> Result<bool, CliError> {
    check_l(l)?;
    let params = p.asep()?;
    let dist = asep::stationary(&params, l).map_err(core_err)?;
    let rows = dist.rows();
    let regime = regime_for(&params, l);
    match fmt {
        Format::Json => emit_json(&json!({
            "params": params.to_json(),
            "L": l,
            "regime": regime.name(),
            "N": params.singular_index,
            "rows": rows,
        }))?,
        Format::Csv => emit_csv(&rows)?,
        Format::Text => {
            let n = params
                .singular_index
                .map_or_else(|| "none".to_string(), |n| n.to_string());
            println!("L = {l}  regime = {}  N = {n}", regime.name());
            for DistRow { config, p, p_float } in rows {
                println!("{config}  {p}  {}", sig15(p_float));
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct OracleRow {
    #[serde(rename = "L")]
    l: usize,
    max_discrepancy: String,
    pass: bool,
}

pub fn oracle_check(p: &ParamArgs, l: usize, fmt: Format) -> Result<bool, CliError> {
    check_l(l)?;
    if l > DEFAULT_MAX_SITES {
        return Err(CliError::Usage(format!("--L must be at most {DEFAULT_MAX_SITES}")));
    }
    let params = p.asep()?;
    let ansatz = asep::stationary(&params, l).map_err(core_err)?;
    let g = oracle::generator(&params, l).map_err(core_err)?;
    let exact = oracle::stationary_exact(&g).map_err(core_err)?;
    let max = ansatz
        .probs
        .iter()
        .zip(&exact.probs)
        .map(|(x, y)| (x - y).abs())
        .fold(Rat::zero(), |m, d| if d > m { d } else { m });
    let pass = max.is_zero();
    let text = if pass {
        "0 (exact)".to_string()
    } else {
        format!("{} ({})", fmt_rat(&max), sig15(rat_to_f64(&max)))
    };
    match fmt {
        Format::Json => emit_json(&json!({
            "params": params.to_json(),
            "L": l,
            "max_discrepancy": fmt_rat(&max),
            "pass": pass,
        }))?,
        Format::Csv => emit_csv(&[OracleRow {
            l,
            max_discrepancy: fmt_rat(&max),
            pass,
        }])?,
        Format::Text => println!("max discrepancy: {text}"),
    }
    Ok(pass)
}

#[derive(Serialize)]
struct ProfileRow {
    #[serde(rename = "L")]
    l: usize,
    current: String,
    current_float: f64,
    sign: i32,
}

pub fn current_profile(p: &ParamArgs, l_max: usize, fmt: Format) -> Result<bool, CliError> {
    if l_max < 2 {
        return Err(CliError::Usage("--L-max must be at least 2".into()));
    }
    let params = p.asep()?;
    let mut rows = Vec::new();
    for l in 2..=l_max {
        let j = asep::current(&params, l).map_err(core_err)?;
        rows.push(ProfileRow {
            l,
            current_float: rat_to_f64(&j),
            sign: if j.is_zero() { 0 } else if j.is_positive() { 1 } else { -1 },
            current: fmt_rat(&j),
        });
    }
    let reversal = rows
        .windows(2)
        .find(|w| w[0].sign <= 0 && w[1].sign > 0)
        .map(|w| w[1].l);
    let (label, value) = match params.singular_index {
        Some(n) => ("N+1", n + 1),
        None => ("M", params.reversal_index()),
    };
    match fmt {
        Format::Json => emit_json(&json!({
            "params": params.to_json(),
            "rows": rows,
            "first_positive_after_reversal": reversal,
            "index": { "name": label, "value": value },
        }))?,
        Format::Csv => emit_csv(&rows)?,
        Format::Text => {
            println!("{label} = {value}");
            for r in &rows {
                let mark = if Some(r.l) == reversal { "  <- sign reversal" } else { "" };
                println!("L = {:>3}  J = {}  ({}){mark}", r.l, r.current, sig15(r.current_float));
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub identity: String,
    pub instances: usize,
    pub passed: usize,
    pub pass: bool,
}

impl Check {
    fn new(identity: &str) -> Check {
        Check {
            identity: identity.into(),
            instances: 0,
            passed: 0,
            pass: true,
        }
    }

    fn record(&mut self, ok: bool) {
        self.instances += 1;
        if ok {
            self.passed += 1;
        } else {
            self.pass = false;
        }
    }

    fn record_result(&mut self, r: Result<bool, qspecial::QSpecialError>) {
        match r {
            Ok(ok) => self.record(ok),
            Err(qspecial::QSpecialError::Singular(_)) => {}
            Err(_) => self.record(false),
        }
    }
}

fn report(checks: &[Check], fmt: Format, extra: serde_json::Value) -> Result<bool, CliError> {
    let pass = checks.iter().all(|c| c.pass);
    match fmt {
        Format::Json => emit_json(&json!({ "context": extra, "checks": checks, "pass": pass }))?,
        Format::Csv => emit_csv(checks)?,
        Format::Text => {
            for c in checks {
                let flag = if c.pass { "PASS" } else { "FAIL" };
                println!("{flag}  {:<40} {}/{}", c.identity, c.passed, c.instances);
            }
        }
    }
    Ok(pass)
}

fn parse_t_grid(s: &str, fam: &AwFamily) -> Result<Vec<QExt>, CliError> {
    s.split(',')
        .map(|x| {
            let r = asep_core::parse_rat(x).map_err(|_| CliError::Usage(format!("--t: bad value {x:?}")))?;
            if r.is_zero() {
                return Err(CliError::Usage("--t: values must be non-zero".into()));
            }
            Ok(QExt::from_rat(r, fam.ctx()))
        })
        .collect()
}

pub fn aw_verify(p: &ParamArgs, n_max: usize, ortho_max: usize, t: &str, fmt: Format) -> Result<bool, CliError> {
    let fam = p.family()?;
    let ts = parse_t_grid(t, &fam)?;
    let sing = fam.singular_index();
    let mut checks = Vec::new();

    let top = sing.map_or(n_max, |n| n.min(n_max));
    let table = fam.phi0(fam.phi0_degree(n_max.max(2 * ortho_max))).map_err(core_err)?;
    let mut vanish = Check::new("phi0[p_n(x_t; at,bt,c/t,d/t)] = 0");
    for tv in &ts {
        for n in 1..=top {
            vanish.record(verify_t3(n, &fam, tv, &table).map_err(core_err)?.is_zero());
        }
    }
    checks.push(vanish);

    match sing {
        None => {
            let mut ortho = Check::new("orthogonality phi0[p_m p_n] = 0, m < n");
            for n in 1..=ortho_max {
                for m in 0..n {
                    ortho.record(orthogonality_value(m, n, &fam, &table).map_err(core_err)?.is_zero());
                }
            }
            checks.push(ortho);
        }
        Some(n_sing) => {
            let mut deg = Check::new("degree law deg p_n = min(n, N+1-n)");
            for n in 0..=n_sing + 1 {
                let pn = askey_wilson(n, fam.params(), &fam.q).map_err(core_err)?;
                deg.record(pn.degree() == Some(n.min(n_sing + 1 - n)));
            }
            checks.push(deg);
        }
    }

    if fam.q.is_positive() && !fam.a.is_zero() {
        let mut ag = Check::new("t^n G_n(1/t^2) = A_n(at,bt,c/t,d/t)");
        for tv in &ts {
            for n in 0..=top {
                match a_equals_g(n, &fam, tv, &table) {
                    Ok((l, r)) => ag.record(l == r),
                    Err(qspecial::QSpecialError::Singular(_)) => {}
                    Err(e) => return Err(core_err(e)),
                }
            }
        }
        checks.push(ag);
    }
    report(&checks, fmt, json!({ "N": sing, "n_max": n_max }))
}

fn draw(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        if n != 0 {
            return rat(n, rng.gen_range(1..=7));
        }
    }
}

fn draw_q(rng: &mut ChaCha8Rng) -> Rat {
    let d: i64 = rng.gen_range(3..=9);
    rat(rng.gen_range(1..d), d)
}

pub fn identity_suite(seed: u64, draws: usize, n_max: usize, fmt: Format) -> Result<bool, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cauchy = Check::new("Cauchy q-binomial");
    let mut heine = Check::new("Heine 2phi1 summation");
    let mut bks = Check::new("H_n(te+d;t) normal-order expansion");
    let mut c_rec = Check::new("c_{n,k} three-term recursion");
    let mut c_low = Check::new("c_{n,k} lowering relation");
    let mut c_cor = Check::new("c_{n,k} (ab;q)_k corollary");
    let mut zeil = Check::new("beta_k recursion");
    for _ in 0..draws {
        let q = draw_q(&mut rng);
        let ctx = ThetaCtx::for_q(&q).map_err(core_err)?;
        let v: Vec<QExt> = (0..4).map(|_| QExt::from_rat(draw(&mut rng), &ctx)).collect();
        let x = draw(&mut rng);
        for n in 0..=10 {
            cauchy.record(identities::cauchy(n, &x, &q));
        }
        for n in 0..=8 {
            heine.record_result(identities::heine(n, &v[0], &v[1], &q));
        }
        let alg = Algebra::new(&q, &ctx);
        for n in 0..=n_max {
            bks.record(identities::bks(n, &v[2], &alg));
        }
        for n in 0..=n_max as i64 {
            for k in 0..=n + 1 {
                c_rec.record(identities::c_recursion(n, k, &v[0], &v[1], &q));
                if n >= 1 {
                    c_low.record(identities::c_lowering(n, k, &v[0], &v[1], &q));
                }
                c_cor.record_result(identities::c_corollary(n, k, &v[0], &v[1], &q));
            }
        }
        for n in 0..=n_max {
            zeil.record_result(identities::beta_recursion(n, [&v[0], &v[1], &v[2], &v[3]], &q));
        }
    }
    let mut checks = vec![cauchy, heine, bks, c_rec, c_low, c_cor, zeil];

    // Moment recursions on one non-singular and one singular family.
    let generic = AwFamily::new(rat(1, 2), rat(-1, 3), rat(2, 3), rat(-1, 5), rat(1, 3)).map_err(core_err)?;
    let singular = AwFamily::new(rat(2, 1), rat(-1, 2), rat(16, 1), rat(-1, 2), rat(1, 2)).map_err(core_err)?;
    let mut g = Check::new("G_n definition = recursion");
    for fam in [&generic, &singular] {
        let deg = fam.phi0_degree(n_max);
        let table = fam.phi0(deg).map_err(core_err)?;
        let t = QExt::from_rat(rat(3, 4), fam.ctx());
        for n in 0..=deg {
            let a = seq_g(Mode::Definition, n, &t, fam, &table).map_err(core_err)?;
            let b = seq_g(Mode::Recursion, n, &t, fam, &table).map_err(core_err)?;
            g.record(a == b);
        }
    }
    let mut f = Check::new("F_n definition = recursion");
    let n_sing = singular.singular_index().unwrap_or(0);
    let table = singular.phi1(n_sing + n_max).map_err(core_err)?;
    let t = QExt::from_rat(rat(3, 4), singular.ctx());
    for n in 0..=n_max {
        let a = seq_f(Mode::Definition, n, &t, &singular, &table).map_err(core_err)?;
        let b = seq_f(Mode::Recursion, n, &t, &singular, &table).map_err(core_err)?;
        f.record(a == b);
    }
    let mut bt = Check::new("B_n independent of t");
    let mut brec = Check::new("B_n recursion");
    let one = QExt::one(generic.ctx());
    for n in 0..=n_max.min(6) {
        let base = seq_b(n, &generic, &one).map_err(core_err)?;
        for tv in [rat(2, 1), rat(5, 7)] {
            let tv = QExt::from_rat(tv, generic.ctx());
            bt.record(seq_b(n, &generic, &tv).map_err(core_err)? == base);
        }
        if n >= 1 {
            brec.record(b_recursion_holds(n, &generic, &one).map_err(core_err)?);
        }
    }
    checks.extend([g, f, bt, brec]);
    report(&checks, fmt, json!({ "seed": seed, "draws": draws, "n_max": n_max }))
}

#[derive(Serialize)]
struct TasepRow {
    n: usize,
    kind: &'static str,
    closed_form: String,
    moment: String,
    series: String,
    agree: bool,
}

pub fn tasep_series(p: &ParamArgs, order: usize, fmt: Format) -> Result<bool, CliError> {
    let quad = p.aw()?;
    if let Some(q) = &p.q {
        if !q.is_zero() {
            return Err(CliError::Usage("--q: tasep-series is the q = 0 case".into()));
        }
    }
    let s4 = &quad[0] * &quad[1] * &quad[2] * &quad[3];
    let (kind, label) = if s4 == Rat::from_integer(1.into()) {
        (SeriesKind::Phi1, "F")
    } else {
        (SeriesKind::Phi0, "G")
    };
    let closed = tasep::resolvent_series(kind, &quad, order).map_err(core_err)?;
    let moments = tasep::moment_series(kind, &quad, order).map_err(core_err)?;
    let mut rows = Vec::new();
    for n in 0..=order {
        let cf = match kind {
            SeriesKind::Phi0 => tasep::tasep_g(n, &quad),
            SeriesKind::Phi1 => tasep::tasep_f(n, &quad),
        }
        .map_err(core_err)?;
        rows.push(TasepRow {
            n,
            kind: label,
            agree: cf == moments.coeffs[n] && closed.coeffs[n] == moments.coeffs[n],
            closed_form: fmt_rat(&cf),
            moment: fmt_rat(&moments.coeffs[n]),
            series: fmt_rat(&closed.coeffs[n]),
        });
    }
    let mut pass = rows.iter().all(|r| r.agree);
    let eqnt = if kind == SeriesKind::Phi0 {
        let res = tasep::eqnt_residuals(&moments.coeffs, &quad);
        let ok = res.iter().all(|r| r.is_zero());
        pass &= ok;
        Some(ok)
    } else {
        None
    };
    match fmt {
        Format::Json => emit_json(&json!({ "rows": rows, "linear_relations_hold": eqnt, "pass": pass }))?,
        Format::Csv => emit_csv(&rows)?,
        Format::Text => {
            for r in &rows {
                println!(
                    "n = {:>2}  {}_n(1) = {}  series = {}  {}",
                    r.n,
                    r.kind,
                    r.closed_form,
                    r.series,
                    if r.agree { "ok" } else { "MISMATCH" }
                );
            }
            if let Some(ok) = eqnt {
                println!("linear relations among G_n(1): {}", if ok { "hold" } else { "FAIL" });
            }
        }
    }
    Ok(pass)
}

pub fn matrix_demo(p: &ParamArgs, trunc: usize, max_word: usize, tol: f64, fmt: Format) -> Result<bool, CliError> {
    let [a, b, c, d] = p.aw()?;
    let q = p.q.clone().ok_or_else(|| CliError::Usage("missing --q".into()))?;
    let f = |x: &Rat| rat_to_f64(x);
    let model = build_model(f(&a), f(&b), f(&c), f(&d), f(&q), trunc).map_err(|e| match e {
        matmodel::MatError::DegenerateB | matmodel::MatError::Params(_) | matmodel::MatError::Truncation(_) => {
            CliError::Usage(e.to_string())
        }
        other => core_err(other),
    })?;
    let gap = associativity_gap(&model);
    let rel = model.relation_residual();
    let finite = build_finite(a, b, c, d, q).ok();
    let mut pass = rel <= 1e-12;
    let mut finite_report = serde_json::Value::Null;
    if let Some(fm) = &finite {
        pass &= gap.measured.abs() <= 1e-12;
        let words = words_up_to(max_word);
        let exact_rel = fm.relation_holds();
        let (checked, ok) = match fm.check_words(&words) {
            Ok(v) => (v.len(), v.iter().filter(|&&x| x).count()),
            Err(matmodel::MatError::VanishingNormalizer) => (0, 0),
            Err(e) => return Err(core_err(e)),
        };
        pass &= exact_rel && ok == checked;
        finite_report = json!({
            "m": fm.m,
            "normalizer": fmt_rat(&fm.normalizer()),
            "identity": fmt_rat(&fm.wxv(&Word::empty()).map_err(core_err)?),
            "relation_exact": exact_rel,
            "words_checked": checked,
            "words_matching": ok,
        });
    } else {
        pass &= gap.rel_err <= tol;
    }
    match fmt {
        Format::Json | Format::Csv => emit_json(&json!({
            "trunc": trunc,
            "gap": gap,
            "relation_residual": rel,
            "finite": finite_report,
            "pass": pass,
        }))?,
        Format::Text => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "(<W|e)|V> = {}", sig15(gap.left));
            let _ = writeln!(out, "<W|(e|V>) = {}", sig15(gap.right));
            let _ = writeln!(out, "measured gap  = {}", sig15(gap.measured));
            let _ = writeln!(out, "predicted gap = {}", sig15(gap.predicted));
            let _ = writeln!(out, "relative error = {}", sig15(gap.rel_err));
            let _ = writeln!(out, "relation residual (top-left block) = {}", sig15(rel));
            if let Some(fm) = &finite {
                let _ = writeln!(out, "finite model: m = {}, normalizer = {}", fm.m, show(&fm.normalizer()));
                let _ = writeln!(out, "finite checks: {finite_report}");
            }
        }
    }
    Ok(pass)
}
