//! Moment sequences `G_n`, `F_n`, `B_n` of the functionals and the checks
//! that tie them to Askey-Wilson polynomials.

use num_traits::Zero;

use super::{askey_wilson, coeff_a, qint, qpochhammer, QSpecialError, UniPoly};
use crate::algebra::{Algebra, NPoly};
use crate::asep::AsepParams;
use crate::exact::{qpow, QExt, Rat, Theta, ThetaCtx};
use crate::functionals::{aw_singular_index, build_phi0_aw, build_phi1_aw, FunctionalError, PhiTable};

const SINGULAR_SCAN: usize = 256;

/// How a sequence value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Apply the functional to a q-Hermite polynomial evaluated in the algebra.
    Definition,
    /// Three-term recursion in `n` with `t ↦ qt` shifts.
    Recursion,
}

/// An Askey-Wilson parameter quadruple with its `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AwFamily {
    pub a: QExt,
    pub b: QExt,
    pub c: QExt,
    pub d: QExt,
    pub q: Rat,
}

impl AwFamily {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat, q: Rat) -> Result<AwFamily, QSpecialError> {
        let ctx = ThetaCtx::for_q(&q)?;
        let x = |r| QExt::from_rat(r, &ctx);
        Ok(AwFamily {
            a: x(a),
            b: x(b),
            c: x(c),
            d: x(d),
            q,
        })
    }

    pub fn from_qext(v: [QExt; 4], q: Rat) -> AwFamily {
        let [a, b, c, d] = v;
        AwFamily { a, b, c, d, q }
    }

    pub fn from_params(p: &AsepParams) -> Option<AwFamily> {
        p.aw_qext().map(|v| AwFamily::from_qext(v, p.q.clone()))
    }

    pub fn ctx(&self) -> &Theta {
        self.a.ctx()
    }

    pub fn params(&self) -> [&QExt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn s4(&self) -> QExt {
        &(&self.a * &self.b) * &(&self.c * &self.d)
    }

    pub fn singular_index(&self) -> Option<usize> {
        aw_singular_index(&self.s4(), &self.q, SINGULAR_SCAN)
    }

    /// `(at, bt, c/t, d/t)`.
    pub fn scaled(&self, t: &QExt) -> Result<AwFamily, QSpecialError> {
        let ti = t.inv()?;
        Ok(AwFamily {
            a: &self.a * t,
            b: &self.b * t,
            c: &self.c * &ti,
            d: &self.d * &ti,
            q: self.q.clone(),
        })
    }

    pub fn algebra(&self) -> Algebra {
        Algebra::new(&self.q, self.ctx())
    }

    pub fn phi0(&self, max_degree: usize) -> Result<PhiTable, FunctionalError> {
        build_phi0_aw(self.params(), &self.q, self.ctx(), max_degree)
    }

    pub fn phi1(&self, max_degree: usize) -> Result<PhiTable, FunctionalError> {
        build_phi1_aw(self.params(), &self.q, self.ctx(), max_degree)
    }

    /// Largest admissible φ₀ degree, capped at `want`.
    pub fn phi0_degree(&self, want: usize) -> usize {
        self.singular_index().map_or(want, |n| want.min(n))
    }
}

/// `H_k(se + d; s)` for `k = 0..=n`, computed in the algebra.
pub fn hermite_images(n: usize, s: &QExt, alg: &Algebra) -> Vec<NPoly> {
    let ctx = s.ctx();
    let mut x = NPoly::monomial(1, 0, s.clone());
    x.add_term(0, 1, QExt::one(ctx));
    let mut out = vec![NPoly::identity(ctx)];
    let mut prev = NPoly::zero(ctx);
    for k in 0..n {
        let cur = out[k].clone();
        let next = alg.mul(&x, &cur).sub(&prev.scale(&s.scale(&qint(alg.q(), k))));
        prev = cur;
        out.push(next);
    }
    out
}

fn check_degree(table: &PhiTable, n: usize) -> Result<(), QSpecialError> {
    if n > table.max_degree() {
        return Err(FunctionalError::DomainExceeded {
            requested: n,
            available: table.max_degree(),
        }
        .into());
    }
    Ok(())
}

/// `G_n(t) = φ₀[H_n(te + d; t)]`.
pub fn seq_g(
    mode: Mode,
    n: usize,
    t: &QExt,
    fam: &AwFamily,
    phi0: &PhiTable,
) -> Result<QExt, QSpecialError> {
    match mode {
        Mode::Definition => {
            check_degree(phi0, n)?;
            let alg = fam.algebra();
            let h = hermite_images(n, t, &alg);
            Ok(phi0.eval(&h[n])?)
        }
        Mode::Recursion => g_recursion(n, t, fam),
    }
}

fn g_recursion(n: usize, t: &QExt, fam: &AwFamily) -> Result<QExt, QSpecialError> {
    if let Some(ns) = fam.singular_index() {
        if n > ns {
            return Err(FunctionalError::DomainExceeded {
                requested: n,
                available: ns,
            }
            .into());
        }
    }
    let ctx = fam.ctx().clone();
    let q = &fam.q;
    let one = QExt::one(&ctx);
    let theta = QExt::theta(&ctx);
    let (ab, cd) = (&fam.a * &fam.b, &fam.c * &fam.d);
    let (apb, cpd) = (&fam.a + &fam.b, &fam.c + &fam.d);
    let s4 = fam.s4();
    // Arguments t q^j for j = 0..=n.
    let ts: Vec<QExt> = (0..=n).map(|j| t.scale(&qpow(q, j))).collect();
    let mut prev = vec![QExt::zero(&ctx); n + 2];
    let mut cur = vec![one.clone(); n + 1];
    for m in 0..n {
        let qm = qpow(q, m);
        let den = (&one - &s4.scale(&qm)).inv()?;
        let c1 = &theta * &den;
        let c2 = (&(&theta * &theta) * &den).scale(&(Rat::from_integer(1.into()) - &qm));
        let next: Vec<QExt> = (0..n - m)
            .map(|j| {
                let tj = &ts[j];
                let u = &one - &(tj * &cd);
                let first = &(&(&apb * &u) * &cur[j + 1]) + &(&(&cpd * &(tj - &ab.scale(&qm))) * &cur[j]);
                let second = &(&(&ab * &u) * &prev[j + 1])
                    + &(&(&(tj * &cd) * &(tj - &ab.scale(&qm))) * &prev[j]);
                &(&c1 * &first) - &(&c2 * &second)
            })
            .collect();
        prev = cur;
        cur = next;
    }
    Ok(cur[0].clone())
}

/// `F_n(t) = φ₁[H_{n+N}(te + d; t)]`; `F_0 = 0`.
pub fn seq_f(
    mode: Mode,
    n: usize,
    t: &QExt,
    fam: &AwFamily,
    phi1: &PhiTable,
) -> Result<QExt, QSpecialError> {
    let ns = fam.singular_index().ok_or_else(|| {
        FunctionalError::Regime("F_n needs singular parameters".into())
    })?;
    match mode {
        Mode::Definition => {
            check_degree(phi1, n + ns)?;
            let alg = fam.algebra();
            let h = hermite_images(n + ns, t, &alg);
            Ok(phi1.eval(&h[n + ns])?)
        }
        Mode::Recursion => f_recursion(n, ns, t, fam),
    }
}

fn f_recursion(n: usize, ns: usize, t: &QExt, fam: &AwFamily) -> Result<QExt, QSpecialError> {
    let ctx = fam.ctx().clone();
    if n == 0 {
        return Ok(QExt::zero(&ctx));
    }
    let q = &fam.q;
    let one = QExt::one(&ctx);
    let theta = QExt::theta(&ctx);
    let (ab, cd) = (&fam.a * &fam.b, &fam.c * &fam.d);
    let (apb, cpd) = (&fam.a + &fam.b, &fam.c + &fam.d);
    let ts: Vec<QExt> = (0..=n).map(|j| t.scale(&qpow(q, j))).collect();
    let norm = (&theta.pow(ns + 1) * &qpochhammer(&cd, q, ns + 1)).inv()?;
    let mut prev = vec![QExt::zero(&ctx); n + 1];
    let mut cur: Vec<QExt> = ts
        .iter()
        .take(n)
        .map(|tj| &qpochhammer(&(tj * &cd), q, ns + 1) * &norm)
        .collect();
    for m in 1..n {
        let qm = qpow(q, m);
        let qmn = qpow(q, m + ns);
        let den = Rat::from_integer(1.into()) - &qm;
        if den.is_zero() {
            return Err(QSpecialError::Singular("1 − q^n vanishes".into()));
        }
        let den = den.recip();
        let c1 = theta.scale(&den);
        let c2 = (&theta * &theta).scale(&(&den * (Rat::from_integer(1.into()) - &qmn)));
        let next: Vec<QExt> = (0..n - m)
            .map(|j| {
                let tj = &ts[j];
                let u = &one - &(tj * &cd);
                let first = &(&(&apb * &u) * &cur[j + 1]) + &(&(&cpd * &(tj - &ab.scale(&qmn))) * &cur[j]);
                let second = &(&(&ab * &u) * &prev[j + 1])
                    + &(&(&(tj * &cd) * &(tj - &ab.scale(&qmn))) * &prev[j]);
                &(&c1 * &first) - &(&c2 * &second)
            })
            .collect();
        prev = cur;
        cur = next;
    }
    Ok(cur[0].clone())
}

/// Scaled moments `(abcd;q)_k G_k(s; at, bt, c/t, d/t) / (θ^k t^k)` for
/// `k = 0..=n`, at argument `s`.
fn g_tilde(n: usize, s: &QExt, fam: &AwFamily, t: &QExt) -> Result<Vec<QExt>, QSpecialError> {
    let sc = fam.scaled(t)?;
    let table = sc.phi0(n)?;
    let alg = sc.algebra();
    let h = hermite_images(n, s, &alg);
    let theta_t = &QExt::theta(fam.ctx()) * t;
    let s4 = fam.s4();
    h.iter()
        .enumerate()
        .map(|(k, hk)| {
            let g = table.eval(hk)?;
            let w = &qpochhammer(&s4, &fam.q, k) * &theta_t.pow(k).inv()?;
            Ok(&g * &w)
        })
        .collect()
}

/// `B_n(t) = (abcd;q)_n G_n(t²; at, bt, c/t, d/t) / (θ^n t^n)`.
pub fn seq_b(n: usize, fam: &AwFamily, t: &QExt) -> Result<QExt, QSpecialError> {
    let v = g_tilde(n, &(t * t), fam, t)?;
    Ok(v[n].clone())
}

/// Checks the `t`-free three-term recursion of the scaled moments at step
/// `n ≥ 1`:
/// `G̃_{n+1}(t²) = (a+b)(1−cd)G̃_n(qt²) + (c+d)(1−q^n ab)G̃_n(t²)
///   − (1−q^n)(1−abcd q^{n−1})(ab(1−cd)G̃_{n−1}(qt²) + cd(1−abq^n)G̃_{n−1}(t²))`.
pub fn b_recursion_holds(n: usize, fam: &AwFamily, t: &QExt) -> Result<bool, QSpecialError> {
    if n == 0 {
        return Err(QSpecialError::Internal("the recursion starts at n = 1".into()));
    }
    let q = &fam.q;
    let t2 = t * t;
    let at = g_tilde(n + 1, &t2, fam, t)?;
    let atq = g_tilde(n, &t2.scale(q), fam, t)?;
    let one = QExt::one(fam.ctx());
    let (ab, cd) = (&fam.a * &fam.b, &fam.c * &fam.d);
    let qn = qpow(q, n);
    let s4 = fam.s4();
    let first = &(&(&(&fam.a + &fam.b) * &(&one - &cd)) * &atq[n])
        + &(&(&(&fam.c + &fam.d) * &(&one - &ab.scale(&qn))) * &at[n]);
    let lead = (&one - &s4.scale(&qpow(q, n - 1))).scale(&(Rat::from_integer(1.into()) - &qn));
    let second = &(&(&ab * &(&one - &cd)) * &atq[n - 1]) + &(&(&cd * &(&one - &ab.scale(&qn))) * &at[n - 1]);
    let rhs = &first - &(&lead * &second);
    Ok(at[n + 1] == rhs)
}

/// `x_t = (e/t + t d) / (2θ)` as an element of the algebra.
pub fn x_at(t: &QExt) -> Result<NPoly, QSpecialError> {
    let ctx = t.ctx();
    let two_theta_inv = QExt::theta(ctx).scale(&Rat::from_integer(2.into())).inv()?;
    let mut x = NPoly::monomial(1, 0, &t.inv()? * &two_theta_inv);
    x.add_term(0, 1, t * &two_theta_inv);
    Ok(x)
}

/// `φ₀[p_n(x_t; at, bt, c/t, d/t)]`; zero for `n ≥ 1` when the table is φ₀
/// of `fam`.
pub fn verify_t3(n: usize, fam: &AwFamily, t: &QExt, phi0: &PhiTable) -> Result<QExt, QSpecialError> {
    check_degree(phi0, n)?;
    let sc = fam.scaled(t)?;
    let p = askey_wilson(n, sc.params(), &fam.q)?;
    let alg = fam.algebra();
    let img = p.eval_algebra(&x_at(t)?, &alg);
    Ok(phi0.eval(&img)?)
}

/// `φ₀[p_m(x₁) p_n(x₁)]` with `x₁ = (e + d)/(2θ)`.
pub fn orthogonality_value(
    m: usize,
    n: usize,
    fam: &AwFamily,
    phi0: &PhiTable,
) -> Result<QExt, QSpecialError> {
    check_degree(phi0, m + n)?;
    let pm = askey_wilson(m, fam.params(), &fam.q)?;
    let pn = askey_wilson(n, fam.params(), &fam.q)?;
    let prod: UniPoly = pm.mul(&pn);
    let alg = fam.algebra();
    let img = prod.eval_algebra(&x_at(&QExt::one(fam.ctx()))?, &alg);
    Ok(phi0.eval(&img)?)
}

/// Both sides of `t^n G_n(1/t²; a, b, c, d) = A_n(at, bt, c/t, d/t)`.
pub fn a_equals_g(
    n: usize,
    fam: &AwFamily,
    t: &QExt,
    phi0: &PhiTable,
) -> Result<(QExt, QExt), QSpecialError> {
    let arg = (t * t).inv()?;
    let lhs = &t.pow(n) * &seq_g(Mode::Definition, n, &arg, fam, phi0)?;
    let sc = fam.scaled(t)?;
    let rhs = coeff_a(n, sc.params(), &fam.q)?;
    Ok((lhs, rhs))
}
