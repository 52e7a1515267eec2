//! q-special functions over `Q(θ)`: q-Pochhammer symbols, q-binomials,
//! Askey-Wilson and continuous q-Hermite polynomials, connection
//! coefficients, and the moment sequences built from the functionals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{Algebra, NPoly};
use crate::exact::{qint, qpow, ExactError, QExt, Rat, Theta};
use crate::functionals::FunctionalError;

pub mod identities;
pub mod sequences;

pub use sequences::{
    a_equals_g, b_recursion_holds, hermite_images, orthogonality_value, seq_b, seq_f, seq_g,
    verify_t3, x_at, AwFamily, Mode,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSpecialError {
    #[error("this formula divides by powers of q and needs q > 0")]
    NeedsPositiveQ,
    #[error("the first Askey-Wilson parameter must be non-zero")]
    ZeroLeadParameter,
    #[error("vanishing denominator: {0}")]
    Singular(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

/// `(a;q)_n = ∏_{j<n} (1 − a q^j)`.
pub fn qpochhammer(a: &QExt, q: &Rat, n: usize) -> QExt {
    let one = QExt::one(a.ctx());
    let mut acc = one.clone();
    let mut qj = Rat::one();
    for _ in 0..n {
        acc = &acc * &(&one - &a.scale(&qj));
        qj *= q;
    }
    acc
}

/// Rational version of [`qpochhammer`].
pub fn qpochhammer_rat(a: &Rat, q: &Rat, n: usize) -> Rat {
    let mut acc = Rat::one();
    let mut qj = Rat::one();
    for _ in 0..n {
        acc *= Rat::one() - a * &qj;
        qj *= q;
    }
    acc
}

/// `[n]_q!`.
pub fn qfactorial(n: usize, q: &Rat) -> Rat {
    (1..=n).fold(Rat::one(), |acc, k| acc * qint(q, k))
}

/// `[n k]_q`, zero outside `0 ≤ k ≤ n`.
pub fn qbinomial(n: i64, k: i64, q: &Rat) -> Rat {
    if n < 0 || k < 0 || k > n {
        return Rat::zero();
    }
    let (n, k) = (n as usize, k as usize);
    // Product of ratios [n−i]/[k−i]; exact and valid at q = 0.
    let mut acc = Rat::one();
    for i in 0..k {
        acc = acc * qint(q, n - i) / qint(q, k - i);
    }
    acc
}

/// Integer coefficients of `[n k]_q` as a polynomial in `q`.
pub fn qbinomial_coeffs(n: usize, k: usize) -> Vec<i64> {
    if k > n {
        return vec![];
    }
    // [n k] = [n−1 k−1] + q^k [n−1 k]
    let mut table: Vec<Vec<Vec<i64>>> = vec![vec![vec![1]]];
    for m in 1..=n {
        let mut row = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut c = vec![0i64; j * (m - j) + 1];
            if j >= 1 {
                for (i, v) in table[m - 1][j - 1].iter().enumerate() {
                    c[i] += v;
                }
            }
            if j < m {
                for (i, v) in table[m - 1][j].iter().enumerate() {
                    c[i + j] += v;
                }
            }
            row.push(c);
        }
        table.push(row);
    }
    table[n][k].clone()
}

/// `q^e` for a possibly negative exponent.
pub fn qpow_signed(q: &Rat, e: i64) -> Result<Rat, QSpecialError> {
    if e >= 0 {
        Ok(qpow(q, e as usize))
    } else if q.is_zero() {
        Err(QSpecialError::NeedsPositiveQ)
    } else {
        Ok(qpow(q, e.unsigned_abs() as usize).recip())
    }
}

/// Polynomial in one variable `x` with coefficients in `Q(θ)`, ascending.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<QExt>,
    ctx: Theta,
}

impl UniPoly {
    pub fn from_coeffs(coeffs: Vec<QExt>, ctx: &Theta) -> UniPoly {
        let mut p = UniPoly {
            coeffs,
            ctx: ctx.clone(),
        };
        p.trim();
        p
    }

    pub fn zero(ctx: &Theta) -> UniPoly {
        UniPoly::from_coeffs(vec![], ctx)
    }

    pub fn constant(c: QExt) -> UniPoly {
        let ctx = c.ctx().clone();
        UniPoly::from_coeffs(vec![c], &ctx)
    }

    pub fn one(ctx: &Theta) -> UniPoly {
        UniPoly::constant(QExt::one(ctx))
    }

    /// The polynomial `x`.
    pub fn x(ctx: &Theta) -> UniPoly {
        UniPoly::from_coeffs(vec![QExt::zero(ctx), QExt::one(ctx)], ctx)
    }

    /// `c0 + c1·x`.
    pub fn linear(c0: QExt, c1: QExt) -> UniPoly {
        let ctx = c0.ctx().clone();
        UniPoly::from_coeffs(vec![c0, c1], &ctx)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &Theta {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[QExt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> QExt {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| QExt::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> QExt {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| QExt::zero(&self.ctx))
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        UniPoly::from_coeffs(v, &self.ctx)
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect();
        UniPoly::from_coeffs(v, &self.ctx)
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(&self.ctx);
        }
        let mut v = vec![QExt::zero(&self.ctx); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(v, &self.ctx)
    }

    pub fn scale(&self, k: &QExt) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect(), &self.ctx)
    }

    pub fn eval(&self, x: &QExt) -> QExt {
        let mut acc = QExt::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `p(x)` with `x` replaced by `k·x`.
    pub fn rescale_arg(&self, k: &QExt) -> UniPoly {
        let mut pw = QExt::one(&self.ctx);
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c * &pw);
            pw = &pw * k;
        }
        UniPoly::from_coeffs(v, &self.ctx)
    }

    /// Evaluates at an element of the algebra by Horner's rule.
    pub fn eval_algebra(&self, x: &NPoly, alg: &Algebra) -> NPoly {
        let mut acc = NPoly::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = alg.mul(&acc, x);
            acc.add_term(0, 0, c.clone());
        }
        acc
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Elementary symmetric functions of `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymFuncs {
    pub s1: QExt,
    pub s2: QExt,
    pub s3: QExt,
    pub s4: QExt,
}

impl SymFuncs {
    pub fn new(a: &QExt, b: &QExt, c: &QExt, d: &QExt) -> SymFuncs {
        let s1 = &(a + b) + &(c + d);
        let s2 = &(&(&(a * b) + &(a * c)) + &(&(a * d) + &(b * c))) + &(&(b * d) + &(c * d));
        let s3 = &(&(&(a * b) * c) + &(&(a * b) * d)) + &(&(&(a * c) * d) + &(&(b * c) * d));
        let s4 = &(a * b) * &(c * d);
        SymFuncs { s1, s2, s3, s4 }
    }
}

/// Monic continuous q-Hermite polynomial in the `t`-deformation:
/// `H_{n+1} = x H_n − t[n]_q H_{n−1}`, `H_0 = 1`, `H_{−1} = 0`.
pub fn qhermite(n: usize, t: &QExt, q: &Rat) -> UniPoly {
    let ctx = t.ctx();
    let x = UniPoly::x(ctx);
    let mut prev = UniPoly::zero(ctx);
    let mut cur = UniPoly::one(ctx);
    for k in 0..n {
        let next = x.mul(&cur).sub(&prev.scale(&t.scale(&qint(q, k))));
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(te+d; t) = Σ_k [n k]_q t^k e^k d^{n−k}`.
pub fn bks_expand(n: usize, t: &QExt, q: &Rat) -> NPoly {
    let mut p = NPoly::zero(t.ctx());
    let mut tk = QExt::one(t.ctx());
    for k in 0..=n {
        p.add_term(k, n - k, tk.scale(&qbinomial(n as i64, k as i64, q)));
        tk = &tk * t;
    }
    p
}

/// Bivariate Laurent polynomial in `(q, x)`: key `(q exponent, x exponent)`.
#[derive(Clone)]
struct QxPoly {
    terms: BTreeMap<(i64, usize), QExt>,
    ctx: Theta,
}

impl QxPoly {
    fn constant(c: QExt) -> QxPoly {
        let ctx = c.ctx().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        QxPoly { terms, ctx }
    }

    fn from_terms(items: Vec<((i64, usize), QExt)>, ctx: &Theta) -> QxPoly {
        let mut p = QxPoly {
            terms: BTreeMap::new(),
            ctx: ctx.clone(),
        };
        for (k, v) in items {
            p.add_term(k, v);
        }
        p
    }

    fn add_term(&mut self, k: (i64, usize), v: QExt) {
        if v.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| QExt::zero(&self.ctx));
        *e = &*e + &v;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn mul(&self, o: &QxPoly) -> QxPoly {
        let mut out = QxPoly {
            terms: BTreeMap::new(),
            ctx: self.ctx.clone(),
        };
        for (&(qa, xa), a) in &self.terms {
            for (&(qb, xb), b) in &o.terms {
                out.add_term((qa + qb, xa + xb), a * b);
            }
        }
        out
    }

    fn add_assign(&mut self, o: &QxPoly) {
        for (&k, v) in &o.terms {
            self.add_term(k, v.clone());
        }
    }

    /// `∏_{i<len} (1 − c q^{start+i})`.
    fn pochhammer(c: &QExt, start: i64, len: usize) -> QxPoly {
        let ctx = c.ctx();
        let mut acc = QxPoly::constant(QExt::one(ctx));
        for i in 0..len {
            let f = QxPoly::from_terms(
                vec![((0, 0), QExt::one(ctx)), ((start + i as i64, 0), -c)],
                ctx,
            );
            acc = acc.mul(&f);
        }
        acc
    }
}

fn scale_params(params: [&QExt; 4]) -> Option<[QExt; 4]> {
    // p_n is symmetric in its four parameters; put a non-zero one first.
    let idx = params.iter().position(|p| !p.is_zero())?;
    let mut v: Vec<QExt> = params.iter().map(|p| (*p).clone()).collect();
    v.swap(0, idx);
    Some([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
}

/// Askey-Wilson polynomial `p_n(x; a, b, c, d | q)` in the explicit product
/// form, with `x` standing for `cos ψ`.
///
/// At `q = 0` the terms carry negative powers of `q` that cancel; the sum is
/// then formed with `q` kept symbolic and evaluated at the end.
pub fn askey_wilson(n: usize, params: [&QExt; 4], q: &Rat) -> Result<UniPoly, QSpecialError> {
    let ctx = params[0].ctx().clone();
    let Some([a, b, c, d]) = scale_params(params) else {
        // All parameters zero: p_n(x; 0,0,0,0) = θ^{−n} H_n(2θx).
        let h = qhermite(n, &QExt::one(&ctx), q);
        let two_theta = QExt::theta(&ctx).scale(&Rat::from_integer(2.into()));
        let inv = QExt::theta(&ctx).pow(n).inv()?;
        return Ok(h.rescale_arg(&two_theta).scale(&inv));
    };
    let s4 = &(&a * &b) * &(&c * &d);
    let ab = &a * &b;
    let ac = &a * &c;
    let ad = &a * &d;
    let a_inv_n = a.pow(n).inv()?;
    if q.is_positive() {
        let mut sum = UniPoly::zero(&ctx);
        let mut prod = UniPoly::one(&ctx);
        for k in 0..=n {
            let ki = k as i64;
            let ni = n as i64;
            let mut coef = qpow_signed(q, ki * (ki + 1) / 2 - ni * ki)?
                * qbinomial(ni, ki, q);
            if k % 2 == 1 {
                coef = -coef;
            }
            let mut c_k = QExt::from_rat(coef, &ctx);
            for i in 0..k {
                c_k = &c_k * &(&QExt::one(&ctx) - &s4.scale(&qpow(q, n - 1 + i)));
            }
            let qk = qpow(q, k);
            for base in [&ab, &ac, &ad] {
                c_k = &c_k * &qpochhammer(&base.scale(&qk), q, n - k);
            }
            sum = sum.add(&prod.scale(&c_k));
            // Next factor 1 + a²q^{2k} − 2a q^k x.
            let a2 = &a * &a;
            let f = UniPoly::linear(
                &QExt::one(&ctx) + &a2.scale(&qpow(q, 2 * k)),
                a.scale(&(-qpow(q, k) * Rat::from_integer(2.into()))),
            );
            prod = prod.mul(&f);
        }
        return Ok(sum.scale(&a_inv_n));
    }
    // q = 0: symbolic q.
    let mut total = QxPoly {
        terms: BTreeMap::new(),
        ctx: ctx.clone(),
    };
    let two = Rat::from_integer(2.into());
    for k in 0..=n {
        let ki = k as i64;
        let ni = n as i64;
        let shift = ki * (ki + 1) / 2 - ni * ki;
        let sign = if k % 2 == 1 { -Rat::one() } else { Rat::one() };
        let binom = QxPoly::from_terms(
            qbinomial_coeffs(n, k)
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    (
                        (i as i64 + shift, 0usize),
                        QExt::from_rat(&sign * Rat::from_integer(v.into()), &ctx),
                    )
                })
                .collect(),
            &ctx,
        );
        let mut term = binom.mul(&QxPoly::pochhammer(&s4, ni - 1, k));
        for base in [&ab, &ac, &ad] {
            term = term.mul(&QxPoly::pochhammer(base, ki, n - k));
        }
        for j in 0..k {
            let ji = j as i64;
            let f = QxPoly::from_terms(
                vec![
                    ((0, 0), QExt::one(&ctx)),
                    ((2 * ji, 0), &a * &a),
                    ((ji, 1), a.scale(&-two.clone())),
                ],
                &ctx,
            );
            term = term.mul(&f);
        }
        total.add_assign(&term);
    }
    if total.terms.keys().any(|&(qe, _)| qe < 0) {
        return Err(QSpecialError::Internal(
            "negative powers of q did not cancel".into(),
        ));
    }
    let deg = total.terms.keys().map(|&(_, x)| x).max().unwrap_or(0);
    let mut coeffs = vec![QExt::zero(&ctx); deg + 1];
    for (&(qe, xe), v) in &total.terms {
        if qe == 0 {
            coeffs[xe] = &coeffs[xe] + v;
        }
    }
    Ok(UniPoly::from_coeffs(coeffs, &ctx).scale(&a_inv_n))
}

/// `c_{n,k} = Σ_{ℓ=k}^n [n ℓ][ℓ k] a^{n−ℓ} b^{ℓ−k}`, zero outside `0 ≤ k ≤ n`.
pub fn connection_c(n: i64, k: i64, a: &QExt, b: &QExt, q: &Rat) -> QExt {
    if n < 0 || k < 0 || k > n {
        return QExt::zero(a.ctx());
    }
    let mut acc = QExt::zero(a.ctx());
    for l in k..=n {
        let w = qbinomial(n, l, q) * qbinomial(l, k, q);
        let t = &a.pow((n - l) as usize) * &b.pow((l - k) as usize);
        acc = &acc + &t.scale(&w);
    }
    acc
}

/// Terminating `₃φ₂(q^{−m}, x, y; 0, z; q, q)`.
pub fn phi32_terminating(m: usize, x: &QExt, y: &QExt, z: &QExt, q: &Rat) -> Result<QExt, QSpecialError> {
    if !q.is_positive() {
        return Err(QSpecialError::NeedsPositiveQ);
    }
    let ctx = x.ctx();
    let qm_inv = QExt::from_rat(qpow(q, m).recip(), ctx);
    let mut acc = QExt::zero(ctx);
    for j in 0..=m {
        let den = &QExt::from_rat(qpochhammer_rat(q, q, j), ctx) * &qpochhammer(z, q, j);
        if den.is_zero() {
            return Err(QSpecialError::Singular(format!("(z;q)_{j} vanishes")));
        }
        let num = &(&qpochhammer(&qm_inv, q, j) * &qpochhammer(x, q, j)) * &qpochhammer(y, q, j);
        acc = &acc + &(&num * &den.inv()?).scale(&qpow(q, j));
    }
    Ok(acc)
}

/// Terminating `₂φ₁(q^{−n}, b; c; q, q)` summed term by term.
pub fn phi21_terminating(n: usize, b: &QExt, c: &QExt, q: &Rat) -> Result<QExt, QSpecialError> {
    if !q.is_positive() {
        return Err(QSpecialError::NeedsPositiveQ);
    }
    let ctx = b.ctx();
    let qn_inv = QExt::from_rat(qpow(q, n).recip(), ctx);
    let mut acc = QExt::zero(ctx);
    for j in 0..=n {
        let den = &QExt::from_rat(qpochhammer_rat(q, q, j), ctx) * &qpochhammer(c, q, j);
        if den.is_zero() {
            return Err(QSpecialError::Singular(format!("(c;q)_{j} vanishes")));
        }
        let num = &qpochhammer(&qn_inv, q, j) * &qpochhammer(b, q, j);
        acc = &acc + &(&num * &den.inv()?).scale(&qpow(q, j));
    }
    Ok(acc)
}

/// `e_{n,ℓ}`: coefficients of `p_n(x;0,0,0,0) = Σ_ℓ e_{n,ℓ} p_ℓ(x;a,b,c,d)`.
pub fn connection_e(n: usize, l: usize, params: [&QExt; 4], q: &Rat) -> Result<QExt, QSpecialError> {
    let [a, b, c, d] = params;
    let ctx = a.ctx();
    if l > n {
        return Ok(QExt::zero(ctx));
    }
    if a.is_zero() {
        return Err(QSpecialError::ZeroLeadParameter);
    }
    if !q.is_positive() {
        return Err(QSpecialError::NeedsPositiveQ);
    }
    let s4 = &(a * b) * &(c * d);
    let ab = a * b;
    let li = l as i64;
    // (abcd q^{ℓ−1}; q)_ℓ
    let den = qpochhammer(&s4.scale(&qpow_signed(q, li - 1)?), q, l);
    if den.is_zero() {
        return Err(QSpecialError::Singular(format!(
            "(abcd q^{}; q)_{l} vanishes",
            li - 1
        )));
    }
    let den_inv = den.inv()?;
    let ql = qpow(q, l);
    let acq = (a * c).scale(&ql);
    let adq = (a * d).scale(&ql);
    let s4q = s4.scale(&qpow(q, 2 * l));
    let mut acc = QExt::zero(ctx);
    for k in l..=n {
        let ki = k as i64;
        let cnk = connection_c(n as i64, ki, a, b, q);
        if cnk.is_zero() {
            continue;
        }
        let w = qbinomial(ki, li, q) * qpow_signed(q, li * (li - ki))?;
        let poch = qpochhammer(&ab.scale(&ql), q, k - l);
        let a_pow = a.pow(k - l).inv()?;
        let phi = phi32_terminating(k - l, &acq, &adq, &s4q, q)?;
        let term = &(&(&cnk * &poch) * &a_pow) * &phi;
        acc = &acc + &term.scale(&w);
    }
    Ok(&acc * &den_inv)
}

/// `β_k = a^{−k} ₃φ₂(q^{−k}, ad, ac; 0, abcd; q, q)`.
pub fn beta_k(k: usize, params: [&QExt; 4], q: &Rat) -> Result<QExt, QSpecialError> {
    let [a, b, c, d] = params;
    if a.is_zero() {
        return Err(QSpecialError::ZeroLeadParameter);
    }
    let s4 = &(a * b) * &(c * d);
    let phi = phi32_terminating(k, &(a * d), &(a * c), &s4, q)?;
    Ok(&phi * &a.pow(k).inv()?)
}

/// `A_n = θ^n Σ_k c_{n,k} (ab;q)_k a^{−k} ₃φ₂(q^{−k}, ac, ad; 0, abcd; q, q)`.
pub fn coeff_a(n: usize, params: [&QExt; 4], q: &Rat) -> Result<QExt, QSpecialError> {
    let [a, b, _, _] = params;
    let ctx = a.ctx();
    let mut acc = QExt::zero(ctx);
    for k in 0..=n {
        let cnk = connection_c(n as i64, k as i64, a, b, q);
        let term = &(&cnk * &qpochhammer(&(a * b), q, k)) * &beta_k(k, params, q)?;
        acc = &acc + &term;
    }
    Ok(&acc * &QExt::theta(ctx).pow(n))
}
