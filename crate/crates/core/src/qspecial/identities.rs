//! Exact checks of the q-series identities used by the moment recursions.
//! Each returns `true` when both sides agree exactly.

use num_traits::{One, Zero};

use super::{
    beta_k, bks_expand, connection_c, phi21_terminating, qbinomial, qhermite, qpochhammer,
    qpochhammer_rat, qpow_signed, QSpecialError,
};
use crate::algebra::{Algebra, NPoly};
use crate::exact::{qpow, QExt, Rat};

/// `(x;q)_n = Σ_k [n k]_q (−1)^k q^{k(k−1)/2} x^k`.
pub fn cauchy(n: usize, x: &Rat, q: &Rat) -> bool {
    let mut rhs = Rat::zero();
    for k in 0..=n {
        let mut t = qbinomial(n as i64, k as i64, q) * qpow(q, k * k.saturating_sub(1) / 2)
            * num_traits::pow(x.clone(), k);
        if k % 2 == 1 {
            t = -t;
        }
        rhs += t;
    }
    qpochhammer_rat(x, q, n) == rhs
}

/// `₂φ₁(q^{−n}, b; c; q, q) = (c/b;q)_n b^n / (c;q)_n`.
pub fn heine(n: usize, b: &QExt, c: &QExt, q: &Rat) -> Result<bool, QSpecialError> {
    let lhs = phi21_terminating(n, b, c, q)?;
    let den = qpochhammer(c, q, n);
    if den.is_zero() {
        return Err(QSpecialError::Singular("(c;q)_n vanishes".into()));
    }
    let rhs = &(&qpochhammer(&(c * &b.inv()?), q, n) * &b.pow(n)) * &den.inv()?;
    Ok(lhs == rhs)
}

/// `H_n(te + d; t)` computed in the algebra equals its normal-order expansion.
pub fn bks(n: usize, t: &QExt, alg: &Algebra) -> bool {
    let mut x = NPoly::monomial(1, 0, t.clone());
    x.add_term(0, 1, QExt::one(t.ctx()));
    qhermite(n, t, alg.q()).eval_algebra(&x, alg) == bks_expand(n, t, alg.q())
}

/// `c_{n+1,k} = c_{n,k−1} + q^k(a+b)c_{n,k} − q^k(1−q^n)ab c_{n−1,k}`.
pub fn c_recursion(n: i64, k: i64, a: &QExt, b: &QExt, q: &Rat) -> bool {
    let qk = if k >= 0 { qpow(q, k as usize) } else { Rat::zero() };
    let qn = qpow(q, n.max(0) as usize);
    let lhs = connection_c(n + 1, k, a, b, q);
    let rhs = &(&connection_c(n, k - 1, a, b, q)
        + &(&(a + b) * &connection_c(n, k, a, b, q)).scale(&qk))
        - &(&(a * b) * &connection_c(n - 1, k, a, b, q)).scale(&(&qk * (Rat::one() - qn)));
    lhs == rhs
}

/// `(1 − q^{k+1}) c_{n,k+1} = (1 − q^n) c_{n−1,k}`.
pub fn c_lowering(n: i64, k: i64, a: &QExt, b: &QExt, q: &Rat) -> bool {
    let lhs = connection_c(n, k + 1, a, b, q).scale(&(Rat::one() - qpow(q, (k + 1) as usize)));
    let rhs = connection_c(n - 1, k, a, b, q).scale(&(Rat::one() - qpow(q, n as usize)));
    lhs == rhs
}

/// `(ab;q)_k c_{n+1,k} − (1 − q^n ab)(ab;q)_{k−1} c_{n,k−1}
///   = (a+b)(ab/q;q)_k q^k c_{n,k} − (1 − q^n) ab (ab/q;q)_k q^k c_{n−1,k}`.
pub fn c_corollary(n: i64, k: i64, a: &QExt, b: &QExt, q: &Rat) -> Result<bool, QSpecialError> {
    let ab = a * b;
    let one = QExt::one(a.ctx());
    let qk = qpow_signed(q, k)?;
    let qn = qpow(q, n as usize);
    let abq = ab.scale(&qpow_signed(q, -1)?);
    let poch_k = qpochhammer(&ab, q, k as usize);
    let lhs_second = if k >= 1 {
        &(&(&one - &ab.scale(&qn)) * &qpochhammer(&ab, q, (k - 1) as usize))
            * &connection_c(n, k - 1, a, b, q)
    } else {
        QExt::zero(a.ctx())
    };
    let lhs = &(&poch_k * &connection_c(n + 1, k, a, b, q)) - &lhs_second;
    let w = qpochhammer(&abq, q, k as usize).scale(&qk);
    let rhs = &(&(&(a + b) * &w) * &connection_c(n, k, a, b, q))
        - &(&(&ab * &w) * &connection_c(n - 1, k, a, b, q)).scale(&(Rat::one() - qn));
    Ok(lhs == rhs)
}

/// `(1 − abcd q^n) β_{n+1} = (c + d − cd(a+b) q^n) β_n − cd(1 − q^n) β_{n−1}`.
pub fn beta_recursion(n: usize, params: [&QExt; 4], q: &Rat) -> Result<bool, QSpecialError> {
    let [a, b, c, d] = params;
    let one = QExt::one(a.ctx());
    let qn = qpow(q, n);
    let s4 = &(a * b) * &(c * d);
    let cd = c * d;
    let lhs = &(&one - &s4.scale(&qn)) * &beta_k(n + 1, params, q)?;
    let prev = if n >= 1 {
        beta_k(n - 1, params, q)?
    } else {
        QExt::zero(a.ctx())
    };
    let rhs = &(&(&(c + d) - &(&cd * &(a + b)).scale(&qn)) * &beta_k(n, params, q)?)
        - &(&cd * &prev).scale(&(Rat::one() - qn));
    Ok(lhs == rhs)
}
