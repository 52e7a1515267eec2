//! Exact number tower: arbitrary-size rationals and the quadratic extension
//! `Q(θ)` with `θ² = 1/(1−q)`.
//!
//! Every [`QExt`] carries a shared [`Theta`] context. When `1/(1−q)` is the
//! square of a rational (for instance `q = 3/4` gives `θ = 2`, and `q = 0`
//! gives `θ = 1`) the context is *collapsed*: `θ` is substituted by its
//! rational value and the `s` component is always zero. Without the collapse
//! the formal pair representation would have zero divisors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-size rational in canonical form (positive denominator, reduced).
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("theta contexts differ: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("theta^2 must be positive, got {0}")]
    NonPositiveThetaSq(String),
    #[error("q must satisfy q < 1, got {0}")]
    QOutOfRange(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Builds `num/den` as a canonical rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ExactError::Parse(s.to_string()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| ExactError::Parse(s.to_string()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| ExactError::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(ExactError::Parse(s.to_string()));
        }
        Ok(Rat::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| ExactError::Parse(s.to_string()))?;
        Ok(Rat::from_integer(n))
    }
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_rat(x: &Rat) -> String {
    x.to_string()
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fallback for magnitudes outside the direct conversion range.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `q^k` with the convention `q^0 = 1` (also for `q = 0`).
pub fn qpow(q: &Rat, k: usize) -> Rat {
    num_traits::pow(q.clone(), k)
}

/// The q-number `[n]_q = 1 + q + … + q^{n−1}`, with `[0]_q = 0`.
pub fn qint(q: &Rat, n: usize) -> Rat {
    let mut acc = Rat::zero();
    let mut p = Rat::one();
    for _ in 0..n {
        acc += &p;
        p *= q;
    }
    acc
}

fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rat::new(rn, rd))
    } else {
        None
    }
}

/// Shared context for `Q(θ)`: the value of `θ²` and, when `θ` is rational,
/// its value.
#[derive(Debug, PartialEq, Eq)]
pub struct ThetaCtx {
    theta_sq: Rat,
    root: Option<Rat>,
}

pub type Theta = Arc<ThetaCtx>;

impl ThetaCtx {
    pub fn new(theta_sq: Rat) -> Result<Theta, ExactError> {
        if !theta_sq.is_positive() {
            return Err(ExactError::NonPositiveThetaSq(fmt_rat(&theta_sq)));
        }
        let root = rational_sqrt(&theta_sq);
        Ok(Arc::new(ThetaCtx { theta_sq, root }))
    }

    /// Context with `θ² = 1/(1−q)`.
    pub fn for_q(q: &Rat) -> Result<Theta, ExactError> {
        if q >= &Rat::one() {
            return Err(ExactError::QOutOfRange(fmt_rat(q)));
        }
        Self::new((Rat::one() - q).recip())
    }

    pub fn theta_sq(&self) -> &Rat {
        &self.theta_sq
    }

    /// `Some(θ)` when `θ²` is a rational square.
    pub fn rational_root(&self) -> Option<&Rat> {
        self.root.as_ref()
    }

    pub fn is_collapsed(&self) -> bool {
        self.root.is_some()
    }

    pub fn theta_f64(&self) -> f64 {
        match &self.root {
            Some(r) => rat_to_f64(r),
            None => rat_to_f64(&self.theta_sq).sqrt(),
        }
    }
}

/// Exact number `r + s·θ`.
#[derive(Clone)]
pub struct QExt {
    r: Rat,
    s: Rat,
    ctx: Theta,
}

impl QExt {
    /// Builds `r + s·θ`, folding `s` into `r` in a collapsed context.
    pub fn new(r: Rat, s: Rat, ctx: &Theta) -> QExt {
        match &ctx.root {
            Some(root) if !s.is_zero() => QExt {
                r: r + s * root,
                s: Rat::zero(),
                ctx: ctx.clone(),
            },
            _ => QExt {
                r,
                s,
                ctx: ctx.clone(),
            },
        }
    }

    pub fn from_rat(r: Rat, ctx: &Theta) -> QExt {
        QExt {
            r,
            s: Rat::zero(),
            ctx: ctx.clone(),
        }
    }

    pub fn from_int(n: i64, ctx: &Theta) -> QExt {
        QExt::from_rat(rat_int(n), ctx)
    }

    pub fn zero(ctx: &Theta) -> QExt {
        QExt::from_rat(Rat::zero(), ctx)
    }

    pub fn one(ctx: &Theta) -> QExt {
        QExt::from_rat(Rat::one(), ctx)
    }

    /// The generator `θ` itself.
    pub fn theta(ctx: &Theta) -> QExt {
        QExt::new(Rat::zero(), Rat::one(), ctx)
    }

    pub fn r(&self) -> &Rat {
        &self.r
    }

    pub fn s(&self) -> &Rat {
        &self.s
    }

    pub fn ctx(&self) -> &Theta {
        &self.ctx
    }

    pub fn theta_sq(&self) -> &Rat {
        &self.ctx.theta_sq
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.r.is_one() && self.s.is_zero()
    }

    /// The rational value, when the `θ` component vanishes.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.s.is_zero() {
            Some(&self.r)
        } else {
            None
        }
    }

    /// Re-applies the collapse rule; a no-op on values built through [`QExt::new`].
    pub fn normalized(&self) -> QExt {
        QExt::new(self.r.clone(), self.s.clone(), &self.ctx)
    }

    fn same_ctx(&self, other: &QExt) -> Result<(), ExactError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.theta_sq == other.ctx.theta_sq {
            Ok(())
        } else {
            Err(ExactError::ContextMismatch(
                fmt_rat(&self.ctx.theta_sq),
                fmt_rat(&other.ctx.theta_sq),
            ))
        }
    }

    pub fn checked_add(&self, other: &QExt) -> Result<QExt, ExactError> {
        self.same_ctx(other)?;
        Ok(QExt {
            r: &self.r + &other.r,
            s: &self.s + &other.s,
            ctx: self.ctx.clone(),
        })
    }

    pub fn checked_sub(&self, other: &QExt) -> Result<QExt, ExactError> {
        self.same_ctx(other)?;
        Ok(QExt {
            r: &self.r - &other.r,
            s: &self.s - &other.s,
            ctx: self.ctx.clone(),
        })
    }

    pub fn checked_mul(&self, other: &QExt) -> Result<QExt, ExactError> {
        self.same_ctx(other)?;
        if self.s.is_zero() && other.s.is_zero() {
            return Ok(QExt {
                r: &self.r * &other.r,
                s: Rat::zero(),
                ctx: self.ctx.clone(),
            });
        }
        let r = &self.r * &other.r + &self.s * &other.s * &self.ctx.theta_sq;
        let s = &self.r * &other.s + &other.r * &self.s;
        Ok(QExt {
            r,
            s,
            ctx: self.ctx.clone(),
        })
    }

    /// Multiplicative inverse by conjugate rationalization.
    pub fn inv(&self) -> Result<QExt, ExactError> {
        if self.s.is_zero() {
            if self.r.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            return Ok(QExt::from_rat(self.r.recip(), &self.ctx));
        }
        let norm = &self.r * &self.r - &self.s * &self.s * &self.ctx.theta_sq;
        if norm.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(QExt {
            r: &self.r / &norm,
            s: -(&self.s / &norm),
            ctx: self.ctx.clone(),
        })
    }

    pub fn checked_div(&self, other: &QExt) -> Result<QExt, ExactError> {
        self.same_ctx(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn scale(&self, k: &Rat) -> QExt {
        QExt {
            r: &self.r * k,
            s: &self.s * k,
            ctx: self.ctx.clone(),
        }
    }

    pub fn add_rat(&self, k: &Rat) -> QExt {
        QExt {
            r: &self.r + k,
            s: self.s.clone(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn pow(&self, k: usize) -> QExt {
        let mut acc = QExt::one(&self.ctx);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Sign of the real number `r + s·θ` with `θ > 0`: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sr = sign(&self.r);
        let ss = sign(&self.s);
        if ss == 0 {
            return sr;
        }
        if sr == 0 || sr == ss {
            return ss;
        }
        let r2 = &self.r * &self.r;
        let s2 = &self.s * &self.s * &self.ctx.theta_sq;
        if r2 > s2 {
            sr
        } else {
            ss
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.r) + rat_to_f64(&self.s) * self.ctx.theta_f64()
    }
}

fn sign(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for QExt {
    fn eq(&self, other: &QExt) -> bool {
        self.ctx.theta_sq == other.ctx.theta_sq && self.r == other.r && self.s == other.s
    }
}

impl Eq for QExt {}

impl fmt::Debug for QExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}θ)", self.r, self.s)
    }
}

impl fmt::Display for QExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            write!(f, "{}", self.r)
        } else if self.r.is_zero() {
            write!(f, "{}θ", self.s)
        } else {
            write!(f, "{} + {}θ", self.r, self.s)
        }
    }
}

impl Serialize for QExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QExt", 3)?;
        st.serialize_field("r", &fmt_rat(&self.r))?;
        st.serialize_field("s", &fmt_rat(&self.s))?;
        st.serialize_field("theta_sq", &fmt_rat(&self.ctx.theta_sq))?;
        st.end()
    }
}

// Operator forms panic on mismatched contexts; use the `checked_*` methods
// where the contexts are not known to agree.
impl Add for &QExt {
    type Output = QExt;
    fn add(self, rhs: &QExt) -> QExt {
        self.checked_add(rhs).expect("theta context mismatch")
    }
}

impl Sub for &QExt {
    type Output = QExt;
    fn sub(self, rhs: &QExt) -> QExt {
        self.checked_sub(rhs).expect("theta context mismatch")
    }
}

impl Mul for &QExt {
    type Output = QExt;
    fn mul(self, rhs: &QExt) -> QExt {
        self.checked_mul(rhs).expect("theta context mismatch")
    }
}

impl Neg for &QExt {
    type Output = QExt;
    fn neg(self) -> QExt {
        QExt {
            r: -&self.r,
            s: -&self.s,
            ctx: self.ctx.clone(),
        }
    }
}

impl Add for QExt {
    type Output = QExt;
    fn add(self, rhs: QExt) -> QExt {
        &self + &rhs
    }
}

impl Sub for QExt {
    type Output = QExt;
    fn sub(self, rhs: QExt) -> QExt {
        &self - &rhs
    }
}

impl Mul for QExt {
    type Output = QExt;
    fn mul(self, rhs: QExt) -> QExt {
        &self * &rhs
    }
}

impl Neg for QExt {
    type Output = QExt;
    fn neg(self) -> QExt {
        -&self
    }
}
