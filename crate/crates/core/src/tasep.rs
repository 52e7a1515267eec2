//! Totally asymmetric case `q = 0`: closed forms for `G_n(1)`, `F_n(1)` and
//! the resolvent generating functions. Here `θ = 1` and everything is
//! rational.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{QExt, Rat, ThetaCtx};
use crate::functionals::FunctionalError;
use crate::qspecial::{seq_f, seq_g, AwFamily, Mode, QSpecialError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TasepError {
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error(transparent)]
    QSpecial(#[from] QSpecialError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

/// Which functional a series belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Phi0,
    Phi1,
}

/// Truncated power series in `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub coeffs: Vec<Rat>,
    pub order: usize,
}

impl Series {
    pub fn new(mut coeffs: Vec<Rat>, order: usize) -> Series {
        coeffs.resize(order + 1, Rat::zero());
        Series { coeffs, order }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let order = self.order.min(o.order);
        let mut c = vec![Rat::zero(); order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                c[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        Series::new(c, order)
    }

    /// Multiplicative inverse; needs a non-zero constant term.
    pub fn inverse(&self) -> Option<Series> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return None;
        }
        let mut out = vec![c0.recip()];
        for n in 1..=self.order {
            let mut acc = Rat::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out.push(-acc / c0);
        }
        Some(Series::new(out, self.order))
    }
}

fn q0_family(p: &[Rat; 4]) -> AwFamily {
    let [a, b, c, d] = p.clone();
    AwFamily::new(a, b, c, d, Rat::zero()).expect("q = 0 is always admissible")
}

fn s4(p: &[Rat; 4]) -> Rat {
    &p[0] * &p[1] * &p[2] * &p[3]
}

fn distinct(p: &[Rat; 4]) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]))
}

fn one_q0() -> QExt {
    QExt::one(&ThetaCtx::for_q(&Rat::zero()).expect("θ = 1"))
}

/// `∏_{s ≠ r} (r − s)` for the `i`-th parameter.
fn vandermonde_factor(p: &[Rat; 4], i: usize) -> Rat {
    (0..4).filter(|&j| j != i).fold(Rat::one(), |acc, j| acc * (&p[i] - &p[j]))
}

/// `G_n(1) = φ₀[H_n(e + d)]` at `q = 0`, from the four-exponential closed
/// form. Coincident parameters fall back to the recursion.
pub fn tasep_g(n: usize, p: &[Rat; 4]) -> Result<Rat, TasepError> {
    let sing = s4(p);
    if sing.is_one() {
        return Err(TasepError::Regime("G_n needs abcd ≠ 1".into()));
    }
    if !distinct(p) {
        let fam = q0_family(p);
        let table = fam.phi0(0)?;
        let v = seq_g(Mode::Recursion, n, &one_q0(), &fam, &table)?;
        return Ok(v.as_rat().cloned().expect("θ = 1 at q = 0"));
    }
    // Each constant is the product of (1 − xy) over the pairs avoiding the
    // root, over its Vandermonde factor and (1 − abcd).
    let one = Rat::one();
    let mut acc = Rat::zero();
    for i in 0..4 {
        let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let mut num = one.clone();
        for x in 0..3 {
            for y in x + 1..3 {
                num *= &one - &p[others[x]] * &p[others[y]];
            }
        }
        let k = num / (vandermonde_factor(p, i) * (&one - &sing));
        acc += k * num_traits::pow(p[i].clone(), n + 3);
    }
    Ok(acc)
}

/// `F_n(1) = φ₁[H_n(e + d)]` at `q = 0` and `abcd = 1`.
pub fn tasep_f(n: usize, p: &[Rat; 4]) -> Result<Rat, TasepError> {
    if !s4(p).is_one() {
        return Err(TasepError::Regime("F_n needs abcd = 1".into()));
    }
    if !distinct(p) {
        let fam = q0_family(p);
        let table = fam.phi1(1)?;
        let v = seq_f(Mode::Recursion, n, &one_q0(), &fam, &table)?;
        return Ok(v.as_rat().cloned().expect("θ = 1 at q = 0"));
    }
    Ok((0..4).fold(Rat::zero(), |acc, i| {
        acc + num_traits::pow(p[i].clone(), n + 2) / vandermonde_factor(p, i)
    }))
}

/// Residuals of the linear relations among `G_0(1), …, G_{len−1}(1)`:
/// `(1−s₄)G_1 + (s₃−s₁)G_0`, `G_2 − s₁G_1 + (s₂−s₄)G_0`, and
/// `G_n − s₁G_{n−1} + s₂G_{n−2} − s₃G_{n−3} + s₄G_{n−4}` for `n ≥ 3`
/// (with `G_{−1} = 0`). All vanish in the non-singular case.
pub fn eqnt_residuals(g: &[Rat], p: &[Rat; 4]) -> Vec<Rat> {
    let one = Rat::one();
    let s = crate::qspecial::SymFuncs::new(
        &QExt::from_rat(p[0].clone(), one_q0().ctx()),
        &QExt::from_rat(p[1].clone(), one_q0().ctx()),
        &QExt::from_rat(p[2].clone(), one_q0().ctx()),
        &QExt::from_rat(p[3].clone(), one_q0().ctx()),
    );
    let r = |x: &QExt| x.as_rat().cloned().expect("θ = 1");
    let (s1, s2, s3, s4) = (r(&s.s1), r(&s.s2), r(&s.s3), r(&s.s4));
    let at = |k: isize| -> Rat {
        if k < 0 {
            Rat::zero()
        } else {
            g[k as usize].clone()
        }
    };
    let mut out = Vec::new();
    if g.len() > 1 {
        out.push((&one - &s4) * &g[1] + (&s3 - &s1) * &g[0]);
    }
    if g.len() > 2 {
        out.push(&g[2] - &s1 * &g[1] + (&s2 - &s4) * &g[0]);
    }
    for n in 3..g.len() as isize {
        out.push(at(n) - &s1 * at(n - 1) + &s2 * at(n - 2) - &s3 * at(n - 3) + &s4 * at(n - 4));
    }
    out
}

/// `1 / ∏_r (1 − r z)` to the given order.
fn inverse_quartic(p: &[Rat; 4], order: usize) -> Series {
    let mut den = Series::new(vec![Rat::one()], order);
    for r in p {
        den = den.mul(&Series::new(vec![Rat::one(), -r.clone()], order));
    }
    den.inverse().expect("constant term is 1")
}

/// Taylor coefficients of the resolvent `Σ_n φ[H_n(e+d)] z^n` from its
/// rational closed form.
///
/// For φ₀ (abcd ≠ 1) this is
/// `(1 + z s₄(s₁ − Σ1/r)/(1 − s₄) + z² s₄) / ∏(1 − rz)`; for φ₁ (abcd = 1)
/// it is `z / ∏(1 − rz)`.
pub fn resolvent_series(kind: SeriesKind, p: &[Rat; 4], order: usize) -> Result<Series, TasepError> {
    let sing = s4(p);
    let inv = inverse_quartic(p, order);
    match kind {
        SeriesKind::Phi0 => {
            if sing.is_one() {
                return Err(TasepError::Regime("phi0 series needs abcd ≠ 1".into()));
            }
            if p.iter().any(|r| r.is_zero()) {
                return Err(TasepError::Regime("closed form needs non-zero parameters".into()));
            }
            let s1: Rat = p.iter().fold(Rat::zero(), |a, r| a + r);
            let inv_sum: Rat = p.iter().fold(Rat::zero(), |a, r| a + r.recip());
            let lin = &sing * (s1 - inv_sum) / (Rat::one() - &sing);
            let num = Series::new(vec![Rat::one(), lin, sing], order);
            Ok(num.mul(&inv))
        }
        SeriesKind::Phi1 => {
            if !sing.is_one() {
                return Err(TasepError::Regime("phi1 series needs abcd = 1".into()));
            }
            Ok(Series::new(vec![Rat::zero(), Rat::one()], order).mul(&inv))
        }
    }
}

/// The φ₀ resolvent exactly as it is sometimes printed,
/// `1 + z² s₄ + z s₄(s₁ − Σ1/r)/∏(1 − rz)`. Kept only to show that it
/// disagrees with the moments.
pub fn resolvent_series_printed(p: &[Rat; 4], order: usize) -> Series {
    let sing = s4(p);
    let s1: Rat = p.iter().fold(Rat::zero(), |a, r| a + r);
    let inv_sum: Rat = p.iter().fold(Rat::zero(), |a, r| a + r.recip());
    let frac = Series::new(vec![Rat::zero(), &sing * (s1 - inv_sum)], order).mul(&inverse_quartic(p, order));
    let mut c = frac.coeffs.clone();
    c[0] += Rat::one();
    if order >= 2 {
        c[2] += sing;
    }
    Series::new(c, order)
}

/// Moments `φ[H_n(e+d)]`, `n = 0..=order`, computed from the functional
/// tables.
pub fn moment_series(kind: SeriesKind, p: &[Rat; 4], order: usize) -> Result<Series, TasepError> {
    let fam = q0_family(p);
    let one = one_q0();
    let vals: Result<Vec<Rat>, TasepError> = match kind {
        SeriesKind::Phi0 => {
            if fam.singular_index().is_some() {
                return Err(TasepError::Regime("phi0 moments need abcd ≠ 1".into()));
            }
            let table = fam.phi0(order)?;
            (0..=order)
                .map(|n| Ok(seq_g(Mode::Definition, n, &one, &fam, &table)?.as_rat().cloned().expect("θ = 1")))
                .collect()
        }
        SeriesKind::Phi1 => {
            if fam.singular_index() != Some(0) {
                return Err(TasepError::Regime("phi1 moments need abcd = 1".into()));
            }
            let table = fam.phi1(order.max(1))?;
            (0..=order)
                .map(|n| Ok(seq_f(Mode::Definition, n, &one, &fam, &table)?.as_rat().cloned().expect("θ = 1")))
                .collect()
        }
    };
    Ok(Series::new(vals?, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn nonsing() -> [Rat; 4] {
        [rat(1, 2), rat(-1, 3), rat(1, 3), rat(-1, 4)]
    }

    fn sing() -> [Rat; 4] {
        [rat(2, 1), rat(-1, 2), rat(3, 1), rat(-1, 3)]
    }

    #[test]
    fn g_closed_form_small() {
        let p = nonsing();
        assert!(tasep_g(0, &p).unwrap().is_one());
        let [a, b, c, d] = p.clone();
        let one = Rat::one();
        let g1 = ((&c + &d) * (&one - &a * &b) + (&a + &b) * (&one - &c * &d)) / (&one - &a * &b * &c * &d);
        assert_eq!(tasep_g(1, &p).unwrap(), g1);
    }

    #[test]
    fn g_closed_form_matches_table() {
        let p = nonsing();
        let m = moment_series(SeriesKind::Phi0, &p, 12).unwrap();
        for n in 0..=12 {
            assert_eq!(tasep_g(n, &p).unwrap(), m.coeffs[n], "n = {n}");
        }
        let g: Vec<Rat> = m.coeffs.clone();
        assert!(eqnt_residuals(&g, &p).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn coincident_parameters_fall_back() {
        let p = [rat(1, 2), rat(-1, 3), rat(1, 2), rat(-1, 4)];
        let m = moment_series(SeriesKind::Phi0, &p, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(tasep_g(n, &p).unwrap(), m.coeffs[n]);
        }
    }

    #[test]
    fn f_closed_form() {
        let p = sing();
        assert!(tasep_f(0, &p).unwrap().is_zero());
        assert!(tasep_f(1, &p).unwrap().is_one());
        let m = moment_series(SeriesKind::Phi1, &p, 12).unwrap();
        for n in 0..=12 {
            assert_eq!(tasep_f(n, &p).unwrap(), m.coeffs[n], "n = {n}");
        }
        assert!(tasep_f(2, &nonsing()).is_err());
    }

    #[test]
    fn resolvents() {
        let p = nonsing();
        let closed = resolvent_series(SeriesKind::Phi0, &p, 12).unwrap();
        assert!(closed.coeffs[0].is_one());
        assert_eq!(closed, moment_series(SeriesKind::Phi0, &p, 12).unwrap());
        assert_ne!(resolvent_series_printed(&p, 12), closed);
        let s = sing();
        let closed = resolvent_series(SeriesKind::Phi1, &s, 12).unwrap();
        assert!(closed.coeffs[0].is_zero());
        assert_eq!(closed, moment_series(SeriesKind::Phi1, &s, 12).unwrap());
        assert!(resolvent_series(SeriesKind::Phi1, &p, 4).is_err());
    }

    #[test]
    fn series_inverse_roundtrip() {
        let s = Series::new(vec![rat(2, 1), rat(-1, 3), rat(5, 7)], 8);
        let prod = s.mul(&s.inverse().unwrap());
        assert!(prod.coeffs[0].is_one());
        assert!(prod.coeffs[1..].iter().all(|c| c.is_zero()));
    }
}
