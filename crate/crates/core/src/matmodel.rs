//! Infinite-matrix representation of the algebra: a lower-bidiagonal `E`, a
//! diagonal `D` and boundary vectors `⟨W|`, `|V⟩`. Float evaluation for the
//! general case, exact rationals when `acq^m = 1` makes the model finite.
//!
//! Vectors are stored in a gauge: `ŵ_k = w_k/G_k`, `v̂_k = v_k G_k` with
//! `G_k = (−a)^{−(k−1)} q^{−(k−1)(k−2)/2}`, so `ŵ_k = (ac,ad;q)_{k−1}` and
//! `v̂_k = q^{k−1}/(q,qa/b;q)_{k−1}` stay bounded. Matrices are conjugated
//! accordingly. Products are always associated left to right:
//! `((⟨W|M₁)M₂)…|V⟩`.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, Gen, Word};
use crate::exact::{qpow, QExt, Rat, ThetaCtx};
use crate::functionals::{build_phi0_aw, FunctionalError};
use crate::qspecial::qpochhammer_rat;

pub const POCH_TOL: f64 = 1e-16;
pub const POCH_CAP: usize = 10_000;
pub const TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("b = 0 makes |V⟩ degenerate; the model needs b < 0")]
    DegenerateB,
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("no m ≤ {0} with acq^m = 1")]
    NotFinite(usize),
    #[error("vanishing normalizer (bd ∈ {{q,…,q^m}}): relation to φ₀ not available")]
    VanishingNormalizer,
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

/// `(x;q)_∞`, multiplying factors until they are within [`POCH_TOL`] of one.
pub fn qpoch_inf(x: f64, q: f64) -> f64 {
    let mut acc = 1.0;
    let mut qk = 1.0;
    for _ in 0..POCH_CAP {
        let f = 1.0 - x * qk;
        acc *= f;
        if (1.0 - f).abs() < POCH_TOL {
            break;
        }
        qk *= q;
    }
    acc
}

/// Terminating or convergent `₂φ₁(x, y; z; q, s)` summed until the terms
/// fall below `1e−17` relative to the sum.
pub fn phi21_f64(x: f64, y: f64, z: f64, q: f64, s: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    let mut qk = 1.0;
    for _ in 0..POCH_CAP {
        term *= (1.0 - x * qk) * (1.0 - y * qk) / ((1.0 - q * qk) * (1.0 - z * qk)) * s;
        acc += term;
        if term.abs() <= 1e-17 * acc.abs() {
            break;
        }
        qk *= q;
    }
    acc
}

/// Float model truncated to `trunc` rows and columns.
#[derive(Debug, Clone, Serialize)]
pub struct MatModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub q: f64,
    pub trunc: usize,
    theta: f64,
    /// `ŵ_1..ŵ_{trunc+1}`; the extra entry is used only by the gap.
    w_hat: Vec<f64>,
    /// `v̂_1..v̂_trunc`.
    v_hat: Vec<f64>,
}

impl MatModel {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `a q^{k−1}` for 1-based `k`.
    fn aqk(&self, k: usize) -> f64 {
        self.a * self.q.powi(k as i32 - 1)
    }

    /// `G_{k+1}/G_k = −q^{−(k−1)}/a`.
    fn gauge_step(&self, k: usize) -> f64 {
        -1.0 / self.aqk(k)
    }

    /// Ungauged `w_n` (may overflow for large `n`).
    pub fn w(&self, n: usize) -> f64 {
        let k = n as i32 - 1;
        self.w_hat[n - 1] / ((-self.a).powi(k) * self.q.powf((k * (k - 1)) as f64 / 2.0))
    }

    /// Ungauged `v_n` (may underflow for large `n`).
    pub fn v(&self, n: usize) -> f64 {
        let k = n as i32 - 1;
        self.v_hat[n - 1] * (-self.a).powi(k) * self.q.powf((k * (k - 1)) as f64 / 2.0)
    }

    /// Applies a generator to a gauged row vector from the right.
    fn apply(&self, u: &[f64], g: Gen) -> Vec<f64> {
        let t2 = self.theta * self.theta;
        let n = u.len();
        (0..n)
            .map(|j| {
                let k = j + 1;
                let next = if j + 1 < n { u[j + 1] * self.gauge_step(k) } else { 0.0 };
                match g {
                    Gen::I => u[j],
                    Gen::D => u[j] * t2 * (1.0 + self.aqk(k)),
                    Gen::Dd => u[j] * self.theta * self.aqk(k),
                    Gen::E => t2 * (u[j] * (1.0 + 1.0 / self.aqk(k)) + next),
                    Gen::Ee => self.theta * (u[j] / self.aqk(k) + next),
                }
            })
            .collect()
    }

    /// `⟨W|X|V⟩` associated left to right. Fails if the last terms of the
    /// final sum are not negligible.
    pub fn wxv(&self, word: &Word) -> Result<f64, MatError> {
        let mut u: Vec<f64> = self.w_hat[..self.trunc].to_vec();
        for &g in &word.letters {
            u = self.apply(&u, g);
        }
        let terms: Vec<f64> = u.iter().zip(&self.v_hat).map(|(x, y)| x * y).collect();
        let sum: f64 = terms.iter().sum();
        let tail = terms[terms.len().saturating_sub(3)..]
            .iter()
            .fold(0.0f64, |m, t| m.max(t.abs()));
        if !sum.is_finite() || tail > TAIL_TOL * sum.abs().max(1.0) {
            return Err(MatError::Truncation(format!(
                "tail term {tail:e} against sum {sum:e} at trunc {}",
                self.trunc
            )));
        }
        Ok(sum)
    }

    /// Largest entrywise residual of `DE − qED − D − E` on the top-left
    /// `(trunc−1)` block, relative to the size of the entries of `D + E`.
    pub fn relation_residual(&self) -> f64 {
        let t2 = self.theta * self.theta;
        let mut worst = 0.0f64;
        for k in 1..self.trunc {
            let x = self.aqk(k);
            let dk = t2 * (1.0 + x);
            let ek = t2 * (1.0 + 1.0 / x);
            let diag = dk * ek - self.q * ek * dk - dk - ek;
            worst = worst.max(diag.abs() / (dk + ek).abs().max(1.0));
            if k + 1 < self.trunc {
                // Subdiagonal (k+1, k) in ungauged form: E has θ² there.
                let dk1 = t2 * (1.0 + self.aqk(k + 1));
                let sub = dk1 * t2 - self.q * t2 * dk - t2;
                worst = worst.max(sub.abs() / t2);
            }
        }
        worst
    }

    /// Residuals of `⟨W|e = θ(c+d)⟨W| − cd⟨W|d` and
    /// `ab e|V⟩ = θ(a+b)|V⟩ − d|V⟩` on the first `trunc−1` components,
    /// relative to the largest term in each equation.
    pub fn boundary_residual(&self) -> f64 {
        let th = self.theta;
        let mut worst = 0.0f64;
        for j in 0..self.trunc - 1 {
            let k = j + 1;
            // Gauged ⟨W|e at column k.
            let t1 = self.w_hat[j] / self.aqk(k);
            let t2 = self.w_hat[j + 1] * self.gauge_step(k);
            let we = th * (t1 + t2);
            let rhs = th * (self.c + self.d) * self.w_hat[j] - self.c * self.d * th * self.aqk(k) * self.w_hat[j];
            let scale = th * t1.abs().max(t2.abs()).max(self.w_hat[j].abs()).max(1e-300);
            worst = worst.max((we - rhs).abs() / scale);
            // Gauged e|V⟩ at row k.
            let prev = if j == 0 {
                0.0
            } else {
                self.v_hat[j - 1] * self.gauge_step(k - 1)
            };
            let t1 = self.v_hat[j] / self.aqk(k);
            let lhs = self.a * self.b * th * (prev + t1);
            let rhs = th * (self.a + self.b) * self.v_hat[j] - th * self.aqk(k) * self.v_hat[j];
            let scale = (self.a * self.b * th).abs() * prev.abs().max(t1.abs()).max(self.v_hat[j].abs()).max(1e-300);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        worst
    }
}

/// Builds the float model.
pub fn build_model(a: f64, b: f64, c: f64, d: f64, q: f64, trunc: usize) -> Result<MatModel, MatError> {
    if b == 0.0 {
        return Err(MatError::DegenerateB);
    }
    if !(a > 0.0) || !(b < 0.0) {
        return Err(MatError::Params("need a > 0 and b < 0".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(MatError::Params("need 0 < q < 1".into()));
    }
    if trunc < 2 {
        return Err(MatError::Truncation("trunc must be at least 2".into()));
    }
    let mut w_hat = Vec::with_capacity(trunc + 1);
    let mut v_hat = Vec::with_capacity(trunc);
    let (mut w, mut v) = (1.0f64, 1.0f64);
    let mut qk = 1.0;
    for _ in 0..=trunc {
        w_hat.push(w);
        v_hat.push(v);
        w *= (1.0 - a * c * qk) * (1.0 - a * d * qk);
        v *= q / ((1.0 - q * qk) * (1.0 - q * a / b * qk));
        qk *= q;
    }
    v_hat.truncate(trunc);
    Ok(MatModel {
        a,
        b,
        c,
        d,
        q,
        trunc,
        theta: 1.0 / (1.0 - q).sqrt(),
        w_hat,
        v_hat,
    })
}

/// Both association orders of `⟨W|e|V⟩` and the predicted difference.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    /// `(⟨W|e)|V⟩`
    pub left: f64,
    /// `⟨W|(e|V⟩)`
    pub right: f64,
    pub measured: f64,
    /// `−(θ/a)(ac,ad;q)_∞/(q,qa/b;q)_∞`
    pub predicted: f64,
    pub rel_err: f64,
}

/// Measures `⟨W̃|V⟩ − ⟨W|Ṽ⟩` with `⟨W̃| = ⟨W|e` and `|Ṽ⟩ = e|V⟩` formed
/// from the untruncated matrices, each summed over the first `trunc`
/// components.
pub fn associativity_gap(m: &MatModel) -> GapReport {
    let th = m.theta;
    let (mut left, mut right) = (0.0, 0.0);
    for j in 0..m.trunc {
        let k = j + 1;
        let inv = 1.0 / m.aqk(k);
        // w_k/(aq^{k−1}) v_k + w_{k+1} v_k, grouped so the O(1) parts cancel.
        left += th * m.v_hat[j] * (m.w_hat[j] * inv + m.w_hat[j + 1] * m.gauge_step(k));
        let prev = if j == 0 { 0.0 } else { m.v_hat[j - 1] * m.gauge_step(k - 1) };
        right += th * m.w_hat[j] * (prev + m.v_hat[j] * inv);
    }
    let measured = left - right;
    let predicted = -(th / m.a) * qpoch_inf(m.a * m.c, m.q) * qpoch_inf(m.a * m.d, m.q)
        / (qpoch_inf(m.q, m.q) * qpoch_inf(m.q * m.a / m.b, m.q));
    let rel_err = if predicted == 0.0 {
        measured.abs()
    } else {
        ((measured - predicted) / predicted).abs()
    };
    GapReport {
        left,
        right,
        measured,
        predicted,
        rel_err,
    }
}

/// Exact model when `acq^m = 1`: only the first `m + 1` components of
/// `⟨W|` are non-zero.
#[derive(Debug, Clone)]
pub struct FiniteModel {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
    pub q: Rat,
    pub m: usize,
    pub size: usize,
    theta_sq: Rat,
    w: Vec<Rat>,
    v: Vec<Rat>,
}

/// Builds the exact model at its natural size `m + 1`.
pub fn build_finite(a: Rat, b: Rat, c: Rat, d: Rat, q: Rat) -> Result<FiniteModel, MatError> {
    build_finite_sized(a, b, c, d, q, None)
}

/// As [`build_finite`] with an explicit matrix size `≥ m + 1`.
pub fn build_finite_sized(
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
    q: Rat,
    size: Option<usize>,
) -> Result<FiniteModel, MatError> {
    if b.is_zero() {
        return Err(MatError::DegenerateB);
    }
    if a.is_zero() || q.is_zero() || q >= Rat::one() || q < Rat::zero() {
        return Err(MatError::Params("need a ≠ 0 and 0 < q < 1".into()));
    }
    const CAP: usize = 64;
    let ac = &a * &c;
    let m = (0..=CAP)
        .find(|&m| (&ac * qpow(&q, m)).is_one())
        .ok_or(MatError::NotFinite(CAP))?;
    let size = size.unwrap_or(m + 1);
    if size < m + 1 {
        return Err(MatError::Truncation(format!("size must be at least m + 1 = {}", m + 1)));
    }
    let ad = &a * &d;
    let qab = &q * &a / &b;
    let mut w = Vec::with_capacity(size);
    let mut v = Vec::with_capacity(size);
    for n in 1..=size {
        let k = n - 1;
        let neg_a_k = num_traits::pow(-a.clone(), k);
        let qk2 = qpow(&q, k * k.saturating_sub(1) / 2);
        w.push(qpochhammer_rat(&ac, &q, k) * qpochhammer_rat(&ad, &q, k) / (&neg_a_k * &qk2));
        let den = qpochhammer_rat(&q, &q, k) * qpochhammer_rat(&qab, &q, k);
        if den.is_zero() {
            return Err(MatError::Params("(q, qa/b; q) vanishes".into()));
        }
        v.push(neg_a_k * qpow(&q, n * k / 2) / den);
    }
    let theta_sq = (Rat::one() - &q).recip();
    Ok(FiniteModel {
        a,
        b,
        c,
        d,
        q,
        m,
        size,
        theta_sq,
        w,
        v,
    })
}

impl FiniteModel {
    pub fn w(&self) -> &[Rat] {
        &self.w
    }

    pub fn v(&self) -> &[Rat] {
        &self.v
    }

    fn aqk(&self, k: usize) -> Rat {
        &self.a * qpow(&self.q, k - 1)
    }

    /// Applies `D` or `E` (or `I`) to a row vector from the right. The
    /// shifted generators carry a bare `θ` and are not available here.
    fn apply(&self, u: &[Rat], g: Gen) -> Result<Vec<Rat>, MatError> {
        let n = u.len();
        let t2 = &self.theta_sq;
        (0..n)
            .map(|j| {
                let k = j + 1;
                let next = if j + 1 < n { u[j + 1].clone() } else { Rat::zero() };
                match g {
                    Gen::I => Ok(u[j].clone()),
                    Gen::D => Ok(&u[j] * t2 * (Rat::one() + self.aqk(k))),
                    Gen::E => Ok(t2 * (&u[j] * (Rat::one() + self.aqk(k).recip()) + next)),
                    Gen::Dd | Gen::Ee => Err(MatError::Params(
                        "exact mode evaluates words in D, E and I".into(),
                    )),
                }
            })
            .collect()
    }

    /// `⟨W|X|V⟩`, exact.
    pub fn wxv(&self, word: &Word) -> Result<Rat, MatError> {
        let mut u = self.w.clone();
        for &g in &word.letters {
            u = self.apply(&u, g)?;
        }
        Ok(u.iter().zip(&self.v).fold(Rat::zero(), |acc, (x, y)| acc + x * y))
    }

    /// `DE − qED = D + E` on the whole finite block.
    pub fn relation_holds(&self) -> bool {
        let t2 = &self.theta_sq;
        (1..=self.size).all(|k| {
            let dk = t2 * (Rat::one() + self.aqk(k));
            let ek = t2 * (Rat::one() + self.aqk(k).recip());
            let diag = &dk * &ek - &self.q * &ek * &dk - &dk - &ek;
            let sub_ok = if k < self.size {
                let dk1 = t2 * (Rat::one() + self.aqk(k + 1));
                (&dk1 * t2 - &self.q * t2 * &dk - t2).is_zero()
            } else {
                true
            };
            diag.is_zero() && sub_ok
        })
    }

    /// `(bd q^{−m};q)_m / (bc;q)_m`.
    pub fn normalizer(&self) -> Rat {
        let bd = &self.b * &self.d / qpow(&self.q, self.m);
        let bc = &self.b * &self.c;
        let den = qpochhammer_rat(&bc, &self.q, self.m);
        qpochhammer_rat(&bd, &self.q, self.m) / den
    }

    /// Checks `⟨W|X|V⟩ = normalizer · φ₀[X]` for each word, with φ₀ built
    /// from the same Askey-Wilson parameters.
    pub fn check_words(&self, words: &[Word]) -> Result<Vec<bool>, MatError> {
        let norm = self.normalizer();
        if norm.is_zero() {
            return Err(MatError::VanishingNormalizer);
        }
        let ctx = ThetaCtx::for_q(&self.q).map_err(|e| MatError::Params(e.to_string()))?;
        let params = [&self.a, &self.b, &self.c, &self.d].map(|r| QExt::from_rat(r.clone(), &ctx));
        let deg = words.iter().map(|w| w.len()).max().unwrap_or(0);
        let table = build_phi0_aw([&params[0], &params[1], &params[2], &params[3]], &self.q, &ctx, deg)?;
        let alg = Algebra::new(&self.q, &ctx);
        words
            .iter()
            .map(|w| {
                let lhs = QExt::from_rat(self.wxv(w)?, &ctx);
                let rhs = table.eval(&alg.de_substitute(w))?.scale(&norm);
                Ok(lhs == rhs)
            })
            .collect()
    }
}

/// All words over `{D, E}` of length `1..=max_len`, plus the empty word.
pub fn words_up_to(max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for w in &layer {
            for g in [Gen::D, Gen::E] {
                let mut letters = w.letters.clone();
                letters.push(g);
                next.push(Word::new(letters));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn generic() -> MatModel {
        build_model(0.5, -1.0 / 3.0, 0.5, -0.25, 0.5, 500).unwrap()
    }

    fn finite(m: u32) -> FiniteModel {
        build_finite(rat(2, 1), rat(-1, 3), rat(2i64.pow(m), 2), rat(-1, 5), rat(1, 2)).unwrap()
    }

    #[test]
    fn first_components() {
        let (a, b, c, d, q) = (0.5, -1.0 / 3.0, 0.5, -0.25, 0.5);
        let m = build_model(a, b, c, d, q, 10).unwrap();
        assert!((m.w(2) - (c + d - a * c * d - 1.0 / a)).abs() < 1e-14);
        let v2 = a * b / (a * (1.0 - q) + b * (1.0 - 1.0 / q));
        assert!((m.v(2) - v2).abs() < 1e-14);
        assert_eq!(m.w(1), 1.0);
        assert_eq!(m.v(1), 1.0);
    }

    #[test]
    fn identity_and_d_powers() {
        let m = generic();
        let (a, c, d, q, b) = (m.a, m.c, m.d, m.q, m.b);
        let want = phi21_f64(a * c, a * d, q * a / b, q, q);
        let got = m.wxv(&Word::empty()).unwrap();
        assert!(((got - want) / want).abs() < 1e-12);
        for l in 1..=3 {
            let word = Word::new(vec![Gen::Dd; l]);
            let want = (a * m.theta()).powi(l as i32) * phi21_f64(a * c, a * d, q * a / b, q, q.powi(l as i32 + 1));
            let got = m.wxv(&word).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "L = {l}");
        }
    }

    #[test]
    fn relations_hold_numerically() {
        let m = generic();
        assert!(m.relation_residual() < 1e-12);
        assert!(m.boundary_residual() < 1e-12);
    }

    #[test]
    fn gap_matches_prediction() {
        let r = associativity_gap(&generic());
        assert!(r.rel_err < 1e-6, "{r:?}");
        assert!(r.measured < 0.0);
    }

    #[test]
    fn gap_vanishes_when_terminating() {
        // ac q^2 = 1 with q = 1/2.
        let m = build_model(2.0, -1.0 / 3.0, 2.0, -0.2, 0.5, 60).unwrap();
        let r = associativity_gap(&m);
        assert!(r.measured.abs() <= 1e-12, "{r:?}");
        assert!(r.predicted.abs() <= 1e-12);
    }

    #[test]
    fn degenerate_b() {
        assert_eq!(build_model(0.5, 0.0, 0.5, -0.25, 0.5, 10).unwrap_err(), MatError::DegenerateB);
    }

    #[test]
    fn finite_model_terminates() {
        let f = finite(2);
        assert_eq!(f.m, 2);
        let big = build_finite_sized(f.a.clone(), f.b.clone(), f.c.clone(), f.d.clone(), f.q.clone(), Some(6)).unwrap();
        for n in f.m + 2..=6 {
            assert!(big.w()[n - 1].is_zero());
        }
        for w in words_up_to(3) {
            assert_eq!(f.wxv(&w).unwrap(), big.wxv(&w).unwrap());
        }
        assert!(f.relation_holds());
    }

    #[test]
    fn finite_normalizer_and_words() {
        for m in 0..=2 {
            let f = finite(m);
            assert_eq!(f.wxv(&Word::empty()).unwrap(), f.normalizer());
            let ok = f.check_words(&words_up_to(3)).unwrap();
            assert!(ok.iter().all(|&b| b), "m = {m}");
        }
    }
}
