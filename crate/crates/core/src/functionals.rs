//! Layer-by-layer construction of the invariant functionals φ₀ and φ₁ on the
//! normal-order basis `e^m d^n`.
//!
//! Two coefficient forms are supported: the rate form in `(α, β, γ, δ)` and the
//! Askey-Wilson form in `(a, b, c, d)`. The latter also accepts quadruples that
//! do not come from valid rates (for example the rescaled `(at, bt, c/t, d/t)`).

use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::NPoly;
use crate::asep::AsepParams;
use crate::exact::{qint, qpow, QExt, Rat, Theta};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionalError {
    #[error("requested degree {requested} exceeds the available domain (max degree {available})")]
    DomainExceeded { requested: usize, available: usize },
    #[error("regime error: {0}")]
    Regime(String),
    #[error("zero denominator at layer {0}: regime misclassified")]
    MisclassifiedRegime(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// φ₀ in the singular case, defined on degrees `≤ N`.
    Phi0Singular(usize),
    Phi0NonSingular,
    /// φ₁, zero on degrees `≤ N`.
    Phi1(usize),
}

impl Regime {
    pub fn singular_index(&self) -> Option<usize> {
        match self {
            Regime::Phi0Singular(n) | Regime::Phi1(n) => Some(*n),
            Regime::Phi0NonSingular => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Phi0Singular(_) => "phi0-singular",
            Regime::Phi0NonSingular => "phi0-nonsingular",
            Regime::Phi1(_) => "phi1",
        }
    }
}

#[derive(Debug, Clone)]
enum Coeffs {
    Rates {
        alpha: QExt,
        beta: QExt,
        gamma: QExt,
        delta: QExt,
        /// `Δ(γ−α)` and `Δ(δ−β)` with `Δ(x) = θ^{-1} + θx`.
        d_ga: QExt,
        d_db: QExt,
    },
    Aw {
        a: QExt,
        b: QExt,
        c: QExt,
        d: QExt,
    },
}

/// Memoized values `φ[e^m d^n]` for `m + n ≤ max_degree`.
#[derive(Debug, Clone)]
pub struct PhiTable {
    regime: Regime,
    values: Vec<Vec<QExt>>,
    max_degree: usize,
    q: Rat,
    ctx: Theta,
    coeffs: Coeffs,
}

/// `Δ(x) = θ^{-1} + θx = (1 − q + x)θ`.
fn big_delta(x: &Rat, q: &Rat, ctx: &Theta) -> QExt {
    QExt::new(Rat::zero(), Rat::one() - q + x, ctx)
}

impl PhiTable {
    fn empty(regime: Regime, q: &Rat, ctx: &Theta, coeffs: Coeffs) -> PhiTable {
        PhiTable {
            regime,
            values: Vec::new(),
            max_degree: 0,
            q: q.clone(),
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn ctx(&self) -> &Theta {
        &self.ctx
    }

    /// `φ[e^m d^n]`, or `None` outside the table.
    pub fn get(&self, m: usize, n: usize) -> Option<&QExt> {
        if m + n > self.max_degree {
            return None;
        }
        Some(&self.values[m][n])
    }

    fn at(&self, m: isize, n: isize) -> QExt {
        if m < 0 || n < 0 {
            return QExt::zero(&self.ctx);
        }
        self.values[m as usize][n as usize].clone()
    }

    fn set(&mut self, m: usize, n: usize, v: QExt) {
        while self.values.len() <= m {
            self.values.push(Vec::new());
        }
        let row = &mut self.values[m];
        while row.len() <= n {
            row.push(QExt::zero(&self.ctx));
        }
        row[n] = v;
    }

    fn qx(&self, r: Rat) -> QExt {
        QExt::from_rat(r, &self.ctx)
    }

    /// Denominator shared by both recursion steps out of layer `k`.
    fn denominator(&self, k: usize) -> QExt {
        let qk = qpow(&self.q, k);
        match &self.coeffs {
            Coeffs::Rates {
                alpha,
                beta,
                gamma,
                delta,
                ..
            } => {
                let gd = gamma * delta;
                match self.regime.singular_index() {
                    Some(n) => gd.scale(&(qpow(&self.q, n) - qk)),
                    None => &(alpha * beta) - &gd.scale(&qk),
                }
            }
            Coeffs::Aw { a, b, c, d } => {
                let s4 = &(a * b) * &(c * d);
                &QExt::one(&self.ctx) - &s4.scale(&qk)
            }
        }
    }

    /// Numerator of the step `(m, n) → (m+1, n)`.
    fn num_a(&self, m: usize, n: usize) -> QExt {
        let (mi, ni) = (m as isize, n as isize);
        let qm = qpow(&self.q, m);
        let p = self.at(mi, ni);
        let pm = self.at(mi - 1, ni);
        let pn = self.at(mi, ni - 1);
        match &self.coeffs {
            Coeffs::Rates {
                beta,
                gamma,
                delta,
                d_ga,
                d_db,
                ..
            } => {
                let lead = &(beta * d_ga) + &(gamma * d_db).scale(&qm);
                let mut acc = &lead * &p;
                if n > 0 {
                    acc = &acc + &(&(gamma * delta) * &pn).scale(&(qint(&self.q, n) * &qm));
                }
                if m > 0 {
                    acc = &acc + &(&(beta * gamma) * &pm).scale(&qint(&self.q, m));
                }
                acc
            }
            Coeffs::Aw { a, b, c, d } => {
                let cd = c * d;
                let s4 = &(a * b) * &cd;
                let th = QExt::theta(&self.ctx);
                let lead = &th * &(&(c + d) - &(&cd * &(a + b)).scale(&qm));
                let mut acc = &lead * &p;
                if m > 0 {
                    acc = &acc - &(&cd * &pm).scale(&qint(&self.q, m));
                }
                if n > 0 {
                    acc = &acc + &(&s4 * &pn).scale(&(&qm * qint(&self.q, n)));
                }
                acc
            }
        }
    }

    /// Numerator of the step `(m, n) → (m, n+1)`.
    fn num_b(&self, m: usize, n: usize) -> QExt {
        let (mi, ni) = (m as isize, n as isize);
        let qn = qpow(&self.q, n);
        let p = self.at(mi, ni);
        let pm = self.at(mi - 1, ni);
        let pn = self.at(mi, ni - 1);
        match &self.coeffs {
            Coeffs::Rates {
                alpha,
                gamma,
                delta,
                d_ga,
                d_db,
                ..
            } => {
                let lead = &(alpha * d_db) + &(delta * d_ga).scale(&qn);
                let mut acc = &lead * &p;
                if n > 0 {
                    acc = &acc + &(&(alpha * delta) * &pn).scale(&qint(&self.q, n));
                }
                if m > 0 {
                    acc = &acc + &(&(gamma * delta) * &pm).scale(&(&qn * qint(&self.q, m)));
                }
                acc
            }
            Coeffs::Aw { a, b, c, d } => {
                let ab = a * b;
                let s4 = &ab * &(c * d);
                let th = QExt::theta(&self.ctx);
                let lead = &th * &(&(a + b) - &(&ab * &(c + d)).scale(&qn));
                let mut acc = &lead * &p;
                if n > 0 {
                    acc = &acc - &(&ab * &pn).scale(&qint(&self.q, n));
                }
                if m > 0 {
                    acc = &acc + &(&s4 * &pm).scale(&(&qn * qint(&self.q, m)));
                }
                acc
            }
        }
    }

    fn step_a(&self, m: usize, n: usize) -> Result<QExt, FunctionalError> {
        let den = self.denominator(m + n);
        let inv = den
            .inv()
            .map_err(|_| FunctionalError::MisclassifiedRegime(m + n))?;
        Ok(&self.num_a(m, n) * &inv)
    }

    fn step_b(&self, m: usize, n: usize) -> Result<QExt, FunctionalError> {
        let den = self.denominator(m + n);
        let inv = den
            .inv()
            .map_err(|_| FunctionalError::MisclassifiedRegime(m + n))?;
        Ok(&self.num_b(m, n) * &inv)
    }

    /// Fills layers `from+1 ..= to` from layer `from`.
    fn extend(&mut self, from: usize, to: usize) -> Result<(), FunctionalError> {
        for k in from..to {
            let inv = self
                .denominator(k)
                .inv()
                .map_err(|_| FunctionalError::MisclassifiedRegime(k))?;
            let mut layer = Vec::with_capacity(k + 2);
            for m in 0..=k {
                layer.push((m + 1, k - m, &self.num_a(m, k - m) * &inv));
            }
            layer.push((0, k + 1, &self.num_b(0, k) * &inv));
            for (m, n, v) in layer {
                self.set(m, n, v);
            }
            self.max_degree = k + 1;
            debug_assert!(
                (1..=k).all(|m| self.step_b(m, k - m).ok().as_ref() == self.get(m, k + 1 - m)),
                "recursion is path dependent at layer {}",
                k + 1
            );
        }
        Ok(())
    }

    /// First layer produced by the recursion (layers below it are initial data).
    fn first_recursive_layer(&self) -> usize {
        match self.regime {
            Regime::Phi1(n) => n + 2,
            _ => 1,
        }
    }

    /// Linear extension to a normal-order polynomial.
    pub fn eval(&self, p: &NPoly) -> Result<QExt, FunctionalError> {
        if !p.is_zero() && p.degree() > self.max_degree {
            return Err(FunctionalError::DomainExceeded {
                requested: p.degree(),
                available: self.max_degree,
            });
        }
        let mut acc = QExt::zero(&self.ctx);
        for (&(m, n), c) in p.terms() {
            acc = &acc + &(c * &self.values[m][n]);
        }
        Ok(acc)
    }

    /// Checks that every value reachable by both recursion steps agrees:
    /// the `(m+1, n)` step from `(m, n)` and the `(m, n+1)` step from
    /// `(m+1, n−1)` give the same result.
    pub fn check_consistency(&self) -> bool {
        for layer in self.first_recursive_layer()..=self.max_degree {
            let k = layer - 1;
            for m in 0..=k {
                let n = k - m;
                match self.step_a(m, n) {
                    Ok(v) if &v == self.get(m + 1, n).unwrap() => {}
                    _ => return false,
                }
                match self.step_b(m, n) {
                    Ok(v) if &v == self.get(m, n + 1).unwrap() => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Checks both left and right invariance relations (in their
    /// normal-order form) for every `m + n ≤ k`. Needs layer `k+1` stored.
    pub fn check_invariance(&self, k: usize) -> Result<bool, FunctionalError> {
        if k + 1 > self.max_degree {
            return Err(FunctionalError::DomainExceeded {
                requested: k + 1,
                available: self.max_degree,
            });
        }
        let (alpha, beta, gamma, delta, d_ga, d_db) = match &self.coeffs {
            Coeffs::Rates {
                alpha,
                beta,
                gamma,
                delta,
                d_ga,
                d_db,
            } => (alpha, beta, gamma, delta, d_ga, d_db),
            Coeffs::Aw { .. } => {
                return Err(FunctionalError::Regime(
                    "invariance relations are stated in rate form".into(),
                ))
            }
        };
        for s in 0..=k {
            for m in 0..=s {
                let n = s - m;
                let (mi, ni) = (m as isize, n as isize);
                let qm = qpow(&self.q, m);
                let qn = qpow(&self.q, n);
                let p = self.at(mi, ni);
                let up_e = self.at(mi + 1, ni);
                let up_d = self.at(mi, ni + 1);
                let lhs_w = &(alpha * &up_e) - &(gamma * &up_d).scale(&qm);
                let rhs_w = &(d_ga * &p) + &(gamma * &self.at(mi - 1, ni)).scale(&qint(&self.q, m));
                if lhs_w != rhs_w {
                    return Ok(false);
                }
                let lhs_v = &(beta * &up_d) - &(delta * &up_e).scale(&qn);
                let rhs_v = &(d_db * &p) + &(delta * &self.at(mi, ni - 1)).scale(&qint(&self.q, n));
                if lhs_v != rhs_v {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Adds `delta` to one stored value; used to exercise the checks.
    pub fn perturbed(&self, m: usize, n: usize, delta: &Rat) -> PhiTable {
        let mut t = self.clone();
        let v = t.values[m][n].add_rat(delta);
        t.values[m][n] = v;
        t
    }

    /// All stored entries in `(m, n)` order.
    pub fn entries(&self) -> Vec<(usize, usize, &QExt)> {
        let mut out = Vec::new();
        for s in 0..=self.max_degree {
            for m in 0..=s {
                out.push((m, s - m, &self.values[m][s - m]));
            }
        }
        out
    }
}

impl Serialize for PhiTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            m: usize,
            n: usize,
            value: &'a QExt,
        }
        let entries: Vec<Entry<'_>> = self
            .entries()
            .into_iter()
            .map(|(m, n, value)| Entry { m, n, value })
            .collect();
        let mut st = serializer.serialize_struct("PhiTable", 3)?;
        st.serialize_field("regime", self.regime.name())?;
        st.serialize_field("N", &self.regime.singular_index())?;
        st.serialize_field("values", &entries)?;
        st.end()
    }
}

fn rate_coeffs(params: &AsepParams) -> Coeffs {
    let ctx = params.theta();
    let q = &params.q;
    Coeffs::Rates {
        alpha: QExt::from_rat(params.alpha.clone(), ctx),
        beta: QExt::from_rat(params.beta.clone(), ctx),
        gamma: QExt::from_rat(params.gamma.clone(), ctx),
        delta: QExt::from_rat(params.delta.clone(), ctx),
        d_ga: big_delta(&(&params.gamma - &params.alpha), q, ctx),
        d_db: big_delta(&(&params.delta - &params.beta), q, ctx),
    }
}

/// φ₀ to `max_degree` from the rate-form recursion.
pub fn build_phi0(params: &AsepParams, max_degree: usize) -> Result<PhiTable, FunctionalError> {
    let regime = match params.singular_index {
        Some(n) => {
            if max_degree > n {
                return Err(FunctionalError::DomainExceeded {
                    requested: max_degree,
                    available: n,
                });
            }
            if params.gamma.is_zero() || params.delta.is_zero() {
                return Err(FunctionalError::Regime(
                    "singular construction needs gamma, delta > 0".into(),
                ));
            }
            Regime::Phi0Singular(n)
        }
        None => Regime::Phi0NonSingular,
    };
    let mut t = PhiTable::empty(regime, &params.q, params.theta(), rate_coeffs(params));
    t.set(0, 0, QExt::one(params.theta()));
    t.extend(0, max_degree)?;
    Ok(t)
}

/// φ₁ to `max_degree ≥ N+1` from the rate-form recursion.
pub fn build_phi1(params: &AsepParams, max_degree: usize) -> Result<PhiTable, FunctionalError> {
    let n_sing = params.singular_index.ok_or_else(|| {
        FunctionalError::Regime("phi1 exists only for singular parameters".into())
    })?;
    if max_degree < n_sing + 1 {
        return Err(FunctionalError::Regime(format!(
            "phi1 needs max degree at least N+1 = {}",
            n_sing + 1
        )));
    }
    let ctx = params.theta();
    let q = &params.q;
    let mut t = PhiTable::empty(Regime::Phi1(n_sing), q, ctx, rate_coeffs(params));
    for s in 0..=n_sing {
        for m in 0..=s {
            t.set(m, s - m, QExt::zero(ctx));
        }
    }
    // Π = θ^{N+1} ∏_{j=1}^{N+1} (α + q^{j−1}γ)
    let mut prod = Rat::one();
    for j in 1..=n_sing + 1 {
        prod *= &params.alpha + qpow(q, j - 1) * &params.gamma;
    }
    let pi = QExt::theta(ctx).pow(n_sing + 1).scale(&prod);
    let pi_inv = pi
        .inv()
        .map_err(|_| FunctionalError::MisclassifiedRegime(n_sing + 1))?;
    let top = n_sing + 1;
    for m in 0..=top {
        let n = top - m;
        let w = num_traits::pow(params.alpha.clone(), n)
            * num_traits::pow(params.gamma.clone(), m)
            * qpow(q, m * m.saturating_sub(1) / 2);
        t.set(m, n, pi_inv.scale(&w));
    }
    t.max_degree = top;
    t.extend(top, max_degree)?;
    Ok(t)
}

/// Smallest `N ≤ cap` with `abcd·q^N = 1`, for a quadruple with rational `abcd`.
pub fn aw_singular_index(s4: &QExt, q: &Rat, cap: usize) -> Option<usize> {
    let s4 = s4.as_rat()?;
    let one = Rat::one();
    let mut x = s4.clone();
    for n in 0..=cap {
        if x == one {
            return Some(n);
        }
        // |abcd q^n| never grows again once it is below one.
        if num_traits::Signed::abs(&x) < one {
            return None;
        }
        x *= q;
    }
    None
}

fn aw_regime(
    a: &QExt,
    b: &QExt,
    c: &QExt,
    d: &QExt,
    q: &Rat,
) -> Option<usize> {
    aw_singular_index(&(&(a * b) * &(c * d)), q, 256)
}

/// φ₀ from the Askey-Wilson form of the recursion.
pub fn build_phi0_aw(
    abcd: [&QExt; 4],
    q: &Rat,
    ctx: &Theta,
    max_degree: usize,
) -> Result<PhiTable, FunctionalError> {
    let [a, b, c, d] = abcd;
    let regime = match aw_regime(a, b, c, d, q) {
        Some(n) => {
            if max_degree > n {
                return Err(FunctionalError::DomainExceeded {
                    requested: max_degree,
                    available: n,
                });
            }
            Regime::Phi0Singular(n)
        }
        None => Regime::Phi0NonSingular,
    };
    let coeffs = Coeffs::Aw {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        d: d.clone(),
    };
    let mut t = PhiTable::empty(regime, q, ctx, coeffs);
    t.set(0, 0, QExt::one(ctx));
    t.extend(0, max_degree)?;
    Ok(t)
}

/// φ₁ from the Askey-Wilson form, with top layer
/// `φ_{k,N+1−k} = (−cd)^k q^{k(k−1)/2} / (θ^{N+1} (cd;q)_{N+1})`.
pub fn build_phi1_aw(
    abcd: [&QExt; 4],
    q: &Rat,
    ctx: &Theta,
    max_degree: usize,
) -> Result<PhiTable, FunctionalError> {
    let [a, b, c, d] = abcd;
    let n_sing = aw_regime(a, b, c, d, q).ok_or_else(|| {
        FunctionalError::Regime("phi1 exists only for singular parameters".into())
    })?;
    if max_degree < n_sing + 1 {
        return Err(FunctionalError::Regime(format!(
            "phi1 needs max degree at least N+1 = {}",
            n_sing + 1
        )));
    }
    let coeffs = Coeffs::Aw {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        d: d.clone(),
    };
    let mut t = PhiTable::empty(Regime::Phi1(n_sing), q, ctx, coeffs);
    for s in 0..=n_sing {
        for m in 0..=s {
            t.set(m, s - m, QExt::zero(ctx));
        }
    }
    let cd = c * d;
    let top = n_sing + 1;
    let mut poch = QExt::one(ctx);
    for j in 0..top {
        poch = &poch * &(&QExt::one(ctx) - &cd.scale(&qpow(q, j)));
    }
    let norm = (&QExt::theta(ctx).pow(top) * &poch)
        .inv()
        .map_err(|_| FunctionalError::MisclassifiedRegime(top))?;
    let neg_cd = -&cd;
    for k in 0..=top {
        let v = (&norm * &neg_cd.pow(k)).scale(&qpow(q, k * k.saturating_sub(1) / 2));
        t.set(k, top - k, v);
    }
    t.max_degree = top;
    t.extend(top, max_degree)?;
    Ok(t)
}

impl PhiTable {
    /// Convenience: the value `1` in this table's context.
    pub fn one(&self) -> QExt {
        self.qx(Rat::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Word};
    use crate::exact::{rat, rat_int};

    fn n1_set() -> AsepParams {
        AsepParams::from_awparams(rat(2, 1), rat(-1, 2), rat(4, 1), rat(-1, 2), rat(1, 2)).unwrap()
    }

    fn gamma_zero_set() -> AsepParams {
        AsepParams::from_awparams(rat(1, 2), rat(-1, 4), rat(1, 2), Rat::zero(), rat(1, 2)).unwrap()
    }

    fn generic_set() -> AsepParams {
        AsepParams::from_awparams(rat(1, 2), rat(-1, 3), rat(2, 3), rat(-1, 5), rat(1, 3)).unwrap()
    }

    #[test]
    fn identity_value_is_one() {
        let t = build_phi0(&generic_set(), 3).unwrap();
        assert!(t.get(0, 0).unwrap().is_one());
    }

    #[test]
    fn degree_one_matches_closed_form() {
        let p = gamma_zero_set();
        let t = build_phi0(&p, 1).unwrap();
        let alg = Algebra::new(&p.q, p.theta());
        let den = &p.alpha * &p.beta - &p.gamma * &p.delta;
        let e_val = t.eval(&alg.de_substitute(&Word::parse("E").unwrap())).unwrap();
        assert_eq!(e_val.as_rat().unwrap(), &((&p.beta + &p.gamma) / &den));
        let d_val = t.eval(&alg.de_substitute(&Word::parse("D").unwrap())).unwrap();
        assert_eq!(d_val.as_rat().unwrap(), &((&p.alpha + &p.delta) / &den));
        // φ₀[e] = (φ₀[E] − θ²)/θ
        let th = QExt::theta(p.theta());
        let want = &(&e_val - &QExt::from_rat(p.theta().theta_sq().clone(), p.theta()))
            * &th.inv().unwrap();
        assert_eq!(t.get(1, 0).unwrap(), &want);
    }

    #[test]
    fn ee_word_matches_hand_expansion() {
        // E² = θ⁴ + 2θ³e + θ²e², evaluated term by term.
        let p = generic_set();
        let t = build_phi0(&p, 2).unwrap();
        let alg = Algebra::new(&p.q, p.theta());
        let via_table = t.eval(&alg.de_substitute(&Word::parse("EE").unwrap())).unwrap();
        let th = QExt::theta(p.theta());
        let hand = &(&th.pow(4) + &(&th.pow(3).scale(&rat_int(2)) * t.get(1, 0).unwrap()))
            + &(&th.pow(2) * t.get(2, 0).unwrap());
        assert_eq!(via_table, hand);
    }

    #[test]
    fn singular_domain_is_bounded() {
        let p = n1_set();
        assert_eq!(p.singular_index, Some(1));
        assert!(build_phi0(&p, 1).is_ok());
        assert_eq!(
            build_phi0(&p, 2).unwrap_err(),
            FunctionalError::DomainExceeded {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn phi1_initial_layer() {
        let p = n1_set();
        let t = build_phi1(&p, 4).unwrap();
        for s in 0..=1 {
            for m in 0..=s {
                assert!(t.get(m, s - m).unwrap().is_zero());
            }
        }
        // Π = θ² (α + γ)(α + qγ) = 2 · (3/5)(2/5)
        let pi = rat(12, 25);
        let want = QExt::from_rat(num_traits::pow(p.alpha.clone(), 2) / pi, p.theta());
        assert_eq!(t.get(0, 2).unwrap(), &want);
        assert!(t.check_invariance(1).unwrap());
        assert!(t.check_invariance(3).unwrap());
        assert!(t.check_consistency());
    }

    #[test]
    fn phi1_identity_vanishes_for_n_zero() {
        let p = AsepParams::from_rates(rat_int(1), rat_int(1), rat_int(2), rat(1, 2), rat(1, 2))
            .unwrap();
        assert_eq!(p.singular_index, Some(0));
        let t = build_phi1(&p, 3).unwrap();
        assert!(t.get(0, 0).unwrap().is_zero());
    }

    #[test]
    fn invariance_and_perturbation() {
        let p = generic_set();
        let t = build_phi0(&p, 6).unwrap();
        assert!(t.check_invariance(5).unwrap());
        assert!(t.check_consistency());
        let bad = t.perturbed(2, 1, &Rat::one());
        assert!(!bad.check_invariance(5).unwrap());
        assert!(!bad.check_consistency());
    }

    #[test]
    fn aw_form_reproduces_rate_form() {
        for p in [generic_set(), gamma_zero_set(), n1_set()] {
            let deg = p.singular_index.unwrap_or(7);
            let t = build_phi0(&p, deg).unwrap();
            let aw = p.aw_qext().unwrap();
            let t2 = build_phi0_aw([&aw[0], &aw[1], &aw[2], &aw[3]], &p.q, p.theta(), deg).unwrap();
            for (m, n, v) in t.entries() {
                assert_eq!(t2.get(m, n).unwrap(), v);
            }
            if p.singular_index.is_some() {
                let t = build_phi1(&p, 5).unwrap();
                let t2 =
                    build_phi1_aw([&aw[0], &aw[1], &aw[2], &aw[3]], &p.q, p.theta(), 5).unwrap();
                for (m, n, v) in t.entries() {
                    assert_eq!(t2.get(m, n).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn eval_rejects_high_degree() {
        let p = generic_set();
        let t = build_phi0(&p, 2).unwrap();
        let alg = Algebra::new(&p.q, p.theta());
        let w = alg.de_substitute(&Word::parse("DDD").unwrap());
        assert!(matches!(t.eval(&w), Err(FunctionalError::DomainExceeded { .. })));
    }

    #[test]
    fn phi1_needs_singular_params() {
        assert!(matches!(
            build_phi1(&generic_set(), 3),
            Err(FunctionalError::Regime(_))
        ));
    }
}
