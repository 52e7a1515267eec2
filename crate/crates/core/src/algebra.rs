//! The algebra generated by `e`, `d` with `de − q·ed = I`, in the normal-order
//! basis `{e^m d^n}`, together with the rate-side generators
//! `D = θ²I + θd`, `E = θ²I + θe`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact::{qint, qpow, QExt, Rat, Theta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    /// Rate-side `D`.
    D,
    /// Rate-side `E`.
    E,
    /// Shifted `d`.
    Dd,
    /// Shifted `e`.
    Ee,
    I,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Word {
    pub letters: Vec<Gen>,
}

impl Word {
    pub fn new(letters: Vec<Gen>) -> Word {
        Word { letters }
    }

    pub fn empty() -> Word {
        Word::default()
    }

    /// Parses a string over `DEdeI`.
    pub fn parse(s: &str) -> Option<Word> {
        s.chars()
            .map(|c| match c {
                'D' => Some(Gen::D),
                'E' => Some(Gen::E),
                'd' => Some(Gen::Dd),
                'e' => Some(Gen::Ee),
                'I' => Some(Gen::I),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Word::new)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of pairs `d … e` with the `d` to the left.
    pub fn inversions(&self) -> usize {
        let mut ds = 0;
        let mut inv = 0;
        for g in &self.letters {
            match g {
                Gen::Dd => ds += 1,
                Gen::Ee => inv += ds,
                _ => {}
            }
        }
        inv
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.letters {
            let c = match g {
                Gen::D => 'D',
                Gen::E => 'E',
                Gen::Dd => 'd',
                Gen::Ee => 'e',
                Gen::I => 'I',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Word with letter `j` equal to `D` when `τ_j = 1` and `E` otherwise.
pub fn config_word(tau: &[bool]) -> Word {
    Word::new(tau.iter().map(|&b| if b { Gen::D } else { Gen::E }).collect())
}

/// `Σ c_{m,n} e^m d^n`, keyed by `(m, n)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct NPoly {
    terms: BTreeMap<(usize, usize), QExt>,
    ctx: Theta,
}

impl NPoly {
    pub fn zero(ctx: &Theta) -> NPoly {
        NPoly {
            terms: BTreeMap::new(),
            ctx: ctx.clone(),
        }
    }

    pub fn identity(ctx: &Theta) -> NPoly {
        NPoly::monomial(0, 0, QExt::one(ctx))
    }

    pub fn monomial(m: usize, n: usize, c: QExt) -> NPoly {
        let mut p = NPoly::zero(c.ctx());
        p.add_term(m, n, c);
        p
    }

    pub fn ctx(&self) -> &Theta {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &QExt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: usize, n: usize) -> QExt {
        self.terms
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| QExt::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum `m + n`; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(m, n)| m + n).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: usize, n: usize, c: QExt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(m, n)) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&(m, n));
                }
            }
            None => {
                self.terms.insert((m, n), c);
            }
        }
    }

    pub fn add(&self, other: &NPoly) -> NPoly {
        let mut out = self.clone();
        for (&(m, n), c) in &other.terms {
            out.add_term(m, n, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NPoly) -> NPoly {
        self.add(&other.scale(&QExt::from_int(-1, &self.ctx)))
    }

    pub fn scale(&self, k: &QExt) -> NPoly {
        let mut out = NPoly::zero(&self.ctx);
        if k.is_zero() {
            return out;
        }
        for (&(m, n), c) in &self.terms {
            out.add_term(m, n, c * k);
        }
        out
    }
}

impl fmt::Debug for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(m, n), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) e^{m} d^{n}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermJson<'a> {
    m: usize,
    n: usize,
    coeff: &'a QExt,
}

impl Serialize for NPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermJson<'_>> = self
            .terms
            .iter()
            .map(|(&(m, n), coeff)| TermJson { m, n, coeff })
            .collect();
        v.serialize(serializer)
    }
}

/// The algebra for a fixed `q` and `θ` context. Holds tables of q-integers
/// and q-binomials used by the product formula.
#[derive(Debug, Clone)]
pub struct Algebra {
    q: Rat,
    ctx: Theta,
    qpows: Vec<Rat>,
    qints: Vec<Rat>,
    qfacts: Vec<Rat>,
}

const TABLE_SIZE: usize = 48;

impl Algebra {
    pub fn new(q: &Rat, ctx: &Theta) -> Algebra {
        let mut qpows = Vec::with_capacity(4 * TABLE_SIZE);
        let mut p = Rat::one();
        for _ in 0..4 * TABLE_SIZE {
            qpows.push(p.clone());
            p *= q;
        }
        let qints: Vec<Rat> = (0..TABLE_SIZE).map(|n| qint(q, n)).collect();
        let mut qfacts = vec![Rat::one()];
        for n in 1..TABLE_SIZE {
            let f = &qfacts[n - 1] * &qints[n];
            qfacts.push(f);
        }
        Algebra {
            q: q.clone(),
            ctx: ctx.clone(),
            qpows,
            qints,
            qfacts,
        }
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn ctx(&self) -> &Theta {
        &self.ctx
    }

    fn qpow(&self, k: usize) -> Rat {
        self.qpows.get(k).cloned().unwrap_or_else(|| qpow(&self.q, k))
    }

    fn qint(&self, n: usize) -> Rat {
        self.qints.get(n).cloned().unwrap_or_else(|| qint(&self.q, n))
    }

    fn qfact(&self, n: usize) -> Rat {
        if let Some(f) = self.qfacts.get(n) {
            return f.clone();
        }
        (1..=n).fold(Rat::one(), |acc, k| acc * self.qint(k))
    }

    /// `[n k]_q`, zero outside `0 ≤ k ≤ n`. Computed as a product of ratios
    /// of q-integers, which stays valid at `q = 0`.
    pub fn qbinom(&self, n: usize, k: usize) -> Rat {
        if k > n {
            return Rat::zero();
        }
        if n < self.qfacts.len() {
            return &self.qfacts[n] / (&self.qfacts[k] * &self.qfacts[n - k]);
        }
        self.qfact(n) / (self.qfact(k) * self.qfact(n - k))
    }

    pub fn e(&self) -> NPoly {
        NPoly::monomial(1, 0, QExt::one(&self.ctx))
    }

    pub fn d(&self) -> NPoly {
        NPoly::monomial(0, 1, QExt::one(&self.ctx))
    }

    pub fn identity(&self) -> NPoly {
        NPoly::identity(&self.ctx)
    }

    /// `D = θ²I + θd` or `E = θ²I + θe` (and `d`, `e`, `I` themselves).
    pub fn gen(&self, g: Gen) -> NPoly {
        let c = &self.ctx;
        let th = QExt::theta(c);
        let th2 = QExt::from_rat(c.theta_sq().clone(), c);
        match g {
            Gen::D => {
                let mut p = NPoly::monomial(0, 1, th);
                p.add_term(0, 0, th2);
                p
            }
            Gen::E => {
                let mut p = NPoly::monomial(1, 0, th);
                p.add_term(0, 0, th2);
                p
            }
            Gen::Dd => self.d(),
            Gen::Ee => self.e(),
            Gen::I => self.identity(),
        }
    }

    /// Normal order of `d^n e^m`: `Σ_k [n k][m k][k]! q^{(n−k)(m−k)} e^{m−k} d^{n−k}`.
    fn swap_coeffs(&self, n: usize, m: usize) -> Vec<(usize, Rat)> {
        (0..=n.min(m))
            .map(|k| {
                let c = self.qbinom(n, k)
                    * self.qbinom(m, k)
                    * self.qfact(k)
                    * self.qpow((n - k) * (m - k));
                (k, c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn mul(&self, p: &NPoly, r: &NPoly) -> NPoly {
        let mut out = NPoly::zero(&self.ctx);
        let mut cache: BTreeMap<(usize, usize), Vec<(usize, Rat)>> = BTreeMap::new();
        for (&(a, b), c1) in &p.terms {
            for (&(c, f), c2) in &r.terms {
                let c12 = c1 * c2;
                let sw = cache.entry((b, c)).or_insert_with(|| self.swap_coeffs(b, c));
                for (k, w) in sw.iter() {
                    out.add_term(a + c - k, b + f - k, c12.scale(w));
                }
            }
        }
        out
    }

    /// `p · e`, using `d^b e = q^b e d^b + [b] d^{b−1}`.
    pub fn mul_right_e(&self, p: &NPoly) -> NPoly {
        let mut out = NPoly::zero(&self.ctx);
        for (&(a, b), c) in &p.terms {
            out.add_term(a + 1, b, c.scale(&self.qpow(b)));
            if b > 0 {
                out.add_term(a, b - 1, c.scale(&self.qint(b)));
            }
        }
        out
    }

    pub fn mul_right_d(&self, p: &NPoly) -> NPoly {
        let mut out = NPoly::zero(&self.ctx);
        for (&(a, b), c) in &p.terms {
            out.add_term(a, b + 1, c.clone());
        }
        out
    }

    /// `p · g` for a single generator.
    pub fn mul_right_gen(&self, p: &NPoly, g: Gen) -> NPoly {
        let c = &self.ctx;
        let th = QExt::theta(c);
        let th2 = QExt::from_rat(c.theta_sq().clone(), c);
        match g {
            Gen::Dd => self.mul_right_d(p),
            Gen::Ee => self.mul_right_e(p),
            Gen::I => p.clone(),
            Gen::D => p.scale(&th2).add(&self.mul_right_d(p).scale(&th)),
            Gen::E => p.scale(&th2).add(&self.mul_right_e(p).scale(&th)),
        }
    }

    /// Expands a `D`/`E` word through `D = θ²I + θd`, `E = θ²I + θe`.
    pub fn de_substitute(&self, w: &Word) -> NPoly {
        let mut p = self.identity();
        for &g in &w.letters {
            p = self.mul_right_gen(&p, g);
        }
        p
    }

    /// Normal-order expansion of a word in `d`, `e` (and `I`) by repeated
    /// rewriting of the leftmost `de` adjacency into `q·ed + I`.
    pub fn normal_order(&self, w: &Word) -> NPoly {
        // Pending words with their (rational) coefficients.
        let mut pending: BTreeMap<Vec<u8>, Rat> = BTreeMap::new();
        let start: Vec<u8> = w
            .letters
            .iter()
            .filter_map(|g| match g {
                Gen::Ee => Some(0u8),
                Gen::Dd => Some(1u8),
                Gen::I => None,
                Gen::D | Gen::E => panic!("normal_order expects a d/e word; use de_substitute"),
            })
            .collect();
        pending.insert(start, Rat::one());
        let mut out = NPoly::zero(&self.ctx);
        while let Some((word, coeff)) = pending.pop_last() {
            match word.windows(2).position(|p| p == [1, 0]) {
                None => {
                    let m = word.iter().filter(|&&x| x == 0).count();
                    out.add_term(m, word.len() - m, QExt::from_rat(coeff, &self.ctx));
                }
                Some(i) => {
                    let mut swapped = word.clone();
                    swapped[i] = 0;
                    swapped[i + 1] = 1;
                    let mut dropped = word.clone();
                    dropped.drain(i..i + 2);
                    for (wd, c) in [(swapped, &coeff * &self.q), (dropped, coeff)] {
                        if c.is_zero() {
                            continue;
                        }
                        let e = pending.entry(wd).or_insert_with(Rat::zero);
                        *e += c;
                    }
                }
            }
        }
        out
    }

    /// `x^k` for a polynomial element, via repeated multiplication.
    pub fn pow(&self, x: &NPoly, k: usize) -> NPoly {
        let mut acc = self.identity();
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }
}
