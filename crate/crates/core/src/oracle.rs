//! Exact stationary distribution of the finite ASEP Markov chain, by rational
//! Gaussian elimination. Independent of the algebraic machinery.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::asep::{AsepParams, Dist};
use crate::exact::Rat;

pub const DEFAULT_MAX_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("system size {0} exceeds the cap of {1} sites")]
    TooLarge(usize, usize),
    #[error("system size must be at least 1")]
    Empty,
    #[error("generator is not irreducible: nullspace has dimension > 1")]
    Reducible,
}

/// Off-diagonal transition rates of the chain on `{0,1}^L`; the diagonal is
/// implied by zero row sums. States use site 1 as the most significant bit.
#[derive(Debug, Clone)]
pub struct Generator {
    pub l: usize,
    rows: Vec<BTreeMap<usize, Rat>>,
}

impl Generator {
    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn rate(&self, from: usize, to: usize) -> Rat {
        self.rows[from].get(&to).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn transitions(&self, from: usize) -> impl Iterator<Item = (&usize, &Rat)> {
        self.rows[from].iter()
    }

    pub fn exit_rate(&self, from: usize) -> Rat {
        self.rows[from].values().fold(Rat::zero(), |acc, r| acc + r)
    }

    /// Generator with every rate multiplied by `c`.
    pub fn scaled(&self, c: &Rat) -> Generator {
        Generator {
            l: self.l,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(&j, r)| (j, r * c)).collect())
                .collect(),
        }
    }

    /// `πQ` for a candidate vector `π`.
    pub fn residual(&self, pi: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.states()];
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, r) in row {
                out[j] += &pi[i] * r;
                out[i] -= &pi[i] * r;
            }
        }
        out
    }

    fn add(&mut self, from: usize, to: usize, r: &Rat) {
        if r.is_zero() {
            return;
        }
        *self.rows[from].entry(to).or_insert_with(Rat::zero) += r;
    }
}

/// Transition rates: site 1 flips `0→1` at `α`, `1→0` at `γ`; each bond moves
/// `10→01` at rate 1 and `01→10` at rate `q`; site `L` flips `1→0` at `β`,
/// `0→1` at `δ`.
pub fn generator(params: &AsepParams, l: usize) -> Result<Generator, OracleError> {
    generator_capped(params, l, DEFAULT_MAX_SITES)
}

pub fn generator_capped(params: &AsepParams, l: usize, cap: usize) -> Result<Generator, OracleError> {
    if l == 0 {
        return Err(OracleError::Empty);
    }
    if l > cap {
        return Err(OracleError::TooLarge(l, cap));
    }
    let n = 1usize << l;
    let mut g = Generator {
        l,
        rows: vec![BTreeMap::new(); n],
    };
    let first = 1usize << (l - 1);
    let last = 1usize;
    let one = Rat::one();
    for s in 0..n {
        if s & first == 0 {
            g.add(s, s | first, &params.alpha);
        } else {
            g.add(s, s & !first, &params.gamma);
        }
        if s & last == 0 {
            g.add(s, s | last, &params.delta);
        } else {
            g.add(s, s & !last, &params.beta);
        }
        for k in 0..l - 1 {
            let left = 1usize << (l - 1 - k);
            let right = left >> 1;
            let (a, b) = (s & left != 0, s & right != 0);
            if a && !b {
                g.add(s, (s & !left) | right, &one);
            } else if !a && b {
                g.add(s, (s & !right) | left, &params.q);
            }
        }
    }
    Ok(g)
}

/// Unique `π` with `πQ = 0`, `Σπ = 1`.
pub fn stationary_exact(g: &Generator) -> Result<Dist, OracleError> {
    let n = g.states();
    // Equation j: Σ_i π_i Q_{ij} = 0; the last one is replaced by Σ π_i = 1.
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); n];
    for i in 0..n {
        let exit = g.exit_rate(i);
        if !exit.is_zero() && i != n - 1 {
            rows[i].insert(i, -exit);
        }
        for (&j, r) in g.transitions(i) {
            if j != n - 1 {
                *rows[j].entry(i).or_insert_with(Rat::zero) += r;
            }
        }
    }
    rows[n - 1] = (0..n).map(|i| (i, Rat::one())).collect();
    for row in rows.iter_mut() {
        row.retain(|_, v| !v.is_zero());
    }
    let mut rhs = vec![Rat::zero(); n];
    rhs[n - 1] = Rat::one();

    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            col_rows[c].insert(r);
        }
    }
    let mut used = vec![false; n];
    let mut pivot_of = vec![usize::MAX; n];
    for c in 0..n {
        let pivot = col_rows[c]
            .iter()
            .copied()
            .filter(|&r| !used[r])
            .min_by_key(|&r| rows[r].len())
            .ok_or(OracleError::Reducible)?;
        used[pivot] = true;
        pivot_of[c] = pivot;
        let prow = rows[pivot].clone();
        let pval = prow[&c].clone();
        let prhs = rhs[pivot].clone();
        let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&r| !used[r]).collect();
        for r in targets {
            let factor = &rows[r][&c] / &pval;
            for (&k, v) in &prow {
                let entry = rows[r].entry(k).or_insert_with(Rat::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r].remove(&k);
                    col_rows[k].remove(&r);
                } else {
                    col_rows[k].insert(r);
                }
            }
            let delta = &factor * &prhs;
            rhs[r] -= delta;
        }
    }
    let mut pi = vec![Rat::zero(); n];
    for c in (0..n).rev() {
        let r = pivot_of[c];
        let mut acc = rhs[r].clone();
        for (&k, v) in &rows[r] {
            if k != c {
                acc -= v * &pi[k];
            }
        }
        pi[c] = acc / &rows[r][&c];
    }
    if pi.iter().any(|p| !p.is_positive()) {
        return Err(OracleError::Reducible);
    }
    Ok(Dist { l: g.l, probs: pi })
}
