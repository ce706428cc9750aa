//! Commutators, associators and associator deviations as loop words.

use crate::error::{Error, Result};
use crate::loop_term::LoopTerm;

/// Index sequence `α_1, …, α_n` selecting a level-`n` deviation.
///
/// At step `k` the recursion merges the adjacent argument slots `α_k` and
/// `α_k + 1` of a word with `k + 3` slots, so `1 <= α_k <= k + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeviationIndex(Vec<usize>);

impl DeviationIndex {
    pub fn new(alphas: Vec<usize>) -> Result<Self> {
        for (k, &a) in alphas.iter().enumerate() {
            let bound = k + 3;
            if a < 1 || a > bound {
                return Err(Error::Usage(format!(
                    "deviation index α_{} = {a} out of range 1..={bound}",
                    k + 1
                )));
            }
        }
        Ok(DeviationIndex(alphas))
    }

    pub fn empty() -> Self {
        DeviationIndex(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn alphas(&self) -> &[usize] {
        &self.0
    }

    /// Every valid index sequence of the given level, lexicographically.
    pub fn enumerate(level: usize) -> Vec<DeviationIndex> {
        let mut out = vec![Vec::new()];
        for k in 0..level {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (1..=k + 3).map(move |a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(DeviationIndex).collect()
    }

    /// The index of `P_{m,n}`: `1` repeated `m - 1` times, then `m + 1`
    /// repeated `n - 1` times.
    pub fn p_index(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::Usage(format!(
                "P_{{m,n}} needs m, n >= 1, got ({m}, {n})"
            )));
        }
        let mut alphas = vec![1; m - 1];
        alphas.extend(std::iter::repeat(m + 1).take(n - 1));
        Self::new(alphas)
    }
}

impl std::str::FromStr for DeviationIndex {
    type Err = Error;

    /// Comma- or whitespace-separated positive integers; empty for level 0.
    fn from_str(s: &str) -> Result<Self> {
        let alphas = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::Usage(format!("bad deviation index entry {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DeviationIndex::new(alphas)
    }
}

/// `(b·a) \ (a·b)`.
pub fn commutator(a: &LoopTerm, b: &LoopTerm) -> LoopTerm {
    LoopTerm::ldiv(&LoopTerm::mul(b, a), &LoopTerm::mul(a, b))
}

/// `(a·(b·c)) \ ((a·b)·c)`.
pub fn associator(a: &LoopTerm, b: &LoopTerm, c: &LoopTerm) -> LoopTerm {
    LoopTerm::ldiv(
        &LoopTerm::mul(a, &LoopTerm::mul(b, c)),
        &LoopTerm::mul(&LoopTerm::mul(a, b), c),
    )
}

/// The deviation `(a_1, …, a_{n+3})_{α_1, …, α_n}`.
///
/// Level 0 is the associator. Otherwise, with `k = α_n` and
/// `A(w) = (a_1, …, a_{k-1}, w, a_{k+2}, …)_{α_1, …, α_{n-1}}`, it is
/// `(A(a_k)·A(a_{k+1})) \ A(a_k·a_{k+1})`.
pub fn deviation(args: &[LoopTerm], idx: &DeviationIndex) -> Result<LoopTerm> {
    if args.len() != idx.level() + 3 {
        return Err(Error::Usage(format!(
            "a level-{} deviation takes {} arguments, got {}",
            idx.level(),
            idx.level() + 3,
            args.len()
        )));
    }
    Ok(build(args, idx.alphas()))
}

fn build(args: &[LoopTerm], alphas: &[usize]) -> LoopTerm {
    let Some((&k, inner)) = alphas.split_last() else {
        return associator(&args[0], &args[1], &args[2]);
    };
    let slot = k - 1;
    let with = |w: LoopTerm| {
        let mut a = Vec::with_capacity(args.len() - 1);
        a.extend_from_slice(&args[..slot]);
        a.push(w);
        a.extend_from_slice(&args[slot + 2..]);
        build(&a, inner)
    };
    let left = with(args[slot].clone());
    let right = with(args[slot + 1].clone());
    let merged = with(LoopTerm::mul(&args[slot], &args[slot + 1]));
    LoopTerm::ldiv(&LoopTerm::mul(&left, &right), &merged)
}

/// `P_{m,n}(x_1, …, x_m, y_1, …, y_n, z)`.
pub fn p_deviation(xs: &[LoopTerm], ys: &[LoopTerm], z: &LoopTerm) -> Result<LoopTerm> {
    let idx = DeviationIndex::p_index(xs.len(), ys.len())?;
    let mut args = xs.to_vec();
    args.extend_from_slice(ys);
    args.push(z.clone());
    deviation(&args, &idx)
}
