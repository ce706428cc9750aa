//! Seeded case corpora for the verification suites and a runner that
//! evaluates them, possibly in parallel, in a fixed order.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::deviations::{associator, commutator, deviation, DeviationIndex};
use crate::error::{Error, Result};
use crate::loop_term::{magnus, random_term_with, LoopTerm};
use crate::magma::VarSet;
use crate::series::Trunc;
use crate::vars::{VarId, VarTable};
use crate::verify::{
    verify_balance_step, verify_grading, verify_loop_axioms, verify_multilinear_parts,
    verify_p_deviation, verify_pop_primitive, verify_primitive_lowest, MultilinearCase,
    VerificationReport,
};

pub const DEFAULT_SEED: u64 = 2718;

/// Largest `m + n + 1` the `P_{m,n}` suite accepts without an explicit override.
pub const P_DEVIATION_GUARD: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    PDeviation,
    Axioms,
    Balance,
    Grading,
    Primitive,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::PDeviation,
        Suite::Axioms,
        Suite::Balance,
        Suite::Grading,
        Suite::Primitive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::PDeviation => "grancosa",
            Suite::Axioms => "axioms",
            Suite::Balance => "balance",
            Suite::Grading => "grading",
            Suite::Primitive => "primitive",
        }
    }

    /// Truncation used when none is given.
    pub fn default_degree(self) -> usize {
        match self {
            Suite::PDeviation => 0,
            Suite::Axioms => 8,
            // at least |S| + 2 per case
            Suite::Balance => 0,
            Suite::Grading => 7,
            Suite::Primitive => 6,
        }
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::PDeviation => 0,
            Suite::Axioms => 100,
            Suite::Balance => 50,
            Suite::Grading => 50,
            Suite::Primitive => 100,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub degree: Option<usize>,
    pub cases: Option<usize>,
    /// Multilinear pruning for the `P_{m,n}` suite.
    pub prune: bool,
    /// `P_{m,n}` pairs: every `(m, n)` with `m + n <= max_total`, or one pair.
    pub max_total: usize,
    pub pair: Option<(usize, usize)>,
    pub allow_large: bool,
    /// Multilinear-part instances run by the balance suite.
    pub split_cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            degree: None,
            cases: None,
            prune: true,
            max_total: 5,
            pair: None,
            allow_large: false,
            split_cases: 25,
        }
    }
}

/// Evaluates every case of a suite. Reports come back in case order
/// whatever the scheduling.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let cases = cfg.cases.unwrap_or(suite.default_cases());
    let degree = cfg.degree.unwrap_or(suite.default_degree());
    if degree == 0 && !matches!(suite, Suite::PDeviation | Suite::Balance) {
        return Err(Error::Usage("truncation degree must be >= 1".into()));
    }
    match suite {
        Suite::PDeviation => p_deviation_pairs(cfg),
        Suite::Axioms => axioms(cases, degree, cfg.seed),
        Suite::Balance => balance(cases, cfg.split_cases, cfg.degree, cfg.seed),
        Suite::Grading => grading(cases, degree, cfg.seed),
        Suite::Primitive => primitive(cases, degree, cfg.seed),
    }
}

fn par_cases<T, F>(items: Vec<T>, f: F) -> Result<Vec<VerificationReport>>
where
    T: Send + Sync,
    F: Fn(usize, &T) -> Result<VerificationReport> + Send + Sync,
{
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

fn p_deviation_pairs(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let pairs: Vec<(usize, usize)> = match cfg.pair {
        Some((m, n)) => vec![(m, n)],
        None => (2..=cfg.max_total)
            .flat_map(|t| (1..t).map(move |m| (m, t - m)))
            .collect(),
    };
    for &(m, n) in &pairs {
        if m == 0 || n == 0 {
            return Err(Error::Usage("P_{m,n} needs m, n >= 1".into()));
        }
        if m + n + 1 > P_DEVIATION_GUARD && !cfg.allow_large {
            return Err(Error::ResourceBound(format!(
                "P_{{{m},{n}}} needs truncation {} > {P_DEVIATION_GUARD}; pass the override flag to run it",
                m + n + 1
            )));
        }
    }
    par_cases(pairs, |_, &(m, n)| verify_p_deviation(m, n, cfg.prune))
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(salt);
    r
}

fn table(names: &[&str]) -> VarTable {
    VarTable::from_names(names.iter().copied()).expect("fixed names are valid")
}

fn axioms(cases: usize, degree: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let vars = table(&["x", "y"]);
    let gens: Vec<VarId> = vars.ids().collect();
    let mut r = rng(seed, 1);
    let pairs: Vec<(LoopTerm, LoopTerm)> = (0..cases)
        .map(|_| {
            (
                random_term_with(&gens, 3, &mut r),
                random_term_with(&gens, 3, &mut r),
            )
        })
        .collect();
    let trunc = Trunc::new(degree);
    par_cases(pairs, |i, (s, t)| {
        verify_loop_axioms(&format!("axioms/{i:03}"), s, t, trunc, &vars)
    })
}

/// A word in one generator that is trivial when the generator is.
fn unary(g: VarId, r: &mut ChaCha8Rng) -> LoopTerm {
    let x = LoopTerm::Gen(g);
    match r.gen_range(0..6) {
        0 => LoopTerm::mul(&x, &x),
        1 => LoopTerm::ldiv(&x, &LoopTerm::One),
        2 => LoopTerm::rdiv(&LoopTerm::One, &x),
        _ => x,
    }
}

/// A balanced word on exactly the given generators, built from
/// commutators, associators and level-one deviations whose arguments are
/// balanced on disjoint blocks.
pub fn balanced_word(gens: &[VarId], r: &mut ChaCha8Rng) -> LoopTerm {
    let k = gens.len();
    if k == 1 {
        return unary(gens[0], r);
    }
    let arity = match k {
        2 => 2,
        3 => r.gen_range(2..=3),
        _ => r.gen_range(2..=4),
    };
    // cut the generators into `arity` nonempty consecutive blocks
    let mut cuts: Vec<usize> = (1..k).collect();
    cuts.shuffle(r);
    let mut cuts: Vec<usize> = cuts[..arity - 1].to_vec();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(arity);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(k)) {
        blocks.push(balanced_word(&gens[start..c], r));
        start = c;
    }
    match arity {
        2 => commutator(&blocks[0], &blocks[1]),
        3 => associator(&blocks[0], &blocks[1], &blocks[2]),
        _ => {
            let idx = DeviationIndex::new(vec![r.gen_range(1..=3)]).expect("level one");
            deviation(&blocks, &idx).expect("four arguments")
        }
    }
}

/// Distinct balanced words on 2 to 4 generators drawn from `pool`, each
/// paired with the generator used as the slot.
pub fn balanced_corpus(
    pool: &[VarId],
    count: usize,
    max_vars: usize,
    r: &mut ChaCha8Rng,
) -> Vec<(LoopTerm, VarSet, VarId)> {
    let mut out: Vec<(LoopTerm, VarSet, VarId)> = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100 * count + 1000, "balanced corpus saturated");
        let k = r.gen_range(2..=max_vars.min(pool.len()));
        let mut gens: Vec<VarId> = pool.to_vec();
        gens.shuffle(r);
        gens.truncate(k);
        let phi = balanced_word(&gens, r);
        if out.iter().any(|(p, _, _)| *p == phi) {
            continue;
        }
        let x = gens[r.gen_range(0..k)];
        out.push((phi, gens.into_iter().collect(), x));
    }
    out
}

/// A word in which each of `gens` occurs exactly once, with random
/// operations.
fn spanning_word(gens: &[VarId], r: &mut ChaCha8Rng) -> LoopTerm {
    if gens.len() == 1 {
        return LoopTerm::Gen(gens[0]);
    }
    let cut = r.gen_range(1..gens.len());
    let a = spanning_word(&gens[..cut], r);
    let b = spanning_word(&gens[cut..], r);
    match r.gen_range(0..3) {
        0 => LoopTerm::mul(&a, &b),
        1 => LoopTerm::ldiv(&a, &b),
        _ => LoopTerm::rdiv(&a, &b),
    }
}

enum BalanceCase {
    Step {
        phi: LoopTerm,
        set: VarSet,
        x: VarId,
    },
    Split(MultilinearCase),
}

fn balance(
    cases: usize,
    split_cases: usize,
    degree: Option<usize>,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let vars = table(&["a", "b", "c", "d", "e", "f", "y"]);
    let ids: Vec<VarId> = vars.ids().collect();
    let (pool, y) = (&ids[..4], ids[6]);
    let mut r = rng(seed, 3);
    let mut items: Vec<BalanceCase> = balanced_corpus(pool, cases, 4, &mut r)
        .into_iter()
        .map(|(phi, set, x)| BalanceCase::Step { phi, set, x })
        .collect();
    let extras = &ids[4..6];
    for (phi, set, x) in balanced_corpus(&pool[..3], split_cases, 3, &mut r) {
        let mut w_gens = vec![x];
        w_gens.extend_from_slice(&extras[..r.gen_range(0..=extras.len())]);
        w_gens.shuffle(&mut r);
        let w = spanning_word(&w_gens, &mut r);
        let mut set_hat = set.clone();
        set_hat.extend(w_gens);
        items.push(BalanceCase::Split(MultilinearCase {
            phi,
            x,
            set,
            set_hat,
            w,
            y,
        }));
    }
    par_cases(items, |i, c| match c {
        BalanceCase::Step { phi, set, x } => {
            let n = degree.unwrap_or(0).max(set.len() + 2);
            verify_balance_step(
                &format!("balance/{i:03}"),
                phi,
                set,
                *x,
                y,
                Trunc::new(n),
                &vars,
            )
        }
        BalanceCase::Split(p) => {
            verify_multilinear_parts(&format!("split/{:03}", i - cases), p, &vars)
        }
    })
}

/// Samples for the grading suite, weighted towards low dimension degree
/// so that the compound words stay inside the truncation.
fn grading_sample(gens: &[VarId], r: &mut ChaCha8Rng) -> LoopTerm {
    let choice = r.gen_range(0..10);
    let g = LoopTerm::Gen(gens[r.gen_range(0..gens.len())]);
    let mut rt = |d| random_term_with(gens, d, r);
    match choice {
        0..=2 => g,
        3..=5 => rt(1),
        6 | 7 => commutator(&g, &rt(0)),
        _ => rt(2),
    }
}

fn grading(cases: usize, degree: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let vars = table(&["x", "y", "z"]);
    let gens: Vec<VarId> = vars.ids().collect();
    let mut r = rng(seed, 4);
    let quads: Vec<[LoopTerm; 4]> = (0..cases)
        .map(|_| std::array::from_fn(|_| grading_sample(&gens, &mut r)))
        .collect();
    let trunc = Trunc::new(degree);
    par_cases(quads, |i, q| {
        let [u, v, w, x] = q;
        verify_grading(&format!("grading/{i:03}"), [u, v, w, x], trunc).map(|rep| {
            rep.param("u", u.display(&vars).to_string())
                .param("v", v.display(&vars).to_string())
        })
    })
}

/// Random words together with commutators, associators and deviations
/// of random words, so that lowest terms of several degrees occur.
fn primitive_sample(gens: &[VarId], i: usize, r: &mut ChaCha8Rng) -> LoopTerm {
    let mut rt = |d| random_term_with(gens, d, r);
    match i % 4 {
        0 => rt(3),
        1 => {
            let (a, b) = (rt(2), rt(2));
            commutator(&a, &b)
        }
        2 => {
            let (a, b, c) = (rt(1), rt(1), rt(1));
            associator(&a, &b, &c)
        }
        _ => {
            let args: Vec<LoopTerm> = (0..4).map(|_| rt(1)).collect();
            let k = 1 + i / 4 % 3;
            deviation(&args, &DeviationIndex::new(vec![k]).expect("level one"))
                .expect("four arguments")
        }
    }
}

fn primitive(cases: usize, degree: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let vars = table(&["x", "y", "z"]);
    let gens: Vec<VarId> = vars.ids().collect();
    let trunc = Trunc::new(degree);
    let mut r = rng(seed, 5);
    // words whose truncated expansion is 1 say nothing; draw until enough
    // conclusive ones are collected
    let mut terms = Vec::with_capacity(cases);
    let mut drawn = 0;
    while terms.len() < cases {
        let t = primitive_sample(&gens, drawn, &mut r);
        drawn += 1;
        if !magnus(&t, trunc).is_one() {
            terms.push(t);
        }
        if drawn > 20 * cases + 100 {
            break;
        }
    }
    let mut reports = par_cases(terms, |i, t| {
        verify_primitive_lowest(&format!("primitive/{i:03}"), t, trunc, &vars)
    })?;
    let pops: Vec<(usize, usize)> = (2..=5)
        .flat_map(|t| (1..t).map(move |r| (r, t - r)))
        .collect();
    reports.extend(par_cases(pops, |_, &(r, s)| verify_pop_primitive(r, s))?);
    Ok(reports)
}
