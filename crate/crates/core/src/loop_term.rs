//! Words in the free loop and their Magnus expansion.
//!
//! A [`LoopTerm`] is built from the unit, generators, products and the two
//! divisions: `a \ b` solves `a·w = b`, `a / b` solves `w·b = a`. The Magnus
//! expansion sends every generator `x` to `1 + x` and evaluates the rest
//! structurally in truncated power series.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::Coeff;
use crate::error::{Error, ParseError, Result};
use crate::magma::{Monomial, VarSet};
use crate::series::{Series, Trunc};
use crate::vars::{is_identifier, VarId, VarTable};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum LoopTerm {
    One,
    Gen(VarId),
    Mul(Arc<LoopTerm>, Arc<LoopTerm>),
    /// `l \ r`
    LDiv(Arc<LoopTerm>, Arc<LoopTerm>),
    /// `l / r`
    RDiv(Arc<LoopTerm>, Arc<LoopTerm>),
}

impl LoopTerm {
    pub fn gen(v: VarId) -> Self {
        LoopTerm::Gen(v)
    }

    pub fn mul(a: &LoopTerm, b: &LoopTerm) -> Self {
        LoopTerm::Mul(Arc::new(a.clone()), Arc::new(b.clone()))
    }

    pub fn ldiv(a: &LoopTerm, b: &LoopTerm) -> Self {
        LoopTerm::LDiv(Arc::new(a.clone()), Arc::new(b.clone()))
    }

    pub fn rdiv(a: &LoopTerm, b: &LoopTerm) -> Self {
        LoopTerm::RDiv(Arc::new(a.clone()), Arc::new(b.clone()))
    }

    /// Generators occurring in the term.
    pub fn vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut VarSet) {
        match self {
            LoopTerm::One => {}
            LoopTerm::Gen(v) => {
                out.insert(*v);
            }
            LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            LoopTerm::One | LoopTerm::Gen(_) => 1,
            LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LoopTerm::One | LoopTerm::Gen(_) => 0,
            LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Simultaneous substitution of generators. Every generator of the
    /// term must be bound.
    pub fn substitute(&self, sigma: &HashMap<VarId, LoopTerm>) -> Result<LoopTerm> {
        Ok(match self {
            LoopTerm::One => LoopTerm::One,
            LoopTerm::Gen(v) => sigma
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Usage(format!("no binding for generator {v:?}")))?,
            LoopTerm::Mul(a, b) => LoopTerm::mul(&a.substitute(sigma)?, &b.substitute(sigma)?),
            LoopTerm::LDiv(a, b) => LoopTerm::ldiv(&a.substitute(sigma)?, &b.substitute(sigma)?),
            LoopTerm::RDiv(a, b) => LoopTerm::rdiv(&a.substitute(sigma)?, &b.substitute(sigma)?),
        })
    }

    /// Substitutes `v ↦ replacement`, leaving other generators alone.
    pub fn replace_var(&self, v: VarId, replacement: &LoopTerm) -> LoopTerm {
        match self {
            LoopTerm::Gen(u) if *u == v => replacement.clone(),
            LoopTerm::One | LoopTerm::Gen(_) => self.clone(),
            LoopTerm::Mul(a, b) => LoopTerm::mul(
                &a.replace_var(v, replacement),
                &b.replace_var(v, replacement),
            ),
            LoopTerm::LDiv(a, b) => LoopTerm::ldiv(
                &a.replace_var(v, replacement),
                &b.replace_var(v, replacement),
            ),
            LoopTerm::RDiv(a, b) => LoopTerm::rdiv(
                &a.replace_var(v, replacement),
                &b.replace_var(v, replacement),
            ),
        }
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> TermDisplay<'a> {
        TermDisplay { term: self, vars }
    }

    fn write_to(&self, vars: &VarTable, out: &mut String, top: bool) {
        let (op, a, b) = match self {
            LoopTerm::One => return out.push('1'),
            LoopTerm::Gen(v) => return out.push_str(vars.name(*v)),
            LoopTerm::Mul(a, b) => ("*", a, b),
            LoopTerm::LDiv(a, b) => (" \\ ", a, b),
            LoopTerm::RDiv(a, b) => (" / ", a, b),
        };
        if !top {
            out.push('(');
        }
        a.write_to(vars, out, false);
        out.push_str(op);
        b.write_to(vars, out, false);
        if !top {
            out.push(')');
        }
    }
}

impl fmt::Debug for LoopTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopTerm::One => f.write_str("1"),
            LoopTerm::Gen(v) => write!(f, "{v:?}"),
            LoopTerm::Mul(a, b) => write!(f, "({a:?}*{b:?})"),
            LoopTerm::LDiv(a, b) => write!(f, "({a:?} \\ {b:?})"),
            LoopTerm::RDiv(a, b) => write!(f, "({a:?} / {b:?})"),
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a LoopTerm,
    vars: &'a VarTable,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.term.write_to(self.vars, &mut s, true);
        f.write_str(&s)
    }
}

// ---------------------------------------------------------------- parsing

/// Parses a term over the existing alphabet.
pub fn parse(text: &str, vars: &VarTable) -> Result<LoopTerm, ParseError> {
    Parser::new(text, Lookup::Fixed(vars)).parse()
}

/// Parses a term, adding unseen identifiers to the alphabet in order of
/// first appearance.
pub fn parse_declaring(text: &str, vars: &mut VarTable) -> Result<LoopTerm, ParseError> {
    Parser::new(text, Lookup::Declaring(vars)).parse()
}

/// Identifiers of `text` in order of first appearance, without parsing.
pub fn identifiers(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_alphanumeric() && (!cur.is_empty() || c.is_ascii_alphabetic()) {
            cur.push(c);
        } else {
            if is_identifier(&cur) && !out.contains(&cur) {
                out.push(cur.clone());
            }
            cur.clear();
        }
    }
    out
}

enum Lookup<'a> {
    Fixed(&'a VarTable),
    Declaring(&'a mut VarTable),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Mul,
    LDiv,
    RDiv,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Lookup<'a>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, vars: Lookup<'a>) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<LoopTerm, ParseError> {
        let t = self.term()?;
        match self.peek() {
            None => Ok(t),
            Some(c) => Err(self.err(self.pos, format!("unexpected {:?}", c as char))),
        }
    }

    fn op(&mut self) -> Option<Op> {
        let op = match self.peek()? {
            b'*' => Op::Mul,
            b'\\' => Op::LDiv,
            b'/' => Op::RDiv,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    // term := atom { op atom }, all operators left-associative, equal precedence
    fn term(&mut self) -> Result<LoopTerm, ParseError> {
        let mut acc = self.atom()?;
        while let Some(op) = self.op() {
            let rhs = self.atom()?;
            acc = match op {
                Op::Mul => LoopTerm::mul(&acc, &rhs),
                Op::LDiv => LoopTerm::ldiv(&acc, &rhs),
                Op::RDiv => LoopTerm::rdiv(&acc, &rhs),
            };
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<LoopTerm, ParseError> {
        let start = match self.peek() {
            None => return Err(self.err(self.pos, "unexpected end of input")),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let t = self.term()?;
            if self.peek() != Some(b')') {
                return Err(self.err(self.pos, "expected ')'"));
            }
            self.pos += 1;
            return Ok(t);
        }
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            return if &self.src[start..self.pos] == b"1" {
                Ok(LoopTerm::One)
            } else {
                Err(self.err(start, "the only numeric literal is 1"))
            };
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            let id = match &mut self.vars {
                Lookup::Fixed(t) => t.get(name),
                Lookup::Declaring(t) => t.intern(name).ok(),
            };
            return id
                .map(LoopTerm::Gen)
                .ok_or_else(|| ParseError::UnknownIdent {
                    pos: start,
                    name: name.to_string(),
                });
        }
        Err(self.err(start, format!("unexpected {:?}", char::from(c))))
    }
}

// ---------------------------------------------------------------- evaluation

/// Evaluates `t` with generators sent to `env(v)` and the loop operations
/// interpreted as series product and divisions. Identical subterms are
/// evaluated once.
pub fn eval_with<F>(t: &LoopTerm, trunc: Trunc, env: F) -> Result<Series>
where
    F: Fn(VarId) -> Series,
{
    let mut memo: HashMap<LoopTerm, Arc<Series>> = HashMap::new();
    eval_memo(t, trunc, &env, &mut memo).map(|s| (*s).clone())
}

fn eval_memo<F>(
    t: &LoopTerm,
    trunc: Trunc,
    env: &F,
    memo: &mut HashMap<LoopTerm, Arc<Series>>,
) -> Result<Arc<Series>>
where
    F: Fn(VarId) -> Series,
{
    if let Some(s) = memo.get(t) {
        return Ok(s.clone());
    }
    let s = match t {
        LoopTerm::One => Series::one(trunc),
        LoopTerm::Gen(v) => env(*v),
        LoopTerm::Mul(a, b) => {
            let (a, b) = (
                eval_memo(a, trunc, env, memo)?,
                eval_memo(b, trunc, env, memo)?,
            );
            a.mul(&b)?
        }
        LoopTerm::LDiv(a, b) => {
            let (a, b) = (
                eval_memo(a, trunc, env, memo)?,
                eval_memo(b, trunc, env, memo)?,
            );
            a.left_div(&b)?
        }
        LoopTerm::RDiv(a, b) => {
            let (a, b) = (
                eval_memo(a, trunc, env, memo)?,
                eval_memo(b, trunc, env, memo)?,
            );
            a.right_div(&b)?
        }
    };
    let s = Arc::new(s);
    memo.insert(t.clone(), s.clone());
    Ok(s)
}

/// The Magnus expansion: `x ↦ 1 + x` on generators.
pub fn magnus(t: &LoopTerm, trunc: Trunc) -> Series {
    eval_with(t, trunc, |v| Series::one_plus_var(v, trunc))
        .expect("Magnus images of loop words always have constant term 1")
}

/// Dimension degree of a loop word at a given truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimDegree {
    /// The expansion minus 1 starts in this degree.
    Exact(usize),
    /// The truncated expansion is exactly 1.
    ExceedsTrunc,
}

impl DimDegree {
    /// `self >= d`, with "exceeds N" counting as at least anything.
    pub fn at_least(self, d: usize) -> bool {
        match self {
            DimDegree::Exact(k) => k >= d,
            DimDegree::ExceedsTrunc => true,
        }
    }
}

impl fmt::Display for DimDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimDegree::Exact(d) => write!(f, "{d}"),
            DimDegree::ExceedsTrunc => f.write_str("exceeds N"),
        }
    }
}

pub fn dim_degree_of(expansion: &Series) -> DimDegree {
    match expansion.lowest_term() {
        Some((d, _)) => DimDegree::Exact(d),
        None => DimDegree::ExceedsTrunc,
    }
}

pub fn dim_degree(t: &LoopTerm, trunc: Trunc) -> DimDegree {
    dim_degree_of(&magnus(t, trunc))
}

/// Coefficients of a loop word on the monomials in `x_i - 1` up to some
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorExpansion {
    pub order: usize,
    pub coefficients: BTreeMap<Monomial, Coeff>,
    /// Degree `order + 1` terms are present.
    pub remainder_known_nonzero: bool,
}

impl TaylorExpansion {
    pub fn render(&self, vars: &VarTable) -> String {
        let items: Vec<String> = self
            .coefficients
            .iter()
            .map(|(m, c)| format!("{}:{c}", m.display(vars)))
            .collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// The monomial `mu` in the augmentation ideal maps to exactly `mu'` under
/// the linear extension of the Magnus map, so the Taylor coefficients are
/// the low-degree coefficients of the expansion.
pub fn taylor(t: &LoopTerm, order: usize) -> TaylorExpansion {
    let probe = magnus(t, Trunc::new(order + 1));
    let coefficients = probe
        .terms()
        .into_iter()
        .filter(|(m, _)| m.degree() <= order)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    let remainder_known_nonzero = probe.part(order + 1).is_some_and(|p| !p.is_empty());
    TaylorExpansion {
        order,
        coefficients,
        remainder_known_nonzero,
    }
}

// ---------------------------------------------------------------- sampling

/// A random word of depth at most `depth_bound`, deterministic in `seed`.
pub fn random_term(gens: &[VarId], depth_bound: usize, seed: u64) -> LoopTerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_term_with(gens, depth_bound, &mut rng)
}

/// Below the depth bound a leaf is chosen with probability 1/4, otherwise
/// one of the three operations with equal weight. Leaves are uniform over
/// the unit and the generators.
pub fn random_term_with<R: Rng>(gens: &[VarId], depth_bound: usize, rng: &mut R) -> LoopTerm {
    if depth_bound == 0 || rng.gen_range(0..4) == 0 {
        let k = rng.gen_range(0..=gens.len());
        return if k == gens.len() {
            LoopTerm::One
        } else {
            LoopTerm::Gen(gens[k])
        };
    }
    let a = random_term_with(gens, depth_bound - 1, rng);
    let b = random_term_with(gens, depth_bound - 1, rng);
    match rng.gen_range(0..3) {
        0 => LoopTerm::mul(&a, &b),
        1 => LoopTerm::ldiv(&a, &b),
        _ => LoopTerm::rdiv(&a, &b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> VarTable {
        VarTable::from_names(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn parses_associator() {
        let t = table();
        let a = parse("(x*(y*z)) \\ ((x*y)*z)", &t).unwrap();
        let g = |i| LoopTerm::Gen(VarId(i));
        let expected = LoopTerm::ldiv(
            &LoopTerm::mul(&g(0), &LoopTerm::mul(&g(1), &g(2))),
            &LoopTerm::mul(&LoopTerm::mul(&g(0), &g(1)), &g(2)),
        );
        assert_eq!(a, expected);
        assert_eq!(a.display(&t).to_string(), "(x*(y*z)) \\ ((x*y)*z)");
        assert_eq!(parse("1", &t).unwrap(), LoopTerm::One);
    }

    #[test]
    fn operators_are_left_associative_with_equal_precedence() {
        let t = table();
        let a = parse("x*y\\z/x", &t).unwrap();
        assert_eq!(a.display(&t).to_string(), "((x*y) \\ z) / x");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let t = table();
        assert_eq!(
            parse("x * w", &t),
            Err(ParseError::UnknownIdent {
                pos: 4,
                name: "w".into()
            })
        );
        assert!(matches!(
            parse("(x*y", &t),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse("x y", &t),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse("2", &t),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse("", &t),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse("x*", &t),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn declaring_parser_grows_the_table() {
        let mut t = VarTable::new();
        let a = parse_declaring("b*(a\\b)", &mut t).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.name(VarId(0)), "b");
        assert_eq!(a.vars().len(), 2);
        assert_eq!(identifiers("b*(a\\b) / c1"), ["b", "a", "c1"]);
    }

    #[test]
    fn magnus_of_generators_and_products() {
        let t = table();
        let n = Trunc::new(5);
        let x = LoopTerm::Gen(VarId(0));
        assert_eq!(magnus(&x, n).display(&t).to_string(), "1 + x");
        let xy = parse("x*y", &t).unwrap();
        assert_eq!(magnus(&xy, n).display(&t).to_string(), "1 + x + y + (x*y)");
        let inv = parse("x\\1", &t).unwrap();
        assert_eq!(
            magnus(&inv, n).display(&t).to_string(),
            "1 - x + (x*x) - (x*(x*x)) + (x*(x*(x*x))) - (x*(x*(x*(x*x))))"
        );
    }

    #[test]
    fn dimension_degrees() {
        let t = table();
        let n = Trunc::new(5);
        assert_eq!(dim_degree(&parse("x", &t).unwrap(), n), DimDegree::Exact(1));
        let assoc = parse("(x*(y*z)) \\ ((x*y)*z)", &t).unwrap();
        assert_eq!(dim_degree(&assoc, n), DimDegree::Exact(3));
        let comm = parse("(y*x) \\ (x*y)", &t).unwrap();
        assert_eq!(dim_degree(&comm, n), DimDegree::Exact(2));
        assert_eq!(
            dim_degree(&parse("x\\x", &t).unwrap(), n),
            DimDegree::ExceedsTrunc
        );
        assert!(DimDegree::ExceedsTrunc.at_least(100));
    }

    #[test]
    fn taylor_coefficients() {
        let t = table();
        let x = parse("x", &t).unwrap();
        let tx = taylor(&x, 3);
        assert_eq!(tx.render(&t), "{x:1}");
        assert!(!tx.remainder_known_nonzero);

        let inv = taylor(&parse("x\\1", &t).unwrap(), 3);
        assert_eq!(inv.render(&t), "{x:-1, (x*x):1, (x*(x*x)):-1}");
        assert!(inv.remainder_known_nonzero);

        let xy = taylor(&parse("x*y", &t).unwrap(), 2);
        assert_eq!(xy.render(&t), "{x:1, y:1, (x*y):1}");
        assert!(!xy.remainder_known_nonzero);
    }

    #[test]
    fn substitution() {
        let t = table();
        let (x, y, z) = (
            LoopTerm::Gen(VarId(0)),
            LoopTerm::Gen(VarId(1)),
            LoopTerm::Gen(VarId(2)),
        );
        let w = parse("y*z", &t).unwrap();
        assert_eq!(
            x.substitute(&HashMap::from([(VarId(0), w.clone())]))
                .unwrap(),
            w
        );

        let assoc = parse("(x*(y*z)) \\ ((x*y)*z)", &t).unwrap();
        let sigma = HashMap::from([
            (VarId(0), parse("x*y", &t).unwrap()),
            (VarId(1), y),
            (VarId(2), z),
        ]);
        let sub = assoc.substitute(&sigma).unwrap();
        assert_eq!(
            sub.display(&t).to_string(),
            "((x*y)*(y*z)) \\ (((x*y)*y)*z)"
        );
        assert!(assoc.substitute(&HashMap::new()).is_err());
    }

    #[test]
    fn random_terms_are_deterministic() {
        let gens = [VarId(0), VarId(1)];
        for seed in 0..20 {
            assert_eq!(random_term(&gens, 3, seed), random_term(&gens, 3, seed));
            assert!(random_term(&gens, 3, seed).depth() <= 3);
            assert_eq!(random_term(&gens, 0, seed).depth(), 0);
        }
    }

    #[test]
    fn random_terms_use_every_constructor() {
        let gens = [VarId(0), VarId(1)];
        let mut seen = [false; 5];
        fn walk(t: &LoopTerm, seen: &mut [bool; 5]) {
            match t {
                LoopTerm::One => seen[0] = true,
                LoopTerm::Gen(_) => seen[1] = true,
                LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => {
                    let k = match t {
                        LoopTerm::Mul(..) => 2,
                        LoopTerm::LDiv(..) => 3,
                        _ => 4,
                    };
                    seen[k] = true;
                    walk(a, seen);
                    walk(b, seen);
                }
            }
        }
        for seed in 0..1000 {
            walk(&random_term(&gens, 3, seed), &mut seen);
        }
        assert!(seen.iter().all(|&s| s));
    }
}
