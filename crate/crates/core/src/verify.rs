//! Exact checks of the free-loop identities: balancedness, multilinear
//! parts, deviations versus primitive operations, primitivity of lowest
//! terms and compatibility with the dimension filtration.

use std::fmt;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::deviations::{associator, commutator, deviation, p_deviation, DeviationIndex};
use crate::error::{Error, Result};
use crate::loop_term::{dim_degree_of, magnus, DimDegree, LoopTerm};
use crate::magma::VarSet;
use crate::series::{Series, Trunc};
use crate::su_ops::{p, POpRequest};
use crate::tensor::is_primitive;
use crate::vars::{VarId, VarTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of one verification case. A failing report always carries a
/// witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub case: String,
    pub params: Map<String, Value>,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub truncation: usize,
    /// Wall time; left out of records unless timing is requested.
    pub millis: Option<u64>,
}

impl VerificationReport {
    fn new(case: impl Into<String>, truncation: usize) -> Self {
        VerificationReport {
            case: case.into(),
            params: Map::new(),
            verdict: Verdict::Pass,
            witness: None,
            truncation,
            millis: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn fail(mut self, witness: String) -> Self {
        self.verdict = Verdict::Fail;
        self.witness = Some(witness);
        self
    }

    fn inconclusive(mut self, why: String) -> Self {
        self.verdict = Verdict::Inconclusive;
        self.witness = Some(why);
        self
    }

    fn timed(mut self, start: Instant) -> Self {
        self.millis = Some(start.elapsed().as_millis() as u64);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One JSON object, without timing unless `timing` is set.
    pub fn to_record(&self, timing: bool) -> String {
        let mut r = self.clone();
        if !timing {
            r.millis = None;
        }
        serde_json::to_string(&r).expect("reports serialize")
    }
}

/// First monomial, in canonical order, where `got` and `expected` differ.
pub fn first_difference(got: &Series, expected: &Series, vars: &VarTable) -> Option<String> {
    if got.constant_term() != expected.constant_term() {
        return Some(format!(
            "constant term: expected {}, got {}",
            expected.constant_term(),
            got.constant_term()
        ));
    }
    let diff = got.sub(expected).ok()?;
    let (m, _) = diff.terms().into_iter().next()?;
    Some(format!(
        "{}: expected {}, got {}",
        m.display(vars),
        expected.coeff(m),
        got.coeff(m)
    ))
}

/// Every monomial of `M(t) - 1` contains each variable of `set`.
pub fn is_balanced(t: &LoopTerm, set: &VarSet, trunc: Trunc) -> bool {
    unbalanced_witness(&magnus(t, trunc), set).is_none()
}

fn unbalanced_witness<'a>(
    expansion: &'a Series,
    set: &VarSet,
) -> Option<&'a crate::magma::Monomial> {
    expansion
        .terms()
        .into_iter()
        .map(|(m, _)| m)
        .find(|m| !m.is_balanced_on(set))
}

/// `φ(x, y) = (φ(x)·φ(y)) \ φ(x·y)`.
pub fn phi_xy(phi: &LoopTerm, x: VarId, y: VarId) -> Result<LoopTerm> {
    if phi.vars().contains(&y) {
        return Err(Error::Usage(format!("generator {y:?} already occurs in φ")));
    }
    let at_y = phi.replace_var(x, &LoopTerm::Gen(y));
    let at_xy = phi.replace_var(x, &LoopTerm::mul(&LoopTerm::Gen(x), &LoopTerm::Gen(y)));
    Ok(LoopTerm::ldiv(&LoopTerm::mul(phi, &at_y), &at_xy))
}

/// Balancedness of `φ(x, y)` on `S ∪ {y}` for `φ` balanced on `S`.
pub fn verify_balance_step(
    case: &str,
    phi: &LoopTerm,
    set: &VarSet,
    x: VarId,
    y: VarId,
    trunc: Trunc,
    vars: &VarTable,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let report = VerificationReport::new(case, trunc.degree)
        .param("phi", phi.display(vars).to_string())
        .param("x", vars.name(x))
        .param("y", vars.name(y))
        .param("set_size", set.len());
    if !set.contains(&x) {
        return Err(Error::Usage("slot variable must belong to S".into()));
    }
    let base = magnus(phi, trunc);
    if let Some(m) = unbalanced_witness(&base, set) {
        return Ok(report
            .fail(format!("φ itself is unbalanced: {}", m.display(vars)))
            .timed(start));
    }
    let step = phi_xy(phi, x, y)?;
    let mut enlarged = set.clone();
    enlarged.insert(y);
    let expansion = magnus(&step, trunc);
    let report = report.param("terms", expansion.len());
    Ok(match unbalanced_witness(&expansion, &enlarged) {
        None => report,
        Some(m) => report.fail(format!("unbalanced monomial {}", m.display(vars))),
    }
    .timed(start))
}

/// A comparison of the multilinear parts of `φ(w, y)` and `φ(w·y)`.
#[derive(Clone, Debug)]
pub struct MultilinearCase {
    pub phi: LoopTerm,
    pub x: VarId,
    pub set: VarSet,
    pub set_hat: VarSet,
    pub w: LoopTerm,
    pub y: VarId,
}

/// `L_{Ŝ∪{y}}(φ(w, y)) = L_{Ŝ∪{y}}(φ(w·y))`, with the expansions computed
/// under multilinear pruning at degree `|Ŝ| + 1`.
pub fn verify_multilinear_parts(
    case: &str,
    c: &MultilinearCase,
    vars: &VarTable,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if !c.set.is_subset(&c.set_hat) || c.set.len() < 2 || !c.set.contains(&c.x) {
        return Err(Error::Usage("need x ∈ S ⊆ Ŝ and |S| >= 2".into()));
    }
    if c.set_hat.contains(&c.y) {
        return Err(Error::Usage("y must lie outside Ŝ".into()));
    }
    if !c.phi.vars().is_subset(&c.set) || !c.w.vars().is_subset(&c.set_hat) {
        return Err(Error::Usage("φ must lie in F(S) and w in F(Ŝ)".into()));
    }
    let degree = c.set_hat.len() + 1;
    let report = VerificationReport::new(case, degree)
        .param("phi", c.phi.display(vars).to_string())
        .param("w", c.w.display(vars).to_string());
    if !is_balanced(&c.phi, &c.set, Trunc::new(c.set.len() + 1)) {
        return Err(Error::Usage("φ must be balanced on S".into()));
    }
    let trunc = Trunc::multilinear(degree);
    let step = phi_xy(&c.phi, c.x, c.y)?;
    let lhs_term = step.replace_var(c.x, &c.w);
    let wy = LoopTerm::mul(&c.w, &LoopTerm::Gen(c.y));
    let rhs_term = c.phi.replace_var(c.x, &wy);
    let mut target = c.set_hat.clone();
    target.insert(c.y);
    let lhs = magnus(&lhs_term, trunc).multilinear_part(&target);
    let rhs = magnus(&rhs_term, trunc).multilinear_part(&target);
    let report = report.param("nonzero", !rhs.is_zero());
    Ok(match first_difference(&lhs, &rhs, vars) {
        None => report,
        Some(w) => report.fail(w),
    }
    .timed(start))
}

/// `M(P_{m,n}(x, y, z)) = 1 + p_{m,n}(x; y; z) + O(m + n + 2)` on fresh
/// generators, with the loop side and the algebra side computed
/// independently. `prune` selects multilinear pruning.
pub fn verify_p_deviation(m: usize, n: usize, prune: bool) -> Result<VerificationReport> {
    let start = Instant::now();
    let top = m + n + 1;
    let trunc = Trunc {
        degree: top,
        multilinear: prune,
    };
    let (req, vars) = POpRequest::on_generators(m, n, trunc)?;
    let gens: Vec<LoopTerm> = vars.ids().map(LoopTerm::Gen).collect();
    let word = p_deviation(&gens[..m], &gens[m..m + n], &gens[m + n])?;
    let expansion = magnus(&word, trunc);
    let algebra = p(&req)?;
    let report = VerificationReport::new(format!("p_deviation/m={m},n={n}"), top)
        .param("m", m)
        .param("n", n)
        .param("prune", prune)
        .param("terms", algebra.len());
    for d in 1..top {
        if let Some((mono, c)) = expansion.homogeneous_part(d)?.terms().first() {
            return Ok(report
                .fail(format!("degree {d} term {}: {c}", mono.display(&vars)))
                .timed(start));
        }
    }
    let lowest = expansion.homogeneous_part(top)?;
    Ok(match first_difference(&lowest, &algebra, &vars) {
        None => report,
        Some(w) => report.fail(w),
    }
    .timed(start))
}

/// The lowest homogeneous part of `M(t) – 1` is primitive.
pub fn verify_primitive_lowest(
    case: &str,
    t: &LoopTerm,
    trunc: Trunc,
    vars: &VarTable,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let report =
        VerificationReport::new(case, trunc.degree).param("term", t.display(vars).to_string());
    let expansion = magnus(t, trunc).minus_one();
    let Some((d, low)) = expansion.lowest_term() else {
        return Ok(report
            .inconclusive(format!("expansion is 1 through degree {}", trunc.degree))
            .timed(start));
    };
    let report = report.param("degree", d).param("terms", low.len());
    Ok(if is_primitive(&low)? {
        report
    } else {
        report.fail(format!(
            "lowest part {} is not primitive",
            low.display(vars)
        ))
    }
    .timed(start))
}

/// `p_{r,s}` on generators is primitive.
pub fn verify_pop_primitive(r: usize, s: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let (req, vars) = POpRequest::on_generators(r, s, Trunc::new(r + s + 1))?;
    let val = p(&req)?;
    let report = VerificationReport::new(format!("primitive/p{r}{s}"), r + s + 1)
        .param("r", r)
        .param("s", s);
    Ok(if is_primitive(&val)? {
        report
    } else {
        report.fail(format!(
            "p_{{{r},{s}}} = {} is not primitive",
            val.display(&vars)
        ))
    }
    .timed(start))
}

/// Required lower bound for an operation on arguments of the given
/// degrees: `None` when some argument already exceeds the truncation.
fn degree_sum(degrees: &[DimDegree]) -> Option<usize> {
    degrees.iter().try_fold(0, |acc, d| match d {
        DimDegree::Exact(k) => Some(acc + k),
        DimDegree::ExceedsTrunc => None,
    })
}

fn meets(result: DimDegree, bound: Option<usize>) -> bool {
    match bound {
        Some(b) => result.at_least(b),
        None => result == DimDegree::ExceedsTrunc,
    }
}

/// Commutator, associator and the three level-one deviations of four
/// sampled words land at least as deep in the filtration as the sum of
/// their arguments' dimension degrees.
pub fn verify_grading(
    case: &str,
    samples: [&LoopTerm; 4],
    trunc: Trunc,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let degs: Vec<DimDegree> = samples
        .iter()
        .map(|t| dim_degree_of(&magnus(t, trunc)))
        .collect();
    let [u, v, w, x] = samples;
    let mut report = VerificationReport::new(case, trunc.degree).param(
        "degrees",
        degs.iter()
            .map(|d| Value::from(d.to_string()))
            .collect::<Vec<_>>(),
    );
    let mut checks: Vec<(String, LoopTerm, Option<usize>)> = vec![
        (
            "commutator".into(),
            commutator(u, v),
            degree_sum(&degs[..2]),
        ),
        (
            "associator".into(),
            associator(u, v, w),
            degree_sum(&degs[..3]),
        ),
    ];
    for k in 1..=3 {
        let idx = DeviationIndex::new(vec![k])?;
        let dev = deviation(&[u.clone(), v.clone(), w.clone(), x.clone()], &idx)?;
        checks.push((format!("deviation_{k}"), dev, degree_sum(&degs)));
    }
    let mut observed = Vec::new();
    for (name, term, bound) in checks {
        let got = dim_degree_of(&magnus(&term, trunc));
        observed.push(Value::from(format!("{name}:{got}")));
        if !meets(got, bound) && report.witness.is_none() {
            let need = bound.map_or("exceeds N".to_string(), |b| format!(">= {b}"));
            report = report.fail(format!("{name}: dimension degree {got}, need {need}"));
        }
    }
    Ok(report.param("observed", observed).timed(start))
}

/// Loop axioms in the unit-constant series for `a = M(s)`, `b = M(t)`.
pub fn verify_loop_axioms(
    case: &str,
    s: &LoopTerm,
    t: &LoopTerm,
    trunc: Trunc,
    vars: &VarTable,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (a, b) = (magnus(s, trunc), magnus(t, trunc));
    let ab = a.mul(&b)?;
    let checks = [
        ("a\\(ab)=b", a.left_div(&ab)?, b.clone()),
        ("(ab)/b=a", ab.right_div(&b)?, a.clone()),
        ("a(a\\b)=b", a.mul(&a.left_div(&b)?)?, b.clone()),
        ("(a/b)b=a", a.right_div(&b)?.mul(&b)?, a.clone()),
    ];
    let mut report = VerificationReport::new(case, trunc.degree)
        .param("a", s.display(vars).to_string())
        .param("b", t.display(vars).to_string());
    for (name, got, expected) in checks {
        if let Some(w) = first_difference(&got, &expected, vars) {
            report = report.fail(format!("{name}: {w}"));
            break;
        }
    }
    Ok(report.timed(start))
}
