//! Non-associative monomials: binary trees with variable leaves.
//!
//! A [`Monomial`] is stored as its serialization: the preorder structure
//! bits (`0` for a product node, `1` for a leaf) followed by the leaf
//! indices from left to right. Ordering is degree-major and then
//! lexicographic on that serialization, so left-nested products sort
//! before right-nested ones of the same leaves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vars::{VarId, VarTable};

pub type VarSet = BTreeSet<VarId>;

const PROD: u16 = 0;
const LEAF: u16 = 1;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    // field order matters for the derived `Ord`
    degree: u16,
    code: Arc<[u16]>,
}

/// One level of a monomial's tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoView {
    Leaf(VarId),
    Prod(Monomial, Monomial),
}

impl Monomial {
    pub fn leaf(v: VarId) -> Self {
        Monomial {
            degree: 1,
            code: Arc::from([LEAF, v.0]),
        }
    }

    /// The free magma product `(a*b)`.
    pub fn prod(a: &Monomial, b: &Monomial) -> Self {
        let (p, q) = (a.degree as usize, b.degree as usize);
        let degree = u16::try_from(p + q).expect("monomial degree overflow");
        let mut code = Vec::with_capacity(3 * (p + q) - 1);
        code.push(PROD);
        code.extend_from_slice(a.shape());
        code.extend_from_slice(b.shape());
        code.extend_from_slice(a.leaf_codes());
        code.extend_from_slice(b.leaf_codes());
        Monomial {
            degree,
            code: code.into(),
        }
    }

    /// `(((v1*v2)*v3)...)*vk`.
    pub fn left_normed(vs: &[VarId]) -> Result<Self> {
        let (first, rest) = vs
            .split_first()
            .ok_or_else(|| Error::Usage("left-normed product of an empty list".into()))?;
        Ok(rest.iter().fold(Monomial::leaf(*first), |acc, v| {
            Monomial::prod(&acc, &Monomial::leaf(*v))
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    fn shape(&self) -> &[u16] {
        &self.code[..2 * self.degree() - 1]
    }

    fn leaf_codes(&self) -> &[u16] {
        &self.code[2 * self.degree() - 1..]
    }

    pub fn leaves(&self) -> impl ExactSizeIterator<Item = VarId> + '_ {
        self.leaf_codes().iter().map(|&i| VarId(i))
    }

    pub fn as_leaf(&self) -> Option<VarId> {
        (self.degree == 1).then(|| VarId(self.code[1]))
    }

    pub fn view(&self) -> MonoView {
        if let Some(v) = self.as_leaf() {
            return MonoView::Leaf(v);
        }
        let shape = self.shape();
        let end = subtree_end(shape, 1);
        let left_deg = shape[1..end].iter().filter(|&&b| b == LEAF).count();
        let leaves = self.leaf_codes();
        let left = Self::from_parts(&shape[1..end], &leaves[..left_deg]);
        let right = Self::from_parts(&shape[end..], &leaves[left_deg..]);
        MonoView::Prod(left, right)
    }

    fn from_parts(shape: &[u16], leaves: &[u16]) -> Self {
        let mut code = Vec::with_capacity(shape.len() + leaves.len());
        code.extend_from_slice(shape);
        code.extend_from_slice(leaves);
        Monomial {
            degree: leaves.len() as u16,
            code: code.into(),
        }
    }

    /// Canonical serialization: structure bits then leaf indices.
    pub fn serialize(&self) -> Vec<u16> {
        self.code.to_vec()
    }

    pub fn deserialize(code: &[u16]) -> Result<Self> {
        let bad = || Error::Usage(format!("malformed monomial code {code:?}"));
        if code.len() < 2 || code.len() % 3 != 2 {
            return Err(bad());
        }
        let degree = (code.len() + 1) / 3;
        let shape = &code[..2 * degree - 1];
        if shape.iter().any(|&b| b > LEAF) || subtree_end_checked(shape, 0) != Some(shape.len()) {
            return Err(bad());
        }
        Ok(Monomial {
            degree: degree as u16,
            code: code.into(),
        })
    }

    pub fn multidegree(&self) -> BTreeMap<VarId, usize> {
        let mut m = BTreeMap::new();
        for v in self.leaves() {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }

    /// Contains each element of `set` at least once.
    pub fn is_balanced_on(&self, set: &VarSet) -> bool {
        set.iter().all(|v| self.leaf_codes().contains(&v.0))
    }

    /// Each element of `set` exactly once and nothing else.
    pub fn is_multilinear_on(&self, set: &VarSet) -> bool {
        if self.degree() != set.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        self.leaves().all(|v| set.contains(&v) && seen.insert(v))
    }

    /// No variable occurs twice.
    pub fn is_multilinear(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.leaves().all(|v| seen.insert(v))
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> MonoDisplay<'a> {
        MonoDisplay { mono: self, vars }
    }

    fn write_to(&self, vars: &VarTable, out: &mut String) {
        match self.view() {
            MonoView::Leaf(v) => out.push_str(vars.name(v)),
            MonoView::Prod(a, b) => {
                out.push('(');
                a.write_to(vars, out);
                out.push('*');
                b.write_to(vars, out);
                out.push(')');
            }
        }
    }
}

/// Every monomial of degree `d` with leaves drawn from `vars`, in canonical
/// order.
pub fn all_monomials(vars: &[VarId], d: usize) -> Vec<Monomial> {
    if d == 0 {
        return Vec::new();
    }
    let mut by_degree: Vec<Vec<Monomial>> = vec![Vec::new()];
    by_degree.push(vars.iter().map(|&v| Monomial::leaf(v)).collect());
    for k in 2..=d {
        let mut level = Vec::new();
        for i in 1..k {
            for a in &by_degree[i] {
                for b in &by_degree[k - i] {
                    level.push(Monomial::prod(a, b));
                }
            }
        }
        by_degree.push(level);
    }
    let mut out = by_degree.pop().unwrap_or_default();
    out.sort();
    out
}

fn subtree_end(shape: &[u16], start: usize) -> usize {
    subtree_end_checked(shape, start).expect("corrupt monomial shape")
}

fn subtree_end_checked(shape: &[u16], start: usize) -> Option<usize> {
    let mut need = 1usize;
    let mut j = start;
    while need > 0 {
        match shape.get(j)? {
            &PROD => need += 1,
            _ => need -= 1,
        }
        j += 1;
    }
    Some(j)
}

pub struct MonoDisplay<'a> {
    mono: &'a Monomial,
    vars: &'a VarTable,
}

impl fmt::Display for MonoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.mono.write_to(self.vars, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.view() {
            MonoView::Leaf(v) => write!(f, "{v:?}"),
            MonoView::Prod(a, b) => write!(f, "({a:?}*{b:?})"),
        }
    }
}
