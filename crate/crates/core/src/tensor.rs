//! Truncated elements of the tensor square and the comultiplication.

use rustc_hash::FxHashMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::magma::{MonoView, Monomial};
use crate::series::Series;
use crate::vars::VarTable;

/// A basis tensor `left ⊗ right`; `None` stands for the unit.
pub type TensorKey = (Option<Monomial>, Option<Monomial>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSeries {
    degree: usize,
    terms: FxHashMap<TensorKey, Coeff>,
}

fn key_degree(k: &TensorKey) -> usize {
    k.0.as_ref().map_or(0, Monomial::degree) + k.1.as_ref().map_or(0, Monomial::degree)
}

fn mul_opt(a: &Option<Monomial>, b: &Option<Monomial>) -> Option<Monomial> {
    match (a, b) {
        (None, None) => None,
        (Some(m), None) | (None, Some(m)) => Some(m.clone()),
        (Some(a), Some(b)) => Some(Monomial::prod(a, b)),
    }
}

impl TensorSeries {
    pub fn zero(degree: usize) -> Self {
        TensorSeries {
            degree,
            terms: FxHashMap::default(),
        }
    }

    /// Total-degree bound, the unit counting as degree 0.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add_term(&mut self, key: TensorKey, c: &Coeff) {
        if c.is_zero() || key_degree(&key) > self.degree {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, key: &TensorKey) -> Coeff {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorKey, &Coeff)> {
        self.terms.iter()
    }

    /// Terms sorted by (left, right), unit first.
    pub fn sorted_terms(&self) -> Vec<(&TensorKey, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), &-c);
        }
        Ok(out)
    }

    /// `(a1 ⊗ a2)(b1 ⊗ b2) = a1 b1 ⊗ a2 b2`.
    pub fn mul(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_same(other)?;
        let mut out = TensorSeries::zero(self.degree);
        for (ka, ca) in &self.terms {
            let da = key_degree(ka);
            for (kb, cb) in &other.terms {
                if da + key_degree(kb) > self.degree {
                    continue;
                }
                let key = (mul_opt(&ka.0, &kb.0), mul_opt(&ka.1, &kb.1));
                out.add_term(key, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// `s ⊗ 1 + 1 ⊗ s` for `s` without constant term.
    pub fn primitive_image(s: &Series) -> TensorSeries {
        let mut out = TensorSeries::zero(s.trunc().degree);
        for (m, c) in s.terms_unordered() {
            out.add_term((Some(m.clone()), None), c);
            out.add_term((None, Some(m.clone())), c);
        }
        out
    }

    fn check_same(&self, other: &TensorSeries) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::TruncationMismatch(
                format!("N={}", self.degree),
                format!("N={}", other.degree),
            ));
        }
        Ok(())
    }

    pub fn render(&self, vars: &VarTable) -> String {
        let side = |m: &Option<Monomial>| match m {
            None => "1".to_string(),
            Some(m) => m.display(vars).to_string(),
        };
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|((l, r), c)| {
                if c.is_one() {
                    format!("{}⊗{}", side(l), side(r))
                } else {
                    format!("{c}*{}⊗{}", side(l), side(r))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Comultiplication of a single monomial as the multiplicative extension
/// of `v ↦ v⊗1 + 1⊗v`.
pub fn comult_monomial(m: &Monomial) -> Vec<(TensorKey, i64)> {
    match m.view() {
        MonoView::Leaf(_) => vec![((Some(m.clone()), None), 1), ((None, Some(m.clone())), 1)],
        MonoView::Prod(a, b) => {
            let (da, db) = (comult_monomial(&a), comult_monomial(&b));
            let mut acc: FxHashMap<TensorKey, i64> = FxHashMap::default();
            for (ka, ca) in &da {
                for (kb, cb) in &db {
                    let key = (mul_opt(&ka.0, &kb.0), mul_opt(&ka.1, &kb.1));
                    *acc.entry(key).or_insert(0) += ca * cb;
                }
            }
            acc.into_iter().collect()
        }
    }
}

/// `δ(s)`: the algebra homomorphism with `δ(1) = 1⊗1` and every variable
/// primitive, truncated at total degree `N`.
pub fn comult(s: &Series) -> TensorSeries {
    let mut out = TensorSeries::zero(s.trunc().degree);
    out.add_term((None, None), s.constant_term());
    for (m, c) in s.terms_unordered() {
        for (key, k) in comult_monomial(m) {
            out.add_term(key, &(c * &Coeff::from_int(k)));
        }
    }
    out
}

/// `δ(s) = s⊗1 + 1⊗s`. Requires a zero constant term.
pub fn is_primitive(s: &Series) -> Result<bool> {
    if !s.constant_term().is_zero() {
        return Err(Error::Usage(format!(
            "primitivity is defined for series without constant term, got {}",
            s.constant_term()
        )));
    }
    Ok(comult(s).sub(&TensorSeries::primitive_image(s))?.is_zero())
}
