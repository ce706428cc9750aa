//! Truncated power series in non-associative variables over the rationals.
//!
//! A [`Series`] is an element of the free non-associative power-series
//! algebra modulo all monomials of degree greater than its truncation
//! degree. With [`Trunc::multilinear`] set, it is additionally reduced
//! modulo the span of monomials in which some variable repeats; that span
//! is a two-sided ideal (multidegrees add under products), so every
//! operation below is still a homomorphic image of the unpruned one.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::magma::{Monomial, VarSet};
use crate::vars::{VarId, VarTable};

pub type TermMap = FxHashMap<Monomial, Coeff>;

/// Truncation model shared by all operands of an operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Trunc {
    pub degree: usize,
    /// Drop every monomial in which a variable occurs more than once.
    pub multilinear: bool,
}

impl Trunc {
    pub fn new(degree: usize) -> Self {
        Trunc {
            degree,
            multilinear: false,
        }
    }

    pub fn multilinear(degree: usize) -> Self {
        Trunc {
            degree,
            multilinear: true,
        }
    }

    fn admits(&self, m: &Monomial) -> bool {
        m.degree() <= self.degree && (!self.multilinear || m.is_multilinear())
    }
}

impl fmt::Display for Trunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multilinear {
            write!(f, "N={} (multilinear)", self.degree)
        } else {
            write!(f, "N={}", self.degree)
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    trunc: Trunc,
    constant: Coeff,
    /// `parts[d - 1]` holds the degree-`d` terms, for `d = 1..=trunc.degree`
    parts: Vec<TermMap>,
}

impl Series {
    pub fn zero(trunc: Trunc) -> Self {
        Series {
            trunc,
            constant: Coeff::zero(),
            parts: vec![TermMap::default(); trunc.degree],
        }
    }

    pub fn constant(c: Coeff, trunc: Trunc) -> Self {
        let mut s = Self::zero(trunc);
        s.constant = c;
        s
    }

    pub fn one(trunc: Trunc) -> Self {
        Self::constant(Coeff::one(), trunc)
    }

    /// `c * m`, or zero if `m` is cut off by the truncation.
    pub fn monomial(m: Monomial, c: Coeff, trunc: Trunc) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(m, c);
        s
    }

    pub fn var(v: VarId, trunc: Trunc) -> Self {
        Self::monomial(Monomial::leaf(v), Coeff::one(), trunc)
    }

    /// `1 + v`: the image of a free-loop generator.
    pub fn one_plus_var(v: VarId, trunc: Trunc) -> Self {
        let mut s = Self::var(v, trunc);
        s.constant = Coeff::one();
        s
    }

    pub fn from_terms<I>(constant: Coeff, terms: I, trunc: Trunc) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut s = Self::constant(constant, trunc);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    /// Accumulates `c * m`, dropping it if the truncation cuts it off.
    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if self.trunc.admits(&m) {
            let d = m.degree();
            accumulate(&mut self.parts[d - 1], m, &c);
        }
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn constant_term(&self) -> &Coeff {
        &self.constant
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.parts
            .get(m.degree().wrapping_sub(1))
            .and_then(|p| p.get(m))
            .cloned()
            .unwrap_or_default()
    }

    /// Number of stored non-constant terms.
    pub fn len(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.parts.iter().all(|p| p.is_empty())
    }

    pub fn is_one(&self) -> bool {
        self.constant.is_one() && self.parts.iter().all(|p| p.is_empty())
    }

    /// Non-constant terms in canonical monomial order.
    pub fn terms(&self) -> Vec<(&Monomial, &Coeff)> {
        let mut out = Vec::with_capacity(self.len());
        for p in &self.parts {
            let start = out.len();
            out.extend(p.iter());
            out[start..].sort_unstable_by(|a, b| a.0.cmp(b.0));
        }
        out
    }

    pub fn terms_unordered(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.parts.iter().flat_map(|p| p.iter())
    }

    /// Raw degree-`d` term map (`d >= 1`).
    pub fn part(&self, d: usize) -> Option<&TermMap> {
        d.checked_sub(1).and_then(|i| self.parts.get(i))
    }

    fn check_same(&self, other: &Series) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(
                self.trunc.to_string(),
                other.trunc.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.constant.add_assign_ref(&other.constant);
        for (d, p) in other.parts.iter().enumerate() {
            for (m, c) in p {
                accumulate(&mut out.parts[d], m.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scalar_mul(&-Coeff::one())
    }

    pub fn scalar_mul(&self, c: &Coeff) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc);
        }
        Series {
            trunc: self.trunc,
            constant: &self.constant * c,
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|(m, a)| (m.clone(), a * c)).collect())
                .collect(),
        }
    }

    /// `self - c` on the constant term.
    pub fn shift_constant(&self, c: &Coeff) -> Series {
        let mut out = self.clone();
        out.constant = &out.constant - c;
        out
    }

    /// `self - 1`.
    pub fn minus_one(&self) -> Series {
        self.shift_constant(&Coeff::one())
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        let n = self.trunc.degree;
        let mut out = Series::constant(&self.constant * &other.constant, self.trunc);
        let left = self.supported_parts();
        let right = other.supported_parts();
        for i in 1..n {
            for j in 1..=n - i {
                mul_parts_into(
                    &left[i - 1],
                    &right[j - 1],
                    &mut out.parts[i + j - 1],
                    self.trunc,
                );
            }
        }
        out.add_scaled(other, &self.constant);
        out.add_scaled(self, &other.constant);
        Ok(out)
    }

    /// `self += c * other` on non-constant terms.
    fn add_scaled(&mut self, other: &Series, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        for (d, p) in other.parts.iter().enumerate() {
            for (m, a) in p {
                accumulate(&mut self.parts[d], m.clone(), &(a * c));
            }
        }
    }

    fn supported_parts(&self) -> Vec<Vec<Supported<'_>>> {
        self.parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|(m, c)| Supported::new(m, c, self.trunc.multilinear))
                    .collect()
            })
            .collect()
    }

    /// Solves `self * X = rhs`. `self` must have constant term 1.
    ///
    /// Writing `self = 1 + a`, the degree-`d` part of `X` is
    /// `rhs_d - sum_{i=1..d} a_i X_{d-i}`, so `X` is fixed after `N` rounds.
    pub fn left_div(&self, rhs: &Series) -> Result<Series> {
        self.check_same(rhs)?;
        self.require_unit()?;
        self.solve(rhs, Side::Left)
    }

    /// Solves `X * divisor = self`. `divisor` must have constant term 1.
    pub fn right_div(&self, divisor: &Series) -> Result<Series> {
        self.check_same(divisor)?;
        divisor.require_unit()?;
        divisor.solve(self, Side::Right)
    }

    fn require_unit(&self) -> Result<()> {
        if self.constant.is_one() {
            Ok(())
        } else {
            Err(Error::NonUnit(self.constant.to_string()))
        }
    }

    fn solve(&self, rhs: &Series, side: Side) -> Result<Series> {
        let n = self.trunc.degree;
        let alpha = self.supported_parts();
        let mut x = Series::constant(rhs.constant.clone(), self.trunc);
        let x0 = rhs.constant.clone();
        let minus_one = -Coeff::one();
        for d in 1..=n {
            let mut acc = rhs.parts[d - 1].clone();
            if !x0.is_zero() {
                let scale = -&x0;
                for (m, c) in &self.parts[d - 1] {
                    accumulate(&mut acc, m.clone(), &(c * &scale));
                }
            }
            for i in 1..d {
                let xj: Vec<Supported<'_>> = x.parts[d - i - 1]
                    .iter()
                    .map(|(m, c)| Supported::new(m, c, self.trunc.multilinear))
                    .collect();
                let mut prod = TermMap::default();
                match side {
                    Side::Left => mul_parts_into(&alpha[i - 1], &xj, &mut prod, self.trunc),
                    Side::Right => mul_parts_into(&xj, &alpha[i - 1], &mut prod, self.trunc),
                }
                for (m, c) in prod {
                    accumulate(&mut acc, m, &(&c * &minus_one));
                }
            }
            x.parts[d - 1] = acc;
        }
        Ok(x)
    }

    /// Degree-`d` part; `d = 0` gives the constant term.
    pub fn homogeneous_part(&self, d: usize) -> Result<Series> {
        if d > self.trunc.degree {
            return Err(Error::Usage(format!(
                "degree {d} exceeds truncation degree {}",
                self.trunc.degree
            )));
        }
        if d == 0 {
            return Ok(Series::constant(self.constant.clone(), self.trunc));
        }
        let mut out = Series::zero(self.trunc);
        out.parts[d - 1] = self.parts[d - 1].clone();
        Ok(out)
    }

    /// Lowest positive degree with a nonzero part, and that part.
    pub fn lowest_term(&self) -> Option<(usize, Series)> {
        let d = self.parts.iter().position(|p| !p.is_empty())? + 1;
        let mut out = Series::zero(self.trunc);
        out.parts[d - 1] = self.parts[d - 1].clone();
        Some((d, out))
    }

    /// The terms containing every variable of `set` exactly once and no
    /// other variable. The empty set selects the constant term.
    pub fn multilinear_part(&self, set: &VarSet) -> Series {
        if set.is_empty() {
            return Series::constant(self.constant.clone(), self.trunc);
        }
        let mut out = Series::zero(self.trunc);
        if let Some(p) = self.part(set.len()) {
            out.parts[set.len() - 1] = p
                .iter()
                .filter(|(m, _)| m.is_multilinear_on(set))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
        }
        out
    }

    /// Reinterprets under a coarser truncation (lower degree and/or
    /// multilinear pruning). This is the quotient map, so it commutes with
    /// every operation.
    pub fn retruncate(&self, trunc: Trunc) -> Result<Series> {
        if trunc.degree > self.trunc.degree || (self.trunc.multilinear && !trunc.multilinear) {
            return Err(Error::Usage(format!(
                "cannot refine truncation {} to {}",
                self.trunc, trunc
            )));
        }
        let mut out = Series::constant(self.constant.clone(), trunc);
        for (m, c) in self.terms_unordered() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// All coefficients, constant included, are integers.
    pub fn is_integral(&self) -> bool {
        self.constant.is_integer() && self.terms_unordered().all(|(_, c)| c.is_integer())
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> SeriesDisplay<'a> {
        SeriesDisplay { series: self, vars }
    }

    /// One `monomial<TAB>numerator<TAB>denominator` line per term in
    /// canonical order; the constant term is written as monomial `1`.
    pub fn dump(&self, vars: &VarTable) -> String {
        let mut out = String::new();
        if !self.constant.is_zero() {
            out.push_str(&format!(
                "1\t{}\t{}\n",
                self.constant.numer(),
                self.constant.denom()
            ));
        }
        for (m, c) in self.terms() {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                m.display(vars),
                c.numer(),
                c.denom()
            ));
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

pub(crate) fn accumulate(map: &mut TermMap, m: Monomial, c: &Coeff) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            e.get_mut().add_assign_ref(c);
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c.clone());
        }
    }
}

/// A term together with its variable support, for multilinear pruning.
struct Supported<'a> {
    mono: &'a Monomial,
    coeff: &'a Coeff,
    support: Support,
}

enum Support {
    Unused,
    Mask(u128),
    /// some variable index is too large for a mask
    Wide,
}

impl<'a> Supported<'a> {
    fn new(mono: &'a Monomial, coeff: &'a Coeff, multilinear: bool) -> Self {
        let support = if !multilinear {
            Support::Unused
        } else if mono.leaves().all(|v| v.0 < 128) {
            Support::Mask(mono.leaves().fold(0u128, |m, v| m | (1u128 << v.0)))
        } else {
            Support::Wide
        };
        Supported {
            mono,
            coeff,
            support,
        }
    }

    fn disjoint(&self, other: &Supported<'_>) -> bool {
        match (&self.support, &other.support) {
            (Support::Unused, _) | (_, Support::Unused) => true,
            (Support::Mask(a), Support::Mask(b)) => a & b == 0,
            _ => {
                let a: Vec<u16> = self.mono.leaves().map(|v| v.0).collect();
                !other.mono.leaves().any(|v| a.contains(&v.0))
            }
        }
    }
}

fn mul_parts_into(
    left: &[Supported<'_>],
    right: &[Supported<'_>],
    out: &mut TermMap,
    trunc: Trunc,
) {
    if left.is_empty() || right.is_empty() {
        return;
    }
    for a in left {
        for b in right {
            if trunc.multilinear && !a.disjoint(b) {
                continue;
            }
            accumulate(
                out,
                Monomial::prod(a.mono, b.mono),
                &a.coeff.mul_ref(b.coeff),
            );
        }
    }
}

pub struct SeriesDisplay<'a> {
    series: &'a Series,
    vars: &'a VarTable,
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.series;
        let mut first = true;
        let mut emit =
            |f: &mut fmt::Formatter<'_>, c: &Coeff, body: Option<String>| -> fmt::Result {
                let neg = c.is_negative();
                match (first, neg) {
                    (true, true) => f.write_str("-")?,
                    (true, false) => {}
                    (false, true) => f.write_str(" - ")?,
                    (false, false) => f.write_str(" + ")?,
                }
                first = false;
                let mag = c.abs();
                match body {
                    None => write!(f, "{mag}"),
                    Some(b) if mag.is_one() => f.write_str(&b),
                    Some(b) => write!(f, "{mag}*{b}"),
                }
            };
        if !s.constant.is_zero() {
            emit(f, &s.constant, None)?;
        }
        for (m, c) in s.terms() {
            emit(f, c, Some(m.display(self.vars).to_string()))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{}]{{{:?}", self.trunc, self.constant)?;
        for (m, c) in self.terms() {
            write!(f, ", {m:?}: {c:?}")?;
        }
        f.write_str("}")
    }
}
