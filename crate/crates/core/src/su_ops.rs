//! The Shestakov–Umirbaev primitive operations `p_{r,s}`.
//!
//! For `u = (…(x_1 x_2)…)x_r` and `v = (…(y_1 y_2)…)y_s` the operations are
//! the unique solution of
//!
//! ```text
//! (uv)z − u(vz) = Σ u_(1) v_(1) · p(u_(2); v_(2); z)
//! ```
//!
//! summed over splittings of both argument sequences into complementary,
//! order-preserving subsequences, where `p` vanishes whenever `u_(2)` or
//! `v_(2)` is empty and the empty product is the unit.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::series::{Series, Trunc};
use crate::vars::{VarId, VarTable};

/// Arguments of `p_{r,s}`: all series without constant term and with a
/// common truncation.
#[derive(Clone, Debug)]
pub struct POpRequest {
    pub xs: Vec<Series>,
    pub ys: Vec<Series>,
    pub z: Series,
}

impl POpRequest {
    pub fn new(xs: Vec<Series>, ys: Vec<Series>, z: Series) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::Usage(format!(
                "p_{{r,s}} needs r, s >= 1, got ({}, {})",
                xs.len(),
                ys.len()
            )));
        }
        let trunc = z.trunc();
        for s in xs.iter().chain(&ys).chain(std::iter::once(&z)) {
            if s.trunc() != trunc {
                return Err(Error::TruncationMismatch(
                    s.trunc().to_string(),
                    trunc.to_string(),
                ));
            }
            if !s.constant_term().is_zero() {
                return Err(Error::Usage(
                    "arguments of p_{r,s} must have zero constant term".into(),
                ));
            }
        }
        if xs.len() > 16 || ys.len() > 16 {
            return Err(Error::ResourceBound("p_{r,s} supports r, s <= 16".into()));
        }
        Ok(POpRequest { xs, ys, z })
    }

    /// Fresh generators `x1..xr`, `y1..ys`, `z` with the variable table
    /// that names them.
    pub fn on_generators(r: usize, s: usize, trunc: Trunc) -> Result<(Self, VarTable)> {
        let (vars, xs, ys, z) = fresh_generators(r, s)?;
        let g = |v: &VarId| Series::var(*v, trunc);
        let req = POpRequest::new(
            xs.iter().map(g).collect(),
            ys.iter().map(g).collect(),
            g(&z),
        )?;
        Ok((req, vars))
    }

    pub fn r(&self) -> usize {
        self.xs.len()
    }

    pub fn s(&self) -> usize {
        self.ys.len()
    }

    pub fn trunc(&self) -> Trunc {
        self.z.trunc()
    }
}

/// Variable table with `x1..xr`, `y1..ys`, `z` in that order.
pub fn fresh_generators(r: usize, s: usize) -> Result<(VarTable, Vec<VarId>, Vec<VarId>, VarId)> {
    let mut vars = VarTable::new();
    let xs = vars.fresh_indexed("x", r)?;
    let ys = vars.fresh_indexed("y", s)?;
    let z = vars.add("z")?;
    Ok((vars, xs, ys, z))
}

/// Left-normed product of the elements selected by `mask`, `None` if empty.
fn left_normed(items: &[Series], mask: u32) -> Result<Option<Series>> {
    let mut acc: Option<Series> = None;
    for (i, s) in items.iter().enumerate() {
        if mask & (1 << i) != 0 {
            acc = Some(match acc {
                None => s.clone(),
                Some(a) => a.mul(s)?,
            });
        }
    }
    Ok(acc)
}

/// Product of two possibly-empty factors; `None` is the unit.
fn mul_opt(a: Option<&Series>, b: Option<&Series>) -> Result<Option<Series>> {
    Ok(match (a, b) {
        (None, None) => None,
        (Some(s), None) | (None, Some(s)) => Some(s.clone()),
        (Some(a), Some(b)) => Some(a.mul(b)?),
    })
}

/// `(uv)z − u(vz)`.
fn associator(u: &Series, v: &Series, z: &Series) -> Result<Series> {
    u.mul(v)?.mul(z)?.sub(&u.mul(&v.mul(z)?)?)
}

fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    // all sub-masks of `mask`, including 0 and `mask` itself
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// `p_{r,s}(x_1…x_r; y_1…y_s; z)` from the recurrence, by induction on the
/// number of arguments. Values for every pair of sub-sequences are
/// memoized for the duration of the call.
pub fn p(req: &POpRequest) -> Result<Series> {
    let (r, s) = (req.r(), req.s());
    let (full_x, full_y) = ((1u32 << r) - 1, (1u32 << s) - 1);
    let mut products_x: FxHashMap<u32, Series> = FxHashMap::default();
    let mut products_y: FxHashMap<u32, Series> = FxHashMap::default();
    for m in 1..=full_x {
        products_x.insert(m, left_normed(&req.xs, m)?.expect("nonempty mask"));
    }
    for m in 1..=full_y {
        products_y.insert(m, left_normed(&req.ys, m)?.expect("nonempty mask"));
    }

    let mut pairs: Vec<(u32, u32)> = (1..=full_x)
        .flat_map(|a| (1..=full_y).map(move |b| (a, b)))
        .collect();
    pairs.sort_by_key(|&(a, b)| (a.count_ones() + b.count_ones(), a, b));

    let mut memo: FxHashMap<(u32, u32), Series> = FxHashMap::default();
    for (mx, my) in pairs {
        let (u, v) = (&products_x[&mx], &products_y[&my]);
        let mut val = associator(u, v, &req.z)?;
        for i in submasks(mx).filter(|&i| i != mx) {
            for j in submasks(my).filter(|&j| j != my) {
                if i == 0 && j == 0 {
                    continue;
                }
                let front =
                    mul_opt(products_x.get(&i), products_y.get(&j))?.expect("nonempty splitting");
                let inner = &memo[&(mx & !i, my & !j)];
                val = val.sub(&front.mul(inner)?)?;
            }
        }
        memo.insert((mx, my), val);
    }
    Ok(memo.remove(&(full_x, full_y)).expect("full pair computed"))
}

/// `(uv)z − u(vz) − Σ u_(1)v_(1)·p(u_(2); v_(2); z)` over every splitting,
/// with each `p` recomputed from scratch on explicit sub-sequences. Zero
/// exactly when the recurrence is satisfied.
pub fn defining_identity_residual(req: &POpRequest) -> Result<Series> {
    let (r, s) = (req.r(), req.s());
    let u = left_normed(&req.xs, (1 << r) - 1)?.expect("r >= 1");
    let v = left_normed(&req.ys, (1 << s) - 1)?.expect("s >= 1");
    let mut residual = associator(&u, &v, &req.z)?;
    for assign in 0u64..(1u64 << (r + s)) {
        // bit set: the argument goes to the first factor
        let (mut x1, mut x2, mut y1, mut y2) = (vec![], vec![], vec![], vec![]);
        for (i, x) in req.xs.iter().enumerate() {
            if assign & (1 << i) != 0 {
                x1.push(x.clone())
            } else {
                x2.push(x.clone())
            }
        }
        for (j, y) in req.ys.iter().enumerate() {
            if assign & (1 << (r + j)) != 0 {
                y1.push(y.clone())
            } else {
                y2.push(y.clone())
            }
        }
        if x2.is_empty() || y2.is_empty() {
            continue;
        }
        let inner = p(&POpRequest::new(x2, y2, req.z.clone())?)?;
        let u1 = product_of(&x1)?;
        let v1 = product_of(&y1)?;
        let term = match mul_opt(u1.as_ref(), v1.as_ref())? {
            None => inner,
            Some(front) => front.mul(&inner)?,
        };
        residual = residual.sub(&term)?;
    }
    Ok(residual)
}

fn product_of(items: &[Series]) -> Result<Option<Series>> {
    let mut it = items.iter();
    let Some(first) = it.next() else {
        return Ok(None);
    };
    it.try_fold(first.clone(), |acc, s| acc.mul(s)).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magma::VarSet;
    use crate::tensor::is_primitive;

    fn gens(req: &POpRequest) -> (Vec<Series>, Vec<Series>, Series) {
        (req.xs.clone(), req.ys.clone(), req.z.clone())
    }

    fn assoc(a: &Series, b: &Series, c: &Series) -> Series {
        associator(a, b, c).unwrap()
    }

    #[test]
    fn p11_is_the_associator() {
        let (req, vars) = POpRequest::on_generators(1, 1, Trunc::new(3)).unwrap();
        let got = p(&req).unwrap();
        assert_eq!(got.display(&vars).to_string(), "((x1*y1)*z) - (x1*(y1*z))");
    }

    #[test]
    fn p21_closed_form() {
        let (req, _) = POpRequest::on_generators(2, 1, Trunc::new(4)).unwrap();
        let (x, y, z) = gens(&req);
        let x1x2 = x[0].mul(&x[1]).unwrap();
        let expected = assoc(&x1x2, &y[0], &z)
            .sub(&x[0].mul(&assoc(&x[1], &y[0], &z)).unwrap())
            .unwrap()
            .sub(&x[1].mul(&assoc(&x[0], &y[0], &z)).unwrap())
            .unwrap();
        assert_eq!(p(&req).unwrap(), expected);
    }

    #[test]
    fn p12_corrected_closed_form() {
        let (req, _) = POpRequest::on_generators(1, 2, Trunc::new(4)).unwrap();
        let (x, y, z) = gens(&req);
        let y1y2 = y[0].mul(&y[1]).unwrap();
        let expected = assoc(&x[0], &y1y2, &z)
            .sub(&y[0].mul(&assoc(&x[0], &y[1], &z)).unwrap())
            .unwrap()
            .sub(&y[1].mul(&assoc(&x[0], &y[0], &z)).unwrap())
            .unwrap();
        assert_eq!(p(&req).unwrap(), expected);
    }

    #[test]
    fn residual_vanishes() {
        for (r, s) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)] {
            let (req, _) = POpRequest::on_generators(r, s, Trunc::new(r + s + 1)).unwrap();
            assert!(
                defining_identity_residual(&req).unwrap().is_zero(),
                "({r},{s})"
            );
        }
    }

    #[test]
    fn homogeneous_multilinear_integral_primitive() {
        for (r, s) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
            let n = Trunc::new(r + s + 1);
            let (req, vars) = POpRequest::on_generators(r, s, n).unwrap();
            let val = p(&req).unwrap();
            let all: VarSet = vars.ids().collect();
            assert_eq!(val.multilinear_part(&all), val, "({r},{s})");
            assert!(val.is_integral());
            assert!(is_primitive(&val).unwrap(), "({r},{s})");
            assert!(!val.is_zero());
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let n = Trunc::new(3);
        let z = Series::var(VarId(0), n);
        assert!(POpRequest::new(vec![], vec![z.clone()], z.clone()).is_err());
        assert!(POpRequest::new(vec![Series::one(n)], vec![z.clone()], z.clone()).is_err());
        let other = Series::var(VarId(1), Trunc::new(4));
        assert!(POpRequest::new(vec![other], vec![z.clone()], z).is_err());
    }

    #[test]
    fn submask_enumeration() {
        let mut v: Vec<u32> = submasks(0b101).collect();
        v.sort();
        assert_eq!(v, [0, 1, 4, 5]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), [0]);
    }
}
