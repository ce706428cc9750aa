//! Exact rational coefficients.
//!
//! Almost every coefficient met in practice is a small integer, so values
//! that fit are kept as a reduced `i64` fraction and promoted to
//! [`BigRational`] only on overflow. The representation is canonical: a
//! value that fits in the small form is never stored as big, which keeps
//! the derived `Eq`/`Hash` sound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// numerator, denominator; reduced, denominator > 0
    Small(i64, i64),
    Big(BigRational),
}

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coeff(Repr);

impl Coeff {
    pub fn zero() -> Self {
        Coeff(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Coeff(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Coeff(Repr::Small(n, 1))
    }

    /// `num/den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            // BigRational is already reduced with positive denominator
            return Coeff(Repr::Small(n, d));
        }
        Coeff(Repr::Big(r))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Coeff(Repr::Small(n, d)),
            _ => Coeff(Repr::Big(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn abs(&self) -> Coeff {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        })
    }

    pub fn add_ref(&self, other: &Coeff) -> Coeff {
        match (&self.0, &other.0) {
            (Repr::Small(a, 1), Repr::Small(b, 1)) => match a.checked_add(*b) {
                Some(s) => Coeff(Repr::Small(s, 1)),
                None => Self::from_i128(*a as i128 + *b as i128, 1),
            },
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
                match an
                    .checked_mul(bd)
                    .zip(bn.checked_mul(ad))
                    .and_then(|(x, y)| x.checked_add(y))
                    .zip(ad.checked_mul(bd))
                {
                    Some((n, d)) => Self::from_i128(n, d),
                    None => Self::from_big(self.to_big() + other.to_big()),
                }
            }
            _ => Self::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn mul_ref(&self, other: &Coeff) -> Coeff {
        match (&self.0, &other.0) {
            (Repr::Small(a, 1), Repr::Small(b, 1)) => match a.checked_mul(*b) {
                Some(p) => Coeff(Repr::Small(p, 1)),
                None => Self::from_i128(*a as i128 * *b as i128, 1),
            },
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                let n = *an as i128 * *bn as i128;
                let d = *ad as i128 * *bd as i128;
                Self::from_i128(n, d)
            }
            _ => Self::from_big(self.to_big() * other.to_big()),
        }
    }

    pub fn sub_ref(&self, other: &Coeff) -> Coeff {
        self.add_ref(&-other)
    }

    /// `self += other`, in place when both are small integers.
    pub fn add_assign_ref(&mut self, other: &Coeff) {
        if let (Repr::Small(a, 1), Repr::Small(b, 1)) = (&mut self.0, &other.0) {
            if let Some(s) = a.checked_add(*b) {
                *a = s;
                return;
            }
        }
        *self = self.add_ref(other);
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl From<i32> for Coeff {
    fn from(n: i32) -> Self {
        Coeff::from_int(n as i64)
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Self {
        Coeff::from_big(r)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Coeff(Repr::Small(m, *d)),
                None => Coeff::from_i128(-(*n as i128), *d as i128),
            },
            Repr::Big(r) => Coeff::from_big(-r),
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Coeff> for &Coeff {
            type Output = Coeff;
            fn $method(self, rhs: &Coeff) -> Coeff {
                self.$imp(rhs)
            }
        }
        impl $tr for Coeff {
            type Output = Coeff;
            fn $method(self, rhs: Coeff) -> Coeff {
                self.$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Coeff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Coeff::from_big(BigRational::new(n, d)))
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::one()
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Coeff::new(4, -6), Coeff::new(-2, 3));
        assert_eq!(Coeff::new(4, -6).to_string(), "-2/3");
        assert_eq!(Coeff::new(6, 3).to_string(), "2");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Coeff::from_int(i64::MAX);
        let s = &big + &Coeff::one();
        assert_eq!(s.to_string(), "9223372036854775808");
        let back = &s - &Coeff::one();
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let sq = &big * &big;
        assert_eq!(&sq * &Coeff::new(1, i64::MAX), big);
    }

    #[test]
    fn parse_and_recip() {
        let c: Coeff = "-10/4".parse().unwrap();
        assert_eq!(c, Coeff::new(-5, 2));
        assert_eq!(c.recip().unwrap(), Coeff::new(-2, 5));
        assert!(Coeff::zero().recip().is_none());
        assert!("1/0".parse::<Coeff>().is_err());
    }

    fn small() -> impl Strategy<Value = Coeff> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Coeff::new(n, d))
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in small(), b in small()) {
            prop_assert_eq!((&a + &b).to_big(), a.to_big() + b.to_big());
            prop_assert_eq!((&a * &b).to_big(), a.to_big() * b.to_big());
            prop_assert_eq!((&a - &b).to_big(), a.to_big() - b.to_big());
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
            let mut c = a.clone();
            c.add_assign_ref(&b);
            prop_assert_eq!(c, &a + &b);
        }
    }
}
