//! Arbitrary-precision rational numbers plus the coefficient-ring trait shared
//! by every exact scalar type in this crate.
//!
//! Several coefficient rings here carry context (a cyclotomic number only
//! makes sense relative to its field), so the trait hands out zero and one
//! through `zero_like`/`one_like` on an existing element rather than through
//! nullary constructors.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficient ring for [`crate::series::TruncatedSeries`] and friends.
///
/// All operations are exact. `scale_rat` is multiplication by a rational
/// scalar, which every ring in this crate admits (they are all Q-algebras).
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale_rat(&self, q: &Rational) -> Self;
}

/// Exact rational number (arbitrary precision, always reduced).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.0.is_zero(), "inverse of zero");
        Rational(self.0.recip())
    }

    /// Integer power, with negative exponents allowed for nonzero values.
    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Rational::one();
        }
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Rational::one();
        for _ in 0..e.unsigned_abs() {
            acc *= base.clone();
        }
        acc
    }

    /// Parses `"p"` or `"p/q"` (optional leading `-`).
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let n: BigInt = num
            .parse()
            .map_err(|_| alloc::format!("invalid integer {num:?}"))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| alloc::format!("invalid integer {den:?}"))?;
        if d.is_zero() {
            return Err(String::from("zero denominator"));
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.0.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.0.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        self.0 *= rhs.0;
    }
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn scale_rat(&self, q: &Rational) -> Self {
        self * q
    }
}

/// `n!` as a big integer.
pub fn factorial_int(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> Rational {
    Rational::from_bigint(factorial_int(n))
}

/// Binomial coefficient `C(n, k)` (zero for `k > n`).
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_bigint(acc)
}

/// Odd double factorial `(2k+1)!! = 1*3*5*...*(2k+1)`; `odd_double_factorial(0) = 1`
/// is the empty product convention used for `(-1)!!`.
pub fn odd_double_factorial(upper: u64) -> Rational {
    let mut acc = BigInt::one();
    let mut j = 1u64;
    while j <= upper {
        acc *= BigInt::from(j);
        j += 2;
    }
    Rational::from_bigint(acc)
}

/// All weak compositions of `total` into `parts` nonnegative summands.
pub fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = Vec::with_capacity(parts as usize);
    fn rec(total: u32, parts: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=total {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(total, parts, &mut cur, &mut out);
    out
}

/// All compositions of `total` into `parts` summands, each at least 1.
pub fn positive_compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    if parts > total {
        return Vec::new();
    }
    compositions(total - parts, parts)
        .into_iter()
        .map(|c| c.into_iter().map(|x| x + 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let a = Rational::new(3, 4);
        let b = Rational::new(-1, 6);
        assert_eq!(&a + &b, Rational::new(7, 12));
        assert_eq!(&a * &b, Rational::new(-1, 8));
        assert_eq!(alloc::format!("{}", Rational::new(-2, 8)), "-1/4");
        assert_eq!(alloc::format!("{}", Rational::from_int(5)), "5");
        assert_eq!(Rational::parse("7/-3").unwrap(), Rational::new(-7, 3));
        assert!(Rational::parse("1/0").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(Rational::new(2, 3).pow(-2), Rational::new(9, 4));
        assert_eq!(Rational::from_int(7).pow(0), Rational::one());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(6), Rational::from_int(720));
        assert_eq!(binomial(10, 3), Rational::from_int(120));
        assert_eq!(binomial(3, 5), Rational::zero());
        // (2k+1)!! for k = 0..3: 1, 3, 15, 105.
        assert_eq!(odd_double_factorial(1), Rational::from_int(1));
        assert_eq!(odd_double_factorial(7), Rational::from_int(105));
        assert_eq!(odd_double_factorial(0), Rational::one());
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2).len(), 5);
        assert_eq!(positive_compositions(4, 2).len(), 3);
        assert_eq!(positive_compositions(3, 5).len(), 0);
        assert_eq!(compositions(0, 0).len(), 1);
    }
}
