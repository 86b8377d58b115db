//! Rational helpers and the coefficient-ring trait shared by polynomials and series.

use alloc::string::String;
use core::fmt::Debug;
use core::str::FromStr;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Q;
use num_traits::Signed;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(Q::from_integer),
    }
}

/// Always `"p/q"`, including integers (`"3/1"`).
pub fn fmt_q(x: &Q) -> String {
    alloc::format!("{}/{}", x.numer(), x.denom())
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * BigInt::from(k))
}

/// `n!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut r = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        r *= BigInt::from(k);
        k -= 2;
    }
    r
}

pub fn multinomial(n: u64, parts: &[u64]) -> BigInt {
    if parts.iter().sum::<u64>() != n {
        return BigInt::from(0);
    }
    let mut r = factorial(n);
    for &p in parts {
        r /= factorial(p);
    }
    r
}

pub fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        <Q as Ring>::one()
    } else {
        -<Q as Ring>::one()
    }
}

pub fn is_negative(x: &Q) -> bool {
    x.is_negative()
}

/// Commutative ring with unit. `try_inv` returns `None` for non-units.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(x: Q) -> Self;
    fn try_inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn scale_q(&self, x: &Q) -> Self {
        self.mul(&Self::from_q(x.clone()))
    }
    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Ring for Q {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(x: Q) -> Self {
        x
    }
    fn try_inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
