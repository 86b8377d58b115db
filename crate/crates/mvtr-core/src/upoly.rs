//! Dense univariate polynomials over `Q`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;



use crate::q::{Ring, Q};

/// `coeffs[k]` is the coefficient of `x^k`; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&k| crate::q::qi(k)).collect())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// `c x^k`
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![Q::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        UPoly { coeffs: v }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `self(p(x))`
    pub fn compose(&self, p: &UPoly) -> UPoly {
        let mut acc = UPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(p).add(&UPoly::constant(c.clone()));
        }
        acc
    }

    /// Coefficient reversal to length `n + 1`: `x^n p(1/x)`.
    pub fn reverse(&self, n: usize) -> UPoly {
        let mut v = vec![Q::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[n - k] = c.clone();
        }
        UPoly::new(v)
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut quot = vec![Q::zero(); r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        r.truncate(dd);
        (UPoly::new(quot), UPoly::new(r))
    }

    /// Exact quotient; panics if the remainder is nonzero.
    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let mut a = self.monic();
        let mut b = o.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }
}

impl Ring for UPoly {
    fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        UPoly { coeffs: vec![Q::one()] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        UPoly::new(v)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UPoly::new(v)
    }
    fn neg(&self) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
    fn from_q(x: Q) -> Self {
        UPoly::constant(x)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            Some(UPoly::constant(self.coeffs[0].recip()))
        } else {
            None
        }
    }
}

impl UPoly {
    /// Formats with the given variable name, highest degree first.
    pub fn display<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a UPoly, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (k, c) in self.0.coeffs.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    let neg = crate::q::is_negative(c);
                    let a = if neg { -c } else { c.clone() };
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    let unit = a.is_one();
                    match (k, unit) {
                        (0, _) => write!(f, "{}", a)?,
                        (_, true) => {}
                        (_, false) => write!(f, "{}*", a)?,
                    }
                    match k {
                        0 => {}
                        1 => write!(f, "{}", self.1)?,
                        _ => write!(f, "{}^{}", self.1, k)?,
                    }
                }
                Ok(())
            }
        }
        D(self, var)
    }
}
