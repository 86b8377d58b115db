//! `Q(τ)(r)` with `r² = (τ+1)/τ`.

use core::fmt;

use crate::q::{Ring, Q};
use crate::ratfn::RatFn;
use crate::upoly::UPoly;

/// `a + b r`
#[derive(Clone, PartialEq, Debug)]
pub struct QuadExt {
    pub a: RatFn,
    pub b: RatFn,
}

/// `(τ+1)/τ`
pub fn radicand() -> RatFn {
    RatFn::new(UPoly::from_ints(&[1, 1]), UPoly::x())
}

impl QuadExt {
    pub fn new(a: RatFn, b: RatFn) -> Self {
        QuadExt { a, b }
    }

    pub fn r() -> Self {
        QuadExt { a: RatFn::zero(), b: RatFn::one() }
    }

    pub fn from_ratfn(a: RatFn) -> Self {
        QuadExt { a, b: RatFn::zero() }
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: self.b.neg() }
    }

    /// `x · conj(x) = a² − b² (τ+1)/τ`
    pub fn norm(&self) -> RatFn {
        self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul(&radicand()))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl Ring for QuadExt {
    fn zero() -> Self {
        Self::from_ratfn(RatFn::zero())
    }
    fn one() -> Self {
        Self::from_ratfn(RatFn::one())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QuadExt { a: self.a.add(&o.a), b: self.b.add(&o.b) }
    }
    fn sub(&self, o: &Self) -> Self {
        QuadExt { a: self.a.sub(&o.a), b: self.b.sub(&o.b) }
    }
    fn mul(&self, o: &Self) -> Self {
        let bb = self.b.mul(&o.b);
        QuadExt {
            a: self.a.mul(&o.a).add(&bb.mul(&radicand())),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.a)),
        }
    }
    fn neg(&self) -> Self {
        QuadExt { a: self.a.neg(), b: self.b.neg() }
    }
    fn from_q(x: Q) -> Self {
        Self::from_ratfn(RatFn::q(x))
    }
    fn try_inv(&self) -> Option<Self> {
        let n = self.norm().try_inv()?;
        let c = self.conj();
        Some(QuadExt { a: c.a.mul(&n), b: c.b.mul(&n) })
    }
    fn scale_q(&self, x: &Q) -> Self {
        QuadExt { a: self.a.scale_q(x), b: self.b.scale_q(x) }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*r", self.a, self.b)
    }
}
