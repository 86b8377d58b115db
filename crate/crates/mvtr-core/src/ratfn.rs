//! Rational functions in τ over `Q`, kept reduced with a monic denominator.

use alloc::vec::Vec;
use core::fmt;



use crate::q::{Ring, Q};
use crate::upoly::UPoly;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: UPoly,
    den: UPoly,
}

/// Expansion point for [`RatFn::tau_coeff`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TauPoint {
    Zero,
    Infinity,
}

impl RatFn {
    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            let c = den.lc().recip();
            return RatFn { num: num.scale(&c), den: UPoly::one() };
        }
        let g = gcd_den(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let c = den.lc().recip();
        RatFn { num: num.scale(&c), den: den.scale(&c) }
    }

    pub fn poly(p: UPoly) -> Self {
        RatFn { num: p, den: UPoly::one() }
    }

    pub fn tau() -> Self {
        Self::poly(UPoly::x())
    }

    /// `a τ + b`
    pub fn linear(a: i64, b: i64) -> Self {
        Self::poly(UPoly::from_ints(&[b, a]))
    }

    pub fn q(x: Q) -> Self {
        Self::poly(UPoly::constant(x))
    }

    pub fn int(k: i64) -> Self {
        Self::q(crate::q::qi(k))
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_const(&self) -> Option<Q> {
        if self.is_poly() && self.num.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.try_inv().expect("division by zero rational function"))
    }

    pub fn derivative(&self) -> Self {
        if self.is_poly() {
            return Self::poly(self.num.derivative());
        }
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFn::new(n, self.den.mul(&self.den))
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Substitutes `τ ↦ -τ - 1`.
    pub fn reflect(&self) -> Self {
        let s = UPoly::from_ints(&[-1, -1]);
        RatFn::new(self.num.compose(&s), self.den.compose(&s))
    }

    /// Coefficient of `τ^k` in the Laurent expansion at `τ = 0`, or in the
    /// expansion in descending powers of τ at `τ = ∞`.
    pub fn tau_coeff(&self, at: TauPoint, k: i64) -> Q {
        if self.is_zero() {
            return Q::zero();
        }
        let (num, den, shift) = match at {
            TauPoint::Zero => {
                let v = self.den.valuation().unwrap();
                (self.num.clone(), strip_low(&self.den, v), -(v as i64))
            }
            TauPoint::Infinity => {
                // τ = 1/σ: num(1/σ)/den(1/σ) = σ^(dd - dn) rev(num)/rev(den)
                let dn = self.num.degree().unwrap();
                let dd = self.den.degree().unwrap();
                (self.num.reverse(dn), self.den.reverse(dd), dd as i64 - dn as i64)
            }
        };
        // series of num/den (den(0) != 0) in the local variable, exponent e = idx + shift
        let e = match at {
            TauPoint::Zero => k - shift,
            TauPoint::Infinity => -k - shift,
        };
        if e < 0 {
            return Q::zero();
        }
        let e = e as usize;
        let d0inv = den.coeff(0).recip();
        let mut s: Vec<Q> = Vec::with_capacity(e + 1);
        for n in 0..=e {
            let mut acc = num.coeff(n);
            for j in 1..=n.min(den.degree().unwrap_or(0)) {
                acc -= den.coeff(j) * &s[n - j];
            }
            s.push(acc * &d0inv);
        }
        s[e].clone()
    }
}

/// Divides `p` by `τ+1` when `τ = −1` is a root.
fn deflate_minus_one(p: &UPoly) -> Option<UPoly> {
    let c = p.coeffs();
    let n = c.len();
    if n < 2 {
        return None;
    }
    let mut q = alloc::vec![Q::zero(); n - 1];
    let mut acc = Q::zero();
    for k in (1..n).rev() {
        acc = &c[k] - &acc;
        q[k - 1] = acc.clone();
    }
    if (&c[0] - &acc).is_zero() {
        Some(UPoly::new(q))
    } else {
        None
    }
}

/// Multiplicities of the roots 0 and −1, and what is left.
fn split_special(p: &UPoly, cap: (usize, usize)) -> (usize, usize, UPoly) {
    let a = p.valuation().unwrap_or(0).min(cap.0);
    let mut rest = strip_low(p, a);
    let mut b = 0;
    while b < cap.1 {
        match deflate_minus_one(&rest) {
            Some(q) => {
                rest = q;
                b += 1;
            }
            None => break,
        }
    }
    (a, b, rest)
}

/// `τ^a (τ+1)^b` with `den = c·τ^a(τ+1)^b`, if `den` has that shape.
fn special_shape(den: &UPoly) -> Option<(usize, usize)> {
    let (a, b, rest) = split_special(den, (usize::MAX, usize::MAX));
    if rest.is_constant() {
        Some((a, b))
    } else {
        None
    }
}

fn special_poly(a: usize, b: usize) -> UPoly {
    let mut p = UPoly::one().shift(a);
    let l = UPoly::from_ints(&[1, 1]);
    for _ in 0..b {
        p = p.mul(&l);
    }
    p
}

/// `gcd(p, den)`, cheap when `den` only vanishes at 0 and −1.
fn gcd_den(p: &UPoly, den: &UPoly) -> UPoly {
    if p.is_zero() {
        return den.monic();
    }
    match special_shape(den) {
        Some(cap) => {
            let (a, b, _) = split_special(p, cap);
            special_poly(a, b)
        }
        None => p.gcd(den),
    }
}

fn strip_low(p: &UPoly, v: usize) -> UPoly {
    UPoly::new(p.coeffs()[v..].to_vec())
}

impl Ring for RatFn {
    fn zero() -> Self {
        RatFn { num: UPoly::zero(), den: UPoly::one() }
    }
    fn one() -> Self {
        RatFn { num: UPoly::one(), den: UPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.is_poly() {
                return RatFn::poly(self.num.add(&o.num));
            }
            return RatFn::new(self.num.add(&o.num), self.den.clone());
        }
        let g = gcd_den(&self.den, &o.den);
        let a = self.den.div_exact(&g);
        let b = o.den.div_exact(&g);
        let num = self.num.mul(&b).add(&o.num.mul(&a));
        RatFn::new(num, a.mul(&o.den))
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_poly() && o.is_poly() {
            return RatFn::poly(self.num.mul(&o.num));
        }
        // cross-cancel before multiplying
        let g1 = gcd_den(&self.num, &o.den);
        let g2 = gcd_den(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = o.den.div_exact(&g1);
        let n2 = o.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let c = den.lc().recip();
        RatFn { num: num.scale(&c), den: den.scale(&c) }
    }
    fn neg(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }
    fn from_q(x: Q) -> Self {
        RatFn::q(x)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let c = self.num.lc().recip();
        Some(RatFn { num: self.den.scale(&c), den: self.num.scale(&c) })
    }
    fn scale_q(&self, x: &Q) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        RatFn { num: self.num.scale(x), den: self.den.clone() }
    }
}

impl From<UPoly> for RatFn {
    fn from(p: UPoly) -> Self {
        RatFn::poly(p)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num.display("tau"))
        } else {
            write!(f, "({})/({})", self.num.display("tau"), self.den.display("tau"))
        }
    }
}

impl RatFn {
    pub fn is_one_fn(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }
}

impl PartialEq<Q> for RatFn {
    fn eq(&self, o: &Q) -> bool {
        self.as_const().is_some_and(|c| &c == o) || (o.is_zero() && self.is_zero())
    }
}

