//! Truncated Laurent series `Σ_{k ≥ start} c_k x^k + O(x^order)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::q::{qf, qi, Ring, Q};

#[derive(Clone, PartialEq, Debug)]
pub struct Series<C: Ring> {
    /// exponent of `coeffs[0]`
    start: i64,
    coeffs: Vec<C>,
    /// coefficients of `x^k` for `k >= order` are unknown
    order: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    NotInvertible,
    BadValuation,
    /// the requested coefficient lies beyond the truncation order
    Truncated { wanted: i64, order: i64 },
}

impl<C: Ring> Series<C> {
    /// Builds from coefficients of `x^start, x^(start+1), ...` known up to `O(x^order)`.
    pub fn new(start: i64, coeffs: Vec<C>, order: i64) -> Self {
        let mut s = Series { start, coeffs, order };
        s.normalize();
        s
    }

    pub fn zero(order: i64) -> Self {
        Series { start: order, coeffs: Vec::new(), order }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(C::one(), 0, order)
    }

    pub fn constant(c: C, order: i64) -> Self {
        Self::monomial(c, 0, order)
    }

    pub fn monomial(c: C, k: i64, order: i64) -> Self {
        Self::new(k, vec![c], order)
    }

    /// `x + O(x^order)`
    pub fn var(order: i64) -> Self {
        Self::monomial(C::one(), 1, order)
    }

    /// Polynomial `Σ c_k x^k` truncated to `order`.
    pub fn from_poly(coeffs: Vec<C>, order: i64) -> Self {
        Self::new(0, coeffs, order)
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.start).max(0) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(p) => {
                self.coeffs.drain(..p);
                self.start += p as i64;
            }
            None => {
                self.coeffs.clear();
                self.start = self.order;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient (equals `order` when no term is known nonzero).
    pub fn valuation(&self) -> i64 {
        self.start
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> C {
        if k < self.start {
            return C::zero();
        }
        self.coeffs.get((k - self.start) as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Like [`Series::coeff`] but refuses to answer beyond the truncation order.
    pub fn coeff_checked(&self, k: i64) -> Result<C, SeriesError> {
        if k >= self.order {
            Err(SeriesError::Truncated { wanted: k, order: self.order })
        } else {
            Ok(self.coeff(k))
        }
    }

    /// `(exponent, coefficient)` pairs of nonzero known terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        let s = self.start;
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| (s + k as i64, c))
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::new(self.start, self.coeffs.clone(), order.min(self.order))
    }

    pub fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let start = self.start.min(o.start).min(order);
        let n = (order - start).max(0) as usize;
        let mut v = vec![C::zero(); n];
        for (k, c) in self.terms() {
            if k < order {
                v[(k - start) as usize] = v[(k - start) as usize].add(c);
            }
        }
        for (k, c) in o.terms() {
            if k < order {
                v[(k - start) as usize] = v[(k - start) as usize].add(c);
            }
        }
        Self::new(start, v, order)
    }

    pub fn neg(&self) -> Self {
        Series { start: self.start, coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), order: self.order }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.start, self.coeffs.iter().map(|x| x.mul(c)).collect(), self.order)
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        Self::new(self.start, self.coeffs.iter().map(|x| x.scale_q(c)).collect(), self.order)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series { start: self.start + k, coeffs: self.coeffs.clone(), order: self.order + k }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = (self.start + o.order).min(o.start + self.order);
        let start = self.start + o.start;
        if start >= order {
            return Self::zero(order);
        }
        let n = (order - start) as usize;
        let mut v = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if !b.is_zero() {
                    v[i + j] = v[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(start, v, order)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(i64::MAX / 4);
        for _ in 0..e {
            r = r.mul(self);
        }
        if e == 0 {
            r = Self::one(self.order - self.start);
        }
        r
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let lead_inv = self.coeffs[0].try_inv().ok_or(SeriesError::NotInvertible)?;
        let rel = self.order - self.start;
        let n = rel as usize;
        let mut v: Vec<C> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = if k == 0 { C::one() } else { C::zero() };
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc = acc.sub(&self.coeffs[j].mul(&v[k - j]));
            }
            v.push(acc.mul(&lead_inv));
        }
        Ok(Self::new(-self.start, v, -self.start + rel))
    }

    pub fn div(&self, o: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn derivative(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.start + i as i64;
            v.push(c.scale_q(&qi(k)));
        }
        Self::new(self.start - 1, v, self.order - 1)
    }

    /// Formal antiderivative with zero constant term; fails on an `x^-1` term.
    pub fn integral(&self) -> Result<Self, SeriesError> {
        let mut v = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.start + i as i64;
            if k == -1 {
                if !c.is_zero() {
                    return Err(SeriesError::BadValuation);
                }
                v.push(C::zero());
            } else {
                v.push(c.scale_q(&qf(1, k + 1)));
            }
        }
        Ok(Self::new(self.start + 1, v, self.order + 1))
    }

    /// Strictly positive powers only.
    pub fn positive_part(&self) -> Self {
        let v = self.terms().filter(|(k, _)| *k > 0).map(|(k, c)| (k, c.clone())).collect::<Vec<_>>();
        Self::from_terms(v, self.order)
    }

    /// Builds from sparse `(exponent, coefficient)` pairs; repeats add up.
    pub fn from_terms(terms: Vec<(i64, C)>, order: i64) -> Self {
        let start = terms.iter().map(|(k, _)| *k).min().unwrap_or(order).min(order);
        let n = (order - start).max(0) as usize;
        let mut v = vec![C::zero(); n];
        for (k, c) in terms {
            if k < order {
                v[(k - start) as usize] = v[(k - start) as usize].add(&c);
            }
        }
        Self::new(start, v, order)
    }

    /// `self(g(x))`; needs `val(g) >= 1` and `val(self) >= 0`.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        let v = g.valuation();
        if v < 1 || self.start < 0 {
            return Err(SeriesError::BadValuation);
        }
        let order = g.order.min(self.order.saturating_mul(v));
        let mut acc = Self::zero(order);
        let mut pw = Self::one(order);
        let mut k = 0;
        while k < self.order && k * v < order {
            let c = self.coeff(k);
            if !c.is_zero() {
                acc = acc.add(&pw.scale(&c));
            }
            pw = pw.mul(g).truncate(order);
            k += 1;
        }
        Ok(acc.truncate(order))
    }

    /// Compositional inverse of `f = c_1 x + …` with `c_1` a unit, to the same order.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if self.start != 1 {
            return Err(SeriesError::BadValuation);
        }
        let c1inv = self.coeffs[0].try_inv().ok_or(SeriesError::NotInvertible)?;
        let order = self.order;
        let mut g = Self::monomial(c1inv.clone(), 1, order);
        for n in 2..order {
            let fg = self.compose(&g.truncate(n + 1))?;
            let r = fg.coeff(n);
            if !r.is_zero() {
                g = g.add(&Self::monomial(r.neg().mul(&c1inv), n, order));
            }
        }
        Ok(g)
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.start != 0 || !self.coeffs[0].is_one() {
            return Err(SeriesError::BadValuation);
        }
        self.derivative().mul(&self.inv()?).integral()
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.start < 1 && !self.is_zero() {
            return Err(SeriesError::BadValuation);
        }
        let n = self.order.max(0) as usize;
        // E' = h' E, coefficientwise
        let dh: Vec<C> = (0..n).map(|k| self.coeff(k as i64 + 1).scale_q(&qi(k as i64 + 1))).collect();
        let mut e: Vec<C> = vec![C::one()];
        for k in 1..n {
            let mut acc = C::zero();
            for j in 0..k {
                if !dh[j].is_zero() {
                    acc = acc.add(&dh[j].mul(&e[k - 1 - j]));
                }
            }
            e.push(acc.scale_q(&qf(1, k as i64)));
        }
        Ok(Self::new(0, e, self.order))
    }

    /// `self^r` for rational `r` and constant term 1, via `exp(r log)`.
    pub fn pow_q(&self, r: &Q) -> Result<Self, SeriesError> {
        self.log()?.scale_q(r).exp()
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series::new(self.start, self.coeffs.iter().map(f).collect(), self.order)
    }

    /// Substitutes `x ↦ c x`.
    pub fn scale_var(&self, c: &C) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let k = self.start + i as i64;
                let pk = if k >= 0 {
                    c.pow(k as u32)
                } else {
                    c.try_inv().expect("scale_var by a non-unit on a Laurent part").pow((-k) as u32)
                };
                x.mul(&pk)
            })
            .collect();
        Self::new(self.start, v, self.order)
    }

    /// `x ↦ -x`
    pub fn negate_var(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (self.start + i as i64).rem_euclid(2) == 1 { c.neg() } else { c.clone() })
            .collect();
        Self::new(self.start, v, self.order)
    }

    /// True if every known coefficient is zero (up to the truncation order).
    pub fn is_zero_to_order(&self) -> bool {
        self.is_zero()
    }
}
