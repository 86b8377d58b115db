//! Sparse multivariate polynomials in `t_0..t_{n-1}` with fixed arity.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::q::{Ring, Q};
use crate::ratfn::{RatFn, TauPoint};
use crate::upoly::UPoly;

pub type Exps = Vec<u32>;

#[derive(Clone, PartialEq, Debug)]
pub struct MPoly<C: Ring> {
    arity: usize,
    terms: BTreeMap<Exps, C>,
}

/// Polynomials in the `t` variables with coefficients in `Q(τ)`.
pub type TPoly = MPoly<RatFn>;

impl<C: Ring> MPoly<C> {
    pub fn zero(arity: usize) -> Self {
        MPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: C) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, C::one())
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = Self::zero(arity);
        p.add_term(e, C::one());
        p
    }

    pub fn monomial(exps: Exps, c: C) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Univariate `p(t_i)` with `Q` coefficients embedded in the given arity.
    pub fn from_upoly(arity: usize, i: usize, p: &UPoly) -> Self {
        let mut out = Self::zero(arity);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; arity];
            e[i] = k as u32;
            out.add_term(e, C::from_q(c.clone()));
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exps, c: C) {
        debug_assert_eq!(e.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        assert_eq!(self.arity, o.arity, "arity mismatch");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, o: &Self) {
        assert_eq!(self.arity, o.arity, "arity mismatch");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.neg());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.sub_assign(o);
        r
    }

    pub fn neg(&self) -> Self {
        MPoly { arity: self.arity, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity, "arity mismatch");
        let mut r = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                r.add_term(e, ca.mul(cb));
            }
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        MPoly { arity: self.arity, terms: self.terms.iter().map(|(e, x)| (e.clone(), x.mul(c))).collect() }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.scale(&C::from_q(c.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.arity);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn coeff(&self, e: &[u32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Homogeneous component of total degree `d`.
    pub fn degree_slice(&self, d: u32) -> Self {
        MPoly {
            arity: self.arity,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut r = Self::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            r.add_term(f, c.scale_q(&crate::q::qi(e[i] as i64)));
        }
        r
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> MPoly<D> {
        let mut r = MPoly::zero(self.arity);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    /// Re-indexes variables: old variable `k` becomes `map[k]` in a polynomial of `arity` variables.
    pub fn embed(&self, map: &[usize], arity: usize) -> Self {
        assert_eq!(map.len(), self.arity);
        let mut r = Self::zero(arity);
        for (e, c) in &self.terms {
            let mut f = vec![0; arity];
            for (k, &x) in e.iter().enumerate() {
                f[map[k]] += x;
            }
            r.add_term(f, c.clone());
        }
        r
    }

    /// Swaps variables according to a permutation of `0..arity`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        self.embed(perm, self.arity)
    }

    /// Exact quotient by `t_i - t_j`; `None` if not divisible.
    pub fn div_diff(&self, i: usize, j: usize) -> Option<Self> {
        assert_ne!(i, j);
        // group by the exponent vector with t_i removed, then synthetic division in t_i
        let mut groups: BTreeMap<Exps, BTreeMap<u32, C>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut k = e.clone();
            let d = k[i];
            k[i] = 0;
            groups.entry(k).or_default().insert(d, c.clone());
        }
        // p = Σ_d c_d(rest) t_i^d, where c_d are polynomials in other vars; work on polynomials.
        let mut by_deg: BTreeMap<u32, Self> = BTreeMap::new();
        for (rest, m) in groups {
            for (d, c) in m {
                by_deg.entry(d).or_insert_with(|| Self::zero(self.arity)).add_term(rest.clone(), c);
            }
        }
        let top = match by_deg.keys().next_back() {
            Some(&t) => t,
            None => return Some(Self::zero(self.arity)),
        };
        let tj = Self::var(self.arity, j);
        let mut q = Self::zero(self.arity);
        let mut carry = Self::zero(self.arity);
        for d in (0..=top).rev() {
            let cd = by_deg.remove(&d).unwrap_or_else(|| Self::zero(self.arity));
            let cur = cd.add(&carry);
            if d == 0 {
                return if cur.is_zero() { Some(q) } else { None };
            }
            // quotient coefficient for t_i^(d-1)
            let mut e = vec![0; self.arity];
            e[i] = d - 1;
            q.add_assign(&cur.mul(&Self::monomial(e, C::one())));
            carry = cur.mul(&tj);
        }
        unreachable!()
    }

    /// Substitutes `t_i := value` (a polynomial of the same arity).
    pub fn subst(&self, i: usize, value: &Self) -> Self {
        let mut by_deg: BTreeMap<u32, Self> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut k = e.clone();
            let d = k[i];
            k[i] = 0;
            by_deg.entry(d).or_insert_with(|| Self::zero(self.arity)).add_term(k, c.clone());
        }
        let mut r = Self::zero(self.arity);
        let mut pw = Self::one(self.arity);
        let mut last = 0;
        for (d, c) in by_deg {
            for _ in last..d {
                pw = pw.mul(value);
            }
            last = d;
            r.add_assign(&c.mul(&pw));
        }
        r
    }
}

impl MPoly<RatFn> {
    pub fn scale_ratfn(&self, c: &RatFn) -> Self {
        self.scale(c)
    }

    /// ∂/∂τ applied coefficientwise.
    pub fn tau_derivative(&self) -> Self {
        self.map_coeffs(|c| c.derivative())
    }

    /// Coefficientwise `[τ^k]` at τ = 0 or τ = ∞.
    pub fn tau_slice(&self, at: TauPoint, k: i64) -> MPoly<Q> {
        self.map_coeffs(|c| c.tau_coeff(at, k))
    }

    /// Coefficientwise substitution τ ↦ -τ - 1.
    pub fn reflect_tau(&self) -> Self {
        self.map_coeffs(|c| c.reflect())
    }
}

impl MPoly<Q> {
    pub fn to_tpoly(&self) -> TPoly {
        self.map_coeffs(|c| RatFn::q(c.clone()))
    }
}

impl<C: Ring> Ring for MPoly<C> {
    // The trait's zero/one need an arity; zero-arity constants act as scalars.
    fn zero() -> Self {
        MPoly::zero(0)
    }
    fn one() -> Self {
        MPoly::one(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let (a, b) = lift_pair(self, o);
        MPoly::add(&a, &b)
    }
    fn sub(&self, o: &Self) -> Self {
        let (a, b) = lift_pair(self, o);
        MPoly::sub(&a, &b)
    }
    fn mul(&self, o: &Self) -> Self {
        let (a, b) = lift_pair(self, o);
        MPoly::mul(&a, &b)
    }
    fn neg(&self) -> Self {
        MPoly::neg(self)
    }
    fn from_q(x: Q) -> Self {
        MPoly::constant(0, C::from_q(x))
    }
    fn try_inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if e.iter().any(|&x| x != 0) {
            return None;
        }
        Some(MPoly::constant(self.arity, c.try_inv()?))
    }
}

/// Promotes arity-0 scalars so mixed-arity ring operations work inside generic series code.
fn lift_pair<C: Ring>(a: &MPoly<C>, b: &MPoly<C>) -> (MPoly<C>, MPoly<C>) {
    if a.arity == b.arity {
        return (a.clone(), b.clone());
    }
    if a.arity == 0 {
        return (MPoly::constant(b.arity, a.coeff(&[])).trim(), b.clone());
    }
    if b.arity == 0 {
        return (a.clone(), MPoly::constant(a.arity, b.coeff(&[])).trim());
    }
    panic!("arity mismatch");
}

impl<C: Ring> MPoly<C> {
    fn trim(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }
}

impl<C: Ring + fmt::Display> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (k, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => write!(f, "*t{}", k + 1)?,
                    _ => write!(f, "*t{}^{}", k + 1, x)?,
                }
            }
        }
        Ok(())
    }
}
