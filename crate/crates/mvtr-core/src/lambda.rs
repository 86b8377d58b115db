//! λ-class polynomials for a fixed genus, reduced modulo Mumford's relation.
//!
//! A monomial `λ_1^{e_1}⋯λ_g^{e_g}` is stored as its exponent vector `[e_1, …, e_g]`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::q::{qi, Ring, Q};
use crate::upoly::UPoly;

pub type LambdaMono = Vec<u32>;

/// `Σ_i i·e_i`
pub fn mono_degree(m: &[u32]) -> u32 {
    m.iter().enumerate().map(|(i, &e)| (i as u32 + 1) * e).sum()
}

/// The monomial as a sorted multiset of indices, e.g. `λ_1²λ_3 → [1, 1, 3]`.
pub fn mono_indices(m: &[u32]) -> Vec<u32> {
    let mut v = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        for _ in 0..e {
            v.push(i as u32 + 1);
        }
    }
    v
}

pub fn mono_from_indices(g: u32, idx: &[u32]) -> LambdaMono {
    let mut m = vec![0; g as usize];
    for &i in idx {
        if i > 0 {
            m[i as usize - 1] += 1;
        }
    }
    m
}

/// Graded combination of λ-monomials of genus `g` with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct ClassPoly<C: Ring> {
    g: u32,
    terms: BTreeMap<LambdaMono, C>,
}

impl<C: Ring> ClassPoly<C> {
    pub fn zero(g: u32) -> Self {
        ClassPoly { g, terms: BTreeMap::new() }
    }

    pub fn constant(g: u32, c: C) -> Self {
        let mut p = Self::zero(g);
        p.add_term(vec![0; g as usize], c);
        p
    }

    pub fn one(g: u32) -> Self {
        Self::constant(g, C::one())
    }

    /// `λ_i` (with `λ_0 = 1`; zero for `i > g`).
    pub fn lambda(g: u32, i: u32) -> Self {
        if i == 0 {
            return Self::one(g);
        }
        if i > g {
            return Self::zero(g);
        }
        Self::monomial(g, mono_from_indices(g, &[i]), C::one())
    }

    pub fn monomial(g: u32, m: LambdaMono, c: C) -> Self {
        let mut p = Self::zero(g);
        p.add_term(m, c);
        p
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaMono, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: LambdaMono, c: C) {
        debug_assert_eq!(m.len(), self.g as usize);
        if c.is_zero() {
            return;
        }
        let s = match self.terms.get(&m) {
            Some(v) => v.add(&c),
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, s);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.g, o.g, "genus mismatch");
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        ClassPoly { g: self.g, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.g, o.g, "genus mismatch");
        let mut r = Self::zero(self.g);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                r.add_term(m, ca.mul(cb));
            }
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(self.g);
        for (m, x) in &self.terms {
            r.add_term(m.clone(), x.mul(c));
        }
        r
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.scale(&C::from_q(c.clone()))
    }

    /// Homogeneous part of degree `d`.
    pub fn degree_part(&self, d: u32) -> Self {
        ClassPoly {
            g: self.g,
            terms: self.terms.iter().filter(|(m, _)| mono_degree(m) == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Drops everything above degree `d`.
    pub fn truncate(&self, d: u32) -> Self {
        ClassPoly {
            g: self.g,
            terms: self.terms.iter().filter(|(m, _)| mono_degree(m) <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| mono_degree(m)).max()
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> ClassPoly<D> {
        let mut r = ClassPoly::zero(self.g);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }
}

/// Class polynomials whose coefficients are polynomials in τ.
pub type ClassTau = ClassPoly<UPoly>;

impl ClassPoly<UPoly> {
    /// Coefficient of `τ^m`.
    pub fn tau_coeff(&self, m: usize) -> ClassPoly<Q> {
        self.map_coeffs(|p| p.coeff(m))
    }

    pub fn tau_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(|p| p.degree()).max()
    }

    pub fn tau_derivative(&self) -> Self {
        self.map_coeffs(|p| p.derivative())
    }
}

impl ClassPoly<Q> {
    pub fn to_tau(&self) -> ClassTau {
        self.map_coeffs(|c| UPoly::constant(c.clone()))
    }
}

/// `Λ_g^∨(x) = Σ_i (−1)^i λ_i x^{g−i}` for `x` a polynomial in τ.
pub fn chern_dual(g: u32, x: &UPoly) -> ClassTau {
    let mut r = ClassPoly::zero(g);
    for i in 0..=g {
        let c = x.pow(g - i).scale(&crate::q::sign(i as i64));
        r = r.add(&ClassPoly::lambda(g, i).map_coeffs(|u: &UPoly| u.mul(&c)));
    }
    r
}

/// Λ_g^∨ at a rational point.
pub fn chern_dual_at(g: u32, x: &Q) -> ClassPoly<Q> {
    chern_dual(g, &UPoly::constant(x.clone())).tau_coeff(0)
}

/// Quadratic relations `Σ_{i+j=2d} (−1)^i λ_iλ_j` for `1 ≤ d ≤ g`: the nonzero
/// coefficients of `Λ_g^∨(t)Λ_g^∨(−t) − (−1)^g t^{2g}` up to sign.
pub fn mumford_relations(g: u32) -> Vec<ClassPoly<Q>> {
    let mut out = Vec::new();
    for d in 1..=g {
        let mut r = ClassPoly::zero(g);
        for i in 0..=2 * d {
            let j = 2 * d - i;
            if i > g || j > g {
                continue;
            }
            let p = ClassPoly::<Q>::lambda(g, i).mul(&ClassPoly::lambda(g, j));
            r = r.add(&p.scale_q(&crate::q::sign(i as i64)));
        }
        if !r.is_zero() {
            out.push(r);
        }
    }
    out
}

/// All exponent vectors of genus `g` and degree `d`.
pub fn monomials_of_degree(g: u32, d: u32) -> Vec<LambdaMono> {
    fn rec(g: u32, i: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<LambdaMono>) {
        if i > g {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left / i {
            cur[i as usize - 1] = e;
            rec(g, i + 1, left - e * i, cur, out);
        }
        cur[i as usize - 1] = 0;
    }
    let mut out = Vec::new();
    if g == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; g as usize];
    rec(g, 1, d, &mut cur, &mut out);
    out
}

/// Normal forms modulo the Mumford ideal, precomputed degree by degree.
///
/// In each degree the span of monomial multiples of the relations is put in
/// reduced echelon form, with pivots at the lexicographically largest
/// exponent vectors, so `λ_1²` is rewritten in terms of `λ_2` and not the
/// other way around.
type Row = (LambdaMono, BTreeMap<LambdaMono, Q>);

#[derive(Clone, Debug)]
pub struct MumfordReducer {
    g: u32,
    /// per degree: (pivot, row) with row[pivot] = 1
    rows: BTreeMap<u32, Vec<Row>>,
    max_degree: u32,
}

impl MumfordReducer {
    /// Covers degrees up to `3g` (enough for Γ_g and its products with Λ_g^∨(1)).
    pub fn new(g: u32) -> Self {
        Self::with_max_degree(g, (3 * g).max(g * (g + 1) / 2 + 1))
    }

    pub fn with_max_degree(g: u32, max_degree: u32) -> Self {
        let rels = mumford_relations(g);
        let mut rows = BTreeMap::new();
        for d in 0..=max_degree {
            let mut gens: Vec<BTreeMap<LambdaMono, Q>> = Vec::new();
            for r in &rels {
                let rd = r.max_degree().unwrap();
                if rd > d {
                    continue;
                }
                for m in monomials_of_degree(g, d - rd) {
                    let p = r.mul(&ClassPoly::monomial(g, m, qi(1)));
                    gens.push(p.terms.into_iter().collect());
                }
            }
            rows.insert(d, echelon(gens));
        }
        MumfordReducer { g, rows, max_degree }
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    /// Canonical representative; linear and idempotent.
    pub fn reduce<C: Ring>(&self, p: &ClassPoly<C>) -> ClassPoly<C> {
        assert_eq!(p.g, self.g, "genus mismatch");
        let mut terms = p.terms.clone();
        for rows in self.rows.values() {
            for (piv, row) in rows {
                let c = match terms.get(piv) {
                    Some(c) => c.clone(),
                    None => continue,
                };
                for (m, x) in row {
                    let v = terms.get(m).cloned().unwrap_or_else(C::zero).sub(&c.scale_q(x));
                    if v.is_zero() {
                        terms.remove(m);
                    } else {
                        terms.insert(m.clone(), v);
                    }
                }
            }
        }
        if let Some(top) = terms.keys().map(|m| mono_degree(m)).max() {
            assert!(top <= self.max_degree, "class of degree {} beyond reducer range {}", top, self.max_degree);
        }
        ClassPoly { g: self.g, terms }
    }

    pub fn is_zero_mod<C: Ring>(&self, p: &ClassPoly<C>) -> bool {
        self.reduce(p).is_zero()
    }
}

/// Reduced row echelon form with pivots at the largest key of each row.
fn echelon(gens: Vec<BTreeMap<LambdaMono, Q>>) -> Vec<(LambdaMono, BTreeMap<LambdaMono, Q>)> {
    let mut rows: Vec<(LambdaMono, BTreeMap<LambdaMono, Q>)> = Vec::new();
    for mut g in gens {
        // eliminate existing pivots
        for (piv, row) in &rows {
            if let Some(c) = g.get(piv).cloned() {
                axpy(&mut g, &-c, row);
            }
        }
        let piv = match g.keys().next_back() {
            Some(p) => p.clone(),
            None => continue,
        };
        let inv = g[&piv].recip();
        for v in g.values_mut() {
            *v *= &inv;
        }
        for (_, row) in rows.iter_mut() {
            if let Some(c) = row.get(&piv).cloned() {
                axpy(row, &-c, &g);
            }
        }
        rows.push((piv, g));
    }
    rows
}

fn axpy(y: &mut BTreeMap<LambdaMono, Q>, a: &Q, x: &BTreeMap<LambdaMono, Q>) {
    for (m, v) in x {
        let s = y.get(m).cloned().unwrap_or_else(Q::zero) + a * v;
        if s.is_zero() {
            y.remove(m);
        } else {
            y.insert(m.clone(), s);
        }
    }
}

/// `Γ_g(τ) = Λ_g^∨(1)Λ_g^∨(−τ−1)Λ_g^∨(τ)`, unreduced.
pub fn gamma_raw(g: u32) -> ClassTau {
    let one = UPoly::constant(qi(1));
    let m = UPoly::from_ints(&[-1, -1]);
    let t = UPoly::x();
    chern_dual(g, &one).mul(&chern_dual(g, &m)).mul(&chern_dual(g, &t))
}

/// Inverse of a class with constant term 1, as a truncated geometric series.
pub fn graded_inverse(p: &ClassPoly<Q>, max_degree: u32) -> ClassPoly<Q> {
    let g = p.g;
    let c0 = p.coeff(&vec![0; g as usize]);
    assert!(c0.is_one(), "graded inverse needs constant term 1");
    let n = ClassPoly::one(g).sub(p);
    let mut acc = ClassPoly::one(g);
    let mut pw = ClassPoly::one(g);
    for _ in 0..max_degree {
        pw = pw.mul(&n).truncate(max_degree);
        if pw.is_zero() {
            break;
        }
        acc = acc.add(&pw);
    }
    acc
}

/// Reduced Γ_g together with the coefficients `a_m(λ)` of `Γ_g = Λ_g^∨(1) Σ_m a_m τ^m`
/// and the pieces `P_d` of `Λ_g^∨(1) a_1`.
#[derive(Clone, Debug)]
pub struct GammaData {
    pub g: u32,
    pub gamma: ClassTau,
    /// `a[m]`, m = 0..=2g
    pub a: Vec<ClassPoly<Q>>,
    pub reducer: MumfordReducer,
}

impl GammaData {
    pub fn new(g: u32) -> Self {
        let reducer = MumfordReducer::new(g);
        let gamma = reducer.reduce(&gamma_raw(g));
        let lam1 = graded_inverse(&chern_dual_at(g, &qi(1)), 3 * g);
        let a = (0..=2 * g as usize).map(|m| reducer.reduce(&gamma.tau_coeff(m).mul(&lam1).truncate(3 * g))).collect();
        GammaData { g, gamma, a, reducer }
    }

    /// `dΓ_g/dτ`, reduced.
    pub fn gamma_derivative(&self) -> ClassTau {
        self.gamma.tau_derivative()
    }

    /// `P_d = [deg d] reduce(Λ_g^∨(1) a_1)`.
    pub fn p_d(&self, d: u32) -> ClassPoly<Q> {
        let s = self.reducer.reduce(&chern_dual_at(self.g, &qi(1)).mul(&self.a[1]));
        s.degree_part(d)
    }

    /// `Σ_d P_d`
    pub fn p_sum(&self) -> ClassPoly<Q> {
        self.reducer.reduce(&chern_dual_at(self.g, &qi(1)).mul(&self.a[1]))
    }
}

impl<C: Ring + fmt::Display> fmt::Display for ClassPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for i in mono_indices(m) {
                write!(f, "*l{}", i)?;
            }
        }
        Ok(())
    }
}
