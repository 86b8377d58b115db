//! Laplace-transformed cut-and-join: `Ĉ_{g,l}`, the four pieces of the
//! τ-derivative identity, the partition-level equation and the τ-slices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::hodge::{compositions_up_to, HodgeError, HodgeTable, Partition};
use crate::lambda::{chern_dual_at, mono_from_indices, ClassTau};
use crate::mpoly::{MPoly, TPoly};
use crate::psi::{xi_hat, PsiError, PsiTable};
use crate::q::{factorial, qf, qi, Ring, Q};
use crate::ratfn::{RatFn, TauPoint};
use crate::upoly::UPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutJoinError {
    Hodge(HodgeError),
    Psi(PsiError),
    /// a quotient that has to be exact left a remainder
    Inexact(&'static str),
    /// the identity is not stated at this signature
    Signature { g: u32, l: usize },
}

impl From<HodgeError> for CutJoinError {
    fn from(e: HodgeError) -> Self {
        CutJoinError::Hodge(e)
    }
}

impl From<PsiError> for CutJoinError {
    fn from(e: PsiError) -> Self {
        CutJoinError::Psi(e)
    }
}

impl fmt::Display for CutJoinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutJoinError::Hodge(e) => write!(f, "{}", e),
            CutJoinError::Psi(PsiError::BeyondCap { level, cap }) => {
                write!(f, "Psi level {} above table cap {}", level, cap)
            }
            CutJoinError::Psi(PsiError::WeightOutOfRange { b, k }) => write!(f, "Psi_{}^{} out of range", b, k),
            CutJoinError::Inexact(what) => write!(f, "inexact quotient in {}", what),
            CutJoinError::Signature { g, l } => write!(f, "identity not defined at (g,l)=({},{})", g, l),
        }
    }
}

type Result<T> = core::result::Result<T, CutJoinError>;

/// `τ² + τ`
pub fn q_tau() -> RatFn {
    RatFn::poly(UPoly::from_ints(&[0, 1, 1]))
}

fn tau1() -> RatFn {
    RatFn::linear(1, 1)
}

fn is_stable(g: u32, l: usize) -> bool {
    2 * g as i64 - 2 + l as i64 > 0
}

/// Which class sits under the correlator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Insertion {
    /// `Γ_g(τ)`
    Gamma,
    /// `dΓ_g/dτ`
    GammaDerivative,
    /// `Λ_g^∨(1)`
    ChernAtOne,
    /// `λ_g` (ψ-classes alone at genus zero)
    LambdaTop,
    /// `Σ_d P_d(λ)`
    PSum,
    /// `Σ_d P_d(λ)` with the `λ_gλ_1` monomial dropped
    PSumMasked,
}

/// Correlator lookups memoized for one assembly. Unstable signatures read as zero.
pub struct Correlators<'a> {
    h: &'a mut HodgeTable,
    cache: BTreeMap<(Insertion, u32, Vec<u32>), UPoly>,
}

impl<'a> Correlators<'a> {
    pub fn new(h: &'a mut HodgeTable) -> Self {
        Correlators { h, cache: BTreeMap::new() }
    }

    pub fn table(&mut self) -> &mut HodgeTable {
        self.h
    }

    fn class(&mut self, which: Insertion, g: u32) -> ClassTau {
        match which {
            Insertion::Gamma => self.h.gamma_data(g).gamma.clone(),
            Insertion::GammaDerivative => self.h.gamma_data(g).gamma_derivative(),
            Insertion::ChernAtOne => chern_dual_at(g, &qi(1)).to_tau(),
            Insertion::LambdaTop => crate::lambda::ClassPoly::lambda(g, g).to_tau(),
            Insertion::PSum => self.h.gamma_data(g).p_sum().to_tau(),
            Insertion::PSumMasked => {
                let mut p = self.h.gamma_data(g).p_sum();
                let m = mono_from_indices(g, &[1, g]);
                let c = p.coeff(&m);
                p.add_term(m, -c);
                p.to_tau()
            }
        }
    }

    pub fn get(&mut self, which: Insertion, g: u32, b: &[u32]) -> Result<UPoly> {
        if !is_stable(g, b.len()) {
            return Ok(UPoly::zero());
        }
        let mut key_b = b.to_vec();
        key_b.sort_unstable();
        let key = (which, g, key_b);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = if g == 0 {
            match which {
                Insertion::GammaDerivative | Insertion::PSum | Insertion::PSumMasked => UPoly::zero(),
                _ => UPoly::constant(self.h.psi_intersection(0, b)),
            }
        } else if which == Insertion::LambdaTop {
            UPoly::constant(self.h.lambda_g_value(g, b)?)
        } else {
            let c = self.class(which, g);
            self.h.class_correlator(g, b, &c)?
        };
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn q(&mut self, which: Insertion, g: u32, b: &[u32]) -> Result<Q> {
        Ok(self.get(which, g, b)?.coeff(0))
    }
}

fn rest_of(l: usize, skip: &[usize]) -> Vec<usize> {
    (0..l).filter(|k| !skip.contains(k)).collect()
}

fn hat_product(psi: &PsiTable, b: &[u32], vars: &[usize], arity: usize) -> Result<TPoly> {
    let mut p = TPoly::one(arity);
    for (k, &x) in b.iter().enumerate() {
        p = p.mul(&psi.psi_hat_at(x as usize, arity, vars[k])?);
    }
    Ok(p)
}

/// `Ψ_b^k(t_i)` in `arity` variables; zero for `k > b`.
fn level_at(psi: &PsiTable, b: u32, k: usize, arity: usize, i: usize) -> Result<MPoly<Q>> {
    if k > b as usize {
        return Ok(MPoly::zero(arity));
    }
    Ok(MPoly::from_upoly(arity, i, psi.psi_level(b as usize, k)?))
}

fn level0_product(psi: &PsiTable, b: &[u32], vars: &[usize], arity: usize) -> Result<MPoly<Q>> {
    let mut p = MPoly::one(arity);
    for (k, &x) in b.iter().enumerate() {
        p = p.mul(&level_at(psi, x, 0, arity, vars[k])?);
    }
    Ok(p)
}

fn xi_product(b: &[u32], vars: &[usize], arity: usize) -> MPoly<Q> {
    let mut p = MPoly::one(arity);
    for (k, &x) in b.iter().enumerate() {
        p = p.mul(&MPoly::from_upoly(arity, vars[k], &xi_hat(x as usize)));
    }
    p
}

/// Exact quotient of a one-variable polynomial by `τt + 1`.
pub fn divide_by_tau_t_plus_one(p: &TPoly) -> Option<TPoly> {
    assert_eq!(p.arity(), 1);
    let top = match p.total_degree() {
        Some(d) => d as usize,
        None => return Some(TPoly::zero(1)),
    };
    let mut c: Vec<RatFn> = (0..=top).map(|d| p.coeff(&[d as u32])).collect();
    let tau = RatFn::tau();
    let inv = tau.try_inv()?;
    let mut out = TPoly::zero(1);
    // c_d t^d: quotient coefficient q_{d−1} = c_d/τ, then c_{d−1} −= q_{d−1}
    for d in (1..=top).rev() {
        let qd = c[d].mul(&inv);
        c[d - 1] = c[d - 1].sub(&qd);
        out.add_term(vec![d as u32 - 1], qd);
    }
    if c[0].is_zero() {
        Some(out)
    } else {
        None
    }
}

/// `∫_1^t p(s) ds` for a one-variable polynomial.
pub fn integrate_from_one(p: &TPoly) -> TPoly {
    let mut out = TPoly::zero(1);
    let mut at_one = RatFn::zero();
    for (e, c) in p.terms() {
        let c2 = c.scale_q(&qf(1, e[0] as i64 + 1));
        at_one = at_one.add(&c2);
        out.add_term(vec![e[0] + 1], c2);
    }
    out.add_term(vec![0], at_one.neg());
    out
}

/// The unstable (0,2) contribution `∫_1^t Ψ̂_1(s) Ψ̂_0'(s) ds`.
pub fn unstable_pair_term(psi: &PsiTable) -> Result<TPoly> {
    let p = psi.psi_hat(1)?.mul(&psi.psi_hat(0)?.derivative(0));
    Ok(integrate_from_one(&p))
}

/// `Ĉ_{g,l} = −(τ²+τ)^{l−1} Σ_b ⟨τ_b Γ_g⟩ Π Ψ̂_{b_i}(t_i)` for stable (g,l).
pub fn laplace_correlation(h: &mut HodgeTable, psi: &PsiTable, g: u32, l: usize) -> Result<TPoly> {
    let mut c = Correlators::new(h);
    laplace_correlation_with(&mut c, psi, g, l)
}

pub fn laplace_correlation_with(c: &mut Correlators, psi: &PsiTable, g: u32, l: usize) -> Result<TPoly> {
    if !is_stable(g, l) {
        return Err(CutJoinError::Signature { g, l });
    }
    let all: Vec<usize> = (0..l).collect();
    let mut acc = TPoly::zero(l);
    for b in compositions_up_to(l, 3 * g + l as u32 - 3) {
        let v = c.get(Insertion::Gamma, g, &b)?;
        if v.is_zero() {
            continue;
        }
        acc.add_assign(&hat_product(psi, &b, &all, l)?.scale(&RatFn::poly(v)));
    }
    Ok(acc.scale(&q_tau().pow(l as u32 - 1).neg()))
}

/// The two sides of the τ-derivative identity, split into its four pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremSides {
    pub g: u32,
    pub l: usize,
    pub lhs: TPoly,
    /// join
    pub t1: TPoly,
    /// genus-reducing cut (including the (0,2) term at (1,1))
    pub t2: TPoly,
    /// separating cut
    pub t3: TPoly,
}

impl TheoremSides {
    pub fn rhs(&self) -> TPoly {
        self.t1.add(&self.t2).add(&self.t3)
    }

    pub fn residual(&self) -> TPoly {
        self.lhs.sub(&self.rhs())
    }
}

pub fn assemble_theorem11(h: &mut HodgeTable, psi: &PsiTable, g: u32, l: usize) -> Result<TheoremSides> {
    let mut c = Correlators::new(h);
    assemble_theorem11_with(&mut c, psi, g, l)
}

pub fn assemble_theorem11_with(c: &mut Correlators, psi: &PsiTable, g: u32, l: usize) -> Result<TheoremSides> {
    if g == 0 || l == 0 {
        return Err(CutJoinError::Signature { g, l });
    }
    let q = q_tau();
    let all: Vec<usize> = (0..l).collect();
    let top = 3 * g + l as u32 - 3;
    let two_tau1 = RatFn::linear(2, 1);
    let half = RatFn::q(qf(1, 2));

    // Ψ̂_{n+1}/(tτ+1), one variable
    let mut reduced: Vec<TPoly> = Vec::new();
    for n in 0..=top as usize + 1 {
        let p = divide_by_tau_t_plus_one(psi.psi_hat(n + 1)?).ok_or(CutJoinError::Inexact("Psi_(b+1)/(t tau+1)"))?;
        reduced.push(p);
    }

    let mut lhs = TPoly::zero(l);
    for b in compositions_up_to(l, top) {
        let v = RatFn::poly(c.get(Insertion::Gamma, g, &b)?);
        let dv = RatFn::poly(c.get(Insertion::GammaDerivative, g, &b)?);
        if v.is_zero() && dv.is_zero() {
            continue;
        }
        let w = q.pow(l as u32 - 1).mul(&two_tau1).scale_q(&qi(l as i64 - 1)).mul(&v).add(&q.pow(l as u32).mul(&dv));
        // q^{l−2}((l−1)(2τ+1)v + q dv) written with the q^{l−2} folded in
        let w = w.div(&q);
        lhs.sub_assign(&hat_product(psi, &b, &all, l)?.scale(&w));
        if v.is_zero() {
            continue;
        }
        for i in 0..l {
            let bi = b[i] as usize;
            let d = psi.psi_hat(bi)?.tau_derivative().add(&reduced[bi]).embed(&[i], l);
            let rest = rest_of(l, &[i]);
            let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
            let term = d.mul(&hat_product(psi, &rb, &rest, l)?);
            lhs.sub_assign(&term.scale(&q.pow(l as u32 - 1).mul(&v)));
        }
    }

    let mut t1 = TPoly::zero(l);
    if l >= 2 {
        let pref = q.pow(l as u32).div(&q.pow(2)).div(&tau1()).neg();
        for i in 0..l {
            for j in i + 1..l {
                let rest = rest_of(l, &[i, j]);
                let ti = TPoly::var(l, i);
                let tj = TPoly::var(l, j);
                let one = TPoly::one(l);
                let tau = RatFn::tau();
                let wi = tj.sub(&one).mul(&ti.mul(&ti).scale(&tau).add(&ti));
                let wj = ti.sub(&one).mul(&tj.mul(&tj).scale(&tau).add(&tj));
                for ab in compositions_up_to(l - 1, top - 1) {
                    let v = c.get(Insertion::Gamma, g, &ab)?;
                    if v.is_zero() {
                        continue;
                    }
                    let a = ab[0] as usize;
                    let n = wi
                        .mul(&psi.psi_hat_at(a + 1, l, i)?)
                        .sub(&wj.mul(&psi.psi_hat_at(a + 1, l, j)?));
                    let quo = n.div_diff(i, j).ok_or(CutJoinError::Inexact("join divided difference"))?;
                    let term = quo.mul(&hat_product(psi, &ab[1..], &rest, l)?);
                    t1.add_assign(&term.scale(&pref.mul(&RatFn::poly(v))));
                }
            }
        }
    }

    let ql1 = q.pow(l as u32 - 1);
    let mut t2 = TPoly::zero(l);
    let mut t3 = TPoly::zero(l);
    for i in 0..l {
        let rest = rest_of(l, &[i]);
        let pair = |a1: u32, a2: u32| -> Result<TPoly> {
            Ok(psi.psi_hat_at(a1 as usize + 1, l, i)?.mul(&psi.psi_hat_at(a2 as usize + 1, l, i)?))
        };
        if is_stable(g - 1, l + 1) {
            for ab in compositions_up_to(l + 1, 3 * (g - 1) + l as u32 - 2) {
                let v = c.get(Insertion::Gamma, g - 1, &ab)?;
                if v.is_zero() {
                    continue;
                }
                let term = pair(ab[0], ab[1])?.mul(&hat_product(psi, &ab[2..], &rest, l)?);
                t2.add_assign(&term.scale(&ql1.mul(&q).mul(&half).mul(&RatFn::poly(v))));
            }
        } else if g == 1 && l == 1 {
            let f = unstable_pair_term(psi)?.embed(&[i], l);
            t2.add_assign(&f.scale(&ql1.mul(&q).mul(&half)));
        }
        for (g1, ii, jj) in stable_splits(g, &rest) {
            let g2 = g - g1;
            for ai in compositions_up_to(ii.len() + 1, 3 * g1 + ii.len() as u32 - 2) {
                let v1 = c.get(Insertion::Gamma, g1, &ai)?;
                if v1.is_zero() {
                    continue;
                }
                for aj in compositions_up_to(jj.len() + 1, 3 * g2 + jj.len() as u32 - 2) {
                    let v2 = c.get(Insertion::Gamma, g2, &aj)?;
                    if v2.is_zero() {
                        continue;
                    }
                    let term = pair(ai[0], aj[0])?
                        .mul(&hat_product(psi, &ai[1..], &ii, l)?)
                        .mul(&hat_product(psi, &aj[1..], &jj, l)?);
                    t3.sub_assign(&term.scale(&ql1.mul(&half).mul(&RatFn::poly(v1.mul(&v2)))));
                }
            }
        }
    }
    Ok(TheoremSides { g, l, lhs, t1, t2, t3 })
}

/// `(g_1, I, J)` with `I ⊔ J = rest`, both sides stable once the extra point is added.
fn stable_splits(g: u32, rest: &[usize]) -> Vec<(u32, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for g1 in 0..=g {
        for mask in 0u32..(1 << rest.len()) {
            let ii: Vec<usize> = (0..rest.len()).filter(|k| mask >> k & 1 == 1).map(|k| rest[k]).collect();
            let jj: Vec<usize> = (0..rest.len()).filter(|k| mask >> k & 1 == 0).map(|k| rest[k]).collect();
            if is_stable(g1, ii.len() + 1) && is_stable(g - g1, jj.len() + 1) {
                out.push((g1, ii, jj));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<P> {
    pub identity: String,
    pub pass: bool,
    pub residual: P,
}

pub fn verify_theorem11(h: &mut HodgeTable, psi: &PsiTable, g: u32, l: usize) -> Result<IdentityReport<TPoly>> {
    let s = assemble_theorem11(h, psi, g, l)?;
    let r = s.residual();
    Ok(IdentityReport { identity: alloc::format!("theorem11({},{})", g, l), pass: r.is_zero(), residual: r })
}

/// `(∂_τ + Σ_i (t_i²−t_i)/(τ+1) ∂_{t_i}) Ĉ_{g,l}` minus the assembled left side.
pub fn operator_form_residual(h: &mut HodgeTable, psi: &PsiTable, g: u32, l: usize) -> Result<TPoly> {
    let mut c = Correlators::new(h);
    let s = assemble_theorem11_with(&mut c, psi, g, l)?;
    let ch = laplace_correlation_with(&mut c, psi, g, l)?;
    let mut op = ch.tau_derivative();
    let inv = tau1().try_inv().unwrap();
    for i in 0..l {
        let ti = TPoly::var(l, i);
        op.add_assign(&ti.mul(&ti).sub(&ti).mul(&ch.derivative(i)).scale(&inv));
    }
    Ok(op.sub(&s.lhs))
}

/// `a + b√−1` over `Q(τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    pub re: RatFn,
    pub im: RatFn,
}

impl Gaussian {
    pub fn zero() -> Self {
        Gaussian { re: RatFn::zero(), im: RatFn::zero() }
    }

    /// `√−1^phase · value`
    pub fn from_phase(phase: u8, value: RatFn) -> Self {
        match phase % 4 {
            0 => Gaussian { re: value, im: RatFn::zero() },
            1 => Gaussian { re: RatFn::zero(), im: value },
            2 => Gaussian { re: value.neg(), im: RatFn::zero() },
            _ => Gaussian { re: RatFn::zero(), im: value.neg() },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Gaussian { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Gaussian { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Gaussian {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        Gaussian { re: self.re.scale_q(c), im: self.im.scale_q(c) }
    }

    pub fn derivative(&self) -> Self {
        Gaussian { re: self.re.derivative(), im: self.im.derivative() }
    }
}

fn remove_part(mu: &[u32], x: u32) -> Option<Vec<u32>> {
    let p = mu.iter().position(|&y| y == x)?;
    let mut v = mu.to_vec();
    v.remove(p);
    Some(v)
}

fn mult(mu: &[u32], x: u32) -> i64 {
    mu.iter().filter(|&&y| y == x).count() as i64
}

fn distinct(mu: &[u32]) -> Vec<u32> {
    let mut v = mu.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Sub-multisets of `mu`, each once.
fn sub_multisets(mu: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let vals = distinct(mu);
    let mut out = vec![(Vec::new(), Vec::new())];
    for v in vals {
        let m = mult(mu, v) as usize;
        let mut next = Vec::new();
        for (a, b) in &out {
            for k in 0..=m {
                let mut a2: Vec<u32> = a.clone();
                let mut b2: Vec<u32> = b.clone();
                a2.extend(core::iter::repeat_n(v, k));
                b2.extend(core::iter::repeat_n(v, m - k));
                next.push((a2, b2));
            }
        }
        out = next;
    }
    out
}

/// Memoized `C_{g,μ}` as Gaussian numbers.
pub struct MvCache<'a> {
    h: &'a mut HodgeTable,
    cache: BTreeMap<(u32, Vec<u32>), Gaussian>,
}

impl<'a> MvCache<'a> {
    pub fn new(h: &'a mut HodgeTable) -> Self {
        MvCache { h, cache: BTreeMap::new() }
    }

    pub fn get(&mut self, g: u32, mu: &[u32]) -> Result<Gaussian> {
        if mu.is_empty() {
            return Ok(Gaussian::zero());
        }
        let p = Partition::new(mu.to_vec()).expect("positive parts");
        let key = (g, p.parts().to_vec());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let c = self.h.mv_coefficient(g, &p)?;
        let v = Gaussian::from_phase(c.phase, c.value);
        self.cache.insert(key, v.clone());
        Ok(v)
    }
}

/// Coefficient of `p_μ λ^{2g−2+l}` in
/// `∂_τ𝒞 − (√−1/2) λ Σ_{i,j}((i+j)p_ip_j∂_{i+j}𝒞 + ij p_{i+j}∂_i∂_j𝒞 + ij p_{i+j}∂_i𝒞∂_j𝒞)`
/// for `𝒞 = Σ C_{g,μ} p_μ λ^{2g−2+l(μ)}`, unstable (0,1), (0,2) terms included.
pub fn cutjoin_partition_residual(h: &mut HodgeTable, g: u32, mu: &Partition) -> Result<Gaussian> {
    let mut c = MvCache::new(h);
    cutjoin_partition_residual_with(&mut c, g, mu)
}

pub fn cutjoin_partition_residual_with(c: &mut MvCache, g: u32, mu: &Partition) -> Result<Gaussian> {
    let mu = mu.parts().to_vec();
    let lhs = c.get(g, &mu)?.derivative();
    let mut rhs = Gaussian::zero();
    let vals = distinct(&mu);
    // join: p_i p_j ∂_{i+j}, from genus g with one part fewer
    for &i in &vals {
        for &j in &vals {
            let rest = match remove_part(&mu, i).and_then(|r| remove_part(&r, j)) {
                Some(r) => r,
                None => continue,
            };
            let mut nu = rest;
            nu.push(i + j);
            let m = mult(&nu, i + j);
            rhs = rhs.add(&c.get(g, &nu)?.scale_q(&qi((i + j) as i64 * m)));
        }
    }
    // cuts: p_{i+j} ∂_i ∂_j
    for &k in &vals {
        let rest = remove_part(&mu, k).unwrap();
        for i in 1..k {
            let j = k - i;
            let w = qi(i as i64 * j as i64);
            if g >= 1 {
                let mut nu = rest.clone();
                nu.push(i);
                nu.push(j);
                let d = if i == j { mult(&nu, i) * (mult(&nu, i) - 1) } else { mult(&nu, i) * mult(&nu, j) };
                rhs = rhs.add(&c.get(g - 1, &nu)?.scale_q(&(&w * qi(d))));
            }
            for (r1, r2) in sub_multisets(&rest) {
                for g1 in 0..=g {
                    let mut n1 = r1.clone();
                    n1.push(i);
                    let mut n2 = r2.clone();
                    n2.push(j);
                    let a = c.get(g1, &n1)?.scale_q(&qi(mult(&n1, i)));
                    let b = c.get(g - g1, &n2)?.scale_q(&qi(mult(&n2, j)));
                    rhs = rhs.add(&a.mul(&b).scale_q(&w));
                }
            }
        }
    }
    let half_i = Gaussian { re: RatFn::zero(), im: RatFn::q(qf(1, 2)) };
    Ok(lhs.sub(&rhs.mul(&half_i)))
}

/// Which slice of the τ-derivative identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    /// top order at τ = ∞
    Cor12,
    /// next order at τ = ∞
    Cor12b,
    /// lowest order at τ = 0
    Cor13,
    /// next order at τ = 0
    Cor14,
}

/// Both sides of a corollary over `Q[t]`, together with the matching slices of the
/// assembled identity (already divided by the corollary's normalisation).
#[derive(Clone, Debug, PartialEq)]
pub struct SliceReport {
    pub which: Slice,
    pub g: u32,
    pub l: usize,
    pub lhs: MPoly<Q>,
    pub rhs: MPoly<Q>,
    pub theorem_lhs: MPoly<Q>,
    pub theorem_rhs: MPoly<Q>,
}

impl SliceReport {
    pub fn residual(&self) -> MPoly<Q> {
        self.lhs.sub(&self.rhs)
    }

    /// The corollary holds and both of its sides are the corresponding slices.
    pub fn pass(&self) -> bool {
        self.residual().is_zero() && self.lhs == self.theorem_lhs && self.rhs == self.theorem_rhs
    }
}

pub fn corollary_slice(h: &mut HodgeTable, psi: &PsiTable, which: Slice, g: u32, l: usize) -> Result<SliceReport> {
    let mut c = Correlators::new(h);
    corollary_slice_with(&mut c, psi, which, g, l)
}

pub fn corollary_slice_with(
    c: &mut Correlators,
    psi: &PsiTable,
    which: Slice,
    g: u32,
    l: usize,
) -> Result<SliceReport> {
    let th = assemble_theorem11_with(c, psi, g, l)?;
    let (lhs, rhs, tl, tr) = match which {
        Slice::Cor12 => {
            let k = 2 * g as i64 + l as i64 - 3;
            let s = crate::q::sign(g as i64 + 1);
            let (a, b) = cor12_sides(c, g, l)?;
            (a, b, th.lhs.tau_slice(TauPoint::Infinity, k).scale_q(&s), th.rhs().tau_slice(TauPoint::Infinity, k).scale_q(&s))
        }
        Slice::Cor12b => {
            let k = 2 * g as i64 + l as i64 - 4;
            let s = crate::q::sign(g as i64 + 1);
            let a = th.lhs.tau_slice(TauPoint::Infinity, k).scale_q(&s);
            let b = th.rhs().tau_slice(TauPoint::Infinity, k).scale_q(&s);
            let (x, y) = cor12b_sides(c, psi, g, l)?;
            (x, y, a, b)
        }
        Slice::Cor13 => {
            if l < 2 {
                return Err(CutJoinError::Signature { g, l });
            }
            let k = l as i64 - 2;
            let n = qi(l as i64 - 1).recip().neg();
            let (a, b) = cor13_sides(c, psi, g, l)?;
            (a, b, th.lhs.tau_slice(TauPoint::Zero, k).scale_q(&n), th.rhs().tau_slice(TauPoint::Zero, k).scale_q(&n))
        }
        Slice::Cor14 => {
            let k = l as i64 - 1;
            let (a, b) = cor14_sides(c, psi, g, l, Insertion::PSum)?;
            (a, b, th.lhs.tau_slice(TauPoint::Zero, k).neg(), th.rhs().tau_slice(TauPoint::Zero, k).neg())
        }
    };
    Ok(SliceReport { which, g, l, lhs, rhs, theorem_lhs: tl, theorem_rhs: tr })
}

/// `((t_j−1)u(t_i) − (t_i−1)u(t_j))/(t_i−t_j)` with `u` given at both points.
fn join_quotient(ui: &MPoly<Q>, uj: &MPoly<Q>, i: usize, j: usize, l: usize) -> Result<MPoly<Q>> {
    let one = MPoly::one(l);
    let n = MPoly::var(l, j).sub(&one).mul(ui).sub(&MPoly::var(l, i).sub(&one).mul(uj));
    n.div_diff(i, j).ok_or(CutJoinError::Inexact("join divided difference"))
}

fn cor12_sides(c: &mut Correlators, g: u32, l: usize) -> Result<(MPoly<Q>, MPoly<Q>)> {
    let all: Vec<usize> = (0..l).collect();
    let top = 3 * g + l as u32 - 3;
    let mut lhs = MPoly::zero(l);
    for b in compositions_up_to(l, top) {
        let v = c.q(Insertion::ChernAtOne, g, &b)?;
        if v.is_zero() {
            continue;
        }
        let mut s = xi_product(&b, &all, l).scale_q(&qi(2 * g as i64 - 2 + l as i64));
        for i in 0..l {
            let ti = MPoly::var(l, i);
            let d = MPoly::from_upoly(l, i, &xi_hat(b[i] as usize).derivative()).mul(&ti.mul(&ti).sub(&ti));
            let rest = rest_of(l, &[i]);
            let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
            s.add_assign(&d.mul(&xi_product(&rb, &rest, l)));
        }
        lhs.add_assign(&s.scale_q(&v));
    }
    let mut rhs = MPoly::zero(l);
    for i in 0..l {
        for j in i + 1..l {
            let rest = rest_of(l, &[i, j]);
            for ab in compositions_up_to(l - 1, top - 1) {
                let v = c.q(Insertion::ChernAtOne, g, &ab)?;
                if v.is_zero() {
                    continue;
                }
                let a = ab[0] as usize + 1;
                let ti = MPoly::var(l, i);
                let tj = MPoly::var(l, j);
                let ui = ti.mul(&ti).mul(&MPoly::from_upoly(l, i, &xi_hat(a)));
                let uj = tj.mul(&tj).mul(&MPoly::from_upoly(l, j, &xi_hat(a)));
                let quo = join_quotient(&ui, &uj, i, j, l)?;
                rhs.add_assign(&quo.mul(&xi_product(&ab[1..], &rest, l)).scale_q(&v));
            }
        }
    }
    let half = qf(1, 2);
    for i in 0..l {
        let rest = rest_of(l, &[i]);
        let pair = |a1: u32, a2: u32| {
            MPoly::from_upoly(l, i, &xi_hat(a1 as usize + 1)).mul(&MPoly::from_upoly(l, i, &xi_hat(a2 as usize + 1)))
        };
        if is_stable(g - 1, l + 1) {
            for ab in compositions_up_to(l + 1, 3 * (g - 1) + l as u32 - 2) {
                let v = c.q(Insertion::ChernAtOne, g - 1, &ab)?;
                if !v.is_zero() {
                    rhs.add_assign(&pair(ab[0], ab[1]).mul(&xi_product(&ab[2..], &rest, l)).scale_q(&(&v * &half)));
                }
            }
        } else if g == 1 && l == 1 {
            let f = integrate_from_one(&MPoly::from_upoly(1, 0, &xi_hat(1)).to_tpoly()).tau_slice(TauPoint::Zero, 0);
            rhs.add_assign(&f.embed(&[i], l).scale_q(&half));
        }
        for (g1, ii, jj) in stable_splits(g, &rest) {
            let g2 = g - g1;
            for ai in compositions_up_to(ii.len() + 1, 3 * g1 + ii.len() as u32 - 2) {
                let v1 = c.q(Insertion::ChernAtOne, g1, &ai)?;
                if v1.is_zero() {
                    continue;
                }
                for aj in compositions_up_to(jj.len() + 1, 3 * g2 + jj.len() as u32 - 2) {
                    let v2 = c.q(Insertion::ChernAtOne, g2, &aj)?;
                    if v2.is_zero() {
                        continue;
                    }
                    let t = pair(ai[0], aj[0]).mul(&xi_product(&ai[1..], &ii, l)).mul(&xi_product(&aj[1..], &jj, l));
                    rhs.add_assign(&t.scale_q(&(&v1 * &v2 * &half)));
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// `Ψ_b^b` (k = 0) or `Ψ_b^{b−1}` (k = 1) at `t_i`.
fn top_level(psi: &PsiTable, b: u32, drop: u32, arity: usize, i: usize) -> Result<MPoly<Q>> {
    if drop > b {
        return Ok(MPoly::zero(arity));
    }
    level_at(psi, b, (b - drop) as usize, arity, i)
}

fn top_product(psi: &PsiTable, b: &[u32], vars: &[usize], arity: usize) -> Result<MPoly<Q>> {
    let mut p = MPoly::one(arity);
    for (k, &x) in b.iter().enumerate() {
        p = p.mul(&top_level(psi, x, 0, arity, vars[k])?);
    }
    Ok(p)
}

/// `Σ_s Ψ_{b_s}^{b_s−1}(t_s) Π_{r≠s} Ψ_{b_r}^{b_r}(t_r)`
fn one_drop_product(psi: &PsiTable, b: &[u32], vars: &[usize], arity: usize) -> Result<MPoly<Q>> {
    let mut acc = MPoly::zero(arity);
    for s in 0..b.len() {
        let mut p = top_level(psi, b[s], 1, arity, vars[s])?;
        for r in 0..b.len() {
            if r != s {
                p = p.mul(&top_level(psi, b[r], 0, arity, vars[r])?);
            }
        }
        acc.add_assign(&p);
    }
    Ok(acc)
}

/// The next-to-top order at τ = ∞ in terms of `Ψ_b^b` and `Ψ_b^{b−1}`, divided by `(−1)^{g+1}`.
fn cor12b_sides(c: &mut Correlators, psi: &PsiTable, g: u32, l: usize) -> Result<(MPoly<Q>, MPoly<Q>)> {
    let all: Vec<usize> = (0..l).collect();
    let top = 3 * g + l as u32 - 3;
    let gi = g as i64;
    let mut lhs = MPoly::zero(l);
    for b in compositions_up_to(l, top) {
        let v = c.q(Insertion::ChernAtOne, g, &b)?;
        if v.is_zero() {
            continue;
        }
        let size = b.iter().sum::<u32>() as i64;
        let mut s = top_product(psi, &b, &all, l)?
            .scale_q(&qi(gi - 1 - size))
            .add(&one_drop_product(psi, &b, &all, l)?)
            .scale_q(&qi(2 * gi - 3 + l as i64));
        for i in 0..l {
            let ti = MPoly::var(l, i);
            let w = ti.mul(&ti).sub(&ti);
            let rest = rest_of(l, &[i]);
            let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
            let x = top_level(psi, b[i], 0, l, i)?.derivative(i).mul(&w);
            let y = top_level(psi, b[i], 1, l, i)?.derivative(i).mul(&w);
            s.add_assign(&x.scale_q(&qi(gi - size - 2)).add(&y).mul(&top_product(psi, &rb, &rest, l)?));
            s.add_assign(&x.mul(&one_drop_product(psi, &rb, &rest, l)?));
        }
        lhs.add_assign(&s.scale_q(&v));
    }
    let mut rhs = MPoly::zero(l);
    for i in 0..l {
        for j in i + 1..l {
            let rest = rest_of(l, &[i, j]);
            let ti = MPoly::var(l, i);
            let tj = MPoly::var(l, j);
            for ab in compositions_up_to(l - 1, top - 1) {
                let v = c.q(Insertion::ChernAtOne, g, &ab)?;
                if v.is_zero() {
                    continue;
                }
                let a = ab[0] + 1;
                let br = &ab[1..];
                let shift = qi(gi - ab[0] as i64 - br.iter().sum::<u32>() as i64 - 3);
                // t²(Ψ^a_{a+1} + (shift + 1/t)Ψ^{a+1}_{a+1}) = t²Ψ^a + (shift t² + t)Ψ^{a+1}
                let u = |t: &MPoly<Q>, k: usize| -> Result<MPoly<Q>> {
                    let t2 = t.mul(t);
                    let lin = t2.scale_q(&shift).add(t);
                    Ok(t2.mul(&top_level(psi, a, 1, l, k)?).add(&lin.mul(&top_level(psi, a, 0, l, k)?)))
                };
                let x = |t: &MPoly<Q>, k: usize| -> Result<MPoly<Q>> { Ok(t.mul(t).mul(&top_level(psi, a, 0, l, k)?)) };
                let main = join_quotient(&u(&ti, i)?, &u(&tj, j)?, i, j, l)?.mul(&top_product(psi, br, &rest, l)?);
                let drop = join_quotient(&x(&ti, i)?, &x(&tj, j)?, i, j, l)?.mul(&one_drop_product(psi, br, &rest, l)?);
                rhs.add_assign(&main.add(&drop).scale_q(&v));
            }
        }
    }
    let half = qf(1, 2);
    for i in 0..l {
        let rest = rest_of(l, &[i]);
        // (g − a_1 − a_2 − |b_rest| − 4) X X X + Y X X + X Y X + X X R
        let cut = |a1: u32, a2: u32, br: &[u32], vars: &[usize]| -> Result<MPoly<Q>> {
            let x1 = top_level(psi, a1 + 1, 0, l, i)?;
            let x2 = top_level(psi, a2 + 1, 0, l, i)?;
            let y1 = top_level(psi, a1 + 1, 1, l, i)?;
            let y2 = top_level(psi, a2 + 1, 1, l, i)?;
            let xr = top_product(psi, br, vars, l)?;
            let k = qi(gi - a1 as i64 - a2 as i64 - br.iter().sum::<u32>() as i64 - 4);
            let mut p = x1.mul(&x2).scale_q(&k).add(&y1.mul(&x2)).add(&x1.mul(&y2)).mul(&xr);
            p.add_assign(&x1.mul(&x2).mul(&one_drop_product(psi, br, vars, l)?));
            Ok(p)
        };
        if is_stable(g - 1, l + 1) {
            for ab in compositions_up_to(l + 1, 3 * (g - 1) + l as u32 - 2) {
                let v = c.q(Insertion::ChernAtOne, g - 1, &ab)?;
                if !v.is_zero() {
                    rhs.add_assign(&cut(ab[0], ab[1], &ab[2..], &rest)?.scale_q(&(&v * &half)));
                }
            }
        } else if g == 1 && l == 1 {
            let y = MPoly::from_upoly(1, 0, psi.psi_level(1, 0)?);
            let x = MPoly::from_upoly(1, 0, psi.psi_level(1, 1)?);
            let f = integrate_from_one(&y.sub(&x.scale_q(&qi(2))).to_tpoly()).tau_slice(TauPoint::Zero, 0);
            rhs.add_assign(&f.embed(&[i], l).scale_q(&half));
        }
        for (g1, ii, jj) in stable_splits(g, &rest) {
            let g2 = g - g1;
            for ai in compositions_up_to(ii.len() + 1, 3 * g1 + ii.len() as u32 - 2) {
                let v1 = c.q(Insertion::ChernAtOne, g1, &ai)?;
                if v1.is_zero() {
                    continue;
                }
                for aj in compositions_up_to(jj.len() + 1, 3 * g2 + jj.len() as u32 - 2) {
                    let v2 = c.q(Insertion::ChernAtOne, g2, &aj)?;
                    if v2.is_zero() {
                        continue;
                    }
                    let mut br: Vec<u32> = ai[1..].to_vec();
                    br.extend_from_slice(&aj[1..]);
                    let mut vars = ii.clone();
                    vars.extend_from_slice(&jj);
                    rhs.add_assign(&cut(ai[0], aj[0], &br, &vars)?.scale_q(&(&v1 * &v2 * &half)));
                }
            }
        }
    }
    Ok((lhs, rhs))
}

fn cor13_sides(c: &mut Correlators, psi: &PsiTable, g: u32, l: usize) -> Result<(MPoly<Q>, MPoly<Q>)> {
    let all: Vec<usize> = (0..l).collect();
    let top = 3 * g + l as u32 - 3;
    let mut lhs = MPoly::zero(l);
    for b in compositions_up_to(l, top) {
        let v = c.q(Insertion::LambdaTop, g, &b)?;
        if !v.is_zero() {
            lhs.add_assign(&level0_product(psi, &b, &all, l)?.scale_q(&v));
        }
    }
    let mut rhs = MPoly::zero(l);
    for i in 0..l {
        for j in i + 1..l {
            let rest = rest_of(l, &[i, j]);
            for ab in compositions_up_to(l - 1, top - 1) {
                let v = c.q(Insertion::LambdaTop, g, &ab)?;
                if v.is_zero() {
                    continue;
                }
                let a = ab[0] + 1;
                let ti = MPoly::var(l, i);
                let tj = MPoly::var(l, j);
                let ui = ti.mul(&level_at(psi, a, 0, l, i)?);
                let uj = tj.mul(&level_at(psi, a, 0, l, j)?);
                let quo = join_quotient(&ui, &uj, i, j, l)?;
                rhs.add_assign(&quo.mul(&level0_product(psi, &ab[1..], &rest, l)?).scale_q(&v));
            }
        }
    }
    Ok((lhs, rhs.scale_q(&qi(l as i64 - 1).recip())))
}

/// Both sides of the next-to-lowest order at τ = 0; `p` selects the full or the
/// `λ_gλ_1`-free `Σ P_d`.
pub fn cor14_sides(
    c: &mut Correlators,
    psi: &PsiTable,
    g: u32,
    l: usize,
    p: Insertion,
) -> Result<(MPoly<Q>, MPoly<Q>)> {
    let all: Vec<usize> = (0..l).collect();
    let top = 3 * g + l as u32 - 3;
    let li = qi(l as i64);
    let mut lhs = MPoly::zero(l);
    for b in compositions_up_to(l, top) {
        let v = c.q(Insertion::LambdaTop, g, &b)?;
        if !v.is_zero() {
            let size = b.iter().sum::<u32>() as i64;
            let mut s = level0_product(psi, &b, &all, l)?.scale_q(&qi(-(size + 1)));
            for j in 0..l {
                let rest = rest_of(l, &[j]);
                let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
                s.add_assign(&level_at(psi, b[j], 1, l, j)?.mul(&level0_product(psi, &rb, &rest, l)?));
            }
            lhs.add_assign(&s.scale_q(&(&v * &li)));
            for i in 0..l {
                let ti = MPoly::var(l, i);
                let d = level_at(psi, b[i], 0, l, i)?.derivative(i).mul(&ti.mul(&ti).sub(&ti));
                let rest = rest_of(l, &[i]);
                let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
                lhs.add_assign(&d.mul(&level0_product(psi, &rb, &rest, l)?).scale_q(&v));
            }
        }
        let pv = c.q(p, g, &b)?;
        if !pv.is_zero() {
            lhs.add_assign(&level0_product(psi, &b, &all, l)?.scale_q(&(&pv * &li)));
        }
    }
    let mut rhs = MPoly::zero(l);
    for i in 0..l {
        for j in i + 1..l {
            let rest = rest_of(l, &[i, j]);
            let ti = MPoly::var(l, i);
            let tj = MPoly::var(l, j);
            for ab in compositions_up_to(l - 1, top - 1) {
                let v = c.q(Insertion::LambdaTop, g, &ab)?;
                let pv = c.q(p, g, &ab)?;
                if v.is_zero() && pv.is_zero() {
                    continue;
                }
                let a = ab[0] + 1;
                let br = &ab[1..];
                let q0 = join_quotient(
                    &ti.mul(&level_at(psi, a, 0, l, i)?),
                    &tj.mul(&level_at(psi, a, 0, l, j)?),
                    i,
                    j,
                    l,
                )?;
                let rest0 = level0_product(psi, br, &rest, l)?;
                if !v.is_zero() {
                    let shift = qi(br.iter().sum::<u32>() as i64 + a as i64 + 2);
                    let w = |t: &MPoly<Q>, k: usize| -> Result<MPoly<Q>> {
                        let lin = t.sub(&MPoly::constant(l, shift.clone()));
                        Ok(t.mul(&level_at(psi, a, 1, l, k)?.add(&lin.mul(&level_at(psi, a, 0, l, k)?))))
                    };
                    let quo = join_quotient(&w(&ti, i)?, &w(&tj, j)?, i, j, l)?;
                    rhs.add_assign(&quo.mul(&rest0).scale_q(&v));
                    for (k, &r) in rest.iter().enumerate() {
                        let others: Vec<usize> = rest.iter().copied().filter(|&x| x != r).collect();
                        let ob: Vec<u32> = (0..br.len()).filter(|&x| x != k).map(|x| br[x]).collect();
                        let t = level_at(psi, br[k], 1, l, r)?.mul(&level0_product(psi, &ob, &others, l)?).mul(&q0);
                        rhs.add_assign(&t.scale_q(&v));
                    }
                }
                if !pv.is_zero() {
                    rhs.add_assign(&q0.mul(&rest0).scale_q(&pv));
                }
            }
        }
    }
    let half = qf(1, 2);
    for i in 0..l {
        let rest = rest_of(l, &[i]);
        for (g1, ii, jj) in stable_splits(g, &rest) {
            let g2 = g - g1;
            for ai in compositions_up_to(ii.len() + 1, 3 * g1 + ii.len() as u32 - 2) {
                let v1 = c.q(Insertion::LambdaTop, g1, &ai)?;
                if v1.is_zero() {
                    continue;
                }
                for aj in compositions_up_to(jj.len() + 1, 3 * g2 + jj.len() as u32 - 2) {
                    let v2 = c.q(Insertion::LambdaTop, g2, &aj)?;
                    if v2.is_zero() {
                        continue;
                    }
                    let t = level_at(psi, ai[0] + 1, 0, l, i)?
                        .mul(&level_at(psi, aj[0] + 1, 0, l, i)?)
                        .mul(&level0_product(psi, &ai[1..], &ii, l)?)
                        .mul(&level0_product(psi, &aj[1..], &jj, l)?);
                    rhs.add_assign(&t.scale_q(&(&v1 * &v2 * &half)));
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// `C(g,l,b)`: the part of ⟨τ_bλ_gλ_1⟩_g not produced by the merge sum, read off
/// `[t^{b+1}]` of the top-degree part of the `λ_gλ_1`-free next-to-lowest slice.
pub fn lambda_g_lambda1_constant(c: &mut Correlators, psi: &PsiTable, g: u32, b: &[u32]) -> Result<Q> {
    let l = b.len();
    if g < 2 || l == 0 || b.iter().sum::<u32>() as i64 != 2 * g as i64 - 4 + l as i64 {
        return Err(CutJoinError::Signature { g, l });
    }
    let (lhs, rhs) = cor14_sides(c, psi, g, l, Insertion::PSumMasked)?;
    let d = lhs.sub(&rhs).degree_slice(2 * g + 2 * l as u32 - 4);
    let e: Vec<u32> = b.iter().map(|&x| x + 1).collect();
    let mut den = qi(l as i64);
    for &x in b {
        den *= Q::from_integer(factorial(x as u64));
    }
    Ok(d.coeff(&e) / den)
}

/// ⟨τ_bλ_gλ_1⟩_g from the merge recursion, starting at `⟨τ_{2g−3}λ_gλ_1⟩_g`.
pub fn lambda_g_lambda1_recursive(c: &mut Correlators, psi: &PsiTable, g: u32, b: &[u32]) -> Result<Q> {
    let l = b.len();
    if g < 2 || b.iter().sum::<u32>() as i64 != 2 * g as i64 - 4 + l as i64 {
        return Ok(Q::zero());
    }
    if l == 1 {
        return Ok(c.table().li_initial_value(g)?);
    }
    let mut s = Q::zero();
    for i in 0..l {
        for j in i + 1..l {
            let m = b[i] + b[j];
            if m == 0 {
                continue;
            }
            let mut nb = vec![m - 1];
            nb.extend(rest_of(l, &[i, j]).iter().map(|&k| b[k]));
            let w = Q::from_integer(factorial(m as u64))
                / Q::from_integer(factorial(b[i] as u64) * factorial(b[j] as u64));
            s += lambda_g_lambda1_recursive(c, psi, g, &nb)? * w;
        }
    }
    Ok(s / qi(l as i64) + lambda_g_lambda1_constant(c, psi, g, b)?)
}
