//! Correlators ⟨τ_{b_1}⋯τ_{b_l} · class⟩_g.
//!
//! Pure ψ-integrals come from the DVV recursion. λ_g uses the multinomial
//! formula with the seed constants c_g; λ_{g−1} and λ_gλ_1 start from seeds
//! (or Li's initial value) and are pulled back along the forgetful maps by
//! the string and dilaton equations. Anything else is reported as unseeded.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lambda::{mono_degree, mono_from_indices, mono_indices, ClassTau, GammaData, LambdaMono};
use crate::q::{double_factorial, factorial, multinomial, qf, qi, Ring, Q};
use crate::ratfn::RatFn;
use crate::upoly::UPoly;

/// Weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of factorials of the multiplicities.
    pub fn aut(&self) -> Q {
        let mut r = Q::one();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            r *= Q::from_integer(factorial((j - i) as u64));
            i = j;
        }
        r
    }

    /// All partitions of `n`, parts in decreasing order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=n.min(max)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

/// `(g, b_L sorted, λ-monomial)`
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CorrelatorKey {
    pub g: u32,
    pub b: Vec<u32>,
    pub lambda: LambdaMono,
}

impl CorrelatorKey {
    pub fn new(g: u32, b: &[u32], lambda: LambdaMono) -> Self {
        let mut b = b.to_vec();
        b.sort_unstable();
        CorrelatorKey { g, b, lambda }
    }

    pub fn l(&self) -> usize {
        self.b.len()
    }

    pub fn is_stable(&self) -> bool {
        2 * self.g as i64 - 2 + self.b.len() as i64 > 0
    }

    /// `|b| + deg λ = 3g − 3 + l` and stable
    pub fn passes_gate(&self) -> bool {
        self.is_stable()
            && self.b.iter().sum::<u32>() as i64 + mono_degree(&self.lambda) as i64
                == 3 * self.g as i64 - 3 + self.b.len() as i64
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for b in &self.b {
            write!(f, "tau_{} ", b)?;
        }
        let idx = mono_indices(&self.lambda);
        if idx.is_empty() {
            write!(f, "1")?;
        }
        for (k, i) in idx.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "lambda_{}", i)?;
        }
        write!(f, ">_{}", self.g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HodgeError {
    /// no formula, seed or reduction reaches this correlator
    Unseeded(CorrelatorKey),
    /// a seed constant (`c_g`, `b_g`) is absent
    MissingConstant { name: String, g: u32 },
    Unstable { g: u32, l: usize },
    /// an unstable signature other than (0,1) or (0,2)
    BadUnstable { g: u32, l: usize },
}

impl fmt::Display for HodgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HodgeError::Unseeded(k) => write!(f, "unseeded correlator {}", k),
            HodgeError::MissingConstant { name, g } => write!(f, "missing seed constant {}:{}", name, g),
            HodgeError::Unstable { g, l } => write!(f, "unstable signature (g,l)=({},{})", g, l),
            HodgeError::BadUnstable { g, l } => write!(f, "no convention for unstable (g,l)=({},{})", g, l),
        }
    }
}

/// Seed constants: `c_g` (λ_g integrals), `b_g` (Li's initial value) and
/// individual λ_{g−1} correlators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Seeds {
    pub c: BTreeMap<u32, Q>,
    pub b: BTreeMap<u32, Q>,
    pub lambda_gm1: BTreeMap<(u32, Vec<u32>), Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedKeyError {
    UnknownKind(String),
    BadNumber(String),
}

impl Seeds {
    /// Accepts `c_g:G`, `b_g:G` and `lambda_gm1:G:b1,b2,…`.
    pub fn insert_key(&mut self, key: &str, value: Q) -> Result<(), SeedKeyError> {
        let mut it = key.split(':');
        let kind = it.next().unwrap_or("");
        let g: u32 = it
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| SeedKeyError::BadNumber(key.into()))?;
        match kind {
            "c_g" => {
                self.c.insert(g, value);
            }
            "b_g" => {
                self.b.insert(g, value);
            }
            "lambda_gm1" => {
                let list = it.next().ok_or_else(|| SeedKeyError::BadNumber(key.into()))?;
                let mut b = Vec::new();
                for s in list.split(',') {
                    b.push(s.trim().parse::<u32>().map_err(|_| SeedKeyError::BadNumber(key.into()))?);
                }
                b.sort_unstable();
                self.lambda_gm1.insert((g, b), value);
            }
            _ => return Err(SeedKeyError::UnknownKind(kind.into())),
        }
        if it.next().is_some() {
            return Err(SeedKeyError::BadNumber(key.into()));
        }
        Ok(())
    }

    /// Canonical key strings with values, sorted.
    pub fn entries(&self) -> Vec<(String, Q)> {
        let mut v = Vec::new();
        for (g, x) in &self.c {
            v.push((alloc::format!("c_g:{}", g), x.clone()));
        }
        for (g, x) in &self.b {
            v.push((alloc::format!("b_g:{}", g), x.clone()));
        }
        for ((g, b), x) in &self.lambda_gm1 {
            let list: Vec<String> = b.iter().map(|k| alloc::format!("{}", k)).collect();
            v.push((alloc::format!("lambda_gm1:{}:{}", g, list.join(",")), x.clone()));
        }
        v
    }

    /// Highest genus whose c_g and b_g are both present, counting up from 1.
    pub fn constants_through(&self) -> u32 {
        let mut g = 0;
        while self.c.contains_key(&(g + 1)) && self.b.contains_key(&(g + 1)) {
            g += 1;
        }
        g
    }
}

/// `C_{g,μ}(τ) = i^phase · value`, with `phase` taken mod 4.
#[derive(Clone, Debug, PartialEq)]
pub struct MvCoefficient {
    pub phase: u8,
    pub value: RatFn,
}

/// Memoized correlator oracle.
#[derive(Clone, Debug)]
pub struct HodgeTable {
    seeds: Seeds,
    psi: BTreeMap<(u32, Vec<u32>), Q>,
    pulled: BTreeMap<CorrelatorKey, Q>,
    gammas: BTreeMap<u32, GammaData>,
}

fn sorted(b: &[u32]) -> Vec<u32> {
    let mut v = b.to_vec();
    v.sort_unstable();
    v
}

fn dfact(n: i64) -> Q {
    Q::from_integer(double_factorial(n))
}

impl HodgeTable {
    pub fn new(seeds: Seeds) -> Self {
        HodgeTable { seeds, psi: BTreeMap::new(), pulled: BTreeMap::new(), gammas: BTreeMap::new() }
    }

    pub fn seeds(&self) -> &Seeds {
        &self.seeds
    }

    /// ⟨τ_{b_1}⋯τ_{b_l}⟩_g; zero off the dimension gate and for unstable (g,l).
    pub fn psi_intersection(&mut self, g: u32, b: &[u32]) -> Q {
        let b = sorted(b);
        let n = b.len() as i64;
        if 2 * g as i64 - 2 + n <= 0 {
            return Q::zero();
        }
        if b.iter().sum::<u32>() as i64 != 3 * g as i64 - 3 + n {
            return Q::zero();
        }
        if g == 0 && n == 3 {
            return Q::one();
        }
        if g == 1 && n == 1 {
            return qf(1, 24);
        }
        if let Some(v) = self.psi.get(&(g, b.clone())) {
            return v.clone();
        }
        let v = self.psi_compute(g, &b);
        self.psi.insert((g, b), v.clone());
        v
    }

    fn psi_compute(&mut self, g: u32, b: &[u32]) -> Q {
        if b[0] == 0 {
            let rest = &b[1..];
            let mut s = Q::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut r = rest.to_vec();
                    r[j] -= 1;
                    s += self.psi_intersection(g, &r);
                }
            }
            return s;
        }
        if let Some(i) = b.iter().position(|&x| x == 1) {
            let mut rest = b.to_vec();
            rest.remove(i);
            let k = 2 * g as i64 - 2 + rest.len() as i64;
            return qi(k) * self.psi_intersection(g, &rest);
        }
        // DVV on the last entry
        let k = (b[b.len() - 1] - 1) as i64;
        let s_list = &b[..b.len() - 1];
        let mut s = Q::zero();
        for (j, &d) in s_list.iter().enumerate() {
            let mut r: Vec<u32> = s_list.to_vec();
            r.remove(j);
            r.push(k as u32 + d);
            s += dfact(2 * k + 2 * d as i64 + 1) / dfact(2 * d as i64 - 1) * self.psi_intersection(g, &r);
        }
        let mut acc = Q::zero();
        for r in 0..k {
            let sr = k - 1 - r;
            let c = dfact(2 * r + 1) * dfact(2 * sr + 1);
            let mut t = Q::zero();
            if g >= 1 {
                let mut v = s_list.to_vec();
                v.push(r as u32);
                v.push(sr as u32);
                t += self.psi_intersection(g - 1, &v);
            }
            let n = s_list.len();
            for g1 in 0..=g {
                for mask in 0u32..(1 << n) {
                    let mut i1 = vec![r as u32];
                    let mut j1 = vec![sr as u32];
                    for (q, &x) in s_list.iter().enumerate() {
                        if mask >> q & 1 == 1 {
                            i1.push(x);
                        } else {
                            j1.push(x);
                        }
                    }
                    let a = self.psi_intersection(g1, &i1);
                    if a.is_zero() {
                        continue;
                    }
                    t += a * self.psi_intersection(g - g1, &j1);
                }
            }
            acc += c * t;
        }
        s += acc / qi(2);
        s / dfact(2 * k + 3)
    }

    /// The (0,1) and (0,2) conventions: `1/μ²` and `1/(μ_1+μ_2)`.
    pub fn unstable_integral(g: u32, mu: &[u32]) -> Result<Q, HodgeError> {
        match (g, mu.len()) {
            (0, 1) => Ok(qf(1, (mu[0] as i64) * (mu[0] as i64))),
            (0, 2) => Ok(qf(1, (mu[0] + mu[1]) as i64)),
            (g, l) => Err(HodgeError::BadUnstable { g, l }),
        }
    }

    fn constant(&self, name: &str, g: u32) -> Result<Q, HodgeError> {
        if g == 0 {
            return Ok(Q::one());
        }
        let m = if name == "c_g" { &self.seeds.c } else { &self.seeds.b };
        m.get(&g).cloned().ok_or_else(|| HodgeError::MissingConstant { name: name.into(), g })
    }

    /// ⟨τ_{b_L} λ_g⟩_g = multinomial(2g−3+l; b_L)·c_g.
    pub fn lambda_g_value(&self, g: u32, b: &[u32]) -> Result<Q, HodgeError> {
        let l = b.len() as i64;
        let n = 2 * g as i64 - 3 + l;
        if g == 0 || 2 * g as i64 - 2 + l <= 0 || b.iter().sum::<u32>() as i64 != n {
            return Ok(Q::zero());
        }
        let parts: Vec<u64> = b.iter().map(|&x| x as u64).collect();
        Ok(Q::from_integer(multinomial(n as u64, &parts)) * self.constant("c_g", g)?)
    }

    /// ⟨τ_{b_L} λ_{g−1}⟩_g from seeds, via string and dilaton.
    pub fn lambda_gm1_value(&mut self, g: u32, b: &[u32]) -> Result<Q, HodgeError> {
        if g == 0 {
            return Ok(Q::zero());
        }
        if g == 1 {
            return Ok(self.psi_intersection(1, b));
        }
        let key = CorrelatorKey::new(g, b, mono_from_indices(g, &[g - 1]));
        self.pulled_value(key)
    }

    /// ⟨τ_{b_L} λ_gλ_1⟩_g from Li's initial value `⟨τ_{2g−3}λ_gλ_1⟩_g`, via string and dilaton.
    pub fn lambda_g_lambda1_value(&mut self, g: u32, b: &[u32]) -> Result<Q, HodgeError> {
        if g == 0 {
            return Ok(Q::zero());
        }
        if g == 1 {
            // λ_1² = 0 at genus one
            return Ok(Q::zero());
        }
        let key = CorrelatorKey::new(g, b, mono_from_indices(g, &[1, g]));
        self.pulled_value(key)
    }

    /// `(1/12)[g(2g−3)b_g + b_1 b_{g−1}]`
    pub fn li_initial_value(&self, g: u32) -> Result<Q, HodgeError> {
        let gi = g as i64;
        Ok(qf(1, 12) * (qi(gi * (2 * gi - 3)) * self.constant("b_g", g)? + self.constant("b_g", 1)? * self.constant("b_g", g - 1)?))
    }

    fn leaf(&mut self, key: &CorrelatorKey) -> Result<Option<Q>, HodgeError> {
        let idx = mono_indices(&key.lambda);
        let g = key.g;
        if idx == [g - 1] {
            return Ok(self.seeds.lambda_gm1.get(&(g, key.b.clone())).cloned());
        }
        if idx.len() == 2 && idx[0] == 1 && idx[1] == g && key.b.len() == 1 && key.b[0] == 2 * g - 3 {
            return self.li_initial_value(g).map(Some);
        }
        Ok(None)
    }

    /// Dimension-gated value of a correlator whose class pulls back along forgetful maps.
    fn pulled_value(&mut self, key: CorrelatorKey) -> Result<Q, HodgeError> {
        if !key.passes_gate() {
            return Ok(Q::zero());
        }
        if let Some(v) = self.pulled.get(&key) {
            return Ok(v.clone());
        }
        let v = if let Some(v) = self.leaf(&key)? {
            v
        } else if key.b.len() >= 2 && key.b[0] == 0 {
            // string
            let rest = &key.b[1..];
            let mut s = Q::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut r = rest.to_vec();
                    r[j] -= 1;
                    s += self.pulled_value(CorrelatorKey::new(key.g, &r, key.lambda.clone()))?;
                }
            }
            s
        } else if key.b.len() >= 2 && key.b.contains(&1) {
            // dilaton
            let mut rest = key.b.clone();
            let i = rest.iter().position(|&x| x == 1).unwrap();
            rest.remove(i);
            let k = 2 * key.g as i64 - 2 + rest.len() as i64;
            qi(k) * self.pulled_value(CorrelatorKey::new(key.g, &rest, key.lambda.clone()))?
        } else {
            return Err(HodgeError::Unseeded(key));
        };
        self.pulled.insert(key, v.clone());
        Ok(v)
    }

    /// Value of `⟨τ_{b_L} λ^m⟩_g` for a single λ-monomial.
    pub fn monomial_value(&mut self, g: u32, b: &[u32], m: &LambdaMono) -> Result<Q, HodgeError> {
        let key = CorrelatorKey::new(g, b, m.clone());
        if !key.is_stable() {
            return Err(HodgeError::Unstable { g, l: b.len() });
        }
        if !key.passes_gate() {
            return Ok(Q::zero());
        }
        let idx = mono_indices(m);
        if idx.is_empty() {
            return Ok(self.psi_intersection(g, b));
        }
        if idx == [g] {
            return self.lambda_g_value(g, b);
        }
        if idx == [g - 1] {
            return self.lambda_gm1_value(g, b);
        }
        if idx.len() == 2 && idx[0] == 1 && idx[1] == g {
            return self.lambda_g_lambda1_value(g, b);
        }
        Err(HodgeError::Unseeded(key))
    }

    pub fn gamma_data(&mut self, g: u32) -> &GammaData {
        self.gammas.entry(g).or_insert_with(|| GammaData::new(g))
    }

    /// ⟨τ_{b_L} · class⟩_g for a class with τ-polynomial coefficients; only
    /// monomials passing the dimension gate are evaluated.
    pub fn class_correlator(&mut self, g: u32, b: &[u32], class: &ClassTau) -> Result<UPoly, HodgeError> {
        let l = b.len() as i64;
        if 2 * g as i64 - 2 + l <= 0 {
            return Err(HodgeError::Unstable { g, l: b.len() });
        }
        let want = 3 * g as i64 - 3 + l - b.iter().sum::<u32>() as i64;
        let mut acc = UPoly::zero();
        if want < 0 {
            return Ok(acc);
        }
        let terms: Vec<(LambdaMono, UPoly)> =
            class.terms().filter(|(m, _)| mono_degree(m) as i64 == want).map(|(m, c)| (m.clone(), c.clone())).collect();
        for (m, c) in terms {
            let v = self.monomial_value(g, b, &m)?;
            acc = acc.add(&c.scale(&v));
        }
        Ok(acc)
    }

    /// ⟨τ_{b_L} Γ_g(τ)⟩_g as a polynomial in τ.
    pub fn gamma_correlator(&mut self, g: u32, b: &[u32]) -> Result<UPoly, HodgeError> {
        let gm = self.gamma_data(g).gamma.clone();
        self.class_correlator(g, b, &gm)
    }

    /// ⟨τ_{b_L} dΓ_g/dτ⟩_g
    pub fn gamma_derivative_correlator(&mut self, g: u32, b: &[u32]) -> Result<UPoly, HodgeError> {
        let gm = self.gamma_data(g).gamma_derivative();
        self.class_correlator(g, b, &gm)
    }

    /// `C_{g,μ}(τ)` including the (0,1) and (0,2) conventions.
    pub fn mv_coefficient(&mut self, g: u32, mu: &Partition) -> Result<MvCoefficient, HodgeError> {
        let l = mu.len();
        let phase = ((mu.size() as usize + l) % 4) as u8;
        let tt1 = RatFn::poly(UPoly::from_ints(&[0, 1, 1]));
        // Π_i Π_{a=1}^{μ_i−1}(μ_iτ+a)/(μ_i−1)!
        let mut pref = tt1.pow(l as u32 - 1);
        for &m in mu.parts() {
            pref = pref.mul(&a_factor(m));
        }
        let sum: RatFn = if 2 * g as i64 - 2 + l as i64 <= 0 {
            RatFn::q(Self::unstable_integral(g, mu.parts())?)
        } else {
            let top = 3 * g + l as u32 - 3;
            let mut s = UPoly::zero();
            for b in compositions_up_to(l, top) {
                let c = self.gamma_correlator(g, &b)?;
                if c.is_zero() {
                    continue;
                }
                let mut w = Q::one();
                for (k, &m) in mu.parts().iter().enumerate() {
                    w *= Q::from_integer(num_bigint::BigInt::from(m).pow(b[k]));
                }
                s = s.add(&c.scale(&w));
            }
            RatFn::poly(s)
        };
        let value = pref.mul(&sum).neg().scale_q(&mu.aut().recip());
        Ok(MvCoefficient { phase, value })
    }
}

/// `Π_{a=1}^{k−1}(kτ+a)/(k−1)!`
pub fn a_factor(k: u32) -> RatFn {
    let mut p = UPoly::constant(Q::one());
    for a in 1..k {
        p = p.mul(&UPoly::from_ints(&[a as i64, k as i64]));
    }
    RatFn::poly(p.scale(&Q::from_integer(factorial(k as u64 - 1)).recip()))
}

/// All `b ∈ ℕ^l` with `|b| ≤ top`.
pub fn compositions_up_to(l: usize, top: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(l: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(l, left - x, cur, out);
            cur.pop();
        }
    }
    rec(l, top, &mut Vec::new(), &mut out);
    out
}

/// All `b ∈ ℕ^l` with `|b| = total`.
pub fn compositions_of(l: usize, total: u32) -> Vec<Vec<u32>> {
    compositions_up_to(l, total).into_iter().filter(|b| b.iter().sum::<u32>() == total).collect()
}
