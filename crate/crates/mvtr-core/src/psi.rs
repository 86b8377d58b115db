//! The Ψ̂ family, its τ-levels Ψ_b^k(t), ξ̂_b and the tables f^k(b,i).

use alloc::vec;
use alloc::vec::Vec;

use crate::mpoly::TPoly;
use crate::q::{Ring, Q};
use crate::ratfn::RatFn;
use crate::upoly::UPoly;

/// Default memo cap for levels.
pub const DEFAULT_MAX_LEVEL: usize = 16;

/// `(t²−t)(tτ+1)/(τ+1) ∂/∂t_i`
pub fn psi_operator(p: &TPoly, i: usize) -> TPoly {
    let n = p.arity();
    let ti = TPoly::var(n, i);
    let t2 = ti.mul(&ti).sub(&ti);
    let w = ti.scale(&RatFn::tau()).add(&TPoly::one(n)).scale(&RatFn::linear(1, 1).try_inv().unwrap());
    t2.mul(&w).mul(&p.derivative(i))
}

/// Ψ̂_0(t_i) = (t_i − 1)/(τ+1) in `arity` variables.
fn psi_hat_base(arity: usize, i: usize) -> TPoly {
    TPoly::var(arity, i).sub(&TPoly::one(arity)).scale(&RatFn::linear(1, 1).try_inv().unwrap())
}

/// Ψ̂_n(t;τ) in one variable, straight from the defining recursion.
pub fn psi_hat(n: usize) -> TPoly {
    let mut p = psi_hat_base(1, 0);
    for _ in 0..n {
        p = psi_operator(&p, 0);
    }
    p
}

/// `Ψ_{b+1}^k = (t³−t²)(Ψ_b^{k−1})' + (t²−t)(Ψ_b^k)'`
fn next_levels(prev: &[UPoly]) -> Vec<UPoly> {
    let b = prev.len() - 1;
    let t2 = UPoly::from_ints(&[0, -1, 1]);
    let t3 = UPoly::from_ints(&[0, 0, -1, 1]);
    (0..=b + 1)
        .map(|k| {
            let mut acc = UPoly::zero();
            if k >= 1 {
                acc = acc.add(&t3.mul(&prev[k - 1].derivative()));
            }
            if k <= b {
                acc = acc.add(&t2.mul(&prev[k].derivative()));
            }
            acc
        })
        .collect()
}

/// `ξ̂_b(t) = ((t³−t²) d/dt)^b (t−1)`
pub fn xi_hat(b: usize) -> UPoly {
    let t3 = UPoly::from_ints(&[0, 0, -1, 1]);
    let mut p = UPoly::from_ints(&[-1, 1]);
    for _ in 0..b {
        p = t3.mul(&p.derivative());
    }
    p
}

/// Memoized Ψ̂_n and Ψ_b^k up to a fixed level, filled once at construction.
#[derive(Clone, Debug)]
pub struct PsiTable {
    hats: Vec<TPoly>,
    levels: Vec<Vec<UPoly>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiError {
    /// `k > b`
    WeightOutOfRange { b: usize, k: usize },
    /// requested level above the table's cap
    BeyondCap { level: usize, cap: usize },
}

impl core::fmt::Display for PsiError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PsiError::WeightOutOfRange { b, k } => write!(f, "weight k={} out of range for level b={}", k, b),
            PsiError::BeyondCap { level, cap } => write!(f, "level {} above the memo cap {}", level, cap),
        }
    }
}

impl PsiTable {
    pub fn new(max_level: usize) -> Self {
        let mut hats = vec![psi_hat_base(1, 0)];
        let mut levels = vec![vec![UPoly::from_ints(&[-1, 1])]];
        for n in 0..max_level {
            hats.push(psi_operator(&hats[n], 0));
            let nx = next_levels(&levels[n]);
            levels.push(nx);
        }
        PsiTable { hats, levels }
    }

    pub fn cap(&self) -> usize {
        self.hats.len() - 1
    }

    fn check(&self, level: usize) -> Result<(), PsiError> {
        if level > self.cap() {
            Err(PsiError::BeyondCap { level, cap: self.cap() })
        } else {
            Ok(())
        }
    }

    pub fn psi_hat(&self, n: usize) -> Result<&TPoly, PsiError> {
        self.check(n)?;
        Ok(&self.hats[n])
    }

    /// Ψ̂_n(t_i) inside a polynomial ring of `arity` variables.
    pub fn psi_hat_at(&self, n: usize, arity: usize, i: usize) -> Result<TPoly, PsiError> {
        Ok(self.psi_hat(n)?.embed(&[i], arity))
    }

    pub fn psi_level(&self, b: usize, k: usize) -> Result<&UPoly, PsiError> {
        self.check(b)?;
        if k > b {
            return Err(PsiError::WeightOutOfRange { b, k });
        }
        Ok(&self.levels[b][k])
    }

    /// `f^k(b,i) = [t^i] Ψ_b^k`; zero outside the band.
    pub fn f_coeff(&self, k: usize, b: usize, i: usize) -> Result<Q, PsiError> {
        self.check(b)?;
        if k > b {
            return Ok(Q::zero());
        }
        Ok(self.levels[b][k].coeff(i))
    }

    /// `Σ_k τ^k/(τ+1)^{b+1} Ψ_b^k(t)`
    pub fn reassemble(&self, b: usize) -> Result<TPoly, PsiError> {
        self.check(b)?;
        let den = RatFn::linear(1, 1).pow(b as u32 + 1).try_inv().unwrap();
        let mut acc = TPoly::zero(1);
        for (k, p) in self.levels[b].iter().enumerate() {
            let w = RatFn::tau().pow(k as u32).mul(&den);
            acc.add_assign(&TPoly::from_upoly(1, 0, p).scale(&w));
        }
        Ok(acc)
    }
}

impl Default for PsiTable {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_LEVEL)
    }
}
