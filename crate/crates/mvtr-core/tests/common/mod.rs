#![allow(dead_code)]

pub mod ledger;

use mvtr_core::hodge::{HodgeTable, Seeds};
use mvtr_core::q::{qf, Q};
use mvtr_core::{Ring, Series};

/// `[t^{2g}] (t/2)/sin(t/2)` for g = 0..=n, straight from the sine series.
pub fn sine_constants(n: usize) -> Vec<Q> {
    let order = 2 * n as i64 + 3;
    // sin(t/2)/(t/2) = Σ (−1)^k (t/2)^{2k}/(2k+1)!
    let mut c = Vec::new();
    let mut f = Q::one();
    for k in 0..=order {
        if k > 0 {
            f /= Q::from_integer(k.into());
        }
        c.push(f.clone());
    }
    let mut coeffs = Vec::new();
    for k in 0..order {
        if k % 2 == 0 {
            let j = k / 2;
            let s = if j % 2 == 0 { Q::one() } else { -Q::one() };
            let two = Q::from_integer(4i64.pow(j as u32).into());
            coeffs.push(s * c[(k + 1) as usize].clone() / two);
        } else {
            coeffs.push(Q::zero());
        }
    }
    let s = Series::<Q>::from_poly(coeffs, order);
    let inv = s.inv().unwrap();
    (0..=n).map(|g| inv.coeff(2 * g as i64)).collect()
}

pub fn seeds() -> Seeds {
    let c = sine_constants(4);
    let mut s = Seeds::default();
    for g in 1..=4u32 {
        s.c.insert(g, c[g as usize].clone());
        s.b.insert(g, c[g as usize].clone());
    }
    s.lambda_gm1.insert((2, vec![3]), qf(1, 480));
    s.lambda_gm1.insert((2, vec![2, 2]), qf(5, 576));
    s
}

pub fn table() -> HodgeTable {
    HodgeTable::new(seeds())
}

/// Only the genus-one constants.
pub fn genus_one_table() -> HodgeTable {
    let c = sine_constants(1);
    let mut s = Seeds::default();
    s.c.insert(1, c[1].clone());
    s.b.insert(1, c[1].clone());
    HodgeTable::new(s)
}
