//! Consistency audit of a seed set: every identity a seed feeds into is run,
//! and each key is flagged by the checks that consume it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cutjoin::{
    cutjoin_partition_residual_with, lambda_g_lambda1_recursive, verify_theorem11, CutJoinError, Correlators,
    MvCache,
};
use crate::hodge::{compositions_of, HodgeError, HodgeTable, Partition, Seeds};
use crate::psi::PsiTable;
use crate::q::{factorial, qi, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// the check needs a value the seed set does not provide
    Unavailable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub g: u32,
    /// seed keys whose values enter the check
    pub keys: Vec<String>,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyStatus {
    Consistent,
    Flagged,
    Unchecked,
}

impl KeyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            KeyStatus::Consistent => "consistent",
            KeyStatus::Flagged => "flagged",
            KeyStatus::Unchecked => "unchecked",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Audit {
    pub checks: Vec<Check>,
    pub keys: Vec<(String, KeyStatus)>,
    /// highest genus with both constants present
    pub constants_through: u32,
}

impl Audit {
    pub fn pass(&self) -> bool {
        self.keys.iter().all(|(_, s)| *s != KeyStatus::Flagged)
    }

    pub fn status(&self, key: &str) -> Option<KeyStatus> {
        self.keys.iter().find(|(k, _)| k == key).map(|(_, s)| *s)
    }
}

/// Keys of genus `g` that the genus-`g` identities read.
fn genus_keys(seeds: &Seeds, g: u32, with_c: bool, with_b: bool) -> Vec<String> {
    let mut out = Vec::new();
    if with_c {
        out.push(format!("c_g:{}", g));
    }
    if with_b && g >= 2 {
        for k in [g, 1, g - 1] {
            let s = format!("b_g:{}", k);
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    if g >= 2 {
        for (k, _) in seeds.entries() {
            if k.starts_with(&format!("lambda_gm1:{}:", g)) {
                out.push(k);
            }
        }
    }
    out
}

fn classify(r: Result<Option<String>, CutJoinError>) -> Outcome {
    match r {
        Ok(None) => Outcome::Pass,
        Ok(Some(why)) => Outcome::Fail(why),
        Err(CutJoinError::Hodge(e @ (HodgeError::Unseeded(_) | HodgeError::MissingConstant { .. }))) => {
            Outcome::Unavailable(e.to_string())
        }
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn theorem_check(h: &mut HodgeTable, psi: &PsiTable, g: u32) -> Result<Option<String>, CutJoinError> {
    let r = verify_theorem11(h, psi, g, 1)?;
    Ok(if r.pass { None } else { Some(format!("{} residual has {} terms", r.identity, r.residual.len())) })
}

fn cutjoin_check(h: &mut HodgeTable, g: u32, max_size: u32) -> Result<Option<String>, CutJoinError> {
    let mut c = MvCache::new(h);
    for n in 1..=max_size {
        for mu in Partition::all_of(n) {
            if !cutjoin_partition_residual_with(&mut c, g, &mu)?.is_zero() {
                return Ok(Some(format!("nonzero residual at mu={}", mu)));
            }
        }
    }
    Ok(None)
}

fn merge_check(h: &HodgeTable, g: u32) -> Result<Option<String>, CutJoinError> {
    for l in 2..=4usize {
        for b in compositions_of(l, 2 * g + l as u32 - 3) {
            let lhs = h.lambda_g_value(g, &b)?;
            let mut s = Q::from_integer(0.into());
            for i in 0..l {
                for j in i + 1..l {
                    if b[i] + b[j] == 0 {
                        continue;
                    }
                    let mut r: Vec<u32> = (0..l).filter(|&k| k != i && k != j).map(|k| b[k]).collect();
                    r.push(b[i] + b[j] - 1);
                    let c = Q::from_integer(factorial((b[i] + b[j]) as u64))
                        / Q::from_integer(factorial(b[i] as u64) * factorial(b[j] as u64));
                    s += h.lambda_g_value(g, &r)? * c;
                }
            }
            if lhs != s / qi(l as i64 - 1) {
                return Ok(Some(format!("merge fails at b={:?}", b)));
            }
        }
    }
    Ok(None)
}

fn li_check(h: &mut HodgeTable, psi: &PsiTable, g: u32) -> Result<Option<String>, CutJoinError> {
    for l in 1..=3usize {
        for b in compositions_of(l, 2 * g + l as u32 - 4) {
            let want = h.lambda_g_lambda1_value(g, &b)?;
            let got = lambda_g_lambda1_recursive(&mut Correlators::new(h), psi, g, &b)?;
            if got != want {
                return Ok(Some(format!("recursion {} vs seeded {} at b={:?}", got, want, b)));
            }
        }
    }
    Ok(None)
}

/// Runs, for every genus that some key mentions: the one-point theorem, the
/// partition cut-and-join up to `|μ| = cutjoin_size`, the λ_g merge recursion
/// and (g ≥ 2) the λ_gλ_1 recursion against the seeded initial value.
pub fn audit(seeds: &Seeds, psi: &PsiTable, cutjoin_size: u32) -> Audit {
    let entries = seeds.entries();
    let top = seeds
        .c
        .keys()
        .chain(seeds.b.keys())
        .chain(seeds.lambda_gm1.keys().map(|(g, _)| g))
        .copied()
        .max()
        .unwrap_or(0);
    let mut checks = Vec::new();
    for g in 1..=top {
        let mut h = HodgeTable::new(seeds.clone());
        checks.push(Check {
            name: format!("theorem11({},1)", g),
            g,
            keys: genus_keys(seeds, g, true, true),
            outcome: classify(theorem_check(&mut h, psi, g)),
        });
        checks.push(Check {
            name: format!("cutjoin(g={},|mu|<={})", g, cutjoin_size),
            g,
            keys: genus_keys(seeds, g, true, true),
            outcome: classify(cutjoin_check(&mut h, g, cutjoin_size)),
        });
        checks.push(Check {
            name: format!("lambda_g_merge({})", g),
            g,
            keys: alloc::vec![format!("c_g:{}", g)],
            outcome: classify(merge_check(&h, g)),
        });
        if g >= 2 {
            checks.push(Check {
                name: format!("lambda_g_lambda1_recursion({})", g),
                g,
                keys: genus_keys(seeds, g, true, true),
                outcome: classify(li_check(&mut h, psi, g)),
            });
        }
    }
    let keys = entries
        .into_iter()
        .map(|(k, _)| {
            let mut ran = false;
            let mut failed = false;
            for c in checks.iter().filter(|c| c.keys.contains(&k)) {
                match c.outcome {
                    Outcome::Pass => ran = true,
                    Outcome::Fail(_) => failed = true,
                    Outcome::Unavailable(_) => {}
                }
            }
            let s = if failed {
                KeyStatus::Flagged
            } else if ran {
                KeyStatus::Consistent
            } else {
                KeyStatus::Unchecked
            };
            (k, s)
        })
        .collect();
    Audit { checks, keys, constants_through: seeds.constants_through() }
}
