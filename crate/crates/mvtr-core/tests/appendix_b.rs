mod common;

use common::ledger::{transcribed, Ledger};

use mvtr_core::cutjoin::{lambda_g_lambda1_constant, Correlators};
use mvtr_core::hodge::{compositions_of, compositions_up_to, HodgeTable};
use mvtr_core::psi::PsiTable;
use mvtr_core::q::{qf, qi};
use mvtr_core::{MPoly, Ring, Q};


fn lvl(psi: &PsiTable, b: u32, k: usize, l: usize, i: usize) -> MPoly<Q> {
    if k > b as usize {
        return MPoly::zero(l);
    }
    MPoly::from_upoly(l, i, psi.psi_level(b as usize, k).unwrap())
}

fn prod0(psi: &PsiTable, b: &[u32], at: &[usize], l: usize) -> MPoly<Q> {
    let mut p = MPoly::one(l);
    for (&x, &i) in b.iter().zip(at) {
        p = p.mul(&lvl(psi, x, 0, l, i));
    }
    p
}

/// `(t_j u(t_i) − t_i u(t_j))/(t_i − t_j)` and `(u(t_j) − u(t_i))/(t_i − t_j)`
fn joins(u: &MPoly<Q>, i: usize, j: usize, l: usize) -> (MPoly<Q>, MPoly<Q>) {
    let mut sw: Vec<usize> = (0..l).collect();
    sw.swap(i, j);
    let uj = u.permute(&sw);
    let ti = MPoly::var(l, i);
    let tj = MPoly::var(l, j);
    let a = tj.mul(u).sub(&ti.mul(&uj)).div_diff(i, j).unwrap();
    let b = uj.sub(u).div_diff(i, j).unwrap();
    (a, b)
}

fn pieces(h: &mut HodgeTable, psi: &PsiTable, g: u32, l: usize) -> Vec<(&'static str, MPoly<Q>)> {
    let top = 3 * g + l as u32 - 3;
    let lq = qi(l as i64);
    let all: Vec<usize> = (0..l).collect();
    let names = [
        "L1", "L2", "L3", "L4", "L5", "R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11", "R12", "R16",
    ];
    let mut p: Vec<MPoly<Q>> = vec![MPoly::zero(l); names.len()];
    for b in compositions_up_to(l, top) {
        let v = h.lambda_g_value(g, &b).unwrap();
        let w = h.lambda_gm1_value(g, &b).unwrap();
        let size = b.iter().sum::<u32>() as i64;
        let base = prod0(psi, &b, &all, l);
        if !v.is_zero() {
            p[0].add_assign(&base.scale_q(&(&v * &lq * qi(g as i64 - size - 1))));
            for j in 0..l {
                let rest: Vec<usize> = all.iter().copied().filter(|&k| k != j).collect();
                let rb: Vec<u32> = rest.iter().map(|&k| b[k]).collect();
                let r0 = prod0(psi, &rb, &rest, l);
                p[1].add_assign(&lvl(psi, b[j], 1, l, j).mul(&r0).scale_q(&(&v * &lq)));
                let d = lvl(psi, b[j], 0, l, j).derivative(j).mul(&r0);
                let tj = MPoly::var(l, j);
                p[2].add_assign(&d.mul(&tj).mul(&tj).scale_q(&v));
                p[3].sub_assign(&d.mul(&tj).scale_q(&v));
            }
        }
        if !w.is_zero() {
            p[4].sub_assign(&base.scale_q(&(&w * &lq)));
        }
    }
    for i in 0..l {
        for j in i + 1..l {
            let rest: Vec<usize> = all.iter().copied().filter(|&k| k != i && k != j).collect();
            let ti = MPoly::var(l, i);
            for ab in compositions_up_to(l - 1, top - 1) {
                let v = h.lambda_g_value(g, &ab).unwrap();
                let w = h.lambda_gm1_value(g, &ab).unwrap();
                let a = ab[0] + 1;
                let br = &ab[1..];
                let r0 = prod0(psi, br, &rest, l);
                let s = qi(br.iter().sum::<u32>() as i64 + a as i64 + 2);
                let t0 = ti.mul(&lvl(psi, a, 0, l, i));
                let (a0, b0) = joins(&t0, i, j, l);
                let (a1, b1) = joins(&ti.mul(&lvl(psi, a, 1, l, i)), i, j, l);
                let (a2, b2) = joins(&ti.mul(&t0), i, j, l);
                if !v.is_zero() {
                    p[5].add_assign(&a1.mul(&r0).scale_q(&v));
                    p[6].add_assign(&b1.mul(&r0).scale_q(&v));
                    p[7].add_assign(&a2.mul(&r0).scale_q(&v));
                    p[8].add_assign(&b2.mul(&r0).scale_q(&v));
                    p[9].sub_assign(&a0.mul(&r0).scale_q(&(&v * &s)));
                    p[10].sub_assign(&b0.mul(&r0).scale_q(&(&v * &s)));
                    let mut x = MPoly::zero(l);
                    for (k, &r) in rest.iter().enumerate() {
                        let others: Vec<usize> = rest.iter().copied().filter(|&y| y != r).collect();
                        let ob: Vec<u32> = (0..br.len()).filter(|&y| y != k).map(|y| br[y]).collect();
                        x.add_assign(&lvl(psi, br[k], 1, l, r).mul(&prod0(psi, &ob, &others, l)));
                    }
                    p[11].add_assign(&a0.mul(&x).scale_q(&v));
                    p[12].add_assign(&b0.mul(&x).scale_q(&v));
                    p[15].add_assign(&a0.mul(&r0).scale_q(&(&v * qi(g as i64))));
                    p[16].add_assign(&b0.mul(&r0).scale_q(&(&v * qi(g as i64))));
                }
                if !w.is_zero() {
                    p[13].sub_assign(&a0.mul(&r0).scale_q(&w));
                    p[14].sub_assign(&b0.mul(&r0).scale_q(&w));
                }
            }
        }
    }
    for i in 0..l {
        let rest: Vec<usize> = all.iter().copied().filter(|&k| k != i).collect();
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << rest.len()) {
                let ii: Vec<usize> = (0..rest.len()).filter(|k| mask >> k & 1 == 1).map(|k| rest[k]).collect();
                let jj: Vec<usize> = (0..rest.len()).filter(|k| mask >> k & 1 == 0).map(|k| rest[k]).collect();
                if 2 * g1 as i64 - 1 + ii.len() as i64 <= 0 || 2 * g2 as i64 - 1 + jj.len() as i64 <= 0 {
                    continue;
                }
                for ai in compositions_up_to(ii.len() + 1, 3 * g1 + ii.len() as u32 - 2) {
                    let v1 = lam_any(h, g1, &ai);
                    if v1.is_zero() {
                        continue;
                    }
                    for aj in compositions_up_to(jj.len() + 1, 3 * g2 + jj.len() as u32 - 2) {
                        let v2 = lam_any(h, g2, &aj);
                        if v2.is_zero() {
                            continue;
                        }
                        let t = lvl(psi, ai[0] + 1, 0, l, i)
                            .mul(&lvl(psi, aj[0] + 1, 0, l, i))
                            .mul(&prod0(psi, &ai[1..], &ii, l))
                            .mul(&prod0(psi, &aj[1..], &jj, l));
                        p[17].add_assign(&t.scale_q(&(&v1 * &v2 * qf(1, 2))));
                    }
                }
            }
        }
    }
    names.into_iter().zip(p).collect()
}

fn lam_any(h: &mut HodgeTable, g: u32, b: &[u32]) -> Q {
    if g == 0 {
        h.psi_intersection(0, b)
    } else {
        h.lambda_g_value(g, b).unwrap()
    }
}

fn piece_coefficients(h: &mut HodgeTable, psi: &PsiTable, g: u32, b: &[u32]) -> Vec<(&'static str, Q)> {
    let e: Vec<u32> = b.iter().map(|&x| x + 1).collect();
    let ps = pieces(h, psi, g, b.len());
    let get = |n: &str| ps.iter().find(|x| x.0 == n).unwrap().1.coeff(&e);
    let mut out: Vec<(&str, Q)> = ["L1", "L2", "L3", "L4", "L5", "R1", "R2", "R3"].iter().map(|&n| (n, get(n))).collect();
    out.push(("R4+R5", get("R4") + get("R5")));
    for n in ["R6", "R7", "R8", "R9", "R10", "R11", "R12", "R16"] {
        out.push((n, get(n)));
    }
    out
}

fn transcribed_terms(h: &mut HodgeTable, psi: &PsiTable, g: u32, b: &[u32]) -> Vec<(&'static str, Q)> {
    let mut led = Ledger { h, psi, g, b: b.iter().map(|&x| x as i64).collect() };
    vec![
        ("L1", led.eq120()),
        ("L2", led.eq121()),
        ("L3", led.eq122()),
        ("L4", led.eq123()),
        ("L5", led.eq124()),
        ("R1", led.eq126()),
        ("R2", led.eq127()),
        ("R3", led.eq128()),
        ("R4+R5", led.eq129()),
        ("R6", led.eq130()),
        ("R7", led.eq131()),
        ("R8", led.eq132()),
        ("R9", led.eq133()),
        ("R10", led.eq134()),
        ("R11", led.eq135()),
        ("R12", led.eq136()),
        ("R16", led.eq138()),
    ]
}

#[test]
fn coefficient_formulas_match_their_pieces() {
    let psi = PsiTable::default();
    let mut h = common::table();
    for l in 1..=4usize {
        for b in compositions_of(l, l as u32) {
            let mine = piece_coefficients(&mut h, &psi, 2, &b);
            let theirs = transcribed_terms(&mut h, &psi, 2, &b);
            for ((n, x), (_, y)) in mine.iter().zip(&theirs) {
                assert_eq!(x, y, "{} at b={:?}", n, b);
            }
        }
    }
}

#[test]
fn first_pair_constant() {
    let psi = PsiTable::default();
    let mut h = common::table();
    let t = transcribed(&mut h, &psi, 2, &[0, 2]);
    let c = lambda_g_lambda1_constant(&mut Correlators::new(&mut h), &psi, 2, &[0, 2]).unwrap();
    assert_eq!(t, qf(1, 5760));
    assert_eq!(c, t);
}

#[test]
fn transcription_agrees_with_assembly() {
    let psi = PsiTable::default();
    let mut h = common::table();
    for l in 1..=4usize {
        for b in compositions_of(l, l as u32) {
            let t = transcribed(&mut h, &psi, 2, &b);
            let c = lambda_g_lambda1_constant(&mut Correlators::new(&mut h), &psi, 2, &b).unwrap();
            assert_eq!(t, c, "b={:?}", b);
        }
    }
}
