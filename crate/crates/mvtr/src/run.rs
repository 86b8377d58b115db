use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::{json, Value};

use mvtr_core::audit::{audit, Outcome};
use mvtr_core::cutjoin::{
    corollary_slice_with, cutjoin_partition_residual_with, verify_theorem11, Correlators, MvCache, Slice,
};
use mvtr_core::hodge::{HodgeTable, Partition};
use mvtr_core::psi::PsiTable;
use mvtr_core::Ring;
use mvtr_core::spectral::{curve_series, hodge_wform, unstable_series_checks, verify_bm, Recursion, WForm};

use crate::report::Report;
use crate::seedfile::{self, SeedFile};
use crate::{Bm, Cells, Class, Cli, Command, Curve, Format, Hodge, Seed, Verify};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// `3`, `1-3` or `1,2,4`.
fn parse_list(s: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let bad = || format!("cannot read `{}` as a number or range", part);
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn cells(c: &Cells) -> Result<Vec<(u32, usize)>, String> {
    let gs = parse_list(&c.g)?;
    let ls = parse_list(&c.l)?;
    let mut out = Vec::new();
    for &g in &gs {
        for &l in &ls {
            if l == 0 || 2 * g as i64 - 2 + l as i64 <= 0 {
                return Err(format!("(g,l)=({},{}) is not a stable signature", g, l));
            }
            out.push((g, l as usize));
        }
    }
    Ok(out)
}

fn timed(mut f: impl FnMut() -> Report) -> Report {
    let start = Instant::now();
    let mut r = f();
    r.wall_time = start.elapsed();
    r
}

pub fn run(cli: &Cli) -> Result<u8, String> {
    let timing = !cli.no_timing;
    match &cli.command {
        Command::Seed(Seed::Check { path, cutjoin_size }) => {
            let sf = seedfile::load(path.as_deref().or(cli.seeds.as_deref())).map_err(|e| e.to_string())?;
            let psi = PsiTable::new(cli.cap);
            let r = timed(|| seed_check(&sf, &psi, *cutjoin_size));
            emit_reports(cli.format, &[r], timing)
        }
        Command::Verify(v) => {
            let sf = seedfile::load(cli.seeds.as_deref()).map_err(|e| e.to_string())?;
            let psi = PsiTable::new(cli.cap);
            let reports = match v {
                Verify::Theorem11 { cells: c } => {
                    cells(c)?.par_iter().map(|&(g, l)| timed(|| theorem(&sf, &psi, g, l))).collect()
                }
                Verify::Corollary { which, cells: c } => {
                    let w = match which.as_str() {
                        "12" => Slice::Cor12,
                        "12b" => Slice::Cor12b,
                        "13" => Slice::Cor13,
                        _ => Slice::Cor14,
                    };
                    cells(c)?.par_iter().map(|&(g, l)| timed(|| corollary(&sf, &psi, w, which, g, l))).collect()
                }
                Verify::Cutjoin { g, mu, max_size } => {
                    let parts: Vec<Partition> = match (mu, max_size) {
                        (Some(m), _) => {
                            let p = parse_list(m)?;
                            vec![Partition::new(p).ok_or_else(|| format!("`{}` is not a partition", m))?]
                        }
                        (None, Some(n)) => (1..=*n).flat_map(Partition::all_of).collect(),
                        (None, None) => return Err("give --mu or --max-size".into()),
                    };
                    let gs = parse_list(g)?;
                    let per: Vec<Vec<Report>> = gs.par_iter().map(|&g| cutjoin(&sf, g, &parts)).collect();
                    per.into_iter().flatten().collect()
                }
                Verify::Lemmas { order, max_a } => vec![timed(|| lemmas(&psi, *order, *max_a))],
            };
            emit_reports(cli.format, &reports, timing)
        }
        Command::Bm(Bm::Verify { cells: c, order }) => {
            let sf = seedfile::load(cli.seeds.as_deref()).map_err(|e| e.to_string())?;
            let psi = PsiTable::new(cli.cap);
            let cs = cells(c)?;
            let mut h = HodgeTable::new(sf.seeds.clone());
            let mut corr = Correlators::new(&mut h);
            let mut rec = Recursion::new(&psi, *order).map_err(|e| e.to_string())?;
            let reports: Vec<Report> = cs
                .iter()
                .map(|&(g, l)| {
                    timed(|| {
                        let mut r = Report::new(format!("bm({},{})", g, l), json!({"g": g, "l": l, "order": order}));
                        r.seed_provenance = sf.provenance_through(g);
                        match verify_bm(&mut corr, &mut rec, g, l) {
                            Ok(b) => {
                                r = r.residual(&b.residual);
                                r.pass = b.pass;
                                r.detail = Some(json!({"hodge_step_residual_count": b.hodge_residual.len()}));
                            }
                            Err(e) => r.error = Some(e.to_string()),
                        }
                        r
                    })
                })
                .collect();
            emit_reports(cli.format, &reports, timing)
        }
        Command::Bm(Bm::Wform { g, l, order, hodge }) => {
            let sf = seedfile::load(cli.seeds.as_deref()).map_err(|e| e.to_string())?;
            let psi = PsiTable::new(cli.cap);
            let w = if *hodge {
                let mut h = HodgeTable::new(sf.seeds.clone());
                hodge_wform(&mut Correlators::new(&mut h), *g, *l)
            } else {
                Recursion::new(&psi, *order).and_then(|mut rec| rec.form(*g, *l))
            }
            .map_err(|e| e.to_string())?;
            print_wform(cli.format, &w);
            Ok(0)
        }
        Command::Hodge(Hodge::Eval { g, b, class }) => {
            let sf = seedfile::load(cli.seeds.as_deref()).map_err(|e| e.to_string())?;
            let b = parse_list(b)?;
            let mut h = HodgeTable::new(sf.seeds.clone());
            let value = match class {
                Class::Psi => Ok(h.psi_intersection(*g, &b).to_string()),
                Class::LambdaG => h.lambda_g_value(*g, &b).map(|x| x.to_string()),
                Class::LambdaGm1 => h.lambda_gm1_value(*g, &b).map(|x| x.to_string()),
                Class::LambdaGLambda1 => h.lambda_g_lambda1_value(*g, &b).map(|x| x.to_string()),
                Class::Gamma => h.gamma_correlator(*g, &b).map(|p| p.display("tau").to_string()),
            }
            .map_err(|e| e.to_string())?;
            let class_name = class.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            match cli.format {
                Format::Text => println!("{}", value),
                _ => println!("{}", json!({"g": g, "b": b, "class": class_name, "value": value})),
            }
            Ok(0)
        }
        Command::PsiTable { max_b } => {
            let psi = PsiTable::new((*max_b).max(1));
            print_psi_table(cli.format, &psi, *max_b).map_err(|e| e.to_string())?;
            Ok(0)
        }
        Command::Curve(Curve::Series { order }) => {
            let cs = curve_series(*order).map_err(|e| e.to_string())?;
            let y: Vec<String> = (0..*order as i64).map(|k| cs.y.coeff(k).to_string()).collect();
            let t: Vec<String> = (0..*order as i64).map(|k| cs.t.coeff(k).to_string()).collect();
            match cli.format {
                Format::Json => println!("{}", json!({"order": order, "y": y, "t": t})),
                Format::Csv => {
                    println!("k,y,t");
                    for k in 0..*order {
                        println!("{},\"{}\",\"{}\"", k, y[k], t[k]);
                    }
                }
                Format::Text => {
                    for k in 0..*order {
                        println!("x^{}: y = {}  t = {}", k, y[k], t[k]);
                    }
                }
            }
            Ok(0)
        }
    }
}

fn emit_reports(format: Format, reports: &[Report], timing: bool) -> Result<u8, String> {
    match format {
        Format::Csv => return Err("reports are JSON or text; csv is for coefficient tables".into()),
        Format::Json => {
            for r in reports {
                println!("{}", r.to_json(timing));
            }
        }
        Format::Text => {
            for r in reports {
                println!("{}", r.to_text(timing));
            }
        }
    }
    if let Some(r) = reports.iter().find(|r| r.error.is_some()) {
        eprintln!("mvtr: {}: {}", r.identity, r.error.as_deref().unwrap_or(""));
        return Ok(EXIT_ERROR);
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { EXIT_FAIL })
}

fn theorem(sf: &SeedFile, psi: &PsiTable, g: u32, l: usize) -> Report {
    let mut r = Report::new(format!("theorem11({},{})", g, l), json!({"g": g, "l": l}));
    r.seed_provenance = sf.provenance_through(g);
    let mut h = HodgeTable::new(sf.seeds.clone());
    match verify_theorem11(&mut h, psi, g, l) {
        Ok(x) => {
            r = r.residual(&x.residual);
            r.pass = x.pass;
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

fn corollary(sf: &SeedFile, psi: &PsiTable, w: Slice, name: &str, g: u32, l: usize) -> Report {
    let mut r = Report::new(format!("corollary{}({},{})", name, g, l), json!({"which": name, "g": g, "l": l}));
    r.seed_provenance = sf.provenance_through(g);
    let mut h = HodgeTable::new(sf.seeds.clone());
    match corollary_slice_with(&mut Correlators::new(&mut h), psi, w, g, l) {
        Ok(s) => {
            r = r.residual(&s.residual());
            r.pass = s.pass();
            r.detail = Some(json!({
                "lhs_is_slice": s.lhs == s.theorem_lhs,
                "rhs_is_slice": s.rhs == s.theorem_rhs,
            }));
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

fn cutjoin(sf: &SeedFile, g: u32, parts: &[Partition]) -> Vec<Report> {
    let mut h = HodgeTable::new(sf.seeds.clone());
    let mut cache = MvCache::new(&mut h);
    parts
        .iter()
        .map(|mu| {
            timed(|| {
                let mut r = Report::new(format!("cutjoin(g={},mu={})", g, mu), json!({"g": g, "mu": mu.parts()}));
                r.seed_provenance = sf.provenance_through(g);
                match cutjoin_partition_residual_with(&mut cache, g, mu) {
                    Ok(x) => {
                        r.pass = x.is_zero();
                        for (name, v) in [("re", &x.re), ("im", &x.im)] {
                            if !v.is_zero() {
                                r.residual_count += 1;
                                r.residual_terms.push(format!("{}: {}", name, v));
                            }
                        }
                    }
                    Err(e) => r.error = Some(e.to_string()),
                }
                r
            })
        })
        .collect()
}

fn lemmas(psi: &PsiTable, order: u32, max_a: usize) -> Report {
    let mut r = Report::new("lemmas_unstable_series", json!({"order": order, "max_a": max_a}));
    match unstable_series_checks(psi, order, max_a) {
        Ok(x) => {
            r.pass = x.pass;
            r.residual_count = x.pair_log_terms + x.merged_terms.iter().map(|m| m.1).sum::<usize>();
            let merged: Vec<Value> = x.merged_terms.iter().map(|&(a, n)| json!({"a": a, "terms": n})).collect();
            r.detail = Some(json!({"pair_log_terms": x.pair_log_terms, "merged_terms": merged}));
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

fn seed_check(sf: &SeedFile, psi: &PsiTable, cutjoin_size: u32) -> Report {
    let a = audit(&sf.seeds, psi, cutjoin_size);
    let mut r = Report::new("seed_check", json!({"seed_file": sf.label(), "cutjoin_size": cutjoin_size}));
    r.pass = a.pass();
    r.seed_provenance = sf.provenance.clone();
    let checks: Vec<Value> = a
        .checks
        .iter()
        .map(|c| {
            let (status, message) = match &c.outcome {
                Outcome::Pass => ("pass", String::new()),
                Outcome::Fail(m) => ("fail", m.clone()),
                Outcome::Unavailable(m) => ("unavailable", m.clone()),
            };
            json!({"name": c.name, "g": c.g, "keys": c.keys, "status": status, "message": message})
        })
        .collect();
    let keys: serde_json::Map<String, Value> = a.keys.iter().map(|(k, s)| (k.clone(), json!(s.as_str()))).collect();
    for c in &a.checks {
        if let Outcome::Fail(m) = &c.outcome {
            r.residual_count += 1;
            if r.residual_terms.len() < crate::report::RESIDUAL_SHOWN {
                r.residual_terms.push(format!("{}: {}", c.name, m));
            }
        }
    }
    let lambda_genera: Vec<u32> = {
        let mut v: Vec<u32> = sf.seeds.lambda_gm1.keys().map(|(g, _)| *g).collect();
        v.dedup();
        v
    };
    let capability = if a.constants_through == 0 {
        "no seed constants: genus 0 only".to_string()
    } else {
        format!("constants through genus {}; lambda_(g-1) seeds at genus {:?}", a.constants_through, lambda_genera)
    };
    r.detail = Some(json!({"checks": checks, "keys": keys, "capability": capability}));
    r
}

fn print_wform(format: Format, w: &WForm) {
    match format {
        Format::Json => {
            let rows: Vec<Value> = w.coeffs.iter().map(|(b, c)| json!({"b": b, "coeff": c.to_string()})).collect();
            println!("{}", json!({"g": w.g, "l": w.l, "coeffs": rows}));
        }
        Format::Csv => {
            let head: Vec<String> = (1..=w.l).map(|i| format!("b{}", i)).collect();
            println!("{},coeff", head.join(","));
            for (b, c) in &w.coeffs {
                let idx: Vec<String> = b.iter().map(u32::to_string).collect();
                println!("{},\"{}\"", idx.join(","), c);
            }
        }
        Format::Text => {
            for (b, c) in &w.coeffs {
                println!("{:?}: {}", b, c);
            }
        }
    }
}

fn print_psi_table(format: Format, psi: &PsiTable, max_b: usize) -> Result<(), mvtr_core::psi::PsiError> {
    let mut rows = Vec::new();
    for b in 0..=max_b {
        for k in 0..=b {
            let p = psi.psi_level(b, k)?;
            rows.push((b, k, p.coeffs().to_vec()));
        }
    }
    match format {
        Format::Csv => {
            println!("b,k,i,f");
            for (b, k, c) in &rows {
                for (i, x) in c.iter().enumerate() {
                    println!("{},{},{},{}", b, k, i, x);
                }
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(b, k, c)| {
                    let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                    json!({"b": b, "k": k, "f": c})
                })
                .collect();
            println!("{}", json!({"max_b": max_b, "levels": v}));
        }
        Format::Text => {
            for (b, k, c) in &rows {
                let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                println!("Psi_{}^{}: [{}]", b, k, c.join(", "));
            }
        }
    }
    Ok(())
}
