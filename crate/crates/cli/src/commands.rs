use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use k3lattice::chern;
use k3lattice::extorder;
use k3lattice::intlat::{self, Isometry, StandardLattice};
use k3lattice::linalg::{IntMatrix, Matrix};
use k3lattice::moduli;
use k3lattice::monodromy::{self, OrientedLattice};
use k3lattice::{Error, Result};

use crate::report::{Check, Report};
use crate::verify;

pub fn pn(n: u64) -> Result<Report> {
    let entries = moduli::enumerate_pn(n)?;
    let pairs: Vec<[i64; 2]> = entries.iter().map(|e| [e.r as i64, e.s]).collect();
    let text = pairs.iter().map(|[r, s]| format!("({r}, {s})")).collect::<Vec<_>>().join(" ");
    Ok(Report::new("pn", json!({ "n": n, "entries": pairs, "count": entries.len() }))
        .input("n", n)
        .summary(format!("P_{n}: {text}\ncount: {}", entries.len())))
}

pub fn count_nonbirational(n: u64) -> Result<Report> {
    let count = moduli::count_nonbirational(n)?;
    Ok(Report::new("count-nonbirational", json!({ "n": n, "count": count })).input("n", n).summary(count.to_string()))
}

pub fn windex(n: u64) -> Result<Report> {
    let index = monodromy::w_index(n)?;
    let group = monodromy::residual_orthogonal_group(n)?;
    let formula = monodromy::index_formula(n);
    let r = Report::new("windex", json!({ "n": n, "index": index, "residual_group_order": group.len() }))
        .input("n", n)
        .summary(index.to_string());
    Ok(if n >= 7 { r.check(Check::eq("index = 2^(ρ(n-1)-1)", formula, index)) } else { r })
}

/// Whitespace-separated integers with a leading `rows cols` header.
pub fn read_matrix(path: &Path) -> Result<IntMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what}")))
    };
    let (rows, cols) = (dim("row count")?, dim("column count")?);
    let entries: Vec<BigInt> = tokens
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
        .collect::<Result<_>>()?;
    if entries.len() != rows * cols {
        return Err(Error::Parse(format!("expected {} entries, found {}", rows * cols, entries.len())));
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| entries[i * cols + j].clone()))
}

fn isometry_input(lattice: &str, path: &Path) -> Result<(OrientedLattice, Isometry)> {
    let name: StandardLattice = lattice.parse()?;
    let ol = match name {
        StandardLattice::Hilb(n) => OrientedLattice::hilb(n)?,
        other => OrientedLattice::standard(Arc::new(intlat::make_standard(other)?))?,
    };
    let g = Isometry::new(Arc::clone(ol.lattice()), read_matrix(path)?)?;
    Ok((ol, g))
}

pub fn residual(lattice: &str, path: &Path) -> Result<Report> {
    let (ol, g) = isometry_input(lattice, path)?;
    let r = ol.residual_action(&g)?;
    Ok(Report::new(
        "residual",
        json!({
            "lattice": ol.lattice().label(),
            "multiplier": r.multiplier.to_string(),
            "centered": r.centered().to_string(),
            "modulus": r.modulus.to_string(),
        }),
    )
    .input("lattice", lattice)
    .input("matrix", path.display().to_string())
    .summary(format!("multiplication by {} mod {}", r.centered(), r.modulus)))
}

pub fn in_w(lattice: &str, path: &Path) -> Result<Report> {
    let (ol, g) = isometry_input(lattice, path)?;
    let w = monodromy::in_w(&ol, &g)?;
    Ok(Report::new(
        "in-w",
        json!({
            "lattice": ol.lattice().label(),
            "in_w": w.member,
            "orientation": w.orientation,
            "residual": w.residual.centered().to_string(),
            "modulus": w.residual.modulus.to_string(),
        }),
    )
    .input("lattice", lattice)
    .input("matrix", path.display().to_string())
    .summary(format!(
        "in W: {} (orientation {:+}, residual {} mod {})",
        w.member,
        w.orientation,
        w.residual.centered(),
        w.residual.modulus
    )))
}

pub fn example7() -> Result<Report> {
    let rep = moduli::example7_report()?;
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    for (case, want) in rep.cases.iter().zip([-5i64, -7]) {
        let d = case.degree;
        checks.push(Check::eq(format!("deg {d}: residual mod 12"), want.rem_euclid(12), case.residual.rem_euclid(12)));
        checks.push(Check::eq(format!("deg {d}: orientation"), 1, case.orientation));
        checks.push(Check::eq(format!("deg {d}: in W"), false, case.in_w));
        checks.push(Check::holds(format!("deg {d}: no Mukai extension"), case.ext_error.is_some()));
        lines.push(format!(
            "degree {d}: (w0,w0) = {}, f(δ) = {}h {} {}δ, residual {} mod {} (≡ {want}), in W: {}",
            case.w0_square,
            case.f_delta[0],
            if case.f_delta[1] < 0 { '-' } else { '+' },
            case.f_delta[1].abs(),
            case.residual,
            case.residual_modulus,
            case.in_w
        ));
    }
    let outputs = serde_json::to_value(&rep).expect("serializable report");
    Ok(Report::new("example7", outputs).checks(checks).summary(lines.join("\n")))
}

pub fn chern_cmd(i: u32) -> Result<Report> {
    let ch = chern::chern_to_character(i)?;
    let c = chern::character_to_chern(i)?;
    let twist = chern::verify_twist_formula(i)?;
    let mut outputs = json!({
        "i": i,
        "ch": ch[(i - 1) as usize].to_string(),
        "c": c[(i - 1) as usize].to_string(),
        "twist": { "holds": twist.holds, "lhs": twist.lhs.to_string(), "rhs": twist.rhs.to_string() },
    });
    let mut checks = vec![Check::holds(format!("twist formula, i = {i}"), twist.holds)];
    let mut summary = format!("ch{i} = {}\nc{i} = {}", outputs["ch"].as_str().unwrap_or(""), outputs["c"].as_str().unwrap_or(""));
    if i >= 2 {
        let s = chern::verify_sigma_linear(i)?;
        outputs["sigma"] = json!({ "holds": s.holds, "residual": s.residual.to_string() });
        checks.push(Check::holds(format!("σ linear, i = {i}"), s.holds));
        summary.push_str(&format!("\nσ{i}(x+y) - σ{i}(x) - σ{i}(y) = {}", s.residual));
    }
    Ok(Report::new("chern", outputs).input("i", i).checks(checks).summary(summary))
}

pub fn ext_order(n: Option<u64>, i: Option<u64>, d: Option<i64>, e: Option<i64>) -> Result<Report> {
    match (n, i, d, e) {
        (Some(n), Some(i), None, None) => {
            let order = extorder::master_order(n, i)?;
            let outputs = json!({ "n": n, "i": i, "order": order, "method": "formula", "stabilized": true });
            Ok(Report::new("ext-order", outputs).input("n", n).input("i", i).summary(order.to_string()))
        }
        (None, None, Some(d), Some(e)) => {
            let order = extorder::cyclic_ext_order(d, e)?;
            let mut r = Report::new("ext-order", json!({ "d": d, "e": e, "order": order, "method": "formula" }))
                .input("d", d)
                .input("e", e)
                .summary(order.to_string());
            if (d as i128 * e as i128).unsigned_abs() <= 1_000_000 {
                if let Some(k) = extorder::cyclic_ext_order_search(d, e) {
                    r = r.check(Check::eq("splitting search", order, k));
                }
            }
            Ok(r)
        }
        _ => Err(Error::Parse("ext-order takes either --n and --i, or --d and --e".into())),
    }
}

pub fn mukai_middle(n: u64, gens: usize, seed: u64) -> Result<Report> {
    let r = extorder::mukai_middle_ext_order(n, gens, seed)?;
    let order = r.order.clone().unwrap_or_else(|| "none".into());
    let outputs = json!({
        "n": n,
        "i": 1,
        "order": order,
        "method": "snf",
        "stabilized": r.stabilized,
        "generators": r.generators,
        "batches": r.batches,
        "rank": r.rank,
    });
    Ok(Report::new("mukai-middle", outputs)
        .input("n", n)
        .input("gens", gens)
        .input("seed", seed)
        .check(Check::eq("order = (v,v)", (2 * n - 2).to_string(), order.clone()))
        .summary(format!("{order} (rank {}, {} generators)", r.rank, r.generators)))
}

pub fn verify_n(n: u64) -> Result<Report> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    let checks = verify::for_n(n);
    let outputs = json!({ "n": n, "passed": checks.iter().filter(|c| c.pass).count(), "total": checks.len() });
    Ok(Report::new("verify", outputs).input("n", n).checks(checks).summary(format!("Hilb({n})")))
}

pub fn verify_all(seed: u64) -> Report {
    let groups = verify::all(seed);
    let mut outputs = serde_json::Map::new();
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    for (name, cs) in groups {
        let ok = cs.iter().all(|c| c.pass);
        lines.push(format!("{}: {} ({} checks)", name, if ok { "ok" } else { "FAILED" }, cs.len()));
        outputs.insert(name.to_string(), Value::Bool(ok));
        checks.extend(cs.into_iter().filter(|c| !c.pass));
    }
    Report::new("verify-all", Value::Object(outputs)).input("seed", seed).checks(checks).summary(lines.join("\n"))
}
