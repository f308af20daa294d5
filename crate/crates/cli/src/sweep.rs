use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use maxaut_core::autos::{automorphism_count, AutError, CountOptions};
use maxaut_core::dessin::combinatorial_map;
use maxaut_core::params::{
    build_presentation, closed_form_order_exponent, validate_params, Family, GroupParams,
};
use maxaut_core::structure::{invariant_types, AbelianType};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

pub struct SweepSpec {
    pub primes: Vec<u64>,
    pub max_n: u32,
    pub families: Vec<Family>,
    pub count: CountOptions,
    pub format: Format,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub p: u64,
    pub a: u32,
    pub b: Option<u32>,
    pub c: Option<u32>,
    pub order: String,
    pub aut_count: Option<String>,
    pub hall_bound: Option<String>,
    pub max_aut: Option<bool>,
    pub g3_type: Option<AbelianType>,
    pub gprime_type: Option<AbelianType>,
    pub ab_type: Option<AbelianType>,
    #[serde(rename = "type")]
    pub type_: Option<[u64; 3]>,
    pub genus: Option<u64>,
    pub status: &'static str,
}

const CSV_HEADER: [&str; 15] = [
    "family",
    "p",
    "a",
    "b",
    "c",
    "order",
    "aut_count",
    "hall_bound",
    "max_aut",
    "g3_type",
    "gprime_type",
    "ab_type",
    "type",
    "genus",
    "status",
];

/// Strict-valid tuples with `|G| ≤ p^max_n`, ordered by family, then
/// `p`, `a`, `b`, `c`.
pub fn tuples(spec: &SweepSpec) -> Vec<GroupParams> {
    let mut primes = spec.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    let mut families = spec.families.clone();
    families.sort();
    families.dedup();
    let range = |used: bool| -> Vec<Option<u32>> {
        if used {
            (1..=spec.max_n).map(Some).collect()
        } else {
            vec![None]
        }
    };
    let mut out = Vec::new();
    for &family in &families {
        for &p in &primes {
            for a in 1..=spec.max_n {
                for &b in &range(family.uses_b()) {
                    for &c in &range(family.uses_c()) {
                        let Ok(params) = validate_params(family, p, a, b, c, true) else {
                            continue;
                        };
                        if closed_form_order_exponent(&params) <= spec.max_n {
                            out.push(params);
                        }
                    }
                }
            }
        }
    }
    out
}

fn row(params: &GroupParams, count: CountOptions) -> Result<SweepRow> {
    let pres = build_presentation(params);
    let mut row = SweepRow {
        family: params.family,
        p: params.p,
        a: params.a,
        b: params.b,
        c: params.c,
        order: pres.order().to_string(),
        aut_count: None,
        hall_bound: None,
        max_aut: None,
        g3_type: None,
        gprime_type: None,
        ab_type: None,
        type_: None,
        genus: None,
        status: "budget",
    };
    let aut = match automorphism_count(&pres, count) {
        Ok(aut) => aut,
        Err(AutError::ResourceBudgetExceeded { .. }) => return Ok(row),
        Err(e) => return Err(e.into()),
    };
    let [g3, gprime, ab] = invariant_types(&pres);
    let (_, dessin) = combinatorial_map(&pres, count.budget)?;
    row.aut_count = Some(aut.aut_count.to_string());
    row.hall_bound = Some(aut.hall_bound.to_string());
    row.max_aut = Some(aut.max_aut);
    row.g3_type = Some(g3);
    row.gprime_type = Some(gprime);
    row.ab_type = Some(ab);
    row.type_ = Some(dessin.type_);
    row.genus = Some(dessin.genus);
    row.status = "ok";
    Ok(row)
}

fn csv_record(row: &SweepRow) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let num = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        row.family.to_string(),
        row.p.to_string(),
        row.a.to_string(),
        num(row.b),
        num(row.c),
        row.order.clone(),
        opt(row.aut_count.clone()),
        opt(row.hall_bound.clone()),
        opt(row.max_aut.map(|b| b.to_string())),
        opt(row.g3_type.as_ref().map(ToString::to_string)),
        opt(row.gprime_type.as_ref().map(ToString::to_string)),
        opt(row.ab_type.as_ref().map(ToString::to_string)),
        opt(row.type_.map(|[l, m, n]| format!("({l},{m},{n})"))),
        opt(row.genus.map(|g| g.to_string())),
        row.status.to_string(),
    ]
}

/// Streams one row per tuple; rows are written as they are computed.
pub fn sweep(spec: &SweepSpec, out: &mut dyn Write) -> Result<()> {
    let params = tuples(spec);
    match spec.format {
        Format::Jsonl => {
            for p in &params {
                let r = row(p, spec.count)?;
                writeln!(out, "{}", serde_json::to_string(&r)?)?;
            }
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(CSV_HEADER)?;
            for p in &params {
                writer.write_record(csv_record(&row(p, spec.count)?))?;
                writer.flush()?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}
