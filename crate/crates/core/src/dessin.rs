//! Regular dessins of two-generated groups: type, genus, and the explicit
//! combinatorial map with edges identified with group elements.
//!
//! Rotation convention: `σ_b(g) = g·x`, `σ_w(g) = g·y`, `φ(g) = g·(xy)⁻¹`.
//! Vertices and faces are counted as permutation cycles; the genus then
//! follows from `V − E + F = 2 − 2g` and is checked against the Euler
//! formula `1 + (N − N/l − N/m − N/n)/2`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::params::{closed_form_order_exponent, Family, GroupParams, PcPresentation};
use crate::pcgroup::Gen;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DessinError {
    #[error("type {type_:?} is not regular data for a group of order {order}")]
    NotRegularData { order: u64, type_: [u64; 3] },
    #[error("group of order {order} exceeds the enumeration budget of {budget}")]
    ResourceBudgetExceeded { order: String, budget: usize },
    #[error("map genus {map} disagrees with the Euler formula value {formula}")]
    GenusMismatch { map: i64, formula: u64 },
    #[error("{0} is not a class-three family")]
    NotClassThree(Family),
    #[error("unknown map format {0:?} (expected json or dot)")]
    UnknownFormat(String),
}

/// Orders of `x`, `y` and `xy`.
pub type DessinType = [u64; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DessinReport {
    pub order: u64,
    #[serde(rename = "type")]
    pub type_: DessinType,
    pub genus: u64,
    pub black: u64,
    pub white: u64,
    pub edges: u64,
    pub faces: u64,
}

/// Rotation permutations on edge indices (the lexicographic element order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinatorialMap {
    pub n: usize,
    pub sigma_b: Vec<u32>,
    pub sigma_w: Vec<u32>,
    pub phi: Vec<u32>,
}

pub fn dessin_type(pres: &PcPresentation) -> DessinType {
    let x = pres.generator(Gen::X);
    let y = pres.generator(Gen::Y);
    [
        pres.element_order(&x),
        pres.element_order(&y),
        pres.element_order(&pres.multiply(&x, &y)),
    ]
}

pub fn euler_genus(order: u64, type_: DessinType) -> Result<u64, DessinError> {
    let bad = || DessinError::NotRegularData { order, type_ };
    if type_.iter().any(|&t| t == 0 || !order.is_multiple_of(t)) {
        return Err(bad());
    }
    let [l, m, n] = type_.map(|t| order / t);
    let twice = order as i128 + 2 - (l + m + n) as i128;
    if twice < 0 || twice % 2 != 0 {
        return Err(bad());
    }
    Ok((twice / 2) as u64)
}

/// Number of cycles of `perm`, or `None` if some cycle length differs from
/// `expected`.
fn uniform_cycles(perm: &[u32], expected: u64) -> Option<u64> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur] as usize;
            len += 1;
        }
        if len != expected {
            return None;
        }
        cycles += 1;
    }
    Some(cycles)
}

impl CombinatorialMap {
    /// Cycle label of every edge under `perm`, numbered by first appearance.
    fn vertex_labels(perm: &[u32]) -> Vec<u32> {
        let mut label = vec![u32::MAX; perm.len()];
        let mut next = 0;
        for start in 0..perm.len() {
            if label[start] != u32::MAX {
                continue;
            }
            let mut cur = start;
            while label[cur] == u32::MAX {
                label[cur] = next;
                cur = perm[cur] as usize;
            }
            next += 1;
        }
        label
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serializes")
    }

    /// The underlying bipartite graph; one `--` line per edge, in edge order.
    pub fn to_dot(&self) -> String {
        let black = Self::vertex_labels(&self.sigma_b);
        let white = Self::vertex_labels(&self.sigma_w);
        let count = |labels: &[u32]| labels.iter().max().map_or(0, |&m| m + 1);
        let mut out = String::from("graph dessin {\n");
        for b in 0..count(&black) {
            writeln!(out, "  b{b} [style=filled, fillcolor=black];").unwrap();
        }
        for w in 0..count(&white) {
            writeln!(out, "  w{w} [style=filled, fillcolor=white];").unwrap();
        }
        for (b, w) in black.iter().zip(&white) {
            writeln!(out, "  b{b} -- w{w};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the map over the element enumeration, counts cycles and checks
/// the resulting genus against [`euler_genus`].
pub fn combinatorial_map(
    pres: &PcPresentation,
    budget: usize,
) -> Result<(CombinatorialMap, DessinReport), DessinError> {
    let n = match pres.order_usize() {
        Some(n) if n <= budget => n,
        _ => {
            return Err(DessinError::ResourceBudgetExceeded {
                order: pres.order().to_string(),
                budget,
            })
        }
    };
    let x = pres.generator(Gen::X);
    let y = pres.generator(Gen::Y);
    let face_step = pres.inverse(&pres.multiply(&x, &y));
    let mut map = CombinatorialMap {
        n,
        sigma_b: Vec::with_capacity(n),
        sigma_w: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
    };
    for g in pres.elements() {
        map.sigma_b
            .push(pres.index_of(&pres.multiply(&g, &x)) as u32);
        map.sigma_w
            .push(pres.index_of(&pres.multiply(&g, &y)) as u32);
        map.phi
            .push(pres.index_of(&pres.multiply(&g, &face_step)) as u32);
    }

    let order = n as u64;
    let type_ = dessin_type(pres);
    let irregular = || DessinError::NotRegularData { order, type_ };
    let black = uniform_cycles(&map.sigma_b, type_[0]).ok_or_else(irregular)?;
    let white = uniform_cycles(&map.sigma_w, type_[1]).ok_or_else(irregular)?;
    let faces = uniform_cycles(&map.phi, type_[2]).ok_or_else(irregular)?;

    let chi = (black + white + faces) as i64 - order as i64;
    let formula = euler_genus(order, type_)?;
    if (2 - chi) % 2 != 0 || (2 - chi) / 2 != formula as i64 {
        return Err(DessinError::GenusMismatch {
            map: (2 - chi) / 2,
            formula,
        });
    }
    let report = DessinReport {
        order,
        type_,
        genus: formula,
        black,
        white,
        edges: order,
        faces,
    };
    Ok((map, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Json,
    Dot,
}

impl FromStr for MapFormat {
    type Err = DessinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(MapFormat::Json),
            "dot" => Ok(MapFormat::Dot),
            _ => Err(DessinError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn export_map(map: &CombinatorialMap, format: &str) -> Result<String, DessinError> {
    Ok(match format.parse::<MapFormat>()? {
        MapFormat::Json => map.to_json(),
        MapFormat::Dot => map.to_dot(),
    })
}

/// Closed-form `(order, type, genus)` for a class-three family.
pub fn table3_row(params: &GroupParams) -> Result<(u64, DessinType, u64), DessinError> {
    let family = params.family;
    if family.class() != 3 {
        return Err(DessinError::NotClassThree(family));
    }
    let p = params.p as i128;
    let pw = |base: i128, e: i64| -> i128 { base.pow(u32::try_from(e).unwrap_or(0)) };
    let (a, b, c) = (
        params.a as i64,
        params.b.unwrap_or(0) as i64,
        params.c() as i64,
    );
    let order = params.p.pow(closed_form_order_exponent(params));
    let (valency, genus) = match family {
        Family::Class3I => (
            pw(3, a),
            pw(3, a + b + 2 * c + 1) * (pw(3, a - 1) - 1) / 2 + 1,
        ),
        Family::Class3II => (pw(p, a), pw(p, a + b + 2 * c) * (pw(p, a) - 3) / 2 + 1),
        Family::Class3III => (pw(2, a), pw(2, a + b + 2 * c - 1) * (pw(2, a) - 3) + 1),
        Family::Class3IV => (
            pw(2, a + 1),
            pw(2, a + b + 2 * c - 2) * (pw(2, a + 1) - 3) + 1,
        ),
        _ => (pw(2, a), pw(2, 2 * a + 2 * c - 4) * (pw(2, a) - 3) + 1),
    };
    let valency = valency as u64;
    Ok((order, [valency; 3], genus as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table3Report {
    pub family: Family,
    pub params: GroupParams,
    pub dessin: DessinReport,
    pub expected_order: u64,
    pub expected_type: DessinType,
    pub expected_genus: u64,
    pub table3_match: bool,
}

/// Engine order, type and map genus against the closed forms.
pub fn verify_table3(
    params: &GroupParams,
    pres: &PcPresentation,
    budget: usize,
) -> Result<Table3Report, DessinError> {
    let (expected_order, expected_type, expected_genus) = table3_row(params)?;
    let (_, dessin) = combinatorial_map(pres, budget)?;
    let table3_match = dessin.order == expected_order
        && dessin.type_ == expected_type
        && dessin.genus == expected_genus;
    Ok(Table3Report {
        family: params.family,
        params: *params,
        dessin,
        expected_order,
        expected_type,
        expected_genus,
        table3_match,
    })
}
