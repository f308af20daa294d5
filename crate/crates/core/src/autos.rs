//! Automorphism counts by generating-pair enumeration.
//!
//! An automorphism of a two-generator group is determined by the images of
//! `x` and `y`, and a generating pair `(g, h)` is such an image exactly when
//! it satisfies every defining relation (von Dyck). Counting those pairs
//! therefore gives `|Aut(G)|` exactly, and comparing with Hall's bound
//! decides maximal automorphicity.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::params::{
    build_presentation, hall_bound, validate_params, Family, GroupParams, ParamsError,
    PcPresentation,
};
use crate::pcgroup::{Element, Gen};

/// Largest group order enumerated by default (`|G|²` ≈ 9.8M pairs).
pub const DEFAULT_ENUMERATION_BUDGET: usize = 3125;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "MAXAUT_BUDGET";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("({0}, {1}) is not a generating pair")]
    NotGeneratingPair(Element, Element),
    #[error("group of order {order} exceeds the enumeration budget of {budget}")]
    ResourceBudgetExceeded { order: String, budget: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// Enumeration budget: `MAXAUT_BUDGET` if set and valid, else the default.
pub fn budget_from_env() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

/// `(i_g·j_h − i_h·j_g) ≢ 0 (mod p)`: the images in `G/Φ(G)` form a basis.
pub fn is_generating_pair(pres: &PcPresentation, g: &Element, h: &Element) -> bool {
    let p = pres.p;
    let det = (g.i() % p) * (h.j() % p) + p * p - (h.i() % p) * (g.j() % p);
    !det.is_multiple_of(p)
}

/// Images of `z`, `u`, `v` under `x ↦ g`, `y ↦ h`.
pub fn induced_images(host: &PcPresentation, g: &Element, h: &Element) -> [Element; 3] {
    let z1 = host.commutator(g, h);
    let u1 = host.commutator(&z1, g);
    let v1 = host.commutator(&z1, h);
    [z1, u1, v1]
}

/// Whether `(g, h)` in `host` satisfies the defining relations of `rel`.
///
/// Tails are evaluated on the images `z1 = [g, h]`, `u1 = [z1, g]`,
/// `v1 = [z1, h]`, never on the letters of `host`.
pub fn relations_hold_in(
    rel: &PcPresentation,
    host: &PcPresentation,
    g: &Element,
    h: &Element,
) -> bool {
    let [z1, u1, v1] = induced_images(host, g, h);
    let [ex, ey, ez, eu, ev] = rel.bounds;
    let central =
        |c: &Element| host.commutator(g, c).is_identity() && host.commutator(h, c).is_identity();
    host.power(&u1, eu).is_identity()
        && host.power(&v1, ev).is_identity()
        && central(&u1)
        && central(&v1)
        && host.power(&z1, ez)
            == host.eval_lower([0, rel.tail_z[0], rel.tail_z[1]], [&z1, &u1, &v1])
        && host.power(g, ex) == host.eval_lower(rel.tail_x, [&z1, &u1, &v1])
        && host.power(h, ey) == host.eval_lower(rel.tail_y, [&z1, &u1, &v1])
}

pub fn satisfies_defining_relations(
    pres: &PcPresentation,
    g: &Element,
    h: &Element,
) -> Result<bool, AutError> {
    if !is_generating_pair(pres, g, h) {
        return Err(AutError::NotGeneratingPair(*g, *h));
    }
    Ok(relations_hold_in(pres, pres, g, h))
}

pub(crate) fn serialize_big<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(value) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.serialize_str(&value.to_string()),
    }
}

fn serialize_opt_secs<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_none(),
    }
}

/// Result of an exhaustive generating-pair count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutReport {
    pub family: Option<Family>,
    pub p: u64,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub c: Option<u32>,
    pub order: u64,
    pub n: u32,
    #[serde(serialize_with = "serialize_big")]
    pub gen_pairs: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub aut_count: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub hall_bound: BigUint,
    pub max_aut: bool,
    /// Wall-clock time; only serialized when set with [`AutReport::with_timing`].
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_opt_secs"
    )]
    pub seconds: Option<f64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl AutReport {
    pub fn with_params(mut self, params: &GroupParams) -> Self {
        self.family = Some(params.family);
        self.a = Some(params.a);
        self.b = params.b;
        self.c = params.c;
        self
    }

    pub fn with_timing(mut self) -> Self {
        self.seconds = Some(self.elapsed.as_secs_f64());
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    /// Largest group order to enumerate.
    pub budget: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

/// Generating pairs and relation-satisfying pairs with first entry in
/// `block` (indices into the lexicographic enumeration).
///
/// Blocks are independent, so disjoint blocks may be counted concurrently
/// and the counts added.
pub fn count_block(
    pres: &PcPresentation,
    elements: &[Element],
    block: std::ops::Range<usize>,
) -> (u64, u64) {
    let mut generating = 0u64;
    let mut automorphisms = 0u64;
    for g in &elements[block] {
        for h in elements {
            if is_generating_pair(pres, g, h) {
                generating += 1;
                if relations_hold_in(pres, pres, g, h) {
                    automorphisms += 1;
                }
            }
        }
    }
    (generating, automorphisms)
}

fn check_budget(pres: &PcPresentation, budget: usize) -> Result<usize, AutError> {
    match pres.order_usize() {
        Some(order) if order <= budget => Ok(order),
        _ => Err(AutError::ResourceBudgetExceeded {
            order: pres.order().to_string(),
            budget,
        }),
    }
}

/// Exact `|Aut(G)|` by counting relation-satisfying generating pairs.
///
/// Work is split into blocks of first entries on the current rayon pool;
/// the result does not depend on the number of workers.
pub fn automorphism_count(
    pres: &PcPresentation,
    options: CountOptions,
) -> Result<AutReport, AutError> {
    let order = check_budget(pres, options.budget)?;
    let start = Instant::now();
    let elements: Vec<Element> = pres.elements().collect();
    let (generating, automorphisms) = (0..order)
        .into_par_iter()
        .map(|idx| count_block(pres, &elements, idx..idx + 1))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let bound = hall_bound(pres.p, pres.n_total, 2)?;
    let aut_count = BigUint::from(automorphisms);
    Ok(AutReport {
        family: None,
        p: pres.p,
        a: None,
        b: None,
        c: None,
        order: order as u64,
        n: pres.n_total,
        gen_pairs: BigUint::from(generating),
        max_aut: aut_count == bound,
        aut_count,
        hall_bound: bound,
        seconds: None,
        elapsed: start.elapsed(),
    })
}

pub fn is_maximally_automorphic(
    pres: &PcPresentation,
    options: CountOptions,
) -> Result<(bool, AutReport), AutError> {
    let report = automorphism_count(pres, options)?;
    Ok((report.max_aut, report))
}

/// One row of the three-automorphism table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub name: &'static str,
    pub extends: bool,
    pub z_image: bool,
    pub u_image: bool,
    pub v_image: bool,
}

impl Table1Row {
    pub fn passed(&self) -> bool {
        self.extends && self.z_image && self.u_image && self.v_image
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub all_pass: bool,
}

/// τ: (y, x), π: (x⁻¹, y), η: (x, y·x) and their expected images of
/// `z`, `u`, `v`:
///
/// | σ | z^σ    | u^σ  | v^σ  |
/// |---|--------|------|------|
/// | τ | z⁻¹    | v⁻¹  | u⁻¹  |
/// | π | z⁻¹·u  | u    | v⁻¹  |
/// | η | z·u    | u    | u·v  |
pub fn table1_check(pres: &PcPresentation) -> Table1Report {
    let [x, y, z, u, v] = Gen::ALL.map(|g| pres.generator(g));
    let inv = |g: &Element| pres.inverse(g);
    let mul = |g: &Element, h: &Element| pres.multiply(g, h);

    let cases = [
        ("tau", (y, x), [inv(&z), inv(&v), inv(&u)]),
        ("pi", (inv(&x), y), [mul(&inv(&z), &u), u, inv(&v)]),
        ("eta", (x, mul(&y, &x)), [mul(&z, &u), u, mul(&u, &v)]),
    ];
    let rows: Vec<Table1Row> = cases
        .into_iter()
        .map(|(name, (g, h), expected)| {
            let extends = satisfies_defining_relations(pres, &g, &h).unwrap_or(false);
            let [z1, u1, v1] = induced_images(pres, &g, &h);
            Table1Row {
                name,
                extends,
                z_image: z1 == expected[0],
                u_image: u1 == expected[1],
                v_image: v1 == expected[2],
            }
        })
        .collect();
    let all_pass = rows.iter().all(Table1Row::passed);
    Table1Report { rows, all_pass }
}

/// Image of `x^i y^j z^k u^m v^n` under the endomorphism `x ↦ g`, `y ↦ h`.
pub fn apply_pair(pres: &PcPresentation, g: &Element, h: &Element, target: &Element) -> Element {
    let [z1, u1, v1] = induced_images(pres, g, h);
    let head = pres.multiply(&pres.power(g, target.i()), &pres.power(h, target.j()));
    let tail = pres.eval_lower([target.k(), target.m(), target.n()], [&z1, &u1, &v1]);
    pres.multiply(&head, &tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientReport {
    pub params: GroupParams,
    /// Family and parameters the quotient is expected to match.
    pub quotient_params: GroupParams,
    pub presentation_match: bool,
    pub quotient: AutReport,
    pub passed: bool,
}

/// The class-two family that `G/G_3` should land on.
pub fn quotient_params(params: &GroupParams) -> Result<GroupParams, AutError> {
    let (family, b) = match params.family {
        Family::Class3I | Family::Class3II => (Family::Class2I, params.b),
        Family::Class3III | Family::Class3IV => (Family::Class2II, params.b),
        Family::Class3V | Family::Class3VI => (Family::Class2III, None),
        // G_3 is trivial below class three
        _ => return Ok(*params),
    };
    Ok(validate_params(
        family,
        params.p,
        params.a,
        b,
        None,
        params.strict,
    )?)
}

/// `G/G_3` is the printed class-two family and is itself maximally
/// automorphic.
pub fn quotient_check(
    params: &GroupParams,
    options: CountOptions,
) -> Result<QuotientReport, AutError> {
    let target = quotient_params(params)?;
    let truncated = build_presentation(params).truncate_class_two();
    let expected = build_presentation(&target);
    let presentation_match = truncated == expected;
    let quotient = automorphism_count(&truncated, options)?.with_params(&target);
    let passed = presentation_match && quotient.max_aut;
    Ok(QuotientReport {
        params: *params,
        quotient_params: target,
        presentation_match,
        quotient,
        passed,
    })
}

/// A presentation together with a count proving it maximally automorphic.
#[derive(Debug, Clone)]
pub struct VerifiedMaxAut<'a> {
    pres: &'a PcPresentation,
}

impl<'a> VerifiedMaxAut<'a> {
    pub fn new(pres: &'a PcPresentation, report: &AutReport) -> Result<Self, AutError> {
        if !report.max_aut || report.order != pres.order_usize().unwrap_or(0) as u64 {
            return Err(AutError::PreconditionViolated(
                "group is not verified maximally automorphic".into(),
            ));
        }
        Ok(VerifiedMaxAut { pres })
    }

    pub fn presentation(&self) -> &'a PcPresentation {
        self.pres
    }
}

/// Isomorphism test for two maximally automorphic groups.
///
/// If `A ≅ B` then, composing with an automorphism of `A`, some isomorphism
/// sends the standard generators of `B` to those of `A`; so it is enough to
/// check whether `(x, y)` of each group satisfies the other's relations.
pub fn maxaut_isomorphic(a: &VerifiedMaxAut<'_>, b: &VerifiedMaxAut<'_>) -> bool {
    let (pa, pb) = (a.pres, b.pres);
    if pa.p != pb.p || pa.n_total != pb.n_total {
        return false;
    }
    let std_pair = |pres: &PcPresentation| (pres.generator(Gen::X), pres.generator(Gen::Y));
    let (xa, ya) = std_pair(pa);
    let (xb, yb) = std_pair(pb);
    relations_hold_in(pb, pa, &xa, &ya) && relations_hold_in(pa, pb, &xb, &yb)
}
