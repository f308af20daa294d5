//! Presentation-free ground truth on explicit multiplication tables.
//!
//! Nothing here uses the normal-form law beyond tabulating it once in
//! [`to_cayley`]; automorphisms and isomorphisms are found by propagating
//! generator images breadth-first through the tables.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::params::PcPresentation;
use crate::pcgroup::Gen;

/// Default largest table the oracle builds.
pub const DEFAULT_ORACLE_BUDGET: usize = 512;

/// Tables up to this size are checked for associativity on all triples.
pub const EXHAUSTIVE_TABLE_LIMIT: usize = 512;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("group of order {order} exceeds the oracle budget of {budget}")]
    ResourceBudgetExceeded { order: String, budget: usize },
    #[error("row or column {0} of the table is not a permutation")]
    NotLatin(usize),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("associativity fails on ({0}, {1}, {2})")]
    NotAssociative(u32, u32, u32),
    #[error("designated generators do not generate the group")]
    NotGenerated,
    #[error("expected a two-generator quotient of order p^2, got {0}")]
    NotTwoGenerated(usize),
    #[error("malformed table dump: {0}")]
    Parse(String),
}

/// A finite group as an explicit multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGroup {
    n: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    generators: Vec<u32>,
    orders: Vec<u64>,
}

impl CayleyGroup {
    /// Validates a row-major `n × n` table: Latin square, two-sided
    /// identity, associativity (every triple up to [`EXHAUSTIVE_TABLE_LIMIT`],
    /// Light's generator test beyond) and generation by `generators`.
    pub fn new(n: usize, table: Vec<u32>, generators: Vec<u32>) -> Result<Self, OracleError> {
        if n == 0 || table.len() != n * n || generators.iter().any(|&g| g as usize >= n) {
            return Err(OracleError::Parse("table size mismatch".into()));
        }
        for r in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for c in 0..n {
                let rv = table[r * n + c] as usize;
                let cv = table[c * n + r] as usize;
                if rv >= n || cv >= n || row_seen[rv] || col_seen[cv] {
                    return Err(OracleError::NotLatin(r));
                }
                row_seen[rv] = true;
                col_seen[cv] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| {
                (0..n).all(|g| table[e * n + g] as usize == g && table[g * n + e] as usize == g)
            })
            .ok_or(OracleError::NoIdentity)? as u32;
        let mut group = CayleyGroup {
            n,
            table,
            identity,
            inverse: Vec::new(),
            generators,
            orders: Vec::new(),
        };
        group.check_associative()?;
        group.inverse = (0..n as u32)
            .map(|g| {
                (0..n as u32)
                    .find(|&h| group.mul(g, h) == identity)
                    .expect("Latin square has inverses")
            })
            .collect();
        group.orders = (0..n as u32).map(|g| group.compute_order(g)).collect();
        if group.closure(&group.generators).len() != n {
            return Err(OracleError::NotGenerated);
        }
        Ok(group)
    }

    fn check_associative(&self) -> Result<(), OracleError> {
        let n = self.n as u32;
        let middles: Vec<u32> = if self.n <= EXHAUSTIVE_TABLE_LIMIT {
            (0..n).collect()
        } else {
            self.generators.clone()
        };
        for a in 0..n {
            for &b in &middles {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(OracleError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_order(&self, g: u32) -> u64 {
        let mut cur = g;
        let mut order = 1;
        while cur != self.identity {
            cur = self.mul(cur, g);
            order += 1;
        }
        order
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    pub fn inverse(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn order_of(&self, a: u32) -> u64 {
        self.orders[a as usize]
    }

    pub fn power(&self, a: u32, t: u64) -> u32 {
        (0..t).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        let left = self.mul(self.inverse(a), self.inverse(b));
        self.mul(left, self.mul(a, b))
    }

    /// Sorted members of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        seen[self.identity as usize] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &t in gens {
                let next = self.mul(g, t);
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    queue.push_back(next);
                }
            }
        }
        (0..self.n as u32).filter(|&g| seen[g as usize]).collect()
    }

    /// Histogram of element orders (an isomorphism invariant).
    fn order_profile(&self) -> Vec<u64> {
        let mut orders = self.orders.clone();
        orders.sort_unstable();
        orders
    }

    /// The subgroup on `members` (sorted) as its own table, generated by a
    /// greedy generating set favouring elements of large order.
    pub fn subgroup(&self, members: &[u32]) -> CayleyGroup {
        let mut position = vec![UNSET; self.n];
        for (idx, &g) in members.iter().enumerate() {
            position[g as usize] = idx as u32;
        }
        let k = members.len();
        let table: Vec<u32> = members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| (a, b)))
            .map(|(a, b)| position[self.mul(a, b) as usize])
            .collect();

        let mut by_order: Vec<u32> = members.to_vec();
        by_order.sort_by_key(|&g| std::cmp::Reverse(self.order_of(g)));
        let mut gens: Vec<u32> = Vec::new();
        let mut span = vec![self.identity];
        for g in by_order {
            if span.len() == k {
                break;
            }
            if span.binary_search(&g).is_err() {
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        let local_gens = gens.iter().map(|&g| position[g as usize]).collect();
        CayleyGroup::new(k, table, local_gens).expect("subgroup of a valid group is valid")
    }

    /// Table dump: `N`, then `N` rows of `N` zero-based indices.
    pub fn dump(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.table.chunks(self.n) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" ")).expect("writing to a String");
        }
        out
    }

    pub fn from_dump(text: &str, generators: Vec<u32>) -> Result<Self, OracleError> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| OracleError::Parse("empty input".into()))?
            .parse()
            .map_err(|e| OracleError::Parse(format!("size: {e}")))?;
        let table = tokens
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| OracleError::Parse(format!("{t}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if table.len() != n * n {
            return Err(OracleError::Parse(format!(
                "expected {} entries, found {}",
                n * n,
                table.len()
            )));
        }
        CayleyGroup::new(n, table, generators)
    }
}

/// Tabulates the normal-form multiplication, elements indexed by the
/// lexicographic enumeration; generators are `x` and `y`.
pub fn to_cayley(pres: &PcPresentation, budget: usize) -> Result<CayleyGroup, OracleError> {
    let n = match pres.order_usize() {
        Some(n) if n <= budget => n,
        _ => {
            return Err(OracleError::ResourceBudgetExceeded {
                order: pres.order().to_string(),
                budget,
            })
        }
    };
    let elements: Vec<_> = pres.elements().collect();
    let table = elements
        .iter()
        .flat_map(|a| elements.iter().map(move |b| (a, b)))
        .map(|(a, b)| pres.index_of(&pres.multiply(a, b)) as u32)
        .collect();
    let gens = [Gen::X, Gen::Y]
        .map(|g| pres.index_of(&pres.generator(g)) as u32)
        .to_vec();
    CayleyGroup::new(n, table, gens)
}

/// Propagates `gens[t] ↦ images[t]` breadth-first over `⟨gens⟩`.
///
/// Returns the map (`UNSET` outside `⟨gens⟩`) when every edge
/// `a → a·gens[t]` is respected and the map is injective, i.e. when the
/// assignment extends to an injective homomorphism on `⟨gens⟩`.
fn extend(src: &CayleyGroup, gens: &[u32], dst: &CayleyGroup, images: &[u32]) -> Option<Vec<u32>> {
    let mut map = vec![UNSET; src.n];
    let mut used = vec![false; dst.n];
    map[src.identity as usize] = dst.identity;
    used[dst.identity as usize] = true;
    let mut queue = VecDeque::from([src.identity]);
    while let Some(a) = queue.pop_front() {
        let fa = map[a as usize];
        for (&g, &img) in gens.iter().zip(images) {
            let b = src.mul(a, g);
            let fb = dst.mul(fa, img);
            match map[b as usize] {
                UNSET => {
                    if used[fb as usize] {
                        return None;
                    }
                    used[fb as usize] = true;
                    map[b as usize] = fb;
                    queue.push_back(b);
                }
                existing if existing != fb => return None,
                _ => {}
            }
        }
    }
    Some(map)
}

/// Depth-first search over images of `src`'s generators in `dst`, pruning
/// any prefix that does not extend injectively on the subgroup it spans.
/// `visit` is called on every full assignment that extends to an
/// isomorphism and returns whether to keep searching.
fn search_isomorphisms<F>(src: &CayleyGroup, dst: &CayleyGroup, mut visit: F)
where
    F: FnMut(&[u32]) -> bool,
{
    if src.n != dst.n {
        return;
    }
    let gens = src.generators.clone();
    let candidates: Vec<Vec<u32>> = gens
        .iter()
        .map(|&g| {
            (0..dst.n as u32)
                .filter(|&h| dst.order_of(h) == src.order_of(g))
                .collect()
        })
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    descend(src, dst, &gens, &candidates, &mut images, &mut visit);
}

fn descend<F>(
    src: &CayleyGroup,
    dst: &CayleyGroup,
    gens: &[u32],
    candidates: &[Vec<u32>],
    images: &mut Vec<u32>,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[u32]) -> bool,
{
    let depth = images.len();
    if depth == gens.len() {
        return visit(images);
    }
    for &h in &candidates[depth] {
        images.push(h);
        let last = depth + 1 == gens.len();
        // the full check happens at the leaf; prefixes are only pruned
        let viable = if last {
            extend(src, gens, dst, images).is_some()
        } else {
            depth == 0 || extend(src, &gens[..=depth], dst, images).is_some()
        };
        if viable && !descend(src, dst, gens, candidates, images, visit) {
            images.pop();
            return false;
        }
        images.pop();
    }
    true
}

/// `|Aut(G)|`: generator-image tuples that extend to bijective
/// endomorphisms of the table.
pub fn brute_automorphisms(group: &CayleyGroup) -> BigUint {
    let mut count = 0u64;
    search_isomorphisms(group, group, |_| {
        count += 1;
        true
    });
    BigUint::from(count)
}

pub fn brute_isomorphic(first: &CayleyGroup, second: &CayleyGroup) -> bool {
    if first.n != second.n || first.order_profile() != second.order_profile() {
        return false;
    }
    let mut found = false;
    search_isomorphisms(first, second, |_| {
        found = true;
        false
    });
    found
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MiReport {
    pub is_mi: bool,
    pub frattini_size: usize,
    pub subgroup_sizes: Vec<usize>,
}

/// Whether all maximal subgroups are isomorphic.
///
/// `Φ(G)` is generated by all `p`-th powers and commutators; the `p + 1`
/// maximal subgroups are `⟨Φ, x⟩` and `⟨Φ, x^k·y⟩` for `0 ≤ k < p`, with
/// `x`, `y` the designated generators.
pub fn mi_check(group: &CayleyGroup, p: u64) -> Result<MiReport, OracleError> {
    let n = group.n as u32;
    let mut gens: Vec<u32> = (0..n).map(|g| group.power(g, p)).collect();
    for a in 0..n {
        for b in 0..n {
            gens.push(group.commutator(a, b));
        }
    }
    gens.sort_unstable();
    gens.dedup();
    let frattini = group.closure(&gens);
    if group.n / frattini.len() != (p * p) as usize || group.generators.len() != 2 {
        return Err(OracleError::NotTwoGenerated(group.n / frattini.len()));
    }
    let (x, y) = (group.generators[0], group.generators[1]);
    let mut tops = vec![x];
    tops.extend((0..p).map(|k| group.mul(group.power(x, k), y)));
    let maximal: Vec<CayleyGroup> = tops
        .iter()
        .map(|&t| {
            let mut span = frattini.clone();
            span.push(t);
            group.subgroup(&group.closure(&span))
        })
        .collect();
    let subgroup_sizes: Vec<usize> = maximal.iter().map(CayleyGroup::len).collect();
    let is_mi = maximal.iter().enumerate().all(|(i, first)| {
        maximal[i + 1..]
            .iter()
            .all(|second| brute_isomorphic(first, second))
    });
    Ok(MiReport {
        is_mi,
        frattini_size: frattini.len(),
        subgroup_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_presentation, validate_params, Family};

    fn table(family: Family, p: u64, a: u32, b: Option<u32>, c: Option<u32>) -> CayleyGroup {
        let pres = build_presentation(&validate_params(family, p, a, b, c, false).unwrap());
        to_cayley(&pres, 512).unwrap()
    }

    /// C_n × C_n as an explicit table with generators (1,0) and (0,1).
    fn square_cyclic(n: u32) -> CayleyGroup {
        let idx = |a: u32, b: u32| (a % n) * n + (b % n);
        let mut t = Vec::new();
        for g in 0..n * n {
            for h in 0..n * n {
                t.push(idx(g / n + h / n, g % n + h % n));
            }
        }
        CayleyGroup::new((n * n) as usize, t, vec![idx(1, 0), idx(0, 1)]).unwrap()
    }

    #[test]
    fn quaternion() {
        let q8 = table(Family::Class2III, 2, 2, None, None);
        assert_eq!(q8.len(), 8);
        assert_eq!(brute_automorphisms(&q8), BigUint::from(24u32));
        let mi = mi_check(&q8, 2).unwrap();
        assert!(mi.is_mi);
        assert_eq!(mi.subgroup_sizes, vec![4, 4, 4]);
    }

    #[test]
    fn dihedral() {
        let d8 = table(Family::Class2II, 2, 1, Some(1), None);
        assert_eq!(brute_automorphisms(&d8), BigUint::from(8u32));
        assert!(!mi_check(&d8, 2).unwrap().is_mi);
        let q8 = table(Family::Class2III, 2, 2, None, None);
        assert!(!brute_isomorphic(&d8, &q8));
        assert!(brute_isomorphic(&d8, &d8));
    }

    #[test]
    fn elementary_abelian() {
        let c3 = table(Family::AbelianHomocyclic, 3, 1, None, None);
        assert_eq!(brute_automorphisms(&c3), BigUint::from(48u32));
        assert!(brute_isomorphic(&c3, &square_cyclic(3)));
        assert!(!brute_isomorphic(&c3, &square_cyclic(2)));
        for g in 0..9 {
            for h in 0..9 {
                let (a, b) = (g / 3, g % 3);
                let (c, d) = (h / 3, h % 3);
                assert_eq!(c3.mul(g, h), ((a + c) % 3) * 3 + (b + d) % 3);
            }
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            CayleyGroup::new(2, vec![0, 1, 1, 1], vec![1]),
            Err(OracleError::NotLatin(_))
        ));
        // Latin but not associative: a loop of order 5
        let loop5 = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        assert!(matches!(
            CayleyGroup::new(5, loop5, vec![1, 2]),
            Err(OracleError::NotAssociative(..))
        ));
        let c4 = square_cyclic(2);
        let lone = CayleyGroup::new(4, c4.table.clone(), vec![c4.generators[0]]);
        assert_eq!(lone, Err(OracleError::NotGenerated));
    }

    #[test]
    fn dump_round_trip() {
        let q8 = table(Family::Class2III, 2, 2, None, None);
        let text = q8.dump();
        assert!(text.starts_with("8\n0 1 2 3 4 5 6 7\n"));
        assert_eq!(
            CayleyGroup::from_dump(&text, q8.generators().to_vec()).unwrap(),
            q8
        );
        assert!(CayleyGroup::from_dump("3\n0 1", vec![]).is_err());
    }

    #[test]
    fn budget() {
        let pres = build_presentation(
            &validate_params(Family::Class3III, 2, 2, Some(1), Some(1), true).unwrap(),
        );
        assert!(matches!(
            to_cayley(&pres, 64),
            Err(OracleError::ResourceBudgetExceeded { .. })
        ));
    }
}
