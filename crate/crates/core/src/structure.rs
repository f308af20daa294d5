//! Subgroups of a presented group: closures, the lower central series,
//! the Frattini subgroup and abelian invariants by order counting.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{build_presentation, p_log, Family, GroupParams, PcPresentation};
use crate::pcgroup::{Element, Gen};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("{0} is not a class-three family")]
    NotClassThree(Family),
}

/// A subgroup given by its generators and full member set.
#[derive(Debug, Clone)]
pub struct SubgroupSet<'a> {
    pres: &'a PcPresentation,
    generators: Vec<Element>,
    members: HashSet<Element>,
}

impl<'a> SubgroupSet<'a> {
    pub fn presentation(&self) -> &'a PcPresentation {
        self.pres
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.members.contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Members in lexicographic order.
    pub fn members(&self) -> Vec<Element> {
        let mut all: Vec<_> = self.members.iter().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn is_subset_of(&self, other: &SubgroupSet<'_>) -> bool {
        self.members.iter().all(|g| other.contains(g))
    }

    /// Generators commute pairwise.
    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        gens.iter().enumerate().all(|(idx, g)| {
            gens[idx + 1..]
                .iter()
                .all(|h| self.pres.commutator(g, h).is_identity())
        })
    }
}

/// Smallest subgroup containing `generators`.
///
/// Breadth-first closure under right multiplication by the generators;
/// in a finite group this is already closed under inverses.
pub fn subgroup_closure<'a>(pres: &'a PcPresentation, generators: &[Element]) -> SubgroupSet<'a> {
    let gens: Vec<Element> = generators
        .iter()
        .copied()
        .filter(|g| !g.is_identity())
        .collect();
    let mut members = HashSet::from([pres.identity()]);
    let mut queue = VecDeque::from([pres.identity()]);
    while let Some(g) = queue.pop_front() {
        for t in &gens {
            let next = pres.multiply(&g, t);
            if members.insert(next) {
                queue.push_back(next);
            }
        }
    }
    SubgroupSet {
        pres,
        generators: gens,
        members,
    }
}

/// `G_1 = G ⊇ G_2 ⊇ …` down to the trivial subgroup (included), with
/// `G_{s+1}` generated by `[g, t]` for `g ∈ G_s` and `t ∈ {x, y}`.
pub fn lower_central_series(pres: &PcPresentation) -> Vec<SubgroupSet<'_>> {
    let x = pres.generator(Gen::X);
    let y = pres.generator(Gen::Y);
    let mut series = vec![subgroup_closure(pres, &[x, y])];
    while !series.last().expect("non-empty").is_trivial() {
        let current = series.last().expect("non-empty");
        let mut gens: Vec<Element> = current
            .members()
            .iter()
            .flat_map(|g| [pres.commutator(g, &x), pres.commutator(g, &y)])
            .filter(|c| !c.is_identity())
            .collect();
        gens.sort_unstable();
        gens.dedup();
        let next = subgroup_closure(pres, &gens);
        assert!(
            next.len() < current.len(),
            "lower central series stalled: group is not nilpotent"
        );
        series.push(next);
    }
    series
}

/// `G' = [G, G]`.
pub fn derived_subgroup(pres: &PcPresentation) -> SubgroupSet<'_> {
    lower_central_series(pres)
        .into_iter()
        .nth(1)
        .unwrap_or_else(|| subgroup_closure(pres, &[]))
}

/// `Φ(G) = ⟨x^p, y^p, z, u, v⟩`.
pub fn frattini_subgroup(pres: &PcPresentation) -> SubgroupSet<'_> {
    let [x, y, z, u, v] = Gen::ALL.map(|g| pres.generator(g));
    let gens = [pres.power(&x, pres.p), pres.power(&y, pres.p), z, u, v];
    subgroup_closure(pres, &gens)
}

/// Elementary divisors of an abelian p-group, non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianType(pub Vec<u64>);

impl AbelianType {
    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    /// `C_{q}^2 × …` built from unsorted divisors.
    pub fn from_divisors(mut divisors: Vec<u64>) -> Self {
        divisors.retain(|&d| d > 1);
        divisors.sort_unstable_by(|a, b| b.cmp(a));
        AbelianType(divisors)
    }

    /// Recovers the divisors from `s_k = log_p #{g : g^{p^k} = e}`.
    ///
    /// `s_k = Σ min(λ_i, k)`, so `s_k − s_{k−1}` counts the cyclic factors
    /// of order at least `p^k`.
    fn from_kernel_logs(p: u64, logs: &[u32]) -> Self {
        let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        let mut divisors = Vec::new();
        for (k, pair) in at_least.windows(2).enumerate() {
            let exactly = pair[0] - pair[1];
            divisors.extend(std::iter::repeat_n(p.pow(k as u32 + 1), exactly as usize));
        }
        if let Some(&last) = at_least.last() {
            divisors.extend(std::iter::repeat_n(
                p.pow(at_least.len() as u32),
                last as usize,
            ));
        }
        AbelianType::from_divisors(divisors)
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Counts `#{g : g^{p^k} ∈ target}` for `k = 0, 1, …` until it reaches the
/// number of elements, returning `log_p` of each count.
fn kernel_logs<F>(p: u64, elements: &[Element], mut power_lands: F) -> Vec<u32>
where
    F: FnMut(&Element, u64) -> bool,
{
    let total = elements.len() as u64;
    let mut logs = Vec::new();
    let mut k = 0u32;
    loop {
        let q = p.pow(k);
        let count = elements.iter().filter(|g| power_lands(g, q)).count() as u64;
        logs.push(p_log(p, count).expect("kernel sizes are powers of p"));
        if count == total {
            return logs;
        }
        k += 1;
    }
}

pub fn abelian_type(subgroup: &SubgroupSet<'_>) -> Result<AbelianType, StructureError> {
    if !subgroup.is_abelian() {
        return Err(StructureError::NotAbelian);
    }
    let pres = subgroup.pres;
    let members = subgroup.members();
    let logs = kernel_logs(pres.p, &members, |g, q| pres.power(g, q).is_identity());
    Ok(AbelianType::from_kernel_logs(pres.p, &logs))
}

/// Type of `G/G'`, with coset representatives `x^i y^j` compared modulo `G'`.
pub fn abelianization_type(pres: &PcPresentation) -> AbelianType {
    let derived = derived_subgroup(pres);
    let [x, y, ..] = Gen::ALL.map(|g| pres.generator(g));
    let mut reps: Vec<Element> = Vec::new();
    for i in 0..pres.bounds[0] {
        for j in 0..pres.bounds[1] {
            let g = pres.multiply(&pres.power(&x, i), &pres.power(&y, j));
            let g_inv = pres.inverse(&g);
            let fresh = reps
                .iter()
                .all(|r| !derived.contains(&pres.multiply(&g_inv, r)));
            if fresh {
                reps.push(g);
            }
        }
    }
    let logs = kernel_logs(pres.p, &reps, |g, q| derived.contains(&pres.power(g, q)));
    AbelianType::from_kernel_logs(pres.p, &logs)
}

/// `G_3 = ⟨u, v⟩` is central, `⟨u⟩ ∩ ⟨v⟩` is trivial and `o(u) = o(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomocyclicCheck {
    pub g3_central: bool,
    pub cyclic_parts_meet_trivially: bool,
    pub order_u: u64,
    pub order_v: u64,
}

impl HomocyclicCheck {
    pub fn holds_with(&self, expected_order: u64) -> bool {
        self.g3_central
            && self.cyclic_parts_meet_trivially
            && self.order_u == expected_order
            && self.order_v == expected_order
    }
}

pub fn check_third_term(pres: &PcPresentation) -> HomocyclicCheck {
    let [x, y, _, u, v] = Gen::ALL.map(|g| pres.generator(g));
    let series = lower_central_series(pres);
    let g3 = series
        .get(2)
        .cloned()
        .unwrap_or_else(|| subgroup_closure(pres, &[]));
    let g3_central = g3
        .members()
        .iter()
        .all(|g| pres.commutator(g, &x).is_identity() && pres.commutator(g, &y).is_identity());
    let cu = subgroup_closure(pres, &[u]);
    let cv = subgroup_closure(pres, &[v]);
    let meet = cu.members().iter().filter(|g| cv.contains(g)).count();
    HomocyclicCheck {
        g3_central,
        cyclic_parts_meet_trivially: meet == 1,
        order_u: pres.element_order(&u),
        order_v: pres.element_order(&v),
    }
}

/// Computed and expected invariant types of `G_3`, `G'` and `G^ab`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table2Report {
    pub family: Family,
    pub params: GroupParams,
    pub g3_type: AbelianType,
    pub gprime_type: AbelianType,
    pub ab_type: AbelianType,
    pub expected_g3: AbelianType,
    pub expected_gprime: AbelianType,
    pub expected_ab: AbelianType,
    pub table2_match: bool,
}

/// The printed invariant types for a class-three family.
pub fn table2_row(params: &GroupParams) -> Result<[AbelianType; 3], StructureError> {
    if params.class() != 3 {
        return Err(StructureError::NotClassThree(params.family));
    }
    let p = params.p;
    let pc = p.pow(params.c());
    let (top, ab) = match params.family {
        Family::Class3V | Family::Class3VI => (p.pow(params.a - 1), p.pow(params.a - 1)),
        _ => (p.pow(params.b()), p.pow(params.a)),
    };
    Ok([
        AbelianType::from_divisors(vec![pc, pc]),
        AbelianType::from_divisors(vec![pc, pc, top]),
        AbelianType::from_divisors(vec![ab, ab]),
    ])
}

/// Computed `(G_3, G', G^ab)` types of any presented group.
pub fn invariant_types(pres: &PcPresentation) -> [AbelianType; 3] {
    let series = lower_central_series(pres);
    let trivial = subgroup_closure(pres, &[]);
    let g3 = series.get(2).unwrap_or(&trivial);
    let g2 = series.get(1).unwrap_or(&trivial);
    [
        abelian_type(g3).expect("G_3 is abelian in class ≤ 3"),
        abelian_type(g2).expect("metabelian"),
        abelianization_type(pres),
    ]
}

pub fn verify_table2(params: &GroupParams) -> Result<Table2Report, StructureError> {
    let [expected_g3, expected_gprime, expected_ab] = table2_row(params)?;
    let pres = build_presentation(params);
    let [g3_type, gprime_type, ab_type] = invariant_types(&pres);
    let table2_match =
        g3_type == expected_g3 && gprime_type == expected_gprime && ab_type == expected_ab;
    Ok(Table2Report {
        family: params.family,
        params: *params,
        g3_type,
        gprime_type,
        ab_type,
        expected_g3,
        expected_gprime,
        expected_ab,
        table2_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_params;

    fn pres(family: Family, p: u64, a: u32, b: Option<u32>, c: Option<u32>) -> PcPresentation {
        build_presentation(&validate_params(family, p, a, b, c, false).unwrap())
    }

    #[test]
    fn closures() {
        let g = pres(Family::Class3II, 5, 1, Some(1), Some(1));
        let [_, _, z, u, v] = Gen::ALL.map(|t| g.generator(t));
        assert_eq!(subgroup_closure(&g, &[u, v]).len(), 25);
        assert_eq!(subgroup_closure(&g, &[]).len(), 1);
        assert_eq!(subgroup_closure(&g, &[z, u, v]).len(), 125);
    }

    #[test]
    fn series_lengths() {
        let g = pres(Family::Class3III, 2, 2, Some(1), Some(1));
        let series = lower_central_series(&g);
        assert_eq!(series.len(), 4);
        assert!(series[3].is_trivial());
        let [_, _, z, u, v] = Gen::ALL.map(|t| g.generator(t));
        assert_eq!(
            series[1].members(),
            subgroup_closure(&g, &[z, u, v]).members()
        );
        assert_eq!(series[2].members(), subgroup_closure(&g, &[u, v]).members());
        assert!(series.windows(2).all(|w| w[1].is_subset_of(&w[0])));

        let ab = pres(Family::AbelianHomocyclic, 3, 2, None, None);
        assert!(lower_central_series(&ab)[1].is_trivial());
    }

    #[test]
    fn types_from_counts() {
        assert_eq!(
            AbelianType::from_kernel_logs(3, &[0, 2, 4, 5]),
            AbelianType(vec![27, 9])
        );
        assert_eq!(AbelianType::from_kernel_logs(2, &[0]), AbelianType(vec![]));
        assert_eq!(
            AbelianType::from_kernel_logs(5, &[0, 3]),
            AbelianType(vec![5, 5, 5])
        );
    }

    #[test]
    fn abelian_types() {
        let g = pres(Family::Class3II, 5, 1, Some(1), Some(1));
        let [t3, t2, tab] = invariant_types(&g);
        assert_eq!(t3, AbelianType(vec![5, 5]));
        assert_eq!(t2, AbelianType(vec![5, 5, 5]));
        assert_eq!(tab, AbelianType(vec![5, 5]));
        assert_eq!(
            abelian_type(&subgroup_closure(&g, &[])).unwrap(),
            AbelianType(vec![])
        );
        let whole = subgroup_closure(&g, &[g.generator(Gen::X), g.generator(Gen::Y)]);
        assert_eq!(abelian_type(&whole), Err(StructureError::NotAbelian));
    }

    #[test]
    fn frattini_index() {
        let q8 = pres(Family::Class2III, 2, 2, None, None);
        assert_eq!(frattini_subgroup(&q8).len(), 2);
        let ab = pres(Family::AbelianHomocyclic, 7, 1, None, None);
        assert!(frattini_subgroup(&ab).is_trivial());
    }

    #[test]
    fn table2_rows() {
        let i = validate_params(Family::Class3I, 3, 2, Some(1), Some(1), true).unwrap();
        let report = verify_table2(&i).unwrap();
        assert!(report.table2_match, "{report:?}");
        assert_eq!(report.ab_type, AbelianType(vec![9, 9]));

        let v = validate_params(Family::Class3V, 2, 3, None, Some(1), true).unwrap();
        let report = verify_table2(&v).unwrap();
        assert!(report.table2_match);
        assert_eq!(report.gprime_type, AbelianType(vec![4, 2, 2]));

        let q8 = validate_params(Family::Class2III, 2, 2, None, None, true).unwrap();
        assert!(verify_table2(&q8).is_err());
    }
}
