//! The closed-form product law against independent routes: word rewriting,
//! exhaustive group axioms and the metabelian power/commutator identities.

mod common;

use common::*;
use maxaut_core::params::{build_presentation, hall_bound, Family, PcPresentation};
use maxaut_core::pcgroup::{check_consistency, Element, Gen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn letters(pres: &PcPresentation) -> [Element; 5] {
    Gen::ALL.map(|g| pres.generator(g))
}

/// `x^i y^j z^k u^m v^n` through the engine with signed exponents.
fn word(pres: &PcPresentation, exps: [i128; 5]) -> Element {
    let gens = letters(pres);
    exps.iter()
        .zip(&gens)
        .fold(pres.identity(), |acc, (&e, g)| {
            pres.multiply(&acc, &pres.power_signed(g, e as i64))
        })
}

#[test]
fn rewriting_oracle_agrees_with_product_law() {
    for family in Family::ALL {
        let pres = checked(&smallest(family));
        let mut rng = ChaCha8Rng::seed_from_u64(family as u64);
        for _ in 0..10_000 {
            let w1 = random_word(&mut rng, 6);
            let w2 = random_word(&mut rng, 6);
            let g = engine_eval(&pres, &w1);
            let h = engine_eval(&pres, &w2);
            assert_eq!(rewrite_collect(&pres, &w1), g, "{family}: {w1:?}");
            let joined: Vec<_> = w1.iter().chain(&w2).copied().collect();
            assert_eq!(
                rewrite_collect(&pres, &joined),
                pres.multiply(&g, &h),
                "{family}: {w1:?} · {w2:?}"
            );
        }
    }
}

#[test]
fn exhaustive_group_axioms_up_to_512() {
    let mut groups: Vec<PcPresentation> = Family::ALL
        .iter()
        .map(|&f| build_presentation(&smallest(f)))
        .filter(|p| p.order_usize().unwrap() <= 512)
        .collect();
    groups.push(build_presentation(&params(
        Family::Class3III,
        2,
        3,
        Some(1),
        Some(1),
    )));
    groups.push(build_presentation(&params(
        Family::AbelianHomocyclic,
        3,
        2,
        None,
        None,
    )));
    groups.push(build_presentation(&permissive(
        Family::Class2II,
        2,
        1,
        Some(1),
        None,
    )));
    groups.push(build_presentation(&permissive(
        Family::Class3II,
        3,
        1,
        Some(1),
        Some(1),
    )));
    for mut pres in groups {
        let report = check_consistency(&mut pres);
        assert!(report.consistent && report.exhaustive, "{pres:?}");
        for g in pres.elements() {
            let inv = pres.inverse(&g);
            assert!(pres.multiply(&g, &inv).is_identity());
            assert!(pres.multiply(&inv, &g).is_identity());
            assert_eq!(pres.multiply(&pres.identity(), &g), g);
            assert_eq!(pres.multiply(&g, &pres.identity()), g);
        }
    }
}

#[test]
fn larger_families_pass_the_sampled_check() {
    for family in [Family::Class3I, Family::Class3II] {
        let mut pres = build_presentation(&smallest(family));
        let report = check_consistency(&mut pres);
        assert!(report.consistent && !report.exhaustive);
    }
}

#[test]
fn commutator_of_powers() {
    // [x^m, y^n] = z^{mn} u^{n·C(m,2)} v^{m·C(n,2)}
    for family in Family::ALL {
        let pres = checked(&smallest(family));
        let [x, y, ..] = letters(&pres);
        for m in 0..pres.bounds[0] {
            for n in 0..pres.bounds[1] {
                let (mi, ni) = (m as i128, n as i128);
                let lhs = pres.commutator(&pres.power(&x, m), &pres.power(&y, n));
                let rhs = word(&pres, [0, 0, mi * ni, ni * binom(mi, 2), mi * binom(ni, 2)]);
                assert_eq!(lhs, rhs, "{family} m={m} n={n}");
            }
        }
    }
}

#[test]
fn power_of_x_y_inverse() {
    // (x·y⁻¹)^m = x^m z^{C(m,2)} u^{C(m,3)} v^{C(m,3)} y^{−m}
    for family in Family::ALL {
        let params = smallest(family);
        let pres = checked(&params);
        let [x, y, ..] = letters(&pres);
        let xyi = pres.multiply(&x, &pres.inverse(&y));
        for m in 0..=params.p.pow(params.a) {
            let mi = m as i128;
            let c2 = binom(mi, 2);
            let c3 = binom(mi, 3);
            let rhs = pres.multiply(
                &word(&pres, [mi, 0, c2, c3, c3]),
                &word(&pres, [0, -mi, 0, 0, 0]),
            );
            assert_eq!(pres.power(&xyi, m), rhs, "{family} m={m}");
        }
    }
}

#[test]
fn powers_of_xy_and_yx() {
    for family in Family::ALL {
        let params = smallest(family);
        let pres = checked(&params);
        let [x, y, ..] = letters(&pres);
        let xy = pres.multiply(&x, &y);
        let yx = pres.multiply(&y, &x);
        for m in 0..params.p.pow(params.a + 1) {
            let mi = m as i128;
            let c2 = binom(mi, 2);
            let c3 = binom(mi, 3);
            // (xy)^m = x^m z^{−C(m,2)} u^{−C(m,3)} v^{C(m,2)+C(m,3)} y^m
            let rhs = pres.multiply(
                &word(&pres, [mi, 0, -c2, -c3, c2 + c3]),
                &word(&pres, [0, mi, 0, 0, 0]),
            );
            assert_eq!(pres.power(&xy, m), rhs, "(xy)^{m} in {family}");
            // (yx)^m = y^m z^{C(m,2)} u^{−C(m,2)−C(m,3)} v^{C(m,3)} x^m
            let ym = word(&pres, [0, mi, 0, 0, 0]);
            let mid = word(&pres, [0, 0, c2, -c2 - c3, c3]);
            let rhs = pres.multiply(&pres.multiply(&ym, &mid), &word(&pres, [mi, 0, 0, 0, 0]));
            assert_eq!(pres.power(&yx, m), rhs, "(yx)^{m} in {family}");
        }
    }
}

#[test]
fn element_orders_match_type_column() {
    for family in Family::ALL {
        let params = smallest(family);
        let pres = checked(&params);
        let [x, y, ..] = letters(&pres);
        let bound = params.p.pow(params.a + 1);
        let mut max_order = 1;
        for g in pres.elements() {
            let o = pres.element_order(&g);
            assert_eq!(bound % o, 0);
            assert!(pres.power(&g, o).is_identity());
            max_order = max_order.max(o);
        }
        let type_max = [x, y, pres.multiply(&x, &y)]
            .iter()
            .map(|g| pres.element_order(g))
            .max()
            .unwrap();
        assert_eq!(max_order, type_max, "{family}");
    }
}

#[test]
fn generating_pair_count_matches_hall() {
    // counted on G/Φ: only the x, y exponents mod p matter
    for family in Family::ALL {
        let pres = checked(&smallest(family));
        let p = pres.p;
        let order = pres.order_usize().unwrap() as u64;
        let fibre = order / (p * p);
        let mut residue_pairs = 0u64;
        for a in 0..p * p {
            for b in 0..p * p {
                let (i1, j1, i2, j2) = (a / p, a % p, b / p, b % p);
                if !(i1 * j2 + p * p - (i2 * j1) % (p * p)).is_multiple_of(p) {
                    residue_pairs += 1;
                }
            }
        }
        let count = residue_pairs * fibre * fibre;
        assert_eq!(
            num_bigint::BigUint::from(count),
            hall_bound(p, pres.n_total, 2).unwrap(),
            "{family}"
        );
    }
}

proptest! {
    #[test]
    fn product_is_associative_in_class3_ii(a in 0usize..3125, b in 0usize..3125, c in 0usize..3125) {
        let pres = build_presentation(&smallest(Family::Class3II));
        let (a, b, c) = (pres.element_at(a), pres.element_at(b), pres.element_at(c));
        let left = pres.multiply(&pres.multiply(&a, &b), &c);
        let right = pres.multiply(&a, &pres.multiply(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn index_round_trip(idx in 0usize..2187) {
        let pres = build_presentation(&smallest(Family::Class3I));
        prop_assert_eq!(pres.index_of(&pres.element_at(idx)), idx);
    }
}
