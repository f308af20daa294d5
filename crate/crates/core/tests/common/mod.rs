//! Shared fixtures for the integration suites: the smallest strict member of
//! every family and a word-rewriting collector that knows nothing about the
//! closed-form product law.

#![allow(dead_code)]

use maxaut_core::params::{
    build_presentation, validate_params, Family, GroupParams, PcPresentation,
};
use maxaut_core::pcgroup::{check_consistency, Element, Gen};
use rand::Rng;

pub fn params(family: Family, p: u64, a: u32, b: Option<u32>, c: Option<u32>) -> GroupParams {
    validate_params(family, p, a, b, c, true).expect("strict parameters")
}

pub fn permissive(family: Family, p: u64, a: u32, b: Option<u32>, c: Option<u32>) -> GroupParams {
    validate_params(family, p, a, b, c, false).expect("permissive parameters")
}

/// Smallest strict parameters of each family.
pub fn smallest(family: Family) -> GroupParams {
    match family {
        Family::AbelianHomocyclic => params(family, 2, 1, None, None),
        Family::Class2I => params(family, 3, 1, Some(1), None),
        Family::Class2II => params(family, 2, 2, Some(1), None),
        Family::Class2III => params(family, 2, 2, None, None),
        Family::Class3I => params(family, 3, 2, Some(1), Some(1)),
        Family::Class3II => params(family, 5, 1, Some(1), Some(1)),
        Family::Class3III | Family::Class3IV => params(family, 2, 2, Some(1), Some(1)),
        Family::Class3V | Family::Class3VI => params(family, 2, 3, None, Some(1)),
    }
}

/// Builds and consistency-checks the presentation.
pub fn checked(params: &GroupParams) -> PcPresentation {
    let mut pres = build_presentation(params);
    let report = check_consistency(&mut pres);
    assert!(report.consistent, "{params}: {:?}", report.witness);
    pres
}

pub fn q8() -> PcPresentation {
    checked(&params(Family::Class2III, 2, 2, None, None))
}

pub fn dihedral8() -> PcPresentation {
    checked(&permissive(Family::Class2II, 2, 1, Some(1), None))
}

pub fn pappus() -> PcPresentation {
    checked(&params(Family::Class2I, 3, 1, Some(1), None))
}

/// Class-3 (ii) shaped group at p = 3, a = b = c = 1 (order 3^5).
pub fn class3_ii_at_three() -> PcPresentation {
    checked(&permissive(Family::Class3II, 3, 1, Some(1), Some(1)))
}

pub fn binom(t: i128, r: u32) -> i128 {
    (0..r as i128).fold(1, |acc, s| acc * (t - s)) / (1..=r as i128).product::<i128>()
}

/// A signed generator letter.
pub type Letter = (Gen, i64);

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let gen = Gen::ALL[rng.gen_range(0..5)];
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            (gen, sign)
        })
        .collect()
}

/// Evaluates a word with the engine's multiplication.
pub fn engine_eval(pres: &PcPresentation, word: &[Letter]) -> Element {
    word.iter().fold(pres.identity(), |acc, &(gen, e)| {
        let g = pres.power_signed(&pres.generator(gen), e);
        pres.multiply(&acc, &g)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sym {
    X,
    Y,
    Z,
}

/// Collects a word into normal form using only local rewriting rules:
///
/// * `z^{±1}·x → x·z^{±1}·u^{±1}` and `z^{±1}·y^{±1} → y^{±1}·z^{±1}·v^{±1·±1}`
/// * `y·x → x·y·z⁻¹` and `y⁻¹·x → x·y⁻¹·z·v⁻¹`
/// * `u`, `v` central; `z`, `u`, `v` commute
/// * the power relations, with tails placed anywhere (they are central)
///
/// Negative powers of `x` are removed with `x⁻¹ = x^{e_x−1}·tail_x⁻¹`.
pub fn rewrite_collect(pres: &PcPresentation, word: &[Letter]) -> Element {
    let [ex, ey, ez, eu, ev] = pres.bounds.map(|b| b as i64);
    let tx = pres.tail_x.map(|t| t as i64);
    let ty = pres.tail_y.map(|t| t as i64);
    let tz = pres.tail_z.map(|t| t as i64);
    let (mut u, mut v) = (0i64, 0i64);

    // run-length word over x, y, z; u and v go straight to the counters
    let mut runs: Vec<(Sym, i64)> = Vec::new();
    let mut trailing_z = 0i64;
    for &(gen, e) in word {
        match gen {
            Gen::X => {
                if e >= 0 {
                    runs.push((Sym::X, e));
                } else {
                    // x^e = x^{e + q·e_x} · tail_x^{-q}
                    let q = (-e + ex - 1) / ex;
                    runs.push((Sym::X, e + q * ex));
                    trailing_z -= q * tx[0];
                    u -= q * tx[1];
                    v -= q * tx[2];
                }
            }
            Gen::Y => runs.push((Sym::Y, e)),
            Gen::Z => runs.push((Sym::Z, e)),
            Gen::U => u += e,
            Gen::V => v += e,
        }
    }

    loop {
        merge(&mut runs);
        let Some(pos) = runs.windows(2).position(|w| rank(w[0].0) > rank(w[1].0)) else {
            break;
        };
        let (left, right) = (runs[pos], runs[pos + 1]);
        match (left.0, right.0) {
            (Sym::Z, Sym::X) => {
                // each z^{±1} passes each x leaving u^{±1}
                u += left.1 * right.1;
                runs.swap(pos, pos + 1);
            }
            (Sym::Z, Sym::Y) => {
                v += left.1 * right.1;
                runs.swap(pos, pos + 1);
            }
            (Sym::Y, Sym::X) => {
                let sign = left.1.signum();
                let replacement = if sign > 0 {
                    // y·x → x·y·z⁻¹
                    [(Sym::X, 1), (Sym::Y, 1), (Sym::Z, -1)]
                } else {
                    // y⁻¹·x → x·y⁻¹·z·v⁻¹
                    v -= 1;
                    [(Sym::X, 1), (Sym::Y, -1), (Sym::Z, 1)]
                };
                let mut spliced = vec![(Sym::Y, left.1 - sign)];
                spliced.extend(replacement);
                spliced.push((Sym::X, right.1 - 1));
                runs.splice(pos..pos + 2, spliced);
            }
            _ => unreachable!(),
        }
    }

    let mut exps = [0i64; 3];
    for (sym, e) in runs {
        exps[rank(sym)] += e;
    }
    let [mut i, mut j, mut k] = exps;
    k += trailing_z;

    // power relations, tails appended at the end
    let q = i.div_euclid(ex);
    i = i.rem_euclid(ex);
    k += q * tx[0];
    u += q * tx[1];
    v += q * tx[2];
    let q = j.div_euclid(ey);
    j = j.rem_euclid(ey);
    k += q * ty[0];
    u += q * ty[1];
    v += q * ty[2];
    let q = k.div_euclid(ez);
    k = k.rem_euclid(ez);
    u += q * tz[0];
    v += q * tz[1];

    Element([
        i as u64,
        j as u64,
        k as u64,
        u.rem_euclid(eu) as u64,
        v.rem_euclid(ev) as u64,
    ])
}

fn rank(sym: Sym) -> usize {
    match sym {
        Sym::X => 0,
        Sym::Y => 1,
        Sym::Z => 2,
    }
}

/// Merges adjacent runs of one letter (free cancellation) and drops empty
/// runs. `y` runs of opposite sign merge too.
fn merge(runs: &mut Vec<(Sym, i64)>) {
    let mut out: Vec<(Sym, i64)> = Vec::with_capacity(runs.len());
    for &(sym, e) in runs.iter() {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == sym => {
                last.1 += e;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((sym, e)),
        }
    }
    *runs = out;
}
