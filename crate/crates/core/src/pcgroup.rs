//! Normal-form arithmetic in the metabelian groups of class at most three.
//!
//! With `z = [x, y]`, `u = [z, x]`, `v = [z, y]` and `u`, `v` central,
//! collecting `x^{i1} y^{j1} z^{k1} u^{m1} v^{n1} · x^{i2} y^{j2} z^{k2} u^{m2} v^{n2}`
//! into normal form gives
//!
//! ```text
//! i = i1 + i2
//! j = j1 + j2
//! k = k1 + k2 − i2·j1
//! m = m1 + m2 + k1·i2 − j1·C(i2, 2)
//! n = n1 + n2 + k1·j2 − i2·C(j1, 2) − i2·j1·j2
//! ```
//!
//! before the power relations are applied. Commutators follow the
//! convention `[g, h] = g⁻¹ h⁻¹ g h`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::params::PcPresentation;

/// Groups up to this order are checked for associativity on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 1 << 9;

/// Random triples checked on top of the generator test for larger groups.
pub const RANDOM_TRIPLES: usize = 100_000;

/// Exponent vector `[i, j, k, m, n]` of `x^i y^j z^k u^m v^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub [u64; 5]);

impl Element {
    pub const IDENTITY: Element = Element([0; 5]);

    pub fn i(&self) -> u64 {
        self.0[0]
    }
    pub fn j(&self) -> u64 {
        self.0[1]
    }
    pub fn k(&self) -> u64 {
        self.0[2]
    }
    pub fn m(&self) -> u64 {
        self.0[3]
    }
    pub fn n(&self) -> u64 {
        self.0[4]
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [0; 5]
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        let mut first = true;
        for (letter, &e) in ["x", "y", "z", "u", "v"].iter().zip(&self.0) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("·")?;
            }
            first = false;
            if e == 1 {
                f.write_str(letter)?;
            } else {
                write!(f, "{letter}^{e}")?;
            }
        }
        Ok(())
    }
}

/// The five normal-form letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    X,
    Y,
    Z,
    U,
    V,
}

impl Gen {
    pub const ALL: [Gen; 5] = [Gen::X, Gen::Y, Gen::Z, Gen::U, Gen::V];

    pub fn index(self) -> usize {
        self as usize
    }
}

fn binom2(t: i128) -> i128 {
    t * (t - 1) / 2
}

/// Euclidean quotient and remainder, skipping the division in the common
/// in-range cases.
#[inline]
fn reduce(v: i64, e: i64) -> (i64, i64) {
    if (0..e).contains(&v) {
        (0, v)
    } else if (e..2 * e).contains(&v) {
        (1, v - e)
    } else if (-e..0).contains(&v) {
        (-1, v + e)
    } else {
        (v.div_euclid(e), v.rem_euclid(e))
    }
}

impl PcPresentation {
    fn bound(&self, slot: usize) -> i128 {
        self.bounds[slot] as i128
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    /// The normal form of a single letter (the identity when its bound is 1).
    pub fn generator(&self, gen: Gen) -> Element {
        let mut raw = [0i128; 5];
        raw[gen.index()] = 1;
        self.normalize(raw)
    }

    /// `x^i y^j z^k u^m v^n` for arbitrary integer exponents.
    ///
    /// Reduces `i` modulo `e_x` absorbing the quotient times `tail_x` into
    /// `(k, m, n)`, then `j` with `tail_y`, then `k` with `tail_z`, and
    /// finally `m`, `n`. The tails are central and sit strictly lower in the
    /// `(x, y) → z → (u, v)` hierarchy, so one pass suffices.
    pub fn normalize(&self, raw: [i128; 5]) -> Element {
        match raw.map(i64::try_from) {
            [Ok(i), Ok(j), Ok(k), Ok(m), Ok(n)] => match self.normalize_small([i, j, k, m, n]) {
                Some(g) => g,
                None => self.normalize_wide(raw),
            },
            _ => self.normalize_wide(raw),
        }
    }

    fn normalize_small(&self, raw: [i64; 5]) -> Option<Element> {
        let [mut i, mut j, mut k, mut m, mut n] = raw;
        let b = self.bounds.map(|e| e as i64);

        let (q, r) = reduce(i, b[0]);
        i = r;
        if q != 0 {
            k = k.checked_add(q.checked_mul(self.tail_x[0] as i64)?)?;
            m = m.checked_add(q.checked_mul(self.tail_x[1] as i64)?)?;
            n = n.checked_add(q.checked_mul(self.tail_x[2] as i64)?)?;
        }
        let (q, r) = reduce(j, b[1]);
        j = r;
        if q != 0 {
            k = k.checked_add(q.checked_mul(self.tail_y[0] as i64)?)?;
            m = m.checked_add(q.checked_mul(self.tail_y[1] as i64)?)?;
            n = n.checked_add(q.checked_mul(self.tail_y[2] as i64)?)?;
        }
        let (q, r) = reduce(k, b[2]);
        k = r;
        if q != 0 {
            m = m.checked_add(q.checked_mul(self.tail_z[0] as i64)?)?;
            n = n.checked_add(q.checked_mul(self.tail_z[1] as i64)?)?;
        }
        let m = reduce(m, b[3]).1;
        let n = reduce(n, b[4]).1;
        Some(Element([i as u64, j as u64, k as u64, m as u64, n as u64]))
    }

    fn normalize_wide(&self, raw: [i128; 5]) -> Element {
        let [mut i, mut j, mut k, mut m, mut n] = raw;

        let q = i.div_euclid(self.bound(0));
        i = i.rem_euclid(self.bound(0));
        k += q * self.tail_x[0] as i128;
        m += q * self.tail_x[1] as i128;
        n += q * self.tail_x[2] as i128;

        let q = j.div_euclid(self.bound(1));
        j = j.rem_euclid(self.bound(1));
        k += q * self.tail_y[0] as i128;
        m += q * self.tail_y[1] as i128;
        n += q * self.tail_y[2] as i128;

        let q = k.div_euclid(self.bound(2));
        k = k.rem_euclid(self.bound(2));
        m += q * self.tail_z[0] as i128;
        n += q * self.tail_z[1] as i128;

        m = m.rem_euclid(self.bound(3));
        n = n.rem_euclid(self.bound(4));

        Element([i as u64, j as u64, k as u64, m as u64, n as u64])
    }

    /// The raw (unreduced) exponents of `g · h`, or `None` when an
    /// intermediate leaves `i64`.
    fn product_small(g: &Element, h: &Element) -> Option<[i64; 5]> {
        let [i1, j1, k1, m1, n1] = g.0.map(|e| e as i64);
        let [i2, j2, k2, m2, n2] = h.0.map(|e| e as i64);
        let c_i2 = i2 * (i2 - 1) / 2;
        let c_j1 = j1 * (j1 - 1) / 2;
        let k = k1 + k2 - i2.checked_mul(j1)?;
        let m = (m1 + m2)
            .checked_add(k1.checked_mul(i2)?)?
            .checked_sub(j1.checked_mul(c_i2)?)?;
        let n = (n1 + n2)
            .checked_add(k1.checked_mul(j2)?)?
            .checked_sub(i2.checked_mul(c_j1)?)?
            .checked_sub(i2.checked_mul(j1)?.checked_mul(j2)?)?;
        Some([i1 + i2, j1 + j2, k, m, n])
    }

    /// The raw exponents of `g · h` in `i128`.
    fn product_wide(g: &Element, h: &Element) -> [i128; 5] {
        let [i1, j1, k1, m1, n1] = g.0.map(|e| e as i128);
        let [i2, j2, k2, m2, n2] = h.0.map(|e| e as i128);
        [
            i1 + i2,
            j1 + j2,
            k1 + k2 - i2 * j1,
            m1 + m2 + k1 * i2 - j1 * binom2(i2),
            n1 + n2 + k1 * j2 - i2 * binom2(j1) - i2 * j1 * j2,
        ]
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        if let Some(raw) = Self::product_small(g, h) {
            if let Some(result) = self.normalize_small(raw) {
                return result;
            }
        }
        self.normalize_wide(Self::product_wide(g, h))
    }

    /// Solves the product law for the right inverse component by component.
    pub fn inverse(&self, g: &Element) -> Element {
        let [i1, j1, k1, m1, n1] = g.0.map(|e| e as i128);
        let i2 = -i1;
        let j2 = -j1;
        let k2 = i2 * j1 - k1;
        let m2 = -m1 - k1 * i2 + j1 * binom2(i2);
        let n2 = -n1 - k1 * j2 + i2 * binom2(j1) + i2 * j1 * j2;
        self.normalize([i2, j2, k2, m2, n2])
    }

    /// `g^t` by repeated squaring.
    pub fn power(&self, g: &Element, mut t: u64) -> Element {
        let mut acc = Element::IDENTITY;
        let mut base = *g;
        while t > 0 {
            if t & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            t >>= 1;
            if t > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// `g^t` for a signed exponent.
    pub fn power_signed(&self, g: &Element, t: i64) -> Element {
        let pos = self.power(g, t.unsigned_abs());
        if t < 0 {
            self.inverse(&pos)
        } else {
            pos
        }
    }

    /// `[g, h] = g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, g: &Element, h: &Element) -> Element {
        let gi = self.inverse(g);
        let hi = self.inverse(h);
        let left = self.multiply(&gi, &hi);
        let right = self.multiply(g, h);
        self.multiply(&left, &right)
    }

    /// Least power of `p` annihilating `g`.
    pub fn element_order(&self, g: &Element) -> u64 {
        let mut order = 1;
        let mut cur = *g;
        // the exponent of the group is at most p^{n_total}
        for _ in 0..=self.n_total {
            if cur.is_identity() {
                return order;
            }
            cur = self.power(&cur, self.p);
            order *= self.p;
        }
        unreachable!("element order exceeds the group order: presentation is inconsistent")
    }

    /// Position of `g` in the lexicographic enumeration.
    pub fn index_of(&self, g: &Element) -> usize {
        g.0.iter()
            .zip(&self.bounds)
            .fold(0usize, |acc, (&e, &b)| acc * b as usize + e as usize)
    }

    /// The element at position `index` of the lexicographic enumeration.
    pub fn element_at(&self, mut index: usize) -> Element {
        let mut exps = [0u64; 5];
        for slot in (0..5).rev() {
            let b = self.bounds[slot] as usize;
            exps[slot] = (index % b) as u64;
            index /= b;
        }
        Element(exps)
    }

    /// All normal forms in lexicographic order of `[i, j, k, m, n]`.
    ///
    /// Use [`PcPresentation::element_at`] to split the stream into
    /// independent index blocks.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let order = self.order_usize().expect("group order fits in usize");
        (0..order).map(move |idx| self.element_at(idx))
    }

    /// `z^k u^m v^n` evaluated at arbitrary images of `z`, `u`, `v`.
    pub(crate) fn eval_lower(&self, exps: [u64; 3], images: [&Element; 3]) -> Element {
        exps.iter()
            .zip(images)
            .fold(Element::IDENTITY, |acc, (&e, img)| {
                self.multiply(&acc, &self.power(img, e))
            })
    }

    /// The element `z^k u^m v^n` of this presentation.
    pub fn tail_element(&self, exps: [u64; 3]) -> Element {
        self.normalize([0, 0, exps[0] as i128, exps[1] as i128, exps[2] as i128])
    }
}

/// How a consistency check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `(a·b)·c ≠ a·(b·c)`.
    Associativity { triple: [Element; 3] },
    /// A defining relation fails inside the normal-form algebra.
    Relation { relation: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Associativity { triple: [a, b, c] } => {
                write!(f, "associativity fails on ({a}, {b}, {c})")
            }
            Witness::Relation { relation } => write!(f, "relation fails: {relation}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub exhaustive: bool,
    pub witness: Option<Witness>,
}

fn associative(pres: &PcPresentation, a: &Element, b: &Element, c: &Element) -> bool {
    let left = pres.multiply(&pres.multiply(a, b), c);
    let right = pres.multiply(a, &pres.multiply(b, c));
    left == right
}

fn relation_witness(pres: &PcPresentation) -> Option<Witness> {
    let fail = |relation: &str| {
        Some(Witness::Relation {
            relation: relation.to_string(),
        })
    };
    let [x, y, z, u, v] = Gen::ALL.map(|g| pres.generator(g));
    let e = pres.identity();

    for g in pres.elements().take(1).chain([x, y, z, u, v]) {
        if pres.multiply(&g, &pres.inverse(&g)) != e || pres.multiply(&pres.inverse(&g), &g) != e {
            return fail("g·g⁻¹ = e");
        }
    }
    if pres.commutator(&x, &y) != z {
        return fail("[x, y] = z");
    }
    if pres.commutator(&z, &x) != u {
        return fail("[z, x] = u");
    }
    if pres.commutator(&z, &y) != v {
        return fail("[z, y] = v");
    }
    for (name, c) in [("u", &u), ("v", &v)] {
        for (gname, g) in [("x", &x), ("y", &y)] {
            if pres.commutator(g, c) != e {
                return fail(&format!("[{gname}, {name}] = e"));
            }
        }
    }
    let tx = pres.tail_element(pres.tail_x);
    let ty = pres.tail_element(pres.tail_y);
    let tz = pres.tail_element([0, pres.tail_z[0], pres.tail_z[1]]);
    for (name, t) in [("x", &tx), ("y", &ty), ("z", &tz)] {
        if pres.commutator(t, &x) != e || pres.commutator(t, &y) != e {
            return fail(&format!("tail of {name} is central"));
        }
    }
    let [ex, ey, ez, eu, ev] = pres.bounds;
    if pres.power(&x, ex) != tx {
        return fail("x^{e_x} = tail_x");
    }
    if pres.power(&y, ey) != ty {
        return fail("y^{e_y} = tail_y");
    }
    if pres.power(&z, ez) != tz {
        return fail("z^{e_z} = tail_z");
    }
    if pres.power(&u, eu) != e || pres.power(&v, ev) != e {
        return fail("u^{e_u} = v^{e_v} = e");
    }
    None
}

/// Checks that the product law defines a group on the normal forms.
///
/// Groups of order at most [`EXHAUSTIVE_ASSOCIATIVITY_LIMIT`] are checked on
/// every triple. Larger ones use Light's test (`(a·t)·b = a·(t·b)` for every
/// pair `a, b` and every letter `t`, which suffices since the letters
/// generate) plus [`RANDOM_TRIPLES`] seeded random triples. The defining
/// relations, centrality of the tails and the inverse law are checked as
/// well. Records the verdict on the presentation.
pub fn check_consistency(pres: &mut PcPresentation) -> ConsistencyReport {
    let report = consistency_report(pres);
    pres.consistent = Some(report.consistent);
    report
}

fn consistency_report(pres: &PcPresentation) -> ConsistencyReport {
    let order = pres.order_usize().expect("group order fits in usize");
    let exhaustive = order <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT;
    let done = |witness: Option<Witness>| ConsistencyReport {
        consistent: witness.is_none(),
        exhaustive,
        witness,
    };

    if let Some(w) = relation_witness(pres) {
        return done(Some(w));
    }

    let elements: Vec<Element> = pres.elements().collect();
    let failing = if exhaustive {
        elements.par_iter().find_map_any(|a| {
            for b in &elements {
                let ab = pres.multiply(a, b);
                for c in &elements {
                    if pres.multiply(&ab, c) != pres.multiply(a, &pres.multiply(b, c)) {
                        return Some([*a, *b, *c]);
                    }
                }
            }
            None
        })
    } else {
        let letters: Vec<Element> = Gen::ALL
            .iter()
            .filter(|g| pres.bounds[g.index()] > 1)
            .map(|&g| pres.generator(g))
            .collect();
        let light = elements.par_iter().find_map_any(|a| {
            for t in &letters {
                let at = pres.multiply(a, t);
                for b in &elements {
                    if pres.multiply(&at, b) != pres.multiply(a, &pres.multiply(t, b)) {
                        return Some([*a, *t, *b]);
                    }
                }
            }
            None
        });
        light.or_else(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..RANDOM_TRIPLES).find_map(|_| {
                let triple = [0; 3].map(|_| elements[rng.gen_range(0..order)]);
                (!associative(pres, &triple[0], &triple[1], &triple[2])).then_some(triple)
            })
        })
    };
    done(failing.map(|triple| Witness::Associativity { triple }))
}
