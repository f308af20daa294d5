//! Group families, parameter validation, Hall's bound and the
//! power-commutator data that drives the normal-form engine.
//!
//! Every group handled by this crate is generated by `x` and `y` with
//! `z = [x, y]`, `u = [z, x]` and `v = [z, y]`; the families below differ
//! only in the exponents of these five letters and in the central "tails"
//! that the top powers of `x`, `y` and `z` are equal to.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest value any normal-form exponent bound times `p` may reach.
///
/// Keeps every intermediate of the product law well inside `i128`.
pub const EXPONENT_LIMIT: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("family {family} requires parameter `{name}`")]
    MissingParameter { family: Family, name: &'static str },
    #[error("family {family} does not take parameter `{name}`")]
    UnexpectedParameter { family: Family, name: &'static str },
    #[error("parameter `{name}` must be positive")]
    NonPositive { name: &'static str },
    #[error("{0}")]
    ConditionViolated(String),
    #[error("exponent bounds exceed the supported range (p^(e+1) must not exceed 2^31)")]
    TooLarge,
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

/// The catalog of group families.
///
/// `Class2*` follow the classification of maximally automorphic groups of
/// class two, `Class3*` the six families of class three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "abelian-homocyclic")]
    AbelianHomocyclic,
    #[serde(rename = "class2-i")]
    Class2I,
    #[serde(rename = "class2-ii")]
    Class2II,
    #[serde(rename = "class2-iii")]
    Class2III,
    #[serde(rename = "class3-i")]
    Class3I,
    #[serde(rename = "class3-ii")]
    Class3II,
    #[serde(rename = "class3-iii")]
    Class3III,
    #[serde(rename = "class3-iv")]
    Class3IV,
    #[serde(rename = "class3-v")]
    Class3V,
    #[serde(rename = "class3-vi")]
    Class3VI,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::AbelianHomocyclic,
        Family::Class2I,
        Family::Class2II,
        Family::Class2III,
        Family::Class3I,
        Family::Class3II,
        Family::Class3III,
        Family::Class3IV,
        Family::Class3V,
        Family::Class3VI,
    ];

    pub const CLASS_THREE: [Family; 6] = [
        Family::Class3I,
        Family::Class3II,
        Family::Class3III,
        Family::Class3IV,
        Family::Class3V,
        Family::Class3VI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AbelianHomocyclic => "abelian-homocyclic",
            Family::Class2I => "class2-i",
            Family::Class2II => "class2-ii",
            Family::Class2III => "class2-iii",
            Family::Class3I => "class3-i",
            Family::Class3II => "class3-ii",
            Family::Class3III => "class3-iii",
            Family::Class3IV => "class3-iv",
            Family::Class3V => "class3-v",
            Family::Class3VI => "class3-vi",
        }
    }

    /// Nilpotency class of the groups in the family.
    pub fn class(self) -> u32 {
        match self {
            Family::AbelianHomocyclic => 1,
            Family::Class2I | Family::Class2II | Family::Class2III => 2,
            _ => 3,
        }
    }

    pub fn uses_b(self) -> bool {
        matches!(
            self,
            Family::Class2I
                | Family::Class2II
                | Family::Class3I
                | Family::Class3II
                | Family::Class3III
                | Family::Class3IV
        )
    }

    pub fn uses_c(self) -> bool {
        self.class() == 3
    }

    /// Families whose presentation is written over the prime 2.
    fn requires_two(self) -> bool {
        matches!(
            self,
            Family::Class2III | Family::Class3IV | Family::Class3V | Family::Class3VI
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ParamsError::UnknownFamily(s.to_string()))
    }
}

/// A validated parameter tuple naming one group of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub family: Family,
    pub p: u64,
    pub a: u32,
    pub b: Option<u32>,
    pub c: Option<u32>,
    pub strict: bool,
}

impl GroupParams {
    /// `b`, panicking if the family does not use it.
    pub fn b(&self) -> u32 {
        self.b.expect("family uses b")
    }

    pub fn c(&self) -> u32 {
        self.c.expect("family uses c")
    }

    pub fn class(&self) -> u32 {
        self.family.class()
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} p={} a={}", self.family, self.p, self.a)?;
        if let Some(b) = self.b {
            write!(f, " b={b}")?;
        }
        if let Some(c) = self.c {
            write!(f, " c={c}")?;
        }
        if !self.strict {
            f.write_str(" (permissive)")?;
        }
        Ok(())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn violated(msg: impl Into<String>) -> ParamsError {
    ParamsError::ConditionViolated(msg.into())
}

/// Checks a parameter tuple against its family.
///
/// In strict mode the numeric side-condition of the family is enforced as
/// printed in the classification. Permissive mode only enforces primality,
/// positivity and what is needed for the presentation to be written down
/// at all (base 2 for the 2-adic families, `a >= 2` where `2^(a-2)` occurs);
/// it exists to build negative-test groups.
pub fn validate_params(
    family: Family,
    p: u64,
    a: u32,
    b: Option<u32>,
    c: Option<u32>,
    strict: bool,
) -> Result<GroupParams, ParamsError> {
    if !is_prime(p) {
        return Err(ParamsError::NotPrime(p));
    }
    let b = match (family.uses_b(), b) {
        (true, None) => return Err(ParamsError::MissingParameter { family, name: "b" }),
        (false, Some(_)) => return Err(ParamsError::UnexpectedParameter { family, name: "b" }),
        (_, b) => b,
    };
    let c = match (family.uses_c(), c) {
        (true, None) => return Err(ParamsError::MissingParameter { family, name: "c" }),
        (false, Some(_)) => return Err(ParamsError::UnexpectedParameter { family, name: "c" }),
        (_, c) => c,
    };
    if a == 0 {
        return Err(ParamsError::NonPositive { name: "a" });
    }
    if b == Some(0) {
        return Err(ParamsError::NonPositive { name: "b" });
    }
    if c == Some(0) {
        return Err(ParamsError::NonPositive { name: "c" });
    }

    if family.requires_two() && p != 2 {
        return Err(violated(format!("{family} requires p = 2")));
    }
    if matches!(
        family,
        Family::Class2III | Family::Class3V | Family::Class3VI
    ) && a < 2
    {
        return Err(violated(format!("{family} requires a ≥ 2")));
    }

    if strict {
        check_side_condition(family, p, a, b, c)?;
    }

    let top = a.max(b.unwrap_or(0)).max(c.unwrap_or(0)) + 1;
    match p.checked_pow(top) {
        Some(v) if v <= EXPONENT_LIMIT => {}
        _ => return Err(ParamsError::TooLarge),
    }

    Ok(GroupParams {
        family,
        p,
        a,
        b,
        c,
        strict,
    })
}

fn check_side_condition(
    family: Family,
    p: u64,
    a: u32,
    b: Option<u32>,
    c: Option<u32>,
) -> Result<(), ParamsError> {
    let (b, c) = (b.unwrap_or(0), c.unwrap_or(0));
    match family {
        Family::AbelianHomocyclic => Ok(()),
        Family::Class2I => {
            if p == 2 {
                Err(violated("class2-i requires p odd"))
            } else if b > a {
                Err(violated("class2-i requires b ≤ a"))
            } else {
                Ok(())
            }
        }
        Family::Class2II => {
            if p != 2 {
                Err(violated("class2-ii requires p = 2"))
            } else if b + 1 > a {
                Err(violated("class2-ii requires b ≤ a−1"))
            } else {
                Ok(())
            }
        }
        // p = 2 and a >= 2 were checked by the caller
        Family::Class2III => Ok(()),
        Family::Class3I => {
            if p != 3 {
                return Err(violated("class3-i requires p = 3"));
            }
            let first = c < b && b == a;
            let second = c <= b && b < a;
            if first || second {
                Ok(())
            } else {
                Err(violated("class3-i requires c < b = a or c ≤ b ≤ a−1"))
            }
        }
        Family::Class3II => {
            if p <= 3 {
                Err(violated("class3-ii requires p > 3"))
            } else if !(c <= b && b <= a) {
                Err(violated("class3-ii requires c ≤ b ≤ a"))
            } else {
                Ok(())
            }
        }
        Family::Class3III | Family::Class3IV => {
            if c > b {
                Err(violated(format!("{family} requires c ≤ b")))
            } else if b + 1 > a {
                Err(violated(format!("{family} requires b ≤ a−1")))
            } else {
                Ok(())
            }
        }
        Family::Class3V | Family::Class3VI => {
            if c + 2 > a {
                Err(violated(format!("{family} requires c ≤ a−2")))
            } else {
                Ok(())
            }
        }
    }
}

/// Hall's bound `p^(d(n-d)) · ∏_{t<d} (p^d − p^t)` on the order of the
/// automorphism group of a `d`-generator group of order `p^n`.
pub fn hall_bound(p: u64, n: u32, d: u32) -> Result<BigUint, ParamsError> {
    if d == 0 || n < d {
        return Err(ParamsError::InvalidArgs(format!(
            "hall bound needs n ≥ d ≥ 1, got n={n}, d={d}"
        )));
    }
    let p = BigUint::from(p);
    let pd = p.pow(d);
    let mut bound = p.pow(d * (n - d));
    for t in 0..d {
        bound *= &pd - p.pow(t);
    }
    Ok(bound)
}

/// Order of `GL(d, p)`.
pub fn general_linear_order(p: u64, d: u32) -> BigUint {
    let p = BigUint::from(p);
    let pd = p.pow(d);
    (0..d).fold(BigUint::one(), |acc, t| acc * (&pd - p.pow(t)))
}

/// Power-commutator data for one group.
///
/// Normal forms are `x^i y^j z^k u^m v^n` with each exponent below the
/// matching entry of `bounds`. The tails give `x^{e_x}` and `y^{e_y}` as
/// `(k, m, n)` over `(z, u, v)` and `z^{e_z}` as `(m, n)` over `(u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcPresentation {
    pub p: u64,
    pub bounds: [u64; 5],
    pub tail_x: [u64; 3],
    pub tail_y: [u64; 3],
    pub tail_z: [u64; 2],
    pub n_total: u32,
    #[serde(skip)]
    pub(crate) consistent: Option<bool>,
}

impl PcPresentation {
    /// Builds a presentation from raw data, checking that every bound is a
    /// power of `p` within range and that tails lie inside their bounds.
    pub fn new(
        p: u64,
        bounds: [u64; 5],
        tail_x: [u64; 3],
        tail_y: [u64; 3],
        tail_z: [u64; 2],
    ) -> Result<Self, ParamsError> {
        if !is_prime(p) {
            return Err(ParamsError::NotPrime(p));
        }
        let mut n_total = 0;
        for &e in &bounds {
            let t = p_log(p, e).ok_or_else(|| {
                ParamsError::InvalidArgs(format!("bound {e} is not a power of {p}"))
            })?;
            match e.checked_mul(p) {
                Some(v) if v <= EXPONENT_LIMIT => {}
                _ => return Err(ParamsError::TooLarge),
            }
            n_total += t;
        }
        let inside = tail_x.iter().zip(&bounds[2..]).all(|(t, e)| t < e)
            && tail_y.iter().zip(&bounds[2..]).all(|(t, e)| t < e)
            && tail_z.iter().zip(&bounds[3..]).all(|(t, e)| t < e);
        if !inside {
            return Err(ParamsError::InvalidArgs("tail outside its bounds".into()));
        }
        Ok(PcPresentation {
            p,
            bounds,
            tail_x,
            tail_y,
            tail_z,
            n_total,
            consistent: None,
        })
    }

    /// Group order as a machine integer (always below `2^155`, but every
    /// group this crate can enumerate fits comfortably).
    pub fn order(&self) -> BigUint {
        self.bounds.iter().map(|&e| BigUint::from(e)).product()
    }

    /// Order as `usize`, if it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.bounds
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(usize::try_from(e).ok()?))
    }

    /// Result of the last consistency check, if one has run.
    pub fn consistent(&self) -> Option<bool> {
        self.consistent
    }

    /// Drops `u` and `v`: the presentation of the quotient by `⟨u, v⟩`.
    pub fn truncate_class_two(&self) -> PcPresentation {
        let [ex, ey, ez, _, _] = self.bounds;
        PcPresentation::new(
            self.p,
            [ex, ey, ez, 1, 1],
            [self.tail_x[0], 0, 0],
            [self.tail_y[0], 0, 0],
            [0, 0],
        )
        .expect("truncation of a valid presentation is valid")
    }
}

/// `log_p(e)` when `e` is a power of `p`.
pub(crate) fn p_log(p: u64, mut e: u64) -> Option<u32> {
    if e == 0 {
        return None;
    }
    let mut t = 0;
    while e.is_multiple_of(p) {
        e /= p;
        t += 1;
    }
    (e == 1).then_some(t)
}

/// Presentation of the group named by `params`.
pub fn build_presentation(params: &GroupParams) -> PcPresentation {
    let p = params.p;
    let pa = p.pow(params.a);
    let pw = |e: u32| p.pow(e);
    let (bounds, tail_x, tail_y) = match params.family {
        Family::AbelianHomocyclic => ([pa, pa, 1, 1, 1], [0; 3], [0; 3]),
        Family::Class2I | Family::Class2II => ([pa, pa, pw(params.b()), 1, 1], [0; 3], [0; 3]),
        Family::Class2III => {
            let half = pw(params.a - 1);
            let quarter = pw(params.a - 2);
            ([half, half, half, 1, 1], [quarter, 0, 0], [quarter, 0, 0])
        }
        Family::Class3I | Family::Class3II | Family::Class3III => {
            let pc = pw(params.c());
            ([pa, pa, pw(params.b()), pc, pc], [0; 3], [0; 3])
        }
        Family::Class3IV => {
            let pc = pw(params.c());
            let hc = pw(params.c() - 1);
            ([pa, pa, pw(params.b()), pc, pc], [0, hc, 0], [0, 0, hc])
        }
        Family::Class3V | Family::Class3VI => {
            let half = pw(params.a - 1);
            let quarter = pw(params.a - 2);
            let pc = pw(params.c());
            let hc = if params.family == Family::Class3VI {
                pw(params.c() - 1)
            } else {
                0
            };
            (
                [half, half, half, pc, pc],
                [quarter, hc, 0],
                [quarter, 0, hc],
            )
        }
    };
    PcPresentation::new(p, bounds, tail_x, tail_y, [0, 0])
        .expect("validated parameters give a valid presentation")
}

/// Group order read off the presentation bounds.
pub fn expected_order(params: &GroupParams) -> BigUint {
    build_presentation(params).order()
}

/// Exponent `n` with `|G| = p^n` according to the closed forms of the
/// classification (used to cross-check `expected_order`).
pub fn closed_form_order_exponent(params: &GroupParams) -> u32 {
    let a = params.a;
    match params.family {
        Family::AbelianHomocyclic => 2 * a,
        Family::Class2I | Family::Class2II => 2 * a + params.b(),
        Family::Class2III => 3 * a - 3,
        Family::Class3V | Family::Class3VI => 3 * a + 2 * params.c() - 3,
        _ => 2 * (a + params.c()) + params.b(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_examples() {
        assert!(validate_params(Family::Class3II, 5, 1, Some(1), Some(1), true).is_ok());
        assert!(matches!(
            validate_params(Family::Class3I, 3, 1, Some(1), Some(1), true),
            Err(ParamsError::ConditionViolated(_))
        ));
        assert!(matches!(
            validate_params(Family::Class2II, 2, 1, Some(1), None, true),
            Err(ParamsError::ConditionViolated(_))
        ));
        assert!(validate_params(Family::Class2II, 2, 1, Some(1), None, false).is_ok());
    }

    #[test]
    fn class3_i_branches() {
        // c < b = a
        assert!(validate_params(Family::Class3I, 3, 2, Some(2), Some(1), true).is_ok());
        // c ≤ b ≤ a−1
        assert!(validate_params(Family::Class3I, 3, 2, Some(1), Some(1), true).is_ok());
        // c = b = a fails both branches
        assert!(validate_params(Family::Class3I, 3, 2, Some(2), Some(2), true).is_err());
    }

    #[test]
    fn named_errors() {
        assert_eq!(
            validate_params(Family::Class3II, 4, 1, Some(1), Some(1), true),
            Err(ParamsError::NotPrime(4))
        );
        assert_eq!(
            validate_params(Family::Class3II, 5, 1, None, Some(1), true),
            Err(ParamsError::MissingParameter {
                family: Family::Class3II,
                name: "b"
            })
        );
        assert_eq!(
            validate_params(Family::AbelianHomocyclic, 5, 0, None, None, false),
            Err(ParamsError::NonPositive { name: "a" })
        );
        assert_eq!(
            validate_params(Family::Class3III, 2, 2, Some(2), Some(1), true),
            Err(ParamsError::ConditionViolated(
                "class3-iii requires b ≤ a−1".into()
            ))
        );
        assert_eq!(
            validate_params(Family::AbelianHomocyclic, 2, 31, None, None, false),
            Err(ParamsError::TooLarge)
        );
    }

    #[test]
    fn hall_bound_values() {
        assert_eq!(hall_bound(2, 3, 2).unwrap(), BigUint::from(24u32));
        assert_eq!(hall_bound(3, 7, 2).unwrap(), BigUint::from(2_834_352u32));
        assert_eq!(hall_bound(5, 2, 2).unwrap(), general_linear_order(5, 2));
        assert!(hall_bound(3, 1, 2).is_err());
    }

    #[test]
    fn presentations() {
        let vi = validate_params(Family::Class3VI, 2, 3, None, Some(1), true).unwrap();
        let pres = build_presentation(&vi);
        assert_eq!(pres.bounds, [4, 4, 4, 2, 2]);
        assert_eq!(pres.tail_x, [2, 1, 0]);
        assert_eq!(pres.tail_y, [2, 0, 1]);

        let q8 = validate_params(Family::Class2III, 2, 2, None, None, true).unwrap();
        let pres = build_presentation(&q8);
        assert_eq!(pres.bounds, [2, 2, 2, 1, 1]);
        assert_eq!(pres.tail_x, [1, 0, 0]);
        assert_eq!(pres.tail_y, [1, 0, 0]);
        assert_eq!(pres.n_total, 3);

        let ab = validate_params(Family::AbelianHomocyclic, 7, 1, None, None, true).unwrap();
        let pres = build_presentation(&ab);
        assert_eq!(pres.bounds, [7, 7, 1, 1, 1]);
        assert_eq!(pres.tail_x, [0; 3]);
    }

    #[test]
    fn orders() {
        let iii = validate_params(Family::Class3III, 2, 2, Some(1), Some(1), true).unwrap();
        assert_eq!(expected_order(&iii), BigUint::from(128u32));
        let v = validate_params(Family::Class3V, 2, 3, None, Some(1), true).unwrap();
        assert_eq!(expected_order(&v), BigUint::from(256u32));
    }

    #[test]
    fn json_shapes() {
        let params = validate_params(Family::Class2III, 2, 2, None, None, true).unwrap();
        assert_eq!(
            serde_json::to_string(&params).unwrap(),
            r#"{"family":"class2-iii","p":2,"a":2,"b":null,"c":null,"strict":true}"#
        );
        let pres = build_presentation(&params);
        assert_eq!(
            serde_json::to_string(&pres).unwrap(),
            r#"{"p":2,"bounds":[2,2,2,1,1],"tail_x":[1,0,0],"tail_y":[1,0,0],"tail_z":[0,0],"n_total":3}"#
        );
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("class4-i".parse::<Family>().is_err());
    }
}
