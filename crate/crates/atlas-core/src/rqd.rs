//! Torsion growth primes by extension degree.
//!
//! `rq(d)` is the set of primes ℓ such that some elliptic curve defined over ℚ
//! acquires a rational point of order ℓ over some number field of degree d.
//! Membership is decided per prime by `rq_membership`, which reduces the
//! question to divisibility of d by the minimal orbit degrees of the possible
//! mod-ℓ images:
//!
//! * for the primes in [`SPECIAL_PRIMES`] the minimal degrees come from the
//!   computed degree atlas ([`crate::degrees::minimal_divisor_set`]);
//! * for every other prime the mod-ℓ image of a non-CM curve is all of
//!   GL₂(F_ℓ) (so degree ℓ²−1, never minimal), and CM curves contribute one of
//!   three shapes depending on splitting behaviour, classified by quadratic
//!   residues of the class-number-one discriminants.
//!
//! A second, independent implementation (`rq_membership_by_rules`) hardcodes
//! the per-prime divisor rules instead of reading the atlas; the two are kept
//! in agreement by tests.
//!
//! For a thin set of primes (ℓ ≡ 8 mod 9 with all tested discriminants inert)
//! the degree (ℓ²−1)/3 is attainable only if a nonsplit-normalizer image that
//! no known curve realizes actually occurs; membership at such degrees is
//! reported as [`Membership3::Unknown`] unless the caller assumes the
//! surjectivity conjecture for non-CM curves.

use std::collections::BTreeSet;
use std::sync::Mutex;

use num::integer::gcd;
use num::rational::Ratio;
use once_cell::sync::{Lazy, OnceCell};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::catalog::{is_prime, legendre, CM_RESIDUE_TEST_DISCS};
use crate::error::AlgebraError;

type Result<T> = std::result::Result<T, AlgebraError>;

/// Primes whose possible mod-ℓ images are richer than the generic
/// CM-plus-surjective picture. Their minimal growth degrees are read off the
/// degree atlas rather than from a closed-form rule.
pub const SPECIAL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 37, 43, 67, 163];

/// Three-valued membership: growth at this degree may be conditional on the
/// surjectivity conjecture for non-CM curves. Variants are ordered so that
/// membership is monotone under passing to multiples of the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Membership3 {
    NonMember,
    Unknown,
    Member,
}

fn from_bool(b: bool) -> Membership3 {
    if b {
        Membership3::Member
    } else {
        Membership3::NonMember
    }
}

/// Growth behaviour of a prime outside [`SPECIAL_PRIMES`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GeneralClass {
    /// Minimal growth degree 2(p−1): p ≡ 1 mod 3, or some tested CM
    /// discriminant splits at p, putting a split-Cartan-normalizer image on
    /// a CM curve.
    Split,
    /// Minimal growth degree (p²−1)/3, realized by the j = 0 curve
    /// (p ≡ 2, 5 mod 9 and every tested discriminant inert).
    ThirdNormalizer,
    /// Unconditional minimum p²−1; the degree (p²−1)/3 would require an
    /// index-3 subgroup of the nonsplit Cartan normalizer as a non-CM image,
    /// which the surjectivity conjecture rules out (p ≡ 8 mod 9, every
    /// tested discriminant inert).
    Ambiguous,
}

static CLASS_CACHE: Lazy<Mutex<FxHashMap<u64, GeneralClass>>> =
    Lazy::new(|| Mutex::new(FxHashMap::default()));

fn classify_general(p: u64) -> Result<GeneralClass> {
    debug_assert!(is_prime(p) && !SPECIAL_PRIMES.contains(&p));
    if let Some(&c) = CLASS_CACHE.lock().unwrap().get(&p) {
        return Ok(c);
    }
    let p32 = u32::try_from(p).map_err(|_| {
        AlgebraError::Precondition(format!("prime {p} too large for residue classification"))
    })?;
    let class = if p % 3 == 1 {
        GeneralClass::Split
    } else if CM_RESIDUE_TEST_DISCS
        .iter()
        .any(|&disc| legendre(-i64::from(disc), p32) == 1)
    {
        GeneralClass::Split
    } else if p % 9 == 8 {
        GeneralClass::Ambiguous
    } else {
        GeneralClass::ThirdNormalizer
    };
    CLASS_CACHE.lock().unwrap().insert(p, class);
    Ok(class)
}

fn general_membership(p: u64, d: u64, assume_surjectivity: bool) -> Result<Membership3> {
    Ok(match classify_general(p)? {
        GeneralClass::Split => from_bool(d % (2 * (p - 1)) == 0),
        GeneralClass::ThirdNormalizer => {
            let third = (p * p - 1) / 3;
            from_bool(d % third == 0)
        }
        GeneralClass::Ambiguous => {
            let full = p * p - 1;
            if d % full == 0 {
                Membership3::Member
            } else if !assume_surjectivity && d % (full / 3) == 0 {
                Membership3::Unknown
            } else {
                Membership3::NonMember
            }
        }
    })
}

/// Divisibility-minimal growth degrees for each special prime, computed once
/// from the degree atlas.
static SPECIAL_DIVISORS: OnceCell<FxHashMap<u64, BTreeSet<u64>>> = OnceCell::new();

fn special_divisors() -> Result<&'static FxHashMap<u64, BTreeSet<u64>>> {
    SPECIAL_DIVISORS.get_or_try_init(|| {
        let mut map = FxHashMap::default();
        for &p in &SPECIAL_PRIMES {
            map.insert(p, crate::degrees::minimal_divisor_set(p as u32)?);
        }
        Ok(map)
    })
}

fn check_args(p: u64, d: u64) -> Result<()> {
    if d == 0 {
        return Err(AlgebraError::Precondition("degree must be positive".into()));
    }
    if !is_prime(p) {
        return Err(AlgebraError::Precondition(format!(
            "growth membership is defined for primes, got {p}"
        )));
    }
    Ok(())
}

/// Does some elliptic curve over ℚ gain a point of order p in some degree-d
/// number field? Special primes are decided against the computed degree
/// atlas; all other primes by residue classification.
pub fn rq_membership(p: u64, d: u64, assume_surjectivity: bool) -> Result<Membership3> {
    check_args(p, d)?;
    if SPECIAL_PRIMES.contains(&p) {
        let divs = &special_divisors()?[&p];
        Ok(from_bool(divs.iter().any(|&v| d % v == 0)))
    } else {
        general_membership(p, d, assume_surjectivity)
    }
}

/// Same question as [`rq_membership`], answered from hardcoded divisor rules
/// instead of the degree atlas. Kept as an independent cross-check.
pub fn rq_membership_by_rules(p: u64, d: u64, assume_surjectivity: bool) -> Result<Membership3> {
    check_args(p, d)?;
    Ok(match p {
        2 | 3 | 5 | 7 => Membership3::Member,
        11 => from_bool(d % 5 == 0),
        13 => from_bool(d % 3 == 0 || d % 4 == 0),
        17 => from_bool(d % 8 == 0),
        37 => from_bool(d % 12 == 0),
        19 | 43 | 67 | 163 => from_bool(d % ((p - 1) / 2) == 0),
        _ => general_membership(p, d, assume_surjectivity)?,
    })
}

/// A set of growth primes, split into certain members and primes whose
/// membership depends on the surjectivity conjecture.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GrowthSet {
    pub members: BTreeSet<u64>,
    pub unknown: BTreeSet<u64>,
}

static PRIME_CACHE: Lazy<Mutex<(u64, Vec<u64>)>> = Lazy::new(|| Mutex::new((0, Vec::new())));

/// All primes ≤ n, from a cached sieve that grows on demand.
fn primes_up_to(n: u64) -> Vec<u64> {
    let mut cache = PRIME_CACHE.lock().unwrap();
    if cache.0 < n {
        let bound = n.max(2 * cache.0).max(256) as usize;
        let mut composite = vec![false; bound + 1];
        let mut primes = Vec::new();
        for q in 2..=bound {
            if !composite[q] {
                primes.push(q as u64);
                for multiple in (q * q..=bound).step_by(q) {
                    composite[multiple] = true;
                }
            }
        }
        *cache = (bound as u64, primes);
    }
    cache.1.iter().take_while(|&&p| p <= n).copied().collect()
}

fn insert(out: &mut GrowthSet, p: u64, m: Membership3) {
    match m {
        Membership3::Member => {
            out.members.insert(p);
        }
        Membership3::Unknown => {
            out.unknown.insert(p);
        }
        Membership3::NonMember => {}
    }
}

/// All primes with torsion growth in degree d. The special primes are always
/// tested; a general prime p needs a growth degree ≥ 2(p−1), so the scan can
/// stop at 2d+1.
pub fn rq(d: u64, assume_surjectivity: bool) -> Result<GrowthSet> {
    if d == 0 {
        return Err(AlgebraError::Precondition("degree must be positive".into()));
    }
    let mut out = GrowthSet::default();
    for &p in &SPECIAL_PRIMES {
        insert(&mut out, p, rq_membership(p, d, assume_surjectivity)?);
    }
    for p in primes_up_to(2 * d + 1) {
        if SPECIAL_PRIMES.contains(&p) {
            continue;
        }
        insert(&mut out, p, general_membership(p, d, assume_surjectivity)?);
    }
    Ok(out)
}

/// Primes with growth in degree d but in no proper divisor of d (the degrees
/// where a prime can appear for the first time are closed under divisors, so
/// this marks genuinely new growth).
pub fn rq_star(d: u64, assume_surjectivity: bool) -> Result<GrowthSet> {
    let mut cur = rq(d, assume_surjectivity)?;
    for e in 1..d {
        if d % e != 0 {
            continue;
        }
        let prev = rq(e, assume_surjectivity)?;
        for p in prev.members {
            cur.members.remove(&p);
            cur.unknown.remove(&p);
        }
        for p in prev.unknown {
            cur.unknown.remove(&p);
        }
    }
    Ok(cur)
}

/// Primes with growth in some degree ≤ d.
pub fn sq(d: u64, assume_surjectivity: bool) -> Result<GrowthSet> {
    let mut acc = GrowthSet::default();
    for e in 1..=d {
        let r = rq(e, assume_surjectivity)?;
        acc.members.extend(r.members);
        acc.unknown.extend(r.unknown);
    }
    let members = acc.members.clone();
    acc.unknown.retain(|p| !members.contains(p));
    Ok(acc)
}

/// Primes first reaching [`sq`] at degree exactly d.
pub fn sq_star(d: u64, assume_surjectivity: bool) -> Result<GrowthSet> {
    let cur = sq(d, assume_surjectivity)?;
    if d == 1 {
        return Ok(cur);
    }
    let prev = sq(d - 1, assume_surjectivity)?;
    Ok(GrowthSet {
        members: cur.members.difference(&prev.members).copied().collect(),
        unknown: cur.unknown.difference(&prev.unknown).copied().collect(),
    })
}

/// Smallest prime classified [`GeneralClass::Ambiguous`]: p ≡ 8 mod 9 with
/// every tested CM discriminant inert, so conditional and unconditional
/// growth degrees first differ at p.
pub fn scan_smallest_exceptional_prime() -> u64 {
    let mut p = 23;
    loop {
        if is_prime(p)
            && !SPECIAL_PRIMES.contains(&p)
            && matches!(classify_general(p), Ok(GeneralClass::Ambiguous))
        {
            return p;
        }
        p += 2;
    }
}

/// Smallest degree whose growth-prime set depends on the surjectivity
/// conjecture. Only ambiguous primes p contribute unknowns, first at degree
/// (p²−1)/3, and that threshold is increasing in p, so the smallest ambiguous
/// prime decides.
pub fn first_ambiguous_degree() -> u64 {
    let p = scan_smallest_exceptional_prime();
    (p * p - 1) / 3
}

/// Natural density of ambiguous primes, counting each congruence condition
/// independently: one class mod 9 out of φ(9) = 6, and an inertness
/// condition of density 1/2 per tested discriminant.
pub fn exceptional_prime_density() -> Ratio<u64> {
    let mut density = Ratio::new(1, 6);
    for _ in CM_RESIDUE_TEST_DISCS {
        density *= Ratio::new(1, 2);
    }
    density
}

/// Natural density of degrees d with rq(d) = {2, 3, 5, 7}: every special
/// prime needs a divisor sharing a factor with 210 = 2·3·5·7, and every
/// general prime needs an even divisor, so exactly the d coprime to 210 show
/// no growth beyond the four primes present in every degree.
pub fn no_growth_density() -> Ratio<u64> {
    let modulus = 210u64;
    let phi = (1..=modulus).filter(|&k| gcd(k, modulus) == 1).count() as u64;
    Ratio::new(phi, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(d: u64) -> BTreeSet<u64> {
        let r = rq(d, false).unwrap();
        assert!(r.unknown.is_empty(), "unexpected unknowns at degree {d}");
        r.members
    }

    #[test]
    fn growth_sets_for_small_degrees() {
        let base: BTreeSet<u64> = [2, 3, 5, 7].into();
        assert_eq!(members(1), base);
        assert_eq!(members(2), base);
        let with = |extra: &[u64]| {
            let mut s = base.clone();
            s.extend(extra);
            s
        };
        assert_eq!(members(3), with(&[13]));
        assert_eq!(members(4), with(&[13]));
        assert_eq!(members(5), with(&[11]));
        assert_eq!(members(6), with(&[13]));
        assert_eq!(members(8), with(&[13, 17]));
        assert_eq!(members(9), with(&[13, 19]));
        assert_eq!(members(12), with(&[13, 37]));
        assert_eq!(members(16), with(&[13, 17]));
        assert_eq!(members(20), with(&[11, 13]));
    }

    #[test]
    fn new_prime_table_matches_published_range() {
        let expected: FxHashMap<u64, &[u64]> = [
            (1, [2, 3, 5, 7].as_slice()),
            (3, &[13]),
            (4, &[13]),
            (5, &[11]),
            (8, &[17]),
            (9, &[19]),
            (12, &[37]),
            (21, &[43]),
            (33, &[67]),
            (44, &[23]),
            (56, &[29]),
            (60, &[31]),
            (80, &[41]),
            (81, &[163]),
            (92, &[47]),
        ]
        .into_iter()
        .collect();
        for d in 1..=100 {
            let star = rq_star(d, false).unwrap();
            assert!(star.unknown.is_empty(), "unknowns at degree {d}");
            let want: BTreeSet<u64> = expected
                .get(&d)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            assert_eq!(star.members, want, "new growth primes at degree {d}");
        }
    }

    #[test]
    fn cumulative_new_primes_up_to_42() {
        let expected: FxHashMap<u64, &[u64]> = [
            (1, [2, 3, 5, 7].as_slice()),
            (3, &[13]),
            (5, &[11]),
            (8, &[17]),
            (9, &[19]),
            (12, &[37]),
            (21, &[43]),
            (33, &[67]),
        ]
        .into_iter()
        .collect();
        for d in 1..=42 {
            let star = sq_star(d, false).unwrap();
            assert!(star.unknown.is_empty(), "unknowns at degree {d}");
            let want: BTreeSet<u64> = expected
                .get(&d)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            assert_eq!(star.members, want, "cumulative new primes at degree {d}");
        }
    }

    #[test]
    fn atlas_route_matches_rule_route() {
        for p in primes_up_to(300) {
            for d in 1..=240 {
                for assume in [false, true] {
                    assert_eq!(
                        rq_membership(p, d, assume).unwrap(),
                        rq_membership_by_rules(p, d, assume).unwrap(),
                        "routes disagree at p={p}, d={d}, assume={assume}"
                    );
                }
            }
        }
    }

    #[test]
    fn smallest_ambiguous_prime_and_degree() {
        let p = scan_smallest_exceptional_prime();
        assert_eq!(p, 3167);
        assert_eq!(p % 9, 8);
        for &disc in &CM_RESIDUE_TEST_DISCS {
            assert_eq!(legendre(-i64::from(disc), p as u32), -1);
        }
        let d = first_ambiguous_degree();
        assert_eq!(d, 3_343_296);
        assert_eq!(d, (p * p - 1) / 3);
        assert_eq!(rq_membership(p, d, false).unwrap(), Membership3::Unknown);
        assert_eq!(rq_membership(p, d, true).unwrap(), Membership3::NonMember);
        assert_eq!(rq_membership(p, 3 * d, false).unwrap(), Membership3::Member);
        assert_eq!(rq_membership(p, 3 * d, true).unwrap(), Membership3::Member);
        assert_eq!(rq_membership(p, d - 1, false).unwrap(), Membership3::NonMember);
    }

    #[test]
    fn membership_is_monotone_under_multiples() {
        for p in primes_up_to(200) {
            for d in 1..=60 {
                for k in 2..=4 {
                    let at_d = rq_membership(p, d, false).unwrap();
                    let at_kd = rq_membership(p, k * d, false).unwrap();
                    assert!(at_d <= at_kd, "p={p}, d={d}, k={k}");
                }
            }
        }
    }

    #[test]
    fn densities() {
        assert_eq!(exceptional_prime_density(), Ratio::new(1, 1536));
        assert_eq!(no_growth_density(), Ratio::new(8, 35));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(rq_membership(10, 4, false).is_err());
        assert!(rq_membership(11, 0, false).is_err());
        assert!(rq(0, false).is_err());
    }
}
