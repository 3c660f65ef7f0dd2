//! Named subgroup families of GL₂(F_p) and the possible mod-p image lists
//! for elliptic curves over ℚ.
//!
//! The group families ([`GroupName`]) are built as explicit element sets
//! from their defining formulas, with generator sets small enough that
//! orbit computations never need the full group materialized:
//!
//! - `Cs`, `CsPlus`: the split Cartan {diag(a, b)} and its normalizer
//!   (adjoin the swap T = [[0,1],[1,0]]);
//! - `Cns`, `CnsPlus`: the nonsplit Cartan {[[a, bε],[b, a]]} for a fixed
//!   non-residue ε (see [`epsilon_for`]) and its normalizer (adjoin
//!   J = [[1,0],[0,−1]]);
//! - `G0`: cubes inside the nonsplit Cartan together with their J-translates,
//!   defined for p ≡ 2 (mod 3);
//! - `G3`: {diag(a, ab³)} and its T-translates, defined for p ≡ 1 (mod 3);
//! - `G00`/`G10`/`G01`: the [[±a, b], [0, ±a]] families with the top-left or
//!   bottom-right entry restricted to squares;
//! - `BorelFull`, `BorelFixLine`, `BorelQuotientLine`: upper-triangular
//!   groups, the latter two with 1 forced on the diagonal position that
//!   fixes a vector resp. acts trivially on the quotient line;
//! - `Sl2`, `Gl2`;
//! - `Ps4Preimage`: the inverse image in GL₂(F_p) of a subgroup S4 ≤ PGL₂(F_p),
//!   located by a deterministic search over canonical generator pairs.
//!
//! [`noncm_possible_images`] and [`cm_possible_images`] list the subgroups
//! that can occur as the full mod-p image for non-CM resp. CM curves; each
//! entry carries a `conditional` flag (possibility survives only if mod-p
//! surjectivity for large p fails) and a `cm` flag (arises from a CM curve).

use crate::error::AlgebraError;
use crate::group::MatGroup;
use crate::labels::{published_class, PublishedClass};
use crate::residue::Mat2;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

type Result<T> = std::result::Result<T, AlgebraError>;

// ---- basic number theory ----------------------------------------------------

/// Trial-division primality; every modulus in scope is tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

fn require_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(AlgebraError::Precondition(format!("{p} is not prime")))
    }
}

fn require_odd_prime(p: u32, what: &str) -> Result<()> {
    require_prime(p)?;
    if p == 2 {
        return Err(AlgebraError::Precondition(format!("{what} requires an odd prime, got p=2")));
    }
    Ok(())
}

/// Legendre symbol (a | p) ∈ {−1, 0, 1} by quadratic reciprocity, for an odd
/// prime p. Agrees with [`legendre_by_euler`]; the two are independent code
/// paths kept for cross-checking.
pub fn legendre(a: i64, p: u32) -> i8 {
    debug_assert!(is_prime(p as u64) && p % 2 == 1);
    let mut a = a.rem_euclid(p as i64) as u64;
    let mut n = p as u64;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol by Euler's criterion: a^((p−1)/2) mod p.
pub fn legendre_by_euler(a: i64, p: u32) -> i8 {
    debug_assert!(is_prime(p as u64) && p % 2 == 1);
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = a % p as u64;
    let mut e = (p as u64 - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        debug_assert_eq!(acc, p as u64 - 1);
        -1
    }
}

/// Smallest primitive root mod p.
pub fn primitive_root(p: u32) -> u32 {
    assert!(is_prime(p as u64), "{p} is not prime");
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut n = p as u64 - 1;
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            factors.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        acc
    };
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow(g as u64, (p as u64 - 1) / q) != 1))
        .expect("every prime has a primitive root")
}

/// The non-residue ε used in the nonsplit Cartan model, as a residue mod p:
/// p − 1 (that is, −1) when p ≡ 3 (mod 4), otherwise the smallest integer
/// ≥ 2 that is a quadratic non-residue.
pub fn epsilon_for(p: u32) -> Result<u32> {
    require_odd_prime(p, "epsilon_for")?;
    if p % 4 == 3 {
        return Ok(p - 1);
    }
    Ok((2..p)
        .find(|&e| legendre(e as i64, p) == -1)
        .expect("half of all residues are non-squares"))
}

// ---- named groups -------------------------------------------------------------

/// The named subgroup families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupName {
    Cs,
    CsPlus,
    Cns,
    CnsPlus,
    G0,
    G3,
    G00,
    G10,
    G01,
    BorelFull,
    BorelFixLine,
    BorelQuotientLine,
    Sl2,
    Gl2,
    Ps4Preimage,
}

impl GroupName {
    pub const ALL: [GroupName; 15] = [
        GroupName::Cs,
        GroupName::CsPlus,
        GroupName::Cns,
        GroupName::CnsPlus,
        GroupName::G0,
        GroupName::G3,
        GroupName::G00,
        GroupName::G10,
        GroupName::G01,
        GroupName::BorelFull,
        GroupName::BorelFixLine,
        GroupName::BorelQuotientLine,
        GroupName::Sl2,
        GroupName::Gl2,
        GroupName::Ps4Preimage,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GroupName::Cs => "Cs",
            GroupName::CsPlus => "CsPlus",
            GroupName::Cns => "Cns",
            GroupName::CnsPlus => "CnsPlus",
            GroupName::G0 => "G0",
            GroupName::G3 => "G3",
            GroupName::G00 => "G00",
            GroupName::G10 => "G10",
            GroupName::G01 => "G01",
            GroupName::BorelFull => "BorelFull",
            GroupName::BorelFixLine => "BorelFixLine",
            GroupName::BorelQuotientLine => "BorelQuotientLine",
            GroupName::Sl2 => "SL2",
            GroupName::Gl2 => "GL2",
            GroupName::Ps4Preimage => "PS4Preimage",
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GroupName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        GroupName::ALL
            .iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = GroupName::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown group name {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// A named family member at a specific prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NamedGroupSpec {
    pub name: GroupName,
    pub p: u32,
}

impl NamedGroupSpec {
    pub fn new(name: GroupName, p: u32) -> Self {
        NamedGroupSpec { name, p }
    }
}

impl fmt::Display for NamedGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.p)
    }
}

/// Check the arithmetic preconditions of a family at p without building it.
pub fn check_preconditions(spec: &NamedGroupSpec) -> Result<()> {
    let p = spec.p;
    match spec.name {
        GroupName::Sl2 | GroupName::Gl2 | GroupName::BorelFull
        | GroupName::BorelFixLine | GroupName::BorelQuotientLine => require_prime(p),
        GroupName::G0 => {
            require_odd_prime(p, "G0")?;
            if p % 3 != 2 {
                return Err(AlgebraError::Precondition(format!(
                    "G0 requires p ≡ 2 (mod 3), got p={p}"
                )));
            }
            Ok(())
        }
        GroupName::G3 => {
            require_odd_prime(p, "G3")?;
            if p % 3 != 1 {
                return Err(AlgebraError::Precondition(format!(
                    "G3 requires p ≡ 1 (mod 3), got p={p}"
                )));
            }
            Ok(())
        }
        _ => require_odd_prime(p, spec.name.as_str()),
    }
}

/// Group order from the defining formula.
pub fn named_group_order(spec: &NamedGroupSpec) -> Result<u64> {
    check_preconditions(spec)?;
    let p = spec.p as u64;
    Ok(match spec.name {
        GroupName::Cs => (p - 1) * (p - 1),
        GroupName::CsPlus => 2 * (p - 1) * (p - 1),
        GroupName::Cns => p * p - 1,
        GroupName::CnsPlus => 2 * (p * p - 1),
        GroupName::G0 => 2 * (p * p - 1) / 3,
        GroupName::G3 => 2 * (p - 1) * (p - 1) / 3,
        GroupName::G00 => 2 * p * (p - 1),
        GroupName::G10 | GroupName::G01 => p * (p - 1),
        GroupName::BorelFull => p * (p - 1) * (p - 1),
        GroupName::BorelFixLine | GroupName::BorelQuotientLine => p * (p - 1),
        GroupName::Sl2 => p * (p * p - 1),
        GroupName::Gl2 => (p * p - 1) * (p * p - p),
        GroupName::Ps4Preimage => 24 * (p - 1),
    })
}

fn mat(p: u32, e: [i64; 4]) -> Mat2 {
    Mat2::new(e, p as u64).expect("modulus already validated")
}

/// Generator matrices for the family; enough to reproduce the group by
/// closure, chosen so orbit computations never need the element set.
pub fn named_group_generators(spec: &NamedGroupSpec) -> Result<Vec<Mat2>> {
    check_preconditions(spec)?;
    let p = spec.p;
    let pi = p as i64;
    let g = primitive_root(p) as i64;
    Ok(match spec.name {
        GroupName::Cs => vec![mat(p, [g, 0, 0, 1]), mat(p, [1, 0, 0, g])],
        GroupName::CsPlus => {
            vec![mat(p, [g, 0, 0, 1]), mat(p, [1, 0, 0, g]), mat(p, [0, 1, 1, 0])]
        }
        GroupName::Cns => vec![nonsplit_generator(p)?],
        GroupName::CnsPlus => vec![nonsplit_generator(p)?, mat(p, [1, 0, 0, -1])],
        GroupName::G0 => {
            vec![nonsplit_generator(p)?.pow(3), mat(p, [1, 0, 0, -1])]
        }
        GroupName::G3 => {
            let c = g * g % pi * g % pi;
            vec![mat(p, [g, 0, 0, g]), mat(p, [1, 0, 0, c]), mat(p, [0, 1, 1, 0])]
        }
        GroupName::G00 => {
            vec![mat(p, [g, 0, 0, g]), mat(p, [1, 1, 0, 1]), mat(p, [1, 0, 0, -1])]
        }
        GroupName::G10 => {
            let s = (g * g).rem_euclid(pi);
            vec![mat(p, [s, 0, 0, s]), mat(p, [1, 1, 0, 1]), mat(p, [1, 0, 0, -1])]
        }
        GroupName::G01 => {
            let s = (g * g).rem_euclid(pi);
            vec![mat(p, [s, 0, 0, s]), mat(p, [1, 1, 0, 1]), mat(p, [-1, 0, 0, 1])]
        }
        GroupName::BorelFull => {
            vec![mat(p, [g, 0, 0, 1]), mat(p, [1, 0, 0, g]), mat(p, [1, 1, 0, 1])]
        }
        GroupName::BorelFixLine => vec![mat(p, [1, 0, 0, g]), mat(p, [1, 1, 0, 1])],
        GroupName::BorelQuotientLine => vec![mat(p, [g, 0, 0, 1]), mat(p, [1, 1, 0, 1])],
        GroupName::Sl2 => vec![mat(p, [1, 1, 0, 1]), mat(p, [1, 0, 1, 1])],
        GroupName::Gl2 => {
            vec![mat(p, [g, 0, 0, 1]), mat(p, [1, 1, 0, 1]), mat(p, [1, 0, 1, 1])]
        }
        GroupName::Ps4Preimage => build_named(spec)?.generators().to_vec(),
    })
}

/// A generator of the nonsplit Cartan: the smallest (a, b) in lexicographic
/// order, b ≥ 1, whose matrix [[a, bε], [b, a]] has order p² − 1.
fn nonsplit_generator(p: u32) -> Result<Mat2> {
    nonsplit_generator_with(p, epsilon_for(p)?)
}

fn nonsplit_generator_with(p: u32, eps: u32) -> Result<Mat2> {
    let eps = eps as i64;
    let target = p as u64 * p as u64 - 1;
    for a in 0..p as i64 {
        for b in 1..p as i64 {
            let candidate = mat(p, [a, b * eps, b, a]);
            if candidate.is_invertible() && candidate.element_order().unwrap() == target {
                return Ok(candidate);
            }
        }
    }
    unreachable!("F_p² has a multiplicative generator, and every α ∉ F_p arises as a matrix");
}

/// Like [`build_named`], but with a caller-chosen nonresidue ε for the
/// nonsplit model [[a, bε], [b, a]]. Only the three families defined through
/// that model accept the parameter; the result is conjugate to the default
/// build, so orders and orbit shapes are unchanged.
pub fn named_group_with_epsilon(spec: &NamedGroupSpec, eps: u32) -> Result<MatGroup> {
    check_preconditions(spec)?;
    let p = spec.p;
    if !matches!(spec.name, GroupName::Cns | GroupName::CnsPlus | GroupName::G0) {
        return Err(AlgebraError::Precondition(format!(
            "epsilon only parametrizes the nonsplit families, not {}",
            spec.name
        )));
    }
    if legendre(eps as i64, p) != -1 {
        return Err(AlgebraError::Precondition(format!(
            "epsilon must be a quadratic nonresidue mod {p}; {eps} is not"
        )));
    }
    let gamma = nonsplit_generator_with(p, eps)?;
    let gens = match spec.name {
        GroupName::Cns => vec![gamma],
        GroupName::CnsPlus => vec![gamma, mat(p, [1, 0, 0, -1])],
        GroupName::G0 => vec![gamma.pow(3), mat(p, [1, 0, 0, -1])],
        _ => unreachable!(),
    };
    let group = MatGroup::closure(&gens)?;
    assert_eq!(
        group.order(),
        named_group_order(spec)?,
        "{spec} with epsilon {eps}: constructed order disagrees with the defining formula"
    );
    Ok(group)
}

/// Materialize the family as an explicit group. The order is asserted
/// against the defining formula.
pub fn build_named(spec: &NamedGroupSpec) -> Result<MatGroup> {
    check_preconditions(spec)?;
    let p = spec.p;
    let expected = named_group_order(spec)?;
    let group = match spec.name {
        GroupName::Ps4Preimage => ps4_preimage(p)?,
        _ => MatGroup::closure(&named_group_generators(spec)?)?,
    };
    assert_eq!(
        group.order(),
        expected,
        "{spec}: constructed order disagrees with the defining formula"
    );
    Ok(group)
}

/// Element cap for prime-power builds. GL₂(ℤ/25) (300 000 elements) fits;
/// GL₂(ℤ/49) (4.8 million) is refused rather than exhausting memory.
pub const PRIME_POWER_CAP: u64 = 2_000_000;

/// Decompose m as p^k with p prime, k ≥ 1.
fn prime_power_parts(m: u64) -> Result<(u32, u32)> {
    let p = (2..=m).find(|d| m % d == 0).ok_or(AlgebraError::UnsupportedModulus(m))?;
    let mut k = 0;
    let mut rest = m;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 || !is_prime(p) {
        return Err(AlgebraError::Precondition(format!("{m} is not a prime power")));
    }
    Ok((p as u32, k))
}

/// A generating set for (ℤ/m)ˣ, found greedily (only used for small m).
pub(crate) fn unit_group_generators(m: u64) -> Vec<u64> {
    let mut gens: Vec<u64> = Vec::new();
    let mut generated: std::collections::BTreeSet<u64> = [1u64].into();
    for u in 2..m {
        if num::integer::gcd(u, m) != 1 || generated.contains(&u) {
            continue;
        }
        gens.push(u);
        // closure of the current generating set
        let mut queue: Vec<u64> = generated.iter().copied().collect();
        while let Some(x) = queue.pop() {
            for &g in &gens {
                let y = x * g % m;
                if generated.insert(y) {
                    queue.push(y);
                }
            }
        }
    }
    gens
}

/// Build a family member at a prime-power modulus. Primes accept every
/// name (equivalent to [`build_named`]); higher powers p^k are defined for
/// the full linear and Borel families only, since the Cartan and
/// exceptional families are residue-field constructions.
pub fn named_group_at(name: GroupName, modulus: u64) -> Result<MatGroup> {
    if modulus > u16::MAX as u64 {
        return Err(AlgebraError::UnsupportedModulus(modulus));
    }
    let (p, k) = prime_power_parts(modulus)?;
    if k == 1 {
        return build_named(&NamedGroupSpec::new(name, p));
    }
    let phi = modulus / p as u64 * (p as u64 - 1);
    let kernel_cells = |cells: u32| (modulus / p as u64).pow(cells);
    let units = unit_group_generators(modulus);
    let shear = Mat2::new([1, 1, 0, 1], modulus)?;
    let diag = |u: u64, lower_right: bool| {
        let e = if lower_right { [1, 0, 0, u as i64] } else { [u as i64, 0, 0, 1] };
        Mat2::new(e, modulus)
    };
    let (mut gens, expected) = match name {
        GroupName::Sl2 => (
            vec![shear, Mat2::new([1, 0, 1, 1], modulus)?],
            kernel_cells(3) * (p as u64 + 1) * (p as u64 - 1) * p as u64,
        ),
        GroupName::Gl2 => (
            vec![shear, Mat2::new([1, 0, 1, 1], modulus)?],
            kernel_cells(3) * (p as u64 + 1) * (p as u64 - 1) * p as u64 * phi,
        ),
        GroupName::BorelFull => (vec![shear], phi * phi * modulus),
        GroupName::BorelFixLine => (vec![shear], phi * modulus),
        GroupName::BorelQuotientLine => (vec![shear], phi * modulus),
        _ => {
            return Err(AlgebraError::Precondition(format!(
                "{name} is only defined at prime level, not modulus {modulus}"
            )));
        }
    };
    for &u in &units {
        if !matches!(name, GroupName::Sl2 | GroupName::BorelFixLine) {
            gens.push(diag(u, false)?);
        }
        if matches!(name, GroupName::BorelFull | GroupName::BorelFixLine) {
            gens.push(diag(u, true)?);
        }
    }
    if expected > PRIME_POWER_CAP {
        return Err(AlgebraError::SizeCapExceeded { cap: PRIME_POWER_CAP });
    }
    let group = MatGroup::closure_with_cap(&gens, expected)?;
    assert_eq!(
        group.order(),
        expected,
        "{name} at modulus {modulus}: constructed order disagrees with the defining formula"
    );
    Ok(group)
}

/// Scalar subgroup {aI : a ∈ F_pˣ}.
pub fn scalar_subgroup(p: u32) -> Result<MatGroup> {
    require_prime(p)?;
    if p == 2 {
        return MatGroup::trivial(2);
    }
    let g = primitive_root(p) as i64;
    MatGroup::closure(&[mat(p, [g, 0, 0, g])])
}

/// Smallest k ≥ 1 with A^k scalar (the order of the image in PGL₂).
fn projective_order(a: &Mat2) -> u64 {
    let mut acc = *a;
    let mut k = 1;
    while !acc.is_scalar() {
        acc = acc.mul_unchecked(a);
        k += 1;
    }
    k
}

static PS4_CACHE: Lazy<Mutex<HashMap<u32, MatGroup>>> = Lazy::new(Default::default);

/// Inverse image in GL₂(F_p) of an S4 ≤ PGL₂(F_p), of order 24(p−1).
///
/// All subgroups S4 of PGL₂(F_p) are conjugate, so the choice below is
/// canonical up to conjugacy: take the first matrix of projective order 4
/// in packed order, then the first matrix of projective order 3 that
/// together with it and the scalars closes up to order exactly 24(p−1) with
/// quotient S4.
fn ps4_preimage(p: u32) -> Result<MatGroup> {
    require_odd_prime(p, "PS4Preimage")?;
    if let Some(g) = PS4_CACHE.lock().unwrap().get(&p) {
        return Ok(g.clone());
    }
    let target = 24 * (p as u64 - 1);
    let scalars = scalar_subgroup(p)?;
    let scalar_gen = mat(p, [primitive_root(p) as i64, 0, 0, primitive_root(p) as i64]);
    let all_invertible = || {
        (0..p as i64).flat_map(move |a| {
            (0..p as i64).flat_map(move |b| {
                (0..p as i64).flat_map(move |c| {
                    (0..p as i64)
                        .map(move |d| mat(p, [a, b, c, d]))
                        .filter(|m| m.is_invertible())
                })
            })
        })
    };
    let a4 = all_invertible()
        .find(|m| projective_order(m) == 4)
        .expect("PGL₂(F_p) has elements of order 4 for every odd p");
    for b3 in all_invertible().filter(|m| projective_order(m) == 3) {
        let closed = match MatGroup::closure_with_cap(&[a4, b3, scalar_gen], target) {
            Ok(g) => g,
            Err(AlgebraError::SizeCapExceeded { .. }) => continue,
            Err(e) => return Err(e),
        };
        if closed.order() != target {
            continue;
        }
        let quotient = closed.quotient_iso_type(&scalars)?;
        if quotient.name.as_deref() == Some("S4") {
            PS4_CACHE.lock().unwrap().insert(p, closed.clone());
            return Ok(closed);
        }
    }
    Err(AlgebraError::Precondition(format!(
        "no S4 subgroup of PGL₂(F_{p}) found; this cannot happen for odd primes"
    )))
}

// ---- CM data ------------------------------------------------------------------

/// An order in an imaginary quadratic field of class number one:
/// discriminant −D of the field (D > 0) and conductor f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmOrder {
    pub d: u32,
    pub f: u32,
}

/// The thirteen imaginary quadratic orders of class number one, as (D, f).
pub const CM_ORDERS: [CmOrder; 13] = [
    CmOrder { d: 3, f: 1 },
    CmOrder { d: 3, f: 2 },
    CmOrder { d: 3, f: 3 },
    CmOrder { d: 4, f: 1 },
    CmOrder { d: 4, f: 2 },
    CmOrder { d: 7, f: 1 },
    CmOrder { d: 7, f: 2 },
    CmOrder { d: 8, f: 1 },
    CmOrder { d: 11, f: 1 },
    CmOrder { d: 19, f: 1 },
    CmOrder { d: 43, f: 1 },
    CmOrder { d: 67, f: 1 },
    CmOrder { d: 163, f: 1 },
];

/// The D values entering the residue tests for CM curves away from j = 0:
/// each CM order above with D ≠ 3 reduces to one of these.
pub const CM_RESIDUE_TEST_DISCS: [u32; 8] = [1, 2, 7, 11, 19, 43, 67, 163];

/// The (p, j-invariant) pairs known to violate mod-p surjectivity beyond the
/// standard families; kept as opaque display strings for report annotations.
pub const KNOWN_SURJECTIVITY_EXCEPTIONS: [(u32, &str); 4] = [
    (17, "-17*373^3/2^17"),
    (17, "-17^2*101^3/2"),
    (37, "-7*11^3"),
    (37, "-7*137^3*2083^3"),
];

// ---- possible image lists -------------------------------------------------------

/// One way a mod-p image can arise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ImageGroup {
    /// A named family member.
    Named(NamedGroupSpec),
    /// A published subgroup class, identified by its label and matched to a
    /// concrete census class by (order, degree set).
    Labeled(&'static PublishedClass),
    /// A class found computationally (census survivor, targeted search).
    Computed {
        description: String,
        modulus: u32,
        order: u64,
        /// Generator entries, row-major.
        generators: Vec<[u32; 4]>,
    },
}

impl ImageGroup {
    pub fn computed_from(description: String, group: &MatGroup) -> ImageGroup {
        ImageGroup::Computed {
            description,
            modulus: group.modulus(),
            order: group.order(),
            generators: group.generators().iter().map(|g| g.entries()).collect(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ImageGroup::Named(spec) => spec.to_string(),
            ImageGroup::Labeled(row) => row.label.to_string(),
            ImageGroup::Computed { description, .. } => description.clone(),
        }
    }

    pub fn prime(&self) -> u32 {
        match self {
            ImageGroup::Named(spec) => spec.p,
            ImageGroup::Labeled(row) => row.prime,
            ImageGroup::Computed { modulus, .. } => *modulus,
        }
    }

    pub(crate) fn computed_generators(&self) -> Option<Vec<Mat2>> {
        match self {
            ImageGroup::Computed { modulus, generators, .. } => Some(
                generators
                    .iter()
                    .map(|e| Mat2::new(e.map(|v| v as i64), *modulus as u64).unwrap())
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// A possible mod-p image together with its status flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageWitness {
    pub group: ImageGroup,
    /// True when the possibility is open only if mod-p surjectivity for
    /// non-CM curves fails at this prime (no known curve realizes it).
    pub conditional: bool,
    /// True when the witness arises from curves with complex multiplication.
    pub cm: bool,
}

impl ImageWitness {
    fn unconditional(group: ImageGroup) -> Self {
        ImageWitness { group, conditional: false, cm: false }
    }

    fn conditional(group: ImageGroup) -> Self {
        ImageWitness { group, conditional: true, cm: false }
    }

    fn cm(group: ImageGroup) -> Self {
        ImageWitness { group, conditional: false, cm: true }
    }
}

fn named_witness(name: GroupName, p: u32) -> ImageGroup {
    ImageGroup::Named(NamedGroupSpec::new(name, p))
}

fn labeled(prime: u32, label: &str) -> ImageGroup {
    ImageGroup::Labeled(
        published_class(prime, label)
            .unwrap_or_else(|| panic!("published class {prime}:{label} must exist")),
    )
}

/// Possible mod-p images of non-CM curves over ℚ.
///
/// For p ≤ 13 (and the known rows at 17 and 37) the lists are unconditional;
/// the remaining entries carry `conditional = true` and disappear when
/// `assume_surjectivity_conjecture` is set.
pub fn noncm_possible_images(
    p: u32,
    assume_surjectivity_conjecture: bool,
) -> Result<Vec<ImageWitness>> {
    require_prime(p)?;
    let mut out = vec![ImageWitness::unconditional(named_witness(GroupName::Gl2, p))];
    for row in crate::labels::classes_at(p) {
        out.push(ImageWitness::unconditional(ImageGroup::Labeled(row)));
    }
    if assume_surjectivity_conjecture {
        return Ok(out);
    }
    match p {
        2..=12 => {}
        13 => {
            out.push(ImageWitness::conditional(named_witness(GroupName::CsPlus, 13)));
            out.push(ImageWitness::conditional(named_witness(GroupName::CnsPlus, 13)));
            for group in crate::checks::isogeny_surviving_classes()? {
                out.push(ImageWitness::conditional(group));
            }
        }
        _ => {
            out.push(ImageWitness::conditional(named_witness(GroupName::CnsPlus, p)));
            if p % 3 == 2 {
                out.push(ImageWitness::conditional(named_witness(GroupName::G0, p)));
            }
        }
    }
    Ok(out)
}

/// Possible mod-p images of a CM curve with the given order. All entries are
/// unconditional (`cm = true`).
pub fn cm_possible_images(order: CmOrder, p: u32) -> Result<Vec<ImageWitness>> {
    if !CM_ORDERS.contains(&order) {
        return Err(AlgebraError::Precondition(format!(
            "({}, {}) is not an imaginary quadratic order of class number one",
            order.d, order.f
        )));
    }
    require_prime(p)?;
    if p == 2 {
        return Ok(vec![
            ImageWitness::cm(named_witness(GroupName::Gl2, 2)),
            ImageWitness::cm(labeled(2, "2B")),
            ImageWitness::cm(labeled(2, "2Cs")),
        ]);
    }
    if order == (CmOrder { d: 3, f: 1 }) {
        // j = 0: the mod-p image depends on p mod 9
        if p == 3 {
            return Ok(["3Cs.1.1", "3Cs", "3B.1.1", "3B.1.2", "3B"]
                .iter()
                .map(|label| ImageWitness::cm(labeled(3, label)))
                .collect());
        }
        let witnesses = match p % 9 {
            1 => vec![named_witness(GroupName::CsPlus, p)],
            8 => vec![named_witness(GroupName::CnsPlus, p)],
            4 | 7 => vec![named_witness(GroupName::CsPlus, p), named_witness(GroupName::G3, p)],
            2 | 5 => vec![named_witness(GroupName::CnsPlus, p), named_witness(GroupName::G0, p)],
            _ => unreachable!("p ≠ 3 prime is coprime to 9, and 0,3,6 are divisible by 3"),
        };
        return Ok(witnesses.into_iter().map(ImageWitness::cm).collect());
    }
    let witnesses = match legendre(-(order.d as i64), p) {
        0 => vec![
            named_witness(GroupName::G00, p),
            named_witness(GroupName::G10, p),
            named_witness(GroupName::G01, p),
        ],
        1 => vec![named_witness(GroupName::CsPlus, p)],
        -1 => vec![named_witness(GroupName::CnsPlus, p)],
        _ => unreachable!("legendre returns -1, 0, 1"),
    };
    Ok(witnesses.into_iter().map(ImageWitness::cm).collect())
}
