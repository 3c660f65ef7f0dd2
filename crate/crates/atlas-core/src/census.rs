//! Subgroup censuses: every subgroup of an ambient matrix group, up to
//! conjugacy in the ambient.
//!
//! Solvable ambients (all the Cartan/Borel-type families, and GL₂ for p ≤ 3)
//! use the cyclic extension method: every subgroup of a solvable group has a
//! normal subgroup of prime index, so processing known classes in increasing
//! order and adjoining prime-order coset elements of their normalizers finds
//! every class exactly once. Non-solvable ambients fall back to a plain
//! subgroup walk, which is only allowed up to [`BRUTE_CENSUS_BOUND`]
//! elements; larger non-solvable ambients are refused.
//!
//! Classes carry a [`Fingerprint`]: the invariants used to match census
//! classes against published subgroup labels, which we treat as opaque.

use crate::catalog::{build_named, GroupName, NamedGroupSpec};
use crate::error::AlgebraError;
use crate::group::{pconj, pid, pinv, pmul, subgroup_key, MatGroup, SubgroupKey};
use crate::isotype::{self, SmallGroup};
use crate::residue::Mat2;
use once_cell::sync::Lazy;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

type Result<T> = std::result::Result<T, AlgebraError>;

/// Largest non-solvable ambient the brute-force walk accepts.
pub const BRUTE_CENSUS_BOUND: u64 = 500;

/// Invariants of a subgroup class, conjugation-invariant by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub order: u64,
    /// Orbit lengths on the vectors of maximal additive order (all nonzero
    /// vectors when the modulus is prime), as a sorted multiset.
    pub orbit_lengths: Vec<u64>,
    /// The distinct values among `orbit_lengths`: the degree set.
    pub degrees: Vec<u64>,
    pub det_image_size: u64,
    /// Number of stable lines; present only for prime moduli.
    pub stable_lines: Option<u64>,
    /// Element-order histogram (order, count), ascending.
    pub element_orders: Vec<(u64, u64)>,
}

impl Fingerprint {
    /// The published-table comparison key.
    pub fn order_and_degrees(&self) -> (u64, &[u64]) {
        (self.order, &self.degrees)
    }
}

pub fn fingerprint_of(group: &MatGroup) -> Fingerprint {
    let m = group.modulus() as u64;
    let dec = group.orbit_decomposition(Some(m)).expect("the modulus divides itself");
    let mut orbit_lengths = dec.lengths();
    orbit_lengths.sort_unstable();
    let mut degrees = orbit_lengths.clone();
    degrees.dedup();
    Fingerprint {
        order: group.order(),
        orbit_lengths,
        degrees,
        det_image_size: group.det_image_size(),
        stable_lines: group.stable_lines().ok().map(|lines| lines.len() as u64),
        element_orders: group.element_order_histogram(),
    }
}

/// One conjugacy class of subgroups.
#[derive(Debug, Clone)]
pub struct SubgroupClass {
    /// Canonical representative: the conjugate whose sorted element list is
    /// lexicographically least.
    pub rep: MatGroup,
    /// Number of distinct conjugates, = [ambient : N(rep)].
    pub conjugate_count: u64,
    pub fingerprint: Fingerprint,
}

/// All subgroup classes of the ambient, sorted by (order, element list).
pub fn subgroup_census(ambient: &MatGroup) -> Result<Vec<SubgroupClass>> {
    let pending = census_classes_raw(ambient)?;
    let mut out: Vec<SubgroupClass> = pending
        .into_iter()
        .map(|(rep, conjugate_count)| SubgroupClass {
            fingerprint: fingerprint_of(&rep),
            rep,
            conjugate_count,
        })
        .collect();
    out.sort_by(|a, b| {
        (a.rep.order(), a.rep.packed_elems()).cmp(&(b.rep.order(), b.rep.packed_elems()))
    });
    Ok(out)
}

/// Census classes as (canonical representative, conjugate count) pairs,
/// without fingerprints. Used internally where fingerprinting every class
/// would dominate (censuses feeding a filter).
pub(crate) fn census_classes_raw(ambient: &MatGroup) -> Result<Vec<(MatGroup, u64)>> {
    if ambient.is_solvable() {
        solvable_census(ambient)
    } else if ambient.order() <= BRUTE_CENSUS_BOUND {
        brute_census(ambient)
    } else {
        Err(AlgebraError::NotSolvableAndTooLarge {
            order: ambient.order(),
            bound: BRUTE_CENSUS_BOUND,
        })
    }
}

/// Walk the conjugation orbit of `start` under the ambient generators.
/// Returns the canonical conjugate's sorted element list (canonical = least
/// [`SubgroupKey`], a deterministic choice), the orbit size, and the keys of
/// every conjugate. Memory stays O(|ambient|): the orbit has
/// [ambient : N] ≤ [ambient : start] members of |start| words each.
pub(crate) fn conjugate_orbit(
    ambient: &MatGroup,
    start: &MatGroup,
) -> (Vec<u64>, u64, Vec<SubgroupKey>) {
    let mw = ambient.modulus() as u64;
    let gens: Vec<(u64, u64)> =
        ambient.gen_words().iter().map(|&g| (g, pinv(g, mw))).collect();
    let key0 = start.key();
    let mut seen: FxHashSet<SubgroupKey> = FxHashSet::default();
    seen.insert(key0);
    // element lists in the queue are unsorted; the key is order-independent
    let mut queue: Vec<Vec<u64>> = vec![start.packed_elems().to_vec()];
    let (mut min_key, mut min_idx) = (key0, 0usize);
    let mut head = 0;
    while head < queue.len() {
        let cur = std::mem::take(&mut queue[head]);
        head += 1;
        for &(g, gi) in &gens {
            let conj: Vec<u64> = cur.iter().map(|&x| pconj(x, g, gi, mw)).collect();
            let key = subgroup_key(conj.iter().copied());
            if seen.insert(key) {
                if key < min_key {
                    min_key = key;
                    min_idx = queue.len();
                }
                queue.push(conj);
            }
        }
        queue[head - 1] = cur;
    }
    let count = queue.len() as u64;
    let mut canonical = std::mem::take(&mut queue[min_idx]);
    canonical.sort_unstable();
    (canonical, count, seen.into_iter().collect())
}

fn canonical_rep(ambient: &MatGroup, candidate: MatGroup, min_elems: Vec<u64>) -> MatGroup {
    if min_elems == candidate.packed_elems() {
        candidate
    } else {
        MatGroup::from_sorted_packed(ambient.modulus(), min_elems, vec![])
            .with_small_generating_set()
    }
}

fn solvable_census(ambient: &MatGroup) -> Result<Vec<(MatGroup, u64)>> {
    let m = ambient.modulus();
    let mw = m as u64;
    let mut classes: Vec<(MatGroup, u64)> = Vec::new();
    let mut fuse: FxHashSet<SubgroupKey> = FxHashSet::default();
    let mut worklist: BTreeMap<u64, Vec<usize>> = BTreeMap::new();

    let trivial = MatGroup::trivial(mw)?;
    fuse.insert(trivial.key());
    worklist.entry(1).or_default().push(0);
    classes.push((trivial, 1));

    while let Some((&order, _)) = worklist.iter().next() {
        let ids = worklist.remove(&order).expect("key just observed");
        for id in ids {
            let u = classes[id].0.clone();
            let n = ambient.normalizer_of(&u)?;
            // one candidate per coset of U in N: extensions depend only on
            // the coset, and every cyclic subgroup of N/U meets the
            // transversal in a generator
            for g in n.left_transversal_of(&u) {
                if u.contains_packed(g) {
                    continue;
                }
                // order of gU in N/U (U is normal in its normalizer)
                let mut k = 1u64;
                let mut x = g;
                while !u.contains_packed(x) {
                    x = pmul(x, g, mw);
                    k += 1;
                }
                if !crate::catalog::is_prime(k) {
                    continue;
                }
                // V = ⟨U, g⟩ = U ∪ gU ∪ … ∪ g^(k−1)U, no closure needed
                let mut elems: Vec<u64> = Vec::with_capacity((k * u.order()) as usize);
                let mut coset = pid(mw);
                for _ in 0..k {
                    elems.extend(u.packed_elems().iter().map(|&s| pmul(coset, s, mw)));
                    coset = pmul(coset, g, mw);
                }
                elems.sort_unstable();
                debug_assert_eq!(elems.len() as u64, k * u.order());
                if fuse.contains(&subgroup_key(elems.iter().copied())) {
                    continue;
                }
                let mut gens = u.generators().to_vec();
                gens.push(Mat2::from_packed(g, m));
                let v = MatGroup::from_sorted_packed(m, elems, gens);
                let (min_elems, count, keys) = conjugate_orbit(ambient, &v);
                for key in keys {
                    let fresh = fuse.insert(key);
                    debug_assert!(fresh, "conjugate already registered under another class");
                }
                let rep = canonical_rep(ambient, v, min_elems);
                let new_id = classes.len();
                worklist.entry(rep.order()).or_default().push(new_id);
                classes.push((rep, count));
            }
        }
    }
    Ok(classes)
}

fn is_prime_power(mut k: u64) -> bool {
    if k < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= k {
        if k % q == 0 {
            while k % q == 0 {
                k /= q;
            }
            return k == 1;
        }
        q += 1;
    }
    true
}

/// Plain subgroup walk: every subgroup is reachable by repeatedly adjoining
/// an element of prime-power order (any generating set refines to such
/// elements). Exponential-ish, hence the size bound at the call site.
///
/// Public because it doubles as the reference oracle that the structured
/// census is property-tested against: it shares no code with the
/// solvable-lattice route. Returns (class representative, conjugate count).
pub fn brute_census(ambient: &MatGroup) -> Result<Vec<(MatGroup, u64)>> {
    let m = ambient.modulus();
    let mw = m as u64;
    let extenders: Vec<u64> = ambient
        .elements()
        .filter(|g| is_prime_power(g.element_order().expect("invertible")))
        .map(|g| g.packed())
        .collect();
    let mut all: FxHashMap<SubgroupKey, MatGroup> = FxHashMap::default();
    let trivial = MatGroup::trivial(mw)?;
    all.insert(trivial.key(), trivial.clone());
    let mut queue = vec![trivial];
    while let Some(h) = queue.pop() {
        for &g in &extenders {
            if h.contains_packed(g) {
                continue;
            }
            let mut gens = h.generators().to_vec();
            gens.push(Mat2::from_packed(g, m));
            let v = MatGroup::closure(&gens)?;
            if let std::collections::hash_map::Entry::Vacant(slot) = all.entry(v.key()) {
                slot.insert(v.clone());
                queue.push(v);
            }
        }
    }
    // fuse into conjugacy classes, smallest canonical member first
    let mut subgroups: Vec<MatGroup> = all.into_values().collect();
    subgroups.sort_by(|a, b| {
        (a.order(), a.packed_elems()).cmp(&(b.order(), b.packed_elems()))
    });
    let mut assigned: FxHashSet<SubgroupKey> = FxHashSet::default();
    let mut classes: Vec<(MatGroup, u64)> = Vec::new();
    for sub in subgroups {
        if assigned.contains(&sub.key()) {
            continue;
        }
        let (min_elems, count, keys) = conjugate_orbit(ambient, &sub);
        assigned.extend(keys);
        classes.push((canonical_rep(ambient, sub, min_elems), count));
    }
    Ok(classes)
}

// ---- cached censuses of named families ---------------------------------------

type CensusCache = Mutex<HashMap<(GroupName, u32), Arc<Vec<SubgroupClass>>>>;
static CENSUS_CACHE: Lazy<CensusCache> = Lazy::new(Default::default);

/// Census of a named family, cached per (name, p).
pub fn census_of_named(name: GroupName, p: u32) -> Result<Arc<Vec<SubgroupClass>>> {
    if let Some(hit) = CENSUS_CACHE.lock().unwrap().get(&(name, p)) {
        return Ok(hit.clone());
    }
    let ambient = build_named(&NamedGroupSpec::new(name, p))?;
    let census = Arc::new(subgroup_census(&ambient)?);
    CENSUS_CACHE.lock().unwrap().insert((name, p), census.clone());
    Ok(census)
}

// ---- derived queries ----------------------------------------------------------

/// Whether some subgroup of the ambient has a quotient isomorphic to
/// `target` (i.e. `target` is a subquotient of the ambient).
pub fn is_quotient_of_subgroup(target: &SmallGroup, ambient: &MatGroup) -> Result<bool> {
    let t = target.order() as u64;
    for class in subgroup_census(ambient)? {
        if class.rep.order() % t != 0 {
            continue;
        }
        for n in class.rep.normal_subgroups() {
            if class.rep.order() / n.order() != t {
                continue;
            }
            if isotype::isomorphic(&class.rep.quotient_small_group(&n)?, target) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Necessary conditions for a subgroup of GL₂(F_p) to be the mod-p image of
/// an elliptic curve over ℚ: det(G) = F_pˣ (the Weil pairing makes det the
/// cyclotomic character) and G contains an element of trace 0 and
/// determinant −1 (the image of a complex conjugation). −I is deliberately
/// not required: images are classified as they stand, not up to twist.
pub fn satisfies_image_constraints(g: &MatGroup) -> Result<bool> {
    let p = g.modulus();
    if !crate::catalog::is_prime(p as u64) {
        return Err(AlgebraError::Precondition(format!(
            "image constraints are defined mod a prime, got {p}"
        )));
    }
    let minus_one = if p == 2 { 1 } else { p - 1 };
    Ok(g.det_image_size() == (p as u64 - 1).max(1)
        && g.elements().any(|mat| mat.trace().is_zero() && mat.det().value() == minus_one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_named, GroupName, NamedGroupSpec};

    fn named(name: GroupName, p: u32) -> MatGroup {
        build_named(&NamedGroupSpec::new(name, p)).unwrap()
    }

    #[test]
    fn census_of_dihedral_split_normalizer_mod_3() {
        // CsPlus(3) ≅ D4: 10 subgroups in 8 classes
        let census = subgroup_census(&named(GroupName::CsPlus, 3)).unwrap();
        assert_eq!(census.len(), 8);
        let total: u64 = census.iter().map(|c| c.conjugate_count).sum();
        assert_eq!(total, 10);
        let orders: Vec<u64> = census.iter().map(|c| c.rep.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 4, 4, 4, 8]);
    }

    #[test]
    fn census_of_scalars_mod_7() {
        // C6: one subgroup per divisor of 6
        let g = crate::catalog::scalar_subgroup(7).unwrap();
        let census = subgroup_census(&g).unwrap();
        let orders: Vec<u64> = census.iter().map(|c| c.rep.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        assert!(census.iter().all(|c| c.conjugate_count == 1));
    }

    #[test]
    fn census_of_sl2_f3() {
        // 15 subgroups in 7 classes
        let census = subgroup_census(&named(GroupName::Sl2, 3)).unwrap();
        assert_eq!(census.len(), 7);
        assert_eq!(census.iter().map(|c| c.conjugate_count).sum::<u64>(), 15);
        let by_order: Vec<(u64, u64)> =
            census.iter().map(|c| (c.rep.order(), c.conjugate_count)).collect();
        assert_eq!(by_order, vec![(1, 1), (2, 1), (3, 4), (4, 3), (6, 4), (8, 1), (24, 1)]);
    }

    #[test]
    fn census_of_gl2_f2() {
        // S3: 6 subgroups in 4 classes; non-solvable path not needed (S3 is solvable)
        let census = subgroup_census(&named(GroupName::Gl2, 2)).unwrap();
        assert_eq!(census.len(), 4);
        assert_eq!(census.iter().map(|c| c.conjugate_count).sum::<u64>(), 6);
    }

    #[test]
    fn solvable_and_brute_routes_agree() {
        for (name, p) in [
            (GroupName::CsPlus, 5),
            (GroupName::CnsPlus, 5),
            (GroupName::BorelFull, 3),
            (GroupName::Sl2, 3),
        ] {
            let ambient = named(name, p);
            assert!(ambient.order() <= 120);
            let fast = solvable_census(&ambient).unwrap();
            let brute = brute_census(&ambient).unwrap();
            let view = |classes: &[(MatGroup, u64)]| {
                let mut v: Vec<(Vec<u64>, u64)> = classes
                    .iter()
                    .map(|(rep, count)| (rep.packed_elems().to_vec(), *count))
                    .collect();
                v.sort();
                v
            };
            assert_eq!(view(&fast), view(&brute), "{name}({p})");
        }
    }

    #[test]
    fn fingerprints_match_published_rows_for_split_normalizer_mod_5() {
        // the split-Cartan classes at 5 from the published list all appear
        // inside the census of CsPlus(5)
        let census = subgroup_census(&named(GroupName::CsPlus, 5)).unwrap();
        for label in ["5Cs.1.1", "5Cs.1.3", "5Cs.4.1", "5Cs", "5Ns.2.1", "5Ns"] {
            let row = crate::labels::published_class(5, label).unwrap();
            assert!(
                census.iter().any(|c| c.fingerprint.order == row.order
                    && c.fingerprint.degrees == row.degrees),
                "{label} missing"
            );
        }
    }

    #[test]
    fn nonsolvable_ambients_are_bounded() {
        let gl2_5 = named(GroupName::Gl2, 5);
        assert!(!gl2_5.is_solvable());
        let census = subgroup_census(&gl2_5).unwrap();
        // GL₂(F₅) contains SL₂(F₅), whose class must be present
        assert!(census.iter().any(|c| c.rep.order() == 120));
        assert!(census.iter().any(|c| c.rep.order() == 480));
        let gl2_7 = named(GroupName::Gl2, 7);
        assert!(matches!(
            subgroup_census(&gl2_7),
            Err(AlgebraError::NotSolvableAndTooLarge { order: 2016, bound: 500 })
        ));
    }

    #[test]
    fn subquotient_queries() {
        let s4 = isotype::model("S4").unwrap();
        assert!(!is_quotient_of_subgroup(&s4, &named(GroupName::CnsPlus, 5)).unwrap());
        let s3 = isotype::model("S3").unwrap();
        assert!(is_quotient_of_subgroup(&s3, &named(GroupName::Gl2, 2)).unwrap());
        let c4 = isotype::model("C4").unwrap();
        assert!(is_quotient_of_subgroup(&c4, &named(GroupName::CsPlus, 5)).unwrap());
    }

    #[test]
    fn image_constraint_filter() {
        assert!(satisfies_image_constraints(&named(GroupName::CsPlus, 5)).unwrap());
        assert!(satisfies_image_constraints(&named(GroupName::Cs, 5)).unwrap());
        // SL₂ has determinant image {1}
        assert!(!satisfies_image_constraints(&named(GroupName::Sl2, 5)).unwrap());
        assert!(satisfies_image_constraints(&named(GroupName::Gl2, 13)).is_ok());
    }

    #[test]
    fn cached_census_is_shared() {
        let a = census_of_named(GroupName::CsPlus, 3).unwrap();
        let b = census_of_named(GroupName::CsPlus, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 8);
    }
}
