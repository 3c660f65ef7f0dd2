//! Shared machinery for the integration suites: random-group strategies,
//! independent reference oracles, and the property bodies themselves. Each
//! body panics on violation so the same code runs under the property
//! harness and under the fixed-seed acceptance runner.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

use atlas_core::catalog::{build_named, named_group_at, GroupName, NamedGroupSpec};
use atlas_core::census::{brute_census, fingerprint_of, subgroup_census, Fingerprint};
use atlas_core::group::MatGroup;
use atlas_core::lifts::{enumerate_lifts, LiftRoute};
use atlas_core::rqd;
use atlas_core::{Mat2, Vec2};
use proptest::prelude::*;

// ---- strategies ----------------------------------------------------------------------

/// Closure cap for random prime-level groups; admits everything up to and
/// including GL₂(F₁₃) (order 26 208).
pub const GROUP_CAP: u64 = 30_000;

fn close_mod(m: u64, raw: &[[u32; 4]], cap: u64) -> Option<MatGroup> {
    let gens: Vec<Mat2> = raw
        .iter()
        .map(|e| Mat2::new(e.map(|v| v as i64), m).expect("modulus in range"))
        .filter(|g| g.is_invertible())
        .collect();
    if gens.is_empty() {
        return None;
    }
    MatGroup::closure_with_cap(&gens, cap).ok()
}

fn group_mod(m: u32, cap: u64) -> impl Strategy<Value = MatGroup> {
    prop::collection::vec(prop::array::uniform4(0..m), 1..=2)
        .prop_filter_map("generators invertible, closure under cap", move |raw| {
            close_mod(m as u64, &raw, cap)
        })
}

/// Random subgroup of GL₂(F_p) for a small prime p.
pub fn arb_prime_group() -> impl Strategy<Value = MatGroup> {
    prop::sample::select(vec![2u32, 3, 5, 7, 11, 13]).prop_flat_map(|p| group_mod(p, GROUP_CAP))
}

/// Random subgroup together with a point of its plane (zero allowed).
pub fn arb_group_and_vector() -> impl Strategy<Value = (MatGroup, Vec2)> {
    arb_prime_group().prop_flat_map(|g| {
        let m = g.modulus();
        (Just(g), 0..m, 0..m).prop_map(move |(g, x, y)| {
            let v = Vec2::new(x as i64, y as i64, m as u64).expect("coordinates in range");
            (g, v)
        })
    })
}

/// Random subgroup together with an invertible conjugator.
pub fn arb_group_and_conjugator() -> impl Strategy<Value = (MatGroup, Mat2)> {
    arb_prime_group().prop_flat_map(|g| {
        let m = g.modulus();
        (Just(g), prop::array::uniform4(0..m)).prop_filter_map(
            "conjugator invertible",
            move |(g, e)| {
                let x = Mat2::new(e.map(|v| v as i64), m as u64).expect("modulus in range");
                x.is_invertible().then_some((g, x))
            },
        )
    })
}

/// Group at a 2- or 3-power modulus (every subgroup fits under the cap),
/// plus a divisor chain d2 | d1 | modulus with d1, d2 ≥ 2.
pub fn arb_reduction_chain() -> impl Strategy<Value = (MatGroup, u64, u64)> {
    prop::sample::select(vec![4u32, 8, 16, 9]).prop_flat_map(|m| {
        group_mod(m, GROUP_CAP).prop_flat_map(move |g| {
            let d1s: Vec<u64> = (2..=m as u64).filter(|d| m as u64 % d == 0).collect();
            prop::sample::select(d1s).prop_flat_map(move |d1| {
                let g = g.clone();
                let d2s: Vec<u64> = (2..=d1).filter(|d| d1 % d == 0).collect();
                prop::sample::select(d2s).prop_map(move |d2| (g.clone(), d1, d2))
            })
        })
    })
}

/// Small ambient whose subgroup lattice both census routes can walk.
pub fn arb_tiny_group() -> impl Strategy<Value = MatGroup> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_flat_map(|p| group_mod(p, 200))
}

/// One of the six subgroups of GL₂(F₂).
pub fn arb_mod2_subgroup() -> impl Strategy<Value = MatGroup> {
    prop::sample::select(mod2_subgroups().clone())
}

/// (p, d, assume) for the growth-membership routes. Primes mix the twelve
/// with stored divisor data and a spread of generic ones.
pub fn arb_membership_case() -> impl Strategy<Value = (u64, u64, bool)> {
    let generic = vec![
        23u64, 29, 31, 41, 47, 53, 59, 61, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127,
        131, 137, 139, 149,
    ];
    let prime = prop_oneof![
        prop::sample::select(rqd::SPECIAL_PRIMES.to_vec()),
        prop::sample::select(generic),
    ];
    (prime, 1u64..=500, any::<bool>())
}

/// (d, multiplier, assume) for monotonicity under divisibility.
pub fn arb_monotone_case() -> impl Strategy<Value = (u64, u64, bool)> {
    (1u64..=200, 1u64..=5, any::<bool>())
}

// ---- reference constructions ---------------------------------------------------------

/// Canonical sorted packed element list; two subgroups of one ambient are
/// equal iff these agree.
pub fn elem_list(g: &MatGroup) -> Vec<u64> {
    let mut v: Vec<u64> = g.elements().map(|m| m.packed()).collect();
    v.sort_unstable();
    v
}

/// Every subgroup of the ambient, by breadth-first closure extension.
/// Exponential in principle; only used on ambients of order ≤ 100 or so.
pub fn all_subgroups(ambient: &MatGroup) -> Vec<MatGroup> {
    let elems: Vec<Mat2> = ambient.elements().collect();
    let trivial = MatGroup::trivial(ambient.modulus() as u64).expect("valid modulus");
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    seen.insert(elem_list(&trivial));
    let mut queue = vec![trivial.clone()];
    let mut out = vec![trivial];
    while let Some(s) = queue.pop() {
        for g in &elems {
            if s.contains(g) {
                continue;
            }
            let mut gens = s.generators().to_vec();
            gens.push(*g);
            let t = MatGroup::closure(&gens).expect("closure inside a finite ambient");
            if seen.insert(elem_list(&t)) {
                queue.push(t.clone());
                out.push(t);
            }
        }
    }
    out
}

fn mod2_subgroups() -> &'static Vec<MatGroup> {
    static ALL: OnceLock<Vec<MatGroup>> = OnceLock::new();
    ALL.get_or_init(|| {
        let gl2f2 = build_named(&NamedGroupSpec::new(GroupName::Gl2, 2)).expect("GL2(F2)");
        let subs = all_subgroups(&gl2f2);
        assert_eq!(subs.len(), 6, "GL2(F2) has exactly six subgroups");
        subs
    })
}

fn mod4_subgroups() -> &'static Vec<MatGroup> {
    static ALL: OnceLock<Vec<MatGroup>> = OnceLock::new();
    ALL.get_or_init(|| {
        all_subgroups(&named_group_at(GroupName::Gl2, 4).expect("GL2(Z/4)"))
    })
}

/// Classes of mod-4 subgroups over the base, fused by conjugation under the
/// full preimage of the base's normalizer. Built entirely from element-set
/// filtering of the complete mod-4 subgroup list, so it shares nothing with
/// the production enumeration.
pub fn oracle_lift_classes(base: &MatGroup, surjective_only: bool) -> Vec<BTreeSet<Vec<u64>>> {
    assert_eq!(base.modulus(), 2, "oracle only speaks modulus 2 -> 4");
    let gl2f2 = build_named(&NamedGroupSpec::new(GroupName::Gl2, 2)).expect("GL2(F2)");
    let normalizer = gl2f2.normalizer_of(base).expect("same modulus");
    let mut nhat_gens: Vec<Mat2> = normalizer
        .elements()
        .map(|g| Mat2::new(g.entries().map(|v| v as i64), 4).expect("entrywise lift"))
        .collect();
    for idx in 0..4 {
        let mut e = [1i64, 0, 0, 1];
        e[idx] += 2;
        nhat_gens.push(Mat2::new(e, 4).expect("kernel generator"));
    }
    let nhat = MatGroup::closure(&nhat_gens).expect("lifted normalizer");
    assert_eq!(nhat.order(), 16 * normalizer.order(), "kernel has order 16");
    let nhat_elems: Vec<Mat2> = nhat.elements().collect();

    let base_elems: BTreeSet<u64> = elem_list(base).into_iter().collect();
    let mut classes: Vec<BTreeSet<Vec<u64>>> = Vec::new();
    let mut assigned: BTreeSet<Vec<u64>> = BTreeSet::new();
    for s in mod4_subgroups() {
        let key = elem_list(s);
        if assigned.contains(&key) {
            continue;
        }
        let red = elem_list(&s.reduce(2).expect("2 divides 4"));
        let over = if surjective_only {
            red.len() == base_elems.len() && red.iter().all(|w| base_elems.contains(w))
        } else {
            red.iter().all(|w| base_elems.contains(w))
        };
        if !over {
            continue;
        }
        let mut class = BTreeSet::new();
        for x in &nhat_elems {
            class.insert(elem_list(&s.conjugate_by(x).expect("same modulus")));
        }
        assigned.extend(class.iter().cloned());
        classes.push(class);
    }
    classes
}

// ---- property bodies -----------------------------------------------------------------

/// |orbit(v)| · |Stab(v)| = |G|.
pub fn orbit_stabilizer_identity(g: &MatGroup, v: &Vec2) {
    let orbit = g.orbit(v).expect("same modulus");
    let stab = g.stabilizer(v).expect("same modulus");
    assert_eq!(
        orbit.len() as u64 * stab.order(),
        g.order(),
        "orbit-stabilizer identity failed: |orbit| = {}, |stab| = {}, |G| = {}",
        orbit.len(),
        stab.order(),
        g.order()
    );
}

/// The orbits of the full plane partition all m² vectors.
pub fn orbit_lengths_cover_the_plane(g: &MatGroup) {
    let dec = g.orbit_decomposition(None).expect("no vector-order filter");
    let m = g.modulus() as u64;
    let total: u64 = dec.orbits.iter().map(|o| o.length).sum();
    assert_eq!(total, m * m, "orbit lengths must sum to the plane size");
    assert_eq!(dec.total, m * m);
}

/// Conjugate groups have identical orbit-length multisets.
pub fn conjugation_preserves_orbit_lengths(g: &MatGroup, x: &Mat2) {
    let conj = g.conjugate_by(x).expect("invertible conjugator");
    assert_eq!(conj.order(), g.order());
    let a = g.orbit_decomposition(None).expect("decomposition").lengths();
    let b = conj.orbit_decomposition(None).expect("decomposition").lengths();
    assert_eq!(a, b, "conjugation changed the orbit-length multiset");
}

/// Reduction composes: (G mod d1) mod d2 = G mod d2, identity at the own
/// modulus, image order divides the group order, generators map into the
/// image.
pub fn reduction_is_functorial(g: &MatGroup, d1: u64, d2: u64) {
    let one = g.reduce(d1).expect("d1 divides the modulus");
    let two = one.reduce(d2).expect("d2 divides d1");
    let direct = g.reduce(d2).expect("d2 divides the modulus");
    assert_eq!(elem_list(&two), elem_list(&direct), "reduction must compose");
    let same = g.reduce(g.modulus() as u64).expect("modulus divides itself");
    assert_eq!(elem_list(&same), elem_list(g), "reduction at own modulus is the identity");
    assert_eq!(g.order() % one.order(), 0, "image order must divide the group order");
    for gen in g.generators() {
        assert!(one.contains(&gen.reduce(d1).expect("divisor")), "generator image missing");
    }
}

/// The structured census agrees with the plain subgroup walk: same classes
/// by (fingerprint, conjugate count), as multisets.
pub fn census_matches_brute_walk(g: &MatGroup) {
    static VERIFIED: OnceLock<Mutex<BTreeSet<(u32, Vec<u64>)>>> = OnceLock::new();
    let key = (g.modulus(), elem_list(g));
    if !VERIFIED.get_or_init(Default::default).lock().unwrap().insert(key) {
        return;
    }
    let census = subgroup_census(g).expect("ambient within bounds");
    let brute = brute_census(g).expect("ambient within bounds");
    assert_eq!(census.len(), brute.len(), "class counts differ at |G| = {}", g.order());
    let mut remaining: Vec<(Fingerprint, u64)> =
        brute.iter().map(|(rep, count)| (fingerprint_of(rep), *count)).collect();
    for cls in &census {
        assert!(cls.rep.elements().all(|e| g.contains(&e)), "census rep not inside the ambient");
        let probe = (cls.fingerprint.clone(), cls.conjugate_count);
        let pos = remaining
            .iter()
            .position(|x| *x == probe)
            .unwrap_or_else(|| panic!("census class {:?} unmatched in the plain walk", probe.0));
        remaining.swap_remove(pos);
    }
    assert!(remaining.is_empty());
}

/// Both production lift routes reproduce the element-set oracle exactly:
/// same class count, bijective correspondence, same class sizes.
pub fn lift_enumeration_matches_oracle(base: &MatGroup) {
    static VERIFIED: OnceLock<Mutex<BTreeSet<Vec<u64>>>> = OnceLock::new();
    if !VERIFIED.get_or_init(Default::default).lock().unwrap().insert(elem_list(base)) {
        return;
    }
    for (route, surjective_only) in [
        (LiftRoute::Reference, true),
        (LiftRoute::Cocycle, true),
        (LiftRoute::Reference, false),
    ] {
        let classes = enumerate_lifts(base, route, surjective_only).expect("tiny modulus");
        let oracle = oracle_lift_classes(base, surjective_only);
        assert_eq!(
            classes.len(),
            oracle.len(),
            "class count, route {route:?}, surjective_only {surjective_only}"
        );
        let mut used = vec![false; oracle.len()];
        for c in classes.iter() {
            let rep = elem_list(&c.rep);
            let pos = oracle
                .iter()
                .position(|cl| cl.contains(&rep))
                .expect("enumerated representative must lie in some oracle class");
            assert!(!used[pos], "two enumerated classes fused into one oracle class");
            used[pos] = true;
            assert_eq!(c.subgroup_count, oracle[pos].len() as u64, "class size");
        }
    }
}

/// The divisor-table route and the branch-rule route agree everywhere.
pub fn membership_routes_agree(p: u64, d: u64, assume: bool) {
    let table = rqd::rq_membership(p, d, assume).expect("valid arguments");
    let rules = rqd::rq_membership_by_rules(p, d, assume).expect("valid arguments");
    assert_eq!(table, rules, "routes disagree at p = {p}, d = {d}, assume = {assume}");
}

/// Growth primes only accumulate when the degree grows along divisibility.
pub fn growth_set_monotone_under_divisibility(d: u64, k: u64, assume: bool) {
    let small = rqd::rq(d, assume).expect("valid degree");
    let big = rqd::rq(d * k, assume).expect("valid degree");
    for p in &small.members {
        assert!(big.members.contains(p), "member {p} of rq({d}) lost at rq({})", d * k);
    }
    for p in &small.unknown {
        assert!(
            big.members.contains(p) || big.unknown.contains(p),
            "unknown {p} of rq({d}) vanished at rq({})",
            d * k
        );
    }
}
