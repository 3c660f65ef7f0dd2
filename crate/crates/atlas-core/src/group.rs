//! Finite subgroups of GL₂(ℤ/mℤ) as explicit element sets.
//!
//! A [`MatGroup`] stores its elements as sorted packed words (see
//! [`Mat2::packed`]) plus a hash set for membership, and remembers a
//! generating set. Everything downstream — orbits, stabilizers, normal
//! cores, quotient typing, censuses — works on this representation.
//!
//! Determinism: element lists are kept in increasing packed order, which is
//! lexicographic on matrix entries, so identical inputs yield bitwise
//! identical outputs regardless of hash iteration order.

use crate::error::AlgebraError;
use crate::isotype::{self, GroupIsoType, SmallGroup};
use crate::residue::{Mat2, Vec2};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

type Result<T> = std::result::Result<T, AlgebraError>;

/// Hard ceiling on materialized element counts; closures and censuses fail
/// with `SizeCapExceeded` rather than grow past it.
pub const DEFAULT_ELEMENT_CAP: u64 = 10_000_000;

// ---- packed-word arithmetic -------------------------------------------------
//
// Matrices travel through the hot paths as u64 words with 16-bit lanes
// (a, b, c, d). The helpers below avoid Mat2's per-call validation.

#[inline]
pub(crate) fn lanes(x: u64) -> [u64; 4] {
    [(x >> 48) & 0xFFFF, (x >> 32) & 0xFFFF, (x >> 16) & 0xFFFF, x & 0xFFFF]
}

#[inline]
pub(crate) fn pack(e: [u64; 4]) -> u64 {
    (e[0] << 48) | (e[1] << 32) | (e[2] << 16) | e[3]
}

#[inline]
pub(crate) fn pmul(x: u64, y: u64, m: u64) -> u64 {
    let a = lanes(x);
    let b = lanes(y);
    pack([
        (a[0] * b[0] + a[1] * b[2]) % m,
        (a[0] * b[1] + a[1] * b[3]) % m,
        (a[2] * b[0] + a[3] * b[2]) % m,
        (a[2] * b[1] + a[3] * b[3]) % m,
    ])
}

#[inline]
pub(crate) fn pid(m: u64) -> u64 {
    pack([1 % m, 0, 0, 1 % m])
}

/// Inverse of a packed word. Panics if the determinant is not a unit; inside
/// a group that cannot happen.
pub(crate) fn pinv(x: u64, m: u64) -> u64 {
    Mat2::from_packed(x, m as u32)
        .inv()
        .expect("group element must be invertible")
        .packed()
}

/// g · x · g⁻¹ on packed words.
#[inline]
pub(crate) fn pconj(x: u64, g: u64, g_inv: u64, m: u64) -> u64 {
    pmul(pmul(g, x, m), g_inv, m)
}

/// Matrix action on a packed vector (x << 16 | y).
#[inline]
pub(crate) fn papply(g: u64, v: u32, m: u64) -> u32 {
    let e = lanes(g);
    let x = (v >> 16) as u64;
    let y = (v & 0xFFFF) as u64;
    ((((e[0] * x + e[1] * y) % m) as u32) << 16) | ((e[2] * x + e[3] * y) % m) as u32
}

// ---- element-set hashing ----------------------------------------------------

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Order-independent identity key for a subgroup, used to deduplicate the
/// very large conjugate families met during censuses without storing every
/// element list. 128 bits of hash plus the exact order; representatives keep
/// full element lists, so a collision would surface as a wrong fingerprint
/// downstream rather than pass silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct SubgroupKey {
    pub order: u32,
    pub h1: u64,
    pub h2: u64,
}

pub(crate) fn subgroup_key<I: IntoIterator<Item = u64>>(elems: I) -> SubgroupKey {
    let mut n = 0u32;
    let mut h1 = 0u64;
    let mut h2 = 0u64;
    for e in elems {
        n += 1;
        h1 = h1.wrapping_add(splitmix64(e ^ 0x243F6A8885A308D3));
        h2 ^= splitmix64(e ^ 0x13198A2E03707344);
    }
    SubgroupKey { order: n, h1, h2 }
}

// ---- MatGroup ---------------------------------------------------------------

/// A finite subgroup of GL₂(ℤ/mℤ), materialized.
#[derive(Debug, Clone)]
pub struct MatGroup {
    m: u32,
    gens: Vec<Mat2>,
    elems: Vec<u64>,
    set: FxHashSet<u64>,
}

impl PartialEq for MatGroup {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.elems == other.elems
    }
}
impl Eq for MatGroup {}

impl MatGroup {
    /// The trivial group {I} mod m.
    pub fn trivial(modulus: u64) -> Result<MatGroup> {
        let id = Mat2::identity(modulus)?;
        Ok(MatGroup::from_sorted_packed(id.modulus(), vec![id.packed()], vec![]))
    }

    /// Closure of a nonempty generating set under multiplication, with the
    /// default element cap.
    pub fn closure(gens: &[Mat2]) -> Result<MatGroup> {
        MatGroup::closure_with_cap(gens, DEFAULT_ELEMENT_CAP)
    }

    pub fn closure_with_cap(gens: &[Mat2], cap: u64) -> Result<MatGroup> {
        let first = gens.first().ok_or_else(|| {
            AlgebraError::Precondition("closure requires at least one generator".into())
        })?;
        let m = first.modulus();
        for g in gens {
            if g.modulus() != m {
                return Err(AlgebraError::ModulusMismatch(m as u64, g.modulus() as u64));
            }
            if !g.is_invertible() {
                return Err(AlgebraError::NonInvertible {
                    value: g.det().value() as u64,
                    modulus: m as u64,
                });
            }
        }
        let mw = m as u64;
        let gen_words: Vec<u64> = {
            let mut ws: Vec<u64> = gens.iter().map(|g| g.packed()).collect();
            ws.sort_unstable();
            ws.dedup();
            ws
        };
        let mut set = FxHashSet::default();
        let mut queue: Vec<u64> = vec![pid(mw)];
        set.insert(pid(mw));
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in &gen_words {
                let y = pmul(x, g, mw);
                if set.insert(y) {
                    if set.len() as u64 > cap {
                        return Err(AlgebraError::SizeCapExceeded { cap });
                    }
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        let keep: Vec<Mat2> = gen_words
            .iter()
            .filter(|&&w| w != pid(mw))
            .map(|&w| Mat2::from_packed(w, m))
            .collect();
        Ok(MatGroup { m, gens: keep, elems: queue, set })
    }

    /// Internal constructor for element sets already known to be closed
    /// (orbits of groups under conjugation, direct products of structure we
    /// built, …). Debug builds spot-check closedness.
    pub(crate) fn from_sorted_packed(m: u32, elems: Vec<u64>, gens: Vec<Mat2>) -> MatGroup {
        let set: FxHashSet<u64> = elems.iter().copied().collect();
        debug_assert!(set.len() == elems.len());
        debug_assert!(set.contains(&pid(m as u64)));
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        #[cfg(debug_assertions)]
        {
            let mw = m as u64;
            for (i, &a) in elems.iter().enumerate().step_by(1 + elems.len() / 16) {
                let b = elems[(i * 7 + 1) % elems.len()];
                debug_assert!(set.contains(&pmul(a, b, mw)), "element set not closed");
            }
        }
        let group = MatGroup { m, gens, elems, set };
        debug_assert!(group.gens.iter().all(|g| group.set.contains(&g.packed())));
        group
    }

    /// Build from an explicit element list, verifying group-ness by closure.
    pub fn from_elements(elems: &[Mat2]) -> Result<MatGroup> {
        let g = MatGroup::closure_with_cap(elems, elems.len() as u64)?;
        if g.order() == elems.len() as u64 {
            let mut g = g;
            g.gens = g.find_small_generating_set();
            Ok(g)
        } else {
            Err(AlgebraError::Precondition(format!(
                "element list of size {} is not closed under multiplication",
                elems.len()
            )))
        }
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.gens
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        g.modulus() == self.m && self.set.contains(&g.packed())
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        self.elems.iter().map(|&w| Mat2::from_packed(w, self.m))
    }

    /// Canonical (sorted) packed element list.
    pub(crate) fn packed_elems(&self) -> &[u64] {
        &self.elems
    }

    pub(crate) fn contains_packed(&self, w: u64) -> bool {
        self.set.contains(&w)
    }

    pub(crate) fn gen_words(&self) -> Vec<u64> {
        if self.gens.is_empty() {
            vec![pid(self.m as u64)]
        } else {
            self.gens.iter().map(|g| g.packed()).collect()
        }
    }

    pub(crate) fn key(&self) -> SubgroupKey {
        subgroup_key(self.elems.iter().copied())
    }

    pub(crate) fn with_small_generating_set(mut self) -> MatGroup {
        self.gens = self.find_small_generating_set();
        self
    }

    pub fn is_subgroup_of(&self, other: &MatGroup) -> bool {
        self.m == other.m && self.elems.iter().all(|w| other.set.contains(w))
    }

    /// Greedy small generating set: scan elements in canonical order, keep
    /// those that grow the closure.
    pub(crate) fn find_small_generating_set(&self) -> Vec<Mat2> {
        let mw = self.m as u64;
        let mut have: FxHashSet<u64> = FxHashSet::default();
        have.insert(pid(mw));
        let mut gens: Vec<u64> = Vec::new();
        for &w in &self.elems {
            if have.contains(&w) {
                continue;
            }
            gens.push(w);
            // grow `have` to the closure of the current generator list
            let mut queue: Vec<u64> = have.iter().copied().collect();
            have.insert(w);
            queue.push(w);
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for &g in &gens {
                    let y = pmul(x, g, mw);
                    if have.insert(y) {
                        queue.push(y);
                    }
                }
            }
            if have.len() == self.elems.len() {
                break;
            }
        }
        gens.into_iter().map(|w| Mat2::from_packed(w, self.m)).collect()
    }

    /// x G x⁻¹ for an invertible x over the same modulus.
    pub fn conjugate_by(&self, x: &Mat2) -> Result<MatGroup> {
        if x.modulus() != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, x.modulus() as u64));
        }
        let xi = x.inv()?;
        let mw = self.m as u64;
        let (xw, xiw) = (x.packed(), xi.packed());
        let mut elems: Vec<u64> =
            self.elems.iter().map(|&w| pconj(w, xw, xiw, mw)).collect();
        elems.sort_unstable();
        let gens = self
            .gens
            .iter()
            .map(|g| Mat2::from_packed(pconj(g.packed(), xw, xiw, mw), self.m))
            .collect();
        Ok(MatGroup::from_sorted_packed(self.m, elems, gens))
    }

    /// Reduction mod n (n | m): the image group, with the image generators.
    pub fn reduce(&self, new_modulus: u64) -> Result<MatGroup> {
        let n = crate::residue::check_modulus(new_modulus)?;
        if self.m % n != 0 {
            return Err(AlgebraError::NonDivisor(n as u64, self.m as u64));
        }
        let mut elems: Vec<u64> = self
            .elems
            .iter()
            .map(|&w| Mat2::from_packed(w, self.m).reduce(n as u64).unwrap().packed())
            .collect();
        elems.sort_unstable();
        elems.dedup();
        let mut gens: Vec<Mat2> = self
            .gens
            .iter()
            .map(|g| g.reduce(n as u64).unwrap())
            .filter(|g| !g.is_identity())
            .collect();
        gens.sort();
        gens.dedup();
        Ok(MatGroup::from_sorted_packed(n, elems, gens))
    }

    // ---- orbits -------------------------------------------------------------

    /// Orbit of v under the group action, sorted.
    pub fn orbit(&self, v: &Vec2) -> Result<Vec<Vec2>> {
        if v.modulus() != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, v.modulus() as u64));
        }
        let mut orbit = self.orbit_packed(v.packed());
        orbit.sort_unstable();
        Ok(orbit.into_iter().map(|w| Vec2::from_packed(w, self.m)).collect())
    }

    /// Orbit computed from generators only; never touches the element list,
    /// so it works for groups far too large to materialize.
    pub(crate) fn orbit_packed(&self, start: u32) -> Vec<u32> {
        let mw = self.m as u64;
        let gens = self.gen_words();
        let mut seen: FxHashSet<u32> = FxHashSet::default();
        seen.insert(start);
        let mut queue = vec![start];
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &g in &gens {
                let w = papply(g, v, mw);
                if seen.insert(w) {
                    queue.push(w);
                }
            }
        }
        queue
    }

    /// Stabilizer subgroup of v, by scanning the element list.
    pub fn stabilizer(&self, v: &Vec2) -> Result<MatGroup> {
        if v.modulus() != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, v.modulus() as u64));
        }
        let mw = self.m as u64;
        let vw = v.packed();
        let elems: Vec<u64> =
            self.elems.iter().copied().filter(|&g| papply(g, vw, mw) == vw).collect();
        let mut group = MatGroup::from_sorted_packed(self.m, elems, vec![]);
        group.gens = group.find_small_generating_set();
        Ok(group)
    }

    /// Orbit partition of the vectors of exact additive order `vector_order`
    /// (all m² vectors when `None`). Orbits are listed by their lexicographic
    /// minimum, in increasing order of that representative.
    pub fn orbit_decomposition(&self, vector_order: Option<u64>) -> Result<OrbitDecomposition> {
        let mw = self.m as u64;
        if let Some(n) = vector_order {
            if n == 0 || mw % n != 0 {
                return Err(AlgebraError::NonDivisor(n, mw));
            }
        }
        let mut wanted: Vec<u32> = Vec::new();
        for x in 0..self.m {
            for y in 0..self.m {
                let v = Vec2::raw(x, y, self.m);
                if vector_order.is_none_or(|n| v.order() == n) {
                    wanted.push(v.packed());
                }
            }
        }
        let mut visited: FxHashSet<u32> = FxHashSet::default();
        let mut orbits = Vec::new();
        let mut total = 0u64;
        for &start in &wanted {
            if visited.contains(&start) {
                continue;
            }
            let orbit = self.orbit_packed(start);
            for &w in &orbit {
                visited.insert(w);
            }
            total += orbit.len() as u64;
            orbits.push(Orbit {
                representative: Vec2::from_packed(start, self.m),
                length: orbit.len() as u64,
            });
        }
        Ok(OrbitDecomposition { modulus: self.m, vector_order, orbits, total })
    }

    // ---- normality, cores, quotients ----------------------------------------

    /// True if every generator of `self` normalizes `sub` (hence all of
    /// `self` does).
    pub fn normalizes(&self, sub: &MatGroup) -> bool {
        if sub.m != self.m {
            return false;
        }
        let mw = self.m as u64;
        self.gen_words().iter().all(|&g| {
            let gi = pinv(g, mw);
            sub.gen_words().iter().all(|&h| sub.set.contains(&pconj(h, g, gi, mw)))
        })
    }

    /// Largest subgroup of `sub` that is normal in `self`: the intersection
    /// of the conjugates of `sub`, computed as a decreasing fixpoint.
    pub fn normal_core(&self, sub: &MatGroup) -> Result<MatGroup> {
        if sub.m != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, sub.m as u64));
        }
        if !sub.is_subgroup_of(self) {
            return Err(AlgebraError::Precondition(
                "normal_core: second argument must be a subgroup of the first".into(),
            ));
        }
        let mw = self.m as u64;
        let gens: Vec<(u64, u64)> =
            self.gen_words().iter().map(|&g| (g, pinv(g, mw))).collect();
        let mut core: FxHashSet<u64> = sub.set.clone();
        loop {
            // keep only elements whose generator-conjugates stay inside
            let survivors: Vec<u64> = core
                .iter()
                .copied()
                .filter(|&x| gens.iter().all(|&(g, gi)| core.contains(&pconj(x, g, gi, mw))))
                .collect();
            if survivors.len() == core.len() {
                break;
            }
            core = survivors.into_iter().collect();
        }
        // The fixpoint is conjugation-stable under generators and closed
        // under multiplication (it started as a group and intersections of
        // conjugate groups are groups), hence the normal core.
        let mut elems: Vec<u64> = core.into_iter().collect();
        elems.sort_unstable();
        let mut group = MatGroup::from_sorted_packed(self.m, elems, vec![]);
        group.gens = group.find_small_generating_set();
        Ok(group)
    }

    /// Normal closure in `self` of the given seed elements.
    pub(crate) fn normal_closure_of(&self, seeds: &[u64]) -> MatGroup {
        let mw = self.m as u64;
        let gens: Vec<(u64, u64)> =
            self.gen_words().iter().map(|&g| (g, pinv(g, mw))).collect();
        let mut set: FxHashSet<u64> = FxHashSet::default();
        set.insert(pid(mw));
        let mut queue = vec![pid(mw)];
        let mut pending: Vec<u64> = seeds.to_vec();
        while let Some(s) = pending.pop() {
            if !set.insert(s) {
                continue;
            }
            queue.push(s);
            let mut head = 0;
            // close under multiplication by everything present, then feed
            // generator-conjugates of the new elements back in
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for i in 0..queue.len() {
                    let y = pmul(x, queue[i], mw);
                    if set.insert(y) {
                        queue.push(y);
                    }
                }
            }
            for &x in &queue {
                for &(g, gi) in &gens {
                    let c = pconj(x, g, gi, mw);
                    if !set.contains(&c) {
                        pending.push(c);
                    }
                }
            }
        }
        let mut elems: Vec<u64> = set.into_iter().collect();
        elems.sort_unstable();
        let mut group = MatGroup::from_sorted_packed(self.m, elems, vec![]);
        group.gens = group.find_small_generating_set();
        group
    }

    /// Derived subgroup [G, G]: the normal closure of the generator
    /// commutators.
    pub fn derived_subgroup(&self) -> MatGroup {
        let mw = self.m as u64;
        let gens = self.gen_words();
        let mut seeds = Vec::new();
        for &a in &gens {
            for &b in &gens {
                let c = pmul(pmul(a, b, mw), pinv(pmul(b, a, mw), mw), mw);
                seeds.push(c);
            }
        }
        self.normal_closure_of(&seeds)
    }

    pub fn is_abelian(&self) -> bool {
        let mw = self.m as u64;
        let gens = self.gen_words();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| pmul(a, b, mw) == pmul(b, a, mw)))
    }

    pub fn is_solvable(&self) -> bool {
        let mut current = self.clone();
        loop {
            if current.order() == 1 {
                return true;
            }
            let next = current.derived_subgroup();
            if next.order() == current.order() {
                return false;
            }
            current = next;
        }
    }

    /// Coset labeling for a normal subgroup: representatives (first rep is
    /// the identity) and the element → coset-index map.
    pub(crate) fn coset_table(&self, n: &MatGroup) -> (Vec<u64>, FxHashMap<u64, u32>) {
        let mw = self.m as u64;
        debug_assert!(n.is_subgroup_of(self));
        let mut reps: Vec<u64> = Vec::with_capacity((self.order() / n.order()) as usize);
        let mut map: FxHashMap<u64, u32> =
            FxHashMap::with_capacity_and_hasher(self.elems.len(), Default::default());
        // elems is sorted by packed value, which need not start with the
        // identity; seed it so coset 0 is the identity coset.
        for &w in std::iter::once(&pid(mw)).chain(self.elems.iter()) {
            if map.contains_key(&w) {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(w);
            for &x in &n.elems {
                map.insert(pmul(w, x, mw), id);
            }
        }
        (reps, map)
    }

    /// Multiplication table of G/N as an abstract group. N must be normal.
    pub(crate) fn quotient_small_group(&self, n: &MatGroup) -> Result<SmallGroup> {
        if n.m != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, n.m as u64));
        }
        if !n.is_subgroup_of(self) || !self.normalizes(n) {
            return Err(AlgebraError::Precondition(
                "quotient requires a normal subgroup of the group".into(),
            ));
        }
        let mw = self.m as u64;
        let (reps, map) = self.coset_table(n);
        let k = reps.len();
        let mut table = vec![0u16; k * k];
        for i in 0..k {
            for j in 0..k {
                table[i * k + j] = map[&pmul(reps[i], reps[j], mw)] as u16;
            }
        }
        Ok(SmallGroup::from_table(k, table))
    }

    /// Isomorphism-type data of G/N, with a library name when |G/N| ≤ 48 and
    /// the type is recognized.
    pub fn quotient_iso_type(&self, n: &MatGroup) -> Result<GroupIsoType> {
        Ok(isotype::identify(&self.quotient_small_group(n)?))
    }

    /// Type of G / core(Stab_G(v)): the Galois group of the Galois closure
    /// of the field cut out by the stabilizer of v.
    pub fn galois_closure_quotient(&self, v: &Vec2) -> Result<GroupIsoType> {
        let stab = self.stabilizer(v)?;
        let core = self.normal_core(&stab)?;
        self.quotient_iso_type(&core)
    }

    /// Invariant factors d₁ | d₂ | … of the abelianization G/[G,G].
    pub fn abelianization_invariants(&self) -> Vec<u64> {
        let derived = self.derived_subgroup();
        let q = self
            .quotient_small_group(&derived)
            .expect("derived subgroup is always normal");
        q.abelian_invariants()
    }

    /// Whether G has a cyclic quotient of order a, i.e. whether a divides
    /// the exponent of the abelianization.
    pub fn has_cyclic_quotient_of_order(&self, a: u64) -> bool {
        if a == 0 {
            return false;
        }
        let inv = self.abelianization_invariants();
        let exponent = inv.last().copied().unwrap_or(1);
        exponent % a == 0
    }

    /// All normal subgroups, as joins of normal closures of single elements.
    pub fn normal_subgroups(&self) -> Vec<MatGroup> {
        let mut found: FxHashMap<SubgroupKey, MatGroup> = FxHashMap::default();
        let trivial = MatGroup::from_sorted_packed(self.m, vec![pid(self.m as u64)], vec![]);
        found.insert(trivial.key(), trivial);
        let mut worklist: Vec<MatGroup> = Vec::new();
        for &w in &self.elems {
            let ncl = self.normal_closure_of(&[w]);
            let key = ncl.key();
            if !found.contains_key(&key) {
                found.insert(key, ncl.clone());
                worklist.push(ncl);
            }
        }
        // close under joins; the join of normal subgroups is generated (as a
        // plain subgroup) by their union and is again normal
        let mut closed = false;
        while !closed {
            closed = true;
            let current: Vec<MatGroup> = found.values().cloned().collect();
            for a in &current {
                for b in &current {
                    if a.order() >= b.order() || b.is_subgroup_of(a) || a.is_subgroup_of(b) {
                        continue;
                    }
                    let mut gens = a.gens.clone();
                    gens.extend(b.gens.iter().cloned());
                    if gens.is_empty() {
                        continue;
                    }
                    let join = MatGroup::closure_with_cap(&gens, self.order())
                        .expect("join of normal subgroups stays inside the group");
                    let key = join.key();
                    if !found.contains_key(&key) {
                        found.insert(key, join);
                        closed = false;
                    }
                }
            }
        }
        let mut out: Vec<MatGroup> = found.into_values().collect();
        out.sort_by(|x, y| (x.order(), x.elems.clone()).cmp(&(y.order(), y.elems.clone())));
        out
    }

    // ---- lines --------------------------------------------------------------

    /// Representatives of the lines of F_p² fixed (as sets) by the group.
    /// Canonical representatives: (1, y) for y in 0..p, then (0, 1).
    /// Requires a prime modulus.
    pub fn stable_lines(&self) -> Result<Vec<Vec2>> {
        let p = self.require_prime_modulus("stable_lines")?;
        Ok(self
            .line_representatives(p)
            .into_iter()
            .filter(|rep| self.line_is_stable(rep))
            .collect())
    }

    /// Unordered pairs of distinct lines stabilized setwise (the pair may be
    /// swapped by some elements). Requires a prime modulus.
    pub fn stable_line_pairs(&self) -> Result<Vec<(Vec2, Vec2)>> {
        let p = self.require_prime_modulus("stable_line_pairs")?;
        let reps = self.line_representatives(p);
        let mut out = Vec::new();
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if self.line_pair_is_stable(&reps[i], &reps[j]) {
                    out.push((reps[i], reps[j]));
                }
            }
        }
        Ok(out)
    }

    fn require_prime_modulus(&self, what: &str) -> Result<u32> {
        let m = self.m as u64;
        let mut q = 2u64;
        while q * q <= m {
            if m % q == 0 && m != q {
                return Err(AlgebraError::Precondition(format!(
                    "{what} requires a prime modulus, got {m}"
                )));
            }
            q += 1;
        }
        Ok(self.m)
    }

    fn line_representatives(&self, p: u32) -> Vec<Vec2> {
        let mut reps: Vec<Vec2> = (0..p).map(|y| Vec2::raw(1, y, p)).collect();
        reps.push(Vec2::raw(0, 1, p));
        reps
    }

    fn on_line(&self, rep: &Vec2, w: u32) -> bool {
        // w lies on the line spanned by rep iff the 2×2 determinant vanishes
        let p = self.m as u64;
        let (x1, y1) = (rep.x() as u64, rep.y() as u64);
        let (x2, y2) = ((w >> 16) as u64, (w & 0xFFFF) as u64);
        (x1 * y2 + p * p - y1 * x2) % p == 0
    }

    fn line_is_stable(&self, rep: &Vec2) -> bool {
        let mw = self.m as u64;
        let v = rep.packed();
        self.gen_words().iter().all(|&g| self.on_line(rep, papply(g, v, mw)))
    }

    fn line_pair_is_stable(&self, a: &Vec2, b: &Vec2) -> bool {
        let mw = self.m as u64;
        self.gen_words().iter().all(|&g| {
            let ia = papply(g, a.packed(), mw);
            let ib = papply(g, b.packed(), mw);
            (self.on_line(a, ia) && self.on_line(b, ib))
                || (self.on_line(b, ia) && self.on_line(a, ib))
        })
    }

    // ---- normalizers and transversals ----------------------------------------

    /// Normalizer of `sub` inside `self` (`sub` need not be contained in
    /// `self`, but moduli must match). Cost: one pass over `self`'s
    /// elements, testing one transversal element per `sub`-coset.
    pub fn normalizer_of(&self, sub: &MatGroup) -> Result<MatGroup> {
        if sub.m != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, sub.m as u64));
        }
        let mw = self.m as u64;
        let sub_gens = sub.gen_words();
        let mut claimed: FxHashSet<u64> = FxHashSet::default();
        let mut elems: Vec<u64> = Vec::new();
        for &g in &self.elems {
            if claimed.contains(&g) {
                continue;
            }
            let gi = pinv(g, mw);
            let ok = sub_gens.iter().all(|&h| sub.set.contains(&pconj(h, g, gi, mw)));
            // mark the whole coset g·(sub ∩ self); when sub ⊆ self this is a
            // full sub-coset and every member answers the same way
            let mut coset: Vec<u64> = Vec::new();
            for &s in &sub.elems {
                let x = pmul(g, s, mw);
                if self.set.contains(&x) && claimed.insert(x) {
                    coset.push(x);
                }
            }
            if ok {
                elems.extend(coset);
            }
        }
        elems.sort_unstable();
        let mut group = MatGroup::from_sorted_packed(self.m, elems, vec![]);
        group.gens = group.find_small_generating_set();
        Ok(group)
    }

    /// Left-coset representatives of `sub` in `self` (identity first).
    pub(crate) fn left_transversal_of(&self, sub: &MatGroup) -> Vec<u64> {
        let mw = self.m as u64;
        let mut claimed: FxHashSet<u64> = FxHashSet::default();
        let mut reps = Vec::with_capacity((self.order() / sub.order()) as usize);
        // identity first, so reps[0] names the subgroup's own coset
        for &g in std::iter::once(&pid(mw)).chain(self.elems.iter()) {
            if claimed.contains(&g) {
                continue;
            }
            reps.push(g);
            for &s in &sub.elems {
                claimed.insert(pmul(g, s, mw));
            }
        }
        reps
    }

    /// Element-order histogram (order, count), ascending.
    pub fn element_order_histogram(&self) -> Vec<(u64, u64)> {
        let mut counts: FxHashMap<u64, u64> = FxHashMap::default();
        for g in self.elements() {
            *counts.entry(g.element_order().expect("group elements are invertible")).or_insert(0) +=
                1;
        }
        let mut out: Vec<(u64, u64)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Size of the image of the determinant map.
    pub fn det_image_size(&self) -> u64 {
        let mut dets: FxHashSet<u32> = FxHashSet::default();
        for g in self.elements() {
            dets.insert(g.det().value());
        }
        dets.len() as u64
    }
}

/// One orbit of the vector action: its lexicographically smallest member and
/// its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    #[serde(serialize_with = "serialize_vec2")]
    pub representative: Vec2,
    pub length: u64,
}

fn serialize_vec2<S: serde::Serializer>(v: &Vec2, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&v.x())?;
    seq.serialize_element(&v.y())?;
    seq.end()
}

/// Orbit partition of a layer of (ℤ/mℤ)².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub modulus: u32,
    /// `Some(n)`: only vectors of exact additive order n were partitioned.
    pub vector_order: Option<u64>,
    pub orbits: Vec<Orbit>,
    /// Total number of vectors covered; always the full layer size.
    pub total: u64,
}

impl OrbitDecomposition {
    /// Orbit lengths as an ascending multiset.
    pub fn lengths(&self) -> Vec<u64> {
        let mut ls: Vec<u64> = self.orbits.iter().map(|o| o.length).collect();
        ls.sort_unstable();
        ls
    }

    /// Distinct orbit lengths, ascending: the degree set of the layer.
    pub fn distinct_lengths(&self) -> Vec<u64> {
        let mut ls = self.lengths();
        ls.dedup();
        ls
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(e: [i64; 4], m: u64) -> Mat2 {
        Mat2::new(e, m).unwrap()
    }

    /// ⟨[[g,0],[0,1]], [[-1,1],[-1,0]]⟩ = GL₂(F_p) for a primitive root g.
    fn gl2(p: u64) -> MatGroup {
        let g = crate::catalog::primitive_root(p as u32) as i64;
        MatGroup::closure(&[mat([g, 0, 0, 1], p), mat([-1, 1, -1, 0], p)]).unwrap()
    }

    #[test]
    fn closure_of_gl2_f3_and_f5() {
        assert_eq!(gl2(3).order(), 48);
        assert_eq!(gl2(5).order(), 480);
        assert_eq!(gl2(7).order(), 2016);
    }

    #[test]
    fn closure_respects_cap() {
        let gens = [mat([1, 1, 0, 1], 7), mat([1, 0, 1, 1], 7)];
        let err = MatGroup::closure_with_cap(&gens, 100).unwrap_err();
        assert_eq!(err, AlgebraError::SizeCapExceeded { cap: 100 });
        // SL₂(F₇) has order 336
        assert_eq!(MatGroup::closure(&gens).unwrap().order(), 336);
    }

    #[test]
    fn orbit_stabilizer_on_sl2_f5() {
        let g = MatGroup::closure(&[mat([1, 1, 0, 1], 5), mat([1, 0, 1, 1], 5)]).unwrap();
        assert_eq!(g.order(), 120);
        let v = Vec2::new(1, 0, 5).unwrap();
        let orbit = g.orbit(&v).unwrap();
        let stab = g.stabilizer(&v).unwrap();
        assert_eq!(orbit.len() as u64 * stab.order(), g.order());
        assert_eq!(orbit.len(), 24); // all nonzero vectors
    }

    #[test]
    fn orbit_decomposition_covers_the_plane() {
        let g = MatGroup::closure(&[mat([0, -1, 1, 0], 7)]).unwrap();
        let dec = g.orbit_decomposition(None).unwrap();
        assert_eq!(dec.total, 49);
        assert_eq!(dec.lengths().iter().sum::<u64>(), 49);
        let nz = g.orbit_decomposition(Some(7)).unwrap();
        assert_eq!(nz.total, 48);
        assert_eq!(nz.lengths(), vec![4; 12]);
    }

    #[test]
    fn quotient_typing_identifies_s3() {
        // GL₂(F₂) ≅ S3; quotient by the trivial subgroup
        let g = MatGroup::closure(&[mat([0, 1, 1, 0], 2), mat([1, 1, 0, 1], 2)]).unwrap();
        assert_eq!(g.order(), 6);
        let t = MatGroup::trivial(2).unwrap();
        let ty = g.quotient_iso_type(&t).unwrap();
        assert_eq!(ty.name.as_deref(), Some("S3"));
        assert!(!ty.abelian);
    }

    #[test]
    fn normal_core_and_closure() {
        let g = gl2(3);
        // the orbit of (1,0) is all 8 nonzero vectors, so its stabilizer has
        // order 48/8 = 6; anything normal inside it fixes every vector
        let stab = g.stabilizer(&Vec2::new(1, 0, 3).unwrap()).unwrap();
        assert_eq!(stab.order(), 6);
        let core = g.normal_core(&stab).unwrap();
        assert_eq!(core.order(), 1);
        // the derived subgroup of GL₂(F₃) is SL₂(F₃)
        let der = g.derived_subgroup();
        assert_eq!(der.order(), 24);
        assert!(g.normalizes(&der));
        assert!(der.elements().all(|x| x.det().value() == 1));
    }

    #[test]
    fn solvability() {
        assert!(gl2(3).is_solvable());
        assert!(!gl2(5).is_solvable());
        assert!(!gl2(7).is_solvable());
    }

    #[test]
    fn abelianization_of_gl2_f3() {
        // GL₂(F₃)^ab ≅ C2 (determinant)
        assert_eq!(gl2(3).abelianization_invariants(), vec![2]);
        assert!(gl2(3).has_cyclic_quotient_of_order(2));
        assert!(!gl2(3).has_cyclic_quotient_of_order(3));
        // diagonal torus mod 5 is C4 × C4
        let t = MatGroup::closure(&[mat([2, 0, 0, 1], 5), mat([1, 0, 0, 2], 5)]).unwrap();
        assert_eq!(t.order(), 16);
        assert_eq!(t.abelianization_invariants(), vec![4, 4]);
        assert!(t.has_cyclic_quotient_of_order(4));
        assert!(!t.has_cyclic_quotient_of_order(8));
    }

    #[test]
    fn normal_subgroups_of_gl2_f3() {
        let ns = gl2(3).normal_subgroups();
        let orders: Vec<u64> = ns.iter().map(|n| n.order()).collect();
        // 1, center {±I}, quaternion Q8, SL₂(F₃), GL₂(F₃)
        assert_eq!(orders, vec![1, 2, 8, 24, 48]);
    }

    #[test]
    fn stable_lines_of_borel_and_cartan() {
        // upper-triangular group mod 5 fixes exactly the line (1, 0)
        let b = MatGroup::closure(&[mat([2, 0, 0, 1], 5), mat([1, 1, 0, 1], 5), mat([1, 0, 0, 2], 5)])
            .unwrap();
        let lines = b.stable_lines().unwrap();
        assert_eq!(lines, vec![Vec2::new(1, 0, 5).unwrap()]);
        // split torus fixes both axes; the pair is also setwise stable
        let t = MatGroup::closure(&[mat([2, 0, 0, 1], 5), mat([1, 0, 0, 2], 5)]).unwrap();
        assert_eq!(t.stable_lines().unwrap().len(), 2);
        assert_eq!(t.stable_line_pairs().unwrap().len(), 1);
        // adjoining the swap kills the individual lines but keeps the pair
        let n = MatGroup::closure(&[mat([2, 0, 0, 1], 5), mat([1, 0, 0, 2], 5), mat([0, 1, 1, 0], 5)])
            .unwrap();
        assert_eq!(n.stable_lines().unwrap().len(), 0);
        assert_eq!(n.stable_line_pairs().unwrap().len(), 1);
        assert!(MatGroup::trivial(12).unwrap().stable_lines().is_err());
    }

    #[test]
    fn galois_closure_quotient_of_jordan_group() {
        // G = ⟨[[1,1],[0,1]], [[1,0],[0,-1]]⟩ mod 4 is dihedral of order 8;
        // (0,1) has trivial stabilizer, so the closure quotient is G itself
        let g = MatGroup::closure(&[mat([1, 1, 0, 1], 4), mat([1, 0, 0, -1], 4)]).unwrap();
        assert_eq!(g.order(), 8);
        let ty = g.galois_closure_quotient(&Vec2::new(0, 1, 4).unwrap()).unwrap();
        assert_eq!(ty.name.as_deref(), Some("D4"));
    }

    #[test]
    fn normalizer_and_transversal() {
        let g = gl2(5);
        let t = MatGroup::closure(&[mat([2, 0, 0, 1], 5), mat([1, 0, 0, 2], 5)]).unwrap();
        let n = g.normalizer_of(&t).unwrap();
        assert_eq!(n.order(), 32); // split Cartan normalizer
        let reps = g.left_transversal_of(&n);
        assert_eq!(reps.len(), 15);
        assert_eq!(reps[0], pid(5));
    }

    #[test]
    fn reduction_of_groups() {
        let g = MatGroup::closure(&[mat([1, 1, 0, 1], 49)]).unwrap();
        assert_eq!(g.order(), 49);
        let r = g.reduce(7).unwrap();
        assert_eq!(r.order(), 7);
        assert!(g.reduce(5).is_err());
    }

    #[test]
    fn conjugation_preserves_structure() {
        let g = MatGroup::closure(&[mat([2, 0, 0, 1], 7), mat([1, 0, 0, 3], 7)]).unwrap();
        let x = mat([1, 2, 3, 0], 7);
        let h = g.conjugate_by(&x).unwrap();
        assert_eq!(h.order(), g.order());
        assert_eq!(
            h.orbit_decomposition(Some(7)).unwrap().lengths(),
            g.orbit_decomposition(Some(7)).unwrap().lengths()
        );
        assert_eq!(g.key().order, h.key().order);
    }

    #[test]
    fn element_order_histogram_and_det_image() {
        let g = MatGroup::closure(&[mat([0, -1, 1, 0], 5)]).unwrap(); // C4
        assert_eq!(g.element_order_histogram(), vec![(1, 1), (2, 1), (4, 2)]);
        assert_eq!(g.det_image_size(), 1);
    }

    #[test]
    fn from_elements_validates() {
        let good: Vec<Mat2> = (0..4).map(|k| mat([1, k, 0, 1], 4)).collect();
        assert_eq!(MatGroup::from_elements(&good).unwrap().order(), 4);
        let bad = [mat([1, 0, 0, 1], 4), mat([1, 1, 0, 1], 4), mat([1, 2, 0, 1], 4)];
        assert!(MatGroup::from_elements(&bad).is_err());
    }
}
