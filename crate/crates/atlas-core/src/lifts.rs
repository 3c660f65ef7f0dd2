//! Lifting a mod-p matrix group to level p²: enumerate the subgroups of
//! GL₂(ℤ/p²) that reduce onto a given base group, classified up to
//! conjugacy by the preimage of the base's GL₂(F_p)-normalizer.
//!
//! Two independent routes compute the same answer and cross-check each
//! other:
//!
//! * the reference route runs a full subgroup census of the preimage P of
//!   the base, keeps the classes that reduce onto the base, and fuses them
//!   under the lifted normalizer;
//! * the cocycle route fixes the kernel W ≤ M₂(F_p) of a candidate lift,
//!   solves the group-closure condition for sections base → M₂(F_p)/W as an
//!   affine-linear system in the section's values on generators, and
//!   materializes one subgroup per solution before fusing the same way.
//!
//! The two routes share only the packed-matrix arithmetic and the conjugacy
//! canonicalization; agreement between them is itself one of the
//! reproduction checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustc_hash::FxHashMap;

use crate::catalog::{build_named, is_prime, GroupName, NamedGroupSpec};
use crate::census::{conjugate_orbit, census_classes_raw, fingerprint_of, Fingerprint};
use crate::error::AlgebraError;
use crate::group::{lanes, pack, pconj, pid, pinv, pmul, subgroup_key, MatGroup, SubgroupKey};
use crate::residue::Mat2;

type Result<T> = std::result::Result<T, AlgebraError>;

/// Largest preimage (|base|·p⁴) the reference census will take on.
const PREIMAGE_CAP: u64 = 250_000;
/// Largest number of sections the cocycle route will enumerate per kernel.
const SECTION_CAP: u64 = 65_536;

/// Which of the two independent algorithms to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiftRoute {
    /// Subgroup census of the full preimage, filtered and fused.
    Reference,
    /// Kernel-by-kernel section solving; enumerates surjective lifts only.
    Cocycle,
}

/// One class of lifts, up to conjugacy by the lifted normalizer.
#[derive(Debug, Clone)]
pub struct LiftClass {
    /// Canonical representative mod p².
    pub rep: MatGroup,
    /// Whether the representative reduces onto the whole base group.
    pub surjective: bool,
    /// Number of distinct subgroups of the preimage in this fused class.
    pub subgroup_count: u64,
    pub fingerprint: Fingerprint,
}

/// A class before fusing: canonical element list under preimage-conjugacy,
/// the size of that conjugacy class, and every conjugate's key.
struct RawLift {
    canon: Vec<u64>,
    count: u64,
    keys: Vec<SubgroupKey>,
    surjective: bool,
}

fn prime_level(base: &MatGroup) -> Result<u64> {
    let p = base.modulus() as u64;
    if !is_prime(p) {
        return Err(AlgebraError::Precondition(format!(
            "lift enumeration starts from a prime level, got {p}"
        )));
    }
    Ok(p)
}

/// Packed word of I + pX mod p², X given by its four mod-p lanes.
fn kernel_word(x: [u64; 4], p: u64, p2: u64) -> u64 {
    pack([(1 + p * x[0]) % p2, (p * x[1]) % p2, (p * x[2]) % p2, (1 + p * x[3]) % p2])
}

/// The full preimage P = {s₀(h)(I + pX)} of the base in GL₂(ℤ/p²), with a
/// small generating set (lifted base generators plus the kernel basis).
/// Entrywise lifting is the identity on packed words: lanes are < p.
fn preimage_group(base: &MatGroup, p: u64) -> Result<MatGroup> {
    let p2 = p * p;
    let size = base.order() * p.pow(4);
    if size > PREIMAGE_CAP {
        return Err(AlgebraError::SizeCapExceeded { cap: PREIMAGE_CAP });
    }
    let mut kernel: Vec<u64> = Vec::with_capacity(p.pow(4) as usize);
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    kernel.push(kernel_word([a, b, c, d], p, p2));
                }
            }
        }
    }
    let mut elems: Vec<u64> = Vec::with_capacity(size as usize);
    for &h in base.packed_elems() {
        for &k in &kernel {
            elems.push(pmul(h, k, p2));
        }
    }
    elems.sort_unstable();
    debug_assert_eq!(elems.len() as u64, size);
    let mut gens: Vec<Mat2> = Vec::new();
    for g in base.generators() {
        gens.push(Mat2::from_packed(g.packed(), p2 as u32));
    }
    for e in [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] {
        gens.push(Mat2::from_packed(kernel_word(e, p, p2), p2 as u32));
    }
    Ok(MatGroup::from_sorted_packed(p2 as u32, elems, gens))
}

/// Words mod p² conjugation by which realizes every nontrivial coset of the
/// lifted normalizer N̂ over the preimage P: a transversal of N/base inside
/// N = N_{GL₂(F_p)}(base), lifted entrywise.
fn lifted_normalizer_transversal(base: &MatGroup, p: u64) -> Result<Vec<u64>> {
    let gl2 = build_named(&NamedGroupSpec::new(GroupName::Gl2, p as u32))?;
    let normalizer = gl2.normalizer_of(base)?;
    let reps = normalizer.left_transversal_of(base);
    debug_assert_eq!(reps[0], pid(p));
    Ok(reps[1..].to_vec())
}

/// Fuse preimage-conjugacy classes under the lifted normalizer and package
/// the result. Conjugation by a transversal word permutes the classes; the
/// key of the conjugated element set locates the target class directly.
fn fuse_classes(p2: u64, transversal: &[u64], raw: Vec<RawLift>) -> Vec<LiftClass> {
    let mut key_map: FxHashMap<SubgroupKey, usize> = FxHashMap::default();
    for (i, r) in raw.iter().enumerate() {
        for &k in &r.keys {
            if let Some(&prev) = key_map.get(&k) {
                assert_eq!(prev, i, "subgroup key collision across distinct lift classes");
            }
            key_map.insert(k, i);
        }
    }
    let mut parent: Vec<usize> = (0..raw.len()).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..raw.len() {
        for &t in transversal {
            let ti = pinv(t, p2);
            let key = subgroup_key(raw[i].canon.iter().map(|&w| pconj(w, t, ti, p2)));
            let j = *key_map
                .get(&key)
                .expect("normalizer-conjugate of a lift class must be a lift class");
            let (a, b) = (root(&mut parent, i), root(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut buckets: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    for i in 0..raw.len() {
        let r = root(&mut parent, i);
        buckets.entry(r).or_default().push(i);
    }
    let mut out: Vec<LiftClass> = buckets
        .into_values()
        .map(|members| {
            let canon = members.iter().map(|&i| &raw[i].canon).min().unwrap().clone();
            let count = members.iter().map(|&i| raw[i].count).sum();
            let surjective = raw[members[0]].surjective;
            debug_assert!(members.iter().all(|&i| raw[i].surjective == surjective));
            let rep =
                MatGroup::from_sorted_packed(p2 as u32, canon, vec![]).with_small_generating_set();
            LiftClass { fingerprint: fingerprint_of(&rep), rep, surjective, subgroup_count: count }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.rep.order(), a.rep.packed_elems()).cmp(&(b.rep.order(), b.rep.packed_elems()))
    });
    out
}

// ---- reference route -----------------------------------------------------------

fn lifts_by_reference(base: &MatGroup, surjective_only: bool) -> Result<Vec<LiftClass>> {
    let p = prime_level(base)?;
    let p2 = p * p;
    let pgroup = preimage_group(base, p)?;
    let classes = census_classes_raw(&pgroup)?;
    let mut raw: Vec<RawLift> = Vec::new();
    for (rep, count) in classes {
        let surjective = rep.reduce(p)?.order() == base.order();
        if surjective_only && !surjective {
            continue;
        }
        let (canon, orbit_count, keys) = conjugate_orbit(&pgroup, &rep);
        debug_assert_eq!(orbit_count, count);
        raw.push(RawLift { canon, count, keys, surjective });
    }
    let transversal = lifted_normalizer_transversal(base, p)?;
    Ok(fuse_classes(p2, &transversal, raw))
}

// ---- cocycle route -------------------------------------------------------------

/// All subspaces of F_p⁴ as reduced-echelon bases (row vectors over the four
/// matrix lanes a, b, c, d).
fn subspaces(p: u64) -> Vec<Vec<[u64; 4]>> {
    let mut out: Vec<Vec<[u64; 4]>> = vec![Vec::new()];
    for mask in 1u32..16 {
        let pivots: Vec<usize> = (0..4).filter(|&j| mask >> j & 1 == 1).collect();
        // free positions: to the right of each pivot, excluding pivot columns
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| {
                (pc + 1..4).filter(|j| !pivots.contains(j)).map(move |j| (i, j))
            })
            .collect();
        let combos = p.pow(free.len() as u32);
        for mut code in 0..combos {
            let mut basis: Vec<[u64; 4]> = pivots
                .iter()
                .map(|&pc| {
                    let mut row = [0u64; 4];
                    row[pc] = 1;
                    row
                })
                .collect();
            for &(row, col) in &free {
                basis[row][col] = code % p;
                code /= p;
            }
            out.push(basis);
        }
    }
    out
}

/// g⁻¹ X g on lane vectors, entries mod p.
fn conj_lanes(x: [u64; 4], g: u64, gi: u64, p: u64) -> [u64; 4] {
    lanes(pconj(pack(x), gi, g, p))
}

/// Reduce a lane vector against a reduced-echelon basis (zeroing the pivot
/// coordinates), returning the remainder.
fn reduce_mod(basis: &[[u64; 4]], pivots: &[usize], mut x: [u64; 4], p: u64) -> [u64; 4] {
    for (row, &pc) in basis.iter().zip(pivots) {
        let coeff = x[pc] % p;
        if coeff != 0 {
            for j in 0..4 {
                x[j] = (x[j] + (p - coeff) * row[j]) % p;
            }
        }
    }
    x
}

fn pivot_columns(basis: &[[u64; 4]]) -> Vec<usize> {
    basis.iter().map(|row| (0..4).find(|&j| row[j] != 0).expect("echelon row")).collect()
}

/// Coordinates on M₂(F_p)/W: the non-pivot lanes after reduction mod W.
struct QuotientSpace {
    p: u64,
    basis: Vec<[u64; 4]>,
    pivots: Vec<usize>,
    free_cols: Vec<usize>,
}

impl QuotientSpace {
    fn new(p: u64, basis: Vec<[u64; 4]>) -> QuotientSpace {
        let pivots = pivot_columns(&basis);
        let free_cols: Vec<usize> = (0..4).filter(|j| !pivots.contains(j)).collect();
        QuotientSpace { p, basis, pivots, free_cols }
    }

    fn dim(&self) -> usize {
        self.free_cols.len()
    }

    fn proj(&self, x: [u64; 4]) -> Vec<u64> {
        let r = reduce_mod(&self.basis, &self.pivots, x, self.p);
        self.free_cols.iter().map(|&j| r[j]).collect()
    }

    fn lift(&self, q: &[u64]) -> [u64; 4] {
        let mut x = [0u64; 4];
        for (i, &j) in self.free_cols.iter().enumerate() {
            x[j] = q[i] % self.p;
        }
        x
    }

    /// Matrix of X ↦ g⁻¹Xg acting on the quotient coordinates.
    fn cj_matrix(&self, g: u64, gi: u64) -> Vec<Vec<u64>> {
        let d = self.dim();
        let mut m = vec![vec![0u64; d]; d];
        for (col, &j) in self.free_cols.iter().enumerate() {
            let mut e = [0u64; 4];
            e[j] = 1;
            let image = self.proj(conj_lanes(e, g, gi, self.p));
            for row in 0..d {
                m[row][col] = image[row];
            }
        }
        m
    }
}

/// Whether a subspace (echelon basis) is stable under X ↦ g⁻¹Xg for every
/// generator g of the base.
fn is_stable(basis: &[[u64; 4]], gens: &[(u64, u64)], p: u64) -> bool {
    let pivots = pivot_columns(basis);
    basis.iter().all(|&w| {
        gens.iter().all(|&(g, gi)| {
            reduce_mod(basis, &pivots, conj_lanes(w, g, gi, p), p) == [0, 0, 0, 0]
        })
    })
}

/// The failure of entrywise lifting to be multiplicative:
/// s₀(h)s₀(g) = s₀(hg)(I + pκ(h,g)); returns κ's lanes mod p.
fn kappa(h: u64, g: u64, p: u64, p2: u64) -> [u64; 4] {
    let hg = pmul(h, g, p);
    let t = pmul(pinv(hg, p2), pmul(h, g, p2), p2);
    let l = lanes(t);
    let id = lanes(pid(p2));
    let mut out = [0u64; 4];
    for j in 0..4 {
        let diff = (l[j] + p2 - id[j]) % p2;
        debug_assert_eq!(diff % p, 0, "preimage coset defect must vanish mod p");
        out[j] = diff / p;
    }
    out
}

fn mat_vec(m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    m.iter().map(|row| row.iter().zip(v).map(|(&a, &b)| a * b % p).sum::<u64>() % p).collect()
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0u64; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] = (out[i][j] + a[i][k] * b[k][j]) % p;
            }
        }
    }
    out
}

fn modinv(a: u64, p: u64) -> u64 {
    // p is prime and a ≢ 0
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Solve M·u = b over F_p. Returns a particular solution and a basis of the
/// kernel of M, or None when inconsistent.
fn solve_affine(
    rows: &[Vec<u64>],
    rhs: &[u64],
    n: usize,
    p: u64,
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let mut aug: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row = r.clone();
            row.push(b % p);
            row
        })
        .collect();
    let m = aug.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0usize;
    for col in 0..n {
        let Some(sel) = (rank..m).find(|&r| aug[r][col] % p != 0) else {
            continue;
        };
        aug.swap(rank, sel);
        let inv = modinv(aug[rank][col], p);
        for j in col..=n {
            aug[rank][j] = aug[rank][j] * inv % p;
        }
        for r in 0..m {
            if r != rank && aug[r][col] % p != 0 {
                let f = aug[r][col] % p;
                for j in col..=n {
                    aug[r][j] = (aug[r][j] + (p - f) * aug[rank][j]) % p;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == m {
            break;
        }
    }
    if aug.iter().skip(rank).any(|row| row[n] % p != 0) {
        return None;
    }
    let mut particular = vec![0u64; n];
    for col in 0..n {
        if let Some(r) = pivot_of_col[col] {
            particular[col] = aug[r][n];
        }
    }
    let mut null_basis: Vec<Vec<u64>> = Vec::new();
    for free in 0..n {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for col in 0..n {
            if let Some(r) = pivot_of_col[col] {
                v[col] = (p - aug[r][free] % p) % p;
            }
        }
        null_basis.push(v);
    }
    Some((particular, null_basis))
}

/// Echelon store for extending a coboundary basis to the full cocycle space.
struct Echelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    p: u64,
}

impl Echelon {
    fn new(p: u64) -> Echelon {
        Echelon { rows: Vec::new(), pivots: Vec::new(), p }
    }

    /// Reduce v against the stored rows; if a nonzero remainder survives,
    /// normalize and store it, returning true.
    fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc] % p;
            if c != 0 {
                for j in 0..v.len() {
                    v[j] = (v[j] + (p - c) * row[j]) % p;
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x % p != 0) else {
            return false;
        };
        let inv = modinv(v[pc], p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }
}

fn lifts_by_cocycle(base: &MatGroup) -> Result<Vec<LiftClass>> {
    let p = prime_level(base)?;
    let p2 = p * p;
    let pgroup = preimage_group(base, p)?;
    let gen_words = base.gen_words();
    let gens: Vec<(u64, u64)> = gen_words.iter().map(|&g| (g, pinv(g, p))).collect();
    let r = gens.len();
    let helems: Vec<u64> = base.packed_elems().to_vec();
    let index: FxHashMap<u64, usize> =
        helems.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut dedupe: FxHashMap<Vec<u64>, RawLift> = FxHashMap::default();
    for basis in subspaces(p) {
        if !is_stable(&basis, &gens, p) {
            continue;
        }
        let q = QuotientSpace::new(p, basis.clone());
        let qd = q.dim();
        let n_unknowns = r * qd;
        // span of the kernel, reused across all sections below
        let wdim = basis.len() as u32;
        let mut wspan: Vec<[u64; 4]> = Vec::with_capacity(p.pow(wdim) as usize);
        for mut code in 0..p.pow(wdim) {
            let mut x = [0u64; 4];
            for row in &basis {
                let c = code % p;
                code /= p;
                for j in 0..4 {
                    x[j] = (x[j] + c * row[j]) % p;
                }
            }
            wspan.push(x);
        }
        debug_assert_eq!(wspan.len() as u64, p.pow(wdim));
        let cj: Vec<Vec<Vec<u64>>> = gens.iter().map(|&(g, gi)| q.cj_matrix(g, gi)).collect();
        // section values as affine functions of the generator values u:
        // f(h) = A_h·u + c_h, built over the right Cayley graph
        let mut a_of: Vec<Option<Vec<Vec<u64>>>> = vec![None; helems.len()];
        let mut c_of: Vec<Option<Vec<u64>>> = vec![None; helems.len()];
        let id_idx = index[&pid(p)];
        a_of[id_idx] = Some(vec![vec![0u64; n_unknowns]; qd]);
        c_of[id_idx] = Some(vec![0u64; qd]);
        let mut queue = vec![id_idx];
        let mut head = 0usize;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut rhs: Vec<u64> = Vec::new();
        while head < queue.len() {
            let hi = queue[head];
            head += 1;
            let h = helems[hi];
            let (a_h, c_h) = (a_of[hi].clone().unwrap(), c_of[hi].clone().unwrap());
            for (i, &(g, _)) in gens.iter().enumerate() {
                let target = pmul(h, g, p);
                let ti = index[&target];
                let kap = q.proj(kappa(h, g, p, p2));
                // A' = CJ_i·A_h + E_i, c' = CJ_i·c_h + κ̄(h, g_i)
                let mut a_new = mat_mul(&cj[i], &a_h, p);
                for row in 0..qd {
                    a_new[row][i * qd + row] = (a_new[row][i * qd + row] + 1) % p;
                }
                let mut c_new = mat_vec(&cj[i], &c_h, p);
                for (x, &k) in c_new.iter_mut().zip(&kap) {
                    *x = (*x + k) % p;
                }
                match (&a_of[ti], &c_of[ti]) {
                    (Some(a_t), Some(c_t)) => {
                        // consistency: (A_t − A')·u = c' − c_t
                        for row in 0..qd {
                            let eq: Vec<u64> = (0..n_unknowns)
                                .map(|j| (a_t[row][j] + p - a_new[row][j]) % p)
                                .collect();
                            let b = (c_new[row] + p - c_t[row]) % p;
                            if eq.iter().all(|&x| x == 0) && b == 0 {
                                continue;
                            }
                            rows.push(eq);
                            rhs.push(b);
                        }
                    }
                    _ => {
                        a_of[ti] = Some(a_new);
                        c_of[ti] = Some(c_new);
                        queue.push(ti);
                    }
                }
            }
        }
        debug_assert_eq!(queue.len(), helems.len(), "generators must span the base");
        let Some((particular, null_basis)) = solve_affine(&rows, &rhs, n_unknowns, p) else {
            continue;
        };
        // coboundary directions ∂X(g) = g⁻¹Xg − X are kernel vectors; the
        // complement of their span in the kernel indexes genuinely distinct
        // section classes (up to conjugation by kernel elements)
        let mut echelon = Echelon::new(p);
        for j in 0..qd {
            let mut v = vec![0u64; n_unknowns];
            for (i, cjm) in cj.iter().enumerate() {
                for row in 0..qd {
                    v[i * qd + row] = (cjm[row][j] + p - u64::from(row == j)) % p;
                }
            }
            echelon.insert(&v);
        }
        let mut complement: Vec<Vec<u64>> = Vec::new();
        for v in &null_basis {
            if echelon.insert(v) {
                complement.push(v.clone());
            }
        }
        let s = complement.len() as u32;
        if p.pow(s) > SECTION_CAP {
            return Err(AlgebraError::SizeCapExceeded { cap: SECTION_CAP });
        }
        for mut code in 0..p.pow(s) {
            let mut u = particular.clone();
            for v in &complement {
                let c = code % p;
                code /= p;
                if c != 0 {
                    for (x, &y) in u.iter_mut().zip(v) {
                        *x = (*x + c * y) % p;
                    }
                }
            }
            let mut elems: Vec<u64> = Vec::with_capacity(helems.len() * wspan.len());
            for (hi, &h) in helems.iter().enumerate() {
                let au = mat_vec(a_of[hi].as_ref().unwrap(), &u, p);
                let c_h = c_of[hi].as_ref().unwrap();
                let fq: Vec<u64> = au.iter().zip(c_h).map(|(&a, &b)| (a + b) % p).collect();
                let f4 = q.lift(&fq);
                for w in &wspan {
                    let mut x = f4;
                    for j in 0..4 {
                        x[j] = (x[j] + w[j]) % p;
                    }
                    elems.push(pmul(h, kernel_word(x, p, p2), p2));
                }
            }
            elems.sort_unstable();
            debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
            let group = MatGroup::from_sorted_packed(p2 as u32, elems, vec![])
                .with_small_generating_set();
            debug_assert_eq!(group.reduce(p).unwrap().order(), base.order());
            let (canon, count, keys) = conjugate_orbit(&pgroup, &group);
            dedupe
                .entry(canon.clone())
                .or_insert(RawLift { canon, count, keys, surjective: true });
        }
    }
    let transversal = lifted_normalizer_transversal(base, p)?;
    Ok(fuse_classes(p2, &transversal, dedupe.into_values().collect()))
}

// ---- public entry points ---------------------------------------------------------

type LiftCache = Mutex<HashMap<(SubgroupKey, u32, LiftRoute, bool), Arc<Vec<LiftClass>>>>;
static LIFT_CACHE: Lazy<LiftCache> = Lazy::new(Default::default);

/// Enumerate the lift classes of a prime-level base group to level p².
/// With `surjective_only` false (reference route only), classes reducing to
/// a proper subgroup of the base are kept too.
pub fn enumerate_lifts(
    base: &MatGroup,
    route: LiftRoute,
    surjective_only: bool,
) -> Result<Arc<Vec<LiftClass>>> {
    if route == LiftRoute::Cocycle && !surjective_only {
        return Err(AlgebraError::Precondition(
            "the cocycle route enumerates surjective lifts only".into(),
        ));
    }
    let cache_key = (base.key(), base.modulus(), route, surjective_only);
    if let Some(hit) = LIFT_CACHE.lock().unwrap().get(&cache_key) {
        return Ok(hit.clone());
    }
    let classes = Arc::new(match route {
        LiftRoute::Reference => lifts_by_reference(base, surjective_only)?,
        LiftRoute::Cocycle => lifts_by_cocycle(base)?,
    });
    LIFT_CACHE.lock().unwrap().insert(cache_key, classes.clone());
    Ok(classes)
}

/// Run both routes on the surjective lifts and compare classes exactly:
/// same canonical representatives, same subgroup counts.
pub fn lift_routes_agree(base: &MatGroup) -> Result<bool> {
    let reference = enumerate_lifts(base, LiftRoute::Reference, true)?;
    let cocycle = enumerate_lifts(base, LiftRoute::Cocycle, true)?;
    if reference.len() != cocycle.len() {
        return Ok(false);
    }
    Ok(reference.iter().zip(cocycle.iter()).all(|(a, b)| {
        a.rep.packed_elems() == b.rep.packed_elems()
            && a.subgroup_count == b.subgroup_count
            && a.surjective
            && b.surjective
    }))
}
