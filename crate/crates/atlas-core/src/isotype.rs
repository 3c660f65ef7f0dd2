//! Identification of small abstract groups by fingerprint plus explicit
//! isomorphism search.
//!
//! Quotients produced by the group engine arrive here as multiplication
//! tables ([`SmallGroup`]). [`identify`] computes an order/abelianity/
//! element-order fingerprint and, for orders ≤ 48, searches the model
//! library (Cn, V4, Dn, Q8, S3, A4, S4) for an explicit isomorphism. Types
//! outside the library report the fingerprint with no name; callers print it
//! verbatim.

use rustc_hash::FxHashMap;
use serde::Serialize;

/// A finite group as an explicit multiplication table. Index 0 is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGroup {
    n: usize,
    mul: Vec<u16>,
}

impl SmallGroup {
    pub(crate) fn from_table(n: usize, mul: Vec<u16>) -> SmallGroup {
        assert_eq!(mul.len(), n * n);
        let g = SmallGroup { n, mul };
        debug_assert!((0..n).all(|i| g.mul(0, i) == i && g.mul(i, 0) == i));
        g
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.n + j] as usize
    }

    pub fn power(&self, x: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut acc = x;
        let mut ord = 1u64;
        while acc != 0 {
            acc = self.mul(acc, x);
            ord += 1;
        }
        ord
    }

    /// (order, count) pairs, ascending by order.
    pub fn order_histogram(&self) -> Vec<(u64, u64)> {
        let mut counts: FxHashMap<u64, u64> = FxHashMap::default();
        for x in 0..self.n {
            *counts.entry(self.element_order(x)).or_insert(0) += 1;
        }
        let mut out: Vec<(u64, u64)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    pub fn center_order(&self) -> u64 {
        (0..self.n)
            .filter(|&i| (0..self.n).all(|j| self.mul(i, j) == self.mul(j, i)))
            .count() as u64
    }

    /// Subgroup generated by a set of elements, as a sorted index list.
    fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    /// [G, G]: closure of the full commutator set (which is conjugation-
    /// stable, so plain multiplicative closure suffices).
    fn derived_subgroup(&self) -> Vec<usize> {
        let inv: Vec<usize> = (0..self.n)
            .map(|x| (0..self.n).find(|&y| self.mul(x, y) == 0).unwrap())
            .collect();
        let mut comms: Vec<usize> = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                comms.push(self.mul(self.mul(x, y), inv[self.mul(y, x)]));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.generated_subgroup(&comms)
    }

    /// Invariant factors d₁ | d₂ | … of the abelianization.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        let derived = self.derived_subgroup();
        // quotient by the derived subgroup: label cosets along a scan
        let mut coset_of = vec![usize::MAX; self.n];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..self.n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for &d in &derived {
                coset_of[self.mul(x, d)] = id;
            }
        }
        let k = reps.len();
        let quotient = |i: usize, j: usize| coset_of[self.mul(reps[i], reps[j])];
        // per prime q: #parts of size ≥ j in the type partition equals
        // log_q #{x: x^(q^j) = 1} − log_q #{x: x^(q^(j-1)) = 1}
        let qpow = |x: usize, mut e: u64| {
            let mut acc = 0usize;
            let mut base = x;
            while e > 0 {
                if e & 1 == 1 {
                    acc = quotient(acc, base);
                }
                base = quotient(base, base);
                e >>= 1;
            }
            acc
        };
        let mut primes: Vec<u64> = Vec::new();
        let mut n = k as u64;
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                primes.push(q);
                while n % q == 0 {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        let mut partitions: Vec<Vec<u32>> = Vec::new();
        for &q in &primes {
            let count_killed = |j: u32| -> u64 {
                let e = q.pow(j);
                (0..k).filter(|&x| qpow(x, e) == 0).count() as u64
            };
            let log_q = |mut c: u64| {
                let mut t = 0u32;
                while c > 1 {
                    debug_assert!(c % q == 0);
                    c /= q;
                    t += 1;
                }
                t
            };
            let mut ge_counts: Vec<u32> = Vec::new(); // #parts of size ≥ j
            let mut prev = log_q(count_killed(0));
            let mut j = 1;
            loop {
                let t = log_q(count_killed(j));
                if t == prev {
                    break;
                }
                ge_counts.push(t - prev);
                prev = t;
                j += 1;
            }
            // partition parts, descending
            let max_parts = ge_counts.first().copied().unwrap_or(0);
            let parts: Vec<u32> = (1..=max_parts)
                .map(|i| ge_counts.iter().filter(|&&c| c >= i).count() as u32)
                .collect();
            partitions.push(parts);
        }
        let rank = partitions.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut factors: Vec<u64> = Vec::new();
        for i in 0..rank {
            let mut d = 1u64;
            for (pi, &q) in partitions.iter().zip(&primes) {
                if i < pi.len() {
                    d *= q.pow(pi[i]);
                }
            }
            factors.push(d);
        }
        factors.reverse(); // ascending, d₁ | d₂ | …
        factors
    }
}

/// Isomorphism-type report: fingerprint invariants plus a library name when
/// one matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupIsoType {
    pub order: u64,
    pub abelian: bool,
    /// (element order, count) pairs, ascending.
    pub element_orders: Vec<(u64, u64)>,
    pub center_order: u64,
    /// Invariant factors of the abelianization, ascending divisibility.
    pub abelian_invariants: Vec<u64>,
    /// Library name (C1, C2, …, V4, S3, D4, D5, …, Q8, A4, S4) if the group
    /// is isomorphic to a model; None otherwise.
    pub name: Option<String>,
}

/// Build a library model by name: "Cn" (any n ≥ 1), "V4", "Dn" (n ≥ 3),
/// "Q8", "S3", "A4", "S4".
pub fn model(name: &str) -> Option<SmallGroup> {
    if let Some(n) = name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
        if name.as_bytes()[0] == b'C' && n >= 1 {
            return Some(cyclic(n));
        }
    }
    if let Some(n) = name.strip_prefix('D').and_then(|s| s.parse::<usize>().ok()) {
        if n >= 3 {
            return Some(dihedral(n));
        }
    }
    match name {
        "V4" => Some(klein_four()),
        "Q8" => Some(quaternion()),
        "S3" => Some(dihedral(3)),
        "A4" => Some(alternating4()),
        "S4" => Some(symmetric4()),
        _ => None,
    }
}

fn cyclic(n: usize) -> SmallGroup {
    let mut mul = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            mul[i * n + j] = ((i + j) % n) as u16;
        }
    }
    SmallGroup::from_table(n, mul)
}

fn klein_four() -> SmallGroup {
    let mut mul = vec![0u16; 16];
    for i in 0..4 {
        for j in 0..4 {
            mul[i * 4 + j] = (i ^ j) as u16;
        }
    }
    SmallGroup::from_table(4, mul)
}

/// Dihedral group of order 2k: indices 0..k are rotations rⁱ, k..2k are
/// reflections rⁱs.
fn dihedral(k: usize) -> SmallGroup {
    let n = 2 * k;
    let mut mul = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            let (ri, fi) = (i % k, i >= k);
            let (rj, fj) = (j % k, j >= k);
            let r = if fi { (ri + k - rj) % k } else { (ri + rj) % k };
            let f = fi ^ fj;
            mul[i * n + j] = (r + if f { k } else { 0 }) as u16;
        }
    }
    SmallGroup::from_table(n, mul)
}

fn quaternion() -> SmallGroup {
    // elements 2u+s: u ∈ {1,i,j,k}, s = sign bit (0 → +, 1 → −)
    // unit table: (unit, sign) of u·v
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let mut mul = vec![0u16; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (ua, sa) = (a >> 1, a & 1);
            let (ub, sb) = (b >> 1, b & 1);
            let (u, s) = UNIT[ua][ub];
            mul[a * 8 + b] = ((u << 1) | (s ^ sa ^ sb)) as u16;
        }
    }
    SmallGroup::from_table(8, mul)
}

fn perm_group(perms: Vec<[u8; 4]>) -> SmallGroup {
    let mut perms = perms;
    perms.sort_unstable();
    let index: FxHashMap<[u8; 4], usize> =
        perms.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = perms.len();
    let mut mul = vec![0u16; n * n];
    for (i, p) in perms.iter().enumerate() {
        for (j, q) in perms.iter().enumerate() {
            let composed = [
                p[q[0] as usize],
                p[q[1] as usize],
                p[q[2] as usize],
                p[q[3] as usize],
            ];
            mul[i * n + j] = index[&composed] as u16;
        }
    }
    SmallGroup::from_table(n, mul)
}

fn all_perms4() -> Vec<[u8; 4]> {
    let mut out = Vec::with_capacity(24);
    let mut items = [0u8, 1, 2, 3];
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut [u8; 4], k: usize, out: &mut Vec<[u8; 4]>) {
    if k == 4 {
        out.push(*items);
        return;
    }
    for i in k..4 {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

fn parity(p: &[u8; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

fn symmetric4() -> SmallGroup {
    perm_group(all_perms4())
}

fn alternating4() -> SmallGroup {
    perm_group(all_perms4().into_iter().filter(parity).collect())
}

/// Explicit isomorphism test by backtracking over generator images.
pub fn isomorphic(a: &SmallGroup, b: &SmallGroup) -> bool {
    if a.order() != b.order() {
        return false;
    }
    if a.order_histogram() != b.order_histogram() {
        return false;
    }
    let n = a.order();
    // minimal generating sequence of a, greedy
    let mut gens: Vec<usize> = Vec::new();
    let mut span = a.generated_subgroup(&gens);
    for x in 0..n {
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = a.generated_subgroup(&gens);
            if span.len() == n {
                break;
            }
        }
    }
    // BFS word expressions: every element of `a` as parent·gen
    let mut expr: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order_found: Vec<usize> = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order_found.len() {
        let x = order_found[head];
        head += 1;
        for (gi, &g) in gens.iter().enumerate() {
            let y = a.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                expr[y] = Some((x, gi));
                order_found.push(y);
            }
        }
    }
    // candidate images, filtered by element order
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let ord = a.element_order(g);
            (0..n).filter(|&y| b.element_order(y) == ord).collect()
        })
        .collect();
    let mut images = vec![0usize; gens.len()];
    try_assign(a, b, &gens, &candidates, &expr, &order_found, &mut images, 0)
}

#[allow(clippy::too_many_arguments)]
fn try_assign(
    a: &SmallGroup,
    b: &SmallGroup,
    gens: &[usize],
    candidates: &[Vec<usize>],
    expr: &[Option<(usize, usize)>],
    order_found: &[usize],
    images: &mut [usize],
    depth: usize,
) -> bool {
    if depth == gens.len() {
        // build φ along the BFS words, then verify it is a bijective
        // homomorphism on the full table
        let n = a.order();
        let mut phi = vec![usize::MAX; n];
        phi[0] = 0;
        for &x in &order_found[1..] {
            let (parent, gi) = expr[x].unwrap();
            phi[x] = b.mul(phi[parent], images[gi]);
        }
        let mut hit = vec![false; n];
        for &v in &phi {
            if v == usize::MAX || hit[v] {
                return false;
            }
            hit[v] = true;
        }
        return (0..n).all(|x| (0..n).all(|y| phi[a.mul(x, y)] == b.mul(phi[x], phi[y])));
    }
    for &c in &candidates[depth] {
        images[depth] = c;
        if try_assign(a, b, gens, candidates, expr, order_found, images, depth + 1) {
            return true;
        }
    }
    false
}

/// Compute the fingerprint of a small group and match it against the model
/// library (orders ≤ 48 only; larger groups report fingerprint alone).
pub fn identify(g: &SmallGroup) -> GroupIsoType {
    let order = g.order() as u64;
    let fingerprint = GroupIsoType {
        order,
        abelian: g.is_abelian(),
        element_orders: g.order_histogram(),
        center_order: g.center_order(),
        abelian_invariants: g.abelian_invariants(),
        name: None,
    };
    if order > 48 {
        return fingerprint;
    }
    let mut names: Vec<String> = vec![format!("C{order}")];
    if order == 4 {
        names.push("V4".into());
    }
    if order == 8 {
        names.push("Q8".into());
    }
    if order == 12 {
        names.push("A4".into());
    }
    if order == 24 {
        names.push("S4".into());
    }
    if order >= 6 && order % 2 == 0 {
        let k = order / 2;
        names.push(if k == 3 { "S3".into() } else { format!("D{k}") });
    }
    for name in names {
        let m = model(&name).expect("constructed name is always valid");
        if isomorphic(g, &m) {
            return GroupIsoType { name: Some(name), ..fingerprint };
        }
    }
    fingerprint
}
