//! Exact arithmetic on residues, 2×2 matrices and column vectors over ℤ/mℤ.
//!
//! Every value carries its modulus, and operations on mismatched moduli are
//! errors rather than coercions. Supported moduli are 2..=65535 so that a
//! matrix packs into the four 16-bit lanes of a `u64` ([`Mat2::packed`]); the
//! group-search layer keys its hash sets on that packed word.
//!
//! Conventions:
//! - matrices are row-major `[a, b, c, d]` for [[a, b], [c, d]];
//! - vectors are columns, acted on by matrices from the left;
//! - the canonical order on vectors is lexicographic on (x, y), and on
//!   matrices lexicographic on (a, b, c, d), which coincides with integer
//!   order on the packed words.

use crate::error::AlgebraError;

type Result<T> = std::result::Result<T, AlgebraError>;

pub(crate) fn check_modulus(m: u64) -> Result<u32> {
    if (2..=0xFFFF).contains(&m) {
        Ok(m as u32)
    } else {
        Err(AlgebraError::UnsupportedModulus(m))
    }
}

fn normalize(v: i64, m: u32) -> u32 {
    let m = m as i64;
    (((v % m) + m) % m) as u32
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` mod `m` by extended Euclid, if gcd(a, m) = 1.
fn mod_inverse(a: u32, m: u32) -> Option<u32> {
    let (mut r0, mut r1) = (m as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(normalize(t0, m))
}

/// An element of ℤ/mℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    v: u32,
    m: u32,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        let m = check_modulus(modulus)?;
        Ok(Residue { v: normalize(value, m), m })
    }

    pub(crate) fn raw(v: u32, m: u32) -> Self {
        debug_assert!(v < m);
        Residue { v, m }
    }

    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.v as u64, self.m as u64) == 1
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn same_modulus(&self, other: &Residue) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(AlgebraError::ModulusMismatch(self.m as u64, other.m as u64))
        }
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.same_modulus(other)?;
        Ok(Residue::raw((self.v + other.v) % self.m, self.m))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue> {
        self.same_modulus(other)?;
        Ok(Residue::raw((self.v + self.m - other.v) % self.m, self.m))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.same_modulus(other)?;
        Ok(Residue::raw(
            ((self.v as u64 * other.v as u64) % self.m as u64) as u32,
            self.m,
        ))
    }

    pub fn neg(&self) -> Residue {
        Residue::raw(if self.v == 0 { 0 } else { self.m - self.v }, self.m)
    }

    pub fn inv(&self) -> Result<Residue> {
        mod_inverse(self.v, self.m)
            .map(|v| Residue::raw(v, self.m))
            .ok_or(AlgebraError::NonInvertible { value: self.v as u64, modulus: self.m as u64 })
    }

    pub fn pow(&self, mut e: u64) -> Residue {
        let m = self.m as u64;
        let mut base = self.v as u64;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Residue::raw(acc as u32, self.m)
    }

    /// Image in ℤ/nℤ for n | m.
    pub fn reduce(&self, new_modulus: u64) -> Result<Residue> {
        let n = check_modulus(new_modulus)?;
        if self.m % n != 0 {
            return Err(AlgebraError::NonDivisor(n as u64, self.m as u64));
        }
        Ok(Residue::raw(self.v % n, n))
    }
}

/// A 2×2 matrix over ℤ/mℤ, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    e: [u32; 4],
    m: u32,
}

impl Mat2 {
    pub fn new(entries: [i64; 4], modulus: u64) -> Result<Self> {
        let m = check_modulus(modulus)?;
        Ok(Mat2 { e: entries.map(|v| normalize(v, m)), m })
    }

    pub(crate) fn raw(e: [u32; 4], m: u32) -> Self {
        debug_assert!(e.iter().all(|&v| v < m));
        Mat2 { e, m }
    }

    pub fn identity(modulus: u64) -> Result<Self> {
        let m = check_modulus(modulus)?;
        Ok(Mat2::raw([1 % m, 0, 0, 1 % m], m))
    }

    pub fn from_residues(a: Residue, b: Residue, c: Residue, d: Residue) -> Result<Self> {
        for x in [&b, &c, &d] {
            if x.modulus() != a.modulus() {
                return Err(AlgebraError::ModulusMismatch(a.modulus() as u64, x.modulus() as u64));
            }
        }
        Ok(Mat2::raw([a.value(), b.value(), c.value(), d.value()], a.modulus()))
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn entry(&self, row: usize, col: usize) -> Residue {
        assert!(row < 2 && col < 2, "2x2 matrix index out of range");
        Residue::raw(self.e[2 * row + col], self.m)
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.m;
        self.e == [one, 0, 0, one]
    }

    /// True if this is a scalar matrix aI (including a = 0).
    pub fn is_scalar(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0 && self.e[0] == self.e[3]
    }

    fn same_modulus(&self, other: &Mat2) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(AlgebraError::ModulusMismatch(self.m as u64, other.m as u64))
        }
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2> {
        self.same_modulus(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Mat2) -> Mat2 {
        let m = self.m as u64;
        let a = &self.e;
        let b = &other.e;
        let p = |i: usize, j: usize| a[i] as u64 * b[j] as u64;
        Mat2::raw(
            [
                ((p(0, 0) + p(1, 2)) % m) as u32,
                ((p(0, 1) + p(1, 3)) % m) as u32,
                ((p(2, 0) + p(3, 2)) % m) as u32,
                ((p(2, 1) + p(3, 3)) % m) as u32,
            ],
            self.m,
        )
    }

    pub fn add(&self, other: &Mat2) -> Result<Mat2> {
        self.same_modulus(other)?;
        let mut e = [0u32; 4];
        for i in 0..4 {
            e[i] = (self.e[i] + other.e[i]) % self.m;
        }
        Ok(Mat2::raw(e, self.m))
    }

    pub fn scale(&self, s: Residue) -> Result<Mat2> {
        if s.modulus() != self.m {
            return Err(AlgebraError::ModulusMismatch(self.m as u64, s.modulus() as u64));
        }
        let m = self.m as u64;
        Ok(Mat2::raw(self.e.map(|v| (v as u64 * s.value() as u64 % m) as u32), self.m))
    }

    pub fn det(&self) -> Residue {
        let m = self.m as u64;
        let ad = self.e[0] as u64 * self.e[3] as u64 % m;
        let bc = self.e[1] as u64 * self.e[2] as u64 % m;
        Residue::raw(((ad + m - bc) % m) as u32, self.m)
    }

    pub fn trace(&self) -> Residue {
        Residue::raw((self.e[0] + self.e[3]) % self.m, self.m)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn inv(&self) -> Result<Mat2> {
        let det = self.det();
        let di = mod_inverse(det.value(), self.m).ok_or(AlgebraError::NonInvertible {
            value: det.value() as u64,
            modulus: self.m as u64,
        })? as u64;
        let m = self.m as u64;
        let neg = |v: u32| (m - v as u64) % m;
        Ok(Mat2::raw(
            [
                (self.e[3] as u64 * di % m) as u32,
                (neg(self.e[1]) * di % m) as u32,
                (neg(self.e[2]) * di % m) as u32,
                (self.e[0] as u64 * di % m) as u32,
            ],
            self.m,
        ))
    }

    pub fn pow(&self, mut e: u128) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::raw([1 % self.m, 0, 0, 1 % self.m], self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order, via descent from the exponent of GL₂(ℤ/mℤ).
    pub fn element_order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(AlgebraError::NonInvertible {
                value: self.det().value() as u64,
                modulus: self.m as u64,
            });
        }
        // |GL₂(ℤ/mℤ)| = Π_q q^(4k-3) (q-1)² (q+1) over prime powers q^k || m;
        // every factor is < 2^17 so the full factorization comes cheap.
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let push = |n: u64, mult: u32, factors: &mut Vec<(u64, u32)>| {
            let mut n = n;
            let mut q = 2u64;
            while q * q <= n {
                while n % q == 0 {
                    factors.push((q, mult));
                    n /= q;
                }
                q += 1;
            }
            if n > 1 {
                factors.push((n, mult));
            }
        };
        let mut rest = self.m as u64;
        let mut q = 2u64;
        while q * q <= rest {
            if rest % q == 0 {
                let mut k = 0u32;
                while rest % q == 0 {
                    rest /= q;
                    k += 1;
                }
                factors.push((q, 4 * k - 3));
                push(q - 1, 2, &mut factors);
                push(q + 1, 1, &mut factors);
            }
            q += 1;
        }
        if rest > 1 {
            factors.push((rest, 1));
            push(rest - 1, 2, &mut factors);
            push(rest + 1, 1, &mut factors);
        }
        let mut exponent: u128 = 1;
        for &(q, k) in &factors {
            exponent *= (q as u128).pow(k);
        }
        let id = Mat2::raw([1 % self.m, 0, 0, 1 % self.m], self.m);
        debug_assert!(self.pow(exponent) == id);
        let mut ord = exponent;
        for &(q, _) in &factors {
            while ord % q as u128 == 0 && self.pow(ord / q as u128) == id {
                ord /= q as u128;
            }
        }
        Ok(ord as u64)
    }

    /// Image in GL₂/M₂ over ℤ/nℤ for n | m.
    pub fn reduce(&self, new_modulus: u64) -> Result<Mat2> {
        let n = check_modulus(new_modulus)?;
        if self.m % n != 0 {
            return Err(AlgebraError::NonDivisor(n as u64, self.m as u64));
        }
        Ok(Mat2::raw(self.e.map(|v| v % n), n))
    }

    /// Four 16-bit lanes (a, b, c, d), high to low. Integer order on packed
    /// words equals lexicographic order on entries.
    pub fn packed(&self) -> u64 {
        ((self.e[0] as u64) << 48)
            | ((self.e[1] as u64) << 32)
            | ((self.e[2] as u64) << 16)
            | self.e[3] as u64
    }

    pub fn from_packed(word: u64, modulus: u32) -> Mat2 {
        let e = [
            (word >> 48) as u32 & 0xFFFF,
            (word >> 32) as u32 & 0xFFFF,
            (word >> 16) as u32 & 0xFFFF,
            word as u32 & 0xFFFF,
        ];
        debug_assert!(e.iter().all(|&v| v < modulus));
        Mat2::raw(e, modulus)
    }
}

/// A column vector over ℤ/mℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    x: u32,
    y: u32,
    m: u32,
}

impl Vec2 {
    pub fn new(x: i64, y: i64, modulus: u64) -> Result<Self> {
        let m = check_modulus(modulus)?;
        Ok(Vec2 { x: normalize(x, m), y: normalize(y, m), m })
    }

    pub(crate) fn raw(x: u32, y: u32, m: u32) -> Self {
        debug_assert!(x < m && y < m);
        Vec2 { x, y, m }
    }

    pub fn x(&self) -> u32 {
        self.x
    }

    pub fn y(&self) -> u32 {
        self.y
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Additive order: m / gcd(m, x, y).
    pub fn order(&self) -> u64 {
        let m = self.m as u64;
        m / gcd(m, gcd(self.x as u64, self.y as u64))
    }

    pub fn reduce(&self, new_modulus: u64) -> Result<Vec2> {
        let n = check_modulus(new_modulus)?;
        if self.m % n != 0 {
            return Err(AlgebraError::NonDivisor(n as u64, self.m as u64));
        }
        Ok(Vec2::raw(self.x % n, self.y % n, n))
    }

    /// Matrix action g·v.
    pub fn apply(&self, g: &Mat2) -> Result<Vec2> {
        if g.modulus() != self.m {
            return Err(AlgebraError::ModulusMismatch(g.modulus() as u64, self.m as u64));
        }
        Ok(self.apply_unchecked(g))
    }

    pub(crate) fn apply_unchecked(&self, g: &Mat2) -> Vec2 {
        let m = self.m as u64;
        let e = g.entries();
        Vec2::raw(
            ((e[0] as u64 * self.x as u64 + e[1] as u64 * self.y as u64) % m) as u32,
            ((e[2] as u64 * self.x as u64 + e[3] as u64 * self.y as u64) % m) as u32,
            self.m,
        )
    }

    /// Packed (x << 16) | y; integer order equals lexicographic order.
    pub fn packed(&self) -> u32 {
        (self.x << 16) | self.y
    }

    pub fn from_packed(word: u32, modulus: u32) -> Vec2 {
        Vec2::raw(word >> 16, word & 0xFFFF, modulus)
    }
}

/// All vectors of exact additive order `order` in (ℤ/mℤ)², in canonical
/// lexicographic order. Errors with `NonDivisor` unless order | m.
///
/// The count is m²·Π_{q | order} (1 − 1/q²) scaled down to the order-`order`
/// layer; callers mostly use the prime case, where it is m² − (m/p)² over
/// modulus m = p^k. Runs in O(m²).
pub fn vectors_of_order(modulus: u64, order: u64) -> Result<Vec<Vec2>> {
    let m = check_modulus(modulus)?;
    if order == 0 || modulus % order != 0 {
        return Err(AlgebraError::NonDivisor(order, modulus));
    }
    let mut out = Vec::new();
    for x in 0..m {
        for y in 0..m {
            let v = Vec2::raw(x, y, m);
            if v.order() == order {
                out.push(v);
            }
        }
    }
    Ok(out)
}
