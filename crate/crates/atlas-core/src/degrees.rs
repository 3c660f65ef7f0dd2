//! Degree atlas: for each prime p, the set of field degrees in which a
//! point of order p can first appear on an elliptic curve over ℚ, read off
//! as orbit lengths of order-p vectors under every possible mod-p image.
//!
//! Degrees of a named or computed image come from a generator-only orbit
//! walk over the p²−1 vectors of order p, so the group itself is never
//! materialized (GL₂(F₁₆₃) has half a billion elements; its vector orbits
//! are tiny). Degrees of a published class come straight off its row.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::catalog::{
    cm_possible_images, named_group_generators, noncm_possible_images, ImageGroup, ImageWitness,
    CM_ORDERS,
};
use crate::error::AlgebraError;
use crate::residue::{vectors_of_order, Mat2};

type Result<T> = std::result::Result<T, AlgebraError>;

/// Distinct orbit lengths of order-`modulus` vectors under the group
/// generated by `gens`, computed without materializing the group.
pub fn orbit_lengths_under(gens: &[Mat2], modulus: u64) -> Result<BTreeSet<u64>> {
    for g in gens {
        if g.modulus() as u64 != modulus {
            return Err(AlgebraError::ModulusMismatch(g.modulus() as u64, modulus));
        }
    }
    let mut seen: FxHashSet<u32> = FxHashSet::default();
    let mut lengths = BTreeSet::new();
    for v in vectors_of_order(modulus, modulus)? {
        if !seen.insert(v.packed()) {
            continue;
        }
        // generator-only BFS covers the full group orbit: inverses are
        // positive generator powers in a finite group
        let mut queue = vec![v];
        let mut head = 0;
        while head < queue.len() {
            let w = queue[head].clone();
            head += 1;
            for g in gens {
                let image = w.apply(g)?;
                if seen.insert(image.packed()) {
                    queue.push(image);
                }
            }
        }
        lengths.insert(queue.len() as u64);
    }
    Ok(lengths)
}

/// The degree set of one possible image.
pub fn degrees_of_image(image: &ImageGroup) -> Result<BTreeSet<u64>> {
    match image {
        ImageGroup::Named(spec) => {
            let gens = named_group_generators(spec)?;
            orbit_lengths_under(&gens, spec.p as u64)
        }
        ImageGroup::Labeled(row) => Ok(row.degrees.iter().copied().collect()),
        ImageGroup::Computed { modulus, .. } => {
            let gens = image.computed_generators().expect("computed image carries generators");
            orbit_lengths_under(&gens, *modulus as u64)
        }
    }
}

/// A witness for one degree in the report.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeWitnessNote {
    pub image: String,
    pub conditional: bool,
    pub cm: bool,
}

/// One row of the degree atlas at a prime.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeEntry {
    pub degree: u64,
    /// Every unconditional witness comes from a CM curve.
    pub cm_only: bool,
    /// Every witness at all is conditional: the degree is possible only if
    /// mod-p surjectivity fails for some unknown non-CM curve.
    pub conditional: bool,
    pub witnesses: Vec<DegreeWitnessNote>,
}

/// The degree atlas at a prime.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    pub prime: u32,
    pub assume_surjectivity_conjecture: bool,
    pub entries: Vec<DegreeEntry>,
}

impl DegreeReport {
    pub fn degree_set(&self) -> BTreeSet<u64> {
        self.entries.iter().map(|e| e.degree).collect()
    }
}

/// Compute the full degree atlas at p: all witnesses (non-CM families,
/// published classes, CM branches), their degree sets, and the per-degree
/// status flags.
pub fn degrees_for_prime(p: u32, assume_surjectivity_conjecture: bool) -> Result<DegreeReport> {
    let mut witnesses: Vec<ImageWitness> =
        noncm_possible_images(p, assume_surjectivity_conjecture)?;
    let mut seen_cm: FxHashSet<String> = FxHashSet::default();
    for order in CM_ORDERS {
        for w in cm_possible_images(order, p)? {
            // different orders often land on the same image; keep one
            if seen_cm.insert(w.group.describe()) {
                witnesses.push(w);
            }
        }
    }
    let mut rows: BTreeMap<u64, Vec<DegreeWitnessNote>> = BTreeMap::new();
    for w in &witnesses {
        let degrees = degrees_of_image(&w.group)?;
        for d in degrees {
            rows.entry(d).or_default().push(DegreeWitnessNote {
                image: w.group.describe(),
                conditional: w.conditional,
                cm: w.cm,
            });
        }
    }
    let entries = rows
        .into_iter()
        .map(|(degree, witnesses)| {
            let conditional = witnesses.iter().all(|w| w.conditional);
            let cm_only =
                !conditional && witnesses.iter().filter(|w| !w.conditional).all(|w| w.cm);
            DegreeEntry { degree, cm_only, conditional, witnesses }
        })
        .collect();
    Ok(DegreeReport { prime: p, assume_surjectivity_conjecture, entries })
}

/// The minimal degrees under divisibility: every degree at p is a multiple
/// of one of these, so they characterize which d admit growth at p.
pub fn minimal_divisor_set(p: u32) -> Result<BTreeSet<u64>> {
    let report = degrees_for_prime(p, false)?;
    let all: Vec<u64> = report.degree_set().into_iter().collect();
    Ok(all
        .iter()
        .filter(|&&d| all.iter().all(|&e| e == d || d % e != 0))
        .copied()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{GroupName, NamedGroupSpec};

    fn degree_set(p: u32, assume: bool) -> BTreeSet<u64> {
        degrees_for_prime(p, assume).unwrap().degree_set()
    }

    fn flagged(p: u32) -> Vec<(u64, bool, bool)> {
        degrees_for_prime(p, false)
            .unwrap()
            .entries
            .iter()
            .map(|e| (e.degree, e.cm_only, e.conditional))
            .collect()
    }

    #[test]
    fn orbit_lengths_without_materializing() {
        // the full group mod 163, straight from two generators
        let spec = NamedGroupSpec::new(GroupName::Gl2, 163);
        let gens = named_group_generators(&spec).unwrap();
        let lengths = orbit_lengths_under(&gens, 163).unwrap();
        assert_eq!(lengths.into_iter().collect::<Vec<_>>(), vec![163 * 163 - 1]);
        // split Cartan normalizer mod 5: orbits of lengths 8 and 16
        let spec = NamedGroupSpec::new(GroupName::CsPlus, 5);
        let gens = named_group_generators(&spec).unwrap();
        let lengths = orbit_lengths_under(&gens, 5).unwrap();
        assert_eq!(lengths.into_iter().collect::<Vec<_>>(), vec![8, 16]);
    }

    #[test]
    fn small_prime_degree_sets() {
        assert_eq!(degree_set(2, false), BTreeSet::from([1, 2, 3]));
        assert_eq!(degree_set(3, false), BTreeSet::from([1, 2, 3, 4, 6, 8]));
        assert_eq!(degree_set(5, false), BTreeSet::from([1, 2, 4, 5, 8, 10, 16, 20, 24]));
        assert_eq!(
            degree_set(7, false),
            BTreeSet::from([1, 2, 3, 6, 7, 9, 12, 14, 18, 21, 24, 36, 42, 48])
        );
    }

    #[test]
    fn degree_flags_at_seven() {
        // 24 comes only from the CM branch (G₃ at 7 ≡ 7 mod 9); everything
        // else has a non-CM unconditional witness
        let rows = flagged(7);
        for (d, cm_only, conditional) in rows {
            assert!(!conditional, "no conditional degrees at 7, got {d}");
            assert_eq!(cm_only, d == 24, "cm_only flag wrong at degree {d}");
        }
    }

    #[test]
    fn degree_flags_at_eleven() {
        let rows = flagged(11);
        let expected: Vec<(u64, bool)> = vec![
            (5, false),
            (10, false),
            (20, true),
            (40, true),
            (55, false),
            (80, true),
            (100, true),
            (110, false),
            (120, false),
        ];
        assert_eq!(
            rows.iter().map(|&(d, c, _)| (d, c)).collect::<Vec<_>>(),
            expected,
            "degree/cm_only table at 11"
        );
        assert!(rows.iter().all(|&(_, _, cond)| !cond));
    }

    #[test]
    fn degree_flags_at_seventeen() {
        let rows = flagged(17);
        let expected: Vec<(u64, bool, bool)> = vec![
            (8, false, false),
            (16, false, false),
            (32, true, false),
            (96, false, true),
            (136, false, false),
            (192, false, true),
            (256, true, false),
            (272, false, false),
            (288, false, false),
        ];
        assert_eq!(rows, expected);
        // assuming surjectivity removes exactly the conditional degrees
        assert_eq!(
            degree_set(17, true),
            BTreeSet::from([8, 16, 32, 136, 256, 272, 288])
        );
    }

    #[test]
    fn degree_flags_at_nineteen() {
        let rows = flagged(19);
        let expected: Vec<(u64, bool, bool)> = vec![
            (9, true, false),
            (18, true, false),
            (36, true, false),
            (171, true, false),
            (324, true, false),
            (342, true, false),
            (360, false, false),
        ];
        assert_eq!(rows, expected);
    }

    #[test]
    fn minimal_divisor_sets() {
        let cases: [(u32, &[u64]); 9] = [
            (2, &[1]),
            (5, &[1]),
            (11, &[5]),
            (13, &[3, 4]),
            (17, &[8]),
            (19, &[9]),
            (37, &[12]),
            (43, &[21]),
            (67, &[33]),
        ];
        for (p, want) in cases {
            let got: Vec<u64> = minimal_divisor_set(p).unwrap().into_iter().collect();
            assert_eq!(got, want, "minimal divisor set at {p}");
        }
    }
}
