//! Published nonsurjective mod-p image classes for non-CM elliptic curves
//! over ℚ, keyed by their standard subgroup labels.
//!
//! Each row records the subgroup order and the set of distinct orbit lengths
//! on points of order p (the possible residue degrees of such points). The
//! labels are carried as opaque identifiers; all structural facts about the
//! classes are recomputed from matrix groups and matched against these rows
//! by (order, degree set), never decoded from the label text.
//!
//! For p ≤ 11 the list at p is complete. For p ∈ {13, 17, 37} it covers the
//! classes known to occur; the remaining candidates at those primes are
//! handled separately as conditional possibilities.

use serde::Serialize;

/// A published subgroup class of GL₂(F_p).
#[derive(Debug, PartialEq, Eq, Serialize)]
pub struct PublishedClass {
    pub prime: u32,
    pub label: &'static str,
    /// Subgroup order.
    pub order: u64,
    /// Distinct orbit lengths on points of order `prime`, ascending.
    pub degrees: &'static [u64],
}

macro_rules! rows {
    ($( $p:literal, $label:literal, $order:literal, [$($d:literal),+] );+ $(;)?) => {
        &[ $( PublishedClass { prime: $p, label: $label, order: $order, degrees: &[$($d),+] } ),+ ]
    };
}

/// All published classes, grouped by prime, ascending order within a prime.
pub static MOD_P_IMAGE_CLASSES: &[PublishedClass] = rows![
    2, "2Cs", 1, [1];
    2, "2B", 2, [1, 2];
    2, "2Cn", 3, [3];
    3, "3Cs.1.1", 2, [1, 2];
    3, "3Cs", 4, [2, 4];
    3, "3B.1.1", 6, [1, 6];
    3, "3B.1.2", 6, [2, 3];
    3, "3Ns", 8, [4];
    3, "3B", 12, [2, 6];
    3, "3Nn", 16, [8];
    5, "5Cs.1.1", 4, [1, 4];
    5, "5Cs.1.3", 4, [2, 4];
    5, "5Cs.4.1", 8, [2, 4, 8];
    5, "5Ns.2.1", 16, [8, 16];
    5, "5Cs", 16, [4, 16];
    5, "5B.1.1", 20, [1, 20];
    5, "5B.1.2", 20, [4, 5];
    5, "5B.1.4", 20, [2, 20];
    5, "5B.1.3", 20, [4, 10];
    5, "5Ns", 32, [8, 16];
    5, "5B.4.1", 40, [2, 20];
    5, "5B.4.2", 40, [4, 10];
    5, "5Nn", 48, [24];
    5, "5B", 80, [4, 20];
    5, "5S4", 96, [24];
    7, "7Ns.2.1", 18, [6, 9, 18];
    7, "7Ns.3.1", 36, [12, 18];
    7, "7B.1.1", 42, [1, 42];
    7, "7B.1.3", 42, [6, 7];
    7, "7B.1.2", 42, [3, 42];
    7, "7B.1.5", 42, [6, 21];
    7, "7B.1.6", 42, [2, 21];
    7, "7B.1.4", 42, [3, 14];
    7, "7Ns", 72, [12, 36];
    7, "7B.6.1", 84, [2, 42];
    7, "7B.6.3", 84, [6, 14];
    7, "7B.6.2", 84, [6, 42];
    7, "7Nn", 96, [48];
    7, "7B.2.1", 126, [3, 42];
    7, "7B.2.3", 126, [6, 21];
    7, "7B", 252, [6, 42];
    11, "11B.1.4", 110, [5, 110];
    11, "11B.1.5", 110, [5, 110];
    11, "11B.1.6", 110, [10, 55];
    11, "11B.1.7", 110, [10, 55];
    11, "11B.10.4", 220, [10, 110];
    11, "11B.10.5", 220, [10, 110];
    11, "11Nn", 240, [120];
    13, "13S4", 288, [72, 96];
    13, "13B.3.1", 468, [3, 156];
    13, "13B.3.2", 468, [12, 39];
    13, "13B.3.4", 468, [6, 156];
    13, "13B.3.7", 468, [12, 78];
    13, "13B.5.1", 624, [4, 156];
    13, "13B.5.2", 624, [12, 52];
    13, "13B.5.4", 624, [12, 156];
    13, "13B.4.1", 936, [6, 156];
    13, "13B.4.2", 936, [12, 78];
    13, "13B", 1872, [12, 156];
    17, "17B.4.2", 1088, [8, 272];
    17, "17B.4.6", 1088, [16, 136];
    37, "37B.8.1", 15984, [12, 1332];
    37, "37B.8.2", 15984, [36, 444];
];

/// Primes with at least one published class.
pub const LISTED_PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 37];

/// Primes where the class list is complete (every nonsurjective non-CM
/// image at p is one of the rows).
pub const COMPLETE_PRIMES: [u32; 5] = [2, 3, 5, 7, 11];

/// All published classes at a prime, in listed order.
pub fn classes_at(p: u32) -> impl Iterator<Item = &'static PublishedClass> {
    MOD_P_IMAGE_CLASSES.iter().filter(move |row| row.prime == p)
}

/// Look up a class by prime and label.
pub fn published_class(prime: u32, label: &str) -> Option<&'static PublishedClass> {
    MOD_P_IMAGE_CLASSES.iter().find(|row| row.prime == prime && row.label == label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts_by_prime() {
        let counts: Vec<usize> = LISTED_PRIMES.iter().map(|&p| classes_at(p).count()).collect();
        assert_eq!(counts, vec![3, 7, 15, 16, 7, 11, 2, 2]);
        assert_eq!(MOD_P_IMAGE_CLASSES.len(), 63);
    }

    #[test]
    fn rows_are_internally_consistent() {
        for row in MOD_P_IMAGE_CLASSES {
            assert!(crate::catalog::is_prime(row.prime as u64), "{}", row.label);
            assert!(row.degrees.windows(2).all(|w| w[0] < w[1]), "{}: degrees sorted", row.label);
            let p = row.prime as u64;
            let gl2 = (p * p - 1) * (p * p - p);
            assert_eq!(gl2 % row.order, 0, "{}: order divides |GL₂|", row.label);
            // each degree is an orbit length on the p² − 1 points of order p,
            // and divides the group order by orbit-stabilizer
            for &d in row.degrees {
                assert!(d <= p * p - 1, "{}: degree {d} out of range", row.label);
                assert_eq!(row.order % d, 0, "{}: degree {d} divides order", row.label);
            }
            assert!(row.degrees.iter().sum::<u64>() <= p * p - 1, "{}", row.label);
        }
    }

    #[test]
    fn lookup_examples() {
        let row = published_class(13, "13B.5.2").unwrap();
        assert_eq!(row.order, 624);
        assert_eq!(row.degrees, &[12, 52]);
        assert!(published_class(13, "13B.5.3").is_none());
        assert!(published_class(11, "13B.5.2").is_none());
    }
}
