//! Acceptance gate: ten numbered criteria, each a test that prints one
//! PASS/FAIL verdict line (visible with `--nocapture`; the per-test ok/FAILED
//! line carries the same information either way). The gate only passes when
//! every computation reproduces its published value exactly.

mod support;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use atlas_core::catalog::{build_named, GroupName, NamedGroupSpec};
use atlas_core::checks;
use atlas_core::degrees::degrees_for_prime;
use atlas_core::labels;
use atlas_core::lifts;
use atlas_core::rqd;
use num::rational::Ratio;
use proptest::prelude::Strategy;
use support::*;

fn verdict(number: u8, name: &str, pass: bool) {
    println!("criterion {number:02} ({name}): {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {number:02} ({name}) failed");
}

/// Distinct orbit lengths of the family on the nonzero vectors mod p.
fn family_degrees(name: GroupName, p: u32) -> BTreeSet<u64> {
    let g = build_named(&NamedGroupSpec::new(name, p)).expect("family defined at p");
    g.orbit_decomposition(Some(p as u64))
        .expect("prime layer")
        .lengths()
        .into_iter()
        .collect()
}

#[test]
fn criterion_01_published_class_tables() {
    let started = Instant::now();
    let result = checks::check_tables(false).expect("table check runs");
    let within_budget = started.elapsed() <= Duration::from_secs(600);

    let spots: [(u32, &str, u64, &[u64]); 3] = [
        (5, "5S4", 96, &[24]),
        (13, "13B", 1872, &[12, 156]),
        (37, "37B.8.1", 15984, &[12, 1332]),
    ];
    let spots_ok = spots.iter().all(|&(p, label, order, degrees)| {
        labels::published_class(p, label)
            .map(|row| row.order == order && row.degrees == degrees)
            .unwrap_or(false)
    });

    let counts: Vec<(u32, usize)> =
        [2u32, 3, 5, 7, 11, 13, 17, 37].iter().map(|&p| (p, labels::classes_at(p).count())).collect();
    let coverage_ok = labels::MOD_P_IMAGE_CLASSES.len() == 63
        && counts == vec![(2, 3), (3, 7), (5, 15), (7, 16), (11, 7), (13, 11), (17, 2), (37, 2)];

    verdict(1, "published class tables", result.pass && within_budget && spots_ok && coverage_ok);
}

/// Expected rows for one prime: plain degrees, CM-only degrees, degrees with
/// only conditional witnesses.
fn expect_rows(plain: &[u64], cm_only: &[u64], conditional: &[u64]) -> Vec<(u64, bool, bool)> {
    let mut all: Vec<u64> = plain.iter().chain(cm_only).chain(conditional).copied().collect();
    all.sort_unstable();
    all.iter().map(|&d| (d, cm_only.contains(&d), conditional.contains(&d))).collect()
}

#[test]
fn criterion_02_degree_table_rows() {
    let table: &[(u32, &[u64], &[u64], &[u64])] = &[
        (2, &[1, 2, 3], &[], &[]),
        (3, &[1, 2, 3, 4, 6, 8], &[], &[]),
        (5, &[1, 2, 4, 5, 8, 10, 16, 20, 24], &[], &[]),
        (7, &[1, 2, 3, 6, 7, 9, 12, 14, 18, 21, 36, 42, 48], &[24], &[]),
        (11, &[5, 10, 55, 110, 120], &[20, 40, 80, 100], &[]),
        (13, &[3, 4, 6, 12, 39, 52, 72, 78, 96, 156, 168], &[24, 48, 144], &[]),
        (17, &[8, 16, 136, 272, 288], &[32, 256], &[96, 192]),
        (37, &[12, 36, 444, 1332, 1368], &[72, 1296], &[]),
    ];
    let mut pass = true;
    for &(p, plain, cm_only, conditional) in table {
        let got: Vec<(u64, bool, bool)> = degrees_for_prime(p, false)
            .expect("report computes")
            .entries
            .iter()
            .map(|e| (e.degree, e.cm_only, e.conditional))
            .collect();
        let want = expect_rows(plain, cm_only, conditional);
        if got != want {
            println!("  degree rows at p = {p}: got {got:?}, want {want:?}");
            pass = false;
        }
    }
    // assuming surjectivity for unknown images removes exactly the
    // conditional rows
    let assumed = degrees_for_prime(17, true).expect("report computes").degree_set();
    pass &= assumed == BTreeSet::from([8u64, 16, 32, 136, 256, 272, 288]);
    verdict(2, "degree table rows with status flags", pass);
}

#[test]
fn criterion_03_closed_form_degree_sets() {
    let mut pass = true;
    for &p in &[3u32, 7, 11, 19, 43, 67, 163] {
        let q = p as u64;
        pass &= family_degrees(GroupName::G00, p) == BTreeSet::from([q - 1, (q - 1) * q]);
        pass &= family_degrees(GroupName::G10, p) == BTreeSet::from([(q - 1) / 2, (q - 1) * q]);
        pass &= family_degrees(GroupName::G01, p) == BTreeSet::from([q - 1, (q - 1) * q / 2]);
    }
    for &p in &[7u32, 13, 19, 31] {
        let q = p as u64;
        let want =
            BTreeSet::from([2 * (q - 1), (q - 1) * (q - 1) / 3, 2 * (q - 1) * (q - 1) / 3]);
        pass &= family_degrees(GroupName::G3, p) == want;
    }
    for &p in &[5u32, 11, 17, 23, 29] {
        let q = p as u64;
        pass &= family_degrees(GroupName::G0, p) == BTreeSet::from([(q * q - 1) / 3, 2 * (q * q - 1) / 3]);
    }
    verdict(3, "closed-form degree sets of the residue families", pass);
}

#[test]
fn criterion_04_growth_prime_tables() {
    let new_primes: &[(u64, &[u64])] = &[
        (1, &[2, 3, 5, 7]),
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
    ];
    let mut pass = true;
    for d in 1..=100u64 {
        let got = rqd::rq_star(d, false).expect("degree in range");
        let want: BTreeSet<u64> = new_primes
            .iter()
            .find(|(dd, _)| *dd == d)
            .map(|(_, ps)| ps.iter().copied().collect())
            .unwrap_or_default();
        if got.members != want || !got.unknown.is_empty() {
            println!("  rq_star({d}): got {:?} / unknown {:?}, want {want:?}", got.members, got.unknown);
            pass = false;
        }
    }
    let cumulative_new: &[(u64, &[u64])] = &[
        (1, &[2, 3, 5, 7]),
        (3, &[13]),
        (5, &[11]),
        (8, &[17]),
        (9, &[19]),
        (12, &[37]),
        (21, &[43]),
        (33, &[67]),
    ];
    for d in 1..=42u64 {
        let got = rqd::sq_star(d, false).expect("degree in range");
        let want: BTreeSet<u64> = cumulative_new
            .iter()
            .find(|(dd, _)| *dd == d)
            .map(|(_, ps)| ps.iter().copied().collect())
            .unwrap_or_default();
        if got.members != want || !got.unknown.is_empty() {
            println!("  sq_star({d}): got {:?} / unknown {:?}, want {want:?}", got.members, got.unknown);
            pass = false;
        }
    }
    verdict(4, "growth-prime tables for d <= 100 and d <= 42", pass);
}

#[test]
fn criterion_05_scans_and_densities() {
    let started = Instant::now();
    let p = rqd::scan_smallest_exceptional_prime();
    let scan_fast = started.elapsed() <= Duration::from_secs(1);

    let d = rqd::first_ambiguous_degree();
    let degree_ok = d == 3_343_296 && d == (3167u64 * 3167 - 1) / 3 && d != 3_342_296;

    let started = Instant::now();
    let densities_ok = rqd::exceptional_prime_density() == Ratio::new(1, 1536)
        && rqd::no_growth_density() == Ratio::new(8, 35);
    let density_fast = started.elapsed() <= Duration::from_secs(1);

    verdict(5, "scans and densities", p == 3167 && scan_fast && degree_ok && densities_ok && density_fast);
}

#[test]
fn criterion_06_applicable_class_census_at_13() {
    let started = Instant::now();
    let result = checks::check_prop13().expect("census runs");
    let within_budget = started.elapsed() <= Duration::from_secs(900);

    let analysis = checks::mod13_analysis().expect("analysis computes");
    let proper = analysis.classes.iter().filter(|c| !c.is_ambient).count();
    let excluded = analysis.classes.iter().filter(|c| !c.is_ambient && c.stable_lines >= 2).count();
    let counts_ok = proper == 18 && excluded == 15 && analysis.survivors.len() == 3;
    let degrees_ok = degrees_for_prime(13, false).expect("report computes").degree_set().len() == 14;

    verdict(6, "mod-13 applicable class census", result.pass && within_budget && counts_ok && degrees_ok);
}

#[test]
fn criterion_07_mod49_lift_search() {
    let started = Instant::now();
    let fix = checks::check_lift49_fixline().expect("search runs");
    let quot = checks::check_lift49_quotientline().expect("search runs");
    let within_budget = started.elapsed() <= Duration::from_secs(1800);

    // the two fingerprints under scrutiny, tied to their published rows
    let rows_ok = labels::published_class(7, "7B.1.1").map(|r| r.degrees == [1, 42]) == Some(true)
        && labels::published_class(7, "7B.1.3").map(|r| r.degrees == [6, 7]) == Some(true);

    // the independent enumeration routes agree on both base groups
    let routes_ok = [GroupName::BorelFixLine, GroupName::BorelQuotientLine].iter().all(|&name| {
        let base = build_named(&NamedGroupSpec::new(name, 7)).expect("Borel family at 7");
        lifts::lift_routes_agree(&base).expect("both routes run")
    });

    verdict(7, "mod-49 lift search", fix.pass && quot.pass && within_budget && rows_ok && routes_ok);
}

#[test]
fn criterion_08_gl2f3_quotient_versus_subgroup() {
    let result = checks::check_gl2f3_s4().expect("check runs");
    verdict(8, "GL2(F3): S4 as quotient but not subgroup", result.pass);
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    body: impl Fn(S::Value),
    failures: &mut Vec<String>,
) {
    use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
    let config = Config { cases: 1024, failure_persistence: None, ..Config::default() };
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[167; 32]);
    let mut runner = TestRunner::new_with_rng(config, rng);
    if let Err(e) = runner.run(&strategy, |v| {
        body(v);
        Ok(())
    }) {
        failures.push(format!("{name}: {e}"));
    }
}

#[test]
fn criterion_09_property_suites() {
    let mut failures = Vec::new();
    run_property(
        "orbit-stabilizer product identity",
        arb_group_and_vector(),
        |(g, v)| orbit_stabilizer_identity(&g, &v),
        &mut failures,
    );
    run_property(
        "orbit lengths sum to the plane size",
        arb_prime_group(),
        |g| orbit_lengths_cover_the_plane(&g),
        &mut failures,
    );
    run_property(
        "conjugation invariance of orbit multisets",
        arb_group_and_conjugator(),
        |(g, x)| conjugation_preserves_orbit_lengths(&g, &x),
        &mut failures,
    );
    run_property(
        "reduction functoriality",
        arb_reduction_chain(),
        |(g, d1, d2)| reduction_is_functorial(&g, d1, d2),
        &mut failures,
    );
    run_property(
        "census oracle equivalence",
        arb_tiny_group(),
        |g| census_matches_brute_walk(&g),
        &mut failures,
    );
    run_property(
        "lift enumeration oracle equivalence",
        arb_mod2_subgroup(),
        |b| lift_enumeration_matches_oracle(&b),
        &mut failures,
    );
    run_property(
        "membership route agreement",
        arb_membership_case(),
        |(p, d, a)| membership_routes_agree(p, d, a),
        &mut failures,
    );
    run_property(
        "growth-set monotonicity under divisibility",
        arb_monotone_case(),
        |(d, k, a)| growth_set_monotone_under_divisibility(d, k, a),
        &mut failures,
    );
    for f in &failures {
        println!("  {f}");
    }
    verdict(9, "property suites, 1024 fixed-seed cases each", failures.is_empty());
}

#[test]
fn criterion_10_divisibility_facts() {
    const PRIMES_TO_163: [u32; 38] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163,
    ];
    let mut pass = true;
    for &p in &PRIMES_TO_163 {
        let report = degrees_for_prime(p, false).expect("report computes");
        for e in &report.entries {
            // degree 1 rows (rational torsion, only at p <= 7) describe
            // points that exist before any extension, so they are outside
            // the growth question this fact feeds into
            if e.degree > 1 && ![2u64, 3, 5, 7].iter().any(|q| e.degree % q == 0) {
                println!("  degree {} at p = {p} has no small prime factor", e.degree);
                pass = false;
            }
        }
        // and degree 1 occurs exactly where a rational point of order p exists
        let has_one = report.entries.iter().any(|e| e.degree == 1);
        if has_one != (p <= 7) {
            println!("  unexpected degree-1 row status at p = {p}");
            pass = false;
        }
    }
    for &p in &[19u64, 43, 67, 163] {
        pass &= (p - 1) / 2 % 3 == 0;
    }
    for d in 1..=10_000u64 {
        if num::integer::gcd(d, 210) != 1 {
            continue;
        }
        let gs = rqd::rq(d, false).expect("degree in range");
        if gs.members != BTreeSet::from([2u64, 3, 5, 7]) || !gs.unknown.is_empty() {
            println!("  rq({d}) = {:?} / unknown {:?}", gs.members, gs.unknown);
            pass = false;
            break;
        }
    }
    verdict(10, "small-prime divisibility of all reported degrees", pass);
}
