//! Self-contained reproductions of the delegated finite-group computations.
//!
//! Every check recomputes its claim from scratch and returns a
//! [`ReproResult`]: a pass/fail verdict plus machine-readable evidence. The
//! registry in [`run_check`] / [`CHECK_NAMES`] is what the command-line
//! `check` subcommand dispatches on.

use crate::catalog::{
    build_named, scalar_subgroup, unit_group_generators, GroupName, ImageGroup, NamedGroupSpec,
};
use crate::census::{
    census_of_named, fingerprint_of, satisfies_image_constraints, subgroup_census, SubgroupClass,
};
use crate::error::AlgebraError;
use crate::group::MatGroup;
use crate::labels;
use crate::residue::Mat2;
use once_cell::sync::OnceCell;
use serde::Serialize;
use serde_json::{json, Value};

type Result<T> = std::result::Result<T, AlgebraError>;

/// Outcome of one reproduction check.
#[derive(Debug, Clone, Serialize)]
pub struct ReproResult {
    pub name: String,
    pub pass: bool,
    pub evidence: Value,
}

impl ReproResult {
    fn new(name: &str, pass: bool, evidence: Value) -> ReproResult {
        ReproResult { name: name.to_string(), pass, evidence }
    }
}

// ---- published-table check ------------------------------------------------------

/// Standard ambients whose subgroup censuses jointly cover every published
/// class at p: the Borel, both Cartan normalizers, and (where a projective
/// S4 class is listed) the S4 preimage. At p = 2 the full GL₂ suffices.
pub fn covering_ambients(p: u32) -> Vec<GroupName> {
    if p == 2 {
        return vec![GroupName::Gl2];
    }
    let mut out = vec![GroupName::BorelFull, GroupName::CsPlus, GroupName::CnsPlus];
    if labels::classes_at(p).any(|row| row.label.ends_with("S4")) {
        out.push(GroupName::Ps4Preimage);
    }
    out
}

/// Verify that every published class row at census-size primes matches a
/// census class by (order, degree set), and that the rows at 17 and 37 match
/// classes found by a targeted Borel-family search.
///
/// `full_borel_census` additionally runs the (slow) full censuses at 17 and
/// 37 instead of only the targeted family search.
pub fn check_tables(full_borel_census: bool) -> Result<ReproResult> {
    let mut rows_out: Vec<Value> = Vec::new();
    let mut pass = true;
    for &p in &[2u32, 3, 5, 7, 11, 13] {
        let ambients = covering_ambients(p);
        let mut censuses: Vec<(GroupName, std::sync::Arc<Vec<SubgroupClass>>)> = Vec::new();
        for name in &ambients {
            censuses.push((*name, census_of_named(*name, p)?));
        }
        for row in labels::classes_at(p) {
            let mut found_in: Option<GroupName> = None;
            for (name, census) in &censuses {
                if census.iter().any(|c| {
                    c.fingerprint.order == row.order && c.fingerprint.degrees == row.degrees
                }) {
                    found_in = Some(*name);
                    break;
                }
            }
            if found_in.is_none() {
                pass = false;
                rows_out.push(json!({
                    "label": row.label,
                    "matched": false,
                    "nearest": nearest_fingerprints(row, &censuses),
                }));
            } else {
                rows_out.push(json!({
                    "label": row.label,
                    "matched": true,
                    "ambient": found_in.unwrap().as_str(),
                }));
            }
        }
    }
    for &p in &[17u32, 37] {
        let matched = if full_borel_census {
            let census = census_of_named(GroupName::BorelFull, p)?;
            labels::classes_at(p)
                .map(|row| {
                    let hit = census.iter().any(|c| {
                        c.fingerprint.order == row.order && c.fingerprint.degrees == row.degrees
                    });
                    (row, hit)
                })
                .collect::<Vec<_>>()
        } else {
            let found = targeted_borel_classes(p)?;
            labels::classes_at(p)
                .map(|row| {
                    let hit = found.iter().any(|f| {
                        f.order == row.order && f.degrees == row.degrees
                    });
                    (row, hit)
                })
                .collect::<Vec<_>>()
        };
        for (row, hit) in matched {
            pass &= hit;
            rows_out.push(json!({
                "label": row.label,
                "matched": hit,
                "route": if full_borel_census { "full-census" } else { "targeted" },
            }));
        }
    }
    Ok(ReproResult::new(
        "tables",
        pass,
        json!({ "rows": rows_out, "row_count": labels::MOD_P_IMAGE_CLASSES.len() }),
    ))
}

fn nearest_fingerprints(
    row: &labels::PublishedClass,
    censuses: &[(GroupName, std::sync::Arc<Vec<SubgroupClass>>)],
) -> Vec<Value> {
    let mut near: Vec<Value> = Vec::new();
    for (name, census) in censuses {
        for c in census.iter().filter(|c| c.fingerprint.order == row.order) {
            near.push(json!({
                "ambient": name.as_str(),
                "order": c.fingerprint.order,
                "degrees": c.fingerprint.degrees,
            }));
        }
    }
    near
}

/// Fingerprint summary of one targeted-search hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetedClass {
    pub order: u64,
    pub degrees: Vec<u64>,
}

/// Subgroup sizes reachable inside the Borel at large p without a census:
/// the published classes at 17 and 37 all have the shape
/// ⟨diag(a, b), s·I, [[1,1],[0,1]]⟩ (full unipotent part, plus a diagonal
/// part). The diagonal part is a subgroup of (ℤ/(p−1))², so its size comes
/// from a lattice walk, and only the handful of family members whose order
/// matches a published row are materialized and fingerprinted.
pub fn targeted_borel_classes(p: u32) -> Result<Vec<TargetedClass>> {
    let wanted: Vec<u64> = labels::classes_at(p).map(|r| r.order).collect();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }
    let n = p as u64 - 1;
    let mut out = Vec::new();
    let mut seen: std::collections::BTreeSet<(u64, Vec<u64>)> = Default::default();
    // distinct diagonal subgroups already materialized; keys the matrix
    // closure (the expensive step) to once per subgroup instead of once per
    // generating triple
    let mut lattice_seen: std::collections::BTreeSet<Vec<u64>> = Default::default();
    // diagonal part generated by (a, b) and (s, s) in exponent coordinates
    // (ℤ/n)²; group size is p · |⟨(a,b),(s,s)⟩|
    for a_exp in 0..n {
        for b_exp in 0..n {
            for s_exp in 0..n {
                let diag = lattice_subgroup_elements(n, (a_exp, b_exp), (s_exp, s_exp));
                let order = p as u64 * diag.len() as u64;
                if !wanted.contains(&order) {
                    continue;
                }
                if !lattice_seen.insert(diag) {
                    continue;
                }
                let g = crate::catalog::primitive_root(p) as u64;
                let pw = |e: u64| -> i64 {
                    let mut acc = 1u64;
                    let mut base = g;
                    let mut e = e;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = acc * base % p as u64;
                        }
                        base = base * base % p as u64;
                        e >>= 1;
                    }
                    acc as i64
                };
                let gens = vec![
                    Mat2::new([pw(a_exp), 0, 0, pw(b_exp)], p as u64)?,
                    Mat2::new([pw(s_exp), 0, 0, pw(s_exp)], p as u64)?,
                    Mat2::new([1, 1, 0, 1], p as u64)?,
                ];
                let group = MatGroup::closure_with_cap(&gens, 2 * order)?;
                if group.order() != order {
                    continue;
                }
                let fp = fingerprint_of(&group);
                let entry = (fp.order, fp.degrees.clone());
                if seen.insert(entry.clone()) {
                    out.push(TargetedClass { order: entry.0, degrees: entry.1 });
                }
            }
        }
    }
    Ok(out)
}

/// Elements of the subgroup of (ℤ/n)² generated by two vectors, by BFS.
/// Sorted and packed as x·n + y, so the list doubles as a dedupe key.
fn lattice_subgroup_elements(n: u64, v1: (u64, u64), v2: (u64, u64)) -> Vec<u64> {
    let mut seen = rustc_hash::FxHashSet::default();
    seen.insert((0u64, 0u64));
    let mut queue = vec![(0u64, 0u64)];
    let mut head = 0;
    while head < queue.len() {
        let (x, y) = queue[head];
        head += 1;
        for &(dx, dy) in &[v1, v2] {
            let next = ((x + dx) % n, (y + dy) % n);
            if seen.insert(next) {
                queue.push(next);
            }
        }
    }
    let mut elems: Vec<u64> = seen.into_iter().map(|(x, y)| x * n + y).collect();
    elems.sort_unstable();
    elems
}

// ---- mod-13 class analysis -------------------------------------------------------

/// One fused GL₂(F₁₃)-conjugacy class from the mod-13 analysis.
#[derive(Debug, Clone)]
pub struct Mod13Class {
    pub rep: MatGroup,
    /// Which of the three ambients contained it.
    pub ambients: Vec<GroupName>,
    pub stable_lines: u64,
    pub stable_line_pairs: u64,
    /// The class of one of the three ambient groups themselves.
    pub is_ambient: bool,
}

pub struct Mod13Analysis {
    pub classes: Vec<Mod13Class>,
    /// Proper classes with no stable line but a stable line pair: the ones
    /// not excluded by the rational-isogeny contradiction.
    pub survivors: Vec<MatGroup>,
}

static MOD13: OnceCell<Mod13Analysis> = OnceCell::new();

/// The mod-13 candidate-image analysis, computed once:
/// census the three maximal-type ambients at 13, keep the subgroup classes
/// satisfying the rational-image constraints, and fuse them under
/// GL₂(F₁₃)-conjugacy.
pub fn mod13_analysis() -> Result<&'static Mod13Analysis> {
    MOD13.get_or_try_init(|| {
        let gl2 = build_named(&NamedGroupSpec::new(GroupName::Gl2, 13))?;
        let ambient_names =
            [GroupName::CsPlus, GroupName::CnsPlus, GroupName::Ps4Preimage];
        let mut fused: Vec<(Vec<u64>, Mod13Class)> = Vec::new();
        let mut ambient_keys: Vec<Vec<u64>> = Vec::new();
        for name in ambient_names {
            let ambient = build_named(&NamedGroupSpec::new(name, 13))?;
            let (min_elems, _, _) = crate::census::conjugate_orbit(&gl2, &ambient);
            ambient_keys.push(min_elems);
            for class in census_of_named(name, 13)?.iter() {
                if !satisfies_image_constraints(&class.rep)? {
                    continue;
                }
                let (canon, _, _) = crate::census::conjugate_orbit(&gl2, &class.rep);
                match fused.iter_mut().find(|(k, _)| *k == canon) {
                    Some((_, existing)) => {
                        if !existing.ambients.contains(&name) {
                            existing.ambients.push(name);
                        }
                    }
                    None => {
                        let rep = MatGroup::from_sorted_packed(13, canon.clone(), vec![])
                            .with_small_generating_set();
                        let stable_lines = rep.stable_lines()?.len() as u64;
                        let stable_line_pairs = rep.stable_line_pairs()?.len() as u64;
                        fused.push((
                            canon,
                            Mod13Class {
                                rep,
                                ambients: vec![name],
                                stable_lines,
                                stable_line_pairs,
                                is_ambient: false,
                            },
                        ));
                    }
                }
            }
        }
        let mut classes: Vec<Mod13Class> = fused
            .into_iter()
            .map(|(canon, mut class)| {
                class.is_ambient = ambient_keys.contains(&canon);
                class
            })
            .collect();
        classes.sort_by_key(|c| (c.rep.order(), c.rep.packed_elems().to_vec()));
        let survivors: Vec<MatGroup> = classes
            .iter()
            .filter(|c| !c.is_ambient && c.stable_lines == 0 && c.stable_line_pairs > 0)
            .map(|c| c.rep.clone())
            .collect();
        Ok(Mod13Analysis { classes, survivors })
    })
}

/// The conditional mod-13 images beyond the Cartan normalizers: subgroup
/// classes passing the image constraints that a rational 13²-isogeny
/// argument cannot exclude.
pub fn isogeny_surviving_classes() -> Result<Vec<ImageGroup>> {
    Ok(mod13_analysis()?
        .survivors
        .iter()
        .map(|rep| {
            ImageGroup::computed_from(
                format!(
                    "mod-13 class of order {} with a stable line pair and no stable line",
                    rep.order()
                ),
                rep,
            )
        })
        .collect())
}

// ---- GL₂(F₃) structure check ------------------------------------------------------

/// GL₂(F₃): solvable, of order 48, no S4 subgroup, projective quotient S4,
/// transitive on the 8 nonzero vectors with stabilizer of order 6.
pub fn check_gl2f3_s4() -> Result<ReproResult> {
    let g = build_named(&NamedGroupSpec::new(GroupName::Gl2, 3))?;
    let order_ok = g.order() == 48;
    let solvable = g.is_solvable();
    let census = subgroup_census(&g)?;
    let s4_model = crate::isotype::model("S4").expect("library model");
    let has_s4_subgroup = census.iter().any(|c| {
        c.rep.order() == 24
            && crate::isotype::isomorphic(
                &subgroup_small_model(&c.rep),
                &s4_model,
            )
    });
    let quotient = g.quotient_iso_type(&scalar_subgroup(3)?)?;
    let quotient_is_s4 = quotient.name.as_deref() == Some("S4");
    let orbits = g.orbit_decomposition(Some(3))?;
    let orbit_ok = orbits.lengths() == vec![8];
    let stab = g.stabilizer(&crate::residue::Vec2::new(1, 0, 3)?)?;
    let stab_ok = stab.order() == 6;
    let pass = order_ok && solvable && !has_s4_subgroup && quotient_is_s4 && orbit_ok && stab_ok;
    Ok(ReproResult::new(
        "gl2f3-s4",
        pass,
        json!({
            "order": g.order(),
            "solvable": solvable,
            "s4_subgroup": has_s4_subgroup,
            "projective_quotient": quotient.name,
            "orbit_lengths": orbits.lengths(),
            "point_stabilizer_order": stab.order(),
            "subgroup_class_count": census.len(),
        }),
    ))
}

/// Abstract multiplication table of a matrix group (for isomorphism tests).
fn subgroup_small_model(g: &MatGroup) -> crate::isotype::SmallGroup {
    let trivial = MatGroup::trivial(g.modulus() as u64).expect("valid modulus");
    g.quotient_small_group(&trivial).expect("trivial subgroup is normal")
}

// ---- mod-13 census check -----------------------------------------------------------

/// Verify the full mod-13 candidate-image analysis: 21 fused classes, of
/// which 3 are the ambients themselves; of the 18 proper classes, 15 have at
/// least two stable lines (excluded by a rational 13²-isogeny), none has
/// exactly one, and 3 survive with a stable line pair but no stable line.
/// The resulting unconditional-plus-conditional degree list at 13 is also
/// pinned down.
pub fn check_prop13() -> Result<ReproResult> {
    let analysis = mod13_analysis()?;
    let total = analysis.classes.len();
    let ambient = analysis.classes.iter().filter(|c| c.is_ambient).count();
    let proper: Vec<&Mod13Class> =
        analysis.classes.iter().filter(|c| !c.is_ambient).collect();
    let line_excluded = proper.iter().filter(|c| c.stable_lines >= 2).count();
    let single_line = proper.iter().filter(|c| c.stable_lines == 1).count();
    let survivors = analysis.survivors.len();
    let degrees = crate::degrees::degrees_for_prime(13, false)?.degree_set();
    let expected: std::collections::BTreeSet<u64> =
        [3, 4, 6, 12, 24, 39, 48, 52, 72, 78, 96, 144, 156, 168].into();
    let degrees_ok = degrees == expected;
    let pass = total == 21
        && ambient == 3
        && proper.len() == 18
        && line_excluded == 15
        && single_line == 0
        && survivors == 3
        && degrees_ok;
    Ok(ReproResult::new(
        "prop13-census",
        pass,
        json!({
            "fused_classes": total,
            "ambient_classes": ambient,
            "proper_classes": proper.len(),
            "excluded_by_stable_lines": line_excluded,
            "single_stable_line_classes": single_line,
            "isogeny_survivors": survivors,
            "survivor_orders":
                analysis.survivors.iter().map(MatGroup::order).collect::<Vec<_>>(),
            "degrees": degrees.iter().copied().collect::<Vec<_>>(),
            "degrees_match": degrees_ok,
        }),
    ))
}

// ---- mod-49 lifting checks ---------------------------------------------------------

/// Common body for the two mod-49 lifting checks: enumerate all subgroups of
/// GL₂(ℤ/49) reducing onto the given order-42 Borel piece (by both lifting
/// routes, which must agree), then look for pairs (G, v) with v of additive
/// order 49 and [G : Stab_G(v)] = 7.
fn lift49_check(
    name: GroupName,
    expected_degrees: [u64; 2],
    expect_witnesses: bool,
    check_name: &str,
) -> Result<ReproResult> {
    let base = build_named(&NamedGroupSpec::new(name, 7))?;
    let base_fp = fingerprint_of(&base);
    let base_ok = base_fp.order == 42 && base_fp.degrees == expected_degrees;
    let routes_agree = crate::lifts::lift_routes_agree(&base)?;
    let lifts = crate::lifts::enumerate_lifts(&base, crate::lifts::LiftRoute::Reference, true)?;
    let mut witness_orbits = 0u64;
    let mut structure_ok = true;
    let mut per_class: Vec<Value> = Vec::new();
    for class in lifts.iter() {
        let g = &class.rep;
        let dec = g.orbit_decomposition(Some(49))?;
        let sevens: Vec<_> = dec.orbits.iter().filter(|o| o.length == 7).collect();
        // stabilizers along one orbit are conjugate, so normality and the
        // quotient type are decided by a single representative per orbit
        for orbit in &sevens {
            let stab = g.stabilizer(&orbit.representative)?;
            if !g.normalizes(&stab)
                || g.quotient_iso_type(&stab)?.name.as_deref() != Some("C7")
            {
                structure_ok = false;
            }
        }
        witness_orbits += sevens.len() as u64;
        per_class.push(json!({
            "order": g.order(),
            "index_seven_orbits": sevens.len(),
        }));
    }
    let witnesses_ok = if expect_witnesses {
        witness_orbits > 0 && structure_ok
    } else {
        witness_orbits == 0
    };
    let pass = base_ok && routes_agree && witnesses_ok;
    Ok(ReproResult::new(
        check_name,
        pass,
        json!({
            "base": name.as_str(),
            "base_order": base_fp.order,
            "base_degrees": base_fp.degrees,
            "lift_classes": lifts.len(),
            "routes_agree": routes_agree,
            "index_seven_orbits": witness_orbits,
            "stabilizers_normal_with_c7_quotient": expect_witnesses && structure_ok,
            "classes": per_class,
        }),
    ))
}

/// Lifts of the Borel piece acting trivially on a line: pairs (G, v) of
/// index 7 at additive order 49 exist, and every stabilizer is normal with
/// cyclic quotient of order 7 (the shape a degree-7 torsion point field must
/// have).
pub fn check_lift49_fixline() -> Result<ReproResult> {
    lift49_check(GroupName::BorelFixLine, [1, 42], true, "lift49-fixline")
}

/// Lifts of the Borel piece acting trivially on the quotient line: no pair
/// (G, v) of index 7 at additive order 49 exists at all.
pub fn check_lift49_quotientline() -> Result<ReproResult> {
    lift49_check(GroupName::BorelQuotientLine, [6, 7], false, "lift49-quotientline")
}

// ---- index divisibility at prime-power level ----------------------------------------

/// Verify, at one level (p, n), that for G′ = {A ∈ GL₂(ℤ/p^{n+1}) :
/// A ≡ [[1,*],[0,*]] mod p^n} and every subgroup G ≤ G′, the orbit of every
/// v ≡ e₁ mod p^n has length dividing p² or dividing (p−1)p (the possible
/// degrees [F(P):F(pP)] for a point P of order p^{n+1}). At p = 2 the Galois
/// closure quotient G/core(Stab_G(v)) is additionally tested against the
/// list C1, C2, V4, D4.
///
/// The quotient list is genuinely too narrow: C4 occurs (for example
/// ⟨[[1,1],[2,1]]⟩ mod 4 is cyclic of order 4 inside G′ with trivial
/// stabilizer of e₁), so the p = 2 levels report failure. C4 is still a
/// subgroup of D4, so every conclusion drawn from the list that only needs
/// "a subgroup of D4" is unaffected. The verification is kept as stated so
/// the evidence records the exact gap.
///
/// Subgroups are enumerated up to G′-conjugacy; conjugating a subgroup moves
/// the base vector within the G′-orbit of e₁, which is why every vector of
/// that orbit is tested against each census representative.
pub fn check_index_divisibility_at(p: u64, n: u32) -> Result<ReproResult> {
    if !crate::catalog::is_prime(p) || n == 0 {
        return Err(AlgebraError::Precondition(format!(
            "index divisibility needs a prime and a positive level, got ({p}, {n})"
        )));
    }
    let level = p.pow(n);
    let modulus = p.pow(n + 1);
    // kernel p⁴, unipotent part p^n, diagonal units p^{n−1}(p−1)
    let expected_order = p.pow(4) * level * p.pow(n - 1) * (p - 1);
    let mut gens = vec![Mat2::new([1, 1, 0, 1], modulus)?];
    for u in unit_group_generators(modulus) {
        gens.push(Mat2::new([1, 0, 0, u as i64], modulus)?);
    }
    // kernel of reduction to level p^n: I + p^n·E over the matrix units
    for idx in 0..4 {
        let mut entries = [1i64, 0, 0, 1];
        entries[idx] += level as i64;
        gens.push(Mat2::new(entries, modulus)?);
    }
    let gp = MatGroup::closure_with_cap(&gens, 2 * expected_order)?;
    let order_ok = gp.order() == expected_order;
    let e1_orbit = gp.orbit(&crate::residue::Vec2::new(1, 0, modulus)?)?;
    let census = subgroup_census(&gp)?;
    let mut indices_ok = true;
    let mut quotients_ok = true;
    let mut closure_names: std::collections::BTreeSet<String> = Default::default();
    for class in census.iter() {
        for v in &e1_orbit {
            let len = class.rep.orbit(v)?.len() as u64;
            if (p * p) % len != 0 && (p * (p - 1)) % len != 0 {
                indices_ok = false;
            }
            if p == 2 {
                let t = class.rep.galois_closure_quotient(v)?;
                let name = t
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("unidentified-order-{}", t.order));
                if !["C1", "C2", "V4", "D4"].contains(&name.as_str()) {
                    quotients_ok = false;
                }
                closure_names.insert(name);
            }
        }
    }
    Ok(ReproResult::new(
        &format!("index-divisibility-{p}-{n}"),
        order_ok && indices_ok && quotients_ok,
        json!({
            "p": p,
            "level": level,
            "group_order": gp.order(),
            "order_ok": order_ok,
            "subgroup_classes": census.len(),
            "vectors_checked": e1_orbit.len(),
            "indices_ok": indices_ok,
            "quotients_ok": quotients_ok,
            "galois_closure_quotients": closure_names,
        }),
    ))
}

/// [`check_index_divisibility_at`] over the four tractable levels. The
/// orbit-size divisibility holds everywhere; the p = 2 closure-quotient list
/// fails as described there, so the aggregate reports failure with the
/// per-level evidence attached.
pub fn check_index_divisibility() -> Result<ReproResult> {
    let mut rows: Vec<Value> = Vec::new();
    let mut pass = true;
    for (p, n) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
        let case = check_index_divisibility_at(p, n)?;
        pass &= case.pass;
        rows.push(case.evidence);
    }
    Ok(ReproResult::new("index-divisibility", pass, json!({ "cases": rows })))
}

// ---- quartic quotient obstructions ---------------------------------------------------

/// A concrete matrix realization of a catalog image: named groups are built
/// directly, computed classes from their stored generators, and published
/// labels by fingerprint match against the covering censuses (any class with
/// the published order and degree set represents the row).
pub fn realize_image(img: &ImageGroup) -> Result<MatGroup> {
    match img {
        ImageGroup::Named(spec) => build_named(spec),
        ImageGroup::Computed { modulus, generators, .. } => {
            let gens: Vec<Mat2> = generators
                .iter()
                .map(|e| {
                    Mat2::new(
                        [i64::from(e[0]), i64::from(e[1]), i64::from(e[2]), i64::from(e[3])],
                        u64::from(*modulus),
                    )
                })
                .collect::<Result<_>>()?;
            MatGroup::closure(&gens)
        }
        ImageGroup::Labeled(row) => {
            for name in covering_ambients(row.prime) {
                for class in census_of_named(name, row.prime)?.iter() {
                    if class.fingerprint.order == row.order
                        && class.fingerprint.degrees == row.degrees
                    {
                        return Ok(class.rep.clone());
                    }
                }
            }
            Err(AlgebraError::Precondition(format!(
                "no census class matches published row {}",
                row.label
            )))
        }
    }
}

/// Quartic fields whose Galois closure has group S4 or A4 cannot produce
/// p-torsion for p ∈ {3, 5, 7}: every catalog image either has no orbit
/// degree dividing 4, or has no quotient isomorphic to S4 or A4. The
/// abelianization facts behind the cyclotomic-character obstruction
/// (A4 → C3, S4 → C2, so no C_{p−1} quotient for p ≥ 5) and the absence of
/// S4 as a subquotient of the nonsplit Cartan normalizer at 5 are recorded
/// alongside.
pub fn check_quotient_obstructions() -> Result<ReproResult> {
    let s4 = crate::isotype::model("S4").expect("library model");
    let a4 = crate::isotype::model("A4").expect("library model");
    let a4_invariants = a4.abelian_invariants();
    let s4_invariants = s4.abelian_invariants();
    let mut pass = a4_invariants == vec![3] && s4_invariants == vec![2];
    // no cyclic quotient of order p − 1 once p ≥ 5, for either group
    for p in [5u64, 7, 11, 13] {
        pass &= 3 % (p - 1) != 0 && 2 % (p - 1) != 0;
    }
    let cns5 = build_named(&NamedGroupSpec::new(GroupName::CnsPlus, 5))?;
    let s4_subquotient_of_cns5 = crate::census::is_quotient_of_subgroup(&s4, &cns5)?;
    pass &= !s4_subquotient_of_cns5;

    let mut rows: Vec<Value> = Vec::new();
    for p in [3u32, 5, 7] {
        let mut witnesses = crate::catalog::noncm_possible_images(p, false)?;
        for order in crate::catalog::CM_ORDERS {
            witnesses.extend(crate::catalog::cm_possible_images(order, p)?);
        }
        let mut seen: std::collections::BTreeSet<String> = Default::default();
        for w in witnesses {
            let image = w.group.describe();
            if !seen.insert(image.clone()) {
                continue;
            }
            let degrees = crate::degrees::degrees_of_image(&w.group)?;
            if !degrees.iter().any(|&d| 4 % d == 0) {
                rows.push(json!({
                    "p": p, "image": image, "obstruction": "no-degree-divides-4",
                }));
                continue;
            }
            let g = realize_image(&w.group)?;
            for (target_name, target) in [("S4", &s4), ("A4", &a4)] {
                let found = g.normal_subgroups().into_iter().any(|nsub| {
                    g.order() == nsub.order() * target.order() as u64
                        && crate::isotype::isomorphic(
                            &g.quotient_small_group(&nsub).expect("normal subgroup"),
                            target,
                        )
                });
                pass &= !found;
                rows.push(json!({
                    "p": p, "image": image, "target": target_name,
                    "quotient_found": found,
                }));
            }
        }
    }
    Ok(ReproResult::new(
        "quotient-obstructions",
        pass,
        json!({
            "a4_abelianization": a4_invariants,
            "s4_abelianization": s4_invariants,
            "s4_subquotient_of_cns5": s4_subquotient_of_cns5,
            "images": rows,
        }),
    ))
}

// ---- registry ------------------------------------------------------------------------

/// Names accepted by [`run_check`], in the order `check all` runs them.
pub const CHECK_NAMES: [&str; 7] = [
    "tables",
    "prop13-census",
    "lift49-fixline",
    "lift49-quotientline",
    "gl2f3-s4",
    "index-divisibility",
    "quotient-obstructions",
];

/// Run one reproduction check by name.
pub fn run_check(name: &str, full_borel_census: bool) -> Result<ReproResult> {
    match name {
        "tables" => check_tables(full_borel_census),
        "prop13-census" => check_prop13(),
        "lift49-fixline" => check_lift49_fixline(),
        "lift49-quotientline" => check_lift49_quotientline(),
        "gl2f3-s4" => check_gl2f3_s4(),
        "index-divisibility" => check_index_divisibility(),
        "quotient-obstructions" => check_quotient_obstructions(),
        other => Err(AlgebraError::Precondition(format!(
            "unknown check '{other}' (available: {})",
            CHECK_NAMES.join(", ")
        ))),
    }
}

/// Run every registered check and return the results in registry order.
/// The checks are independent, so they run on the rayon pool; the shared
/// census and lift caches are lock-protected and at worst recompute a value
/// that two checks race for.
pub fn run_all_checks(full_borel_census: bool) -> Result<Vec<ReproResult>> {
    use rayon::prelude::*;
    CHECK_NAMES.par_iter().map(|name| run_check(name, full_borel_census)).collect()
}
