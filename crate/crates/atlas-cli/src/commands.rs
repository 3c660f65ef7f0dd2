//! Subcommand implementations. Every command builds a canonical JSON
//! payload plus the table projection of the same rows and returns the
//! rendered emission; `check` also reports whether any verdict failed so
//! the caller can exit nonzero.

use std::fs;
use std::path::PathBuf;

use atlas_core::catalog::{
    build_named, is_prime, named_group_at, named_group_with_epsilon, GroupName, NamedGroupSpec,
};
use atlas_core::census::{satisfies_image_constraints, subgroup_census};
use atlas_core::checks::{run_all_checks, run_check};
use atlas_core::degrees::degrees_for_prime;
use atlas_core::group::MatGroup;
use atlas_core::lifts::{enumerate_lifts, lift_routes_agree, LiftRoute};
use atlas_core::rqd;
use atlas_core::AlgebraError;
use clap::{Args, ValueEnum};
use serde_json::json;

use crate::groupfile::GroupFile;
use crate::render::{emit, join, json_block, Format, Table};

type Result<T> = std::result::Result<T, AlgebraError>;

/// What a command hands back to `main`: the full stdout emission and the
/// process exit code (nonzero only for failed checks).
pub struct Outcome {
    pub stdout: String,
    pub exit: u8,
}

impl Outcome {
    pub fn emission(stdout: String) -> Outcome {
        Outcome { stdout, exit: 0 }
    }
}

fn precondition(msg: String) -> AlgebraError {
    AlgebraError::Precondition(msg)
}

fn parse_group_name(s: &str) -> std::result::Result<GroupName, String> {
    s.parse()
}

fn generator_rows(group: &MatGroup) -> Vec<[u32; 4]> {
    group.generators().iter().map(|g| g.entries()).collect()
}

// ---- group -----------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Family name: Cs, CsPlus, Cns, CnsPlus, G0, G3, G00, G10, G01,
    /// BorelFull, BorelFixLine, BorelQuotientLine, SL2, GL2, PS4Preimage
    #[arg(long, value_parser = parse_group_name)]
    pub name: GroupName,
    /// Prime level
    #[arg(long)]
    pub p: u32,
    /// Build at a prime-power modulus p^k instead (linear and Borel families only)
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Quadratic nonresidue for the nonsplit model (Cns, CnsPlus, G0 only)
    #[arg(long)]
    pub epsilon: Option<u32>,
    /// Include the orbit partition of the full plane (ℤ/m)²
    #[arg(long)]
    pub orbits: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn cmd_group(args: &GroupArgs) -> Result<String> {
    let spec = NamedGroupSpec::new(args.name, args.p);
    let group = match (args.modulus, args.epsilon) {
        (Some(m), _) if m != u64::from(args.p) => {
            if args.epsilon.is_some() {
                return Err(precondition(
                    "--epsilon parametrizes prime-level groups; it cannot combine with a prime-power --modulus".into(),
                ));
            }
            if !is_prime(u64::from(args.p)) || !is_power_of(m, args.p) {
                return Err(precondition(format!(
                    "modulus {m} is not a power of the prime {}",
                    args.p
                )));
            }
            named_group_at(args.name, m)?
        }
        (_, Some(eps)) => named_group_with_epsilon(&spec, eps)?,
        _ => build_named(&spec)?,
    };

    let mut payload = json!({
        "name": args.name.as_str(),
        "p": args.p,
        "modulus": group.modulus(),
        "epsilon": args.epsilon,
        "order": group.order(),
        "generators": generator_rows(&group),
    });
    let mut lengths_cell = String::new();
    if args.orbits {
        let dec = group.orbit_decomposition(None)?;
        lengths_cell = join(dec.lengths());
        payload["orbits"] = serde_json::to_value(&dec).expect("decomposition serializes");
    }

    let mut table =
        Table::new(vec!["name", "p", "modulus", "epsilon", "order", "orbit_lengths"]);
    table.push(vec![
        args.name.to_string(),
        args.p.to_string(),
        group.modulus().to_string(),
        args.epsilon.map(|e| e.to_string()).unwrap_or_default(),
        group.order().to_string(),
        lengths_cell,
    ]);
    Ok(emit(args.format, &payload, &table))
}

fn is_power_of(m: u64, p: u32) -> bool {
    let p = u64::from(p);
    let mut rest = m;
    while rest > 1 && rest % p == 0 {
        rest /= p;
    }
    m > 1 && rest == 1
}

// ---- degrees ---------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct DegreesArgs {
    /// Prime level
    #[arg(long)]
    pub p: u32,
    /// Treat mod-p surjectivity for non-CM curves as settled: drop the rows
    /// that are possible only if it fails
    #[arg(long)]
    pub assume_conjecture: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn cmd_degrees(args: &DegreesArgs) -> Result<String> {
    let report = degrees_for_prime(args.p, args.assume_conjecture)?;
    let payload = serde_json::to_value(&report).expect("report serializes");
    let mut table = Table::new(vec!["prime", "degree", "cm_only", "conditional"]);
    for entry in &report.entries {
        table.push(vec![
            report.prime.to_string(),
            entry.degree.to_string(),
            entry.cm_only.to_string(),
            entry.conditional.to_string(),
        ]);
    }
    Ok(emit(args.format, &payload, &table))
}

// ---- rqd -------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct RqdArgs {
    /// Largest degree to tabulate
    #[arg(long)]
    pub max_d: u64,
    /// Treat mod-p surjectivity for non-CM curves as settled
    #[arg(long)]
    pub assume_conjecture: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Rows of the starred table: degrees 1 ≤ d ≤ max where some prime shows
/// growth for the first time. Degrees with empty sets are omitted.
pub fn cmd_rqd(args: &RqdArgs) -> Result<String> {
    let mut rows = Vec::new();
    let mut table = Table::new(vec!["d", "member_primes", "conditional_primes"]);
    for d in 1..=args.max_d {
        let set = rqd::rq_star(d, args.assume_conjecture)?;
        if set.members.is_empty() && set.unknown.is_empty() {
            continue;
        }
        rows.push(json!({"d": d, "members": set.members, "unknown": set.unknown}));
        table.push(vec![d.to_string(), join(&set.members), join(&set.unknown)]);
    }
    let payload = json!({
        "max_d": args.max_d,
        "assume_conjecture": args.assume_conjecture,
        "rows": rows,
    });
    Ok(emit(args.format, &payload, &table))
}

// ---- scan ------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScanTarget {
    /// Smallest prime whose growth degrees depend on the surjectivity conjecture
    BadPrime,
    /// Smallest degree whose growth-prime set depends on it
    AmbiguousDegree,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(value_enum)]
    pub target: ScanTarget,
}

pub fn cmd_scan(args: &ScanArgs) -> Result<String> {
    let payload = match args.target {
        ScanTarget::BadPrime => {
            let density = rqd::exceptional_prime_density();
            json!({
                "target": "bad-prime",
                "value": rqd::scan_smallest_exceptional_prime(),
                "prime_density": format!("{}/{}", density.numer(), density.denom()),
            })
        }
        ScanTarget::AmbiguousDegree => json!({
            "target": "ambiguous-degree",
            "value": rqd::first_ambiguous_degree(),
            "source_prime": rqd::scan_smallest_exceptional_prime(),
        }),
    };
    Ok(json_block(&payload))
}

// ---- check -----------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// "all" or one of: tables, prop13-census, lift49-fixline,
    /// lift49-quotientline, gl2f3-s4, index-divisibility, quotient-obstructions
    pub name: String,
    /// Replace the targeted searches at p = 17 and 37 with full censuses (slow)
    #[arg(long)]
    pub full_borel_census: bool,
}

pub fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    let results = if args.name == "all" {
        run_all_checks(args.full_borel_census)?
    } else {
        vec![run_check(&args.name, args.full_borel_census)?]
    };
    fs::create_dir_all("results")
        .map_err(|e| precondition(format!("cannot create results/: {e}")))?;
    let mut stdout = String::new();
    for result in &results {
        let path = format!("results/{}.json", result.name);
        let mut body = serde_json::to_string_pretty(result).expect("result serializes");
        body.push('\n');
        fs::write(&path, body).map_err(|e| precondition(format!("cannot write {path}: {e}")))?;
        stdout.push_str(&format!(
            "{}: {}\n",
            result.name,
            if result.pass { "PASS" } else { "FAIL" }
        ));
    }
    let passed = results.iter().filter(|r| r.pass).count();
    stdout.push_str(&format!(
        "{passed}/{} checks passed; evidence in results/\n",
        results.len()
    ));
    Ok(Outcome { stdout, exit: u8::from(passed != results.len()) })
}

// ---- census ----------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Ambient family name (solvable, or small enough for the exhaustive walk)
    #[arg(long, value_parser = parse_group_name)]
    pub ambient: GroupName,
    /// Prime level
    #[arg(long)]
    pub p: u32,
    /// Keep only classes with full determinant image containing a
    /// trace-0, det-(−1) element
    #[arg(long)]
    pub applicable_only: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn cmd_census(args: &CensusArgs) -> Result<String> {
    let ambient = build_named(&NamedGroupSpec::new(args.ambient, args.p))?;
    let classes = subgroup_census(&ambient)?;
    let mut rows = Vec::new();
    let mut table = Table::new(vec!["index", "order", "conjugates", "applicable", "degrees"]);
    for (index, class) in classes.iter().enumerate() {
        let applicable = satisfies_image_constraints(&class.rep)?;
        if args.applicable_only && !applicable {
            continue;
        }
        let fp = &class.fingerprint;
        rows.push(json!({
            "index": index,
            "order": fp.order,
            "conjugates": class.conjugate_count,
            "applicable": applicable,
            "degrees": fp.degrees,
            "orbit_lengths": fp.orbit_lengths,
            "det_image_size": fp.det_image_size,
            "stable_lines": fp.stable_lines,
            "element_orders": fp.element_orders,
        }));
        table.push(vec![
            index.to_string(),
            fp.order.to_string(),
            class.conjugate_count.to_string(),
            applicable.to_string(),
            join(&fp.degrees),
        ]);
    }
    let payload = json!({
        "ambient": args.ambient.as_str(),
        "p": args.p,
        "ambient_order": ambient.order(),
        "applicable_only": args.applicable_only,
        "class_count": rows.len(),
        "classes": rows,
    });
    Ok(emit(args.format, &payload, &table))
}

// ---- lift ------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Base family name at level p
    #[arg(long, value_parser = parse_group_name)]
    pub base: GroupName,
    /// Prime level of the base group
    #[arg(long)]
    pub p: u32,
    /// Must be p²: lifting goes one level up
    #[arg(long)]
    pub target_modulus: u64,
    /// Emit one class in full (generators included) instead of the list
    #[arg(long)]
    pub orbit_index: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Enumerate the classes of subgroups of GL₂(ℤ/p²) that reduce onto the
/// base group, by the census route, and cross-check the class list against
/// the cocycle route.
pub fn cmd_lift(args: &LiftArgs) -> Result<String> {
    let p = u64::from(args.p);
    if args.target_modulus != p * p {
        return Err(precondition(format!(
            "lifting goes one level up: target modulus must be p² = {}, got {}",
            p * p,
            args.target_modulus
        )));
    }
    let base = build_named(&NamedGroupSpec::new(args.base, args.p))?;
    let classes = enumerate_lifts(&base, LiftRoute::Reference, true)?;
    let routes_agree = lift_routes_agree(&base)?;

    if let Some(index) = args.orbit_index {
        let class = classes.get(index).ok_or_else(|| {
            precondition(format!(
                "class index {index} out of range: {} classes",
                classes.len()
            ))
        })?;
        let payload = json!({
            "base": args.base.as_str(),
            "p": args.p,
            "target_modulus": args.target_modulus,
            "index": index,
            "modulus": class.rep.modulus(),
            "order": class.rep.order(),
            "surjective": class.surjective,
            "subgroup_count": class.subgroup_count,
            "generators": generator_rows(&class.rep),
            "degrees": class.fingerprint.degrees,
            "orbit_lengths": class.fingerprint.orbit_lengths,
        });
        let mut table = Table::new(vec![
            "index", "modulus", "order", "surjective", "subgroup_count", "degrees",
        ]);
        table.push(vec![
            index.to_string(),
            class.rep.modulus().to_string(),
            class.rep.order().to_string(),
            class.surjective.to_string(),
            class.subgroup_count.to_string(),
            join(&class.fingerprint.degrees),
        ]);
        return Ok(emit(args.format, &payload, &table));
    }

    let mut rows = Vec::new();
    let mut table =
        Table::new(vec!["index", "order", "surjective", "subgroup_count", "degrees"]);
    for (index, class) in classes.iter().enumerate() {
        rows.push(json!({
            "index": index,
            "order": class.rep.order(),
            "surjective": class.surjective,
            "subgroup_count": class.subgroup_count,
            "degrees": class.fingerprint.degrees,
        }));
        table.push(vec![
            index.to_string(),
            class.rep.order().to_string(),
            class.surjective.to_string(),
            class.subgroup_count.to_string(),
            join(&class.fingerprint.degrees),
        ]);
    }
    let payload = json!({
        "base": args.base.as_str(),
        "p": args.p,
        "base_order": base.order(),
        "target_modulus": args.target_modulus,
        "routes_agree": routes_agree,
        "class_count": rows.len(),
        "classes": rows,
    });
    Ok(emit(args.format, &payload, &table))
}

// ---- ingest ----------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Path to a JSON group file: {"modulus": m, "generators": [[a,b,c,d], ...]}
    #[arg(long)]
    pub file: PathBuf,
    /// Include the orbit partition of the full plane (ℤ/m)²
    #[arg(long)]
    pub orbits: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<String> {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| precondition(format!("cannot read {}: {e}", args.file.display())))?;
    let (canonical, group) = GroupFile::parse(&text)?.realize()?;

    let mut payload = json!({
        "modulus": canonical.modulus,
        "generators": canonical.generators,
        "generator_count": canonical.generators.len(),
        "order": group.order(),
        "det_image_size": group.det_image_size(),
    });
    let mut lengths_cell = String::new();
    if args.orbits {
        let dec = group.orbit_decomposition(None)?;
        lengths_cell = join(dec.lengths());
        payload["orbits"] = serde_json::to_value(&dec).expect("decomposition serializes");
    }

    let mut table = Table::new(vec!["modulus", "generator_count", "order", "orbit_lengths"]);
    table.push(vec![
        canonical.modulus.to_string(),
        canonical.generators.len().to_string(),
        group.order().to_string(),
        lengths_cell,
    ]);
    Ok(emit(args.format, &payload, &table))
}
