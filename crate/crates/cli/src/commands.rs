//! Subcommand implementations. Each returns a [`Report`] or a [`CliError`]
//! carrying the exit status.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use prym_core::cycles::{fundamental_cycle, Provenance};
use prym_core::linalg::{int_kernel, IntMatrix};
use prym_core::matroid::{simplify as simplify_cover, SignedMatroid, SimplificationStep};
use prym_core::prym::{
    compare_pryms, ground_basis, lattice_invariants, matroid_package, prym_from_matroid, prym_volume_det_polynomial,
    prym_volume_ogod, prym_volume_polynomial, raw_gram_matrix, symbolic_gram, verify_simplification_invariance,
    PrymData, Verdict, PACKAGE_LIMIT,
};
use prym_core::random::{random_cover, random_orientation, CoverShape};
use prym_core::{DoubleCover, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::document::{CoverDocument, DocumentError};
use crate::report::{self, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Document { path: PathBuf, source: DocumentError },
    #[error("{0}")]
    Computation(#[from] prym_core::Error),
    #[error("{summary}")]
    Property { summary: String, report: Box<Report> },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Document { .. } => 1,
            CliError::Computation(prym_core::Error::Inconsistent(_)) => 2,
            CliError::Computation(_) => 1,
            CliError::Property { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type CliResult = Result<Report, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load(path: &Path) -> Result<DoubleCover, CliError> {
    let text = read(path)?;
    let doc = CoverDocument::parse(&text).map_err(|source| CliError::Document { path: path.to_path_buf(), source })?;
    doc.to_cover().map_err(|source| CliError::Document { path: path.to_path_buf(), source })
}

fn file_argument(path: &Path) -> Value {
    json!({ "file": path.display().to_string() })
}

fn counts(c: &DoubleCover, m: &SignedMatroid<'_>) -> Value {
    json!({
        "genus": c.genus(),
        "totalGenus": c.total_genus(),
        "prymDimension": c.prym_dimension(),
        "dilationIndex": m.dilation_index(),
    })
}

pub fn validate(path: &Path) -> CliResult {
    let c = load(path)?;
    let m = SignedMatroid::new(&c)?;
    let mut results = counts(&c, &m);
    results["valid"] = json!(true);
    results["vertices"] = json!(c.base().vertex_count());
    results["edges"] = json!(c.base().edge_count());
    Ok(Report::new("validate", file_argument(path), results))
}

pub fn analyze(path: &Path) -> CliResult {
    let c = load(path)?;
    let m = SignedMatroid::new(&c)?;
    let g = c.base();
    let ogods: Vec<Value> = m.ogods().iter().map(|f| json!({ "edges": report::labels(g, f.edges.iter().copied()), "index": f.index })).collect();
    let mut circuits = Vec::new();
    for circuit in m.circuits()? {
        let chain = fundamental_cycle(&m, &circuit)?.chain;
        circuits.push(json!({
            "edges": report::labels(g, circuit.edges.iter().copied()),
            "type": circuit.kind.name(),
            "cycle": report::chain_text(g, &chain),
            "coefficients": report::chain(g, &chain),
        }));
    }
    let (loops, pairs) = m.circuits_dual_small()?;
    let pairs: Vec<Value> = pairs
        .iter()
        .map(|p| json!({ "edges": report::labels(g, [p.edges.0, p.edges.1]), "multiplicities": [p.multiplicities.0, p.multiplicities.1] }))
        .collect();
    let mut results = counts(&c, &m);
    results["rankDual"] = json!(m.rank());
    results["rank"] = json!(m.rank_m());
    results["ogods"] = Value::Array(ogods);
    results["circuits"] = Value::Array(circuits);
    results["dualLoops"] = report::labels(g, loops.iter().copied());
    results["dualTwoCircuits"] = json!(pairs);
    results["simple"] = json!(loops.is_empty() && pairs.is_empty());
    Ok(Report::new("analyze", file_argument(path), results))
}

fn provenance(c: &DoubleCover, p: &Provenance) -> Value {
    match p {
        Provenance::IndexOneOgod(f) => json!({ "kind": "index-one ogod", "ogod": report::labels(c.base(), f.iter().copied()) }),
        Provenance::CircuitSpan => json!({ "kind": "circuit span" }),
    }
}

pub fn gram(path: &Path, symbolic: bool) -> CliResult {
    let c = load(path)?;
    let m = SignedMatroid::new(&c)?;
    let p = PrymData::compute(&c)?;
    let g = c.base();
    let by_ogods = prym_volume_ogod(&m);
    let mut results = json!({
        "dimension": p.dimension,
        "provenance": provenance(&c, &p.provenance),
        "basis": p.basis.iter().map(|b| report::chain_text(g, b)).collect::<Vec<_>>(),
        "gram": report::rational_matrix(&p.gram),
        "rawGram": report::rational_matrix(&raw_gram_matrix(&p.basis, c.lengths())),
        "gramDeterminant": report::rational(&p.gram_determinant),
        "polarizationType": report::integers(&p.polarization_type),
        "dilationIndex": p.dilation_index,
        "volumeSquared": {
            "determinant": report::rational(&p.volume_squared),
            "ogodSum": report::rational(&by_ogods),
        },
    });
    let mut agree = p.volume_squared == by_ogods;
    if symbolic {
        let names = report::edge_names(&c);
        let det_poly = prym_volume_det_polynomial(&p);
        let ogod_poly = prym_volume_polynomial(&m);
        agree &= det_poly == ogod_poly;
        results["symbolic"] = json!({
            "gram": report::polynomial_matrix(&symbolic_gram(&p.basis, 2), &names),
            "rawGram": report::polynomial_matrix(&symbolic_gram(&p.basis, 1), &names),
            "volumeSquared": {
                "determinant": report::polynomial(&det_poly, &names),
                "ogodSum": report::polynomial(&ogod_poly, &names),
            },
        });
    }
    results["volumeSquared"]["agree"] = json!(agree);
    let mut args = file_argument(path);
    args["symbolic"] = json!(symbolic);
    let report = Report::new("gram", args, results);
    if !agree {
        return Err(CliError::Property { summary: String::from("volume routes disagree"), report: Box::new(report) });
    }
    Ok(report)
}

fn step(s: &SimplificationStep) -> Value {
    match s {
        SimplificationStep::ContractLoops { edges } => json!({ "contractLoops": edges }),
        SimplificationStep::MergeParallel { contracted, kept, contracted_multiplicity, kept_multiplicity, added_length, new_length } => json!({
            "mergeParallel": {
                "contracted": contracted,
                "kept": kept,
                "multiplicities": [contracted_multiplicity, kept_multiplicity],
                "addedLength": report::rational(added_length),
                "newLength": report::rational(new_length),
            }
        }),
    }
}

pub fn simplify(path: &Path, out: Option<&Path>) -> CliResult {
    let c = load(path)?;
    let s = simplify_cover(&c)?;
    let check = verify_simplification_invariance(&c)?;
    let doc = CoverDocument::from_cover(&s.cover);
    let mut results = json!({
        "steps": s.steps.iter().map(step).collect::<Vec<_>>(),
        "check": {
            "originalGram": report::rational_matrix(&check.original.gram),
            "transportedGram": report::rational_matrix(&check.transported_gram),
            "simplifiedGram": report::rational_matrix(&check.simplified.gram),
            "gramEqual": check.gram_equal,
            "latticeEqual": check.lattice_equal,
            "volumeEqual": check.volume_equal,
            "dilationIndexEqual": check.dilation_index_equal,
            "passed": check.passed(),
        },
    });
    let mut args = file_argument(path);
    match out {
        Some(o) => {
            fs::write(o, doc.to_json()).map_err(|source| CliError::Io { path: o.to_path_buf(), source })?;
            args["out"] = json!(o.display().to_string());
        }
        None => results["simplified"] = serde_json::to_value(&doc).expect("documents serialize"),
    }
    let report = Report::new("simplify", args, results);
    if !check.passed() {
        return Err(CliError::Property { summary: String::from("simplification changed the Prym"), report: Box::new(report) });
    }
    Ok(report)
}

fn invariants(g: &prym_core::RatMatrix, bound: &Rational) -> Result<Value, CliError> {
    let inv = lattice_invariants(g, bound)?;
    Ok(json!({
        "dimension": inv.dimension,
        "determinant": report::rational(&inv.determinant),
        "scale": report::rational(&inv.scale),
        "norm": report::rational(&inv.norm),
        "shortVectors": inv.short_vectors.iter().map(|(n, k)| json!([report::rational(n), k])).collect::<Vec<_>>(),
    }))
}

pub fn compare(a: &Path, b: &Path, bound: u32) -> CliResult {
    let (ca, cb) = (load(a)?, load(b)?);
    let (pa, pb) = (PrymData::compute(&ca)?, PrymData::compute(&cb)?);
    let verdict = compare_pryms(&pa.gram, &pb.gram, bound)?;
    let mut results = json!({
        "gramA": report::rational_matrix(&pa.gram),
        "gramB": report::rational_matrix(&pb.gram),
        "volumeSquaredA": report::rational(&pa.volume_squared),
        "volumeSquaredB": report::rational(&pb.volume_squared),
    });
    match &verdict {
        Verdict::EqualGram => results["verdict"] = json!("equal-gram"),
        Verdict::Congruent(u) => {
            results["verdict"] = json!("congruent");
            results["witness"] = json!({ "transform": report::matrix(u) });
        }
        Verdict::Distinct(reason) => {
            results["verdict"] = json!("distinct");
            let n = pa.dimension.min(pb.dimension);
            let bound = (0..n).flat_map(|i| [pa.gram[(i, i)].clone(), pb.gram[(i, i)].clone()]).max().unwrap_or_default();
            let witness = if pa.dimension == pb.dimension {
                json!({ "reason": reason, "invariantsA": invariants(&pa.gram, &bound)?, "invariantsB": invariants(&pb.gram, &bound)? })
            } else {
                json!({ "reason": reason, "dimensions": [pa.dimension, pb.dimension] })
            };
            results["witness"] = witness;
        }
        Verdict::Undecided => results["verdict"] = json!("undecided"),
    }
    let args = json!({ "fileA": a.display().to_string(), "fileB": b.display().to_string(), "congruenceBound": bound });
    let mut report = Report::new("compare", args, results);
    if verdict == Verdict::Undecided {
        report.warnings.push(String::from("no witness found within the search bounds"));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug)]
pub struct FuzzOptions {
    pub seed: u64,
    pub trials: u64,
    pub max_edges: usize,
}

/// Checks every invariant on one cover; returns the names and details of failures.
pub fn check_cover(c: &DoubleCover, rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let mut failures = Vec::new();
    let mut fail = |name: &str, detail: String| failures.push((name.to_string(), detail));
    let m = match SignedMatroid::new(c) {
        Ok(m) => m,
        Err(e) => {
            fail("matroid", e.to_string());
            return failures;
        }
    };
    if let Ok((_, maps)) = c.homology_maps() {
        let g = c.genus();
        let mut twice = IntMatrix::zeros(g, g);
        for i in 0..g {
            twice[(i, i)] = BigInt::from(2);
        }
        if maps.pushforward.mul(&maps.pullback) != twice {
            fail("push-pull", String::from("pushforward after pullback is not twice the identity"));
        }
        if int_kernel(&maps.pushforward).len() != c.prym_dimension() {
            fail("kernel rank", String::from("kernel rank differs from g(total) - g(base)"));
        }
    }
    if m.rank() != c.prym_dimension() {
        fail("rank law", format!("rank(M*) = {} but g(total) - g(base) = {}", m.rank(), c.prym_dimension()));
    }
    let p = match PrymData::compute(c) {
        Ok(p) => p,
        Err(e) => {
            fail("prym", e.to_string());
            return failures;
        }
    };
    let by_ogods = prym_volume_ogod(&m);
    if p.volume_squared != by_ogods {
        fail("volume identity", format!("{} by determinant, {} by ogods", p.volume_squared, by_ogods));
    }
    match verify_simplification_invariance(c) {
        Ok(check) if check.passed() => {}
        Ok(_) => fail("simplification", String::from("simplified Prym differs")),
        Err(e) => fail("simplification", e.to_string()),
    }
    for _ in 0..2 {
        let o = random_orientation(rng, c.base());
        match PrymData::compute_with_orientation(c, &o) {
            Ok(q) if q == p => {}
            Ok(_) => fail("reorientation", String::from("Prym data depends on the orientation")),
            Err(e) => fail("reorientation", e.to_string()),
        }
    }
    if m.ground().len() <= PACKAGE_LIMIT {
        match matroid_package(&m).and_then(|pkg| prym_from_matroid(&pkg)) {
            Ok(q) if q.basis == ground_basis(&m, &p.basis) && q.volume_squared == p.volume_squared => {}
            Ok(_) => fail("matroid reconstruction", String::from("rebuilt Prym differs")),
            Err(e) => fail("matroid reconstruction", e.to_string()),
        }
    }
    failures
}

pub fn fuzz(options: FuzzOptions) -> CliResult {
    let shape = CoverShape { max_edges: options.max_edges, ..CoverShape::default() };
    let mut failures = Vec::new();
    for trial in 0..options.trials {
        let seed = options.seed.wrapping_add(trial);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cover(&mut rng, &shape);
        for (property, detail) in check_cover(&c, &mut rng) {
            failures.push(json!({
                "trial": trial,
                "seed": seed,
                "property": property,
                "detail": detail,
                "cover": serde_json::to_value(CoverDocument::from_cover(&c)).expect("documents serialize"),
            }));
        }
    }
    let args = json!({ "seed": options.seed, "trials": options.trials, "maxEdges": options.max_edges });
    let failed = failures.len();
    let report = Report::new("fuzz", args, json!({ "trials": options.trials, "failures": failures }));
    if failed > 0 {
        return Err(CliError::Property { summary: format!("{failed} property failures"), report: Box::new(report) });
    }
    Ok(report)
}
