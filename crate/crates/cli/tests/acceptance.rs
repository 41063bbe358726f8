//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use prym_cli::commands;
use prym_core::cover::CoverBuilder;
use prym_core::cycles::{sublattice_index, OrientedCycles, Provenance};
use prym_core::linalg::{content, rat, row_lattice_basis, RatMatrix};
use prym_core::matroid::{subsets_of_size, CircuitType, Mask, SignedMatroid};
use prym_core::poly::Polynomial;
use prym_core::prym::{
    expected_polarization_type, polarization_type, prym_volume_ogod, symbolic_gram, verify_simplification_invariance,
    PrymData,
};
use prym_core::random::{random_cover, random_length, random_orientation, randomize_lengths, CoverShape};
use prym_core::{Chain, DoubleCover, EdgeSet, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn covers_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../covers")
}

fn golden(name: &str) -> PathBuf {
    covers_dir().join(name)
}

fn load(name: &str) -> DoubleCover {
    commands::load(&golden(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// A tree of `n` undilated edges on dilated vertices; edge `i` hangs off a
/// vertex chosen by `parent`.
fn tree_cover(n: usize, parent: impl Fn(usize) -> usize, lengths: &[Rational]) -> DoubleCover {
    let mut b = CoverBuilder::new();
    for v in 0..=n {
        b = b.vertex(&format!("t{v}"), true);
    }
    for i in 1..=n {
        b = b.edge(&format!("s{i}"), &format!("t{}", parent(i)), &format!("t{i}"), lengths[i - 1].clone(), prym_core::Sign::Plus);
    }
    b.build().expect("tree cover")
}

fn random_covers(count: u64, seed: u64, max_edges: usize) -> Vec<DoubleCover> {
    let shape = CoverShape { max_edges, ..CoverShape::default() };
    (0..count).map(|i| random_cover(&mut ChaCha8Rng::seed_from_u64(seed + i), &shape)).collect()
}

/// Golden documents, trees, and seeded covers with at most six undilated edges.
fn corpus() -> Vec<(String, DoubleCover)> {
    let mut out = Vec::new();
    let mut files: Vec<PathBuf> = std::fs::read_dir(covers_dir())
        .expect("covers directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for f in files {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        out.push((name, commands::load(&f).expect("golden document")));
    }
    let ones = vec![rat(1, 1); 5];
    for n in 1..=5 {
        out.push((format!("path tree {n}"), tree_cover(n, |i| i - 1, &ones)));
        out.push((format!("star tree {n}"), tree_cover(n, |_| 0, &ones)));
    }
    for (i, c) in random_covers(60, 10_000, 6).into_iter().enumerate() {
        out.push((format!("seeded cover {i}"), c));
    }
    out
}

fn poly_sum(terms: &[(i64, usize)]) -> Polynomial {
    terms.iter().fold(Polynomial::zero(), |acc, &(c, v)| &acc + &Polynomial::variable(v).scale(&rat(c, 1)))
}

fn strings(v: &serde_json::Value) -> Vec<Vec<String>> {
    serde_json::from_value(v.clone()).expect("matrix of strings")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = commands::gram(&golden("cover_a.json"), true).map_err(|e| e.to_string())?;
    let b = commands::gram(&golden("cover_b.json"), true).map_err(|e| e.to_string())?;
    let (ga, gb) = (strings(&a.results["gram"]), strings(&b.results["gram"]));
    ensure(ga == gb, || format!("Gram matrices differ: {ga:?} vs {gb:?}"))?;
    ensure(ga == [["6", "6"], ["6", "14"]], || format!("unexpected Gram {ga:?}"))?;
    // Printed matrices, edges indexed e1..e4 and f1..f3 in document order.
    let expected_a = vec![
        vec![poly_sum(&[(1, 0), (1, 1), (1, 2)]), poly_sum(&[(1, 0), (2, 1)])],
        vec![poly_sum(&[(1, 0), (2, 1)]), poly_sum(&[(1, 0), (4, 1), (1, 3)])],
    ];
    let expected_b = vec![
        vec![poly_sum(&[(1, 0), (1, 1)]), poly_sum(&[(2, 0)])],
        vec![poly_sum(&[(2, 0)]), poly_sum(&[(4, 0), (1, 2)])],
    ];
    for (name, expected) in [("cover_a.json", expected_a), ("cover_b.json", expected_b)] {
        let p = PrymData::compute(&load(name)).map_err(|e| e.to_string())?;
        let raw = symbolic_gram(&p.basis, 1);
        ensure(raw == expected, || format!("{name}: symbolic Gram differs from the printed matrix"))?;
        let doubled: Vec<Vec<Polynomial>> = expected.iter().map(|r| r.iter().map(|x| x.scale(&rat(2, 1))).collect()).collect();
        ensure(symbolic_gram(&p.basis, 2) == doubled, || format!("{name}: factor-2 Gram is not twice the printed one"))?;
    }
    within(start, Duration::from_secs(1))
}

/// `basis` equals `expected` after one sign change per edge coordinate.
fn equal_up_to_coordinate_signs(basis: &[Chain], expected: &[Vec<i64>]) -> bool {
    let n = expected[0].len();
    basis.len() == expected.len()
        && (0..n).all(|e| {
            [1i64, -1].iter().any(|s| basis.iter().zip(expected).all(|(b, x)| b[e] == BigInt::from(s * x[e])))
        })
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let a = load("cover_a.json");
    let p = PrymData::compute(&a).map_err(|e| e.to_string())?;
    let e = |l: &str| a.base().find_edge(l).unwrap();
    ensure(p.provenance == Provenance::IndexOneOgod(vec![e("e3"), e("e4")]), || format!("CoverA provenance {:?}", p.provenance))?;
    ensure(equal_up_to_coordinate_signs(&p.basis, &[vec![1, 1, 1, 0], vec![1, 2, 0, 1]]), || {
        format!("CoverA basis {:?}", p.basis)
    })?;
    let b = load("cover_b.json");
    let q = PrymData::compute(&b).map_err(|e| e.to_string())?;
    let f = |l: &str| b.base().find_edge(l).unwrap();
    ensure(q.provenance == Provenance::IndexOneOgod(vec![f("f2"), f("f3")]), || format!("CoverB provenance {:?}", q.provenance))?;
    let magnitudes: Vec<BigInt> = q.basis[0].iter().map(|x| x.abs()).collect();
    ensure(magnitudes == [1, 1, 0].map(BigInt::from), || format!("CoverB first cycle {:?}", q.basis[0]))?;
    ensure(q.basis[1] == [2, 0, 1].map(BigInt::from), || format!("CoverB second cycle {:?}", q.basis[1]))?;
    within(start, Duration::from_secs(1))
}

fn criterion_3(covers: &[DoubleCover]) -> Outcome {
    let start = Instant::now();
    for (i, c) in covers.iter().enumerate() {
        let p = PrymData::compute(c).map_err(|e| format!("cover {i}: {e}"))?;
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        let ogod = prym_volume_ogod(&m);
        ensure(p.volume_squared == ogod, || format!("cover {i}: {} vs {}", p.volume_squared, ogod))?;
    }
    within(start, Duration::from_secs(60))
}

fn criterion_4(covers: &[DoubleCover]) -> Outcome {
    for (i, c) in covers.iter().enumerate() {
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        let t = c.build_total_graph().graph.betti_number();
        let g = c.base().betti_number();
        ensure(m.rank() == t - g, || format!("cover {i}: rank {} but genus difference {}", m.rank(), t - g))?;
    }
    Ok(())
}

fn criterion_5(corpus: &[(String, DoubleCover)]) -> Outcome {
    let mut checked = 0;
    for (name, c) in corpus.iter().filter(|(_, c)| c.undilated_edges().len() <= 6) {
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        let n = m.ground().len();
        let dual: Vec<Mask> = (0..=m.full_mask()).filter(|&f| m.is_independent_dual_mask(f)).collect();
        let primal: Vec<Mask> = (0..=m.full_mask()).filter(|&f| m.is_independent_mask(f)).collect();
        for (label, ind) in [("M*", &dual), ("M", &primal)] {
            ensure(ind.contains(&0), || format!("{name}: empty set dependent in {label}"))?;
            for &f in ind.iter() {
                for i in (0..n).filter(|i| f & (1 << i) != 0) {
                    ensure(ind.contains(&(f & !(1 << i))), || format!("{name}: {label} not hereditary"))?;
                }
            }
            for &a in ind.iter() {
                for &b in ind.iter().filter(|b| b.count_ones() > a.count_ones()) {
                    let grows = (0..n).any(|i| b & !a & (1 << i) != 0 && ind.contains(&(a | (1 << i))));
                    ensure(grows, || format!("{name}: {label} fails exchange"))?;
                }
            }
        }
        let rank = |ind: &[Mask]| ind.iter().map(|f| f.count_ones()).max().unwrap_or(0) as usize;
        let (rd, rp) = (rank(&dual), rank(&primal));
        ensure(rd + rp == n, || format!("{name}: ranks {rd} + {rp} != {n}"))?;
        let mut bases_dual: Vec<Mask> = dual.iter().copied().filter(|f| f.count_ones() as usize == rd).collect();
        let mut complements: Vec<Mask> =
            primal.iter().copied().filter(|f| f.count_ones() as usize == rp).map(|f| m.full_mask() & !f).collect();
        bases_dual.sort_unstable();
        complements.sort_unstable();
        ensure(bases_dual == complements, || format!("{name}: bases of M* are not complements of bases of M"))?;
        checked += 1;
    }
    ensure(checked > 50, || format!("only {checked} covers checked"))
}

fn criterion_6(corpus: &[(String, DoubleCover)]) -> Outcome {
    let fuzzed = random_covers(200, 20_000, 8);
    let named = corpus.iter().map(|(n, c)| (n.clone(), c.clone())).chain(fuzzed.into_iter().enumerate().map(|(i, c)| (format!("fuzzed {i}"), c)));
    for (name, c) in named {
        let check = verify_simplification_invariance(&c).map_err(|e| format!("{name}: {e}"))?;
        ensure(check.passed(), || format!("{name}: {check:?}"))?;
    }
    // Dumbbell: both sides equal [2(a + 4b + c)] for arbitrary lengths.
    let base = load("cover_c.json");
    let edge = |l: &str| base.base().find_edge(l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let c = randomize_lengths(&mut rng, &base);
        let [a, b, cc] = ["e1", "b", "e2"].map(|l| c.length(edge(l)).clone());
        let expected = RatMatrix::from_rows(vec![vec![(a + b * rat(4, 1) + cc) * rat(2, 1)]], 1);
        let check = verify_simplification_invariance(&c).map_err(|e| e.to_string())?;
        ensure(check.original.gram == expected, || format!("original Gram {:?}", check.original.gram))?;
        ensure(check.simplified.gram == expected, || format!("simplified Gram {:?}", check.simplified.gram))?;
    }
    Ok(())
}

fn criterion_7(corpus: &[(String, DoubleCover)]) -> Outcome {
    let mut circuits = 0;
    for (name, c) in corpus {
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        let cycles = OrientedCycles::canonical(&m).map_err(|e| e.to_string())?;
        for circuit in m.circuits().map_err(|e| e.to_string())? {
            let magnitudes = cycles.index_magnitudes(&circuit).map_err(|e| e.to_string())?;
            let kernel = cycles.kernel_route(&circuit).map_err(|e| e.to_string())?;
            let g = content(&magnitudes.iter().map(|(_, x)| x.clone()).collect::<Vec<_>>());
            for (e, x) in &magnitudes {
                ensure(x / &g == kernel[e.0].abs(), || format!("{name}: circuit {} disagrees at {}", m.label(circuit.mask), c.base().edge_label(*e)))?;
            }
            circuits += 1;
        }
    }
    ensure(circuits > 100, || format!("only {circuits} circuits checked"))
}

fn criterion_8(corpus: &[(String, DoubleCover)]) -> Outcome {
    let mut seen = std::collections::BTreeSet::new();
    for (name, c) in corpus {
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        for circuit in m.circuits().map_err(|e| e.to_string())? {
            let kind = m.classify(circuit.mask).map_err(|e| format!("{name}: {e}"))?;
            let chain = prym_core::cycles::fundamental_cycle(&m, &circuit).map_err(|e| e.to_string())?.chain;
            let edges: EdgeSet = circuit.edges.iter().copied().collect();
            let r = c.restrict(&edges, prym_core::cover::RestrictTo::Edges);
            let bridges: Vec<bool> = circuit.edges.iter().map(|e| r.cover.base().is_bridge(r.edge_map[e.0].unwrap())).collect();
            let mags: Vec<BigInt> = circuit.edges.iter().map(|e| chain[e.0].abs()).collect();
            let one = BigInt::from(1);
            let pattern_ok = match kind {
                CircuitType::I | CircuitType::III | CircuitType::V => bridges.iter().all(|b| !b) && mags.iter().all(|x| *x == one),
                CircuitType::II | CircuitType::IV => {
                    bridges.iter().any(|b| *b)
                        && bridges.iter().any(|b| !b)
                        && bridges.iter().zip(&mags).all(|(b, x)| *x == BigInt::from(if *b { 2 } else { 1 }))
                }
                CircuitType::VI => bridges.iter().all(|b| *b) && mags.iter().all(|x| *x == one),
            };
            ensure(pattern_ok, || format!("{name}: circuit {} of type {} has coefficients {mags:?}", m.label(circuit.mask), kind.name()))?;
            seen.insert(kind);
        }
    }
    ensure(seen.len() == 6, || format!("corpus exercises only types {seen:?}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=5 {
        for (shape, parent) in [("path", (|i: usize| i - 1) as fn(usize) -> usize), ("star", |_| 0)] {
            for unit in [true, false] {
                let lengths: Vec<Rational> = (0..n).map(|_| if unit { rat(1, 1) } else { random_length(&mut rng) }).collect();
                let c = tree_cover(n, parent, &lengths);
                let m = SignedMatroid::new(&c).map_err(|e| e.to_string())?;
                ensure(m.ground().len() == n && m.rank() == n, || format!("{shape} {n}: not rank {n} on {n} elements"))?;
                for size in 0..=n {
                    for f in subsets_of_size(n, size) {
                        ensure(m.is_independent_dual_mask(f), || format!("{shape} {n}: dependent subset"))?;
                        ensure(m.index_mask(f).ok() == Some(size + 1), || format!("{shape} {n}: ind(F) != |F|+1"))?;
                    }
                }
                let p = PrymData::compute(&c).map_err(|e| e.to_string())?;
                let mut diag = RatMatrix::zeros(n, n);
                for i in 0..n {
                    diag[(i, i)] = &lengths[i] * rat(2, 1);
                }
                ensure(p.gram == diag, || format!("{shape} {n}: Gram {:?}", p.gram))?;
                ensure(p.polarization_type.iter().all(|x| *x == BigInt::from(1)), || format!("{shape} {n}: type {:?}", p.polarization_type))?;
            }
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let c = load("no_ogod.json");
    let m = SignedMatroid::new(&c).map_err(|e| e.to_string())?;
    let cycles = OrientedCycles::canonical(&m).map_err(|e| e.to_string())?;
    let n = c.base().edge_count();
    let kernel = c.pushforward_kernel_chains().map_err(|e| e.to_string())?;
    ensure(!m.ogods().is_empty(), || String::from("no ogods"))?;
    let lattice = cycles.kernel_lattice().map_err(|e| e.to_string())?;
    ensure(lattice.provenance == Provenance::CircuitSpan, || format!("provenance {:?}", lattice.provenance))?;
    ensure(row_lattice_basis(&lattice.basis, n) == row_lattice_basis(&kernel, n), || String::from("circuit span is not the kernel"))?;
    let mut spanning = Vec::new();
    for f in m.ogods() {
        let sub = cycles.ogod_cycles(f.mask).map_err(|e| e.to_string())?;
        let index = sublattice_index(&sub, &kernel, n).map_err(|e| e.to_string())?;
        if index < BigInt::from(2) {
            spanning.push(format!("{} (ind {})", m.label(f.mask), f.index));
        }
    }
    ensure(spanning.is_empty(), || {
        format!("{} of {} ogods span the kernel: {}", spanning.len(), m.ogods().len(), spanning.join(", "))
    })
}

fn criterion_11(corpus: &[(String, DoubleCover)]) -> Outcome {
    for (name, c) in corpus {
        let m = SignedMatroid::new(c).map_err(|e| e.to_string())?;
        let d = m.ogods().iter().map(|f| f.index).min().unwrap_or(1);
        let t = polarization_type(c).map_err(|e| e.to_string())?;
        ensure(t == expected_polarization_type(c.prym_dimension(), d), || format!("{name}: type {t:?} with d = {d}"))?;
    }
    Ok(())
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (i, c) in random_covers(50, 30_000, 10).iter().enumerate() {
        let p = PrymData::compute(c).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let o = random_orientation(&mut rng, c.base());
            let q = PrymData::compute_with_orientation(c, &o).map_err(|e| e.to_string())?;
            ensure(q == p, || format!("cover {i}: Prym data depends on the orientation"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let corpus = corpus();
    let fuzzed = random_covers(200, 0, 10);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("Gram matrices of the isomorphic-Prym pair", Box::new(criterion_1)),
        ("kernel bases of the isomorphic-Prym pair", Box::new(criterion_2)),
        ("volume identity on 200 random covers", Box::new(|| criterion_3(&fuzzed))),
        ("rank law on 200 random covers", Box::new(|| criterion_4(&fuzzed))),
        ("matroid axioms and duality on the corpus", Box::new(|| criterion_5(&corpus))),
        ("simplification invariance", Box::new(|| criterion_6(&corpus))),
        ("index formula against the kernel route", Box::new(|| criterion_7(&corpus))),
        ("circuit classification and coefficient patterns", Box::new(|| criterion_8(&corpus))),
        ("trees with dilated vertices", Box::new(criterion_9)),
        ("cover with no basis-producing ogod", Box::new(criterion_10)),
        ("polarization type closed form", Box::new(|| criterion_11(&corpus))),
        ("reorientation invariance", Box::new(criterion_12)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err(String::from("panicked")));
        let elapsed = start.elapsed();
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
