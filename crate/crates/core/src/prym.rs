//! The principalized Prym variety: Gram matrix of `Ker π_*` under
//! `[γ, γ'] = 2 Σ γ(e) γ'(e) ℓ(e)`, volumes, polarization type, and
//! comparison of two Pryms.
//!
//! The volume reported is `det(Gram) / det(ξ)`, where `ξ` is the
//! polarization with invariant factors `(1, ..., 1, 2, ..., 2)`. It equals
//! the sum over ogods `2^(1-d) Σ 4^(ind(F)-1) Π_{e∈F} ℓ(e)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cover::DoubleCover;
use crate::cycles::{OrientedCycles, Provenance};
use crate::graph::{Chain, EdgeId, HalfEdgeGraph, Orientation};
use crate::linalg::{det, int_kernel, row_lattice_basis, saturation, snf, IntMatrix, RatMatrix, Rational};
use crate::matroid::{simplify, subsets_of_size, Mask, SignedMatroid, SimplificationStep};
use crate::poly::{symbolic_det, Polynomial};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrymData {
    pub dimension: usize,
    /// Basis of `Ker π_*` as chains on the base, stored-orientation coordinates.
    pub basis: Vec<Chain>,
    pub provenance: Provenance,
    pub gram: RatMatrix,
    pub gram_determinant: Rational,
    pub polarization_type: Vec<BigInt>,
    pub dilation_index: usize,
    pub volume_squared: Rational,
}

impl PrymData {
    pub fn compute(cover: &DoubleCover) -> Result<Self> {
        PrymData::compute_with_orientation(cover, &Orientation::canonical(cover.base()))
    }

    /// Runs the index-formula route in the coordinates of `o`; the result
    /// is reported in stored-orientation coordinates.
    pub fn compute_with_orientation(cover: &DoubleCover, o: &Orientation) -> Result<Self> {
        let m = SignedMatroid::new(cover)?;
        let lattice = OrientedCycles::new(&m, o)?.kernel_lattice()?;
        let gram = gram_matrix(&lattice.basis, cover.lengths());
        let gram_determinant = det(&gram)?;
        let dilation_index = m.dilation_index();
        let polarization_type = polarization_type(cover)?;
        if polarization_type != expected_polarization_type(m.rank(), dilation_index) {
            return Err(Error::Inconsistent(String::from("polarization type differs from (1^(d-1), 2^(h-d+1))")));
        }
        let volume_squared = &gram_determinant / product(&polarization_type);
        Ok(PrymData {
            dimension: m.rank(),
            basis: lattice.basis,
            provenance: lattice.provenance,
            gram,
            gram_determinant,
            polarization_type,
            dilation_index,
            volume_squared,
        })
    }
}

fn product(factors: &[BigInt]) -> Rational {
    Rational::from_integer(factors.iter().product())
}

/// `G_ij = 2 Σ_e γ_i(e) γ_j(e) ℓ(e)`.
pub fn gram_matrix(basis: &[Chain], lengths: &[Rational]) -> RatMatrix {
    let mut g = raw_gram_matrix(basis, lengths);
    let two = Rational::from_integer(2.into());
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            g[(i, j)] *= &two;
        }
    }
    g
}

/// `Σ_e γ_i(e) γ_j(e) ℓ(e)`, without the factor two.
pub fn raw_gram_matrix(basis: &[Chain], lengths: &[Rational]) -> RatMatrix {
    let h = basis.len();
    let mut g = RatMatrix::zeros(h, h);
    for i in 0..h {
        for j in 0..h {
            g[(i, j)] = basis[i]
                .iter()
                .zip(&basis[j])
                .zip(lengths)
                .filter(|((a, b), _)| !a.is_zero() && !b.is_zero())
                .map(|((a, b), l)| Rational::from_integer(a * b) * l)
                .fold(Rational::zero(), |x, y| x + y);
        }
    }
    g
}

/// Gram matrix with one variable per edge id, scaled by `factor`.
pub fn symbolic_gram(basis: &[Chain], factor: i64) -> Vec<Vec<Polynomial>> {
    basis
        .iter()
        .map(|a| {
            basis
                .iter()
                .map(|b| {
                    a.iter().zip(b).enumerate().fold(Polynomial::zero(), |acc, (e, (x, y))| {
                        let c = x * y * factor;
                        if c.is_zero() {
                            acc
                        } else {
                            &acc + &Polynomial::monomial(vec![e], Rational::from_integer(c))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// `det(Gram) / det(ξ)`.
pub fn prym_volume_det(p: &PrymData) -> Rational {
    &p.gram_determinant / product(&p.polarization_type)
}

/// `2^(1-d) Σ_F 4^(ind(F)-1) Π_{e∈F} ℓ(e)` over the ogods.
pub fn prym_volume_ogod(m: &SignedMatroid<'_>) -> Rational {
    prym_volume_polynomial(m).eval(m.cover().lengths())
}

pub fn prym_volume_polynomial(m: &SignedMatroid<'_>) -> Polynomial {
    let scale = Rational::new(BigInt::one(), BigInt::one() << (m.dilation_index() - 1));
    let sum = m.ogods().iter().fold(Polynomial::zero(), |acc, f| {
        let coefficient = Rational::from_integer(BigInt::one() << (2 * (f.index - 1)));
        let vars = f.edges.iter().map(|e| e.0).collect();
        &acc + &Polynomial::monomial(vars, coefficient)
    });
    sum.scale(&scale)
}

/// Symbolic `det(Gram) / det(ξ)` for a computed Prym.
pub fn prym_volume_det_polynomial(p: &PrymData) -> Polynomial {
    let d = symbolic_det(&symbolic_gram(&p.basis, 2));
    d.scale(&(Rational::one() / product(&p.polarization_type)))
}

/// Sum over complements of spanning trees of `Π ℓ(e)`.
pub fn jacobian_volume(g: &HalfEdgeGraph, lengths: &[Rational]) -> Result<Rational> {
    Ok(jacobian_polynomial(g)?.eval(lengths))
}

pub fn jacobian_polynomial(g: &HalfEdgeGraph) -> Result<Polynomial> {
    let genus = g.genus()?;
    let n = g.edge_count();
    if n > crate::matroid::ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit { found: n, limit: crate::matroid::ENUMERATION_LIMIT });
    }
    let mut acc = Polynomial::zero();
    for mask in subsets_of_size(n, genus) {
        let inside = |e: EdgeId| mask & (1 << e.0) != 0;
        if g.component_map(|e| !inside(e)).1 == 1 {
            let vars = g.edges().filter(|&e| inside(e)).map(|e| e.0).collect();
            acc = &acc + &Polynomial::monomial(vars, Rational::one());
        }
    }
    Ok(acc)
}

/// Last `h` invariant factors of `[K | Sat(Im π^*)]` inside `H_1(Γ̃)`.
pub fn polarization_type(cover: &DoubleCover) -> Result<Vec<BigInt>> {
    let (_, maps) = cover.homology_maps()?;
    let total = maps.pushforward.cols();
    let h = cover.prym_dimension();
    let mut rows = int_kernel(&maps.pushforward);
    rows.extend(saturation(&maps.pullback.transpose().row_vecs(), total));
    if rows.len() != total {
        return Err(Error::Inconsistent(String::from("kernel and pullback do not span a full-rank lattice")));
    }
    let factors = snf(&IntMatrix::from_rows(rows, total));
    Ok(factors[total - h..].to_vec())
}

/// `(1^(d-1), 2^(h-d+1))`.
pub fn expected_polarization_type(h: usize, d: usize) -> Vec<BigInt> {
    (0..h).map(|i| BigInt::from(if i + 1 < d { 1 } else { 2 })).collect()
}

/// Data from which the Prym is rebuilt without looking at the cover: the
/// oriented circuits of `M`, the index function on independent sets of
/// `M*`, and the lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatroidPackage {
    pub ground: Vec<String>,
    pub lengths: Vec<Rational>,
    /// One signed circuit per `±` pair, as signs over the ground set.
    pub oriented_circuits: Vec<Vec<i8>>,
    pub index: BTreeMap<Mask, usize>,
}

/// Largest ground set for which the full index function is tabulated.
pub const PACKAGE_LIMIT: usize = 16;

pub fn matroid_package(m: &SignedMatroid<'_>) -> Result<MatroidPackage> {
    let n = m.ground().len();
    if n > PACKAGE_LIMIT {
        return Err(Error::EnumerationLimit { found: n, limit: PACKAGE_LIMIT });
    }
    let cycles = OrientedCycles::canonical(m)?;
    let oriented_circuits = m
        .circuits()?
        .iter()
        .map(|c| {
            let chain = cycles.fundamental_cycle(c)?.chain;
            Ok(m.ground().iter().map(|e| chain[e.0].signum().to_i8().unwrap_or(0)).collect())
        })
        .collect::<Result<_>>()?;
    let mut index = BTreeMap::new();
    for mask in 0..=m.full_mask() {
        if m.is_independent_dual_mask(mask) {
            index.insert(mask, m.index_mask(mask)?);
        }
    }
    let c = m.cover();
    Ok(MatroidPackage {
        ground: m.ground().iter().map(|&e| String::from(c.base().edge_label(e))).collect(),
        lengths: m.ground().iter().map(|&e| c.length(e).clone()).collect(),
        oriented_circuits,
        index,
    })
}

/// A Prym rebuilt from a [`MatroidPackage`]; coordinates are over the ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatroidPrym {
    pub basis: Vec<Chain>,
    pub gram: RatMatrix,
    pub dilation_index: usize,
    pub polarization_type: Vec<BigInt>,
    pub volume_squared: Rational,
}

pub fn prym_from_matroid(p: &MatroidPackage) -> Result<MatroidPrym> {
    let n = p.ground.len();
    let rank = p.index.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0);
    let mut ogods: Vec<(usize, Vec<usize>, Mask)> = p
        .index
        .iter()
        .filter(|(m, _)| m.count_ones() as usize == rank)
        .map(|(&m, &i)| (i, (0..n).filter(|b| m & (1 << b) != 0).collect(), m))
        .collect();
    ogods.sort();
    let d = ogods.first().map_or(1, |o| o.0);
    let index_of = |m: Mask| p.index.get(&m).copied().ok_or(Error::DependentSet);
    let mut cycles = Vec::new();
    for signs in &p.oriented_circuits {
        let support: Mask = signs.iter().enumerate().filter(|(_, &s)| s != 0).fold(0, |m, (i, _)| m | (1 << i));
        let mut magnitudes = vec![BigInt::zero(); n];
        for e in (0..n).filter(|e| support & (1 << e) != 0) {
            let rest = support & !(1 << e);
            let (ind, _, f) = ogods
                .iter()
                .find(|o| o.2 & rest == 0)
                .ok_or_else(|| Error::Inconsistent(String::from("no ogod avoids a circuit")))?;
            magnitudes[e] = BigInt::one() << (ind - index_of(f & !(1 << e))?);
        }
        let g = magnitudes.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        cycles.push(magnitudes.iter().zip(signs).map(|(x, &s)| x / &g * s).collect::<Chain>());
    }
    let basis = row_lattice_basis(&cycles, n);
    if basis.len() != rank {
        return Err(Error::Inconsistent(format!("circuits span rank {} instead of {rank}", basis.len())));
    }
    let gram = gram_matrix(&basis, &p.lengths);
    let polarization_type = expected_polarization_type(rank, d);
    let volume_squared = det(&gram)? / product(&polarization_type);
    Ok(MatroidPrym { basis, gram, dilation_index: d, polarization_type, volume_squared })
}

/// Restricts a Prym basis to the ground set and returns its Hermite form.
pub fn ground_basis(m: &SignedMatroid<'_>, basis: &[Chain]) -> Vec<Chain> {
    let rows: Vec<Chain> = basis.iter().map(|c| m.ground().iter().map(|e| c[e.0].clone()).collect()).collect();
    row_lattice_basis(&rows, m.ground().len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The Gram matrices are identical.
    EqualGram,
    /// `Uᵀ A U = B` for the unimodular `U` found.
    Congruent(IntMatrix),
    /// An invariant differs.
    Distinct(String),
    Undecided,
}

/// Lattice invariants used as witnesses of non-isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeInvariants {
    pub dimension: usize,
    pub determinant: Rational,
    /// Generator of the group spanned by all entries.
    pub scale: Rational,
    /// Generator of the group spanned by the norms.
    pub norm: Rational,
    /// Number of nonzero vectors of each norm up to the largest diagonal entry.
    pub short_vectors: BTreeMap<Rational, usize>,
}

pub fn lattice_invariants(g: &RatMatrix, norm_bound: &Rational) -> Result<LatticeInvariants> {
    let n = g.rows();
    let entries: Vec<Rational> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)].clone()).collect();
    let norms: Vec<Rational> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| if i == j { g[(i, i)].clone() } else { &g[(i, j)] * Rational::from_integer(2.into()) })
        .collect();
    let mut short_vectors = BTreeMap::new();
    for v in short_vectors_up_to(g, norm_bound, None)? {
        *short_vectors.entry(quadratic_form(g, &v)).or_insert(0) += 1;
    }
    Ok(LatticeInvariants {
        dimension: n,
        determinant: det(g)?,
        scale: rational_gcd(&entries),
        norm: rational_gcd(&norms),
        short_vectors,
    })
}

fn rational_gcd(values: &[Rational]) -> Rational {
    let l = values.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let g = values.iter().fold(BigInt::zero(), |g, v| g.gcd(&(v.numer() * (&l / v.denom()))));
    Rational::new(g, l)
}

fn quadratic_form(g: &RatMatrix, v: &[BigInt]) -> Rational {
    bilinear(g, v, v)
}

fn bilinear(g: &RatMatrix, u: &[BigInt], v: &[BigInt]) -> Rational {
    let mut acc = Rational::zero();
    for (i, a) in u.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (j, b) in v.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
            acc += &g[(i, j)] * Rational::from_integer(a * b);
        }
    }
    acc
}

/// All nonzero integer vectors `v` with `vᵀ G v ≤ bound` (or `= bound` when
/// `exact` is set), for positive definite `G`, by Fincke–Pohst enumeration.
pub fn short_vectors_up_to(g: &RatMatrix, bound: &Rational, exact: Option<()>) -> Result<Vec<Vec<BigInt>>> {
    let n = g.rows();
    let (l, d) = ldl(g)?;
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fn recurse(
        i: usize,
        remaining: Rational,
        x: &mut Vec<BigInt>,
        l: &RatMatrix,
        d: &[Rational],
        bound: &Rational,
        exact: bool,
        g: &RatMatrix,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        let n = x.len();
        let center: Rational = -(i + 1..n)
            .map(|j| &l[(j, i)] * Rational::from_integer(x[j].clone()))
            .fold(Rational::zero(), |a, b| a + b);
        let start = center.round().to_integer();
        let cost = |t: &BigInt| {
            let diff = Rational::from_integer(t.clone()) - &center;
            &d[i] * &diff * &diff
        };
        for direction in [1i64, -1] {
            let mut t = if direction == 1 { start.clone() } else { &start - 1 };
            loop {
                let c = cost(&t);
                if c > remaining {
                    break;
                }
                x[i] = t.clone();
                if i == 0 {
                    if x.iter().any(|v| !v.is_zero()) && (!exact || &quadratic_form(g, x) == bound) {
                        out.push(x.clone());
                    }
                } else {
                    recurse(i - 1, &remaining - &c, x, l, d, bound, exact, g, out);
                }
                t += direction;
            }
        }
        x[i] = BigInt::zero();
    }
    if n > 0 {
        recurse(n - 1, bound.clone(), &mut x, &l, &d, bound, exact.is_some(), g, &mut out);
    }
    Ok(out)
}

/// `G = L D Lᵀ` with unit lower-triangular `L`; fails unless `G` is positive definite.
fn ldl(g: &RatMatrix) -> Result<(RatMatrix, Vec<Rational>)> {
    let n = g.rows();
    let mut l = RatMatrix::identity(n);
    let mut d = vec![Rational::zero(); n];
    for i in 0..n {
        let mut di = g[(i, i)].clone();
        for k in 0..i {
            di -= &l[(i, k)] * &l[(i, k)] * &d[k];
        }
        if !di.is_positive() {
            return Err(Error::Inconsistent(String::from("Gram matrix is not positive definite")));
        }
        for j in i + 1..n {
            let mut v = g[(j, i)].clone();
            for k in 0..i {
                v -= &l[(j, k)] * &l[(i, k)] * &d[k];
            }
            l[(j, i)] = v / &di;
        }
        d[i] = di;
    }
    Ok((l, d))
}

/// Largest dimension for which [`compare_pryms`] searches for a congruence.
pub const CONGRUENCE_DIMENSION_LIMIT: usize = 4;

/// Decides whether two Gram matrices describe isometric lattices.
///
/// Identical matrices give `EqualGram`. Otherwise invariants are compared,
/// and in dimension at most four every candidate `U` whose columns have the
/// required norms and entries bounded by `bound` is tried.
pub fn compare_pryms(a: &RatMatrix, b: &RatMatrix, bound: u32) -> Result<Verdict> {
    if a.rows() != b.rows() {
        return Ok(Verdict::Distinct(String::from("dimension")));
    }
    if a == b {
        return Ok(Verdict::EqualGram);
    }
    let n = a.rows();
    let norm_bound = (0..n).flat_map(|i| [a[(i, i)].clone(), b[(i, i)].clone()]).max().unwrap_or_else(Rational::zero);
    let ia = lattice_invariants(a, &norm_bound)?;
    let ib = lattice_invariants(b, &norm_bound)?;
    for (name, same) in [
        ("determinant", ia.determinant == ib.determinant),
        ("scale", ia.scale == ib.scale),
        ("norm", ia.norm == ib.norm),
        ("short vector counts", ia.short_vectors == ib.short_vectors),
    ] {
        if !same {
            return Ok(Verdict::Distinct(String::from(name)));
        }
    }
    if n > CONGRUENCE_DIMENSION_LIMIT {
        return Ok(Verdict::Undecided);
    }
    let cap = BigInt::from(bound);
    let mut truncated = false;
    let mut candidates = Vec::with_capacity(n);
    for j in 0..n {
        let all = short_vectors_up_to(a, &b[(j, j)], Some(()))?;
        let kept: Vec<Vec<BigInt>> = all.iter().filter(|v| v.iter().all(|x| x.abs() <= cap)).cloned().collect();
        truncated |= kept.len() != all.len();
        candidates.push(kept);
    }
    let mut chosen: Vec<&Vec<BigInt>> = Vec::with_capacity(n);
    if let Some(u) = search_congruence(a, b, &candidates, &mut chosen) {
        return Ok(Verdict::Congruent(u));
    }
    Ok(if truncated { Verdict::Undecided } else { Verdict::Distinct(String::from("no congruence exists")) })
}

fn search_congruence<'v>(
    a: &RatMatrix,
    b: &RatMatrix,
    candidates: &'v [Vec<Vec<BigInt>>],
    chosen: &mut Vec<&'v Vec<BigInt>>,
) -> Option<IntMatrix> {
    let j = chosen.len();
    let n = a.rows();
    if j == n {
        let u = IntMatrix::from_rows((0..n).map(|r| chosen.iter().map(|c| c[r].clone()).collect()).collect(), n);
        return crate::linalg::is_unimodular(&u).then_some(u);
    }
    for v in &candidates[j] {
        if (0..j).all(|i| bilinear(a, chosen[i], v) == b[(i, j)]) {
            chosen.push(v);
            if let Some(u) = search_congruence(a, b, candidates, chosen) {
                return Some(u);
            }
            chosen.pop();
        }
    }
    None
}

/// Outcome of comparing a cover with its simplification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplificationCheck {
    pub original: PrymData,
    pub simplified: PrymData,
    /// Gram of the original basis pushed to the simplified cover, with its lengths.
    pub transported_gram: RatMatrix,
    pub steps: Vec<SimplificationStep>,
    pub gram_equal: bool,
    pub lattice_equal: bool,
    pub volume_equal: bool,
    pub dilation_index_equal: bool,
}

impl SimplificationCheck {
    pub fn passed(&self) -> bool {
        self.gram_equal && self.lattice_equal && self.volume_equal && self.dilation_index_equal
    }
}

/// Simplifies the cover and compares both Pryms under the basis
/// correspondence induced by the contraction map.
pub fn verify_simplification_invariance(cover: &DoubleCover) -> Result<SimplificationCheck> {
    let original = PrymData::compute(cover)?;
    let s = simplify(cover)?;
    let simplified = PrymData::compute(&s.cover)?;
    let m = s.cover.base().edge_count();
    let transported: Vec<Chain> = original
        .basis
        .iter()
        .map(|chain| {
            let mut out = vec![BigInt::zero(); m];
            for (e, x) in chain.iter().enumerate() {
                if let Some(ne) = s.edge_map[e] {
                    out[ne.0] = s.chain_flips[e].apply(x);
                }
            }
            out
        })
        .collect();
    let transported_gram = gram_matrix(&transported, s.cover.lengths());
    let lattice_equal = row_lattice_basis(&transported, m) == row_lattice_basis(&simplified.basis, m);
    Ok(SimplificationCheck {
        gram_equal: transported_gram == original.gram,
        lattice_equal,
        volume_equal: original.volume_squared == simplified.volume_squared,
        dilation_index_equal: original.dilation_index == simplified.dilation_index,
        original,
        simplified,
        transported_gram,
        steps: s.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn matrix(rows: &[&[i64]]) -> RatMatrix {
        IntMatrix::from_i64(rows).to_rational()
    }

    #[test]
    fn short_vectors_of_the_square_lattice() {
        let vs = short_vectors_up_to(&matrix(&[&[1, 0], &[0, 1]]), &rat(2, 1), None).unwrap();
        assert_eq!(vs.len(), 8);
        let exact = short_vectors_up_to(&matrix(&[&[1, 0], &[0, 1]]), &rat(2, 1), Some(())).unwrap();
        assert_eq!(exact.len(), 4);
    }

    #[test]
    fn congruent_forms_are_found() {
        let a = matrix(&[&[2, 1], &[1, 2]]);
        let b = matrix(&[&[2, -1], &[-1, 2]]);
        let Verdict::Congruent(u) = compare_pryms(&a, &b, 3).unwrap() else { panic!("expected a congruence") };
        let ur = u.to_rational();
        assert_eq!(ur.transpose().mul(&a).mul(&ur), b);
    }

    #[test]
    fn distinct_forms_are_separated() {
        let a = matrix(&[&[2, 0], &[0, 2]]);
        let b = matrix(&[&[2, 1], &[1, 2]]);
        assert_eq!(compare_pryms(&a, &b, 3).unwrap(), Verdict::Distinct("determinant".into()));
        let c = matrix(&[&[1, 0], &[0, 6]]);
        let d = matrix(&[&[2, 0], &[0, 3]]);
        assert!(matches!(compare_pryms(&c, &d, 3).unwrap(), Verdict::Distinct(_)));
    }

    #[test]
    fn polarization_closed_form() {
        assert_eq!(expected_polarization_type(3, 2), vec![int(1), int(2), int(2)]);
        assert_eq!(expected_polarization_type(2, 3), vec![int(1), int(1)]);
    }
}
