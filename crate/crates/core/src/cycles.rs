//! The τ-function of an orientation, fundamental cycles of `M`-circuits and
//! the kernel lattice `Ker π_*`.
//!
//! Chains live on the base: `γ(e)` stands for `γ(e)(ẽ⁺ - ẽ⁻)` upstairs. They
//! are reported in the coordinates of the stored orientation. Under another
//! orientation `o`, the coefficient of a reversed edge is multiplied by
//! `-σ(e)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cover::{CoverData, RestrictTo, Sign};
use crate::graph::{Chain, EdgeId, EdgeSet, HalfEdgeId, Orientation, VertexId};
use crate::linalg::{content, det, pivot_columns, row_lattice_basis, IntMatrix};
use crate::matroid::{Circuit, IndexedSubset, Mask, SignedMatroid};
use crate::{Error, Result};

/// `τ(h) = -1` on the tail half-edge and `σ(e)` on the head half-edge of
/// every undilated edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauAssignment {
    values: Vec<Option<Sign>>,
}

impl TauAssignment {
    pub fn get(&self, h: HalfEdgeId) -> Option<Sign> {
        self.values[h.0]
    }
}

pub fn tau(c: &CoverData, o: &Orientation) -> TauAssignment {
    let mut values = vec![None; 2 * c.base().edge_count()];
    for e in c.undilated_edges() {
        let t = o.tail_of(e);
        values[t.0] = Some(Sign::Minus);
        values[t.opposite().0] = Some(c.sign(e));
    }
    TauAssignment { values }
}

/// Closedness equations: rows are undilated vertices, columns undilated
/// edges, and the entry sums `τ(h)` over the half-edges of the edge at the vertex.
pub fn tau_matrix(c: &CoverData, o: &Orientation) -> (IntMatrix, Vec<VertexId>, Vec<EdgeId>) {
    let t = tau(c, o);
    let rows: Vec<VertexId> = c.base().vertices().filter(|&v| !c.is_dilated_vertex(v)).collect();
    let cols = c.undilated_edges();
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (j, &e) in cols.iter().enumerate() {
        for h in [e.tail(), e.head()] {
            let v = c.base().root(h);
            if let Some(i) = rows.iter().position(|&r| r == v) {
                m[(i, j)] += BigInt::from(t.get(h).expect("undilated edge").value());
            }
        }
    }
    (m, rows, cols)
}

/// Per edge, the factor taking stored-orientation coordinates to `o`-coordinates.
pub fn coordinate_signs(c: &CoverData, o: &Orientation) -> Vec<Sign> {
    c.base()
        .edges()
        .map(|e| if o.is_reversed(e) && !c.is_dilated_edge(e) { -c.sign(e) } else { Sign::Plus })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub circuit: Circuit,
    /// Coefficients on all base edges, supported on the circuit.
    pub chain: Chain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Fundamental cycles of the index-one ogod listed.
    IndexOneOgod(Vec<EdgeId>),
    /// Hermite basis of the span of all fundamental cycles.
    CircuitSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelLattice {
    pub basis: Vec<Chain>,
    pub provenance: Provenance,
}

/// Fundamental cycles and kernel lattice for one orientation of the cover.
pub struct OrientedCycles<'a, 'c> {
    matroid: &'a SignedMatroid<'c>,
    tau: IntMatrix,
    coordinate_signs: Vec<Sign>,
    /// Ogods sorted by index, then lexicographically.
    ogod_order: Vec<&'a IndexedSubset>,
}

impl<'a, 'c> OrientedCycles<'a, 'c> {
    pub fn new(matroid: &'a SignedMatroid<'c>, o: &Orientation) -> Result<Self> {
        let c = matroid.cover();
        if o.half_edge_count() != 2 * c.base().edge_count() {
            return Err(Error::LengthMismatch { expected: 2 * c.base().edge_count(), found: o.half_edge_count() });
        }
        let (tau, _, _) = tau_matrix(c, o);
        let mut ogod_order: Vec<&IndexedSubset> = matroid.ogods().iter().collect();
        ogod_order.sort_by(|a, b| (a.index, &a.edges).cmp(&(b.index, &b.edges)));
        Ok(OrientedCycles { matroid, tau, coordinate_signs: coordinate_signs(c, o), ogod_order })
    }

    pub fn canonical(matroid: &'a SignedMatroid<'c>) -> Result<Self> {
        OrientedCycles::new(matroid, &Orientation::canonical(matroid.cover().base()))
    }

    /// Generator of the kernel of the pushforward of the restriction over
    /// `G[C]`, in stored-orientation coordinates.
    pub fn kernel_route(&self, circuit: &Circuit) -> Result<Chain> {
        let c = self.matroid.cover();
        let edges: EdgeSet = circuit.edges.iter().copied().collect();
        let r = c.restrict(&edges, RestrictTo::Edges);
        let kernel = r.cover.pushforward_kernel_chains()?;
        if kernel.len() != 1 {
            return Err(Error::Inconsistent(format!(
                "restriction to circuit {} has kernel of rank {}",
                self.matroid.label(circuit.mask),
                kernel.len()
            )));
        }
        let mut chain = vec![BigInt::zero(); c.base().edge_count()];
        for e in c.base().edges() {
            if let Some(ne) = r.edge_map[e.0] {
                chain[e.0] = kernel[0][ne.0].clone();
            }
        }
        Ok(primitive(chain))
    }

    /// `|γ'_C(e)| = 2^(ind(F) - ind(F ∖ {e}))` for the first ogod `F` (by
    /// index, then lexicographically) avoiding `C ∖ {e}`.
    pub fn index_magnitudes(&self, circuit: &Circuit) -> Result<Vec<(EdgeId, BigInt)>> {
        let m = self.matroid;
        circuit
            .edges
            .iter()
            .map(|&e| {
                let bit = m.mask_of(&[e].into_iter().collect())?;
                let rest = circuit.mask & !bit;
                let f = self
                    .ogod_order
                    .iter()
                    .find(|f| f.mask & rest == 0)
                    .ok_or_else(|| Error::Inconsistent(format!("no ogod avoids {}", m.label(rest))))?;
                if f.mask & bit == 0 {
                    return Err(Error::Inconsistent(format!("ogod {} misses a circuit edge", m.label(f.mask))));
                }
                let exponent = f.index - m.index_mask(f.mask & !bit)?;
                Ok((e, BigInt::one() << exponent))
            })
            .collect()
    }

    /// Index-formula magnitudes with signs solved from the closedness
    /// equations, in the coordinates of this orientation.
    pub fn index_route(&self, circuit: &Circuit) -> Result<Chain> {
        let m = self.matroid;
        let magnitudes = self.index_magnitudes(circuit)?;
        let g = magnitudes.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
        let cols: Vec<(usize, BigInt)> = magnitudes
            .iter()
            .map(|(e, x)| (m.ground().iter().position(|f| f == e).expect("ground edge"), x / &g))
            .collect();
        let k = cols.len();
        let mut solution: Option<u32> = None;
        for pattern in 0..(1u32 << (k - 1)) {
            let closed = (0..self.tau.rows()).all(|r| {
                let s: BigInt = cols
                    .iter()
                    .enumerate()
                    .map(|(i, (j, x))| {
                        let v = &self.tau[(r, *j)] * x;
                        if i > 0 && pattern & (1 << (i - 1)) != 0 {
                            -v
                        } else {
                            v
                        }
                    })
                    .sum();
                s.is_zero()
            });
            if closed {
                if solution.is_some() {
                    return Err(Error::Inconsistent(format!("signs of {} are not unique", m.label(circuit.mask))));
                }
                solution = Some(pattern);
            }
        }
        let pattern = solution
            .ok_or_else(|| Error::Inconsistent(format!("no closed signing of {}", m.label(circuit.mask))))?;
        let mut chain = vec![BigInt::zero(); m.cover().base().edge_count()];
        for (i, ((e, _), (_, x))) in magnitudes.iter().zip(&cols).enumerate() {
            let negative = i > 0 && pattern & (1 << (i - 1)) != 0;
            chain[e.0] = if negative { -x } else { x.clone() };
        }
        Ok(chain)
    }

    /// Converts `o`-coordinates to stored-orientation coordinates (the map is an involution).
    pub fn to_canonical(&self, chain: &[BigInt]) -> Chain {
        chain.iter().zip(&self.coordinate_signs).map(|(x, s)| s.apply(x)).collect()
    }

    /// The fundamental cycle, computed by both routes, with its smallest
    /// support edge carrying a positive coefficient.
    pub fn fundamental_cycle(&self, circuit: &Circuit) -> Result<FundamentalCycle> {
        let by_kernel = self.kernel_route(circuit)?;
        let by_index = self.to_canonical(&self.index_route(circuit)?);
        let negated: Chain = by_index.iter().map(|x| -x).collect();
        if by_kernel != by_index && by_kernel != negated {
            return Err(Error::Inconsistent(format!(
                "kernel and index routes disagree on circuit {}",
                self.matroid.label(circuit.mask)
            )));
        }
        Ok(FundamentalCycle { circuit: circuit.clone(), chain: normalize_sign(by_kernel) })
    }

    /// Fundamental cycles of the unique circuits in `(E ∖ F) ∪ {e}`, for
    /// `e ∈ F`, each with a positive coefficient on `e`.
    pub fn ogod_cycles(&self, ogod: Mask) -> Result<Vec<Chain>> {
        let m = self.matroid;
        let complement = m.full_mask() & !ogod;
        m.edges_of(ogod)
            .into_iter()
            .map(|e| {
                let bit = m.mask_of(&[e].into_iter().collect())?;
                let circuit = m.circuit_within(complement | bit)?;
                let mut chain = self.fundamental_cycle(&circuit)?.chain;
                if chain[e.0].is_negative() {
                    chain.iter_mut().for_each(|x| *x = -core::mem::take(x));
                }
                Ok(chain)
            })
            .collect()
    }

    /// Basis of `Ker π_*`, checked against the integer kernel of the pushforward.
    pub fn kernel_lattice(&self) -> Result<KernelLattice> {
        let m = self.matroid;
        let full = m.full_mask();
        let index_one = m
            .ogods()
            .iter()
            .filter(|f| f.index == 1)
            .min_by(|a, b| m.edges_of(full & !a.mask).cmp(&m.edges_of(full & !b.mask)));
        let lattice = match index_one {
            Some(f) => KernelLattice { basis: self.ogod_cycles(f.mask)?, provenance: Provenance::IndexOneOgod(f.edges.clone()) },
            None => {
                let cycles: Vec<Chain> = m
                    .circuits()?
                    .iter()
                    .map(|c| self.fundamental_cycle(c).map(|f| f.chain))
                    .collect::<Result<_>>()?;
                let n = m.cover().base().edge_count();
                KernelLattice { basis: row_lattice_basis(&cycles, n), provenance: Provenance::CircuitSpan }
            }
        };
        let n = m.cover().base().edge_count();
        let reference = row_lattice_basis(&m.cover().pushforward_kernel_chains()?, n);
        if lattice.basis.len() != m.rank() || row_lattice_basis(&lattice.basis, n) != reference {
            return Err(Error::Inconsistent(String::from("kernel lattice differs from the pushforward kernel")));
        }
        Ok(lattice)
    }
}

fn primitive(chain: Chain) -> Chain {
    let g = content(&chain);
    if g.is_zero() || g.is_one() {
        chain
    } else {
        chain.into_iter().map(|x| x / &g).collect()
    }
}

/// Makes the first nonzero coefficient positive.
pub fn normalize_sign(chain: Chain) -> Chain {
    match chain.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => chain.into_iter().map(|x| -x).collect(),
        _ => chain,
    }
}

/// Fundamental cycle in the stored orientation.
pub fn fundamental_cycle(m: &SignedMatroid<'_>, circuit: &Circuit) -> Result<FundamentalCycle> {
    OrientedCycles::canonical(m)?.fundamental_cycle(circuit)
}

/// Kernel lattice in the stored orientation.
pub fn kernel_lattice(m: &SignedMatroid<'_>) -> Result<KernelLattice> {
    OrientedCycles::canonical(m)?.kernel_lattice()
}

/// Index of the lattice spanned by `sub` inside the lattice spanned by
/// `full`, which must have the same rank and contain it.
pub fn sublattice_index(sub: &[Chain], full: &[Chain], cols: usize) -> Result<BigInt> {
    let b = row_lattice_basis(full, cols);
    let s = row_lattice_basis(sub, cols);
    let mut joined = b.clone();
    joined.extend(s.iter().cloned());
    if s.len() != b.len() || row_lattice_basis(&joined, cols) != b {
        return Err(Error::Inconsistent(String::from("not a full-rank sublattice")));
    }
    let pivots = pivot_columns(&b);
    let minor = |rows: &[Chain]| {
        IntMatrix::from_rows(rows.to_vec(), cols).select_columns(&pivots).to_rational()
    };
    let ratio = det(&minor(&s))? / det(&minor(&b))?;
    if !ratio.is_integer() {
        return Err(Error::Inconsistent(String::from("non-integral sublattice index")));
    }
    Ok(ratio.to_integer().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CoverBuilder;
    use crate::linalg::{int, rat};

    #[test]
    fn tau_formula() {
        let c = CoverBuilder::new()
            .vertex("u", false)
            .vertex("v", false)
            .edge("a", "u", "v", rat(1, 1), Sign::Plus)
            .edge("b", "u", "v", rat(1, 1), Sign::Minus)
            .build()
            .unwrap();
        let o = Orientation::canonical(c.base());
        let t = tau(&c, &o);
        assert_eq!((t.get(HalfEdgeId(1)), t.get(HalfEdgeId(0))), (Some(Sign::Plus), Some(Sign::Minus)));
        assert_eq!((t.get(HalfEdgeId(2)), t.get(HalfEdgeId(3))), (Some(Sign::Minus), Some(Sign::Minus)));
    }

    #[test]
    fn index_of_doubled_sublattice() {
        let full = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let sub = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(sublattice_index(&sub, &full, 2).unwrap(), int(2));
    }
}
