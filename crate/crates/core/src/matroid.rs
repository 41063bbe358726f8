//! The signed cographic matroid `M*` of a double cover and its dual `M`.
//!
//! Both live on the undilated edges. `F` is independent in `M*` when every
//! component of `G ∖ F` has connected preimage; `F` is independent in `M`
//! when the pushforward on `H_1` of the restriction over `G[F]` is injective.
//! Subsets are handled as bitmasks over the ground set.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::cover::{edge_set_label, CoverData, DoubleCover, RestrictTo, Sign};
use crate::cycles::tau_matrix;
use crate::graph::{EdgeId, EdgeSet, Orientation, VertexId};
use crate::linalg::{rank, IntMatrix, Rational};
use crate::{Error, Result};

/// Largest ground set the enumerations accept.
pub const ENUMERATION_LIMIT: usize = 24;

/// Subset of the ground set; bit `i` is the `i`-th undilated edge.
pub type Mask = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedSubset {
    pub edges: Vec<EdgeId>,
    pub mask: Mask,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CircuitType {
    /// Balanced cycle.
    I,
    /// Two unbalanced cycles joined by a path.
    II,
    /// Two unbalanced cycles sharing one vertex.
    III,
    /// Path from a dilated vertex to an unbalanced cycle.
    IV,
    /// Cycle through exactly one dilated vertex.
    V,
    /// Path between two dilated vertices.
    VI,
}

impl CircuitType {
    pub fn name(self) -> &'static str {
        match self {
            CircuitType::I => "I",
            CircuitType::II => "II",
            CircuitType::III => "III",
            CircuitType::IV => "IV",
            CircuitType::V => "V",
            CircuitType::VI => "VI",
        }
    }
}

/// A circuit of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub edges: Vec<EdgeId>,
    pub mask: Mask,
    pub kind: CircuitType,
}

/// A 2-circuit `{f1, f2}` of `M*` with the multiplicities `2^(ind({f})-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCircuit {
    pub edges: (EdgeId, EdgeId),
    pub multiplicities: (u32, u32),
}

#[derive(Clone, Debug)]
pub struct SignedMatroid<'c> {
    cover: &'c DoubleCover,
    ground: Vec<EdgeId>,
    position: Vec<Option<usize>>,
    rank: usize,
    tau: IntMatrix,
    ogods: Vec<IndexedSubset>,
}

impl<'c> SignedMatroid<'c> {
    pub fn new(cover: &'c DoubleCover) -> Result<Self> {
        let ground = cover.undilated_edges();
        if ground.len() > ENUMERATION_LIMIT {
            return Err(Error::EnumerationLimit { found: ground.len(), limit: ENUMERATION_LIMIT });
        }
        let mut position = vec![None; cover.base().edge_count()];
        for (i, e) in ground.iter().enumerate() {
            position[e.0] = Some(i);
        }
        let (tau, _, _) = tau_matrix(cover, &Orientation::canonical(cover.base()));
        let mut m = SignedMatroid { cover, ground, position, rank: cover.prym_dimension(), tau, ogods: Vec::new() };
        m.ogods = m.enumerate_ogods()?;
        Ok(m)
    }

    pub fn cover(&self) -> &'c DoubleCover {
        self.cover
    }

    pub fn ground(&self) -> &[EdgeId] {
        &self.ground
    }

    /// Rank of `M*`, which is `g̃ - g`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank of `M`.
    pub fn rank_m(&self) -> usize {
        self.ground.len() - self.rank
    }

    pub fn full_mask(&self) -> Mask {
        if self.ground.is_empty() {
            0
        } else {
            Mask::MAX >> (Mask::BITS as usize - self.ground.len())
        }
    }

    pub fn mask_of(&self, f: &EdgeSet) -> Result<Mask> {
        let mut mask = 0;
        for e in f.iter() {
            let Some(i) = self.position.get(e.0).copied().flatten() else {
                return Err(Error::UnknownEdge(format!("{}", e.0)));
            };
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn edges_of(&self, mask: Mask) -> Vec<EdgeId> {
        self.ground.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect()
    }

    pub fn label(&self, mask: Mask) -> String {
        edge_set_label(self.cover.base(), self.edges_of(mask))
    }

    fn in_mask(&self, mask: Mask, e: EdgeId) -> bool {
        self.position[e.0].map_or(false, |i| mask & (1 << i) != 0)
    }

    /// Component map of `G ∖ F` and whether each component has connected preimage.
    fn complement_components(&self, mask: Mask) -> (Vec<usize>, Vec<bool>) {
        let keep = |e: EdgeId| !self.in_mask(mask, e);
        let (map, kinds) = self.cover.kinds_with(&keep);
        let connected = kinds.iter().map(|k| *k != crate::cover::ComponentKind::Trivial).collect();
        (map, connected)
    }

    pub fn is_independent_dual_mask(&self, mask: Mask) -> bool {
        self.complement_components(mask).1.iter().all(|&c| c)
    }

    pub fn is_independent_dual(&self, f: &EdgeSet) -> Result<bool> {
        Ok(self.is_independent_dual_mask(self.mask_of(f)?))
    }

    /// Number of components of `G ∖ F`, for `F` independent in `M*`.
    pub fn index_mask(&self, mask: Mask) -> Result<usize> {
        let (_, connected) = self.complement_components(mask);
        if !connected.iter().all(|&c| c) {
            return Err(Error::DependentSet);
        }
        Ok(connected.len())
    }

    pub fn index(&self, f: &EdgeSet) -> Result<usize> {
        self.index_mask(self.mask_of(f)?)
    }

    /// Independence in `M` from the definition: the pushforward on `H_1` of
    /// the restriction over `G[F]` is injective.
    pub fn is_independent(&self, f: &EdgeSet) -> Result<bool> {
        self.mask_of(f)?;
        let restriction = self.cover.restrict(f, RestrictTo::Edges);
        let (_, maps) = restriction.cover.homology_maps_any();
        Ok(rank(&maps.pushforward) == maps.pushforward.cols())
    }

    /// Independence in `M` through the closedness equations: the columns of
    /// the τ-incidence matrix indexed by `F` are linearly independent.
    pub fn is_independent_mask(&self, mask: Mask) -> bool {
        let cols: Vec<usize> = (0..self.ground.len()).filter(|i| mask & (1 << i) != 0).collect();
        small_rank(&self.tau.select_columns(&cols)) == cols.len()
    }

    /// Elementary-cover test on every component of `G ∖ F`: either dilated
    /// with connected dilation subgraph of full genus, or free, nontrivial and
    /// of genus one.
    pub fn is_elementary_decomposition(&self, mask: Mask) -> bool {
        let c = self.cover;
        let g = c.base();
        let keep = |e: EdgeId| !self.in_mask(mask, e);
        let (map, kinds) = c.kinds_with(&keep);
        let k = kinds.len();
        let (dil_map, _) = g.component_map(|e| c.is_dilated_edge(e));
        let mut vertices = vec![0usize; k];
        let mut edges = vec![0usize; k];
        let mut dil_vertices = vec![0usize; k];
        let mut dil_edges = vec![0usize; k];
        let mut dil_parts: Vec<Vec<usize>> = vec![Vec::new(); k];
        for v in g.vertices() {
            vertices[map[v.0]] += 1;
            if c.is_dilated_vertex(v) {
                dil_vertices[map[v.0]] += 1;
                let part = dil_map[v.0];
                if !dil_parts[map[v.0]].contains(&part) {
                    dil_parts[map[v.0]].push(part);
                }
            }
        }
        for e in g.edges().filter(|&e| keep(e)) {
            let comp = map[g.endpoints(e).0 .0];
            edges[comp] += 1;
            if c.is_dilated_edge(e) {
                dil_edges[comp] += 1;
            }
        }
        (0..k).all(|i| {
            let genus = edges[i] + 1 - vertices[i];
            if dil_vertices[i] > 0 {
                dil_parts[i].len() == 1 && dil_edges[i] + 1 - dil_vertices[i] == genus
            } else {
                genus == 1 && kinds[i] == crate::cover::ComponentKind::FreeNontrivial
            }
        })
    }

    fn enumerate_ogods(&self) -> Result<Vec<IndexedSubset>> {
        let mut out = Vec::new();
        for mask in subsets_of_size(self.ground.len(), self.rank) {
            let independent = self.is_independent_dual_mask(mask);
            if independent != self.is_elementary_decomposition(mask) {
                return Err(Error::Inconsistent(format!(
                    "elementary decomposition test disagrees with relative connectivity on {}",
                    self.label(mask)
                )));
            }
            if independent {
                out.push(IndexedSubset { edges: self.edges_of(mask), mask, index: self.index_mask(mask)? });
            }
        }
        out.sort_by(|a, b| a.edges.cmp(&b.edges));
        Ok(out)
    }

    /// All bases of `M*` with their index, in lexicographic order.
    pub fn ogods(&self) -> &[IndexedSubset] {
        &self.ogods
    }

    /// Minimal dependent sets of `M`, classified.
    pub fn circuits(&self) -> Result<Vec<Circuit>> {
        let mut found: Vec<Mask> = Vec::new();
        for size in 1..=(self.rank_m() + 1).min(self.ground.len()) {
            for mask in subsets_of_size(self.ground.len(), size) {
                if found.iter().any(|&c| c & mask == c) {
                    continue;
                }
                if !self.is_independent_mask(mask) {
                    found.push(mask);
                }
            }
        }
        found
            .into_iter()
            .map(|mask| Ok(Circuit { edges: self.edges_of(mask), mask, kind: self.classify(mask)? }))
            .collect()
    }

    /// Minimal dependent subset of a dependent set, found by greedy deletion.
    pub fn circuit_within(&self, mask: Mask) -> Result<Circuit> {
        if self.is_independent_mask(mask) {
            return Err(Error::NotACircuit);
        }
        let mut c = mask;
        for i in 0..self.ground.len() {
            let smaller = c & !(1 << i);
            if c & (1 << i) != 0 && !self.is_independent_mask(smaller) {
                c = smaller;
            }
        }
        Ok(Circuit { edges: self.edges_of(c), mask: c, kind: self.classify(c)? })
    }

    /// Structural type of a circuit of `M`, after suppressing undilated
    /// vertices of valency two.
    pub fn classify(&self, mask: Mask) -> Result<CircuitType> {
        let edges: EdgeSet = self.edges_of(mask).into_iter().collect();
        let r = self.cover.restrict(&edges, RestrictTo::Edges).cover;
        classify_restriction(&r).ok_or_else(|| Error::UnclassifiedCircuit(self.label(mask)))
    }

    /// `2^(ind({f}) - 1)` for an edge that is not a loop of `M*`.
    pub fn multiplicity(&self, e: EdgeId) -> Result<u32> {
        let mask = self.mask_of(&[e].into_iter().collect())?;
        Ok(1 << (self.index_mask(mask)? - 1))
    }

    /// The 1-circuits and 2-circuits of `M*`.
    pub fn circuits_dual_small(&self) -> Result<(Vec<EdgeId>, Vec<TwoCircuit>)> {
        let n = self.ground.len();
        let loops: Vec<usize> = (0..n).filter(|&i| !self.is_independent_dual_mask(1 << i)).collect();
        let mut pairs = Vec::new();
        for i in (0..n).filter(|i| !loops.contains(i)) {
            for j in (i + 1..n).filter(|j| !loops.contains(j)) {
                if !self.is_independent_dual_mask((1 << i) | (1 << j)) {
                    let (a, b) = (self.ground[i], self.ground[j]);
                    pairs.push(TwoCircuit { edges: (a, b), multiplicities: (self.multiplicity(a)?, self.multiplicity(b)?) });
                }
            }
        }
        Ok((loops.into_iter().map(|i| self.ground[i]).collect(), pairs))
    }

    /// All circuits of `M*`, by exhaustive search.
    pub fn dual_circuits(&self) -> Vec<Mask> {
        let mut found: Vec<Mask> = Vec::new();
        for size in 1..=(self.rank + 1).min(self.ground.len()) {
            for mask in subsets_of_size(self.ground.len(), size) {
                if !found.iter().any(|&c| c & mask == c) && !self.is_independent_dual_mask(mask) {
                    found.push(mask);
                }
            }
        }
        found
    }

    /// Number of components of the dilation subgraph, or 1 for a free cover.
    pub fn dilation_index(&self) -> usize {
        dilation_index(self.cover)
    }
}

pub fn dilation_index(c: &CoverData) -> usize {
    if c.is_free() {
        return 1;
    }
    let (map, _) = c.base().component_map(|e| c.is_dilated_edge(e));
    let mut parts: Vec<usize> = c.base().vertices().filter(|&v| c.is_dilated_vertex(v)).map(|v| map[v.0]).collect();
    parts.sort_unstable();
    parts.dedup();
    parts.len()
}

/// All `k`-subsets of `{0..n}` as masks, in colexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = Mask> {
    let limit: u64 = 1 << n;
    let mut next: Option<u64> = if k > n { None } else { Some((1u64 << k) - 1) };
    core::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur as Mask)
    })
}

/// Rank of a small integer matrix by fraction-free elimination in `i128`,
/// falling back to exact big-integer arithmetic on overflow.
fn small_rank(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<i128>> = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row: Option<Vec<i128>> = m.row(i).iter().map(|x| x.to_i128()).collect();
        match row {
            Some(r) => a.push(r),
            None => return rank(m),
        }
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = a[r][c].checked_mul(a[i][j]).and_then(|x| x.checked_sub(a[i][c].checked_mul(a[r][j])?));
                match v {
                    Some(v) => a[i][j] = v / prev,
                    None => return rank(m),
                }
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn sign_product(c: &CoverData, edges: impl Iterator<Item = EdgeId>) -> Sign {
    edges.fold(Sign::Plus, |acc, e| acc * c.sign(e))
}

/// Matches a connected cover restricted to a circuit against types I to VI.
fn classify_restriction(r: &CoverData) -> Option<CircuitType> {
    let g = r.base();
    if !g.is_connected() {
        return None;
    }
    let genus = g.betti_number();
    let degree = |v: VertexId| g.degree(v);
    let dilated: Vec<VertexId> = g.vertices().filter(|&v| r.is_dilated_vertex(v)).collect();
    if g.vertices().any(|v| !r.is_dilated_vertex(v) && degree(v) < 2) {
        return None;
    }
    let undilated_degrees = |allowed: &[usize]| -> Vec<usize> {
        let mut d: Vec<usize> =
            g.vertices().filter(|&v| !r.is_dilated_vertex(v)).map(degree).filter(|d| !allowed.contains(d)).collect();
        d.sort_unstable();
        d
    };
    let bridges: Vec<EdgeId> = g.edges().filter(|&e| g.is_bridge(e)).collect();
    let unbalanced_blocks = |blocks: Vec<Vec<EdgeId>>| -> bool {
        blocks.len() == 2 && blocks.into_iter().all(|b| sign_product(r, b.into_iter()) == Sign::Minus)
    };
    match dilated.len() {
        2 => (genus == 0 && dilated.iter().all(|&v| degree(v) == 1) && undilated_degrees(&[2]).is_empty())
            .then_some(CircuitType::VI),
        1 => {
            if genus != 1 {
                return None;
            }
            if bridges.is_empty() {
                (degree(dilated[0]) == 2 && undilated_degrees(&[2]).is_empty()).then_some(CircuitType::V)
            } else {
                let cycle = g.edges().filter(|e| !bridges.contains(e));
                (degree(dilated[0]) == 1
                    && undilated_degrees(&[2]) == vec![3]
                    && sign_product(r, cycle) == Sign::Minus)
                    .then_some(CircuitType::IV)
            }
        }
        0 => match (genus, bridges.is_empty()) {
            (1, _) => (undilated_degrees(&[2]).is_empty() && sign_product(r, g.edges()) == Sign::Plus)
                .then_some(CircuitType::I),
            (2, false) => {
                if undilated_degrees(&[2]) != vec![3, 3] {
                    return None;
                }
                let (map, _) = g.component_map(|e| !bridges.contains(&e));
                let mut blocks: Vec<Vec<EdgeId>> = Vec::new();
                let mut owner: Vec<usize> = Vec::new();
                for e in g.edges().filter(|e| !bridges.contains(e)) {
                    let comp = map[g.endpoints(e).0 .0];
                    match owner.iter().position(|&o| o == comp) {
                        Some(k) => blocks[k].push(e),
                        None => {
                            owner.push(comp);
                            blocks.push(vec![e]);
                        }
                    }
                }
                unbalanced_blocks(blocks).then_some(CircuitType::II)
            }
            (2, true) => {
                if undilated_degrees(&[2]) != vec![4] {
                    return None;
                }
                let hub = g.vertices().find(|&v| degree(v) == 4)?;
                let (map, _) = g.component_map(|e| {
                    let (a, b) = g.endpoints(e);
                    a != hub && b != hub
                });
                let mut blocks: Vec<Vec<EdgeId>> = Vec::new();
                let mut owner: Vec<Option<usize>> = Vec::new();
                for e in g.edges() {
                    let (a, b) = g.endpoints(e);
                    let key = if a == hub && b == hub {
                        None
                    } else {
                        Some(map[if a == hub { b } else { a }.0])
                    };
                    match key.and_then(|k| owner.iter().position(|&o| o == Some(k))) {
                        Some(k) => blocks[k].push(e),
                        None => {
                            owner.push(key);
                            blocks.push(vec![e]);
                        }
                    }
                }
                unbalanced_blocks(blocks).then_some(CircuitType::III)
            }
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplificationStep {
    /// 1-circuits of `M*` contracted together.
    ContractLoops { edges: Vec<String> },
    /// One edge of a 2-circuit contracted, its length moved onto the other.
    MergeParallel {
        contracted: String,
        kept: String,
        contracted_multiplicity: u32,
        kept_multiplicity: u32,
        added_length: Rational,
        new_length: Rational,
    },
}

#[derive(Clone, Debug)]
pub struct Simplification {
    pub cover: DoubleCover,
    /// Original edge to edge of the simplified cover.
    pub edge_map: Vec<Option<EdgeId>>,
    /// Chain-coordinate sign from an original edge to its image.
    pub chain_flips: Vec<Sign>,
    pub steps: Vec<SimplificationStep>,
}

/// Contracts 1-circuits of `M*`, then repeatedly one edge of the first
/// 2-circuit (by edge label), until `M*` is simple.
pub fn simplify(cover: &DoubleCover) -> Result<Simplification> {
    let mut current = cover.clone();
    let mut edge_map: Vec<Option<EdgeId>> = cover.base().edges().map(Some).collect();
    let mut chain_flips = vec![Sign::Plus; cover.base().edge_count()];
    let mut steps = Vec::new();
    loop {
        let m = SignedMatroid::new(&current)?;
        let (loops, pairs) = m.circuits_dual_small()?;
        let contract: EdgeSet;
        let mut next_cover = current.clone();
        if !loops.is_empty() {
            contract = loops.iter().copied().collect();
            steps.push(SimplificationStep::ContractLoops {
                edges: loops.iter().map(|&e| String::from(current.base().edge_label(e))).collect(),
            });
        } else {
            let label = |e: EdgeId| current.base().edge_label(e);
            let ordered = |p: &TwoCircuit| {
                let (a, b) = p.edges;
                let (ma, mb) = p.multiplicities;
                if label(a) <= label(b) {
                    ((label(a), label(b)), (a, ma), (b, mb))
                } else {
                    ((label(b), label(a)), (b, mb), (a, ma))
                }
            };
            let Some(first) = pairs.iter().map(ordered).min_by(|x, y| x.0.cmp(&y.0)) else { break };
            let (_, (a, ma), (b, mb)) = first;
            let ((f1, m1), (f2, m2)) = if mb > ma { ((b, mb), (a, ma)) } else { ((a, ma), (b, mb)) };
            let ratio = Rational::new(m1.into(), m2.into());
            let added = &ratio * &ratio * current.length(f1);
            let new_length = current.length(f2) + &added;
            next_cover = current.with_length(f2, new_length.clone())?;
            steps.push(SimplificationStep::MergeParallel {
                contracted: label(f1).into(),
                kept: label(f2).into(),
                contracted_multiplicity: m1,
                kept_multiplicity: m2,
                added_length: added,
                new_length,
            });
            contract = [f1].into_iter().collect();
        }
        let result = next_cover.contract_cover(&contract)?;
        for (slot, flip) in edge_map.iter_mut().zip(chain_flips.iter_mut()) {
            if let Some(e) = *slot {
                *slot = result.edge_map[e.0];
                if let Some(ne) = *slot {
                    *flip = *flip * result.chain_flips[ne.0];
                }
            }
        }
        current = result.cover;
    }
    Ok(Simplification { cover: current, edge_map, chain_flips, steps })
}
