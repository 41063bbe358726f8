//! Harmonic double covers stored through their base data, and the total graph.
//!
//! A cover is given by the base graph, the set of dilated vertices and edges,
//! and a sign `σ(e)` on each free edge (both endpoints undilated, edge
//! undilated). Edges with a dilated endpoint carry the implicit sign `+1`.
//! Signs are normalized by switching so that `σ = +1` on the BFS spanning
//! forest of the free subgraph.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::graph::{Chain, EdgeId, EdgeSet, HalfEdgeGraph, VertexId};
use crate::linalg::{int_kernel, IntMatrix, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn apply(self, x: &BigInt) -> BigInt {
        match self {
            Sign::Plus => x.clone(),
            Sign::Minus => -x,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

/// Which preimage a vertex or edge of the total graph is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
    Fixed,
}

/// How a connected piece of a (possibly disconnected) cover looks upstairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// Contains a dilated vertex.
    Dilated,
    /// Free with an unbalanced cycle: connected preimage.
    FreeNontrivial,
    /// Free and balanced: two disjoint copies upstairs.
    Trivial,
}

/// Unvalidated cover data. Restrictions to subgraphs live here; a
/// [`DoubleCover`] is a validated, sign-normalized `CoverData`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverData {
    base: HalfEdgeGraph,
    lengths: Vec<Rational>,
    dilated_vertices: Vec<bool>,
    dilated_edges: Vec<bool>,
    signs: Vec<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCover {
    data: CoverData,
}

impl Deref for DoubleCover {
    type Target = CoverData;
    fn deref(&self) -> &CoverData {
        &self.data
    }
}

/// The total graph `Γ̃` with its projection and lifts.
#[derive(Clone, Debug)]
pub struct TotalGraph {
    pub graph: HalfEdgeGraph,
    pub lengths: Vec<Rational>,
    pub vertex_projection: Vec<VertexId>,
    pub vertex_sheet: Vec<Sheet>,
    pub edge_projection: Vec<EdgeId>,
    pub edge_sheet: Vec<Sheet>,
    vertex_lifts: Vec<(VertexId, VertexId)>,
    edge_lifts: Vec<(EdgeId, EdgeId)>,
}

/// Pushforward and pullback on first homology in fixed cycle bases.
#[derive(Clone, Debug)]
pub struct HomologyMaps {
    pub base_basis: Vec<Chain>,
    pub total_basis: Vec<Chain>,
    /// `g × g̃`: columns are images of the total basis.
    pub pushforward: IntMatrix,
    /// `g̃ × g`: columns are images of the base basis.
    pub pullback: IntMatrix,
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub cover: CoverData,
    pub vertex_map: Vec<Option<VertexId>>,
    pub edge_map: Vec<Option<EdgeId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestrictTo {
    /// `G ∖ F`, keeping every vertex.
    Complement,
    /// `G[F]`: the edges of `F` and their endpoints.
    Edges,
}

/// Result of contracting edges of a cover.
///
/// `chain_flips[e]` relates chain coordinates: a kernel chain `γ` of the
/// original cover maps to `γ'(e') = chain_flips[e'] * γ(e)` where
/// `e' = edge_map[e]`.
#[derive(Clone, Debug)]
pub struct CoverContraction {
    pub cover: DoubleCover,
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<Option<EdgeId>>,
    pub chain_flips: Vec<Sign>,
}

/// Switching potentials on undilated vertices along a set of free edges.
struct Potentials {
    value: Vec<Sign>,
    /// Per vertex: its free component contains an unbalanced cycle.
    unbalanced: Vec<bool>,
}

impl CoverData {
    pub fn new(
        base: HalfEdgeGraph,
        lengths: Vec<Rational>,
        dilated_vertices: Vec<bool>,
        dilated_edges: Vec<bool>,
        signs: Vec<Sign>,
    ) -> Result<Self> {
        let e = base.edge_count();
        for (found, expected) in
            [(lengths.len(), e), (dilated_edges.len(), e), (signs.len(), e), (dilated_vertices.len(), base.vertex_count())]
        {
            if found != expected {
                return Err(Error::LengthMismatch { expected, found });
            }
        }
        let data = CoverData { base, lengths, dilated_vertices, dilated_edges, signs };
        for e in data.base.edges() {
            let label = || data.base.edge_label(e).to_string();
            if !data.lengths[e.0].is_positive() {
                return Err(Error::NonPositiveLength(label()));
            }
            let (a, b) = data.base.endpoints(e);
            if data.dilated_edges[e.0] && !(data.dilated_vertices[a.0] && data.dilated_vertices[b.0]) {
                return Err(Error::DilatedEdgeEndpoint(label()));
            }
            if !data.is_free_edge(e) && data.signs[e.0] == Sign::Minus {
                return Err(Error::SignOnNonFreeEdge(label()));
            }
        }
        Ok(data)
    }

    pub fn base(&self) -> &HalfEdgeGraph {
        &self.base
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn length(&self, e: EdgeId) -> &Rational {
        &self.lengths[e.0]
    }

    pub fn is_dilated_vertex(&self, v: VertexId) -> bool {
        self.dilated_vertices[v.0]
    }

    pub fn is_dilated_edge(&self, e: EdgeId) -> bool {
        self.dilated_edges[e.0]
    }

    pub fn sign(&self, e: EdgeId) -> Sign {
        self.signs[e.0]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Undilated edge with both endpoints undilated.
    pub fn is_free_edge(&self, e: EdgeId) -> bool {
        let (a, b) = self.base.endpoints(e);
        !self.dilated_edges[e.0] && !self.dilated_vertices[a.0] && !self.dilated_vertices[b.0]
    }

    pub fn is_free(&self) -> bool {
        !self.dilated_vertices.iter().any(|&d| d)
    }

    pub fn undilated_edges(&self) -> Vec<EdgeId> {
        self.base.edges().filter(|e| !self.dilated_edges[e.0]).collect()
    }

    pub fn dilated_edge_set(&self) -> EdgeSet {
        self.base.edges().filter(|e| self.dilated_edges[e.0]).collect()
    }

    pub fn dilated_vertex_count(&self) -> usize {
        self.dilated_vertices.iter().filter(|&&d| d).count()
    }

    /// BFS over undilated vertices along the free edges accepted by `keep`.
    fn potentials(&self, keep: &dyn Fn(EdgeId) -> bool) -> Potentials {
        let n = self.base.vertex_count();
        let mut value = vec![Sign::Plus; n];
        let mut seen = vec![false; n];
        let mut component = vec![usize::MAX; n];
        let mut incident: Vec<Vec<(EdgeId, VertexId)>> = vec![Vec::new(); n];
        for e in self.base.edges().filter(|&e| self.is_free_edge(e) && keep(e)) {
            let (a, b) = self.base.endpoints(e);
            incident[a.0].push((e, b));
            incident[b.0].push((e, a));
        }
        let mut count = 0;
        for start in self.base.vertices().filter(|v| !self.dilated_vertices[v.0]) {
            if seen[start.0] {
                continue;
            }
            seen[start.0] = true;
            component[start.0] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(e, w) in &incident[v.0] {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        component[w.0] = count;
                        value[w.0] = value[v.0] * self.signs[e.0];
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        let mut bad = vec![false; count];
        for e in self.base.edges().filter(|&e| self.is_free_edge(e) && keep(e)) {
            let (a, b) = self.base.endpoints(e);
            if value[a.0] * self.signs[e.0] * value[b.0] == Sign::Minus {
                bad[component[a.0]] = true;
            }
        }
        let unbalanced = (0..n).map(|v| component[v] != usize::MAX && bad[component[v]]).collect();
        Potentials { value, unbalanced }
    }

    /// Kind of every connected component of the base graph.
    pub fn component_kinds(&self) -> Vec<(Vec<VertexId>, ComponentKind)> {
        let (map, kinds) = self.kinds_with(&|_| true);
        let mut members = vec![Vec::new(); kinds.len()];
        for v in self.base.vertices() {
            members[map[v.0]].push(v);
        }
        members.into_iter().zip(kinds).collect()
    }

    /// Component map of the subgraph with the edges accepted by `keep`, and
    /// the kind of each component.
    pub(crate) fn kinds_with(&self, keep: &dyn Fn(EdgeId) -> bool) -> (Vec<usize>, Vec<ComponentKind>) {
        let (map, count) = self.base.component_map(keep);
        let pot = self.potentials(keep);
        let mut kinds = vec![ComponentKind::Trivial; count];
        for v in self.base.vertices() {
            let k = &mut kinds[map[v.0]];
            if self.dilated_vertices[v.0] {
                *k = ComponentKind::Dilated;
            } else if pot.unbalanced[v.0] && *k == ComponentKind::Trivial {
                *k = ComponentKind::FreeNontrivial;
            }
        }
        (map, kinds)
    }

    /// Number of connected components of the total graph.
    pub fn preimage_component_count(&self) -> usize {
        self.component_kinds().iter().map(|(_, k)| if *k == ComponentKind::Trivial { 2 } else { 1 }).sum()
    }

    /// The cover restricted to `G ∖ F` or to `G[F]`. The result may be
    /// disconnected or trivial; see [`CoverData::component_kinds`].
    pub fn restrict(&self, f: &EdgeSet, to: RestrictTo) -> Restriction {
        let sub = match to {
            RestrictTo::Complement => self.base.delete_edges(f),
            RestrictTo::Edges => self.base.induced_by_edges(f),
        };
        let mut dilated_vertices = vec![false; sub.graph.vertex_count()];
        for (v, nv) in sub.vertex_map.iter().enumerate() {
            if let Some(nv) = nv {
                dilated_vertices[nv.0] = self.dilated_vertices[v];
            }
        }
        let mut lengths = vec![Rational::zero(); sub.graph.edge_count()];
        let mut dilated_edges = vec![false; sub.graph.edge_count()];
        let mut signs = vec![Sign::Plus; sub.graph.edge_count()];
        for (e, ne) in sub.edge_map.iter().enumerate() {
            if let Some(ne) = ne {
                lengths[ne.0] = self.lengths[e].clone();
                dilated_edges[ne.0] = self.dilated_edges[e];
                signs[ne.0] = self.signs[e];
            }
        }
        let cover = CoverData { base: sub.graph, lengths, dilated_vertices, dilated_edges, signs };
        Restriction { cover, vertex_map: sub.vertex_map, edge_map: sub.edge_map }
    }

    pub fn build_total_graph(&self) -> TotalGraph {
        let mut graph = HalfEdgeGraph::new();
        let mut vertex_projection = Vec::new();
        let mut vertex_sheet = Vec::new();
        let mut vertex_lifts = Vec::new();
        for v in self.base.vertices() {
            let label = self.base.vertex_label(v);
            if self.dilated_vertices[v.0] {
                let id = graph.add_vertex(format!("{label}~"));
                vertex_projection.push(v);
                vertex_sheet.push(Sheet::Fixed);
                vertex_lifts.push((id, id));
            } else {
                let p = graph.add_vertex(format!("{label}+"));
                let m = graph.add_vertex(format!("{label}-"));
                vertex_projection.extend([v, v]);
                vertex_sheet.extend([Sheet::Plus, Sheet::Minus]);
                vertex_lifts.push((p, m));
            }
        }
        let lift = |v: VertexId, s: Sign| match s {
            Sign::Plus => vertex_lifts[v.0].0,
            Sign::Minus => vertex_lifts[v.0].1,
        };
        let mut lengths = Vec::new();
        let mut edge_projection = Vec::new();
        let mut edge_sheet = Vec::new();
        let mut edge_lifts = Vec::new();
        let half = Rational::new(1.into(), 2.into());
        for e in self.base.edges() {
            let label = self.base.edge_label(e);
            let (a, b) = self.base.endpoints(e);
            if self.dilated_edges[e.0] {
                let id = graph.add_edge(format!("{label}~"), lift(a, Sign::Plus), lift(b, Sign::Plus));
                lengths.push(&self.lengths[e.0] * &half);
                edge_projection.push(e);
                edge_sheet.push(Sheet::Fixed);
                edge_lifts.push((id, id));
            } else {
                let s = self.signs[e.0];
                let p = graph.add_edge(format!("{label}+"), lift(a, Sign::Plus), lift(b, s));
                let m = graph.add_edge(format!("{label}-"), lift(a, Sign::Minus), lift(b, -s));
                lengths.extend([self.lengths[e.0].clone(), self.lengths[e.0].clone()]);
                edge_projection.extend([e, e]);
                edge_sheet.extend([Sheet::Plus, Sheet::Minus]);
                edge_lifts.push((p, m));
            }
        }
        TotalGraph {
            graph,
            lengths,
            vertex_projection,
            vertex_sheet,
            edge_projection,
            edge_sheet,
            vertex_lifts,
            edge_lifts,
        }
    }

    /// Pushforward and pullback on `H_1` for any (possibly disconnected) cover.
    pub fn homology_maps_any(&self) -> (TotalGraph, HomologyMaps) {
        let total = self.build_total_graph();
        let (base_basis, base_chords) = self.base.cycle_space_basis();
        let (total_basis, total_chords) = total.graph.cycle_space_basis();
        let mut pushforward = IntMatrix::zeros(base_basis.len(), total_basis.len());
        for (j, chain) in total_basis.iter().enumerate() {
            let image = total.push_chain(chain, self.base.edge_count());
            for (i, c) in base_chords.iter().enumerate() {
                pushforward[(i, j)] = image[c.0].clone();
            }
        }
        let mut pullback = IntMatrix::zeros(total_basis.len(), base_basis.len());
        for (j, chain) in base_basis.iter().enumerate() {
            let image = total.pull_chain(chain, self);
            for (i, c) in total_chords.iter().enumerate() {
                pullback[(i, j)] = image[c.0].clone();
            }
        }
        (total, HomologyMaps { base_basis, total_basis, pushforward, pullback })
    }

    /// Integer basis of `Ker π_*` written as chains on the base:
    /// `γ(e)` is the coefficient of `ẽ⁺` (and `-γ(e)` that of `ẽ⁻`).
    pub fn pushforward_kernel_chains(&self) -> Result<Vec<Chain>> {
        let (total, maps) = self.homology_maps_any();
        int_kernel(&maps.pushforward)
            .into_iter()
            .map(|x| {
                let mut up = vec![BigInt::zero(); total.graph.edge_count()];
                for (coef, cycle) in x.iter().zip(&maps.total_basis) {
                    for (u, c) in up.iter_mut().zip(cycle) {
                        *u += coef * c;
                    }
                }
                total.target_chain(&up, self)
            })
            .collect()
    }
}

impl TotalGraph {
    pub fn vertex_lift(&self, v: VertexId, s: Sign) -> VertexId {
        match s {
            Sign::Plus => self.vertex_lifts[v.0].0,
            Sign::Minus => self.vertex_lifts[v.0].1,
        }
    }

    pub fn edge_lift(&self, e: EdgeId, s: Sign) -> EdgeId {
        match s {
            Sign::Plus => self.edge_lifts[e.0].0,
            Sign::Minus => self.edge_lifts[e.0].1,
        }
    }

    /// The deck involution on vertices.
    pub fn involution_vertex(&self, v: VertexId) -> VertexId {
        let (p, m) = self.vertex_lifts[self.vertex_projection[v.0].0];
        if v == p {
            m
        } else {
            p
        }
    }

    pub fn involution_edge(&self, e: EdgeId) -> EdgeId {
        let (p, m) = self.edge_lifts[self.edge_projection[e.0].0];
        if e == p {
            m
        } else {
            p
        }
    }

    /// Local degree of the cover at an edge of the total graph.
    pub fn local_degree(&self, e: EdgeId) -> u8 {
        if self.edge_sheet[e.0] == Sheet::Fixed {
            2
        } else {
            1
        }
    }

    pub fn push_chain(&self, chain: &[BigInt], base_edges: usize) -> Chain {
        let mut image = vec![BigInt::zero(); base_edges];
        for (e, c) in chain.iter().enumerate() {
            image[self.edge_projection[e].0] += c;
        }
        image
    }

    pub fn pull_chain(&self, chain: &[BigInt], cover: &CoverData) -> Chain {
        let mut image = vec![BigInt::zero(); self.graph.edge_count()];
        for e in cover.base.edges() {
            let (p, m) = self.edge_lifts[e.0];
            if p == m {
                image[p.0] = &chain[e.0] * 2;
            } else {
                image[p.0] = chain[e.0].clone();
                image[m.0] = chain[e.0].clone();
            }
        }
        image
    }

    /// Reads an anti-invariant chain upstairs as a chain on the base.
    fn target_chain(&self, up: &[BigInt], cover: &CoverData) -> Result<Chain> {
        let mut gamma = vec![BigInt::zero(); cover.base.edge_count()];
        for e in cover.base.edges() {
            let (p, m) = self.edge_lifts[e.0];
            let anti = if p == m { up[p.0].is_zero() } else { (&up[p.0] + &up[m.0]).is_zero() };
            if !anti {
                return Err(Error::Inconsistent(format!(
                    "kernel element is not anti-invariant on {}",
                    cover.base.edge_label(e)
                )));
            }
            if p != m {
                gamma[e.0] = up[p.0].clone();
            }
        }
        Ok(gamma)
    }
}

impl DoubleCover {
    /// Validates and sign-normalizes cover data.
    pub fn new(
        base: HalfEdgeGraph,
        lengths: Vec<Rational>,
        dilated_vertices: Vec<bool>,
        dilated_edges: Vec<bool>,
        signs: Vec<Sign>,
    ) -> Result<Self> {
        let data = CoverData::new(base, lengths, dilated_vertices, dilated_edges, signs)?;
        DoubleCover::from_data(data).map(|(c, _)| c)
    }

    /// Validates, normalizes and reports the chain flips of the normalization.
    fn from_data(mut data: CoverData) -> Result<(Self, Vec<Sign>)> {
        if data.base.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        if !data.base.is_connected() {
            return Err(Error::Disconnected);
        }
        let pot = data.potentials(&|_| true);
        if data.is_free() && !pot.unbalanced[0] {
            return Err(Error::TrivialCover);
        }
        let mut flips = vec![Sign::Plus; data.base.edge_count()];
        for e in data.base.edges() {
            let (a, b) = data.base.endpoints(e);
            let (da, db) = (data.dilated_vertices[a.0], data.dilated_vertices[b.0]);
            if data.dilated_edges[e.0] {
                continue;
            }
            if !da && !db {
                data.signs[e.0] = pot.value[a.0] * data.signs[e.0] * pot.value[b.0];
            }
            flips[e.0] = if !da {
                pot.value[a.0]
            } else if !db {
                pot.value[b.0]
            } else {
                Sign::Plus
            };
        }
        Ok((DoubleCover { data }, flips))
    }

    pub fn data(&self) -> &CoverData {
        &self.data
    }

    pub fn genus(&self) -> usize {
        self.base.betti_number()
    }

    /// Genus of the total graph.
    pub fn total_genus(&self) -> usize {
        let v = 2 * self.base.vertex_count() - self.dilated_vertex_count();
        let e = 2 * self.base.edge_count() - self.dilated_edges.iter().filter(|&&d| d).count();
        e + 1 - v
    }

    /// Dimension `g̃ - g` of the Prym variety.
    pub fn prym_dimension(&self) -> usize {
        self.total_genus() - self.genus()
    }

    pub fn homology_maps(&self) -> Result<(TotalGraph, HomologyMaps)> {
        let (total, maps) = self.homology_maps_any();
        if !total.graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok((total, maps))
    }

    /// Contracts `f` in the base graph and pushes the cover data along.
    ///
    /// A contracted component becomes a dilated vertex if it contains a
    /// dilated vertex or carries a nontrivial free cover.
    pub fn contract_cover(&self, f: &EdgeSet) -> Result<CoverContraction> {
        let d = &self.data;
        let contraction = d.base.contract_edges(f);
        let pot = d.potentials(&|e| f.contains(e));
        let classes = contraction.graph.vertex_count();
        let mut dilated_vertices = vec![false; classes];
        for v in d.base.vertices() {
            let c = contraction.vertex_map[v.0].0;
            dilated_vertices[c] |= d.dilated_vertices[v.0] || pot.unbalanced[v.0];
        }
        let m = contraction.graph.edge_count();
        let mut lengths = vec![Rational::zero(); m];
        let mut dilated_edges = vec![false; m];
        let mut signs = vec![Sign::Plus; m];
        let mut flips = vec![Sign::Plus; m];
        for e in d.base.edges() {
            let Some(ne) = contraction.edge_map[e.0] else { continue };
            lengths[ne.0] = d.lengths[e.0].clone();
            dilated_edges[ne.0] = d.dilated_edges[e.0];
            if d.dilated_edges[e.0] {
                continue;
            }
            let (a, b) = d.base.endpoints(e);
            let tail_free = !dilated_vertices[contraction.vertex_map[a.0].0];
            let head_free = !dilated_vertices[contraction.vertex_map[b.0].0];
            let sigma = d.signs[e.0];
            if tail_free && head_free {
                signs[ne.0] = pot.value[a.0] * sigma * pot.value[b.0];
            }
            flips[ne.0] = if tail_free {
                pot.value[a.0]
            } else if head_free {
                sigma * pot.value[b.0]
            } else {
                Sign::Plus
            };
        }
        let data = CoverData::new(contraction.graph, lengths, dilated_vertices, dilated_edges, signs)?;
        let (cover, normal_flips) = DoubleCover::from_data(data)?;
        let chain_flips = flips.into_iter().zip(normal_flips).map(|(x, y)| x * y).collect();
        Ok(CoverContraction {
            cover,
            vertex_map: contraction.vertex_map,
            edge_map: contraction.edge_map,
            chain_flips,
        })
    }

    /// The same cover with one edge length replaced.
    pub fn with_length(&self, e: EdgeId, length: Rational) -> Result<DoubleCover> {
        if !length.is_positive() {
            return Err(Error::NonPositiveLength(self.base.edge_label(e).to_string()));
        }
        let mut c = self.clone();
        c.data.lengths[e.0] = length;
        Ok(c)
    }

    pub fn is_edge_free(&self) -> bool {
        !self.dilated_edges.iter().any(|&d| d)
    }

    /// Contracts every dilated edge.
    pub fn edge_free_reduction(&self) -> Result<CoverContraction> {
        self.contract_cover(&self.dilated_edge_set())
    }

    /// Free cover whose contraction along the new loops recovers the
    /// edge-free reduction of `self`.
    ///
    /// Each dilated vertex `v` becomes undilated and receives an odd loop
    /// `v~loop` of length one. The preimages of half-edges at `v` labelled
    /// `+` are attached to `v⁺`.
    pub fn free_resolution(&self) -> Result<(DoubleCover, EdgeSet)> {
        let reduced;
        let c = if self.is_edge_free() {
            self
        } else {
            reduced = self.edge_free_reduction()?.cover;
            &reduced
        };
        let mut base = c.base.clone();
        let mut lengths = c.lengths.clone();
        let mut signs = c.signs.clone();
        let mut loops = EdgeSet::new();
        for v in c.base.vertices().filter(|v| c.dilated_vertices[v.0]) {
            let label = format!("{}~loop", c.base.vertex_label(v));
            if base.find_edge(&label).is_some() {
                return Err(Error::DuplicateEdge(label));
            }
            loops.insert(base.add_edge(label, v, v));
            lengths.push(Rational::from_integer(1.into()));
            signs.push(Sign::Minus);
        }
        let n = base.edge_count();
        let cover = DoubleCover::new(base, lengths, vec![false; c.base.vertex_count()], vec![false; n], signs)?;
        Ok((cover, loops))
    }
}

/// Convenience builder addressing vertices and edges by label.
#[derive(Clone, Debug, Default)]
pub struct CoverBuilder {
    base: HalfEdgeGraph,
    lengths: Vec<Rational>,
    dilated_vertices: Vec<bool>,
    dilated_edges: Vec<bool>,
    signs: Vec<Sign>,
    error: Option<Error>,
}

impl CoverBuilder {
    pub fn new() -> Self {
        CoverBuilder::default()
    }

    pub fn vertex(mut self, label: &str, dilated: bool) -> Self {
        if self.base.find_vertex(label).is_some() {
            self.error.get_or_insert(Error::DuplicateVertex(label.to_string()));
        }
        self.base.add_vertex(label);
        self.dilated_vertices.push(dilated);
        self
    }

    /// Undilated edge from `tail` to `head`.
    pub fn edge(self, label: &str, tail: &str, head: &str, length: Rational, sign: Sign) -> Self {
        self.push_edge(label, tail, head, length, false, sign)
    }

    pub fn dilated_edge(self, label: &str, tail: &str, head: &str, length: Rational) -> Self {
        self.push_edge(label, tail, head, length, true, Sign::Plus)
    }

    fn push_edge(mut self, label: &str, tail: &str, head: &str, length: Rational, dilated: bool, sign: Sign) -> Self {
        if self.base.find_edge(label).is_some() {
            self.error.get_or_insert(Error::DuplicateEdge(label.to_string()));
        }
        match (self.base.find_vertex(tail), self.base.find_vertex(head)) {
            (Some(a), Some(b)) => {
                self.base.add_edge(label, a, b);
                self.lengths.push(length);
                self.dilated_edges.push(dilated);
                self.signs.push(sign);
            }
            (None, _) => {
                self.error.get_or_insert(Error::UnknownVertex(tail.to_string()));
            }
            (_, None) => {
                self.error.get_or_insert(Error::UnknownVertex(head.to_string()));
            }
        }
        self
    }

    pub fn build_data(self) -> Result<CoverData> {
        if let Some(e) = self.error {
            return Err(e);
        }
        CoverData::new(self.base, self.lengths, self.dilated_vertices, self.dilated_edges, self.signs)
    }

    pub fn build(self) -> Result<DoubleCover> {
        let data = self.build_data()?;
        DoubleCover::from_data(data).map(|(c, _)| c)
    }
}

/// Renders an edge set as `{a,b}` using base labels.
pub fn edge_set_label(g: &HalfEdgeGraph, edges: impl IntoIterator<Item = EdgeId>) -> String {
    let names: Vec<&str> = edges.into_iter().map(|e| g.edge_label(e)).collect();
    format!("{{{}}}", names.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn one() -> Rational {
        rat(1, 1)
    }

    fn cover_a() -> DoubleCover {
        CoverBuilder::new()
            .vertex("u", false)
            .vertex("v", false)
            .edge("e1", "u", "u", one(), Sign::Minus)
            .edge("e2", "u", "v", one(), Sign::Plus)
            .edge("e3", "u", "v", one(), Sign::Minus)
            .edge("e4", "v", "v", one(), Sign::Minus)
            .build()
            .unwrap()
    }

    #[test]
    fn odd_loop_lifts_to_two_cycle() {
        let c = CoverBuilder::new().vertex("u", false).edge("e", "u", "u", one(), Sign::Minus).build().unwrap();
        let t = c.build_total_graph();
        assert_eq!(t.graph.vertex_count(), 2);
        assert_eq!(t.graph.edge_count(), 2);
        assert!(t.graph.is_connected());
        assert_eq!(t.graph.genus().unwrap(), 1);
    }

    #[test]
    fn even_loop_lifts_to_two_loops() {
        let data = CoverBuilder::new().vertex("u", false).edge("e", "u", "u", one(), Sign::Plus).build_data().unwrap();
        let t = data.build_total_graph();
        assert!(t.graph.is_loop(EdgeId(0)) && t.graph.is_loop(EdgeId(1)));
        assert!(!t.graph.is_connected());
        let err = CoverBuilder::new().vertex("u", false).edge("e", "u", "u", one(), Sign::Plus).build();
        assert_eq!(err, Err(Error::TrivialCover));
    }

    #[test]
    fn undilated_loop_at_dilated_vertex() {
        let c = CoverBuilder::new().vertex("w", true).edge("e", "w", "w", one(), Sign::Plus).build().unwrap();
        let t = c.build_total_graph();
        assert_eq!(t.graph.vertex_count(), 1);
        assert_eq!(t.graph.edge_count(), 2);
        assert_eq!(c.total_genus(), 2);
        assert_eq!(c.prym_dimension(), 1);
    }

    #[test]
    fn dilated_edge_has_half_length() {
        let c = CoverBuilder::new()
            .vertex("a", true)
            .vertex("b", true)
            .dilated_edge("d", "a", "b", rat(3, 1))
            .build()
            .unwrap();
        let t = c.build_total_graph();
        assert_eq!(t.lengths, vec![rat(3, 2)]);
        assert_eq!(t.local_degree(EdgeId(0)), 2);
    }

    #[test]
    fn validation_errors() {
        let bad = CoverBuilder::new()
            .vertex("a", true)
            .vertex("b", false)
            .dilated_edge("d", "a", "b", one())
            .build();
        assert_eq!(bad, Err(Error::DilatedEdgeEndpoint("d".into())));
        let bad = CoverBuilder::new().vertex("a", true).vertex("b", false).edge("e", "a", "b", one(), Sign::Minus).build();
        assert_eq!(bad, Err(Error::SignOnNonFreeEdge("e".into())));
        let bad = CoverBuilder::new().vertex("a", true).vertex("b", true).build();
        assert_eq!(bad, Err(Error::Disconnected));
        let bad = CoverBuilder::new().vertex("a", true).edge("e", "a", "a", rat(0, 1), Sign::Plus).build();
        assert_eq!(bad, Err(Error::NonPositiveLength("e".into())));
    }

    #[test]
    fn normalization_is_switching_invariant() {
        let switched = CoverBuilder::new()
            .vertex("u", false)
            .vertex("v", false)
            .edge("e1", "u", "u", one(), Sign::Minus)
            .edge("e2", "u", "v", one(), Sign::Minus)
            .edge("e3", "u", "v", one(), Sign::Plus)
            .edge("e4", "v", "v", one(), Sign::Minus)
            .build()
            .unwrap();
        assert_eq!(switched, cover_a());
    }

    #[test]
    fn cover_a_counts() {
        let c = cover_a();
        assert_eq!((c.genus(), c.total_genus(), c.prym_dimension()), (3, 5, 2));
        let (_, maps) = c.homology_maps().unwrap();
        assert_eq!(maps.pushforward.rows(), 3);
        assert_eq!(maps.pushforward.cols(), 5);
        assert_eq!(c.pushforward_kernel_chains().unwrap().len(), 2);
    }

    #[test]
    fn restriction_kinds() {
        let c = cover_a();
        let f: EdgeSet = [EdgeId(1), EdgeId(2)].into_iter().collect();
        let r = c.restrict(&f, RestrictTo::Complement);
        let kinds: Vec<ComponentKind> = r.cover.component_kinds().into_iter().map(|(_, k)| k).collect();
        assert_eq!(kinds, vec![ComponentKind::FreeNontrivial, ComponentKind::FreeNontrivial]);
        let only_e2: EdgeSet = [EdgeId(1)].into_iter().collect();
        let r = c.restrict(&only_e2, RestrictTo::Edges);
        let kinds: Vec<ComponentKind> = r.cover.component_kinds().into_iter().map(|(_, k)| k).collect();
        assert_eq!(kinds, vec![ComponentKind::Trivial]);
    }

    #[test]
    fn contracting_an_odd_loop_dilates() {
        let c = cover_a();
        let r = c.contract_cover(&[EdgeId(0)].into_iter().collect()).unwrap();
        assert!(r.cover.is_dilated_vertex(VertexId(0)));
        assert!(!r.cover.is_dilated_vertex(VertexId(1)));
        assert_eq!(r.cover.prym_dimension(), 2);
    }

    #[test]
    fn free_resolution_round_trip() {
        let c = CoverBuilder::new()
            .vertex("w", true)
            .vertex("v", false)
            .edge("f1", "w", "v", one(), Sign::Plus)
            .edge("f2", "v", "w", one(), Sign::Plus)
            .edge("f3", "v", "v", one(), Sign::Minus)
            .build()
            .unwrap();
        let (free, loops) = c.free_resolution().unwrap();
        assert!(free.is_free());
        assert_eq!(free.genus(), c.genus() + 1);
        let back = free.contract_cover(&loops).unwrap().cover;
        assert_eq!(back, c);
    }
}
