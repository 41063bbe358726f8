//! Finite graphs with loops and multi-edges in half-edge form.
//!
//! Edge `e` owns half-edges `2e` and `2e + 1`; the involution swaps them. The
//! first half-edge is the tail of the stored orientation.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::IntMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdgeId(pub usize);

impl EdgeId {
    pub fn tail(self) -> HalfEdgeId {
        HalfEdgeId(2 * self.0)
    }

    pub fn head(self) -> HalfEdgeId {
        HalfEdgeId(2 * self.0 + 1)
    }
}

impl HalfEdgeId {
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    pub fn opposite(self) -> HalfEdgeId {
        HalfEdgeId(self.0 ^ 1)
    }

    pub fn is_tail(self) -> bool {
        self.0 % 2 == 0
    }
}

/// Ordered set of edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSet(BTreeSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        self.0.remove(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

/// Integer 1-chain, one coefficient per edge.
pub type Chain = Vec<BigInt>;

/// A sign `o(h)` per half-edge, with `o(h) = -o(ι(h))`. `-1` marks the tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    signs: Vec<i8>,
}

impl Orientation {
    /// The stored orientation: first half-edge is the tail.
    pub fn canonical(g: &HalfEdgeGraph) -> Self {
        Orientation { signs: (0..2 * g.edge_count()).map(|h| if h % 2 == 0 { -1 } else { 1 }).collect() }
    }

    /// The stored orientation with the listed edges reversed.
    pub fn reversing(g: &HalfEdgeGraph, reversed: &EdgeSet) -> Self {
        let mut o = Orientation::canonical(g);
        for e in reversed.iter() {
            o.signs[e.tail().0] = 1;
            o.signs[e.head().0] = -1;
        }
        o
    }

    pub fn from_signs(g: &HalfEdgeGraph, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != 2 * g.edge_count() {
            return Err(Error::LengthMismatch { expected: 2 * g.edge_count(), found: signs.len() });
        }
        for h in 0..signs.len() {
            if !matches!(signs[h], 1 | -1) || signs[h] != -signs[h ^ 1] {
                return Err(Error::InvalidOrientation(h));
            }
        }
        Ok(Orientation { signs })
    }

    pub fn half_edge_count(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, h: HalfEdgeId) -> i8 {
        self.signs[h.0]
    }

    /// Half-edge at which the edge starts.
    pub fn tail_of(&self, e: EdgeId) -> HalfEdgeId {
        if self.signs[e.tail().0] < 0 {
            e.tail()
        } else {
            e.head()
        }
    }

    pub fn is_reversed(&self, e: EdgeId) -> bool {
        self.signs[e.tail().0] > 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HalfEdgeGraph {
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    roots: Vec<VertexId>,
}

/// Result of contracting a set of edges.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: HalfEdgeGraph,
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<Option<EdgeId>>,
}

/// A subgraph together with the maps from the parent's ids.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: HalfEdgeGraph,
    pub vertex_map: Vec<Option<VertexId>>,
    pub edge_map: Vec<Option<EdgeId>>,
}

/// Spanning forest with BFS parent pointers.
#[derive(Clone, Debug)]
pub struct SpanningForest {
    pub edges: EdgeSet,
    parent: Vec<Option<HalfEdgeId>>,
    depth: Vec<usize>,
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

impl HalfEdgeGraph {
    pub fn new() -> Self {
        HalfEdgeGraph::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        self.vertex_labels.push(label.into());
        VertexId(self.vertex_labels.len() - 1)
    }

    pub fn add_edge(&mut self, label: impl Into<String>, tail: VertexId, head: VertexId) -> EdgeId {
        assert!(tail.0 < self.vertex_count() && head.0 < self.vertex_count(), "edge endpoint out of range");
        self.edge_labels.push(label.into());
        self.roots.push(tail);
        self.roots.push(head);
        EdgeId(self.edge_labels.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_labels.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn vertex_label(&self, v: VertexId) -> &str {
        &self.vertex_labels[v.0]
    }

    pub fn edge_label(&self, e: EdgeId) -> &str {
        &self.edge_labels[e.0]
    }

    pub fn find_vertex(&self, label: &str) -> Option<VertexId> {
        self.vertex_labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn find_edge(&self, label: &str) -> Option<EdgeId> {
        self.edge_labels.iter().position(|l| l == label).map(EdgeId)
    }

    pub fn root(&self, h: HalfEdgeId) -> VertexId {
        self.roots[h.0]
    }

    pub fn involution(&self, h: HalfEdgeId) -> HalfEdgeId {
        h.opposite()
    }

    /// `(tail, head)` in the stored orientation.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.roots[e.tail().0], self.roots[e.head().0])
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (a, b) = self.endpoints(e);
        a == b
    }

    /// Half-edges rooted at `v`.
    pub fn tangent_space(&self, v: VertexId) -> impl Iterator<Item = HalfEdgeId> + '_ {
        self.roots.iter().enumerate().filter(move |&(_, &r)| r == v).map(|(h, _)| HalfEdgeId(h))
    }

    /// Number of half-edges at `v` (a loop counts twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.roots.iter().filter(|&&r| r == v).count()
    }

    /// Component index of every vertex using only edges accepted by `keep`.
    /// Components are numbered by their smallest vertex.
    pub fn component_map(&self, keep: impl Fn(EdgeId) -> bool) -> (Vec<usize>, usize) {
        let mut ds = DisjointSets::new(self.vertex_count());
        for e in self.edges().filter(|&e| keep(e)) {
            let (a, b) = self.endpoints(e);
            ds.union(a.0, b.0);
        }
        let mut index = vec![usize::MAX; self.vertex_count()];
        let mut count = 0;
        let mut map = vec![0; self.vertex_count()];
        for v in 0..self.vertex_count() {
            let r = ds.find(v);
            if index[r] == usize::MAX {
                index[r] = count;
                count += 1;
            }
            map[v] = index[r];
        }
        (map, count)
    }

    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let (map, count) = self.component_map(|_| true);
        let mut out = vec![Vec::new(); count];
        for v in self.vertices() {
            out[map[v.0]].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.component_map(|_| true).1 == 1
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn betti_number(&self) -> usize {
        let c = self.component_map(|_| true).1;
        self.edge_count() + c - self.vertex_count()
    }

    /// Genus of a connected graph.
    pub fn genus(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.betti_number())
    }

    pub fn is_bridge(&self, e: EdgeId) -> bool {
        if self.is_loop(e) {
            return false;
        }
        let (map, _) = self.component_map(|f| f != e);
        let (a, b) = self.endpoints(e);
        map[a.0] != map[b.0]
    }

    /// Contracts every edge of `f`. Merged vertices are labelled by their
    /// sorted member labels joined with `|`.
    pub fn contract_edges(&self, f: &EdgeSet) -> Contraction {
        let (map, count) = self.component_map(|e| f.contains(e));
        let mut members: Vec<Vec<&str>> = vec![Vec::new(); count];
        for v in self.vertices() {
            members[map[v.0]].push(self.vertex_label(v));
        }
        let mut graph = HalfEdgeGraph::new();
        for mut m in members {
            m.sort_unstable();
            graph.add_vertex(m.join("|"));
        }
        let mut edge_map = vec![None; self.edge_count()];
        for e in self.edges().filter(|&e| !f.contains(e)) {
            let (a, b) = self.endpoints(e);
            edge_map[e.0] = Some(graph.add_edge(self.edge_label(e), VertexId(map[a.0]), VertexId(map[b.0])));
        }
        Contraction { graph, vertex_map: map.into_iter().map(VertexId).collect(), edge_map }
    }

    /// Removes the edges of `f`, keeping every vertex.
    pub fn delete_edges(&self, f: &EdgeSet) -> Subgraph {
        let keep: Vec<bool> = self.vertices().map(|_| true).collect();
        self.subgraph(&keep, |e| !f.contains(e))
    }

    /// The subgraph formed by the edges of `f` and their endpoints.
    pub fn induced_by_edges(&self, f: &EdgeSet) -> Subgraph {
        let mut keep = vec![false; self.vertex_count()];
        for e in f.iter() {
            let (a, b) = self.endpoints(e);
            keep[a.0] = true;
            keep[b.0] = true;
        }
        self.subgraph(&keep, |e| f.contains(e))
    }

    fn subgraph(&self, keep_vertex: &[bool], keep_edge: impl Fn(EdgeId) -> bool) -> Subgraph {
        let mut graph = HalfEdgeGraph::new();
        let mut vertex_map = vec![None; self.vertex_count()];
        for v in self.vertices().filter(|v| keep_vertex[v.0]) {
            vertex_map[v.0] = Some(graph.add_vertex(self.vertex_label(v)));
        }
        let mut edge_map = vec![None; self.edge_count()];
        for e in self.edges().filter(|&e| keep_edge(e)) {
            let (a, b) = self.endpoints(e);
            let (Some(na), Some(nb)) = (vertex_map[a.0], vertex_map[b.0]) else {
                panic!("subgraph edge with a removed endpoint");
            };
            edge_map[e.0] = Some(graph.add_edge(self.edge_label(e), na, nb));
        }
        Subgraph { graph, vertex_map, edge_map }
    }

    /// Vertex-by-edge incidence matrix: the column of `e` holds `o(h)` at the
    /// root of each of its half-edges.
    pub fn boundary_matrix(&self, o: &Orientation) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertex_count(), self.edge_count());
        for h in 0..2 * self.edge_count() {
            let h = HalfEdgeId(h);
            m[(self.root(h).0, h.edge().0)] += BigInt::from(o.sign(h));
        }
        m
    }

    /// BFS spanning forest, roots taken in vertex order, edges in id order.
    pub fn spanning_forest(&self) -> SpanningForest {
        let n = self.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut edges = EdgeSet::new();
        let mut incident: Vec<Vec<HalfEdgeId>> = vec![Vec::new(); n];
        for h in 0..2 * self.edge_count() {
            incident[self.roots[h].0].push(HalfEdgeId(h));
        }
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &h in &incident[v] {
                    let w = self.root(h.opposite()).0;
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(h.opposite());
                        depth[w] = depth[v] + 1;
                        edges.insert(h.edge());
                        queue.push_back(w);
                    }
                }
            }
        }
        SpanningForest { edges, parent, depth }
    }

    pub fn spanning_tree(&self) -> Result<EdgeSet> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.spanning_forest().edges)
    }

    /// Fundamental cycles of the BFS spanning forest, one per non-forest edge,
    /// in the stored orientation. They form a basis of `H_1`, and the
    /// coordinates of a cycle in this basis are its coefficients on the
    /// non-forest edges.
    pub fn cycle_space_basis(&self) -> (Vec<Chain>, Vec<EdgeId>) {
        let forest = self.spanning_forest();
        let mut basis = Vec::new();
        let mut chords = Vec::new();
        for e in self.edges().filter(|&e| !forest.edges.contains(e)) {
            let mut chain = vec![BigInt::zero(); self.edge_count()];
            chain[e.0] += 1;
            let (a, b) = self.endpoints(e);
            self.add_tree_path(&forest, b, a, &mut chain);
            basis.push(chain);
            chords.push(e);
        }
        (basis, chords)
    }

    /// Cycle basis of a connected graph, expressed in the orientation `o`.
    pub fn cycle_basis(&self, o: &Orientation) -> Result<Vec<Chain>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let (mut basis, _) = self.cycle_space_basis();
        for chain in &mut basis {
            for e in self.edges().filter(|&e| o.is_reversed(e)) {
                chain[e.0] = -core::mem::take(&mut chain[e.0]);
            }
        }
        Ok(basis)
    }

    /// Adds the forest path from `from` to `to` to `chain`.
    fn add_tree_path(&self, forest: &SpanningForest, from: VertexId, to: VertexId, chain: &mut Chain) {
        let (mut x, mut y) = (from.0, to.0);
        // Walking up from `x` follows the path forwards; walking up from `y`
        // follows it backwards.
        while x != y {
            if forest.depth[x] >= forest.depth[y] {
                let h = forest.parent[x].expect("vertices in different trees");
                // h is rooted at x and points to the parent.
                chain[h.edge().0] += if h.is_tail() { 1 } else { -1 };
                x = self.root(h.opposite()).0;
            } else {
                let h = forest.parent[y].expect("vertices in different trees");
                chain[h.edge().0] -= if h.is_tail() { 1 } else { -1 };
                y = self.root(h.opposite()).0;
            }
        }
    }
}
