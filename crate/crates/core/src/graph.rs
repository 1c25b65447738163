//! Oriented multigraphs, minors and the matrices built from them.
//!
//! Vertices are kept sorted by id; that order fixes the removed column of
//! the incidence matrix and the root conventions. Edges keep insertion order.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;

pub type EdgeId = u32;
pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.tail == v || self.head == v
    }

    /// The endpoint opposite `v` (for loops, `v` itself).
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// Finite oriented multigraph; parallel edges and self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Graph> {
        Graph::new(r.vertices, r.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> RawGraph {
        RawGraph { vertices: g.vertices, edges: g.edges }
    }
}

/// Result of contracting an edge: contracting a self-loop gives zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contraction {
    Graph(Graph),
    Zero,
}

impl Contraction {
    pub fn into_graph(self) -> Option<Graph> {
        match self {
            Contraction::Graph(g) => Some(g),
            Contraction::Zero => None,
        }
    }
}

impl Graph {
    /// Builds a graph; endpoints missing from `vertices` are added.
    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Graph> {
        let mut vs: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id) {
                return Err(Error::DuplicateEdge(e.id));
            }
            vs.insert(e.tail);
            vs.insert(e.head);
        }
        Ok(Graph { vertices: vs.into_iter().collect(), edges })
    }

    /// Graph from `(id, tail, head)` triples.
    pub fn from_edges(edges: &[(EdgeId, VertexId, VertexId)]) -> Result<Graph> {
        Graph::new(Vec::new(), edges.iter().map(|&(id, tail, head)| Edge { id, tail, head }).collect())
    }

    /// Graph from `(tail, head)` pairs with edge ids 1, 2, ...
    pub fn from_pairs(pairs: &[(VertexId, VertexId)]) -> Graph {
        let edges: Vec<_> = pairs.iter().enumerate().map(|(i, &(t, h))| (i as EdgeId + 1, t, h)).collect();
        Graph::from_edges(&edges).expect("sequential ids are distinct")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// First Betti number `e - v + components`.
    pub fn loops(&self) -> usize {
        self.edges.len() + self.components().len() - self.vertices.len()
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges.iter().find(|e| e.id == id).ok_or(Error::UnknownEdge(id))
    }

    pub fn has_edge(&self, id: EdgeId) -> bool {
        self.edges.iter().any(|e| e.id == id)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn vertex_index(&self, v: VertexId) -> Result<usize> {
        self.vertices.binary_search(&v).map_err(|_| Error::UnknownVertex(v))
    }

    pub fn edge_index(&self, id: EdgeId) -> Result<usize> {
        self.edges.iter().position(|e| e.id == id).ok_or(Error::UnknownEdge(id))
    }

    pub fn max_edge_id(&self) -> EdgeId {
        self.edges.iter().map(|e| e.id).max().unwrap_or(0)
    }

    pub fn max_vertex_id(&self) -> VertexId {
        self.vertices.last().copied().unwrap_or(0)
    }

    /// Number of edge ends at `v`; a self-loop counts twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().map(|e| (e.tail == v) as usize + (e.head == v) as usize).sum()
    }

    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges.iter().filter(|e| e.touches(v)).map(|e| e.id).collect()
    }

    pub fn neighbours(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.edges.iter().filter(|e| e.touches(v) && !e.is_loop()).map(|e| e.other(v)).collect()
    }

    /// Deletes `e` and any vertices left isolated.
    pub fn delete_edge(&self, e: EdgeId) -> Result<Graph> {
        let g = self.delete_edge_keep_vertices(e)?;
        let used: BTreeSet<VertexId> = g.edges.iter().flat_map(|x| [x.tail, x.head]).collect();
        Ok(Graph { vertices: used.into_iter().collect(), edges: g.edges })
    }

    /// Deletes `e` but keeps its endpoints even if they become isolated.
    pub fn delete_edge_keep_vertices(&self, e: EdgeId) -> Result<Graph> {
        let idx = self.edge_index(e)?;
        let mut g = self.clone();
        g.edges.remove(idx);
        Ok(g)
    }

    pub fn delete_edges_keep_vertices(&self, es: &[EdgeId]) -> Result<Graph> {
        for &e in es {
            self.edge_index(e)?;
        }
        let mut g = self.clone();
        g.edges.retain(|x| !es.contains(&x.id));
        Ok(g)
    }

    /// Identifies the ends of `e` (keeping the smaller vertex id) and removes `e`.
    pub fn contract_edge(&self, e: EdgeId) -> Result<Contraction> {
        let edge = *self.edge(e)?;
        if edge.is_loop() {
            return Ok(Contraction::Zero);
        }
        Ok(Contraction::Graph(self.identify_vertices(edge.tail, edge.head).delete_edge_keep_vertices(e)?))
    }

    /// Contracts several edges in turn; `None` if any becomes a self-loop.
    pub fn contract_edges(&self, es: &[EdgeId]) -> Result<Option<Graph>> {
        let mut g = self.clone();
        for &e in es {
            match g.contract_edge(e)? {
                Contraction::Graph(h) => g = h,
                Contraction::Zero => return Ok(None),
            }
        }
        Ok(Some(g))
    }

    /// Merges `b` into `a` (the survivor is the smaller id); edges keep their ids.
    pub fn identify_vertices(&self, a: VertexId, b: VertexId) -> Graph {
        if a == b {
            return self.clone();
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        let edges = self
            .edges
            .iter()
            .map(|x| Edge {
                id: x.id,
                tail: if x.tail == gone { keep } else { x.tail },
                head: if x.head == gone { keep } else { x.head },
            })
            .collect();
        let vertices = self.vertices.iter().copied().filter(|&v| v != gone).collect();
        Graph { vertices, edges }
    }

    /// Subgraph on the given edges, keeping only their endpoints as vertices.
    pub fn edge_subgraph(&self, es: &[EdgeId]) -> Graph {
        let edges: Vec<Edge> = self.edges.iter().filter(|x| es.contains(&x.id)).copied().collect();
        Graph::new(Vec::new(), edges).expect("subgraph of a valid graph")
    }

    /// Renames edge ids through `f`.
    pub fn relabel_edges(&self, f: impl Fn(EdgeId) -> EdgeId) -> Result<Graph> {
        let edges = self.edges.iter().map(|x| Edge { id: f(x.id), ..*x }).collect();
        Graph::new(self.vertices.clone(), edges)
    }

    /// Renames vertex ids through `f` (which must be injective).
    pub fn relabel_vertices(&self, f: impl Fn(VertexId) -> VertexId) -> Graph {
        let vertices = self.vertices.iter().map(|&v| f(v)).collect();
        let edges = self.edges.iter().map(|x| Edge { id: x.id, tail: f(x.tail), head: f(x.head) }).collect();
        Graph::new(vertices, edges).expect("relabelling keeps ids distinct")
    }

    /// Reverses the orientation of edge `e`.
    pub fn reverse_edge(&self, e: EdgeId) -> Result<Graph> {
        let idx = self.edge_index(e)?;
        let mut g = self.clone();
        let x = &mut g.edges[idx];
        std::mem::swap(&mut x.tail, &mut x.head);
        Ok(g)
    }

    /// Appends an edge with a fresh id and returns that id.
    pub fn add_edge(&mut self, tail: VertexId, head: VertexId) -> EdgeId {
        let id = self.max_edge_id() + 1;
        self.push_edge(Edge { id, tail, head }).expect("fresh id");
        id
    }

    pub fn push_edge(&mut self, e: Edge) -> Result<()> {
        if self.has_edge(e.id) {
            return Err(Error::DuplicateEdge(e.id));
        }
        for v in [e.tail, e.head] {
            if let Err(pos) = self.vertices.binary_search(&v) {
                self.vertices.insert(pos, v);
            }
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        if let Err(pos) = self.vertices.binary_search(&v) {
            self.vertices.insert(pos, v);
        }
    }

    /// Glues `other` onto `self`, identifying each `(u_other, v_self)` pair in `glue`.
    ///
    /// Other vertices and all edges of `other` receive fresh ids above the
    /// current maxima. Returns the joined graph and the edge-id map for `other`.
    pub fn glue(&self, other: &Graph, glue: &[(VertexId, VertexId)]) -> (Graph, HashMap<EdgeId, EdgeId>) {
        let vmap: HashMap<VertexId, VertexId> = glue.iter().copied().collect();
        let mut next_v = self.max_vertex_id() + 1;
        let mut fresh = HashMap::new();
        for &v in &other.vertices {
            if !vmap.contains_key(&v) {
                fresh.insert(v, next_v);
                next_v += 1;
            }
        }
        let map_v = |v: VertexId| vmap.get(&v).or_else(|| fresh.get(&v)).copied().unwrap();
        let mut g = self.clone();
        let mut emap = HashMap::new();
        for (next_e, x) in (self.max_edge_id() + 1..).zip(&other.edges) {
            g.push_edge(Edge { id: next_e, tail: map_v(x.tail), head: map_v(x.head) }).expect("fresh id");
            emap.insert(x.id, next_e);
        }
        for &v in &other.vertices {
            g.add_vertex(map_v(v));
        }
        (g, emap)
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.components_without(&[])
    }

    /// Components after removing the given vertices (and their edges).
    pub fn components_without(&self, removed: &[VertexId]) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            if removed.contains(&e.tail) || removed.contains(&e.head) {
                continue;
            }
            let a = self.vertices.binary_search(&e.tail).unwrap();
            let b = self.vertices.binary_search(&e.head).unwrap();
            uf.union(a, b);
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
        for (i, &v) in self.vertices.iter().enumerate() {
            if !removed.contains(&v) {
                groups.entry(uf.find(i)).or_default().push(v);
            }
        }
        let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Incidence entry: +1 if `e` begins at `v`, -1 if it ends there, 0 otherwise or for loops.
    pub fn incidence(e: &Edge, v: VertexId) -> i64 {
        if e.is_loop() {
            0
        } else if e.tail == v {
            1
        } else if e.head == v {
            -1
        } else {
            0
        }
    }

    /// Incidence matrix with column `removed_vertex` and the rows `removed_rows` dropped.
    ///
    /// Rows follow edge order and columns follow vertex order.
    pub fn reduced_incidence(&self, removed_vertex: VertexId, removed_rows: &[EdgeId]) -> Result<Vec<Vec<i64>>> {
        self.vertex_index(removed_vertex)?;
        for &e in removed_rows {
            self.edge_index(e)?;
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| !removed_rows.contains(&e.id))
            .map(|e| self.vertices.iter().filter(|&&v| v != removed_vertex).map(|&v| Graph::incidence(e, v)).collect())
            .collect())
    }

    /// Default removed vertex: the last in vertex order.
    pub fn default_removed_vertex(&self) -> Result<VertexId> {
        self.vertices.last().copied().ok_or(Error::EmptyGraph)
    }

    /// `M_G = [[A, E], [-E^T, 0]]` with the column of `removed_vertex` dropped from `E`.
    ///
    /// Row/column `i < e_G` is edge `i` in edge order; `A` is diagonal in the edge variables.
    pub fn m_matrix(&self, removed_vertex: VertexId) -> Result<PolyMatrix> {
        let inc = self.reduced_incidence(removed_vertex, &[])?;
        let ne = self.edges.len();
        let nv = self.vertices.len() - 1;
        let mut m = PolyMatrix::zeros(ne + nv);
        for (i, e) in self.edges.iter().enumerate() {
            m.rows[i][i] = Poly::var(e.id);
            for (j, &x) in inc[i].iter().enumerate() {
                if x != 0 {
                    m.rows[i][ne + j] = Poly::constant(x);
                    m.rows[ne + j][i] = Poly::constant(-x);
                }
            }
        }
        Ok(m)
    }

    /// Edges sharing both endpoints with an earlier edge, as `(earlier, later)` pairs.
    pub fn parallel_pairs(&self) -> Vec<(EdgeId, EdgeId)> {
        let mut out = Vec::new();
        for (i, a) in self.edges.iter().enumerate() {
            for b in &self.edges[i + 1..] {
                if !a.is_loop()
                    && !b.is_loop()
                    && (a.tail.min(a.head), a.tail.max(a.head)) == (b.tail.min(b.head), b.tail.max(b.head))
                {
                    out.push((a.id, b.id));
                }
            }
        }
        out
    }

    /// All triangles as sorted edge-id triples on three distinct vertices.
    pub fn triangles(&self) -> Vec<[EdgeId; 3]> {
        let mut out = Vec::new();
        let es = &self.edges;
        for i in 0..es.len() {
            for j in i + 1..es.len() {
                for k in j + 1..es.len() {
                    let (a, b, c) = (&es[i], &es[j], &es[k]);
                    if a.is_loop() || b.is_loop() || c.is_loop() {
                        continue;
                    }
                    let vs: BTreeSet<VertexId> = [a.tail, a.head, b.tail, b.head, c.tail, c.head].into_iter().collect();
                    if vs.len() != 3 {
                        continue;
                    }
                    let distinct = |x: &Edge, y: &Edge| {
                        (x.tail.min(x.head), x.tail.max(x.head)) != (y.tail.min(y.head), y.tail.max(y.head))
                    };
                    if distinct(a, b) && distinct(b, c) && distinct(a, c) {
                        let mut t = [a.id, b.id, c.id];
                        t.sort_unstable();
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Kirchhoff polynomial `det(M_G)`, sign-normalized.
    pub fn psi_det(&self) -> Result<Poly> {
        let v = self.default_removed_vertex()?;
        Ok(self.m_matrix(v)?.determinant().normalize_sign())
    }
}

/// Plain union-find over indices.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_det;
    use num_bigint::BigInt;

    fn triangle() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)])
    }

    fn w3() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
    }

    #[test]
    fn delete_from_triangle() {
        let g = triangle().delete_edge(1).unwrap();
        assert_eq!(g.edge_ids(), vec![2, 3]);
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.loops(), 0);
    }

    #[test]
    fn delete_only_edge_leaves_empty_graph() {
        let g = Graph::from_pairs(&[(1, 2)]).delete_edge(1).unwrap();
        assert_eq!(g.num_vertices(), 0);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn delete_rim_of_w3() {
        let g = w3().delete_edge(3).unwrap();
        assert_eq!(g.num_edges(), 5);
        assert_eq!(g.loops(), 2);
    }

    #[test]
    fn contractions() {
        let g = triangle().contract_edge(1).unwrap().into_graph().unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.parallel_pairs(), vec![(2, 3)]);

        let l = Graph::from_edges(&[(1, 1, 1), (2, 1, 2)]).unwrap();
        assert_eq!(l.contract_edge(1).unwrap(), Contraction::Zero);

        let c = w3().contract_edge(6).unwrap().into_graph().unwrap();
        assert_eq!(c.num_edges(), 5);
        assert_eq!(c.parallel_pairs().len(), 2);
        assert!(matches!(w3().contract_edge(9), Err(Error::UnknownEdge(9))));
    }

    #[test]
    fn single_edge_incidence() {
        let g = Graph::from_pairs(&[(1, 2)]);
        assert_eq!(g.reduced_incidence(2, &[]).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn spanning_tree_determinants() {
        let g = w3();
        let ids = g.edge_ids();
        let mut trees = 0;
        for mask in 0u32..(1 << ids.len()) {
            if mask.count_ones() as usize != g.num_vertices() - 1 {
                continue;
            }
            let removed: Vec<EdgeId> =
                ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &e)| e).collect();
            let d = int_det(&g.reduced_incidence(4, &removed).unwrap());
            let kept: Vec<EdgeId> = ids.iter().copied().filter(|e| !removed.contains(e)).collect();
            let is_tree = g.edge_subgraph(&kept).num_vertices() == 4 && g.edge_subgraph(&kept).is_connected();
            if is_tree {
                trees += 1;
                assert!(d == BigInt::from(1) || d == BigInt::from(-1));
            } else {
                assert_eq!(d, BigInt::from(0));
            }
        }
        assert_eq!(trees, 16);
    }

    #[test]
    fn triangle_kirchhoff() {
        assert_eq!(triangle().psi_det().unwrap().to_string(), "a1 + a2 + a3");
    }

    #[test]
    fn serde_round_trip() {
        let g = w3();
        let s = serde_json::to_string(&g).unwrap();
        let h: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn glue_two_triangles() {
        let t = triangle();
        let (g, map) = t.glue(&t, &[(1, 1), (2, 2)]);
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 6);
        assert_eq!(map[&1], 4);
    }
}
