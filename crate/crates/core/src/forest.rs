//! Spanning trees, spanning forest polynomials and tree signs.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::partition::SetPartition;
use crate::poly::{Monomial, Poly};

const NO_COLOUR: u8 = u8::MAX;

struct ForestSearch<'a> {
    ends: Vec<(usize, usize)>,
    target: usize,
    out: &'a mut Vec<u64>,
}

impl ForestSearch<'_> {
    /// `comp[v]` labels the component of vertex index `v`; `colour[c]` the part in component `c`.
    fn run(&mut self, i: usize, included: usize, excluded: u64, comp: &mut Vec<u8>, colour: &mut Vec<u8>) {
        let remaining = self.ends.len() - i;
        if included + remaining < self.target {
            return;
        }
        if i == self.ends.len() {
            self.out.push(excluded);
            return;
        }
        let (a, b) = self.ends[i];
        let (ca, cb) = (comp[a], comp[b]);
        if included < self.target && ca != cb {
            let (ka, kb) = (colour[ca as usize], colour[cb as usize]);
            if ka == NO_COLOUR || kb == NO_COLOUR || ka == kb {
                let mut comp2 = comp.clone();
                let mut colour2 = colour.clone();
                for c in comp2.iter_mut() {
                    if *c == cb {
                        *c = ca;
                    }
                }
                if ka == NO_COLOUR {
                    colour2[ca as usize] = kb;
                }
                self.run(i + 1, included + 1, excluded, &mut comp2, &mut colour2);
            }
        }
        self.run(i + 1, included, excluded | (1 << i), comp, colour);
    }
}

/// Bitmasks (by edge index) of edges *outside* each compatible spanning forest.
fn forest_complements(g: &Graph, parts: &[Vec<VertexId>]) -> Result<Vec<u64>> {
    if g.num_edges() > 64 {
        return Err(Error::TooManyEdges(g.num_edges()));
    }
    let nv = g.num_vertices();
    if parts.len() > nv {
        return Ok(Vec::new());
    }
    let mut colour = vec![NO_COLOUR; nv];
    for (k, p) in parts.iter().enumerate() {
        for &v in p {
            colour[g.vertex_index(v)?] = k as u8;
        }
    }
    let mut comp: Vec<u8> = (0..nv as u8).collect();
    let ends = g.edges().iter().map(|e| (g.vertex_index(e.tail).unwrap(), g.vertex_index(e.head).unwrap())).collect();
    let mut out = Vec::new();
    let mut search = ForestSearch { ends, target: nv - parts.len(), out: &mut out };
    search.run(0, 0, 0, &mut comp, &mut colour);
    out.sort_unstable();
    Ok(out)
}

fn mask_poly(g: &Graph, masks: &[u64]) -> Poly {
    let ids = g.edge_ids();
    Poly::from_terms(masks.iter().map(|&m| {
        let vars = ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &e)| (e, 1));
        (1.into(), Monomial::from_powers(vars))
    }))
}

/// All spanning trees as sorted edge-id lists.
pub fn spanning_trees(g: &Graph) -> Result<Vec<Vec<EdgeId>>> {
    g.require_connected()?;
    let ids = g.edge_ids();
    let first = vec![vec![g.vertices()[0]]];
    let mut trees: Vec<Vec<EdgeId>> = forest_complements(g, &first)?
        .into_iter()
        .map(|m| {
            let mut t: Vec<EdgeId> = ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 0).map(|(_, &e)| e).collect();
            t.sort_unstable();
            t
        })
        .collect();
    trees.sort();
    Ok(trees)
}

/// Kirchhoff polynomial: sum over spanning trees of the product of non-tree edge variables.
pub fn psi(g: &Graph) -> Result<Poly> {
    g.require_connected()?;
    let first = vec![vec![g.vertices()[0]]];
    Ok(mask_poly(g, &forest_complements(g, &first)?))
}

/// Spanning forest polynomial: forests with one tree per part, each tree
/// meeting exactly its own part among the marked vertices.
pub fn phi(g: &Graph, p: &SetPartition) -> Result<Poly> {
    if p.is_empty() {
        return Err(Error::InvalidPartition("partition has no parts".into()));
    }
    for v in p.vertices() {
        g.vertex_index(v)?;
    }
    Ok(mask_poly(g, &forest_complements(g, p.parts())?))
}

/// Shorthand for [`phi`] with a partition given as slices.
pub fn phi_parts(g: &Graph, parts: &[&[VertexId]]) -> Result<Poly> {
    phi(g, &SetPartition::new(parts.iter().map(|p| p.to_vec()).collect())?)
}

/// A tree with a root, edges labelled `1..=n` in list order and non-root
/// vertices labelled `1..=n` in `vertex_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedNumberedTree {
    pub edges: Vec<Edge>,
    pub root: VertexId,
    pub vertex_order: Vec<VertexId>,
}

impl RootedNumberedTree {
    /// Numbers edges as given and non-root vertices by increasing id.
    pub fn new(edges: Vec<Edge>, root: VertexId) -> Result<Self> {
        let mut vs: Vec<VertexId> = edges.iter().flat_map(|e| [e.tail, e.head]).filter(|&v| v != root).collect();
        vs.sort_unstable();
        vs.dedup();
        let t = RootedNumberedTree { edges, root, vertex_order: vs };
        t.farthest_ends()?;
        Ok(t)
    }

    /// For each edge, its endpoint farther from the root.
    fn farthest_ends(&self) -> Result<Vec<VertexId>> {
        let n = self.edges.len();
        if self.vertex_order.len() != n {
            return Err(Error::MalformedTree(format!("{n} edges but {} non-root vertices", self.vertex_order.len())));
        }
        if self.vertex_order.contains(&self.root) {
            return Err(Error::MalformedTree("root is numbered".into()));
        }
        let mut depth: HashMap<VertexId, usize> = HashMap::new();
        depth.insert(self.root, 0);
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                match (depth.get(&e.tail).copied(), depth.get(&e.head).copied()) {
                    (Some(d), None) => {
                        depth.insert(e.head, d + 1);
                        changed = true;
                    }
                    (None, Some(d)) => {
                        depth.insert(e.tail, d + 1);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        let mut out = Vec::with_capacity(n);
        for e in &self.edges {
            let (dt, dh) = match (depth.get(&e.tail), depth.get(&e.head)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => return Err(Error::MalformedTree("not connected to the root".into())),
            };
            if dt.abs_diff(dh) != 1 {
                return Err(Error::MalformedTree(format!("edge {} closes a cycle", e.id)));
            }
            out.push(if dt > dh { e.tail } else { e.head });
        }
        let mut check = out.clone();
        check.sort_unstable();
        let mut order = self.vertex_order.clone();
        order.sort_unstable();
        if check != order {
            return Err(Error::MalformedTree("vertex numbering does not match the tree".into()));
        }
        Ok(out)
    }
}

/// `sgn(phi) * prod s(e)` where `phi` sends each edge to its endpoint farther
/// from the root and `s(e) = +1` exactly when that endpoint is the head.
pub fn tree_sign(t: &RootedNumberedTree) -> Result<i32> {
    let far = t.farthest_ends()?;
    let label: HashMap<VertexId, usize> = t.vertex_order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let perm: Vec<usize> = far.iter().map(|v| label[v]).collect();
    let mut sign = permutation_sign(&perm);
    for (e, &v) in t.edges.iter().zip(&far) {
        if v != e.head {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Sign of a permutation of `0..n` given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_det;
    use crate::poly::{edge_var_name, parse_poly};

    fn p(s: &str) -> Poly {
        parse_poly(s, &edge_var_name).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)])
    }

    fn w3() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
    }

    #[test]
    fn tree_counts() {
        assert_eq!(spanning_trees(&triangle()).unwrap().len(), 3);
        let path = Graph::from_pairs(&[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(spanning_trees(&path).unwrap(), vec![vec![1, 2, 3]]);
        assert_eq!(spanning_trees(&w3()).unwrap().len(), 16);
        let disconnected = Graph::from_pairs(&[(1, 2), (3, 4)]);
        assert_eq!(spanning_trees(&disconnected), Err(Error::Disconnected));
    }

    #[test]
    fn small_kirchhoff_polynomials() {
        assert_eq!(psi(&triangle()).unwrap(), p("a1 + a2 + a3"));
        assert_eq!(psi(&Graph::from_pairs(&[(1, 2), (2, 3)])).unwrap(), Poly::one());
        assert_eq!(psi(&Graph::from_pairs(&[(1, 2), (2, 1)])).unwrap(), p("a1 + a2"));
        let g = w3();
        assert_eq!(psi(&g).unwrap(), g.psi_det().unwrap());
    }

    #[test]
    fn forest_polynomials() {
        let g = w3();
        assert_eq!(phi_parts(&g, &[&[3]]).unwrap(), psi(&g).unwrap());
        assert_eq!(phi_parts(&g, &[&[1], &[2], &[3], &[4]]).unwrap(), p("a1*a2*a3*a4*a5*a6"));
        let expected = &p("a1*a6") * &p("a2*a5 + a3*a4 + a3*a5 + a4*a5");
        assert_eq!(phi_parts(&g, &[&[1], &[2, 4]]).unwrap(), expected);
    }

    #[test]
    fn single_edge_signs() {
        let e = Edge { id: 1, tail: 1, head: 2 };
        assert_eq!(tree_sign(&RootedNumberedTree::new(vec![e], 1).unwrap()).unwrap(), 1);
        let r = Edge { id: 1, tail: 2, head: 1 };
        assert_eq!(tree_sign(&RootedNumberedTree::new(vec![r], 1).unwrap()).unwrap(), -1);
    }

    #[test]
    fn sign_matches_incidence_determinant() {
        // Path 1-2-3-4 with mixed orientations rooted at 4.
        let edges =
            vec![Edge { id: 1, tail: 1, head: 2 }, Edge { id: 2, tail: 3, head: 2 }, Edge { id: 3, tail: 3, head: 4 }];
        let t = RootedNumberedTree::new(edges.clone(), 4).unwrap();
        let g = Graph::new(vec![], edges).unwrap();
        let d = int_det(&g.reduced_incidence(4, &[]).unwrap());
        let n = 3;
        assert_eq!(i64::from(tree_sign(&t).unwrap()) * if n % 2 == 0 { 1 } else { -1 }, i64::try_from(d).unwrap());
    }

    #[test]
    fn malformed_trees() {
        let cyc =
            vec![Edge { id: 1, tail: 1, head: 2 }, Edge { id: 2, tail: 2, head: 3 }, Edge { id: 3, tail: 3, head: 1 }];
        assert!(RootedNumberedTree::new(cyc, 1).is_err());
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}
