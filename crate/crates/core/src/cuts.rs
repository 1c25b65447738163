//! Two- and three-vertex cuts by brute force.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{EdgeId, Graph, VertexId};

/// A separation of the edge set at a set of cut vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutDecomposition {
    pub cut: Vec<VertexId>,
    pub left: Vec<EdgeId>,
    pub right: Vec<EdgeId>,
}

impl CutDecomposition {
    /// The side graphs, each keeping the cut vertices.
    pub fn sides(&self, g: &Graph) -> (Graph, Graph) {
        (side_graph(g, &self.left, &self.cut), side_graph(g, &self.right, &self.cut))
    }

    /// Swaps left and right.
    pub fn flipped(&self) -> CutDecomposition {
        CutDecomposition { cut: self.cut.clone(), left: self.right.clone(), right: self.left.clone() }
    }
}

fn side_graph(g: &Graph, es: &[EdgeId], cut: &[VertexId]) -> Graph {
    let mut s = g.edge_subgraph(es);
    for &v in cut {
        s.add_vertex(v);
    }
    s
}

/// Vertex subsets of size `k` whose removal disconnects the rest, with the
/// remaining components.
fn separating_sets(g: &Graph, k: usize) -> Vec<(Vec<VertexId>, Vec<Vec<VertexId>>)> {
    let vs = g.vertices();
    let mut out = Vec::new();
    if vs.len() < k + 2 {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let cut: Vec<VertexId> = idx.iter().map(|&i| vs[i]).collect();
        let comps = g.components_without(&cut);
        if comps.len() > 1 {
            out.push((cut, comps));
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < vs.len() - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertex pairs whose removal disconnects `g`.
///
/// The left side is the component containing the smallest remaining vertex
/// together with any edges joining the two cut vertices.
pub fn find_two_vertex_cuts(g: &Graph) -> Result<Vec<CutDecomposition>> {
    g.require_connected()?;
    Ok(separating_sets(g, 2)
        .into_iter()
        .map(|(cut, comps)| {
            let group: BTreeSet<VertexId> = comps[0].iter().copied().collect();
            let (left, right) = split_by_group(g, &cut, &group, true);
            CutDecomposition { cut, left, right }
        })
        .collect())
}

fn split_by_group(
    g: &Graph,
    cut: &[VertexId],
    group: &BTreeSet<VertexId>,
    cut_edges_left: bool,
) -> (Vec<EdgeId>, Vec<EdgeId>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for e in g.edges() {
        let inside = group.contains(&e.tail) || group.contains(&e.head);
        let on_cut = cut.contains(&e.tail) && cut.contains(&e.head);
        if inside || (on_cut && cut_edges_left) {
            left.push(e.id);
        } else {
            right.push(e.id);
        }
    }
    (left, right)
}

/// All vertex triples whose removal disconnects `g`, one entry per way of
/// grouping the remaining components into two nonempty sides.
///
/// Edges joining two cut vertices go to the right side. Each split is
/// listed once, with the left side holding the component of the smallest
/// remaining vertex.
pub fn find_three_vertex_cuts(g: &Graph) -> Result<Vec<CutDecomposition>> {
    g.require_connected()?;
    let mut out = Vec::new();
    for (cut, comps) in separating_sets(g, 3) {
        let c = comps.len();
        if c > 16 {
            continue;
        }
        for mask in 0u32..(1 << (c - 1)) {
            // component 0 always on the left
            let group: BTreeSet<VertexId> = comps
                .iter()
                .enumerate()
                .filter(|(i, _)| *i == 0 || (mask >> (i - 1)) & 1 == 1)
                .flat_map(|(_, comp)| comp.iter().copied())
                .collect();
            if group.len() == comps.iter().map(Vec::len).sum::<usize>() {
                continue;
            }
            let (left, right) = split_by_group(g, &cut, &group, false);
            out.push(CutDecomposition { cut: cut.clone(), left, right });
        }
    }
    Ok(out)
}

/// Whether some pair of vertices disconnects `g`.
pub fn is_two_vertex_reducible(g: &Graph) -> bool {
    !separating_sets(g, 2).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::from_pairs(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    }

    fn k34() -> Graph {
        let mut pairs = Vec::new();
        for a in 1..=3 {
            for b in 4..=7 {
                pairs.push((a, b));
            }
        }
        Graph::from_pairs(&pairs)
    }

    #[test]
    fn two_cuts() {
        // Two triangles sharing the edge 1-2 plus a chord, glued at {1,2}.
        let g = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1), (2, 4), (4, 1)]);
        let cuts = find_two_vertex_cuts(&g).unwrap();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].cut, vec![1, 2]);
        assert_eq!(cuts[0].left, vec![1, 2, 3]);
        assert_eq!(cuts[0].right, vec![4, 5]);
        assert!(find_two_vertex_cuts(&k4()).unwrap().is_empty());
        assert!(find_two_vertex_cuts(&k34()).unwrap().is_empty());
    }

    #[test]
    fn three_cuts() {
        assert!(find_three_vertex_cuts(&k4()).unwrap().is_empty());
        let cuts = find_three_vertex_cuts(&k34()).unwrap();
        let balanced: Vec<_> = cuts.iter().filter(|c| c.cut == vec![1, 2, 3] && c.left.len() == 6).collect();
        assert_eq!(balanced.len(), 3);
        for c in &cuts {
            assert_eq!(c.left.len() + c.right.len(), 12);
        }
    }
}
