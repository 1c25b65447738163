//! Double-triangle sites and the split/contract rewrite between `G` and `G'`.
//!
//! Edge roles in `G'`, with hub `X` and inner vertex `E`:
//!
//! ```text
//! 1: X-B   2: X-E   3: B-E   4: X-A   5: E-D   6: X-C   7: C-E
//! ```
//!
//! Contracting gives `G`: edges 2, 3, 7 and the vertex `E` disappear, edge 5
//! moves to `X-D` and a new edge 2 joins `B-C`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SiteKind {
    /// The full seven-edge pattern.
    Full,
    /// Edge 4 absent: the hub is 3-valent.
    ThreeValentHub,
    /// Edges 6 and 7 absent: one triangle with two 3-valent vertices.
    SingleTriangle,
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteKind::Full => "full",
            SiteKind::ThreeValentHub => "three-valent-hub",
            SiteKind::SingleTriangle => "single-triangle",
        })
    }
}

/// A matched site. `edges[r - 1]` holds the edge playing role `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DoubleTriangleSite {
    pub kind: SiteKind,
    pub edges: [Option<EdgeId>; 7],
    pub hub: VertexId,
    pub a: Option<VertexId>,
    pub b: VertexId,
    pub c: Option<VertexId>,
    pub d: VertexId,
    pub e: VertexId,
}

impl DoubleTriangleSite {
    pub fn role(&self, r: usize) -> Option<EdgeId> {
        self.edges[r - 1]
    }

    fn must(&self, r: usize) -> EdgeId {
        self.edges[r - 1].expect("role present for this site kind")
    }

    /// Matching reduction orders `(in G', in G)`, with the extra edges the
    /// partial patterns need: one more edge at `C` for a 3-valent hub, the two
    /// other edges at `B` for a single triangle.
    pub fn orders(&self, g_split: &Graph) -> Option<(Vec<EdgeId>, Vec<EdgeId>)> {
        let own: Vec<EdgeId> = self.edges.iter().flatten().copied().collect();
        let outside = |v: VertexId| -> Vec<EdgeId> {
            let mut es: Vec<EdgeId> = g_split.incident_edges(v).into_iter().filter(|e| !own.contains(e)).collect();
            es.sort_unstable();
            es
        };
        let extra = match self.kind {
            SiteKind::Full => Vec::new(),
            SiteKind::ThreeValentHub => outside(self.c?).into_iter().take(1).collect(),
            SiteKind::SingleTriangle => outside(self.b),
        };
        let needed = match self.kind {
            SiteKind::Full => 0,
            SiteKind::ThreeValentHub => 1,
            SiteKind::SingleTriangle => 2,
        };
        if extra.len() != needed {
            return None;
        }
        let mut split = self.split_order();
        let mut small = self.contracted_order();
        split.extend(&extra);
        small.extend(&extra);
        Some((split, small))
    }

    /// Reduction order in `G'` whose final denominator matches [`Self::contracted_order`] in `G`.
    pub fn split_order(&self) -> Vec<EdgeId> {
        let roles: &[usize] = match self.kind {
            SiteKind::Full => &[1, 2, 3, 4, 6, 7, 5],
            SiteKind::ThreeValentHub => &[1, 2, 3, 6, 7, 5],
            SiteKind::SingleTriangle => &[1, 2, 3, 4, 5],
        };
        roles.iter().map(|&r| self.must(r)).collect()
    }

    /// Matching reduction order in the contracted graph.
    pub fn contracted_order(&self) -> Vec<EdgeId> {
        let roles: &[usize] = match self.kind {
            SiteKind::Full => &[1, 2, 6, 4, 5],
            SiteKind::ThreeValentHub => &[1, 2, 6, 5],
            SiteKind::SingleTriangle => &[1, 4, 5],
        };
        roles.iter().map(|&r| self.must(r)).collect()
    }
}

fn single_edges_between(g: &Graph, u: VertexId, v: VertexId) -> Vec<EdgeId> {
    g.edges().iter().filter(|e| !e.is_loop() && e.touches(u) && e.touches(v)).map(|e| e.id).collect()
}

fn unique_edge(g: &Graph, u: VertexId, v: VertexId) -> Option<EdgeId> {
    match single_edges_between(g, u, v).as_slice() {
        [e] => Some(*e),
        _ => None,
    }
}

fn has_loop(g: &Graph, v: VertexId) -> bool {
    g.edges().iter().any(|e| e.is_loop() && e.tail == v)
}

/// The far end of the single edge at `v` not in `used`, if exactly one remains.
fn remaining_edge(g: &Graph, v: VertexId, used: &[EdgeId]) -> Option<(EdgeId, VertexId)> {
    let rest: Vec<EdgeId> = g.incident_edges(v).into_iter().filter(|e| !used.contains(e)).collect();
    match rest.as_slice() {
        [e] => Some((*e, g.edge(*e).ok()?.other(v))),
        _ => None,
    }
}

fn distinct(vs: &[VertexId]) -> bool {
    let mut s = vs.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() == vs.len()
}

/// Every site in `g`, full patterns first.
pub fn find_double_triangles(g: &Graph) -> Vec<DoubleTriangleSite> {
    let mut out = Vec::new();
    for e2 in g.edges() {
        if e2.is_loop() || unique_edge(g, e2.tail, e2.head).is_none() {
            continue;
        }
        for (hub, inner) in [(e2.tail, e2.head), (e2.head, e2.tail)] {
            if has_loop(g, hub) || has_loop(g, inner) {
                continue;
            }
            let apexes: Vec<(VertexId, EdgeId, EdgeId)> = g
                .neighbours(hub)
                .into_iter()
                .filter(|&w| w != inner)
                .filter_map(|w| Some((w, unique_edge(g, hub, w)?, unique_edge(g, w, inner)?)))
                .collect();
            let (dh, di) = (g.degree(hub), g.degree(inner));
            for (x, &(b, e1, e3)) in apexes.iter().enumerate() {
                if dh == 3 && di == 3 && hub < inner {
                    let used = [e1, e2.id, e3];
                    if let (Some((e4, a)), Some((e5, d))) =
                        (remaining_edge(g, hub, &used), remaining_edge(g, inner, &used))
                    {
                        if distinct(&[hub, inner, a, b, d]) {
                            out.push(DoubleTriangleSite {
                                kind: SiteKind::SingleTriangle,
                                edges: [Some(e1), Some(e2.id), Some(e3), Some(e4), Some(e5), None, None],
                                hub,
                                a: Some(a),
                                b,
                                c: None,
                                d,
                                e: inner,
                            });
                        }
                    }
                }
                for &(c, e6, e7) in &apexes[x + 1..] {
                    let used = [e1, e2.id, e3, e6, e7];
                    let Some((e5, d)) = remaining_edge(g, inner, &used) else { continue };
                    if di != 4 {
                        continue;
                    }
                    if dh == 4 {
                        let Some((e4, a)) = remaining_edge(g, hub, &used) else { continue };
                        if hub < inner && distinct(&[hub, inner, a, b, c, d]) {
                            out.push(DoubleTriangleSite {
                                kind: SiteKind::Full,
                                edges: [Some(e1), Some(e2.id), Some(e3), Some(e4), Some(e5), Some(e6), Some(e7)],
                                hub,
                                a: Some(a),
                                b,
                                c: Some(c),
                                d,
                                e: inner,
                            });
                        }
                    } else if dh == 3 && distinct(&[hub, inner, b, c, d]) {
                        out.push(DoubleTriangleSite {
                            kind: SiteKind::ThreeValentHub,
                            edges: [Some(e1), Some(e2.id), Some(e3), None, Some(e5), Some(e6), Some(e7)],
                            hub,
                            a: None,
                            b,
                            c: Some(c),
                            d,
                            e: inner,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(|s| match s.kind {
        SiteKind::Full => 0,
        SiteKind::ThreeValentHub => 1,
        SiteKind::SingleTriangle => 2,
    });
    out
}

fn site_is_current(g: &Graph, s: &DoubleTriangleSite) -> bool {
    let expect = |r: usize, u: VertexId, v: VertexId| match s.role(r) {
        Some(id) => g.edge(id).map(|e| e.touches(u) && e.touches(v) && !e.is_loop()).unwrap_or(false),
        None => true,
    };
    expect(1, s.hub, s.b)
        && expect(2, s.hub, s.e)
        && expect(3, s.b, s.e)
        && s.a.is_none_or(|a| expect(4, s.hub, a))
        && expect(5, s.e, s.d)
        && s.c.is_none_or(|c| expect(6, s.hub, c) && expect(7, c, s.e))
        && g.degree(s.e) == if s.kind == SiteKind::SingleTriangle { 3 } else { 4 }
}

/// Replaces the site in `g` by the smaller configuration.
pub fn contract_double_triangle(g: &Graph, s: &DoubleTriangleSite) -> Result<Graph> {
    if !site_is_current(g, s) {
        return Err(Error::NoDoubleTriangle);
    }
    let e2 = s.must(2);
    let mut drop = vec![e2, s.must(3)];
    if let Some(e7) = s.role(7) {
        drop.push(e7);
    }
    let e5 = s.must(5);
    let mut edges: Vec<Edge> = Vec::new();
    for e in g.edges() {
        if drop.contains(&e.id) {
            continue;
        }
        let mut e = *e;
        if e.id == e5 {
            if e.tail == s.e {
                e.tail = s.hub;
            } else {
                e.head = s.hub;
            }
        }
        edges.push(e);
    }
    if let Some(c) = s.c {
        edges.push(Edge { id: e2, tail: s.b, head: c });
    }
    let vertices = g.vertices().iter().copied().filter(|&v| v != s.e).collect();
    Graph::new(vertices, edges)
}

/// Builds `G'` from a blob `k` attached at `a, b, c, d`, returning `(G, G', site)`.
///
/// Site edges take ids `1..=7`; blob edges are shifted to start at 8. Hub and
/// inner vertex get fresh ids above the blob's.
pub fn split_pair(
    k: &Graph,
    a: VertexId,
    b: VertexId,
    c: VertexId,
    d: VertexId,
) -> Result<(Graph, Graph, DoubleTriangleSite)> {
    for v in [a, b, c, d] {
        if !k.has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
    }
    let top = k.max_vertex_id();
    let (hub, inner) = (top + 1, top + 2);
    let mut edges = vec![
        Edge { id: 1, tail: hub, head: b },
        Edge { id: 2, tail: hub, head: inner },
        Edge { id: 3, tail: b, head: inner },
        Edge { id: 4, tail: hub, head: a },
        Edge { id: 5, tail: inner, head: d },
        Edge { id: 6, tail: hub, head: c },
        Edge { id: 7, tail: c, head: inner },
    ];
    edges.extend(k.edges().iter().map(|e| Edge { id: e.id + 7, ..*e }));
    let mut vertices = k.vertices().to_vec();
    vertices.extend([hub, inner]);
    let gp = Graph::new(vertices, edges)?;
    let site = DoubleTriangleSite {
        kind: SiteKind::Full,
        edges: [Some(1), Some(2), Some(3), Some(4), Some(5), Some(6), Some(7)],
        hub,
        a: Some(a),
        b,
        c: Some(c),
        d,
        e: inner,
    };
    let g = contract_double_triangle(&gp, &site)?;
    Ok((g, gp, site))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standalone() -> Graph {
        Graph::from_edges(&[(1, 10, 2), (2, 10, 11), (3, 2, 11), (4, 10, 1), (5, 11, 4), (6, 10, 3), (7, 3, 11)])
            .unwrap()
    }

    #[test]
    fn standalone_site() {
        let g = standalone();
        let sites: Vec<_> = find_double_triangles(&g).into_iter().filter(|s| s.kind == SiteKind::Full).collect();
        assert_eq!(sites.len(), 1);
        let s = &sites[0];
        assert_eq!((s.hub, s.e), (10, 11));
        let small = contract_double_triangle(&g, s).unwrap();
        assert_eq!(small.num_edges(), 5);
        assert_eq!(small.triangles().len(), 1);
        assert_eq!(small.degree(10), 4);
        assert!(!small.has_vertex(11));
    }

    #[test]
    fn k34_has_no_sites() {
        let mut pairs = Vec::new();
        for a in 1..=3 {
            for b in 4..=7 {
                pairs.push((a, b));
            }
        }
        assert!(find_double_triangles(&Graph::from_pairs(&pairs)).is_empty());
    }

    #[test]
    fn stale_site_rejected() {
        let g = standalone();
        let s = find_double_triangles(&g)[0].clone();
        let g2 = g.delete_edge(3).unwrap();
        assert_eq!(contract_double_triangle(&g2, &s), Err(Error::NoDoubleTriangle));
    }
}
