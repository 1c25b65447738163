//! Identity sweeps over graph collections and seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cuts::find_three_vertex_cuts;
use crate::error::Result;
use crate::graph::{EdgeId, Graph, VertexId};
use crate::identities::{check_pluecker, check_three_join, check_transfer, check_two_join, IdentityReport};
use crate::random::{rng, sized_multigraph};

/// Graphs above this size are skipped by the corpus sweep.
pub const MAX_CORPUS_EDGES: usize = 12;

fn tagged(name: &str, mut r: IdentityReport) -> IdentityReport {
    r.instance = format!("{name}: {}", r.instance);
    r
}

fn pick_edges<R: Rng>(r: &mut R, g: &Graph, n: usize, avoid: &[EdgeId]) -> Option<Vec<EdgeId>> {
    let pool: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !avoid.contains(e)).collect();
    (pool.len() >= n).then(|| pool.choose_multiple(r, n).copied().collect())
}

fn pick_vertices<R: Rng>(r: &mut R, g: &Graph, n: usize) -> Option<Vec<VertexId>> {
    let vs = g.vertices();
    (vs.len() >= n).then(|| vs.choose_multiple(r, n).copied().collect())
}

fn first_non_loop(g: &Graph) -> Option<EdgeId> {
    g.edges().iter().find(|e| !e.is_loop()).map(|e| e.id)
}

fn wheel3() -> Graph {
    Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
}

/// Both scaled and unscaled three-join clauses for the sides of `g` at `cut`.
fn three_join_reports(name: &str, l: &Graph, r: &Graph, cut: [VertexId; 3]) -> Result<Vec<IdentityReport>> {
    let (unscaled, scaled, _) = check_three_join(l, r, cut)?;
    Ok(vec![tagged(name, unscaled), tagged(name, scaled)])
}

/// Identity checks on one named graph: two Pluecker tuples, two transfer
/// triples, a two-join with the wheel on three spokes and, when `g` has a
/// three-vertex cut, the three-join decomposition along it.
pub fn corpus_reports(name: &str, g: &Graph, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    if g.num_edges() > MAX_CORPUS_EDGES || !g.is_connected() {
        return Ok(out);
    }
    let mut r = rng(seed);
    for _ in 0..2 {
        if let Some(es) = pick_edges(&mut r, g, 4, &[]) {
            out.push(tagged(name, check_pluecker(g, es[0], es[1], es[2], es[3])?));
        }
        if let Some(vs) = pick_vertices(&mut r, g, 3) {
            out.push(tagged(name, check_transfer(g, vs[0], vs[1], vs[2])?));
        }
    }
    if let Some(e1) = first_non_loop(g) {
        if let Some(ij) = pick_edges(&mut r, g, 2, &[e1]) {
            out.push(tagged(name, check_two_join(g, e1, &wheel3(), 1, ij[0], ij[1], 2, 3)?));
        }
    }
    if let Some(c) = find_three_vertex_cuts(g)?.into_iter().next() {
        let (l, rs) = c.sides(g);
        out.extend(three_join_reports(name, &l, &rs, [c.cut[0], c.cut[1], c.cut[2]])?);
    }
    Ok(out)
}

/// `n` random instances of each checker, deterministic in `seed`.
pub fn random_reports(n: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut done = [0usize; 4];
    let mut attempts = 0;
    while done.iter().any(|&d| d < n) && attempts < 100 * n.max(1) {
        attempts += 1;
        let which = done.iter().position(|&d| d < n).expect("some checker pending");
        let name = format!("random#{attempts}");
        match which {
            0 => {
                let g = sized_multigraph(&mut r, 4, 10, false);
                let Some(es) = pick_edges(&mut r, &g, 4, &[]) else { continue };
                out.push(tagged(&name, check_pluecker(&g, es[0], es[1], es[2], es[3])?));
            }
            1 => {
                let g = sized_multigraph(&mut r, 2, 10, true);
                let Some(vs) = pick_vertices(&mut r, &g, 3) else { continue };
                out.push(tagged(&name, check_transfer(&g, vs[0], vs[1], vs[2])?));
            }
            2 => {
                let g1 = sized_multigraph(&mut r, 3, 7, false);
                let g2 = sized_multigraph(&mut r, 3, 7, false);
                let (Some(e1), Some(e2)) = (first_non_loop(&g1), first_non_loop(&g2)) else { continue };
                let (Some(ij), Some(kl)) = (pick_edges(&mut r, &g1, 2, &[e1]), pick_edges(&mut r, &g2, 2, &[e2]))
                else {
                    continue;
                };
                out.push(tagged(&name, check_two_join(&g1, e1, &g2, e2, ij[0], ij[1], kl[0], kl[1])?));
            }
            _ => {
                let Some((l, rs)) = random_join_sides(&mut r) else { continue };
                out.extend(three_join_reports(&name, &l, &rs, [1, 2, 3])?);
            }
        }
        done[which] += 1;
    }
    Ok(out)
}

/// Two random sides sharing exactly the vertices 1, 2, 3.
fn random_join_sides<R: Rng>(r: &mut R) -> Option<(Graph, Graph)> {
    let l = sized_multigraph(r, 3, 6, false);
    let rs = sized_multigraph(r, 3, 6, false);
    if l.num_vertices() < 3 || rs.num_vertices() < 3 {
        return None;
    }
    let shift_v = l.max_vertex_id();
    let shift_e = l.max_edge_id();
    let rs = rs.relabel_vertices(|v| if v <= 3 { v } else { v + shift_v }).relabel_edges(|e| e + shift_e).ok()?;
    Some((l, rs))
}
