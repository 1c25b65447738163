//! Seeded random graphs for property sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

/// Deterministic generator from a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Options for [`connected_multigraph`].
#[derive(Clone, Copy, Debug)]
pub struct RandomGraphOptions {
    pub vertices: usize,
    pub edges: usize,
    pub self_loops: bool,
    pub parallel: bool,
}

/// A random connected multigraph on vertices `1..=v` with edge ids `1..=e`.
///
/// A random spanning tree is laid first; the rest are random edges with
/// random orientation. Edge ids are assigned in a shuffled order.
pub fn connected_multigraph<R: Rng>(r: &mut R, opts: RandomGraphOptions) -> Graph {
    let v = opts.vertices.max(1);
    let e = opts.edges.max(v - 1);
    let mut order: Vec<VertexId> = (1..=v as VertexId).collect();
    order.shuffle(r);
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(e);
    for k in 1..v {
        let parent = order[r.gen_range(0..k)];
        pairs.push((parent, order[k]));
    }
    let simple_pairs = v * (v - 1) / 2;
    let mut guard = 0;
    while pairs.len() < e {
        guard += 1;
        let a = r.gen_range(1..=v as VertexId);
        let b = r.gen_range(1..=v as VertexId);
        if a == b && !opts.self_loops {
            continue;
        }
        let dup = pairs.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a));
        if dup && !opts.parallel && pairs.len() < simple_pairs && guard < 10_000 {
            continue;
        }
        pairs.push((a, b));
    }
    pairs.shuffle(r);
    for p in pairs.iter_mut() {
        if r.gen_bool(0.5) {
            *p = (p.1, p.0);
        }
    }
    Graph::from_pairs(&pairs)
}

/// Random connected multigraph with between `min_e` and `max_e` edges and a
/// vertex count giving at least one loop.
pub fn sized_multigraph<R: Rng>(r: &mut R, min_e: usize, max_e: usize, self_loops: bool) -> Graph {
    let e = r.gen_range(min_e..=max_e);
    let v = r.gen_range(2..=(e.div_ceil(2) + 1).max(2));
    connected_multigraph(r, RandomGraphOptions { vertices: v, edges: e, self_loops, parallel: true })
}

/// Random simple connected graph (no loops, no parallel edges) when possible.
pub fn simple_graph<R: Rng>(r: &mut R, v: usize, e: usize) -> Graph {
    let e = e.min(v * (v - 1) / 2);
    connected_multigraph(r, RandomGraphOptions { vertices: v, edges: e, self_loops: false, parallel: false })
}
