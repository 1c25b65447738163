//! Dodgson polynomials by determinant, by spanning-tree pairs and by signed
//! spanning forest expansion.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{self, RootedNumberedTree};
use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::matrix::int_det;
use crate::partition::SetPartition;
use crate::poly::{Monomial, Poly};

/// Rows `i`, columns `j` removed; variables in `k` set to zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DodgsonSpec {
    pub i: Vec<EdgeId>,
    pub j: Vec<EdgeId>,
    pub k: Vec<EdgeId>,
}

impl DodgsonSpec {
    pub fn new(i: &[EdgeId], j: &[EdgeId], k: &[EdgeId]) -> Self {
        DodgsonSpec { i: i.to_vec(), j: j.to_vec(), k: k.to_vec() }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.i.len() != self.j.len() {
            return Err(Error::SizeMismatch(self.i.len(), self.j.len()));
        }
        for set in [&self.i, &self.j, &self.k] {
            let mut seen = BTreeSet::new();
            for &e in set.iter() {
                g.edge_index(e)?;
                if !seen.insert(e) {
                    return Err(Error::RepeatedEdge(e));
                }
            }
        }
        for &e in &self.k {
            if self.i.contains(&e) != self.j.contains(&e) {
                return Err(Error::KOverlap(e));
            }
        }
        Ok(())
    }

    pub fn is_disjoint(&self) -> bool {
        self.k.is_empty() && self.i.iter().all(|e| !self.j.contains(e))
    }
}

/// Determinant of `M_G(I, J)_K` with the given vertex column removed, unnormalized.
pub fn dodgson_raw(g: &Graph, spec: &DodgsonSpec, removed_vertex: VertexId) -> Result<Poly> {
    spec.validate(g)?;
    let mut m = g.m_matrix(removed_vertex)?;
    for &e in &spec.k {
        let idx = g.edge_index(e)?;
        m.rows[idx][idx] = Poly::zero();
    }
    let rows: Vec<usize> = spec.i.iter().map(|&e| g.edge_index(e)).collect::<Result<_>>()?;
    let cols: Vec<usize> = spec.j.iter().map(|&e| g.edge_index(e)).collect::<Result<_>>()?;
    Ok(m.minor(&rows, &cols).determinant())
}

/// Sign-normalized Dodgson polynomial.
pub fn dodgson(g: &Graph, spec: &DodgsonSpec) -> Result<Poly> {
    Ok(dodgson_raw(g, spec, g.default_removed_vertex()?)?.normalize_sign())
}

/// Determinant of the incidence rows `rows` (in the given order), last vertex column removed.
fn tree_rows_det(g: &Graph, rows: &[EdgeId]) -> Result<BigInt> {
    let full = g.reduced_incidence(g.default_removed_vertex()?, &[])?;
    let m: Vec<Vec<i64>> = rows.iter().map(|&e| g.edge_index(e).map(|i| full[i].clone())).collect::<Result<_>>()?;
    Ok(int_det(&m))
}

/// Sum over `U` with `U + I` and `U + J` spanning trees of
/// `prod_{u not in U} a_u * det E(U + I) * det E(U + J)`, sign-normalized.
pub fn dodgson_via_tree_pairs(g: &Graph, spec: &DodgsonSpec) -> Result<Poly> {
    spec.validate(g)?;
    if !spec.is_disjoint() {
        return Err(Error::InvalidPartition("tree-pair expansion needs disjoint I, J and empty K".into()));
    }
    let n = spec.i.len();
    let rest: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !spec.i.contains(e) && !spec.j.contains(e)).collect();
    let need = g.num_vertices() - 1;
    if need < n {
        return Ok(Poly::zero());
    }
    let u_size = need - n;
    let mut terms = Vec::new();
    let mut chosen = Vec::new();
    choose(&rest, u_size, 0, &mut chosen, &mut |u: &[EdgeId]| -> Result<()> {
        let ui: Vec<EdgeId> = spec.i.iter().chain(u).copied().collect();
        let dj = {
            let di = tree_rows_det(g, &ui)?;
            if di.is_zero() {
                return Ok(());
            }
            let uj: Vec<EdgeId> = spec.j.iter().chain(u).copied().collect();
            di * tree_rows_det(g, &uj)?
        };
        if !dj.is_zero() {
            let mono = Monomial::from_powers(rest.iter().filter(|e| !u.contains(e)).map(|&e| (e, 1)));
            terms.push((dj, mono));
        }
        Ok(())
    })?;
    Ok(Poly::from_terms(terms).normalize_sign())
}

fn choose<F: FnMut(&[EdgeId]) -> Result<()>>(
    pool: &[EdgeId],
    k: usize,
    start: usize,
    chosen: &mut Vec<EdgeId>,
    f: &mut F,
) -> Result<()> {
    if chosen.len() == k {
        return f(chosen);
    }
    for idx in start..pool.len() {
        if pool.len() - idx < k - chosen.len() {
            break;
        }
        chosen.push(pool[idx]);
        choose(pool, k, idx + 1, chosen, f)?;
        chosen.pop();
    }
    Ok(())
}

/// Passes to the minor `G \ (I & J) / (K \ (I & J))` with disjoint `I'`, `J'` and empty `K'`.
///
/// Returns `None` when a contraction hits a self-loop (the polynomial is zero).
pub fn reduce_to_disjoint(g: &Graph, spec: &DodgsonSpec) -> Result<Option<(Graph, DodgsonSpec)>> {
    spec.validate(g)?;
    let both: Vec<EdgeId> = spec.i.iter().copied().filter(|e| spec.j.contains(e)).collect();
    let h = g.delete_edges_keep_vertices(&both)?;
    let contract: Vec<EdgeId> = spec.k.iter().copied().filter(|e| !both.contains(e)).collect();
    let Some(h) = h.contract_edges(&contract)? else { return Ok(None) };
    let i = spec.i.iter().copied().filter(|e| !both.contains(e)).collect();
    let j = spec.j.iter().copied().filter(|e| !both.contains(e)).collect();
    Ok(Some((h, DodgsonSpec { i, j, k: Vec::new() })))
}

/// Splits `dodgson(g, spec) = deletion * a_e + contraction`.
///
/// The pair is taken from one determinant so the identity holds exactly with
/// the sign-normalized left side; each part equals the Dodgson polynomial of
/// `G \ e` (vertices kept) resp. `G / e` up to sign.
pub fn contraction_deletion(g: &Graph, spec: &DodgsonSpec, e: EdgeId) -> Result<(Poly, Poly)> {
    spec.validate(g)?;
    if spec.i.contains(&e) || spec.j.contains(&e) || spec.k.contains(&e) {
        return Err(Error::KOverlap(e));
    }
    let full = dodgson(g, spec)?;
    Ok((full.coefficient_of(e, 1), full.coefficient_of(e, 0)))
}

/// Signed spanning forest expansion of a Dodgson polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestExpansion {
    /// Nonzero `(coefficient, partition)` pairs in partition order.
    pub terms: Vec<(i32, SetPartition)>,
}

impl ForestExpansion {
    pub fn coefficient(&self, p: &SetPartition) -> i32 {
        self.terms.iter().find(|(_, q)| q == p).map_or(0, |(c, _)| *c)
    }

    /// `sum f_P * Phi^P` over `G \ (I + J)` with all vertices kept, sign-normalized.
    pub fn polynomial(&self, g: &Graph, spec: &DodgsonSpec) -> Result<Poly> {
        let mut cut: Vec<EdgeId> = spec.i.clone();
        cut.extend(&spec.j);
        let h = g.delete_edges_keep_vertices(&cut)?;
        let mut acc = Poly::zero();
        for (c, p) in &self.terms {
            acc += &forest::phi(&h, p)?.scale(*c);
        }
        Ok(acc.normalize_sign())
    }
}

/// Vertices touched by the given edges, sorted.
pub fn edge_vertices(g: &Graph, es: &[EdgeId]) -> Result<Vec<VertexId>> {
    let mut vs = BTreeSet::new();
    for &e in es {
        let x = g.edge(e)?;
        vs.insert(x.tail);
        vs.insert(x.head);
    }
    Ok(vs.into_iter().collect())
}

/// The quotient `X_P` of the edges `es` as a rooted numbered tree, if it is one.
///
/// Parts become vertices numbered by part order; part 0 is the root.
pub fn quotient_tree(g: &Graph, es: &[EdgeId], p: &SetPartition) -> Result<Option<RootedNumberedTree>> {
    let mut edges: Vec<Edge> = Vec::with_capacity(es.len());
    let mut ordered: Vec<EdgeId> = es.to_vec();
    ordered.sort_by_key(|&e| g.edge_index(e).unwrap_or(usize::MAX));
    for e in ordered {
        let x = g.edge(e)?;
        let (Some(a), Some(b)) = (p.part_of(x.tail), p.part_of(x.head)) else {
            return Err(Error::InvalidPartition(format!("edge {e} has an endpoint outside the partition")));
        };
        if a == b {
            return Ok(None);
        }
        edges.push(Edge { id: e, tail: a as VertexId, head: b as VertexId });
    }
    if edges.len() + 1 != p.len() {
        return Ok(None);
    }
    let order: Vec<VertexId> = (1..p.len() as VertexId).collect();
    let t = RootedNumberedTree { edges, root: 0, vertex_order: order };
    match forest::tree_sign(&t) {
        Ok(_) => Ok(Some(t)),
        Err(Error::MalformedTree(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `eps(I_P) * eps(J_P)`, or 0 unless both quotients are trees.
pub fn partition_coefficient(g: &Graph, i: &[EdgeId], j: &[EdgeId], p: &SetPartition) -> Result<i32> {
    let (Some(ti), Some(tj)) = (quotient_tree(g, i, p)?, quotient_tree(g, j, p)?) else { return Ok(0) };
    Ok(forest::tree_sign(&ti)? * forest::tree_sign(&tj)?)
}

/// Partitions of `V(I + J)` into `|I| + 1` parts with nonzero coefficient.
pub fn forest_expansion(g: &Graph, i: &[EdgeId], j: &[EdgeId]) -> Result<ForestExpansion> {
    let spec = DodgsonSpec::new(i, j, &[]);
    spec.validate(g)?;
    if !spec.is_disjoint() {
        return Err(Error::InvalidPartition("forest expansion needs disjoint I and J".into()));
    }
    let mut all = i.to_vec();
    all.extend_from_slice(j);
    let vs = edge_vertices(g, &all)?;
    let blocks = i.len() + 1;
    let ends: Vec<(usize, usize)> = all
        .iter()
        .map(|&e| {
            let x = g.edge(e).unwrap();
            (vs.binary_search(&x.tail).unwrap(), vs.binary_search(&x.head).unwrap())
        })
        .collect();
    let mut terms = Vec::new();
    let mut assign = vec![usize::MAX; vs.len()];
    partitions_into(vs.len(), blocks, 0, 0, &mut assign, &ends, &mut |a: &[usize]| -> Result<()> {
        let mut parts = vec![Vec::new(); blocks];
        for (idx, &b) in a.iter().enumerate() {
            parts[b].push(vs[idx]);
        }
        let p = SetPartition::new(parts)?;
        let c = partition_coefficient(g, i, j, &p)?;
        if c != 0 {
            terms.push((c, p));
        }
        Ok(())
    })?;
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(ForestExpansion { terms })
}

/// Restricted-growth enumeration into exactly `blocks` parts, pruning
/// assignments that put both ends of an edge in one part.
fn partitions_into<F: FnMut(&[usize]) -> Result<()>>(
    n: usize,
    blocks: usize,
    idx: usize,
    used: usize,
    assign: &mut Vec<usize>,
    ends: &[(usize, usize)],
    f: &mut F,
) -> Result<()> {
    if n - idx < blocks - used {
        return Ok(());
    }
    if idx == n {
        return f(assign);
    }
    let limit = (used + 1).min(blocks);
    for b in 0..limit {
        assign[idx] = b;
        let loop_made = ends.iter().any(|&(x, y)| {
            (x == idx && y < idx && assign[y] == b) || (y == idx && x < idx && assign[x] == b) || (x == idx && y == idx)
        });
        if !loop_made {
            partitions_into(n, blocks, idx + 1, used.max(b + 1), assign, ends, f)?;
        }
    }
    assign[idx] = usize::MAX;
    Ok(())
}

/// Outcome of checking the sign corollaries on one expansion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignLawTally {
    pub transpositions_checked: usize,
    pub transposition_failures: usize,
    pub switches_checked: usize,
    pub switch_failures: usize,
}

impl SignLawTally {
    pub fn add(&mut self, o: &SignLawTally) {
        self.transpositions_checked += o.transpositions_checked;
        self.transposition_failures += o.transposition_failures;
        self.switches_checked += o.switches_checked;
        self.switch_failures += o.switch_failures;
    }

    pub fn ok(&self) -> bool {
        self.transposition_failures == 0 && self.switch_failures == 0
    }
}

/// Checks that swapping two same-tree vertices of `V(J) \ V(I)` flips the
/// coefficient and that moving one such vertex to another part keeps it,
/// whenever both partitions carry nonzero coefficients.
pub fn check_sign_laws(g: &Graph, i: &[EdgeId], j: &[EdgeId], exp: &ForestExpansion) -> Result<SignLawTally> {
    let vi: BTreeSet<VertexId> = edge_vertices(g, i)?.into_iter().collect();
    let movable: Vec<VertexId> = edge_vertices(g, j)?.into_iter().filter(|v| !vi.contains(v)).collect();
    let jtree = g.edge_subgraph(j);
    let comp_of: HashMap<VertexId, usize> =
        jtree.components().into_iter().enumerate().flat_map(|(c, vs)| vs.into_iter().map(move |v| (v, c))).collect();
    let coef: HashMap<&SetPartition, i32> = exp.terms.iter().map(|(c, p)| (p, *c)).collect();
    let mut tally = SignLawTally::default();
    for (c, p) in &exp.terms {
        for (a_idx, &a) in movable.iter().enumerate() {
            for &b in &movable[a_idx + 1..] {
                let (pa, pb) = (p.part_of(a).unwrap(), p.part_of(b).unwrap());
                if pa == pb || comp_of[&a] != comp_of[&b] {
                    continue;
                }
                let mut parts = p.parts().to_vec();
                for v in parts[pa].iter_mut() {
                    if *v == a {
                        *v = b;
                    }
                }
                for v in parts[pb].iter_mut() {
                    if *v == b {
                        *v = a;
                    }
                }
                let q = SetPartition::new(parts)?;
                if let Some(&d) = coef.get(&q) {
                    tally.transpositions_checked += 1;
                    if d != -c {
                        tally.transposition_failures += 1;
                    }
                }
            }
            let pa = p.part_of(a).unwrap();
            if p.parts()[pa].len() == 1 {
                continue;
            }
            for target in 0..p.len() {
                if target == pa {
                    continue;
                }
                let mut parts = p.parts().to_vec();
                parts[pa].retain(|&v| v != a);
                parts[target].push(a);
                let q = SetPartition::new(parts)?;
                if let Some(&d) = coef.get(&q) {
                    tally.switches_checked += 1;
                    if d != *c {
                        tally.switch_failures += 1;
                    }
                }
            }
        }
    }
    Ok(tally)
}

/// The three routes compared: determinant, tree pairs and forest expansion.
pub fn three_way(g: &Graph, i: &[EdgeId], j: &[EdgeId]) -> Result<(Poly, Poly, Poly, ForestExpansion)> {
    let spec = DodgsonSpec::new(i, j, &[]);
    let det = dodgson(g, &spec)?;
    let pairs = dodgson_via_tree_pairs(g, &spec)?;
    let exp = forest_expansion(g, i, j)?;
    let forest = exp.polynomial(g, &spec)?;
    Ok((det, pairs, forest, exp))
}

/// True when every coefficient is +-1 (as for Dodgson polynomials).
pub fn has_unit_coefficients(p: &Poly) -> bool {
    p.terms().all(|(_, c)| c.magnitude().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{phi_parts, psi};

    fn w3() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
    }

    fn triangle() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)])
    }

    #[test]
    fn empty_spec_is_kirchhoff() {
        let g = w3();
        assert_eq!(dodgson(&g, &DodgsonSpec::default()).unwrap(), psi(&g).unwrap());
        assert_eq!(dodgson_via_tree_pairs(&g, &DodgsonSpec::default()).unwrap(), psi(&g).unwrap());
    }

    #[test]
    fn adjacent_single_edges() {
        // Edges 1 = (1,2) and 3 = (2,3) in W3 share vertex 2.
        let g = w3();
        let d = dodgson(&g, &DodgsonSpec::new(&[1], &[3], &[])).unwrap();
        let h = g.delete_edges_keep_vertices(&[1, 3]).unwrap();
        let f = phi_parts(&h, &[&[1, 3], &[2]]).unwrap();
        assert!(d.eq_up_to_sign(&f));
        let exp = forest_expansion(&g, &[1], &[3]).unwrap();
        assert_eq!(exp.terms.len(), 1);
        assert_eq!(exp.terms[0].1.to_string(), "{1,3}{2}");
    }

    #[test]
    fn triangle_tree_pair() {
        let g = triangle();
        let spec = DodgsonSpec::new(&[1], &[2], &[]);
        let d = dodgson_via_tree_pairs(&g, &spec).unwrap();
        assert_eq!(d.num_terms(), 1);
        assert!(d.eq_up_to_sign(&dodgson(&g, &spec).unwrap()));
    }

    #[test]
    fn three_routes_on_w3() {
        let g = w3();
        for (i, j) in
            [(vec![1], vec![4]), (vec![1, 2], vec![3, 4]), (vec![2, 5], vec![1, 6]), (vec![1, 2, 3], vec![4, 5, 6])]
        {
            let (det, pairs, forest, _) = three_way(&g, &i, &j).unwrap();
            assert_eq!(det, pairs, "{i:?} {j:?}");
            assert_eq!(det, forest, "{i:?} {j:?}");
        }
    }

    #[test]
    fn deletion_contraction_split() {
        let g = w3();
        let spec = DodgsonSpec::new(&[1], &[2], &[]);
        let (del, con) = contraction_deletion(&g, &spec, 6).unwrap();
        let full = dodgson(&g, &spec).unwrap();
        assert_eq!(&(&del * &Poly::var(6)) + &con, full);
        let gd = g.delete_edge_keep_vertices(6).unwrap();
        assert!(del.eq_up_to_sign(&dodgson(&gd, &spec).unwrap()));
        let gc = g.contract_edge(6).unwrap().into_graph().unwrap();
        assert!(con.eq_up_to_sign(&dodgson(&gc, &spec).unwrap()));
    }

    #[test]
    fn self_loop_contraction_is_zero() {
        let g = Graph::from_edges(&[(1, 1, 2), (2, 2, 3), (3, 3, 1), (4, 2, 2)]).unwrap();
        let (_, con) = contraction_deletion(&g, &DodgsonSpec::default(), 4).unwrap();
        assert!(con.is_zero());
    }

    #[test]
    fn minor_reduction() {
        let g = w3();
        let spec = DodgsonSpec::new(&[1, 2], &[1, 3], &[5]);
        let (h, s) = reduce_to_disjoint(&g, &spec).unwrap().unwrap();
        assert!(s.is_disjoint());
        assert!(dodgson(&h, &s).unwrap().eq_up_to_sign(&dodgson(&g, &spec).unwrap()));
        let same = DodgsonSpec::new(&[2], &[2], &[]);
        let (h, s) = reduce_to_disjoint(&g, &same).unwrap().unwrap();
        assert_eq!(dodgson(&h, &s).unwrap(), psi(&g.delete_edge(2).unwrap()).unwrap());
    }

    #[test]
    fn spec_validation() {
        let g = w3();
        assert_eq!(dodgson(&g, &DodgsonSpec::new(&[1], &[], &[])), Err(Error::SizeMismatch(1, 0)));
        assert_eq!(dodgson(&g, &DodgsonSpec::new(&[9], &[1], &[])), Err(Error::UnknownEdge(9)));
    }
}
