//! Verifiers for polynomial identities between graph, Dodgson and spanning
//! forest polynomials. Each returns a report with a witness on failure.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::dodgson::{dodgson, DodgsonSpec};
use crate::error::{Error, Result};
use crate::forest::{phi, phi_parts, psi};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::partition::SetPartition;
use crate::poly::{Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub instance: String,
    pub passed: bool,
    /// Left minus right side when the check fails.
    #[serde(serialize_with = "ser_witness")]
    pub witness: Option<Poly>,
}

fn ser_witness<S: serde::Serializer>(w: &Option<Poly>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(p) => s.serialize_str(&p.to_string()),
        None => s.serialize_none(),
    }
}

impl IdentityReport {
    fn compare(identity: &str, instance: String, lhs: &Poly, rhs: &Poly) -> Self {
        let diff = lhs - rhs;
        IdentityReport {
            identity: identity.into(),
            instance,
            passed: diff.is_zero(),
            witness: if diff.is_zero() { None } else { Some(diff) },
        }
    }

    fn from_reports(identity: &str, instance: String, parts: &[IdentityReport]) -> Self {
        let failed = parts.iter().find(|r| !r.passed);
        IdentityReport {
            identity: identity.into(),
            instance: match failed {
                Some(f) => format!("{instance}; failing clause: {}", f.identity),
                None => instance,
            },
            passed: failed.is_none(),
            witness: failed.and_then(|f| f.witness.clone()),
        }
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} [{}]", if self.passed { "PASS" } else { "FAIL" }, self.identity, self.instance)?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {w}")?;
        }
        Ok(())
    }
}

/// Finds signs `s` with `sum s_i * p_i = 0`; the first nonzero term and all
/// zero terms get sign +1.
///
/// Returns the number of satisfying assignments and one of them.
pub fn sign_search(ps: &[Poly]) -> (usize, Option<Vec<i32>>) {
    let free: Vec<usize> = (0..ps.len()).filter(|&i| !ps[i].is_zero()).skip(1).collect();
    let mut count = 0;
    let mut found = None;
    for mask in 0u32..(1 << free.len()) {
        let mut signs = vec![1; ps.len()];
        for (b, &i) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                signs[i] = -1;
            }
        }
        let total: Poly = ps.iter().zip(&signs).map(|(p, &s)| p.scale(s)).sum();
        if total.is_zero() {
            count += 1;
            found.get_or_insert(signs);
        }
    }
    (count, found)
}

fn require_distinct(es: &[EdgeId]) -> Result<()> {
    for (a, x) in es.iter().enumerate() {
        if es[a + 1..].contains(x) {
            return Err(Error::RepeatedEdge(*x));
        }
    }
    Ok(())
}

/// `Psi^{ij,kl} - Psi^{ik,jl} + Psi^{il,jk} = 0` up to the signs of the normalized terms.
pub fn check_pluecker(g: &Graph, i: EdgeId, j: EdgeId, k: EdgeId, l: EdgeId) -> Result<IdentityReport> {
    require_distinct(&[i, j, k, l])?;
    let ps = [
        dodgson(g, &DodgsonSpec::new(&[i, j], &[k, l], &[]))?,
        dodgson(g, &DodgsonSpec::new(&[i, k], &[j, l], &[]))?,
        dodgson(g, &DodgsonSpec::new(&[i, l], &[j, k], &[]))?,
    ];
    let (count, _) = sign_search(&ps);
    let instance = format!("edges {i},{j},{k},{l}");
    Ok(IdentityReport {
        identity: "pluecker".into(),
        instance,
        passed: count == 1,
        witness: if count == 1 { None } else { Some(&(&ps[0] - &ps[1]) + &ps[2]) },
    })
}

/// The Dodgson-type identity for three vertices.
pub fn check_transfer(g: &Graph, u: VertexId, v: VertexId, w: VertexId) -> Result<IdentityReport> {
    if u == v || v == w || u == w {
        return Err(Error::InvalidPartition("vertices must be distinct".into()));
    }
    let f = |parts: &[&[VertexId]]| phi_parts(g, parts);
    let lhs = &f(&[&[u, v, w]])? * &f(&[&[u], &[v], &[w]])?;
    let uv_w = f(&[&[u, v], &[w]])?;
    let uw_v = f(&[&[u, w], &[v]])?;
    let u_vw = f(&[&[u], &[v, w]])?;
    let rhs = &(&(&uv_w * &uw_v) + &(&uv_w * &u_vw)) + &(&uw_v * &u_vw);
    Ok(IdentityReport::compare("transfer", format!("vertices {u},{v},{w}"), &lhs, &rhs))
}

/// Builds a two-vertex join: delete `e1`, `e2` and glue the ends of `e2` to those of `e1`.
///
/// `flipped` chooses which end of `e2` meets the tail of `e1`. Returns the
/// join and the id map for edges of `g2`.
pub fn two_join(
    g1: &Graph,
    e1: EdgeId,
    g2: &Graph,
    e2: EdgeId,
    flipped: bool,
) -> Result<(Graph, HashMap<EdgeId, EdgeId>)> {
    let a = *g1.edge(e1)?;
    let b = *g2.edge(e2)?;
    if a.is_loop() || b.is_loop() {
        return Err(Error::InvalidPartition("join edges must not be self-loops".into()));
    }
    let h1 = g1.delete_edge_keep_vertices(e1)?;
    let h2 = g2.delete_edge_keep_vertices(e2)?;
    let glue = if flipped { [(b.head, a.tail), (b.tail, a.head)] } else { [(b.tail, a.tail), (b.head, a.head)] };
    Ok(h1.glue(&h2, &glue))
}

/// The two-vertex join decomposition and vanishing clauses, for both gluings.
#[allow(clippy::too_many_arguments)]
pub fn check_two_join(
    g1: &Graph,
    e1: EdgeId,
    g2: &Graph,
    e2: EdgeId,
    i: EdgeId,
    j: EdgeId,
    k: EdgeId,
    l: EdgeId,
) -> Result<IdentityReport> {
    require_distinct(&[i, j, e1])?;
    require_distinct(&[k, l, e2])?;
    for x in [i, j] {
        g1.edge(x)?;
    }
    for x in [k, l] {
        g2.edge(x)?;
    }
    let a = *g1.edge(e1)?;
    let b = *g2.edge(e2)?;
    let h1 = g1.delete_edge_keep_vertices(e1)?;
    let h2 = g2.delete_edge_keep_vertices(e2)?;
    let split1 = phi_parts(&h1, &[&[a.tail], &[a.head]])?;
    let whole1 = psi_or_zero(&h1)?;
    let mut clauses = Vec::new();
    for flipped in [false, true] {
        let (g, map) = two_join(g1, e1, g2, e2, flipped)?;
        let (k2, l2) = (map[&k], map[&l]);
        let tag = if flipped { "flipped" } else { "straight" };
        let h2 = h2.relabel_edges(|x| map[&x])?;
        let split2 = phi_parts(&h2, &[&[b.tail], &[b.head]])?;
        let rhs = &(&split1 * &psi_or_zero(&h2)?) + &(&whole1 * &split2);
        clauses.push(IdentityReport::compare(
            &format!("two-join decomposition ({tag})"),
            String::new(),
            &psi(&g)?,
            &rhs,
        ));
        let zero = dodgson(&g, &DodgsonSpec::new(&[i, j], &[k2, l2], &[]))?;
        clauses.push(IdentityReport::compare(
            &format!("two-join vanishing ({tag})"),
            String::new(),
            &zero,
            &Poly::zero(),
        ));
        let x = dodgson(&g, &DodgsonSpec::new(&[i, k2], &[j, l2], &[]))?;
        let y = dodgson(&g, &DodgsonSpec::new(&[i, l2], &[j, k2], &[]))?;
        let diff = if x.eq_up_to_sign(&y) { Poly::zero() } else { &x - &y };
        clauses.push(IdentityReport::compare(
            &format!("two-join equality ({tag})"),
            String::new(),
            &diff,
            &Poly::zero(),
        ));
    }
    Ok(IdentityReport::from_reports("two-join", format!("e1={e1} e2={e2} i={i} j={j} k={k} l={l}"), &clauses))
}

/// `Psi` of a possibly disconnected graph (zero when disconnected).
fn psi_or_zero(g: &Graph) -> Result<Poly> {
    if g.is_connected() {
        psi(g)
    } else {
        Ok(Poly::zero())
    }
}

/// The spanning forest table of one side of a three-vertex join.
#[derive(Clone, Debug)]
pub struct JoinSide {
    /// `Phi^{{u},{v,w}}`, `Phi^{{v},{u,w}}`, `Phi^{{w},{u,v}}`.
    pub f: [Poly; 3],
    /// `Psi` of the side.
    pub whole: Poly,
    /// `Phi^{{u},{v},{w}}`.
    pub split: Poly,
}

impl JoinSide {
    pub fn new(side: &Graph, cut: [VertexId; 3]) -> Result<JoinSide> {
        let [u, v, w] = cut;
        Ok(JoinSide {
            f: [
                phi_parts(side, &[&[u], &[v, w]])?,
                phi_parts(side, &[&[v], &[u, w]])?,
                phi_parts(side, &[&[w], &[u, v]])?,
            ],
            whole: phi_parts(side, &[&[u, v, w]])?,
            split: phi_parts(side, &[&[u], &[v], &[w]])?,
        })
    }
}

/// Joins two sides sharing exactly the cut vertices (ids must already agree, edge ids disjoint).
pub fn three_join(l: &Graph, r: &Graph, cut: [VertexId; 3]) -> Result<Graph> {
    for v in cut {
        if !l.has_vertex(v) || !r.has_vertex(v) {
            return Err(Error::NotThreeJoin(format!("cut vertex {v} missing from a side")));
        }
    }
    let shared: Vec<VertexId> = l.vertices().iter().copied().filter(|v| r.has_vertex(*v)).collect();
    if shared.len() != 3 {
        return Err(Error::NotThreeJoin(format!("sides share {} vertices", shared.len())));
    }
    let mut g = l.clone();
    for e in r.edges() {
        g.push_edge(*e).map_err(|_| Error::NotThreeJoin(format!("edge id {} on both sides", e.id)))?;
    }
    Ok(g)
}

/// Both forms of the three-vertex join decomposition.
///
/// The scaled form is checked as `f^(2n+1) g Psi_G = (12 terms)|_{beta -> f beta}`
/// with `n = deg g`; the report for the literal exponent `n + 1` is returned second.
pub fn check_three_join(
    l: &Graph,
    r: &Graph,
    cut: [VertexId; 3],
) -> Result<(IdentityReport, IdentityReport, IdentityReport)> {
    let g = three_join(l, r, cut)?;
    let fs = JoinSide::new(l, cut)?;
    let gs = JoinSide::new(r, cut)?;
    let psi_g = psi(&g)?;
    let instance = format!("cut {},{},{}", cut[0], cut[1], cut[2]);

    let [f1, f2, f3] = &fs.f;
    let [g1, g2, g3] = &gs.f;
    let (f, g_) = (&fs.whole, &gs.whole);
    let mut unscaled = &fs.split * g_;
    for (a, fa) in fs.f.iter().enumerate() {
        for (b, gb) in gs.f.iter().enumerate() {
            if a != b {
                unscaled += &(fa * gb);
            }
        }
    }
    unscaled += &(f * &gs.split);
    let first = IdentityReport::compare("three-join unscaled", instance.clone(), &psi_g, &unscaled);

    let n = r.loops() as u32;
    let fp: Vec<Poly> = [f1, f2, f3].iter().map(|x| *x * g_).collect();
    let mut twelve = &(&(&fp[0] * &fp[1]) + &(&fp[0] * &fp[2])) + &(&fp[1] * &fp[2]);
    for (a, fa) in fp.iter().enumerate() {
        for (b, gb) in [g1, g2, g3].iter().enumerate() {
            if a != b {
                twelve += &(fa * *gb);
            }
        }
    }
    twelve += &(&(&(g1 * g2) + &(g1 * g3)) + &(g2 * g3));
    // both sides carry a common factor f^low, cancelled before comparing when f != 0
    let (low, rhs_reduced) = scale_by_degree(&twelve, &r.edge_ids(), f);
    let lhs_base = g_ * &psi_g;
    let scaled = |exponent: u32, name: &str| {
        let k = if f.is_zero() { 0 } else { exponent.min(low) };
        let lhs = &f.pow(exponent - k) * &lhs_base;
        let rhs = &f.pow(low - k) * &rhs_reduced;
        IdentityReport::compare(name, instance.clone(), &lhs, &rhs)
    };
    let corrected = scaled(2 * n + 1, "three-join scaled (exponent 2n+1)");
    let literal = scaled(n + 1, "three-join scaled (exponent n+1)");
    Ok((first, corrected, literal))
}

/// `p` with every variable in `vars` replaced by `f` times itself, as
/// `(low, q)` with the result equal to `f^low * q`.
fn scale_by_degree(p: &Poly, vars: &[EdgeId], f: &Poly) -> (u32, Poly) {
    let mut by_degree: BTreeMap<u32, Vec<(BigInt, Monomial)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let d: u32 = vars.iter().map(|&v| m.exponent(v)).sum();
        by_degree.entry(d).or_default().push((c.clone(), m.clone()));
    }
    let low = by_degree.keys().next().copied().unwrap_or(0);
    let mut out = Poly::zero();
    for (d, terms) in by_degree {
        out += &(&f.pow(d - low) * &Poly::from_terms(terms));
    }
    (low, out)
}

/// Counts spanning trees of the join against compatible forest pairs at all weights 1.
pub fn three_join_tree_count(l: &Graph, r: &Graph, cut: [VertexId; 3]) -> Result<(u64, u64)> {
    let g = three_join(l, r, cut)?;
    let at_one = |p: &Poly| -> u64 { p.terms().map(|(_, c)| u64::try_from(c.clone()).unwrap_or(0)).sum() };
    let fs = JoinSide::new(l, cut)?;
    let gs = JoinSide::new(r, cut)?;
    let mut pairs = at_one(&fs.split) * at_one(&gs.whole) + at_one(&fs.whole) * at_one(&gs.split);
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                pairs += at_one(&fs.f[a]) * at_one(&gs.f[b]);
            }
        }
    }
    Ok((crate::forest::spanning_trees(&g)?.len() as u64, pairs))
}

/// Contraction-deletion for spanning forest polynomials, and the part-splitting
/// expansion of the contracted term.
pub fn check_phi_contraction_deletion(g: &Graph, p: &SetPartition, e: EdgeId) -> Result<IdentityReport> {
    let edge = *g.edge(e)?;
    let lhs = phi(g, p)?;
    let del = g.delete_edge_keep_vertices(e)?;
    let (v, w) = (edge.tail, edge.head);
    let instance = format!("P={p} e={e}");
    let deleted = &Poly::var(e) * &phi(&del, p)?;
    let different_parts = matches!((p.part_of(v), p.part_of(w)), (Some(a), Some(b)) if a != b);
    if different_parts || edge.is_loop() {
        return Ok(IdentityReport::compare("forest contraction-deletion", instance, &lhs, &deleted));
    }
    let contracted = g.contract_edge(e)?.into_graph().expect("not a loop");
    let (keep, gone) = (v.min(w), v.max(w));
    let pe = p.identify(keep, gone)?;
    let con = phi(&contracted, &pe)?;
    let first = IdentityReport::compare("forest contraction-deletion", instance.clone(), &lhs, &(&deleted + &con));

    // Expansion of the contracted term over forests of G \ e with v, w in separate trees.
    let mut expansion = Poly::zero();
    let pv = p.part_of(v).or(p.part_of(w));
    let splits = |base: Vec<VertexId>, rest: Vec<Vec<VertexId>>| -> Result<Poly> {
        let mut acc = Poly::zero();
        for mask in 0u32..(1 << base.len()) {
            let mut p1 = vec![v];
            let mut p2 = vec![w];
            for (b, &x) in base.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    p1.push(x);
                } else {
                    p2.push(x);
                }
            }
            let mut parts = rest.clone();
            parts.push(p1);
            parts.push(p2);
            acc += &phi(&del, &SetPartition::new(parts)?)?;
        }
        Ok(acc)
    };
    match pv {
        None => {
            for (idx, part) in p.parts().iter().enumerate() {
                let rest: Vec<Vec<VertexId>> =
                    p.parts().iter().enumerate().filter(|(k, _)| *k != idx).map(|(_, q)| q.clone()).collect();
                expansion += &splits(part.clone(), rest)?;
            }
        }
        Some(idx) => {
            let base: Vec<VertexId> = p.parts()[idx].iter().copied().filter(|&x| x != v && x != w).collect();
            let rest: Vec<Vec<VertexId>> =
                p.parts().iter().enumerate().filter(|(k, _)| *k != idx).map(|(_, q)| q.clone()).collect();
            expansion = splits(base, rest)?;
        }
    }
    let second = IdentityReport::compare("forest part-splitting", instance.clone(), &con, &expansion);
    Ok(IdentityReport::from_reports("forest contraction-deletion", instance, &[first, second]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
    }

    #[test]
    fn pluecker_on_k4() {
        let g = k4();
        let r = check_pluecker(&g, 1, 2, 3, 4).unwrap();
        assert!(r.passed, "{r}");
        assert!(check_pluecker(&g, 1, 1, 3, 4).is_err());
    }

    #[test]
    fn sign_search_fixes_first_nonzero_term() {
        let p = Poly::var(1);
        assert_eq!(sign_search(&[Poly::zero(), p.clone(), p.clone()]).0, 1);
        assert_eq!(sign_search(&[Poly::zero(), Poly::zero(), Poly::zero()]).0, 1);
        assert_eq!(sign_search(&[p.clone(), Poly::var(2), Poly::zero()]).0, 0);
    }

    #[test]
    fn three_join_with_a_disconnected_side() {
        // removing 1 2 5 leaves a pendant edge 5-3 on one side
        let mut l = Graph::from_edges(&[(5, 5, 3)]).unwrap();
        l.add_vertex(1);
        l.add_vertex(2);
        let r = Graph::from_edges(&[(1, 4, 1), (2, 4, 5), (3, 4, 2), (4, 5, 2)]).unwrap();
        let (a, b, _) = check_three_join(&l, &r, [1, 2, 5]).unwrap();
        assert!(a.passed, "{a}");
        assert!(b.passed, "{b}");
    }

    #[test]
    fn transfer_on_k4_and_tree() {
        let g = k4();
        assert!(check_transfer(&g, 1, 2, 3).unwrap().passed);
        let t = Graph::from_pairs(&[(1, 2), (2, 3), (3, 4)]);
        assert!(check_transfer(&t, 1, 2, 4).unwrap().passed);
    }

    #[test]
    fn two_triangles_joined() {
        let t = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)]);
        let r = check_two_join(&t, 1, &t, 1, 2, 3, 2, 3).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn triangles_three_joined() {
        let l = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)]);
        let r = Graph::from_edges(&[(4, 1, 4), (5, 2, 4), (6, 3, 4), (7, 4, 1)]).unwrap();
        let (a, b, c) = check_three_join(&l, &r, [1, 2, 3]).unwrap();
        assert!(a.passed, "{a}");
        assert!(b.passed, "{b}");
        assert!(!c.passed);
        let (trees, pairs) = three_join_tree_count(&l, &r, [1, 2, 3]).unwrap();
        assert_eq!(trees, pairs);
    }

    #[test]
    fn forest_contraction_deletion_on_triangle() {
        let t = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)]);
        for p in ["{1}{2}", "{3}", "{1,2}", "{1}{3}"] {
            let r = check_phi_contraction_deletion(&t, &p.parse().unwrap(), 1).unwrap();
            assert!(r.passed, "{r}");
        }
    }
}
