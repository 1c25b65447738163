//! Weight-drop prediction from graph structure, and the three-vertex-join
//! polynomial `rho_L`.
//!
//! `rho_L(x, y, z)` is the denominator of `L` with an apex joined to the
//! terminals by edges `x, y, z`, after reducing out every edge of `L`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::catalog::{self, xyz_display, X, Y, Z};
use crate::cuts::{find_three_vertex_cuts, find_two_vertex_cuts, CutDecomposition};
use crate::double_triangle::{contract_double_triangle, find_double_triangles, DoubleTriangleSite};
use crate::error::{Error, Result};
use crate::forest::{phi_parts, psi};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::poly::{Poly, Var};
use crate::reduction::{
    auto_order_search_within, continue_auto, default_budget, Continuation, Outcome, ReductionTrace,
};

/// `rho_L` in the variables [`X`], [`Y`], [`Z`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoPolynomial {
    pub poly: Poly,
}

impl RhoPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Degree zero or a perfect square.
    pub fn forces_drop(&self) -> bool {
        self.poly.is_zero() || self.degree() == 0 || self.poly.normalized().perfect_square_root().is_some()
    }
}

impl fmt::Display for RhoPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly.display_with(xyz_display))
    }
}

/// `L` plus an apex joined to the terminals; returns the graph and the ids of `x, y, z`.
pub fn apex_graph(l: &Graph, terminals: [VertexId; 3]) -> Result<(Graph, [EdgeId; 3])> {
    for t in terminals {
        if !l.has_vertex(t) {
            return Err(Error::UnknownVertex(t));
        }
    }
    if terminals[0] == terminals[1] || terminals[1] == terminals[2] || terminals[0] == terminals[2] {
        return Err(Error::NotThreeJoin("terminals must be distinct".into()));
    }
    let mut g = l.clone();
    let apex = l.max_vertex_id() + 1;
    g.add_vertex(apex);
    let ids = terminals.map(|t| g.add_edge(apex, t));
    Ok((g, ids))
}

/// Computes `rho_L` by reducing the apex graph over the edges of `l`.
pub fn rho(l: &Graph, terminals: [VertexId; 3]) -> Result<RhoPolynomial> {
    rho_with_budget(l, terminals, default_budget())
}

pub fn rho_with_budget(l: &Graph, terminals: [VertexId; 3], budget: usize) -> Result<RhoPolynomial> {
    l.require_connected()?;
    if l.num_edges() < 5 {
        return Err(Error::TooFewEdges { needed: 5, have: l.num_edges() });
    }
    let (lt, xyz) = apex_graph(l, terminals)?;
    let pool = l.edge_ids();
    let trace = auto_order_search_within(&lt, &pool, pool.len(), budget)?;
    let last = match &trace.outcome {
        Outcome::Reduced { last, .. } => last.clone(),
        Outcome::WeightDrop { .. } => Poly::zero(),
        Outcome::Stuck { stage, reasons } => {
            let why: Vec<&str> = reasons.iter().map(|(_, r)| r.as_str()).collect();
            return Err(Error::NotReducible(format!("stuck at D{stage}: {}", why.join("; "))));
        }
    };
    let rename: HashMap<Var, Var> = [(xyz[0], X), (xyz[1], Y), (xyz[2], Z)].into_iter().collect();
    if last.variables().iter().any(|v| !rename.contains_key(v)) {
        return Err(Error::NotReducible(format!("leftover variables in {last}")));
    }
    Ok(RhoPolynomial { poly: last.rename(&rename).normalized() })
}

/// How a computed rho relates to the tabulated one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RhoMatch {
    Exact,
    /// Equal after renaming `x, y, z` to the listed variables.
    Permuted([char; 3]),
    Mismatch,
}

#[derive(Clone, Debug)]
pub struct RhoRow {
    pub name: String,
    pub expected: RhoPolynomial,
    pub computed: Result<RhoPolynomial>,
    pub matched: RhoMatch,
}

impl fmt::Display for RhoRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.matched {
            RhoMatch::Exact => "PASS".to_string(),
            RhoMatch::Permuted(p) => format!("PASS (x,y,z -> {},{},{})", p[0], p[1], p[2]),
            RhoMatch::Mismatch => "FAIL".to_string(),
        };
        match &self.computed {
            Ok(c) => write!(f, "{status} {}: expected {}, computed {}", self.name, self.expected, c),
            Err(e) => write!(f, "{status} {}: expected {}, error {}", self.name, self.expected, e),
        }
    }
}

const PERMUTATIONS: [[Var; 3]; 6] = [[X, Y, Z], [X, Z, Y], [Y, X, Z], [Y, Z, X], [Z, X, Y], [Z, Y, X]];

/// Compares `computed` with `expected`, allowing a relabelling of the terminals.
pub fn match_rho(expected: &Poly, computed: &Poly) -> RhoMatch {
    let e = expected.normalized();
    for perm in PERMUTATIONS {
        let map: HashMap<Var, Var> = [(X, perm[0]), (Y, perm[1]), (Z, perm[2])].into_iter().collect();
        if computed.rename(&map).normalized() == e {
            if perm == [X, Y, Z] {
                return RhoMatch::Exact;
            }
            let name = |v: Var| xyz_display(v).chars().next().unwrap_or('?');
            return RhoMatch::Permuted(perm.map(name));
        }
    }
    RhoMatch::Mismatch
}

/// Recomputes every tabulated rho from the bundled fixtures.
pub fn rho_table_check() -> Result<Vec<RhoRow>> {
    let mut rows = Vec::new();
    for name in catalog::RHO_TABLE {
        let f = catalog::get(name)?;
        let terminals = f.terminals().ok_or_else(|| Error::Parse(format!("{name}: no terminals")))?;
        let expected = RhoPolynomial { poly: f.rho().ok_or_else(|| Error::Parse(format!("{name}: no rho")))? };
        let computed = rho(&f.graph(), terminals);
        let matched = match &computed {
            Ok(c) => match_rho(&expected.poly, &c.poly),
            Err(_) => RhoMatch::Mismatch,
        };
        rows.push(RhoRow { name: name.to_string(), expected, computed, matched });
    }
    Ok(rows)
}

/// The three forest polynomials `x_R, y_R, z_R` and `Psi_R` of the right side.
pub fn right_side_polys(r: &Graph, t: [VertexId; 3]) -> Result<([Poly; 3], Poly)> {
    let [v1, v2, v3] = t;
    let x = phi_parts(r, &[&[v1], &[v2, v3]])?;
    let y = phi_parts(r, &[&[v2], &[v1, v3]])?;
    let z = phi_parts(r, &[&[v1, v2], &[v3]])?;
    Ok(([x, y, z], psi(r)?))
}

/// `Psi_R^(2 - deg rho) * rho(x_R, y_R, z_R)` for the join split by `cut`,
/// with `cut.left` as `L` and the cut vertices as `v1, v2, v3` in order.
pub fn three_join_reduce(g: &Graph, cut: &CutDecomposition) -> Result<Poly> {
    let t: [VertexId; 3] =
        cut.cut.clone().try_into().map_err(|_| Error::NotThreeJoin("need three cut vertices".into()))?;
    let (l, r) = cut.sides(g);
    let rho_l = rho(&l, t)?;
    substitute_rho(&rho_l, &r, t)
}

/// Substitutes the right side into a known rho.
pub fn substitute_rho(rho_l: &RhoPolynomial, r: &Graph, t: [VertexId; 3]) -> Result<Poly> {
    let ([x, y, z], psi_r) = right_side_polys(r, t)?;
    let bindings: HashMap<Var, Poly> = [(X, x), (Y, y), (Z, z)].into_iter().collect();
    let body = rho_l.poly.substitute(&bindings);
    let deg = rho_l.degree() as i64;
    let out =
        if deg <= 2 { &psi_r.pow((2 - deg) as u32) * &body } else { body.div_exact(&psi_r.pow((deg - 2) as u32))? };
    Ok(out.normalized())
}

/// The engine's denominator of `g` after reducing out the edges of `cut.left`.
pub fn direct_left_reduction(g: &Graph, cut: &CutDecomposition) -> Result<ReductionTrace> {
    auto_order_search_within(g, &cut.left, cut.left.len(), default_budget())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictVerdict {
    Drop,
    NoDropKnown,
    Unknown,
}

impl fmt::Display for PredictVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredictVerdict::Drop => "drop",
            PredictVerdict::NoDropKnown => "no-drop-known",
            PredictVerdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RuleStep {
    DoubleEdge {
        edges: (EdgeId, EdgeId),
    },
    TwoVertexReducible {
        cut: Vec<VertexId>,
    },
    DoubleTriangle {
        site: DoubleTriangleSite,
    },
    /// `rho` of the smaller side has degree 0 or is a square.
    RhoCriterion {
        cut: Vec<VertexId>,
        left: Vec<EdgeId>,
        rho: String,
    },
    /// Reducing the substituted denominator over the right side hit a vanishing discriminant.
    JoinContinuation {
        cut: Vec<VertexId>,
        left: Vec<EdgeId>,
        order: Vec<EdgeId>,
    },
    ReductionWitness {
        outcome: String,
    },
}

impl fmt::Display for RuleStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleStep::DoubleEdge { edges } => write!(f, "double edge {} {}", edges.0, edges.1),
            RuleStep::TwoVertexReducible { cut } => write!(f, "two-vertex reducible at {cut:?}"),
            RuleStep::DoubleTriangle { site } => {
                let edges: Vec<EdgeId> = site.edges.iter().flatten().copied().collect();
                write!(f, "contract {} double triangle at hub {} (edges {edges:?})", site.kind, site.hub)
            }
            RuleStep::RhoCriterion { cut, rho, .. } => write!(f, "three-vertex cut {cut:?} with rho = {rho}"),
            RuleStep::JoinContinuation { cut, order, .. } => {
                write!(f, "three-vertex cut {cut:?}: substituted denominator drops after {order:?}")
            }
            RuleStep::ReductionWitness { outcome } => write!(f, "reduction witness: {outcome}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub verdict: PredictVerdict,
    pub rules: Vec<RuleStep>,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict)?;
        for r in &self.rules {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

fn local_rules(g: &Graph) -> Result<Option<RuleStep>> {
    if g.num_edges() > 4 {
        if let Some(&edges) = g.parallel_pairs().first() {
            return Ok(Some(RuleStep::DoubleEdge { edges }));
        }
    }
    if let Some(c) = find_two_vertex_cuts(g)?.into_iter().next() {
        return Ok(Some(RuleStep::TwoVertexReducible { cut: c.cut }));
    }
    Ok(None)
}

/// Orients a three-vertex cut so the left side is the smaller one.
pub fn smaller_side_left(c: &CutDecomposition) -> CutDecomposition {
    let mut l = c.left.clone();
    let mut r = c.right.clone();
    l.sort_unstable();
    r.sort_unstable();
    if (r.len(), &r) < (l.len(), &l) {
        c.flipped()
    } else {
        c.clone()
    }
}

/// Largest side, in edges, whose `rho` the join rule will compute.
pub const MAX_JOIN_LEFT_EDGES: usize = 10;

fn join_rule(g: &Graph, budget: usize) -> Result<Option<RuleStep>> {
    let cuts: Vec<CutDecomposition> = find_three_vertex_cuts(g)?.iter().map(smaller_side_left).collect();
    // smaller sides first, then every cut again with the sides swapped
    let oriented = cuts.iter().cloned().chain(cuts.iter().map(CutDecomposition::flipped));
    for c in oriented {
        if c.left.len() < 5 || c.left.len() > MAX_JOIN_LEFT_EDGES {
            continue;
        }
        let t: [VertexId; 3] = [c.cut[0], c.cut[1], c.cut[2]];
        let (l, r) = c.sides(g);
        if !l.is_connected() || !r.is_connected() {
            continue;
        }
        let Ok(rho_l) = rho_with_budget(&l, t, budget) else { continue };
        if rho_l.forces_drop() {
            return Ok(Some(RuleStep::RhoCriterion {
                cut: c.cut.clone(),
                left: c.left.clone(),
                rho: rho_l.to_string(),
            }));
        }
        let Ok(d) = substitute_rho(&rho_l, &r, t) else { continue };
        let steps = g.num_edges().saturating_sub(1).saturating_sub(c.left.len());
        if let Continuation::Drop { order } = continue_auto(&d, &c.right, steps, budget) {
            return Ok(Some(RuleStep::JoinContinuation { cut: c.cut.clone(), left: c.left.clone(), order }));
        }
    }
    Ok(None)
}

/// Applies the structural rules in order: double edge, two-vertex
/// reducibility, double-triangle contraction (then the first two again), and
/// three-vertex joins.
pub fn predict(g: &Graph) -> Result<Prediction> {
    g.require_connected()?;
    if g.num_edges() < 5 {
        return Err(Error::TooFewEdges { needed: 5, have: g.num_edges() });
    }
    let budget = default_budget();
    let mut rules = Vec::new();
    if let Some(r) = local_rules(g)? {
        rules.push(r);
        return Ok(Prediction { verdict: PredictVerdict::Drop, rules });
    }
    let mut current = g.clone();
    loop {
        let sites: Vec<DoubleTriangleSite> =
            find_double_triangles(&current).into_iter().filter(|s| s.orders(&current).is_some()).collect();
        if sites.is_empty() {
            break;
        }
        let mut next = None;
        for s in &sites {
            let h = contract_double_triangle(&current, s)?;
            if h.num_edges() < 5 || !h.is_connected() {
                continue;
            }
            if let Some(r) = local_rules(&h)? {
                rules.push(RuleStep::DoubleTriangle { site: s.clone() });
                rules.push(r);
                return Ok(Prediction { verdict: PredictVerdict::Drop, rules });
            }
            if next.is_none() {
                next = Some((s.clone(), h));
            }
        }
        match next {
            Some((s, h)) => {
                rules.push(RuleStep::DoubleTriangle { site: s });
                current = h;
            }
            None => break,
        }
    }
    if let Some(r) = join_rule(&current, budget)? {
        rules.push(r);
        return Ok(Prediction { verdict: PredictVerdict::Drop, rules });
    }
    Ok(Prediction { verdict: PredictVerdict::Unknown, rules: Vec::new() })
}

/// [`predict`], upgraded to no-drop-known when a completed reduction of `g`
/// without drop is supplied and no rule fired.
pub fn predict_with_witness(g: &Graph, witness: &ReductionTrace) -> Result<Prediction> {
    let mut p = predict(g)?;
    if p.verdict == PredictVerdict::Unknown && witness.is_reduced() && witness.consumed().len() + 1 >= g.num_edges() {
        p.verdict = PredictVerdict::NoDropKnown;
        p.rules.push(RuleStep::ReductionWitness { outcome: "reduced without drop".into() });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn xyz(s: &str) -> Poly {
        parse_poly(s, &catalog::xyz_name).unwrap()
    }

    #[test]
    fn rho_of_small_catalog_graphs() {
        let g = catalog::get("5_2").unwrap().graph();
        assert_eq!(rho(&g, [1, 2, 3]).unwrap().poly, xyz("y"));
        let g = catalog::get("6_6").unwrap().graph();
        assert_eq!(rho(&g, [1, 2, 3]).unwrap().poly, Poly::one());
    }

    #[test]
    fn permuted_matches() {
        assert_eq!(match_rho(&xyz("x*z"), &xyz("x*z")), RhoMatch::Exact);
        assert_eq!(match_rho(&xyz("x*z"), &xyz("y*z")), RhoMatch::Permuted(['y', 'x', 'z']));
        assert_eq!(match_rho(&xyz("x*z"), &xyz("x + z")), RhoMatch::Mismatch);
    }

    #[test]
    fn double_edge_and_two_join_predictions() {
        let g = catalog::get("w3-double").unwrap().graph();
        let p = predict(&g).unwrap();
        assert_eq!(p.verdict, PredictVerdict::Drop);
        assert!(matches!(p.rules[0], RuleStep::DoubleEdge { .. }));
        let g = catalog::get("2join-w3-w3").unwrap().graph();
        let p = predict(&g).unwrap();
        assert!(matches!(p.rules[0], RuleStep::TwoVertexReducible { .. }));
        let g = catalog::get("w3").unwrap().graph();
        assert_eq!(predict(&g).unwrap().verdict, PredictVerdict::Unknown);
    }
}
