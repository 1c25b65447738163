//! The 5-invariant and denominator reduction.
//!
//! Starting from the 5-invariant `D_5` of five edges, each further edge `x`
//! is integrated out by taking the discriminant of `D_n` in `x` and
//! extracting its square root. A vanishing denominator signals a weight
//! drop; a variable of degree above two or a non-square discriminant makes
//! the order stuck.

use std::collections::HashSet;
use std::fmt;

use serde_json::json;

use crate::dodgson::{dodgson_raw, DodgsonSpec};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::poly::Poly;

/// Default node limit for [`auto_order_search`].
pub const DEFAULT_BUDGET: usize = 10_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "GRAPHPOLY_BUDGET";

/// Budget from the environment, falling back to [`DEFAULT_BUDGET`].
pub fn default_budget() -> usize {
    std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

fn check_distinct(g: &Graph, es: &[EdgeId]) -> Result<()> {
    let mut seen = HashSet::new();
    for &e in es {
        g.edge(e)?;
        if !seen.insert(e) {
            return Err(Error::RepeatedEdge(e));
        }
    }
    Ok(())
}

/// `±det [[Ψ^{ij,kl}_m, Ψ^{ijm,klm}], [Ψ^{ik,jl}_m, Ψ^{ikm,jlm}]]`, normalized.
pub fn five_invariant(g: &Graph, e: [EdgeId; 5]) -> Result<Poly> {
    check_distinct(g, &e)?;
    let [i, j, k, l, m] = e;
    let rv = g.default_removed_vertex()?;
    let p1 = dodgson_raw(g, &DodgsonSpec::new(&[i, j], &[k, l], &[]), rv)?;
    let p2 = dodgson_raw(g, &DodgsonSpec::new(&[i, k], &[j, l], &[]), rv)?;
    let (a, b) = (p1.coefficient_of(m, 1), p1.coefficient_of(m, 0));
    let (c, d) = (p2.coefficient_of(m, 1), p2.coefficient_of(m, 0));
    Ok((&(&a * &d) - &(&b * &c)).normalized())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `D_{n+1}` is the square root of the discriminant.
    Discriminant,
    /// `D_n` was linear in the variable; `D_{n+1}` is its coefficient.
    LinearCollapse,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Discriminant => "discriminant",
            StepKind::LinearCollapse => "linear-collapse",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: EdgeId,
    /// The denominator after integrating out `edge`.
    pub poly: Poly,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Reduced {
        last: Poly,
        consumed: Vec<EdgeId>,
    },
    /// `stage` is the index `n` of the first identically vanishing `D_n`.
    WeightDrop {
        stage: usize,
        edge: Option<EdgeId>,
        evidence: String,
    },
    /// Reasons per variable tried at `stage`; `None` for budget exhaustion.
    Stuck {
        stage: usize,
        reasons: Vec<(Option<EdgeId>, String)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub five: [EdgeId; 5],
    pub d5: Poly,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

impl ReductionTrace {
    /// Edges consumed so far, the first five included.
    pub fn consumed(&self) -> Vec<EdgeId> {
        let mut out = self.five.to_vec();
        out.extend(self.steps.iter().map(|s| s.edge));
        out
    }

    /// The most recent denominator.
    pub fn last(&self) -> &Poly {
        self.steps.last().map_or(&self.d5, |s| &s.poly)
    }

    /// `(consumed edges, D_n)` for every stage reached.
    pub fn denominators(&self) -> Vec<(Vec<EdgeId>, Poly)> {
        let mut consumed = self.five.to_vec();
        let mut out = vec![(consumed.clone(), self.d5.clone())];
        for s in &self.steps {
            consumed.push(s.edge);
            out.push((consumed.clone(), s.poly.clone()));
        }
        out
    }

    pub fn is_drop(&self) -> bool {
        matches!(self.outcome, Outcome::WeightDrop { .. })
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self.outcome, Outcome::Reduced { .. })
    }

    pub fn is_stuck(&self) -> bool {
        matches!(self.outcome, Outcome::Stuck { .. })
    }

    /// Stage index of the latest denominator.
    pub fn stage(&self) -> usize {
        5 + self.steps.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<_> = self
            .steps
            .iter()
            .map(|s| json!({"edge": s.edge, "kind": s.kind.to_string(), "poly": s.poly.to_string()}))
            .collect();
        let outcome = match &self.outcome {
            Outcome::Reduced { last, consumed } => {
                json!({"kind": "reduced", "last": last.to_string(), "consumed": consumed})
            }
            Outcome::WeightDrop { stage, edge, evidence } => {
                json!({"kind": "weight-drop", "stage": stage, "edge": edge, "evidence": evidence})
            }
            Outcome::Stuck { stage, reasons } => {
                let rs: Vec<_> = reasons.iter().map(|(e, r)| json!({"edge": e, "reason": r})).collect();
                json!({"kind": "stuck", "stage": stage, "reasons": rs})
            }
        };
        json!({"five": self.five, "d5": self.d5.to_string(), "steps": steps, "outcome": outcome})
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let five: Vec<String> = self.five.iter().map(|e| e.to_string()).collect();
        writeln!(f, "D5 [{}] = {}", five.join(","), self.d5)?;
        for (n, s) in self.steps.iter().enumerate() {
            writeln!(f, "D{} [{}, {}] = {}", n + 6, s.edge, s.kind, s.poly)?;
        }
        match &self.outcome {
            Outcome::Reduced { consumed, .. } => writeln!(f, "REDUCED after {} edges", consumed.len()),
            Outcome::WeightDrop { stage, evidence, .. } => writeln!(f, "WEIGHT DROP at D{stage}: {evidence}"),
            Outcome::Stuck { stage, reasons } => {
                writeln!(f, "STUCK at D{stage}")?;
                for (e, r) in reasons {
                    match e {
                        Some(e) => writeln!(f, "  edge {e}: {r}")?,
                        None => writeln!(f, "  {r}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Result of integrating out one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Next(Poly, StepKind),
    Drop(String),
    Stuck(String),
}

/// One reduction step of `d` with respect to edge variable `x`.
pub fn reduce_step(d: &Poly, x: EdgeId) -> StepResult {
    let deg = d.degree_in(x);
    if deg > 2 {
        return StepResult::Stuck(format!("degree {deg} in a{x}"));
    }
    let q = match d.quadratic_in(x) {
        Ok(q) => q,
        Err(e) => return StepResult::Stuck(e.to_string()),
    };
    if q.a2.is_zero() {
        if q.a1.is_zero() {
            return StepResult::Drop(format!("denominator is free of a{x}, discriminant vanishes"));
        }
        return StepResult::Next(q.a1.normalized(), StepKind::LinearCollapse);
    }
    let delta = &q.a1.square() - &(&q.a2 * &q.a0).scale(4);
    if delta.is_zero() {
        return StepResult::Drop(format!("discriminant in a{x} vanishes identically"));
    }
    match delta.normalized().perfect_square_root() {
        Some(r) => StepResult::Next(r.normalized(), StepKind::Discriminant),
        None => StepResult::Stuck(format!("discriminant in a{x} is not a perfect square")),
    }
}

fn require_five(g: &Graph) -> Result<()> {
    if g.num_edges() < 5 {
        return Err(Error::TooFewEdges { needed: 5, have: g.num_edges() });
    }
    Ok(())
}

fn seed_trace(g: &Graph, five: [EdgeId; 5]) -> Result<ReductionTrace> {
    let d5 = five_invariant(g, five)?;
    let outcome = if d5.is_zero() {
        Outcome::WeightDrop { stage: 5, edge: None, evidence: "5-invariant vanishes".into() }
    } else {
        Outcome::Reduced { last: d5.clone(), consumed: five.to_vec() }
    };
    Ok(ReductionTrace { five, d5, steps: Vec::new(), outcome })
}

/// Reduces along exactly the edges of `order` (at least five, distinct).
pub fn reduce_sequence(g: &Graph, order: &[EdgeId]) -> Result<ReductionTrace> {
    require_five(g)?;
    if order.len() < 5 {
        return Err(Error::TooFewEdges { needed: 5, have: order.len() });
    }
    check_distinct(g, order)?;
    let five = [order[0], order[1], order[2], order[3], order[4]];
    let mut trace = seed_trace(g, five)?;
    if trace.is_drop() {
        return Ok(trace);
    }
    for &x in &order[5..] {
        let stage = trace.stage();
        match reduce_step(trace.last(), x) {
            StepResult::Next(p, kind) => trace.steps.push(Step { edge: x, poly: p, kind }),
            StepResult::Drop(ev) => {
                trace.outcome = Outcome::WeightDrop { stage: stage + 1, edge: Some(x), evidence: ev };
                return Ok(trace);
            }
            StepResult::Stuck(r) => {
                trace.outcome = Outcome::Stuck { stage, reasons: vec![(Some(x), r)] };
                return Ok(trace);
            }
        }
    }
    trace.outcome = Outcome::Reduced { last: trace.last().clone(), consumed: trace.consumed() };
    Ok(trace)
}

/// How to pick the reduction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    /// Edges in this order; all but one edge of the graph when complete.
    Explicit(Vec<EdgeId>),
    Auto,
}

/// Full denominator reduction: consumes all edges but one.
///
/// An explicit order shorter than `e_G - 1` is extended by the remaining
/// edges in increasing id, keeping the largest one as the surviving variable.
pub fn denominator_reduce(g: &Graph, order: &Order) -> Result<ReductionTrace> {
    require_five(g)?;
    match order {
        Order::Auto => auto_order_search(g),
        Order::Explicit(o) => {
            let mut full = o.clone();
            let mut rest: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !o.contains(e)).collect();
            rest.sort_unstable();
            let target = g.num_edges() - 1;
            for e in rest {
                if full.len() >= target {
                    break;
                }
                full.push(e);
            }
            reduce_sequence(g, &full)
        }
    }
}

/// Auto search over all edges, consuming `e_G - 1` of them.
pub fn auto_order_search(g: &Graph) -> Result<ReductionTrace> {
    require_five(g)?;
    let pool = g.edge_ids();
    search(g, &pool, pool.len() - 1, default_budget())
}

/// Auto search consuming exactly `target` edges drawn from `pool`.
pub fn auto_order_search_within(g: &Graph, pool: &[EdgeId], target: usize, budget: usize) -> Result<ReductionTrace> {
    require_five(g)?;
    check_distinct(g, pool)?;
    if target < 5 || target > pool.len() {
        return Err(Error::TooFewEdges { needed: target.max(5), have: pool.len() });
    }
    search(g, pool, target, budget)
}

fn seed_score(g: &Graph, s: &[EdgeId]) -> u32 {
    let mut score = 0;
    if g.parallel_pairs().iter().any(|(a, b)| s.contains(a) && s.contains(b)) {
        score += 4;
    }
    if g.triangles().iter().any(|t| t.iter().all(|e| s.contains(e))) {
        score += 2;
    }
    let three_valent = g.vertices().iter().any(|&v| {
        let inc = g.incident_edges(v);
        inc.len() == 3 && inc.iter().all(|e| s.contains(e))
    });
    if three_valent {
        score += 1;
    }
    score
}

fn five_subsets(pool: &[EdgeId]) -> Vec<[EdgeId; 5]> {
    let n = pool.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    for e in d + 1..n {
                        out.push([pool[a], pool[b], pool[c], pool[d], pool[e]]);
                    }
                }
            }
        }
    }
    out
}

struct Search<'a> {
    pool: &'a [EdgeId],
    target: usize,
    budget: usize,
    nodes: usize,
    failed: HashSet<Vec<EdgeId>>,
    deepest: Option<ReductionTrace>,
}

impl Search<'_> {
    fn note_stuck(&mut self, trace: ReductionTrace) {
        let deeper = match &self.deepest {
            None => true,
            Some(d) => trace.stage() > d.stage(),
        };
        if deeper {
            self.deepest = Some(trace);
        }
    }

    /// Extends `trace` (whose outcome is ignored) to a non-stuck trace.
    fn extend(&mut self, trace: &mut ReductionTrace) -> Option<ReductionTrace> {
        let consumed = trace.consumed();
        if consumed.len() == self.target {
            let mut done = trace.clone();
            done.outcome = Outcome::Reduced { last: trace.last().clone(), consumed };
            return Some(done);
        }
        let mut key = consumed.clone();
        key.sort_unstable();
        if self.failed.contains(&key) {
            return None;
        }
        let mut candidates: Vec<EdgeId> = self.pool.iter().copied().filter(|e| !consumed.contains(e)).collect();
        candidates.sort_unstable();
        let stage = trace.stage();
        let mut reasons = Vec::new();
        for x in candidates {
            if self.nodes >= self.budget {
                reasons.push((None, format!("search budget of {} nodes exhausted", self.budget)));
                break;
            }
            self.nodes += 1;
            match reduce_step(trace.last(), x) {
                StepResult::Drop(ev) => {
                    let mut t = trace.clone();
                    t.outcome = Outcome::WeightDrop { stage: stage + 1, edge: Some(x), evidence: ev };
                    return Some(t);
                }
                StepResult::Stuck(r) => reasons.push((Some(x), r)),
                StepResult::Next(p, kind) => {
                    trace.steps.push(Step { edge: x, poly: p, kind });
                    let found = self.extend(trace);
                    trace.steps.pop();
                    if found.is_some() {
                        return found;
                    }
                }
            }
        }
        if !reasons.is_empty() {
            let mut t = trace.clone();
            t.outcome = Outcome::Stuck { stage, reasons };
            self.note_stuck(t);
        }
        self.failed.insert(key);
        None
    }
}

fn search(g: &Graph, pool: &[EdgeId], target: usize, budget: usize) -> Result<ReductionTrace> {
    let mut seeds = five_subsets(pool);
    let scores: Vec<u32> = seeds.iter().map(|s| seed_score(g, s)).collect();
    let mut idx: Vec<usize> = (0..seeds.len()).collect();
    idx.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(seeds[a].cmp(&seeds[b])));
    seeds = idx.into_iter().map(|i| seeds[i]).collect();
    let mut s = Search { pool, target, budget, nodes: 0, failed: HashSet::new(), deepest: None };
    for five in seeds {
        if s.nodes >= budget {
            break;
        }
        s.nodes += 1;
        let mut trace = seed_trace(g, five)?;
        if trace.is_drop() {
            return Ok(trace);
        }
        if let Some(found) = s.extend(&mut trace) {
            return Ok(found);
        }
    }
    let exhausted = s.nodes >= budget;
    let mut t = match s.deepest {
        Some(t) => t,
        None => {
            let first = five_subsets(pool)[0];
            let d5 = five_invariant(g, first)?;
            ReductionTrace {
                five: first,
                d5,
                steps: Vec::new(),
                outcome: Outcome::Stuck { stage: 5, reasons: Vec::new() },
            }
        }
    };
    if exhausted {
        if let Outcome::Stuck { reasons, .. } = &mut t.outcome {
            if !reasons.iter().any(|(e, _)| e.is_none()) {
                reasons.push((None, format!("search budget of {budget} nodes exhausted")));
            }
        }
    }
    Ok(t)
}

/// Outcome of [`continue_auto`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuation {
    /// All requested variables consumed; `order` lists them.
    Reduced { order: Vec<EdgeId>, last: Poly },
    /// A discriminant vanished after consuming `order`, the last entry included.
    Drop { order: Vec<EdgeId> },
    /// No order worked; the budget may have run out.
    Stuck { exhausted: bool },
}

/// Continues reducing a known denominator `d` over `steps` variables from
/// `pool`, depth first with lowest edge id first.
pub fn continue_auto(d: &Poly, pool: &[EdgeId], steps: usize, budget: usize) -> Continuation {
    struct Dfs<'a> {
        pool: &'a [EdgeId],
        steps: usize,
        budget: usize,
        nodes: usize,
        failed: HashSet<Vec<EdgeId>>,
    }
    impl Dfs<'_> {
        fn go(&mut self, d: &Poly, order: &mut Vec<EdgeId>) -> Option<Continuation> {
            if order.len() == self.steps {
                return Some(Continuation::Reduced { order: order.clone(), last: d.clone() });
            }
            let mut key = order.clone();
            key.sort_unstable();
            if self.failed.contains(&key) {
                return None;
            }
            let mut cands: Vec<EdgeId> = self.pool.iter().copied().filter(|e| !order.contains(e)).collect();
            cands.sort_unstable();
            for x in cands {
                if self.nodes >= self.budget {
                    return None;
                }
                self.nodes += 1;
                match reduce_step(d, x) {
                    StepResult::Drop(_) => {
                        let mut o = order.clone();
                        o.push(x);
                        return Some(Continuation::Drop { order: o });
                    }
                    StepResult::Stuck(_) => {}
                    StepResult::Next(p, _) => {
                        order.push(x);
                        let found = self.go(&p, order);
                        order.pop();
                        if found.is_some() {
                            return found;
                        }
                    }
                }
            }
            self.failed.insert(key);
            None
        }
    }
    if d.is_zero() {
        return Continuation::Drop { order: Vec::new() };
    }
    let mut dfs = Dfs { pool, steps: steps.min(pool.len()), budget, nodes: 0, failed: HashSet::new() };
    match dfs.go(d, &mut Vec::new()) {
        Some(c) => c,
        None => Continuation::Stuck { exhausted: dfs.nodes >= budget },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoDropDetected,
    Drop,
    NotReducible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NoDropDetected => "no-drop-detected",
            Verdict::Drop => "drop",
            Verdict::NotReducible => "not-reducible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightEstimate {
    pub edges: usize,
    /// `e_G - 3`.
    pub max_weight: usize,
    /// `e_G - 4`.
    pub drop_weight: usize,
    pub verdict: Verdict,
}

impl WeightEstimate {
    /// The weight bound implied by the verdict.
    pub fn bound(&self) -> usize {
        match self.verdict {
            Verdict::Drop => self.drop_weight,
            _ => self.max_weight,
        }
    }
}

impl fmt::Display for WeightEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: weight at most {} (e_G = {})", self.verdict, self.bound(), self.edges)
    }
}

pub fn weight_estimate(g: &Graph, trace: &ReductionTrace) -> WeightEstimate {
    let e = g.num_edges();
    let verdict = match trace.outcome {
        Outcome::WeightDrop { .. } => Verdict::Drop,
        Outcome::Reduced { .. } => Verdict::NoDropDetected,
        Outcome::Stuck { .. } => Verdict::NotReducible,
    };
    WeightEstimate { edges: e, max_weight: e.saturating_sub(3), drop_weight: e.saturating_sub(4), verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dodgson::dodgson;

    fn w3() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 4), (2, 3), (3, 4), (1, 3), (1, 4)])
    }

    #[test]
    fn five_invariant_of_w3() {
        let g = w3();
        let d5 = five_invariant(&g, [1, 2, 3, 4, 5]).unwrap();
        assert_eq!(d5.degree(), Some(1));
        assert_eq!(d5.variables(), vec![6]);
        assert_eq!(five_invariant(&g, [1, 1, 3, 4, 5]), Err(Error::RepeatedEdge(1)));
    }

    #[test]
    fn five_invariant_permutations() {
        let g = w3();
        let base = five_invariant(&g, [1, 2, 3, 4, 5]).unwrap();
        for p in [[2, 1, 3, 4, 5], [5, 4, 3, 2, 1], [3, 5, 1, 2, 4]] {
            assert_eq!(five_invariant(&g, p).unwrap(), base);
        }
    }

    #[test]
    fn triangle_factorisation() {
        // 1,2,3 form a triangle on vertices 1,2,3.
        let g = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1), (1, 4), (2, 4), (3, 4), (4, 5), (5, 1)]);
        for l in 4..=8 {
            for m in 4..=8 {
                if l == m {
                    continue;
                }
                let five = five_invariant(&g, [1, 2, 3, l, m]).unwrap();
                let a = dodgson(&g, &DodgsonSpec::new(&[1, 2, 3], &[2, l, m], &[])).unwrap();
                let b = dodgson(&g, &DodgsonSpec::new(&[1, l], &[3, m], &[2])).unwrap();
                assert_eq!(five, (&a * &b).normalized(), "l={l} m={m}");
            }
        }
    }

    #[test]
    fn w3_reduces_without_drop() {
        let t = auto_order_search(&w3()).unwrap();
        assert!(t.is_reduced(), "{t}");
        assert_eq!(weight_estimate(&w3(), &t).bound(), 3);
    }

    #[test]
    fn double_edge_drops() {
        let mut g = w3();
        g.add_edge(1, 2);
        let t = auto_order_search(&g).unwrap();
        assert!(t.is_drop(), "{t}");
        let w = weight_estimate(&g, &t);
        assert_eq!((w.verdict, w.bound()), (Verdict::Drop, 3));
    }

    #[test]
    fn linear_and_square_steps() {
        let x = Poly::var(1);
        let y = Poly::var(2);
        let lin = &(&x * &y) + &y.scale(3);
        assert_eq!(reduce_step(&lin, 1), StepResult::Next(y.clone(), StepKind::LinearCollapse));
        let sq = (&x + &y).pow(2).scale(4);
        assert!(matches!(reduce_step(&sq, 1), StepResult::Drop(_)));
        assert!(matches!(reduce_step(&x.pow(3), 1), StepResult::Stuck(_)));
        assert!(matches!(reduce_step(&y, 1), StepResult::Drop(_)));
        let irr = &(&x * &x) + &y;
        assert!(matches!(reduce_step(&irr, 1), StepResult::Stuck(_)));
    }

    #[test]
    fn exactly_five_edges() {
        let g = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1), (1, 4), (4, 2)]);
        let t = reduce_sequence(&g, &[1, 2, 3, 4, 5]).unwrap();
        assert!(t.steps.is_empty());
        let small = Graph::from_pairs(&[(1, 2), (2, 3), (3, 1)]);
        assert!(auto_order_search(&small).is_err());
    }
}
