//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use graphpoly::catalog;
use graphpoly::cuts::CutDecomposition;
use graphpoly::dodgson::{check_sign_laws, dodgson, three_way, DodgsonSpec, SignLawTally};
use graphpoly::double_triangle::split_pair;
use graphpoly::forest::psi;
use graphpoly::matrix::int_det;
use graphpoly::predictor::{
    direct_left_reduction, predict, rho_table_check, three_join_reduce, PredictVerdict, RhoMatch, RuleStep,
};
use graphpoly::random::{connected_multigraph, rng, sized_multigraph, RandomGraphOptions};
use graphpoly::reduction::{
    denominator_reduce, five_invariant, reduce_sequence, reduce_step, Order, Outcome, StepResult,
};
use graphpoly::suite::{corpus_reports, random_reports};
use graphpoly::{EdgeId, Graph, Poly};
use rand::seq::SliceRandom;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t0: Instant, limit: Duration) -> Result<(), String> {
    ensure(t0.elapsed() <= limit, || format!("took {:.1?}, limit {limit:?}", t0.elapsed()))
}

fn fixture(name: &str) -> Graph {
    catalog::get(name).expect("bundled fixture").graph()
}

/// Fixtures that count for hard acceptance.
fn corpus() -> Vec<catalog::Fixture> {
    catalog::all().into_iter().filter(|f| !f.unverified()).collect()
}

fn dual_construction() -> Check {
    let t0 = Instant::now();
    let mut graphs: Vec<Graph> = catalog::all().iter().map(|f| f.graph()).collect();
    let mut r = rng(1);
    for _ in 0..500 {
        graphs.push(sized_multigraph(&mut r, 1, 12, true));
    }
    for g in &graphs {
        let a = psi(g).map_err(|e| e.to_string())?.normalize_sign();
        let b = g.psi_det().map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{g:?}: {a} vs {b}"))?;
    }
    within(t0, Duration::from_secs(60))?;
    Ok(format!("{} graphs", graphs.len()))
}

/// Returns the sign-law tally for the next criterion.
fn dodgson_three_way(tally: &mut SignLawTally) -> Check {
    let t0 = Instant::now();
    let mut r = rng(7);
    let mut nonzero = 0;
    for _ in 0..200 {
        let g = sized_multigraph(&mut r, 4, 10, false);
        let n = r.gen_range(1..=3usize).min(g.num_edges() / 2);
        let mut ids = g.edge_ids();
        ids.shuffle(&mut r);
        let (i, j) = (ids[..n].to_vec(), ids[n..2 * n].to_vec());
        let (det, pairs, forest, exp) = three_way(&g, &i, &j).map_err(|e| e.to_string())?;
        ensure(det.eq_up_to_sign(&pairs), || format!("{g:?} I={i:?} J={j:?}: {det} vs pairs {pairs}"))?;
        ensure(det.eq_up_to_sign(&forest), || format!("{g:?} I={i:?} J={j:?}: {det} vs forests {forest}"))?;
        nonzero += usize::from(!det.is_zero());
        tally.add(&check_sign_laws(&g, &i, &j, &exp).map_err(|e| e.to_string())?);
    }
    within(t0, Duration::from_secs(120))?;
    Ok(format!("200 instances, {nonzero} nonzero"))
}

fn sign_corollaries(tally: &SignLawTally) -> Check {
    ensure(tally.ok(), || format!("{tally:?}"))?;
    ensure(tally.transpositions_checked > 0 && tally.switches_checked > 0, || format!("vacuous: {tally:?}"))?;
    let first = [
        int_det(&[vec![1, -1, 0], vec![0, 1, -1], vec![0, 1, 0]]),
        int_det(&[vec![1, -1, 0], vec![0, -1, 1], vec![0, 0, 1]]),
    ];
    let second = [
        int_det(&[vec![1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 1, 0, -1]]),
        int_det(&[vec![1, 0, 0, 0], vec![0, -1, 0, 0], vec![1, 0, -1, 0], vec![1, 0, 0, -1]]),
    ];
    let note = format!("{} transpositions, {} switches", tally.transpositions_checked, tally.switches_checked);
    ensure(first == [(-1).into(), 1.into()], || {
        format!("{note}; first example determinants {first:?}, expected [-1, 1]")
    })?;
    ensure(second == [(-1).into(), (-1).into()], || {
        format!("{note}; second example determinants {second:?}, expected [-1, -1]")
    })?;
    Ok(note)
}

fn identity_suite() -> Check {
    let t0 = Instant::now();
    let mut reports = Vec::new();
    for (k, f) in corpus().iter().enumerate() {
        reports.extend(corpus_reports(f.name, &f.graph(), k as u64).map_err(|e| e.to_string())?);
    }
    let corpus_count = reports.len();
    reports.extend(random_reports(50, 11).map_err(|e| e.to_string())?);
    for rep in &reports {
        ensure(rep.passed, || rep.to_string())?;
    }
    let count = |prefix: &str| reports.iter().filter(|r| r.identity.starts_with(prefix)).count();
    for kind in ["two-join", "transfer", "pluecker", "three-join"] {
        ensure(count(kind) >= 50, || format!("only {} {kind} checks", count(kind)))?;
    }
    within(t0, Duration::from_secs(300))?;
    Ok(format!("{} checks ({corpus_count} on the corpus)", reports.len()))
}

fn permutations(items: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn subsets(items: &[EdgeId], k: usize) -> Vec<Vec<EdgeId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out: Vec<Vec<EdgeId>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], k));
    out
}

fn five(g: &Graph, e: &[EdgeId]) -> Result<Poly, String> {
    five_invariant(g, [e[0], e[1], e[2], e[3], e[4]]).map_err(|e| e.to_string())
}

fn five_invariant_laws() -> Check {
    let mut orderings = 0;
    for name in ["w3", "k4", "w4"] {
        let g = fixture(name);
        let base_edges = &g.edge_ids()[..5];
        let base = five(&g, base_edges)?;
        ensure(!base.is_zero(), || format!("{name}: vanishing 5-invariant"))?;
        for p in permutations(base_edges) {
            let v = five(&g, &p)?;
            ensure(v.eq_up_to_sign(&base), || format!("{name} {p:?}: {v} vs {base}"))?;
            orderings += 1;
        }
    }
    let mut factorised = 0;
    for name in ["w3", "k4"] {
        let g = fixture(name);
        let ids = g.edge_ids();
        let triangles = g.triangles();
        for s in subsets(&ids, 5) {
            for t in triangles.iter().filter(|t| t.iter().all(|e| s.contains(e))) {
                let rest: Vec<EdgeId> = s.iter().copied().filter(|e| !t.contains(e)).collect();
                for roles in permutations(t) {
                    for lm in permutations(&rest) {
                        let [t1, t2, t3] = [roles[0], roles[1], roles[2]];
                        let (l, m) = (lm[0], lm[1]);
                        let lhs = five(&g, &[t1, t2, t3, l, m])?;
                        let a = dodgson(&g, &DodgsonSpec::new(&[t1, t2, t3], &[t2, l, m], &[]))
                            .map_err(|e| e.to_string())?;
                        let b = dodgson(&g, &DodgsonSpec::new(&[t1, l], &[t3, m], &[t2])).map_err(|e| e.to_string())?;
                        let rhs = (&a * &b).normalized();
                        ensure(lhs == rhs, || format!("{name} ({t1},{t2},{t3},{l},{m}): {lhs} vs {rhs}"))?;
                        factorised += 1;
                    }
                }
            }
        }
    }
    ensure(factorised > 0, || "no triangle-containing tuples".into())?;
    Ok(format!("{orderings} orderings, {factorised} factorised tuples"))
}

/// `D_n` after the given order, zero for a weight drop, `None` when stuck.
fn final_denominator(g: &Graph, order: &[EdgeId]) -> Result<Option<Poly>, String> {
    let t = reduce_sequence(g, order).map_err(|e| e.to_string())?;
    Ok(match t.outcome {
        Outcome::Reduced { last, .. } => Some(last.normalized()),
        Outcome::WeightDrop { .. } => Some(Poly::zero()),
        Outcome::Stuck { .. } => None,
    })
}

fn double_triangle_theorem() -> Check {
    let t0 = Instant::now();
    let mut nonzero = 0;
    for seed in 0..10 {
        let mut r = rng(100 + seed);
        let opts = RandomGraphOptions { vertices: 5, edges: 6, self_loops: false, parallel: false };
        let k = connected_multigraph(&mut r, opts);
        let (g, gp, site) = split_pair(&k, 1, 2, 3, 4).map_err(|e| e.to_string())?;
        let (split_order, contracted_order) = site.orders(&gp).ok_or("site has no orders")?;
        let big = final_denominator(&gp, &split_order)?.ok_or("split graph stuck")?;
        let small = final_denominator(&g, &contracted_order)?.ok_or("contracted graph stuck")?;
        ensure(big == small, || format!("seed {seed}: {big} vs {small}"))?;
        nonzero += usize::from(!big.is_zero());
    }
    within(t0, Duration::from_secs(180))?;
    Ok(format!("10 pairs, {nonzero} nonzero"))
}

fn rho_table() -> Check {
    let t0 = Instant::now();
    let rows = rho_table_check().map_err(|e| e.to_string())?;
    let bad: Vec<String> = rows.iter().filter(|r| r.matched == RhoMatch::Mismatch).map(|r| r.to_string()).collect();
    ensure(bad.is_empty(), || bad.join("; "))?;
    let permuted = rows.iter().filter(|r| matches!(r.matched, RhoMatch::Permuted(_))).count();
    within(t0, Duration::from_secs(300))?;
    Ok(format!("{} rows, {permuted} after relabelling terminals", rows.len()))
}

fn weight_drop_verdicts() -> Check {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    for (name, drop) in [
        ("k34", true),
        ("cor-G", true),
        ("2join-w3-w3", true),
        ("2join-w3-w4", true),
        ("w3-double", true),
        ("w3", false),
        ("k4", false),
    ] {
        let t = denominator_reduce(&fixture(name), &Order::Auto).map_err(|e| e.to_string())?;
        let ok = if drop { t.is_drop() } else { t.is_reduced() };
        ensure(ok, || {
            format!("{name}: expected {}, got\n{t}", if drop { "a weight drop" } else { "reduction without drop" })
        })?;
        lines.push(name);
    }
    within(t0, Duration::from_secs(600))?;
    Ok(lines.join(", "))
}

/// Every order reachable by single steps, recording `D` per consumed set.
fn explore(
    d: &Poly,
    consumed: &BTreeSet<EdgeId>,
    pool: &[EdgeId],
    seen: &mut HashMap<BTreeSet<EdgeId>, Poly>,
    visits: &mut usize,
) -> Result<(), String> {
    *visits += 1;
    if let Some(prev) = seen.get(consumed) {
        return ensure(prev == d, || format!("{consumed:?}: {prev} vs {d}"));
    }
    seen.insert(consumed.clone(), d.clone());
    if d.is_zero() {
        return Ok(());
    }
    for &x in pool.iter().filter(|x| !consumed.contains(x)) {
        let next = match reduce_step(d, x) {
            StepResult::Next(p, _) => p.normalized(),
            StepResult::Drop(_) => Poly::zero(),
            StepResult::Stuck(_) => continue,
        };
        let mut c = consumed.clone();
        c.insert(x);
        explore(&next, &c, pool, seen, visits)?;
    }
    Ok(())
}

fn order_independence() -> Check {
    let mut out = Vec::new();
    for name in ["w3", "k4", "w4"] {
        let g = fixture(name);
        let ids = g.edge_ids();
        let mut seen = HashMap::new();
        let mut visits = 0;
        for s in subsets(&ids, 5) {
            for p in permutations(&s) {
                let d5 = five(&g, &p)?.normalized();
                explore(&d5, &s.iter().copied().collect(), &ids, &mut seen, &mut visits)
                    .map_err(|e| format!("{name}: {e}"))?;
            }
        }
        out.push(format!("{name}: {} sets over {visits} visits", seen.len()));
    }
    Ok(out.join(", "))
}

fn join_cut(g: &Graph, left: std::ops::RangeInclusive<EdgeId>) -> CutDecomposition {
    let (l, r): (Vec<EdgeId>, Vec<EdgeId>) = g.edge_ids().into_iter().partition(|e| left.contains(e));
    CutDecomposition { cut: vec![1, 2, 3], left: l, right: r }
}

fn three_join_substitution() -> Check {
    let t0 = Instant::now();
    let k34 = fixture("k34");
    let cut = join_cut(&k34, 1..=6);
    let substituted = three_join_reduce(&k34, &cut).map_err(|e| e.to_string())?;
    let direct = direct_left_reduction(&k34, &cut).map_err(|e| e.to_string())?;
    ensure(direct.is_reduced() && direct.consumed().len() == 6, || format!("direct reduction incomplete:\n{direct}"))?;
    ensure(substituted.eq_up_to_sign(direct.last()), || format!("k34: {substituted} vs {}", direct.last()))?;
    // 8a-8a and 8a-8b share their first side; 8a-8b and 8b-8b share their second
    let reduce = |name: &str, left: std::ops::RangeInclusive<EdgeId>| -> Result<Poly, String> {
        let g = fixture(name);
        three_join_reduce(&g, &join_cut(&g, left)).map_err(|e| e.to_string())
    };
    let aa = reduce("8a-8a", 9..=16)?;
    let ab_first = reduce("8a-8b", 9..=16)?;
    let ab_second = reduce("8a-8b", 1..=8)?;
    let bb = reduce("8b-8b", 1..=8)?;
    ensure(!aa.is_zero() && !bb.is_zero(), || "vanishing composite denominator".into())?;
    ensure(aa.eq_up_to_sign(&ab_first), || format!("8a-8a vs 8a-8b: {aa} vs {ab_first}"))?;
    ensure(ab_second.eq_up_to_sign(&bb), || format!("8a-8b vs 8b-8b: {ab_second} vs {bb}"))?;
    within(t0, Duration::from_secs(600))?;
    Ok(format!("k34 degree {:?}, composites degree {:?}", substituted.degree(), aa.degree()))
}

fn predictor_soundness() -> Check {
    let mut drops = 0;
    let mut confirmed = 0;
    for f in corpus().into_iter().filter(|f| f.graph().num_edges() >= 5) {
        let g = f.graph();
        let p = predict(&g).map_err(|e| format!("{}: {e}", f.name))?;
        if p.verdict != PredictVerdict::Drop {
            continue;
        }
        drops += 1;
        let t = denominator_reduce(&g, &Order::Auto).map_err(|e| e.to_string())?;
        ensure(!t.is_reduced(), || format!("{}: predicted drop but reduced without one\n{p}{t}", f.name))?;
        confirmed += usize::from(t.is_drop());
    }
    let p = predict(&fixture("wtdrop")).map_err(|e| e.to_string())?;
    let chain = matches!(p.rules.as_slice(), [RuleStep::DoubleTriangle { .. }, RuleStep::TwoVertexReducible { .. }]);
    ensure(p.verdict == PredictVerdict::Drop && chain, || format!("wtdrop: {p}"))?;
    Ok(format!("{drops} predicted drops, {confirmed} confirmed by reduction"))
}

fn main() {
    let mut tally = SignLawTally::default();
    let mut failed = 0;
    let mut run = |n: usize, what: &str, f: &mut dyn FnMut() -> Check| {
        let t0 = Instant::now();
        let result = f();
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("PASS criterion {n:2}: {what} ({note}) [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:2}: {what}: {why} [{secs:.1}s]");
            }
        }
    };
    run(1, "Kirchhoff polynomial by trees and by determinant", &mut dual_construction);
    run(2, "Dodgson polynomials three ways", &mut || dodgson_three_way(&mut tally));
    run(3, "sign corollaries and worked examples", &mut || sign_corollaries(&tally));
    run(4, "identity suite", &mut identity_suite);
    run(5, "5-invariant symmetry and triangle factorisation", &mut five_invariant_laws);
    run(6, "double-triangle reduction", &mut double_triangle_theorem);
    run(7, "rho table", &mut rho_table);
    run(8, "weight-drop verdicts", &mut weight_drop_verdicts);
    run(9, "reduction order independence", &mut order_independence);
    run(10, "three-join substitution", &mut three_join_substitution);
    run(11, "predictor soundness", &mut predictor_soundness);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
