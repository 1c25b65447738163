use graphpoly::double_triangle::{contract_double_triangle, find_double_triangles, split_pair, SiteKind};
use graphpoly::random::{connected_multigraph, rng, RandomGraphOptions};
use graphpoly::reduction::{reduce_sequence, Outcome};
use graphpoly::{EdgeId, Graph, Poly};

fn final_denominator(g: &Graph, order: &[EdgeId]) -> Option<Poly> {
    let t = reduce_sequence(g, order).unwrap();
    match t.outcome {
        Outcome::Reduced { last, .. } => Some(last),
        Outcome::WeightDrop { .. } => Some(Poly::zero()),
        Outcome::Stuck { .. } => None,
    }
}

fn blob(seed: u64) -> Graph {
    let mut r = rng(seed);
    let opts = RandomGraphOptions { vertices: 5, edges: 6, self_loops: false, parallel: false };
    connected_multigraph(&mut r, opts)
}

#[test]
fn split_preserves_denominator_on_random_blobs() {
    let mut nonzero = 0;
    for seed in 0..10 {
        let k = blob(seed);
        let (g, gp, site) = split_pair(&k, 1, 2, 3, 4).unwrap();
        let (so, co) = site.orders(&gp).unwrap();
        let big = final_denominator(&gp, &so).expect("split graph reduces over the site");
        let small = final_denominator(&g, &co).expect("five edges always reduce");
        assert_eq!(big, small, "seed {seed}");
        nonzero += usize::from(!big.is_zero());
    }
    assert!(nonzero >= 5, "only {nonzero} nonzero denominators");
}

#[test]
fn partial_patterns() {
    let mut checked = [0usize; 2];
    for seed in 0..40 {
        let k = blob(seed);
        let (_, gp, _) = split_pair(&k, 1, 2, 3, 4).unwrap();
        for (kind, removed) in [(SiteKind::ThreeValentHub, vec![4]), (SiteKind::SingleTriangle, vec![6, 7])] {
            let mut h = gp.clone();
            for e in &removed {
                h = h.delete_edge(*e).unwrap();
            }
            if !h.is_connected() {
                continue;
            }
            for site in find_double_triangles(&h).into_iter().filter(|s| s.kind == kind) {
                let Some((so, co)) = site.orders(&h) else { continue };
                let small_g = contract_double_triangle(&h, &site).unwrap();
                let (Some(big), Some(small)) = (final_denominator(&h, &so), final_denominator(&small_g, &co)) else {
                    continue;
                };
                assert_eq!(big, small, "seed {seed} {kind} {site:?}");
                if !big.is_zero() {
                    checked[(kind == SiteKind::SingleTriangle) as usize] += 1;
                }
            }
        }
    }
    eprintln!("checked {checked:?}");
    assert!(checked.iter().all(|&c| c > 0));
}
