use graphpoly::dodgson::{check_sign_laws, three_way, SignLawTally};
use graphpoly::random::{rng, sized_multigraph};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn three_routes_agree_on_random_instances() {
    let mut r = rng(7);
    let mut tally = SignLawTally::default();
    let mut nonzero = 0;
    for _ in 0..200 {
        let g = sized_multigraph(&mut r, 4, 10, false);
        let n = r.gen_range(1..=3usize).min(g.num_edges() / 2);
        let mut ids = g.edge_ids();
        ids.shuffle(&mut r);
        let (i, j) = (ids[..n].to_vec(), ids[n..2 * n].to_vec());
        let (det, pairs, forest, exp) = three_way(&g, &i, &j).unwrap();
        assert!(det.eq_up_to_sign(&pairs), "{g:?} {i:?} {j:?}\n{det}\n{pairs}");
        assert!(det.eq_up_to_sign(&forest), "{g:?} {i:?} {j:?}\n{det}\n{forest}");
        if !det.is_zero() {
            nonzero += 1;
        }
        tally.add(&check_sign_laws(&g, &i, &j, &exp).unwrap());
    }
    println!("nonzero {nonzero}");
    assert!(nonzero > 50);
    assert!(tally.ok(), "{tally:?}");
    println!("{tally:?}");
}
