mod common;

use cdt::geom::cost;
use cdt::oracle::funnel::funnel_shortest;
use cdt::{dissect, gamma_star, optimal_homotopic_path};
use common::*;

#[test]
fn solver_matches_funnel_on_random_encodings() {
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for seed in 0..6u64 {
        let env = random_map(100 + seed, 8);
        let g = dissect(&env).unwrap();
        let mut r = rng(seed);
        for _ in 0..200 {
            let e = random_encoding(&g, 25, &mut r);
            let p = optimal_homotopic_path(&g, &e).unwrap();
            let f = funnel_shortest(&g, &e).unwrap();
            let (cp, cf) = (cost(&p), cost(&f));
            let rel = (cp - cf).abs() / cf.max(1.0);
            worst = worst.max(rel);
            if !rel_close(cp, cf, 1e-6) {
                fails += 1;
                eprintln!("seed {seed} {:?} ohp {cp} funnel {cf}", e.seq.cells().len());
            }
            assert_eq!(gamma_star(&g, &p).unwrap().seq, e.seq);
        }
    }
    eprintln!("worst relative gap {worst:e}");
    assert_eq!(fails, 0);
}
