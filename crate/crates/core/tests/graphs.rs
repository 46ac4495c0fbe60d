use proptest::prelude::*;

use rigidcol::graph::{
    count_proper, count_rigid, in_subspace, is_proper, is_rigid, mc_first_moment, parse_graph,
    repair_to_rigid, sample_graph, Colouring, MultiGraph,
};
use rigidcol::model::ModelParams;
use rigidcol::Error;

fn small_graph() -> impl Strategy<Value = MultiGraph> {
    (1usize..=7).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=2 * n)
            .prop_map(move |edges| MultiGraph::new(n, edges).unwrap())
    })
}

/// Every proper colouring, by brute force.
fn proper_colourings(g: &MultiGraph) -> Vec<Colouring> {
    let n = g.n();
    (0..3usize.pow(n as u32))
        .map(|mut code| {
            let t = (0..n)
                .map(|_| {
                    let d = (code % 3) as u8;
                    code /= 3;
                    d
                })
                .collect();
            Colouring::new(t).unwrap()
        })
        .filter(|c| is_proper(g, c).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn repair_lands_on_rigid_colourings(g in small_graph()) {
        let all = proper_colourings(&g);
        prop_assert_eq!(all.len() as u64, count_proper(&g).unwrap());
        let rigid = all.iter().filter(|c| is_rigid(&g, c).unwrap()).count() as u64;
        prop_assert_eq!(rigid, count_rigid(&g).unwrap());
        for c in &all {
            let r = repair_to_rigid(&g, c).unwrap();
            prop_assert!(is_rigid(&g, &r).unwrap());
            // repair only ever raises types
            prop_assert!(r.types().iter().zip(c.types()).all(|(a, b)| a >= b));
        }
    }

    #[test]
    fn file_format_round_trips(g in small_graph()) {
        prop_assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }
}

#[test]
fn concentration_at_moderate_size() {
    let c = 2.468155;
    let params = ModelParams::new(c, 8, 0.05).unwrap();
    let n = 2000;
    let m = (c * n as f64).round() as usize;
    let hits = (0..100)
        .filter(|&s| in_subspace(&sample_graph(n, m, s).unwrap(), &params))
        .count();
    assert!(hits >= 90, "{hits}/100");
}

#[test]
fn mc_close_to_exact_mean_on_tiny_instance() {
    // n = 3, m = 2: average R over all 9² edge lists
    let mut total = 0;
    for a in 0..9 {
        for b in 0..9 {
            let g = MultiGraph::new(3, vec![(a / 3, a % 3), (b / 3, b % 3)]).unwrap();
            total += count_rigid(&g).unwrap();
        }
    }
    let exact = total as f64 / 81.0;
    let params = ModelParams::new(2.0 / 3.0, 4, 1.5).unwrap();
    let est = mc_first_moment(3, 2, &params, 20_000, 11).unwrap();
    assert!((est.estimate - exact).abs() < 4.0 * est.stderr, "{est:?} vs {exact}");
}

#[test]
fn counting_refuses_large_graphs() {
    let g = MultiGraph::empty(21).unwrap();
    assert!(matches!(count_rigid(&g), Err(Error::Capacity { n: 21, limit: 20 })));
}
