mod common;

use std::collections::BTreeMap;

use common::{brute_embeddings, brute_mine, oracle_key, random_graph};
use plexrules_core::embed::enumerate_embeddings;
use plexrules_core::miner::{mine, MiningConfig, Support};
use plexrules_core::pattern::Strategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mine_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..60 {
        let n = rng.gen_range(3..=7);
        let layers = rng.gen_range(1..=3);
        let labels = rng.gen_range(1..=3);
        let directed = rng.gen_bool(0.5);
        let g = random_graph(&mut rng, n, layers, labels, directed, 0.18 / layers as f64 * 2.0);
        let sigma = rng.gen_range(1..=3);
        let s = rng.gen_range(1..=4);
        let want = brute_mine(&g, sigma, s);
        for strategy in [Strategy::Bfs, Strategy::Dfs] {
            let cfg = MiningConfig {
                strategy,
                ..MiningConfig::new(Support::Absolute(sigma), s)
            };
            let set = mine(&g, &cfg, None).unwrap();
            let got: BTreeMap<_, _> = set.iter().map(|p| (oracle_key(&p.pattern), p.support)).collect();
            assert_eq!(got.len(), set.len(), "round {round}: duplicate classes");
            assert_eq!(got, want, "round {round} {strategy}: {}", g.edges_string());
        }
    }
}

#[test]
fn embeddings_match_brute_force_matcher() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let directed = rng.gen_bool(0.5);
        let g = random_graph(&mut rng, 8, 2, 2, directed, 0.3);
        let extra = rng.gen_range(0..2);
        let p = common::random_connected_pattern(&mut rng, 3, 2, 2, extra, directed);
        let mut got = enumerate_embeddings(&p, &g).unwrap().to_vecs();
        got.sort();
        let mut want = brute_embeddings(p.labels(), &common::arcs(&p), &g);
        want.sort();
        assert_eq!(got, want);
    }
}
