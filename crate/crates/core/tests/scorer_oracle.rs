mod common;

use common::{brute_scores, random_graph, random_rules, scores_match};
use plexrules_core::miner::{MiningConfig, Support};
use plexrules_core::predictor::{apply_rules, apply_rules_with, PredictOptions};
use plexrules_core::rules::{mine_with_rules, RuleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn apply_rules_matches_brute_force_scorer() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..60 {
        let directed = rng.gen_bool(0.5);
        let n = rng.gen_range(4..=10);
        let g = random_graph(&mut rng, n, 2, 2, directed, 0.25);
        let rules = random_rules(&mut rng, 12, 2, 2, directed);
        for dedupe in [false, true] {
            let got = apply_rules(&g, &rules, PredictOptions { dedupe_rule_firings: dedupe }).unwrap();
            let want = brute_scores(&g, &rules, dedupe);
            assert!(scores_match(&got, &want, 1e-9), "round {round} dedupe {dedupe}");
        }
    }
}

#[test]
fn mined_rules_score_like_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let directed = rng.gen_bool(0.5);
        let g = random_graph(&mut rng, 8, 2, 2, directed, 0.2);
        let (patterns, rules) = mine_with_rules(&g, &MiningConfig::new(Support::Absolute(1), 3), 0.3).unwrap();
        let stored = apply_rules_with(&g, &rules, Some(&patterns), PredictOptions::default()).unwrap();
        assert!(scores_match(&stored, &brute_scores(&g, &rules, false), 1e-9));
    }
}

#[test]
fn scores_are_additive_and_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let directed = rng.gen_bool(0.5);
        let g = random_graph(&mut rng, 8, 2, 2, directed, 0.25);
        let rules = random_rules(&mut rng, 10, 2, 2, directed);
        let (r1, r2): (Vec<_>, Vec<_>) = rules.iter().cloned().enumerate().partition(|(i, _)| i % 2 == 0);
        let r1 = RuleSet::new(r1.into_iter().map(|x| x.1).collect(), directed, rules.strategy);
        let r2 = RuleSet::new(r2.into_iter().map(|x| x.1).collect(), directed, rules.strategy);
        let opts = PredictOptions::default();
        let all = apply_rules(&g, &rules, opts).unwrap();
        let mut sum = apply_rules(&g, &r1, opts).unwrap();
        let part = sum.clone();
        sum.merge(&apply_rules(&g, &r2, opts).unwrap());
        let a = all.entries();
        let b = sum.entries();
        assert_eq!(a.len(), b.len());
        for ((ca, sa), (cb, sb)) in a.iter().zip(&b) {
            assert_eq!(ca, cb);
            assert!((sa - sb).abs() <= 1e-9 * sa.abs());
        }
        for (c, s) in part.entries() {
            assert!(all.get(&c) >= s - 1e-12);
        }
    }
}
