//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use plexrules_core::graph::{Label, LayerId, MultiplexGraph, NodeId};
use plexrules_core::pattern::{PEdge, Pattern};
use rand::Rng;

/// Isomorphism-class key: the minimum over all node permutations of
/// (labels, sorted arc list).
pub type OracleKey = (Vec<Label>, Vec<(u8, u8, LayerId)>);

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    fn rec(cur: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
        if at == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in at..cur.len() {
            cur.swap(at, i);
            rec(cur, at + 1, out);
            cur.swap(at, i);
        }
    }
    rec(&mut cur, 0, &mut out);
    out
}

/// Arcs of a pattern as (tail, head, layer); undirected edges as (min, max).
pub fn arcs(p: &Pattern) -> Vec<(u8, u8, LayerId)> {
    p.edges().iter().map(|e| if e.dir { (e.i, e.j, e.layer) } else { (e.j, e.i, e.layer) }).collect()
}

pub fn oracle_key_raw(labels: &[Label], arcs: &[(u8, u8, LayerId)], directed: bool) -> OracleKey {
    let k = labels.len();
    let mut best: Option<OracleKey> = None;
    for perm in permutations(k) {
        let mut l = vec![0; k];
        for (old, &new) in perm.iter().enumerate() {
            l[new] = labels[old];
        }
        let mut a: Vec<(u8, u8, LayerId)> = arcs
            .iter()
            .map(|&(x, y, layer)| {
                let (x, y) = (perm[x as usize] as u8, perm[y as usize] as u8);
                if directed || x < y {
                    (x, y, layer)
                } else {
                    (y, x, layer)
                }
            })
            .collect();
        a.sort();
        let cand = (l, a);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

pub fn oracle_key(p: &Pattern) -> OracleKey {
    oracle_key_raw(p.labels(), &arcs(p), p.directed())
}

/// Every injective label/layer/direction-preserving map, by trying all
/// k-tuples of distinct graph nodes.
pub fn brute_embeddings(labels: &[Label], arcs: &[(u8, u8, LayerId)], g: &MultiplexGraph) -> Vec<Vec<NodeId>> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let k = labels.len();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        labels: &[Label],
        arcs: &[(u8, u8, LayerId)],
        g: &MultiplexGraph,
        nodes: &[NodeId],
        cur: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if cur.len() == labels.len() {
            let ok = arcs.iter().all(|&(a, b, l)| g.has_edge(cur[a as usize], cur[b as usize], l));
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        for &v in nodes {
            if cur.contains(&v) || g.label(v) != labels[cur.len()] {
                continue;
            }
            cur.push(v);
            rec(labels, arcs, g, nodes, cur, out);
            cur.pop();
        }
    }
    rec(labels, arcs, g, &nodes, &mut cur, &mut out);
    let _ = k;
    out
}

pub fn brute_mis(embs: &[Vec<NodeId>], k: usize) -> usize {
    if embs.is_empty() {
        return 0;
    }
    (0..k).map(|x| embs.iter().map(|e| e[x]).collect::<BTreeSet<_>>().len()).min().unwrap()
}

fn connected(k: usize, arcs: &[(u8, u8, LayerId)]) -> bool {
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(a, b, _) in arcs {
        let (ra, rb) = (find(&mut comp, a as usize), find(&mut comp, b as usize));
        comp[ra] = rb;
    }
    let r = find(&mut comp, 0);
    (0..k).all(|x| find(&mut comp, x) == r)
}

/// All connected patterns with at most `s` nodes and support ≥ `sigma`,
/// found by enumerating connected edge subsets of the graph.
pub fn brute_mine(g: &MultiplexGraph, sigma: usize, s: usize) -> BTreeMap<OracleKey, usize> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let mut classes: BTreeMap<OracleKey, (Vec<Label>, Vec<(u8, u8, LayerId)>)> = BTreeMap::new();
    let n = nodes.len();
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > s {
            continue;
        }
        let sub: Vec<NodeId> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| nodes[i]).collect();
        let labels: Vec<Label> = sub.iter().map(|&v| g.label(v)).collect();
        let local = |v: NodeId| sub.iter().position(|&x| x == v).map(|i| i as u8);
        let induced: Vec<(u8, u8, LayerId)> = g
            .edges()
            .iter()
            .filter_map(|e| Some((local(e.u)?, local(e.v)?, e.layer)))
            .collect();
        assert!(induced.len() <= 20, "oracle graph too dense");
        for bits in 0u32..(1 << induced.len()) {
            let chosen: Vec<(u8, u8, LayerId)> =
                (0..induced.len()).filter(|&i| bits >> i & 1 == 1).map(|i| induced[i]).collect();
            if !connected(k, &chosen) {
                continue;
            }
            let key = oracle_key_raw(&labels, &chosen, g.directed());
            classes.entry(key).or_insert((labels.clone(), chosen));
        }
    }
    let mut out = BTreeMap::new();
    for (key, (labels, arcs)) in classes {
        let embs = brute_embeddings(&labels, &arcs, g);
        let sup = brute_mis(&embs, labels.len());
        if sup >= sigma {
            out.insert(key, sup);
        }
    }
    out
}

pub fn random_graph<R: Rng>(
    rng: &mut R,
    n: u32,
    layers: u16,
    labels: u16,
    directed: bool,
    p_edge: f64,
) -> MultiplexGraph {
    let mut edges = Vec::new();
    for l in 0..layers {
        for u in 0..n {
            for v in 0..n {
                if u == v || (!directed && v < u) {
                    continue;
                }
                if rng.gen_bool(p_edge) {
                    edges.push((u, v, l));
                }
            }
        }
    }
    let lab = (0..n).map(|_| rng.gen_range(0..labels)).collect();
    MultiplexGraph::from_edges(n as usize, layers as usize, directed, &edges, Some(lab)).unwrap()
}

pub fn random_connected_pattern<R: Rng>(rng: &mut R, k: usize, layers: u16, labels: u16, extra: usize, directed: bool) -> Pattern {
    let lab: Vec<Label> = (0..k).map(|_| rng.gen_range(0..labels)).collect();
    let mut edges = Vec::new();
    for x in 1..k {
        let y = rng.gen_range(0..x);
        let (a, b) = if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
        edges.push(PEdge::arc(a as u8, b as u8, rng.gen_range(0..layers), directed));
    }
    if k >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..k);
            let b = (a + rng.gen_range(1..k)) % k;
            edges.push(PEdge::arc(a as u8, b as u8, rng.gen_range(0..layers), directed));
        }
    }
    Pattern::new(lab, edges, directed).unwrap()
}

/// Scores by re-enumerating every antecedent embedding per rule. Firings
/// are collapsed when they use the same graph nodes and edges and predict
/// the same link.
pub fn brute_scores(
    g: &MultiplexGraph,
    rules: &plexrules_core::rules::RuleSet,
    dedupe: bool,
) -> BTreeMap<(NodeId, Option<NodeId>, LayerId), f64> {
    let mut scores: BTreeMap<(NodeId, Option<NodeId>, LayerId), f64> = BTreeMap::new();
    for r in rules.iter() {
        let a = r.antecedent.decode(g.directed()).unwrap();
        let a_arcs = arcs(&a);
        let d = r.delta.edge;
        // rules naming a layer or label the graph lacks are skipped
        let max_label = a.labels().iter().chain(r.delta.new_label.iter()).max().copied().unwrap_or(0);
        let max_layer = a_arcs.iter().map(|e| e.2).chain([d.layer]).max().unwrap_or(0);
        if max_label as usize >= g.label_count() || max_layer as usize >= g.layer_count() {
            continue;
        }
        let (t, h) = if d.dir { (d.i, d.j) } else { (d.j, d.i) };
        let mut seen = BTreeSet::new();
        for emb in brute_embeddings(a.labels(), &a_arcs, g) {
            let target = if r.delta.new_label.is_some() {
                let at = if t as usize == a.k() { h } else { t };
                (emb[at as usize], None, d.layer)
            } else {
                let (u, v) = (emb[t as usize], emb[h as usize]);
                if g.has_edge(u, v, d.layer) {
                    continue;
                }
                let (u, v) = if !g.directed() && u > v { (v, u) } else { (u, v) };
                (u, Some(v), d.layer)
            };
            let mut nodes = emb.clone();
            nodes.sort();
            let mut used: Vec<(NodeId, NodeId, LayerId)> = a_arcs
                .iter()
                .map(|&(x, y, l)| {
                    let (u, v) = (emb[x as usize], emb[y as usize]);
                    if !g.directed() && u > v {
                        (v, u, l)
                    } else {
                        (u, v, l)
                    }
                })
                .collect();
            used.sort();
            let key = if dedupe { (Vec::new(), Vec::new(), target) } else { (nodes, used, target) };
            if seen.insert(key) {
                *scores.entry(target).or_insert(0.0) += r.confidence;
            }
        }
    }
    scores
}

/// A random rule set over small antecedents, each delta valid for its
/// antecedent.
pub fn random_rules<R: Rng>(rng: &mut R, count: usize, layers: u16, labels: u16, directed: bool) -> plexrules_core::rules::RuleSet {
    use plexrules_core::miner::Delta;
    use plexrules_core::pattern::Strategy;
    use plexrules_core::rules::{AssociationRule, RuleSet};
    let mut rules = Vec::new();
    while rules.len() < count {
        let k = rng.gen_range(1..=3);
        let extra = rng.gen_range(0..2);
        let p = random_connected_pattern(rng, k, layers, labels, extra, directed);
        let layer = rng.gen_range(0..layers);
        let delta = if k >= 2 && rng.gen_bool(0.5) {
            let a = rng.gen_range(0..k as u8);
            let b = (a + rng.gen_range(1..k as u8)) % k as u8;
            let e = PEdge::arc(a, b, layer, directed);
            if p.has_edge(&e) {
                continue;
            }
            Delta { edge: e, new_label: None }
        } else {
            let at = rng.gen_range(0..k as u8);
            let (a, b) = if rng.gen_bool(0.5) { (at, k as u8) } else { (k as u8, at) };
            Delta { edge: PEdge::arc(a, b, layer, directed), new_label: Some(rng.gen_range(0..labels)) }
        };
        let sa = rng.gen_range(1..20);
        let sc = rng.gen_range(1..=sa);
        rules.push(AssociationRule::from_parts(&p, delta, sa, sc, Strategy::Bfs).unwrap());
    }
    RuleSet::new(rules, directed, Strategy::Bfs)
}

/// Compares a score table with an oracle map within a relative tolerance.
pub fn scores_match(
    table: &plexrules_core::predictor::ScoreTable,
    want: &BTreeMap<(NodeId, Option<NodeId>, LayerId), f64>,
    rel: f64,
) -> bool {
    use plexrules_core::predictor::{Candidate, Target};
    let got: BTreeMap<(NodeId, Option<NodeId>, LayerId), f64> = table
        .entries()
        .into_iter()
        .map(|(c, s): (Candidate, f64)| {
            let v = match c.v {
                Target::Old(v) => Some(v),
                Target::New => None,
            };
            ((c.u, v, c.layer), s)
        })
        .collect();
    got.len() == want.len()
        && got.iter().zip(want).all(|((ka, a), (kb, b))| ka == kb && (a - b).abs() <= rel * a.abs().max(b.abs()))
}
