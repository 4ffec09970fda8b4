//! Train/test splits, ROC/AUC over candidate universes, baselines and the
//! ensemble combiner.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::graph::{Edge, LayerId, MultiplexGraph, NodeId, TemporalMultiplexGraph};
use crate::miner::MiningConfig;
use crate::predictor::{apply_rules_with, Candidate, LinkClass, PredictOptions, ScoreTable, Target};
use crate::rules::mine_with_rules;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    KFold { k: usize, fold: usize, seed: u64 },
    Temporal { t: i64, delta: i64 },
}

/// A training graph and the edges held out from it.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: MultiplexGraph,
    /// Normalized and sorted; disjoint from the training edges.
    pub test_edges: Vec<Edge>,
    pub mode: SplitMode,
}

impl Split {
    pub fn new(train: MultiplexGraph, mut test_edges: Vec<Edge>, mode: SplitMode) -> Result<Self> {
        for e in &mut test_edges {
            *e = train.normalize(*e);
            if train.contains(e) {
                return Err(Error::invalid(format!("test edge {e:?} is also a training edge")));
            }
        }
        test_edges.sort_by_key(|e| (e.layer, e.u, e.v));
        test_edges.dedup();
        Ok(Split { train, test_edges, mode })
    }

    pub fn train_nodes(&self) -> &[bool] {
        self.train.node_mask()
    }

    /// Endpoints of the test edges.
    pub fn test_nodes(&self) -> Vec<bool> {
        let mut mask = vec![false; self.train.id_bound()];
        for e in &self.test_edges {
            mask[e.u as usize] = true;
            mask[e.v as usize] = true;
        }
        mask
    }
}

/// Partitions the edges of `g` into `k` near-equal random folds; split `i`
/// holds out fold `i`. Training node sets are the endpoints of the
/// remaining edges.
pub fn kfold_split(g: &MultiplexGraph, k: usize, seed: u64) -> Result<Vec<Split>> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > g.edge_count() {
        return Err(Error::invalid(format!("{k} folds for {} edges", g.edge_count())));
    }
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; g.edge_count()];
    for (pos, &idx) in order.iter().enumerate() {
        fold_of[idx] = pos % k;
    }
    (0..k)
        .map(|fold| {
            let (test, train): (Vec<(usize, &Edge)>, Vec<(usize, &Edge)>) =
                g.edges().iter().enumerate().partition(|(i, _)| fold_of[*i] == fold);
            Split::new(
                g.with_edges(train.into_iter().map(|(_, e)| *e)),
                test.into_iter().map(|(_, e)| *e).collect(),
                SplitMode::KFold { k, fold, seed },
            )
        })
        .collect()
}

/// Trains on edges up to time `t` and tests on edges in `(t, t + delta]`.
pub fn temporal_split(tg: &TemporalMultiplexGraph, t: i64, delta: i64) -> Result<Split> {
    let (lo, hi) = tg
        .time_range()
        .ok_or_else(|| Error::invalid("temporal graph has no edges"))?;
    if t < lo || t > hi {
        return Err(Error::invalid(format!("t = {t} outside the time range [{lo}, {hi}]")));
    }
    if delta < 1 {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (e, &time) in tg.base.edges().iter().zip(&tg.edge_times) {
        if time <= t {
            train.push(*e);
        } else if time <= t + delta {
            test.push(*e);
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid(format!(
            "temporal split at t = {t}, delta = {delta} leaves {} training and {} test edges",
            train.len(),
            test.len()
        )));
    }
    Split::new(tg.base.with_edges(train), test, SplitMode::Temporal { t, delta })
}

/// Which candidates an evaluation ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Universe {
    /// Every unobserved triple between training nodes plus one old-new
    /// candidate per training node and layer.
    Full,
    /// All positives of the full universe and `n_neg` random negatives.
    Sampled { n_neg: usize, seed: u64 },
}

impl FromStr for Universe {
    type Err = Error;

    /// `full`, `sampled:N` or `sampled:N:SEED`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed universe `{s}`"));
        if s == "full" {
            return Ok(Universe::Full);
        }
        let rest = s.strip_prefix("sampled:").ok_or_else(bad)?;
        let mut parts = rest.split(':');
        let n_neg = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let seed = match parts.next() {
            Some(x) => x.parse().map_err(|_| bad())?,
            None => 0,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Universe::Sampled { n_neg, seed })
    }
}

/// Candidates of the full universe with their labels, in key order.
pub fn full_universe(split: &Split) -> Vec<(Candidate, bool)> {
    let g = &split.train;
    let train_nodes = g.node_mask();
    let mut oldold: FxHashSet<(NodeId, NodeId, LayerId)> = FxHashSet::default();
    let mut oldnew: FxHashSet<(NodeId, LayerId)> = FxHashSet::default();
    for e in &split.test_edges {
        match (train_nodes[e.u as usize], train_nodes[e.v as usize]) {
            (true, true) => {
                oldold.insert((e.u, e.v, e.layer));
            }
            (true, false) => {
                oldnew.insert((e.u, e.layer));
            }
            (false, true) => {
                oldnew.insert((e.v, e.layer));
            }
            (false, false) => {}
        }
    }
    let nodes: Vec<NodeId> = g.nodes().collect();
    let mut out = Vec::new();
    for &u in &nodes {
        for &v in &nodes {
            if u == v || (!g.directed() && v < u) {
                continue;
            }
            for l in 0..g.layer_count() as LayerId {
                if !g.has_edge(u, v, l) {
                    out.push((Candidate::old(u, v, l), oldold.contains(&(u, v, l))));
                }
            }
        }
    }
    for &u in &nodes {
        for l in 0..g.layer_count() as LayerId {
            out.push((Candidate::new_node(u, l), oldnew.contains(&(u, l))));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// The labeled candidates of `universe`, in key order.
pub fn labeled_universe(split: &Split, universe: Universe) -> Vec<(Candidate, bool)> {
    let full = full_universe(split);
    match universe {
        Universe::Full => full,
        Universe::Sampled { n_neg, seed } => sample_negatives(full, n_neg, seed),
    }
}

fn sample_negatives(full: Vec<(Candidate, bool)>, n_neg: usize, seed: u64) -> Vec<(Candidate, bool)> {
    let negatives: Vec<usize> = (0..full.len()).filter(|&i| !full[i].1).collect();
    if n_neg >= negatives.len() {
        return full;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![false; full.len()];
    for i in rand::seq::index::sample(&mut rng, negatives.len(), n_neg) {
        keep[negatives[i]] = true;
    }
    full.into_iter().enumerate().filter(|(i, c)| c.1 || keep[*i]).map(|(_, c)| c).collect()
}

/// ROC curve and AUC of a scored, labeled list. Ties count one half; the
/// curve steps once per distinct score, so its trapezoid area is the AUC.
pub fn roc(scored: &[(f64, bool)]) -> Result<(f64, Vec<(f64, f64)>)> {
    if scored.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let pos = scored.iter().filter(|x| x.1).count() as u64;
    let neg = scored.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid(format!("universe has {pos} positives and {neg} negatives")));
    }
    let mut sorted = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut twice_area: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let (prev_tp, prev_fp) = (tp, fp);
        let s = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == s {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        twice_area += (fp - prev_fp) as u128 * (tp + prev_tp) as u128;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auc = twice_area as f64 / (2 * pos as u128 * neg as u128) as f64;
    Ok((auc, points))
}

/// Trapezoid area under a ROC curve.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum()
}

#[derive(Clone, Debug, Default)]
pub struct EvalReport {
    pub auc: f64,
    pub roc_points: Vec<(f64, f64)>,
    /// AUC restricted to each segment, when it has both classes.
    pub segment_aucs: BTreeMap<LinkClass, f64>,
    pub positives: usize,
    pub negatives: usize,
    pub timings: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn segment_auc(&self, class: LinkClass) -> Option<f64> {
        self.segment_aucs.get(&class).copied()
    }

    /// Summary lines followed by the ROC points.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "auc\t{}", self.auc)?;
        for (class, auc) in &self.segment_aucs {
            writeln!(w, "auc_{class}\t{auc}")?;
        }
        writeln!(w, "positives\t{}", self.positives)?;
        writeln!(w, "negatives\t{}", self.negatives)?;
        writeln!(w, "fpr\ttpr")?;
        for (x, y) in &self.roc_points {
            writeln!(w, "{x}\t{y}")?;
        }
        Ok(())
    }
}

/// Ranks the candidates of `universe` by `scores` (absent = 0).
pub fn roc_auc(scores: &ScoreTable, split: &Split, universe: Universe) -> Result<EvalReport> {
    let labeled = labeled_universe(split, universe);
    let scored: Vec<(f64, bool, bool)> = labeled
        .iter()
        .map(|(c, y)| (scores.get(c), *y, c.is_old_new()))
        .collect();
    let all: Vec<(f64, bool)> = scored.iter().map(|x| (x.0, x.1)).collect();
    let (auc, roc_points) = roc(&all)?;
    let mut segment_aucs = BTreeMap::new();
    for (class, old_new) in [(LinkClass::OldOld, false), (LinkClass::OldNew, true)] {
        let part: Vec<(f64, bool)> = scored.iter().filter(|x| x.2 == old_new).map(|x| (x.0, x.1)).collect();
        if let Ok((a, _)) = roc(&part) {
            segment_aucs.insert(class, a);
        }
    }
    let positives = all.iter().filter(|x| x.1).count();
    Ok(EvalReport {
        auc,
        roc_points,
        segment_aucs,
        positives,
        negatives: all.len() - positives,
        timings: BTreeMap::new(),
    })
}

/// Layer-correlation baseline: `score(u, v, l1) = sum over l2 of p(l2, l1)`
/// for the layers `l2` already linking `u` and `v`, where `p(l2, l1)` is
/// the share of `l2`-linked pairs that are also `l1`-linked. Pairs are
/// ordered in directed graphs.
pub fn sharma_score(train: &MultiplexGraph) -> Result<ScoreTable> {
    let n_layers = train.layer_count();
    if n_layers < 2 {
        return Err(Error::invalid("layer-correlation scores need at least 2 layers"));
    }
    if n_layers > 64 {
        return Err(Error::invalid("layer-correlation scores support at most 64 layers"));
    }
    let mut pairs: FxHashMap<(NodeId, NodeId), u64> = FxHashMap::default();
    for e in train.edges() {
        *pairs.entry((e.u, e.v)).or_insert(0) |= 1 << e.layer;
    }
    let mut count = vec![0usize; n_layers];
    let mut both = vec![vec![0usize; n_layers]; n_layers];
    for &mask in pairs.values() {
        for l2 in 0..n_layers {
            if mask >> l2 & 1 == 0 {
                continue;
            }
            count[l2] += 1;
            for (l1, b) in both[l2].iter_mut().enumerate() {
                if mask >> l1 & 1 == 1 {
                    *b += 1;
                }
            }
        }
    }
    let p = |l2: usize, l1: usize| {
        if count[l2] == 0 {
            0.0
        } else {
            both[l2][l1] as f64 / count[l2] as f64
        }
    };
    let mut keys: Vec<(&(NodeId, NodeId), &u64)> = pairs.iter().collect();
    keys.sort();
    let mut table = ScoreTable::new(train.directed());
    for (&(u, v), &mask) in keys {
        for l1 in 0..n_layers {
            if mask >> l1 & 1 == 1 {
                continue;
            }
            let s: f64 = (0..n_layers).filter(|l2| mask >> l2 & 1 == 1).map(|l2| p(l2, l1)).sum();
            if s > 0.0 {
                table.add(Candidate::old(u, v, l1 as LayerId), s);
            }
        }
    }
    Ok(table)
}

/// Neighborhood scores on a single-layer graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassicMethod {
    ResourceAllocation,
    Jaccard,
    PreferentialAttachment,
    AdamicAdar,
}

impl ClassicMethod {
    pub const ALL: [ClassicMethod; 4] = [
        ClassicMethod::ResourceAllocation,
        ClassicMethod::Jaccard,
        ClassicMethod::PreferentialAttachment,
        ClassicMethod::AdamicAdar,
    ];
}

impl fmt::Display for ClassicMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicMethod::ResourceAllocation => "ra",
            ClassicMethod::Jaccard => "ja",
            ClassicMethod::PreferentialAttachment => "pa",
            ClassicMethod::AdamicAdar => "aa",
        })
    }
}

impl FromStr for ClassicMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicMethod::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown classic method `{s}`")))
    }
}

fn neighborhoods(g: &MultiplexGraph) -> Vec<Vec<NodeId>> {
    (0..g.id_bound() as NodeId)
        .map(|v| {
            let mut n: Vec<NodeId> = g.incident(v).iter().map(|i| i.other).collect();
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect()
}

/// Scores for unordered pairs `u < v`, over undirected neighborhoods.
fn classic_pairs(g: &MultiplexGraph, method: ClassicMethod) -> BTreeMap<(NodeId, NodeId), f64> {
    let nbr = neighborhoods(g);
    let deg = |x: NodeId| nbr[x as usize].len();
    let mut out = BTreeMap::new();
    if method == ClassicMethod::PreferentialAttachment {
        let nodes: Vec<NodeId> = g.nodes().filter(|&x| deg(x) > 0).collect();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[i + 1..] {
                out.insert((u, v), (deg(u) * deg(v)) as f64);
            }
        }
        return out;
    }
    for u in g.nodes() {
        let mut acc: BTreeMap<NodeId, (usize, f64)> = BTreeMap::new();
        for &z in &nbr[u as usize] {
            let dz = deg(z);
            if dz < 2 {
                continue;
            }
            let w = match method {
                ClassicMethod::ResourceAllocation => 1.0 / dz as f64,
                ClassicMethod::AdamicAdar => 1.0 / (dz as f64).ln(),
                _ => 0.0,
            };
            for &v in &nbr[z as usize] {
                if v > u {
                    let e = acc.entry(v).or_insert((0, 0.0));
                    e.0 += 1;
                    e.1 += w;
                }
            }
        }
        for (v, (common, sum)) in acc {
            let s = match method {
                ClassicMethod::Jaccard => common as f64 / (deg(u) + deg(v) - common) as f64,
                _ => sum,
            };
            out.insert((u, v), s);
        }
    }
    out
}

/// Classic score of a single-layer graph, for the pairs it does not link.
pub fn classic_score(train_mono: &MultiplexGraph, method: ClassicMethod) -> Result<ScoreTable> {
    if train_mono.layer_count() != 1 {
        return Err(Error::invalid(format!(
            "classic scores need a single-layer graph, got {} layers",
            train_mono.layer_count()
        )));
    }
    let mut table = ScoreTable::new(false);
    for ((u, v), s) in classic_pairs(train_mono, method) {
        if s > 0.0 && !train_mono.has_edge(u, v, 0) && !train_mono.has_edge(v, u, 0) {
            table.add(Candidate::old(u, v, 0), s);
        }
    }
    Ok(table)
}

/// Classic score of the flattened graph, copied to every layer where the
/// triple is unobserved.
pub fn classic_multiplex(train: &MultiplexGraph, method: ClassicMethod) -> Result<ScoreTable> {
    let mono = train.flatten_monoplex(None)?;
    let mut table = ScoreTable::new(train.directed());
    for ((u, v), s) in classic_pairs(&mono, method) {
        if s <= 0.0 {
            continue;
        }
        for l in 0..train.layer_count() as LayerId {
            for (a, b) in [(u, v), (v, u)] {
                if !train.has_edge(a, b, l) {
                    table.add(Candidate::old(a, b, l), s);
                }
                if !train.directed() {
                    break;
                }
            }
        }
    }
    Ok(table)
}

/// Anything that turns a training graph into scores.
pub trait Scorer: Sync {
    fn name(&self) -> String;
    fn score(&self, train: &MultiplexGraph) -> Result<ScoreTable>;
}

/// Mines rules from the training graph and applies them to it.
#[derive(Clone, Debug)]
pub struct RuleScorer {
    pub mining: MiningConfig,
    pub min_confidence: f64,
    pub predict: PredictOptions,
}

impl Scorer for RuleScorer {
    fn name(&self) -> String {
        "rules".into()
    }

    fn score(&self, train: &MultiplexGraph) -> Result<ScoreTable> {
        let (patterns, rules) = mine_with_rules(train, &self.mining, self.min_confidence)?;
        apply_rules_with(train, &rules, Some(&patterns), self.predict)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SharmaScorer;

impl Scorer for SharmaScorer {
    fn name(&self) -> String {
        "sharma".into()
    }

    fn score(&self, train: &MultiplexGraph) -> Result<ScoreTable> {
        sharma_score(train)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassicScorer(pub ClassicMethod);

impl Scorer for ClassicScorer {
    fn name(&self) -> String {
        self.0.to_string()
    }

    fn score(&self, train: &MultiplexGraph) -> Result<ScoreTable> {
        classic_multiplex(train, self.0)
    }
}

/// A precomputed table, returned whatever the training graph.
#[derive(Clone, Debug)]
pub struct FixedScorer {
    pub name: String,
    pub table: ScoreTable,
}

impl Scorer for FixedScorer {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn score(&self, _train: &MultiplexGraph) -> Result<ScoreTable> {
        Ok(self.table.clone())
    }
}

/// Per-table z-scores over a candidate list, zeros included.
fn z_columns(tables: &[ScoreTable], candidates: &[Candidate]) -> Vec<Vec<f64>> {
    tables
        .iter()
        .map(|t| {
            let raw: Vec<f64> = candidates.iter().map(|c| t.get(c)).collect();
            let n = raw.len().max(1) as f64;
            let mean = raw.iter().sum::<f64>() / n;
            let var = raw.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            let sd = var.sqrt();
            raw.iter().map(|x| if sd > 0.0 { (x - mean) / sd } else { 0.0 }).collect()
        })
        .collect()
}

fn weighted(z: &[Vec<f64>], w: &[f64], i: usize) -> f64 {
    z.iter().zip(w).map(|(col, wi)| wi * col[i]).sum()
}

/// `sum_i w_i z_i` over the full universe of `split`, shifted so every
/// candidate scores at least 1.
pub fn combine(tables: &[ScoreTable], split: &Split, weights: &[f64]) -> Result<ScoreTable> {
    if tables.len() < 2 {
        return Err(Error::invalid("an ensemble needs at least 2 tables"));
    }
    if weights.len() != tables.len() {
        return Err(Error::invalid("one weight per table"));
    }
    let candidates: Vec<Candidate> = full_universe(split).into_iter().map(|x| x.0).collect();
    let z = z_columns(tables, &candidates);
    let combined: Vec<f64> = (0..candidates.len()).map(|i| weighted(&z, weights, i)).collect();
    let min = combined.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = ScoreTable::new(split.train.directed());
    for (c, s) in candidates.into_iter().zip(combined) {
        out.add(c, s - min + 1.0);
    }
    Ok(out)
}

/// Number of random restarts of the weight search.
pub const ENSEMBLE_RESTARTS: usize = 50;
const WEIGHT_SEARCH_NEGATIVES: usize = 20_000;

fn unit(mut w: Vec<f64>) -> Vec<f64> {
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut w {
            *x /= norm;
        }
    }
    w
}

/// Unit-norm weights maximizing AUC on a held-out tenth of `train`, by
/// coordinate hill climbing with step halving from random starts.
pub fn optimize_weights(scorers: &[&dyn Scorer], train: &MultiplexGraph, seed: u64) -> Result<Vec<f64>> {
    let k = 10.min(train.edge_count());
    let inner = kfold_split(train, k, seed)?.swap_remove(0);
    let tables: Vec<ScoreTable> = scorers.iter().map(|s| s.score(&inner.train)).collect::<Result<_>>()?;
    let labeled = labeled_universe(
        &inner,
        Universe::Sampled {
            n_neg: WEIGHT_SEARCH_NEGATIVES,
            seed,
        },
    );
    let candidates: Vec<Candidate> = labeled.iter().map(|x| x.0).collect();
    let labels: Vec<bool> = labeled.iter().map(|x| x.1).collect();
    let z = z_columns(&tables, &candidates);
    let auc = |w: &[f64]| -> f64 {
        let scored: Vec<(f64, bool)> = (0..labels.len()).map(|i| (weighted(&z, w, i), labels[i])).collect();
        roc(&scored).map(|r| r.0).unwrap_or(0.5)
    };
    let n = scorers.len();
    let results: Vec<(f64, Vec<f64>)> = (0..ENSEMBLE_RESTARTS)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64 + 1));
            let mut w = if restart == 0 {
                unit(vec![1.0; n])
            } else {
                unit((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            };
            let mut best = auc(&w);
            let mut step = 0.5;
            while step > 1e-3 {
                let mut improved = false;
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut cand = w.clone();
                        cand[i] += sign * step;
                        let cand = unit(cand);
                        let a = auc(&cand);
                        if a > best + 1e-12 {
                            best = a;
                            w = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step /= 2.0;
                }
            }
            (best, w)
        })
        .collect();
    let mut best = &results[0];
    for r in &results[1..] {
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(best.1.clone())
}

/// Scores `split.train` with every scorer and combines the z-normalized
/// tables, with unit weights or optimized ones.
pub fn ensemble(scorers: &[&dyn Scorer], split: &Split, optimize: bool, seed: u64) -> Result<ScoreTable> {
    if scorers.len() < 2 {
        return Err(Error::invalid("an ensemble needs at least 2 tables"));
    }
    let tables: Vec<ScoreTable> = scorers.iter().map(|s| s.score(&split.train)).collect::<Result<_>>()?;
    let weights = if optimize {
        optimize_weights(scorers, &split.train, seed)?
    } else {
        vec![1.0; scorers.len()]
    };
    combine(&tables, split, &weights)
}

/// Evaluates `scorer` on every fold of a k-fold split.
pub fn cross_validate(g: &MultiplexGraph, k: usize, seed: u64, scorer: &dyn Scorer, universe: Universe) -> Result<Vec<EvalReport>> {
    kfold_split(g, k, seed)?
        .iter()
        .map(|split| {
            let start = std::time::Instant::now();
            let scores = scorer.score(&split.train)?;
            let scored_s = start.elapsed().as_secs_f64();
            let mut report = roc_auc(&scores, split, universe)?;
            report.timings.insert("score_s".into(), scored_s);
            Ok(report)
        })
        .collect()
}

/// Counts how candidate targets split between known and unseen nodes.
pub fn count_targets(labeled: &[(Candidate, bool)]) -> (usize, usize) {
    let new = labeled.iter().filter(|(c, _)| c.v == Target::New).count();
    (labeled.len() - new, new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> MultiplexGraph {
        let edges: Vec<(u32, u32, LayerId)> = (0..9).map(|i| (i, i + 1, (i % 2) as LayerId)).collect();
        MultiplexGraph::from_edges(10, 2, false, &edges, None).unwrap()
    }

    #[test]
    fn kfold_partitions_edges() {
        let g = path_graph();
        let splits = kfold_split(&g, 9, 3).unwrap();
        let mut all: Vec<Edge> = splits.iter().flat_map(|s| s.test_edges.clone()).collect();
        all.sort_by_key(|e| (e.layer, e.u, e.v));
        assert_eq!(all, g.edges());
        assert!(splits.iter().all(|s| s.test_edges.len() == 1));
        let again = kfold_split(&g, 9, 3).unwrap();
        assert!(splits.iter().zip(&again).all(|(a, b)| a.test_edges == b.test_edges));
        assert!(kfold_split(&g, 10, 3).is_err());
        assert!(kfold_split(&g, 1, 3).is_err());
    }

    #[test]
    fn temporal_boundaries() {
        let g = MultiplexGraph::from_edges(4, 1, false, &[(0, 1, 0), (1, 2, 0), (2, 3, 0)], None).unwrap();
        let times = vec![(Edge::new(0, 1, 0), 1), (Edge::new(1, 2, 0), 1), (Edge::new(2, 3, 0), 1)];
        let tg = TemporalMultiplexGraph::new(g.clone(), times).unwrap();
        assert!(temporal_split(&tg, 1, 1).is_err());
        let times = vec![(Edge::new(0, 1, 0), 300), (Edge::new(1, 2, 0), 400), (Edge::new(2, 3, 0), 401)];
        let tg = TemporalMultiplexGraph::new(g, times).unwrap();
        let s = temporal_split(&tg, 300, 100).unwrap();
        assert_eq!(s.train.edge_count(), 1);
        assert_eq!(s.test_edges, vec![Edge::new(1, 2, 0)]);
    }

    #[test]
    fn roc_extremes() {
        let perfect = [(1.0, true), (1.0, true), (0.0, false), (0.0, false), (0.0, false)];
        assert_eq!(roc(&perfect).unwrap().0, 1.0);
        let tied = [(0.3, true), (0.3, false), (0.3, false)];
        let (auc, pts) = roc(&tied).unwrap();
        assert_eq!(auc, 0.5);
        assert_eq!(pts, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!(roc(&[(1.0, true)]).is_err());
    }

    #[test]
    fn sharma_coexisting_layers() {
        // every a-edge coexists with a b-edge
        let g = MultiplexGraph::from_edges(4, 2, false, &[(0, 1, 0), (0, 1, 1), (2, 3, 1)], None).unwrap();
        let t = sharma_score(&g).unwrap();
        // p(b, a) = 1/2: (2,3) is b-linked, so it scores 1/2 for a
        assert_eq!(t.oldold_score(2, 3, 0), 0.5);
        assert_eq!(t.oldold_score(0, 2, 0), 0.0);
        let one = MultiplexGraph::from_edges(2, 1, false, &[(0, 1, 0)], None).unwrap();
        assert!(sharma_score(&one).is_err());
    }

    #[test]
    fn classic_formulas() {
        // 0 - 2 - 1, and 2 - 3
        let g = MultiplexGraph::from_edges(5, 1, false, &[(0, 2, 0), (1, 2, 0), (2, 3, 0)], None).unwrap();
        let ra = classic_score(&g, ClassicMethod::ResourceAllocation).unwrap();
        assert!((ra.oldold_score(0, 1, 0) - 1.0 / 3.0).abs() < 1e-15);
        let ja = classic_score(&g, ClassicMethod::Jaccard).unwrap();
        assert_eq!(ja.oldold_score(0, 1, 0), 1.0);
        let pa = classic_score(&g, ClassicMethod::PreferentialAttachment).unwrap();
        assert_eq!(pa.oldold_score(0, 1, 0), 1.0);
        assert_eq!(pa.oldold_score(0, 2, 0), 0.0);
        let aa = classic_score(&g, ClassicMethod::AdamicAdar).unwrap();
        assert!((aa.oldold_score(0, 1, 0) - 1.0 / 3f64.ln()).abs() < 1e-15);
        assert_eq!(aa.oldold_score(0, 4, 0), 0.0);
        let wedge = MultiplexGraph::from_edges(3, 1, false, &[(0, 2, 0), (1, 2, 0)], None).unwrap();
        let ra = classic_score(&wedge, ClassicMethod::ResourceAllocation).unwrap();
        assert_eq!(ra.oldold_score(0, 1, 0), 0.5);
    }

    #[test]
    fn universe_parsing() {
        assert_eq!("full".parse::<Universe>().unwrap(), Universe::Full);
        assert_eq!("sampled:50".parse::<Universe>().unwrap(), Universe::Sampled { n_neg: 50, seed: 0 });
        assert_eq!("sampled:5:9".parse::<Universe>().unwrap(), Universe::Sampled { n_neg: 5, seed: 9 });
        assert!("sampled".parse::<Universe>().is_err());
    }
}
