//! Rule application: confidence-weighted scores for unobserved links.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::embed::{enumerate_embeddings, Embeddings};
use crate::error::{Error, Result};
use crate::graph::{data_lines, read_to_string, LayerId, MultiplexGraph, NodeId};
use crate::miner::{Delta, PatternSet};
use crate::pattern::{canonical_form, CanonicalCode, Pattern};
use crate::rules::{AssociationRule, RuleSet};

/// The far end of a candidate link: a known node or an unseen one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Old(NodeId),
    New,
}

/// A candidate link `(u, v, layer)` or `(u, NEW, layer)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub u: NodeId,
    pub v: Target,
    pub layer: LayerId,
}

impl Candidate {
    pub fn old(u: NodeId, v: NodeId, layer: LayerId) -> Self {
        Candidate { u, v: Target::Old(v), layer }
    }

    pub fn new_node(u: NodeId, layer: LayerId) -> Self {
        Candidate { u, v: Target::New, layer }
    }

    pub fn is_old_new(&self) -> bool {
        self.v == Target::New
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkClass {
    OldOld,
    OldNew,
    NewNew,
}

impl fmt::Display for LinkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkClass::OldOld => "OLD_OLD",
            LinkClass::OldNew => "OLD_NEW",
            LinkClass::NewNew => "NEW_NEW",
        })
    }
}

/// Which candidates a ranking or evaluation looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Segment {
    OldOld,
    OldNew,
    #[default]
    Both,
}

impl Segment {
    pub fn admits(&self, c: &Candidate) -> bool {
        match self {
            Segment::OldOld => !c.is_old_new(),
            Segment::OldNew => c.is_old_new(),
            Segment::Both => true,
        }
    }
}

impl std::str::FromStr for Segment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oldold" | "old-old" => Ok(Segment::OldOld),
            "oldnew" | "old-new" => Ok(Segment::OldNew),
            "all" | "both" => Ok(Segment::Both),
            _ => Err(Error::invalid(format!("unknown segment `{s}`"))),
        }
    }
}

/// Classifies a link by whether its endpoints are training nodes; the masks
/// are indexed by node id.
pub fn classify_link(u: NodeId, v: NodeId, train_nodes: &[bool], test_nodes: &[bool]) -> Result<LinkClass> {
    let is_old = |x: NodeId| -> Result<bool> {
        let train = train_nodes.get(x as usize).copied().unwrap_or(false);
        let test = test_nodes.get(x as usize).copied().unwrap_or(false);
        if !train && !test {
            return Err(Error::invalid(format!("node {x} is in neither node set")));
        }
        Ok(train)
    };
    Ok(match (is_old(u)?, is_old(v)?) {
        (true, true) => LinkClass::OldOld,
        (false, false) => LinkClass::NewNew,
        _ => LinkClass::OldNew,
    })
}

/// Sparse non-negative scores; absent means zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreTable {
    pub directed: bool,
    oldold: FxHashMap<(NodeId, NodeId, LayerId), f64>,
    oldnew: FxHashMap<(NodeId, LayerId), f64>,
}

impl ScoreTable {
    pub fn new(directed: bool) -> Self {
        ScoreTable {
            directed,
            ..Default::default()
        }
    }

    fn norm(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if !self.directed && u > v {
            (v, u)
        } else {
            (u, v)
        }
    }

    /// Adds `w` to a candidate; undirected pairs are stored with `u < v`.
    pub fn add(&mut self, c: Candidate, w: f64) {
        match c.v {
            Target::Old(v) => {
                let (u, v) = self.norm(c.u, v);
                *self.oldold.entry((u, v, c.layer)).or_insert(0.0) += w;
            }
            Target::New => *self.oldnew.entry((c.u, c.layer)).or_insert(0.0) += w,
        }
    }

    pub fn get(&self, c: &Candidate) -> f64 {
        match c.v {
            Target::Old(v) => self.oldold_score(c.u, v, c.layer),
            Target::New => self.oldnew_score(c.u, c.layer),
        }
    }

    pub fn oldold_score(&self, u: NodeId, v: NodeId, layer: LayerId) -> f64 {
        let (u, v) = self.norm(u, v);
        self.oldold.get(&(u, v, layer)).copied().unwrap_or(0.0)
    }

    pub fn oldnew_score(&self, u: NodeId, layer: LayerId) -> f64 {
        self.oldnew.get(&(u, layer)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.oldold.len() + self.oldnew.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn oldold_len(&self) -> usize {
        self.oldold.len()
    }

    pub fn oldnew_len(&self) -> usize {
        self.oldnew.len()
    }

    /// All entries in key order.
    pub fn entries(&self) -> Vec<(Candidate, f64)> {
        let mut out: Vec<(Candidate, f64)> = self
            .oldold
            .iter()
            .map(|(&(u, v, l), &s)| (Candidate::old(u, v, l), s))
            .chain(self.oldnew.iter().map(|(&(u, l), &s)| (Candidate::new_node(u, l), s)))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Entries of `segment` by descending score, ties by key.
    pub fn ranked(&self, segment: Segment) -> Vec<(Candidate, f64)> {
        let mut out: Vec<(Candidate, f64)> = self.entries().into_iter().filter(|(c, _)| segment.admits(c)).collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// The `k` best entries of `segment`.
    pub fn top_k(&self, k: usize, segment: Segment) -> Result<Vec<(Candidate, f64)>> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let mut out = self.ranked(segment);
        out.truncate(k);
        Ok(out)
    }

    /// Removes entries that are not strictly positive.
    pub fn prune(&mut self) {
        self.oldold.retain(|_, s| *s > 0.0);
        self.oldnew.retain(|_, s| *s > 0.0);
    }

    /// Adds every entry of `other` into `self`.
    pub fn merge(&mut self, other: &ScoreTable) {
        for (c, s) in other.entries() {
            self.add(c, s);
        }
    }

    /// `u TAB v-or-NEW TAB layer TAB score` by descending score, with node
    /// and layer names from `g`.
    pub fn write_dump<W: Write>(&self, g: &MultiplexGraph, mut w: W) -> std::io::Result<()> {
        for (c, s) in self.ranked(Segment::Both) {
            let v = match c.v {
                Target::Old(v) => g.node_name(v),
                Target::New => "NEW",
            };
            writeln!(w, "{}\t{}\t{}\t{}", g.node_name(c.u), v, g.layer_name(c.layer), s)?;
        }
        Ok(())
    }

    pub fn dump_string(&self, g: &MultiplexGraph) -> String {
        let mut buf = Vec::new();
        self.write_dump(g, &mut buf).expect("write to memory");
        String::from_utf8(buf).expect("dump is utf-8")
    }

    /// Reads a score dump, resolving names against `g`.
    pub fn parse_dump(text: &str, path: &Path, g: &MultiplexGraph) -> Result<ScoreTable> {
        let mut table = ScoreTable::new(g.directed());
        for (line, fields) in data_lines(text) {
            let err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                msg,
            };
            let [u, v, l, s] = fields[..] else {
                return Err(err("expected 4 tab-separated fields".into()));
            };
            let node = |name: &str| g.node_id(name).ok_or_else(|| err(format!("unknown node `{name}`")));
            let u = node(u)?;
            let layer = g.layer_id(l).ok_or_else(|| err(format!("unknown layer `{l}`")))?;
            let score: f64 = s.parse().map_err(|_| err(format!("bad score `{s}`")))?;
            if !score.is_finite() {
                return Err(err(format!("bad score `{s}`")));
            }
            let c = if v == "NEW" {
                Candidate::new_node(u, layer)
            } else {
                Candidate::old(u, node(v)?, layer)
            };
            table.add(c, score);
        }
        Ok(table)
    }

    pub fn load(path: &Path, g: &MultiplexGraph) -> Result<ScoreTable> {
        Self::parse_dump(&read_to_string(path)?, path, g)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PredictOptions {
    /// Count each (rule, predicted link) once instead of once per firing.
    pub dedupe_rule_firings: bool,
}

/// Applies every rule to every embedding of its antecedent in `g`.
pub fn apply_rules(g: &MultiplexGraph, rules: &RuleSet, opts: PredictOptions) -> Result<ScoreTable> {
    apply_rules_with(g, rules, None, opts)
}

/// As [`apply_rules`], reusing embeddings stored in `patterns` when they
/// were mined from `g`.
pub fn apply_rules_with(
    g: &MultiplexGraph,
    rules: &RuleSet,
    patterns: Option<&PatternSet>,
    opts: PredictOptions,
) -> Result<ScoreTable> {
    if rules.directed != g.directed() {
        return Err(Error::invalid("rule set and graph disagree on directedness"));
    }
    let mut groups: BTreeMap<&CanonicalCode, Vec<&AssociationRule>> = BTreeMap::new();
    for r in rules.iter() {
        groups.entry(&r.antecedent).or_default().push(r);
    }
    let groups: Vec<(&CanonicalCode, Vec<&AssociationRule>)> = groups.into_iter().collect();
    let partials: Vec<Vec<(Candidate, f64)>> = groups
        .par_iter()
        .map(|(code, group)| apply_group(g, code, group, patterns, opts))
        .collect::<Result<_>>()?;
    let mut table = ScoreTable::new(g.directed());
    for part in partials {
        for (c, s) in part {
            table.add(c, s);
        }
    }
    table.prune();
    Ok(table)
}

fn compatible(g: &MultiplexGraph, p: &Pattern, delta: &Delta) -> bool {
    let layers_ok = p
        .edges()
        .iter()
        .map(|e| e.layer)
        .chain(std::iter::once(delta.edge.layer))
        .all(|l| (l as usize) < g.layer_count());
    let labels_ok = p
        .labels()
        .iter()
        .chain(delta.new_label.iter())
        .all(|&l| (l as usize) < g.label_count());
    layers_ok && labels_ok
}

/// Scores contributed by the rules sharing one antecedent, summed in a fixed
/// order.
fn apply_group(
    g: &MultiplexGraph,
    code: &CanonicalCode,
    rules: &[&AssociationRule],
    patterns: Option<&PatternSet>,
    opts: PredictOptions,
) -> Result<Vec<(Candidate, f64)>> {
    let p = code.decode(g.directed())?;
    let rules: Vec<&AssociationRule> = rules
        .iter()
        .copied()
        .filter(|r| {
            let ok = compatible(g, &p, &r.delta);
            if !ok {
                warn!("skipping rule {r}: layer or label absent from the graph");
            }
            ok
        })
        .collect();
    if rules.is_empty() {
        return Ok(Vec::new());
    }
    let form = canonical_form(&p, crate::pattern::Strategy::default()).ok();
    let automorphisms = match &form {
        Some(f) if f.code == *code => f.automorphisms.clone(),
        // codes from another strategy: fall back to a direct search
        _ => automorphisms_of(&p),
    };
    let stored = patterns.and_then(|s| s.get(code)).and_then(|m| m.embeddings.as_ref());
    let fresh;
    let embs: &Embeddings = match stored {
        Some(e) => e,
        None => {
            fresh = enumerate_embeddings(&p, g)?;
            &fresh
        }
    };
    // every rule's delta under each automorphism, deduplicated
    let variants: Vec<Vec<Delta>> = rules
        .iter()
        .map(|r| {
            let mut v: Vec<Delta> = automorphisms.iter().map(|s| r.delta.permute(s, g.directed())).collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let mut sums: FxHashMap<Candidate, f64> = FxHashMap::default();
    let mut fired: Vec<FxHashMap<Candidate, ()>> = vec![FxHashMap::default(); if opts.dedupe_rule_firings { rules.len() } else { 0 }];
    let mut orbit_targets: Vec<Candidate> = Vec::new();
    let k = p.k();
    let mut image = vec![0; k];
    for emb in embs.iter() {
        if !is_orbit_representative(emb, &automorphisms, &mut image) {
            continue;
        }
        for (ri, r) in rules.iter().enumerate() {
            orbit_targets.clear();
            for d in &variants[ri] {
                if let Some(c) = instantiate(g, emb, d) {
                    orbit_targets.push(c);
                }
            }
            orbit_targets.sort();
            orbit_targets.dedup();
            for &c in &orbit_targets {
                if opts.dedupe_rule_firings && fired[ri].insert(c, ()).is_some() {
                    continue;
                }
                *sums.entry(c).or_insert(0.0) += r.confidence;
            }
        }
    }
    let mut out: Vec<(Candidate, f64)> = sums.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn automorphisms_of(p: &Pattern) -> Vec<Vec<u8>> {
    let k = p.k();
    let mut out = Vec::new();
    let mut perm: Vec<u8> = (0..k as u8).collect();
    fn rec(p: &Pattern, perm: &mut Vec<u8>, at: usize, out: &mut Vec<Vec<u8>>) {
        if at == perm.len() {
            if p.permute(perm) == *p {
                out.push(perm.clone());
            }
            return;
        }
        for i in at..perm.len() {
            perm.swap(at, i);
            rec(p, perm, at + 1, out);
            perm.swap(at, i);
        }
    }
    rec(p, &mut perm, 0, &mut out);
    out.sort();
    out
}

/// True when `emb` is the smallest embedding in its automorphism orbit.
fn is_orbit_representative(emb: &[NodeId], automorphisms: &[Vec<u8>], image: &mut [NodeId]) -> bool {
    for s in automorphisms.iter().skip(1) {
        // emb composed with s: pattern node s[x] is sent where emb sends x
        for (x, &sx) in s.iter().enumerate() {
            image[sx as usize] = emb[x];
        }
        if *image < *emb {
            return false;
        }
    }
    true
}

/// The link a delta predicts under one embedding, or `None` when the link
/// already exists.
fn instantiate(g: &MultiplexGraph, emb: &[NodeId], d: &Delta) -> Option<Candidate> {
    let (t, h) = d.edge.endpoints();
    let k = emb.len();
    if d.new_label.is_some() {
        let at = if t as usize == k { h } else { t };
        return Some(Candidate::new_node(emb[at as usize], d.edge.layer));
    }
    let (u, v) = (emb[t as usize], emb[h as usize]);
    if g.has_edge(u, v, d.edge.layer) {
        return None;
    }
    let (u, v) = if !g.directed() && u > v { (v, u) } else { (u, v) };
    Some(Candidate::old(u, v, d.edge.layer))
}
