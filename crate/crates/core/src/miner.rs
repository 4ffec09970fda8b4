//! Frequent connected pattern mining under minimum-image support.
//!
//! The search grows patterns one edge at a time from single-node seeds.
//! Every pattern has exactly one canonical parent (see [`canonical_parent`]),
//! and a child is expanded only from that parent, so each isomorphism class
//! is visited once. Every frequent one-edge extension is still offered to an
//! optional [`ExtensionSink`], which is how rules are built during the search.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::embed::Embeddings;
use crate::error::{Error, Result};
use crate::graph::{Label, LayerId, MultiplexGraph, NodeId};
use crate::pattern::{
    canonical_code, canonical_form, CanonicalCode, PEdge, Pattern, Strategy, MAX_PATTERN_NODES,
};

/// Version of the canonical-code scheme; dumps from different versions are
/// not comparable.
pub const CODE_SCHEME_VERSION: u32 = 1;

/// Minimum support, either a node count or a fraction of `|V|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Absolute(usize),
    Fraction(f64),
}

impl Support {
    /// The absolute threshold for a graph with `n` nodes. Fractions round up.
    pub fn resolve(&self, n: usize) -> Result<usize> {
        match *self {
            Support::Absolute(0) => Err(Error::invalid("support must be at least 1")),
            Support::Absolute(s) => Ok(s),
            Support::Fraction(f) if !(f > 0.0 && f <= 1.0) => Err(Error::invalid(format!(
                "fractional support {f} outside (0, 1]"
            ))),
            Support::Fraction(f) => Ok(((f * n as f64) - 1e-9).ceil().max(1.0) as usize),
        }
    }
}

impl FromStr for Support {
    type Err = Error;

    /// Accepts `12` (absolute), `40%` or `0.4` (fraction of `|V|`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed support `{s}`"));
        if let Some(pct) = s.strip_suffix('%') {
            let f: f64 = pct.trim().parse().map_err(|_| bad())?;
            return Ok(Support::Fraction(f / 100.0));
        }
        if s.contains('.') || s.contains('e') {
            return Ok(Support::Fraction(s.parse().map_err(|_| bad())?));
        }
        Ok(Support::Absolute(s.parse().map_err(|_| bad())?))
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Absolute(s) => write!(f, "{s}"),
            Support::Fraction(x) => write!(f, "{}%", x * 100.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MiningConfig {
    pub support: Support,
    /// Maximum number of pattern nodes.
    pub max_nodes: usize,
    pub strategy: Strategy,
    /// Patterns with more embeddings than this are stored without them;
    /// consumers re-enumerate on demand. `None` keeps everything.
    pub embedding_cap: Option<usize>,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            support: Support::Absolute(1),
            max_nodes: 4,
            strategy: Strategy::Bfs,
            embedding_cap: None,
        }
    }
}

impl MiningConfig {
    pub fn new(support: Support, max_nodes: usize) -> Self {
        MiningConfig {
            support,
            max_nodes,
            ..Default::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<usize> {
        if self.max_nodes == 0 || self.max_nodes > MAX_PATTERN_NODES {
            return Err(Error::invalid(format!(
                "pattern size must lie in 1..={MAX_PATTERN_NODES}, got {}",
                self.max_nodes
            )));
        }
        self.support.resolve(n)
    }
}

/// The single edge a child adds to its parent, in the parent's numbering.
/// For a new-node extension `j` is the new node's index (the parent's `k`)
/// and `new_label` its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Delta {
    pub edge: PEdge,
    pub new_label: Option<Label>,
}

impl Delta {
    pub fn introduces_node(&self) -> bool {
        self.new_label.is_some()
    }

    /// Applies the delta to `p`.
    pub fn apply(&self, p: &Pattern) -> Pattern {
        match self.new_label {
            None => p.with_edge(self.edge),
            Some(label) => {
                let new = p.k() as u8;
                let (tail, head) = self.edge.endpoints();
                let (at, outgoing) = if head == new { (tail, true) } else { (head, false) };
                p.with_new_node(at, self.edge.layer, outgoing, label)
            }
        }
    }

    /// The delta after renumbering the parent's nodes by `perm`; a new node
    /// keeps its index.
    pub fn permute(&self, perm: &[u8], directed: bool) -> Delta {
        let map = |x: u8| perm.get(x as usize).copied().unwrap_or(x);
        let (a, b) = self.edge.endpoints();
        Delta {
            edge: PEdge::arc(map(a), map(b), self.edge.layer, directed),
            new_label: self.new_label,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.edge;
        write!(f, "{}-{}:{}:{}", e.i, e.j, e.layer, e.dir as u8)?;
        if let Some(l) = self.new_label {
            write!(f, ":{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Delta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed delta `{s}`"));
        let (pair, rest) = s.split_once(':').ok_or_else(bad)?;
        let (i, j) = pair.split_once('-').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 && parts.len() != 3 {
            return Err(bad());
        }
        let i: u8 = i.parse().map_err(|_| bad())?;
        let j: u8 = j.parse().map_err(|_| bad())?;
        if i >= j {
            return Err(bad());
        }
        let layer: LayerId = parts[0].parse().map_err(|_| bad())?;
        let dir = match parts[1] {
            "1" => true,
            "0" => false,
            _ => return Err(bad()),
        };
        let new_label = match parts.get(2) {
            Some(l) => Some(l.parse().map_err(|_| bad())?),
            None => None,
        };
        Ok(Delta {
            edge: PEdge { i, j, layer, dir },
            new_label,
        })
    }
}

#[derive(Clone, Debug)]
pub struct MinedPattern {
    /// The pattern in its canonical numbering.
    pub pattern: Pattern,
    pub code: CanonicalCode,
    pub support: usize,
    pub embedding_count: usize,
    /// Embeddings in canonical numbering, absent when over the cap.
    pub embeddings: Option<Embeddings>,
    /// Automorphisms of `pattern`, identity first.
    pub automorphisms: Vec<Vec<u8>>,
    /// Code of the canonical parent; `None` for single-node seeds.
    pub parent: Option<CanonicalCode>,
}

impl MinedPattern {
    pub fn edge_count(&self) -> usize {
        self.pattern.edges().len()
    }

    /// Stored embeddings, or a fresh enumeration when they were dropped.
    pub fn embeddings_or_enumerate(&self, g: &MultiplexGraph) -> Result<std::borrow::Cow<'_, Embeddings>> {
        match &self.embeddings {
            Some(e) => Ok(std::borrow::Cow::Borrowed(e)),
            None => Ok(std::borrow::Cow::Owned(crate::embed::enumerate_embeddings(&self.pattern, g)?)),
        }
    }
}

/// One frequent extension seen during the search.
#[derive(Clone, Copy, Debug)]
pub struct Extension<'a> {
    pub parent: &'a MinedPattern,
    /// In the parent's canonical numbering.
    pub delta: Delta,
    pub child_code: &'a CanonicalCode,
    pub child_support: usize,
}

/// Receives every frequent (parent, child) extension during mining. Calls
/// arrive concurrently and in no particular order.
pub trait ExtensionSink: Sync {
    fn offer(&self, ext: &Extension<'_>);
}

/// All frequent patterns, sorted by code.
#[derive(Clone, Debug)]
pub struct PatternSet {
    pub directed: bool,
    pub strategy: Strategy,
    pub min_support: usize,
    pub max_nodes: usize,
    patterns: Vec<MinedPattern>,
    index: FxHashMap<CanonicalCode, usize>,
}

impl PatternSet {
    fn from_patterns(mut patterns: Vec<MinedPattern>, directed: bool, cfg: &MiningConfig, sigma: usize) -> Result<Self> {
        patterns.sort_by(|a, b| a.code.cmp(&b.code));
        let mut index = FxHashMap::default();
        for (i, p) in patterns.iter().enumerate() {
            if index.insert(p.code.clone(), i).is_some() {
                return Err(Error::Corrupt(format!("pattern {} mined twice", p.code)));
            }
        }
        Ok(PatternSet {
            directed,
            strategy: cfg.strategy,
            min_support: sigma,
            max_nodes: cfg.max_nodes,
            patterns,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MinedPattern> {
        self.patterns.iter()
    }

    pub fn patterns(&self) -> &[MinedPattern] {
        &self.patterns
    }

    pub fn get(&self, code: &CanonicalCode) -> Option<&MinedPattern> {
        self.index.get(code).map(|&i| &self.patterns[i])
    }

    /// `code TAB support TAB embedding_count`, one pattern per line.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# plexrules code-scheme v{CODE_SCHEME_VERSION} strategy={} directed={}",
            self.strategy, self.directed as u8
        )?;
        for p in &self.patterns {
            writeln!(w, "{}\t{}\t{}", p.code, p.support, p.embedding_count)?;
        }
        Ok(())
    }

    pub fn dump_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("dump is utf-8")
    }
}

/// The code of the unique parent the search expands `code` from: the pattern
/// minus the latest removable tuple of its code, where removable means the
/// rest stays connected once a node left isolated is dropped.
pub fn canonical_parent(code: &CanonicalCode, directed: bool, strategy: Strategy) -> Result<Option<CanonicalCode>> {
    if code.tuples.is_empty() {
        return Ok(None);
    }
    let p = code.decode(directed)?;
    for t in code.tuples.iter().rev() {
        let e = if t.dir {
            PEdge::arc(t.src, t.dst, t.layer, directed)
        } else {
            PEdge::arc(t.dst, t.src, t.layer, directed)
        };
        let idx = p
            .edges()
            .binary_search(&e)
            .map_err(|_| Error::Corrupt(format!("tuple {t:?} missing from decoded pattern")))?;
        let drop = if p.edges().len() == 1 {
            // both ends isolated: keep the root
            Some(e.i.max(e.j))
        } else if p.degree(e.i) == 1 {
            Some(e.i)
        } else if p.degree(e.j) == 1 {
            Some(e.j)
        } else {
            None
        };
        let q = p.without_edge(idx, drop);
        if q.is_connected() {
            return Ok(Some(canonical_code(&q, strategy)?));
        }
    }
    Err(Error::Corrupt(format!("no removable edge in {code}")))
}

/// Mines all connected patterns with at most `cfg.max_nodes` nodes and
/// support at least the configured threshold.
pub fn mine(g: &MultiplexGraph, cfg: &MiningConfig, sink: Option<&dyn ExtensionSink>) -> Result<PatternSet> {
    let sigma = cfg.validate(g.node_count())?;
    let directed = g.directed();
    let mut by_label: Vec<Vec<NodeId>> = vec![Vec::new(); g.label_count()];
    for v in g.nodes() {
        by_label[g.label(v) as usize].push(v);
    }
    let ctx = Ctx { g, cfg, sigma, sink };
    let mut seeds = Vec::new();
    for (label, nodes) in by_label.into_iter().enumerate() {
        if nodes.len() < sigma {
            continue;
        }
        let pattern = Pattern::single(label as Label, directed);
        let mut embs = Embeddings::with_capacity(1, nodes.len());
        for v in nodes {
            embs.push(&[v]);
        }
        let seed = MinedPattern {
            code: canonical_code(&pattern, cfg.strategy)?,
            pattern,
            support: embs.len(),
            embedding_count: embs.len(),
            embeddings: None,
            automorphisms: vec![vec![0]],
            parent: None,
        };
        seeds.push((seed, embs));
    }
    let found: Vec<Vec<MinedPattern>> = seeds
        .into_par_iter()
        .map(|(seed, embs)| ctx.expand(seed, embs))
        .collect::<Result<_>>()?;
    PatternSet::from_patterns(found.into_iter().flatten().collect(), directed, cfg, sigma)
}

struct Ctx<'a> {
    g: &'a MultiplexGraph,
    cfg: &'a MiningConfig,
    sigma: usize,
    sink: Option<&'a dyn ExtensionSink>,
}

impl Ctx<'_> {
    /// Returns `node` and all its canonical descendants.
    fn expand(&self, mut node: MinedPattern, embs: Embeddings) -> Result<Vec<MinedPattern>> {
        let children = self.children(&node, &embs)?;
        if self.cfg.embedding_cap.is_none_or(|cap| embs.len() <= cap) {
            node.embeddings = Some(embs);
        }
        let mut out = vec![node];
        let nested: Vec<Vec<MinedPattern>> = children
            .into_par_iter()
            .map(|(child, child_embs)| self.expand(child, child_embs))
            .collect::<Result<_>>()?;
        out.extend(nested.into_iter().flatten());
        Ok(out)
    }

    /// Frequent extensions of `parent` whose canonical parent is `parent`,
    /// each with its embeddings in canonical numbering. Supports come from a
    /// counting pass; only accepted children have their embeddings built.
    fn children(&self, parent: &MinedPattern, embs: &Embeddings) -> Result<Vec<(MinedPattern, Embeddings)>> {
        let g = self.g;
        let directed = g.directed();
        let p = &parent.pattern;
        let k = p.k();
        let buckets = Buckets::new(g, p, k < self.cfg.max_nodes);
        let words = g.id_bound().div_ceil(64);
        let mut counters: Vec<Option<ImageCounter>> = (0..buckets.len()).map(|_| None).collect();
        buckets.scan(g, embs, true, true, |idx, emb, w| {
            counters[idx]
                .get_or_insert_with(|| ImageCounter::new(k + w.is_some() as usize, words))
                .add(emb, w);
        });
        let mut accepted: FxHashSet<CanonicalCode> = FxHashSet::default();
        let mut chosen: Vec<(usize, MinedPattern, Vec<u8>)> = Vec::new();
        let mut order: Vec<(Delta, usize)> = counters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_some())
            .map(|(idx, _)| (buckets.delta(idx, directed), idx))
            .collect();
        order.sort();
        for (delta, idx) in order {
            let support = counters[idx].as_ref().expect("non-empty bucket").support();
            if support < self.sigma {
                continue;
            }
            if support > parent.support {
                return Err(Error::Corrupt(format!(
                    "support grew from {} to {support} extending {} by {delta}",
                    parent.support, parent.code
                )));
            }
            let child = delta.apply(p);
            let form = canonical_form(&child, self.cfg.strategy)?;
            if let Some(sink) = self.sink {
                sink.offer(&Extension {
                    parent,
                    delta,
                    child_code: &form.code,
                    child_support: support,
                });
            }
            // distinct deltas may reach the same child class
            if accepted.contains(&form.code)
                || canonical_parent(&form.code, directed, self.cfg.strategy)?.as_ref() != Some(&parent.code)
            {
                continue;
            }
            accepted.insert(form.code.clone());
            let mined = MinedPattern {
                pattern: child.permute(&form.numbering),
                code: form.code,
                support,
                embedding_count: 0,
                embeddings: None,
                automorphisms: form.automorphisms,
                parent: Some(parent.code.clone()),
            };
            chosen.push((idx, mined, form.numbering));
        }
        if chosen.is_empty() {
            return Ok(Vec::new());
        }
        let mut slot = vec![usize::MAX; buckets.len()];
        let mut built: Vec<Embeddings> = Vec::with_capacity(chosen.len());
        for (i, (idx, mined, _)) in chosen.iter().enumerate() {
            slot[*idx] = i;
            built.push(Embeddings::new(mined.pattern.k()));
        }
        let mut buf: Vec<NodeId> = vec![0; k + 1];
        let need_close = chosen.iter().any(|(idx, _, _)| *idx < buckets.n_close);
        let need_grow = chosen.iter().any(|(idx, _, _)| *idx >= buckets.n_close);
        buckets.scan(g, embs, need_close, need_grow, |idx, emb, w| {
            let i = slot[idx];
            if i == usize::MAX {
                return;
            }
            match w {
                None => built[i].push(emb),
                Some(w) => {
                    buf[..k].copy_from_slice(emb);
                    buf[k] = w;
                    built[i].push(&buf);
                }
            }
        });
        Ok(chosen
            .into_iter()
            .zip(built)
            .map(|((_, mut mined, numbering), child_embs)| {
                mined.embedding_count = child_embs.len();
                (mined, child_embs.permute(&numbering))
            })
            .collect())
    }
}

/// Dense indexing of one-edge extensions of a pattern: closing edges by
/// `(x, y, layer, outgoing)` with `x < y`, then new-node edges by
/// `(x, layer, outgoing, label)`.
struct Buckets {
    k: usize,
    n_layers: usize,
    n_labels: usize,
    n_close: usize,
    grow: bool,
    blocked: Vec<bool>,
}

impl Buckets {
    fn new(g: &MultiplexGraph, p: &Pattern, grow: bool) -> Self {
        let k = p.k();
        let n_layers = g.layer_count();
        let n_close = k * k * n_layers * 2;
        let mut b = Buckets {
            k,
            n_layers,
            n_labels: g.label_count(),
            n_close,
            grow,
            blocked: vec![false; n_close],
        };
        for e in p.edges() {
            let (t, h) = e.endpoints();
            let (x, y, out) = if t < h { (t, h, true) } else { (h, t, false) };
            let idx = b.close_idx(x as usize, y as usize, e.layer, out || !g.directed());
            b.blocked[idx] = true;
        }
        b
    }

    fn len(&self) -> usize {
        self.n_close + if self.grow { self.k * self.n_layers * 2 * self.n_labels } else { 0 }
    }

    fn close_idx(&self, x: usize, y: usize, layer: LayerId, out: bool) -> usize {
        ((x * self.k + y) * self.n_layers + layer as usize) * 2 + out as usize
    }

    fn grow_idx(&self, x: usize, layer: LayerId, out: bool, label: Label) -> usize {
        self.n_close + ((x * self.n_layers + layer as usize) * 2 + out as usize) * self.n_labels + label as usize
    }

    fn delta(&self, idx: usize, directed: bool) -> Delta {
        let arc = |x: usize, y: usize, layer: usize, out: usize| {
            let (a, b) = if out == 1 { (x as u8, y as u8) } else { (y as u8, x as u8) };
            PEdge::arc(a, b, layer as LayerId, directed)
        };
        if idx < self.n_close {
            let (rest, out) = (idx / 2, idx % 2);
            let (rest, layer) = (rest / self.n_layers, rest % self.n_layers);
            let (x, y) = (rest / self.k, rest % self.k);
            Delta { edge: arc(x, y, layer, out), new_label: None }
        } else {
            let idx = idx - self.n_close;
            let (rest, label) = (idx / self.n_labels, idx % self.n_labels);
            let (rest, out) = (rest / 2, rest % 2);
            let (x, layer) = (rest / self.n_layers, rest % self.n_layers);
            Delta { edge: arc(x, self.k, layer, out), new_label: Some(label as Label) }
        }
    }

    /// Calls `f(bucket, embedding, new_node_image)` for every one-edge
    /// extension of every embedding, restricted to closing edges or new-node
    /// edges as asked.
    fn scan(
        &self,
        g: &MultiplexGraph,
        embs: &Embeddings,
        closing: bool,
        growing: bool,
        mut f: impl FnMut(usize, &[NodeId], Option<NodeId>),
    ) {
        let k = self.k;
        let masks = closing && g.link_mask(0, 0).is_some();
        let growing = growing && self.grow;
        for emb in embs.iter() {
            if masks {
                for x in 0..k {
                    for y in x + 1..k {
                        let mut bits = g.link_mask(emb[x], emb[y]).unwrap_or(0);
                        while bits != 0 {
                            let b = bits.trailing_zeros();
                            bits &= bits - 1;
                            let idx = self.close_idx(x, y, (b / 2) as LayerId, b % 2 == 1);
                            if !self.blocked[idx] {
                                f(idx, emb, None);
                            }
                        }
                    }
                }
            }
            if !growing && (masks || !closing) {
                continue;
            }
            for x in 0..k {
                for inc in g.incident(emb[x]) {
                    let w = inc.other;
                    match emb.iter().position(|&v| v == w) {
                        Some(y) if y > x && closing && !masks => {
                            let idx = self.close_idx(x, y, inc.layer, inc.outgoing);
                            if !self.blocked[idx] {
                                f(idx, emb, None);
                            }
                        }
                        Some(_) => {}
                        None if growing => f(self.grow_idx(x, inc.layer, inc.outgoing, g.label(w)), emb, Some(w)),
                        None => {}
                    }
                }
            }
        }
    }
}

/// Distinct images per column, as bitsets over node ids.
struct ImageCounter {
    words: usize,
    bits: Vec<u64>,
    counts: Vec<usize>,
}

impl ImageCounter {
    fn new(cols: usize, words: usize) -> Self {
        ImageCounter {
            words,
            bits: vec![0; cols * words],
            counts: vec![0; cols],
        }
    }

    fn mark(&mut self, col: usize, v: NodeId) {
        let word = &mut self.bits[col * self.words + v as usize / 64];
        let bit = 1u64 << (v % 64);
        if *word & bit == 0 {
            *word |= bit;
            self.counts[col] += 1;
        }
    }

    fn add(&mut self, emb: &[NodeId], w: Option<NodeId>) {
        for (col, &v) in emb.iter().enumerate() {
            self.mark(col, v);
        }
        if let Some(w) = w {
            self.mark(emb.len(), w);
        }
    }

    fn support(&self) -> usize {
        self.counts.iter().copied().min().unwrap_or(0)
    }
}
