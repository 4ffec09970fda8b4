//! Small connected multiplex patterns and their spanning-tree canonical codes.
//!
//! A code lists one tuple per pattern edge. Nodes are numbered in the order a
//! breadth-first (default) or depth-first spanning tree discovers them, and
//! each tuple records the two node numbers, the layer, one direction bit and
//! the label of the destination node. The canonical code is the minimum over
//! all admissible numberings, so two patterns are isomorphic iff their codes
//! are equal. Parallel edges need no special treatment: the second edge
//! between two nodes just closes a cycle of length two.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Label, LayerId};

/// Upper bound on pattern size; pattern node indices fit in a `u8`.
pub const MAX_PATTERN_NODES: usize = 16;

/// A pattern edge between nodes `i < j`; `dir` is true when the edge runs
/// `i -> j`. Undirected patterns always carry `dir = true`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PEdge {
    pub i: u8,
    pub j: u8,
    pub layer: LayerId,
    pub dir: bool,
}

impl PEdge {
    /// Builds the normalized edge for an arc `from -> to`.
    pub fn arc(from: u8, to: u8, layer: LayerId, directed: bool) -> Self {
        if from < to {
            PEdge { i: from, j: to, layer, dir: true }
        } else {
            PEdge { i: to, j: from, layer, dir: !directed }
        }
    }

    /// `(tail, head)` of the edge.
    pub fn endpoints(&self) -> (u8, u8) {
        if self.dir {
            (self.i, self.j)
        } else {
            (self.j, self.i)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    directed: bool,
    labels: Vec<Label>,
    edges: Vec<PEdge>,
}

impl Pattern {
    pub fn single(label: Label, directed: bool) -> Self {
        Pattern {
            directed,
            labels: vec![label],
            edges: Vec::new(),
        }
    }

    /// Validates and normalizes: edges are reoriented to `i < j`, sorted and
    /// deduplicated. Connectivity is not required here.
    pub fn new(labels: Vec<Label>, edges: Vec<PEdge>, directed: bool) -> Result<Self> {
        let k = labels.len();
        if k == 0 || k > MAX_PATTERN_NODES {
            return Err(Error::invalid(format!("pattern with {k} nodes")));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for e in edges {
            if e.i == e.j {
                return Err(Error::invalid("pattern self-loop"));
            }
            if e.i as usize >= k || e.j as usize >= k {
                return Err(Error::invalid("pattern edge index out of range"));
            }
            let (from, to) = e.endpoints();
            norm.push(PEdge::arc(from, to, e.layer, directed));
        }
        norm.sort();
        norm.dedup();
        Ok(Pattern {
            directed,
            labels,
            edges: norm,
        })
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[PEdge] {
        &self.edges
    }

    pub fn has_edge(&self, e: &PEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let k = self.k();
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for e in &self.edges {
                let y = if e.i as usize == x {
                    e.j as usize
                } else if e.j as usize == x {
                    e.i as usize
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == k
    }

    /// Adds an edge between existing nodes.
    pub fn with_edge(&self, e: PEdge) -> Pattern {
        let mut p = self.clone();
        let (from, to) = e.endpoints();
        let e = PEdge::arc(from, to, e.layer, self.directed);
        if let Err(pos) = p.edges.binary_search(&e) {
            p.edges.insert(pos, e);
        }
        p
    }

    /// Adds node `k` with `label`, joined to `at` by one edge; `outgoing`
    /// orients the edge `at -> k`.
    pub fn with_new_node(&self, at: u8, layer: LayerId, outgoing: bool, label: Label) -> Pattern {
        let mut p = self.clone();
        let new = p.labels.len() as u8;
        p.labels.push(label);
        let e = if outgoing {
            PEdge::arc(at, new, layer, self.directed)
        } else {
            PEdge::arc(new, at, layer, self.directed)
        };
        p.edges.push(e);
        p.edges.sort();
        p
    }

    /// Renumbers nodes: old node `x` becomes `perm[x]`.
    pub fn permute(&self, perm: &[u8]) -> Pattern {
        let k = self.k();
        let mut labels = vec![0; k];
        for (old, &new) in perm.iter().enumerate() {
            labels[new as usize] = self.labels[old];
        }
        let mut edges: Vec<PEdge> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                PEdge::arc(perm[a as usize], perm[b as usize], e.layer, self.directed)
            })
            .collect();
        edges.sort();
        Pattern {
            directed: self.directed,
            labels,
            edges,
        }
    }

    /// Removes edge `idx` and, when that leaves node `drop` isolated, that
    /// node too (renumbering the nodes above it down by one).
    pub(crate) fn without_edge(&self, idx: usize, drop: Option<u8>) -> Pattern {
        let mut edges = self.edges.clone();
        edges.remove(idx);
        let mut labels = self.labels.clone();
        if let Some(d) = drop {
            labels.remove(d as usize);
            for e in &mut edges {
                debug_assert!(e.i != d && e.j != d);
                if e.i > d {
                    e.i -= 1;
                }
                if e.j > d {
                    e.j -= 1;
                }
            }
        }
        edges.sort();
        Pattern {
            directed: self.directed,
            labels,
            edges,
        }
    }

    pub fn degree(&self, x: u8) -> usize {
        self.edges.iter().filter(|e| e.i == x || e.j == x).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    #[default]
    Bfs,
    Dfs,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Strategy::Bfs),
            "dfs" => Ok(Strategy::Dfs),
            _ => Err(Error::invalid(format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Bfs => "bfs",
            Strategy::Dfs => "dfs",
        })
    }
}

/// One extension step of a code: an edge between numbered nodes `src` and
/// `dst`; `dir` is true when the edge runs `src -> dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeTuple {
    pub src: u8,
    pub dst: u8,
    pub layer: LayerId,
    pub dir: bool,
    pub dst_label: Label,
}

impl CodeTuple {
    fn sort_key(&self) -> (u8, LayerId, bool, Label, u8) {
        (self.src, self.layer, self.dir, self.dst_label, self.dst)
    }
}

impl Ord for CodeTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for CodeTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalCode {
    pub root_label: Label,
    pub tuples: Vec<CodeTuple>,
}

impl Ord for CanonicalCode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.root_label
            .cmp(&other.root_label)
            .then_with(|| self.tuples.cmp(&other.tuples))
    }
}

impl PartialOrd for CanonicalCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl CanonicalCode {
    pub fn node_count(&self) -> usize {
        1 + self
            .tuples
            .iter()
            .map(|t| t.src.max(t.dst) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds the pattern numbered as in the code.
    pub fn decode(&self, directed: bool) -> Result<Pattern> {
        let mut labels = vec![self.root_label];
        let mut edges = Vec::with_capacity(self.tuples.len());
        for t in &self.tuples {
            let hi = t.src.max(t.dst) as usize;
            if hi == labels.len() {
                if t.dst as usize != hi {
                    return Err(Error::Corrupt(format!("tuple {t:?} introduces its source")));
                }
                labels.push(t.dst_label);
            } else if hi > labels.len() {
                return Err(Error::Corrupt(format!("tuple {t:?} skips a node number")));
            }
            let e = if t.dir {
                PEdge::arc(t.src, t.dst, t.layer, directed)
            } else {
                PEdge::arc(t.dst, t.src, t.layer, directed)
            };
            edges.push(e);
        }
        let p = Pattern::new(labels, edges, directed)?;
        if p.edges.len() != self.tuples.len() {
            return Err(Error::Corrupt("duplicate tuple in code".into()));
        }
        Ok(p)
    }

    /// The code with its last tuple removed.
    pub fn prefix(&self) -> CanonicalCode {
        let mut c = self.clone();
        c.tuples.pop();
        c
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root_label)?;
        for t in &self.tuples {
            write!(
                f,
                " {}-{}:{}:{}:{}",
                t.src, t.dst, t.layer, t.dir as u8, t.dst_label
            )?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed canonical code `{s}`"));
        let mut tokens = s.split(' ');
        let root_label = tokens.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut tuples = Vec::new();
        for tok in tokens {
            let (pair, rest) = tok.split_once(':').ok_or_else(bad)?;
            let (src, dst) = pair.split_once('-').ok_or_else(bad)?;
            let mut parts = rest.split(':');
            let mut next = || parts.next().ok_or_else(bad);
            let layer = next()?.parse().map_err(|_| bad())?;
            let dir = match next()? {
                "1" => true,
                "0" => false,
                _ => return Err(bad()),
            };
            let dst_label = next()?.parse().map_err(|_| bad())?;
            tuples.push(CodeTuple {
                src: src.parse().map_err(|_| bad())?,
                dst: dst.parse().map_err(|_| bad())?,
                layer,
                dir,
                dst_label,
            });
        }
        Ok(CanonicalCode { root_label, tuples })
    }
}

/// A canonical code together with the numbering that produced it and the
/// automorphism group of the canonically numbered pattern.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    /// `numbering[x]` is the canonical number of input node `x`.
    pub numbering: Vec<u8>,
    /// Every permutation of canonical numbers that maps the canonical pattern
    /// onto itself; the identity comes first.
    pub automorphisms: Vec<Vec<u8>>,
}

pub fn canonical_code(p: &Pattern, strategy: Strategy) -> Result<CanonicalCode> {
    Ok(canonical_form(p, strategy)?.code)
}

pub fn canonical_form(p: &Pattern, strategy: Strategy) -> Result<CanonicalForm> {
    if !p.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut search = Search::new(p);
    search.dfs_mode = strategy == Strategy::Dfs;
    let min_label = *p.labels.iter().min().expect("k >= 1");
    for root in 0..p.k() as u8 {
        if p.labels[root as usize] != min_label {
            continue;
        }
        search.start(root);
        match strategy {
            Strategy::Bfs => search.bfs(0),
            Strategy::Dfs => {
                let mut stack = vec![root];
                search.dfs(&mut stack);
            }
        }
        search.finish_root(root);
    }
    let best = search.best.expect("at least one numbering");
    let first = search.optimal[0].clone();
    let mut inv0 = vec![0u8; p.k()];
    for (x, &c) in first.iter().enumerate() {
        inv0[c as usize] = x as u8;
    }
    let automorphisms = search
        .optimal
        .iter()
        .map(|num| (0..p.k()).map(|c| num[inv0[c] as usize]).collect())
        .collect();
    Ok(CanonicalForm {
        code: best,
        numbering: first,
        automorphisms,
    })
}

const UNSET: u8 = u8::MAX;

struct Search<'a> {
    p: &'a Pattern,
    // per node: (neighbor, layer, edge leaves this node)
    adj: Vec<Vec<(u8, LayerId, bool)>>,
    pos: Vec<u8>,
    order: Vec<u8>,
    // DFS only: tree tuple and tree edge of each discovered node, by position
    tree: Vec<Option<(CodeTuple, PEdge)>>,
    best: Option<CanonicalCode>,
    optimal: Vec<Vec<u8>>,
    scratch: Vec<CodeTuple>,
    dfs_mode: bool,
}

impl<'a> Search<'a> {
    fn new(p: &'a Pattern) -> Self {
        let k = p.k();
        let mut adj = vec![Vec::new(); k];
        for e in &p.edges {
            let (a, b) = e.endpoints();
            adj[a as usize].push((b, e.layer, true));
            adj[b as usize].push((a, e.layer, !p.directed));
        }
        Search {
            p,
            adj,
            pos: vec![UNSET; k],
            order: Vec::with_capacity(k),
            tree: vec![None; k],
            best: None,
            optimal: Vec::new(),
            scratch: Vec::new(),
            dfs_mode: false,
        }
    }

    fn start(&mut self, root: u8) {
        self.pos.iter_mut().for_each(|x| *x = UNSET);
        self.order.clear();
        self.pos[root as usize] = 0;
        self.order.push(root);
    }

    fn finish_root(&mut self, root: u8) {
        self.pos[root as usize] = UNSET;
        self.order.clear();
    }

    /// Unnumbered neighbors of `x`, each with the smallest `(layer, dir,
    /// label)` key over the edges joining it to `x`, sorted by key.
    fn frontier(&self, x: u8) -> Vec<((LayerId, bool, Label), u8)> {
        let mut cands: Vec<((LayerId, bool, Label), u8)> = Vec::new();
        for &(y, layer, out) in &self.adj[x as usize] {
            if self.pos[y as usize] != UNSET {
                continue;
            }
            let key = (layer, out, self.p.labels[y as usize]);
            match cands.iter_mut().find(|(_, z)| *z == y) {
                Some(c) => {
                    if key < c.0 {
                        c.0 = key;
                    }
                }
                None => cands.push((key, y)),
            }
        }
        cands.sort();
        cands
    }

    fn assign(&mut self, y: u8) {
        self.pos[y as usize] = self.order.len() as u8;
        self.order.push(y);
    }

    fn unassign(&mut self, y: u8) {
        self.order.pop();
        self.pos[y as usize] = UNSET;
    }

    fn bfs(&mut self, q: usize) {
        if q == self.order.len() {
            if self.order.len() == self.p.k() {
                self.emit();
            }
            return;
        }
        let x = self.order[q];
        let cands = self.frontier(x);
        let mut groups: Vec<Vec<u8>> = Vec::new();
        let mut last = None;
        for (key, y) in cands {
            if last == Some(key) {
                groups.last_mut().unwrap().push(y);
            } else {
                groups.push(vec![y]);
                last = Some(key);
            }
        }
        self.bfs_groups(&mut groups, 0, q);
    }

    // Appends every ordering of the tied groups, then processes node q + 1.
    fn bfs_groups(&mut self, groups: &mut [Vec<u8>], gi: usize, q: usize) {
        if gi == groups.len() {
            self.bfs(q + 1);
            return;
        }
        let n = groups[gi].len();
        self.permute_group(groups, gi, 0, n, q);
    }

    fn permute_group(&mut self, groups: &mut [Vec<u8>], gi: usize, at: usize, n: usize, q: usize) {
        if at == n {
            self.bfs_groups(groups, gi + 1, q);
            return;
        }
        for i in at..n {
            groups[gi].swap(at, i);
            let y = groups[gi][at];
            self.assign(y);
            self.permute_group(groups, gi, at + 1, n, q);
            self.unassign(y);
            groups[gi].swap(at, i);
        }
    }

    fn dfs(&mut self, stack: &mut Vec<u8>) {
        let mut popped = Vec::new();
        while let Some(&x) = stack.last() {
            let cands = self.frontier(x);
            if cands.is_empty() {
                popped.push(stack.pop().unwrap());
                continue;
            }
            let min_key = cands[0].0;
            for &(key, y) in cands.iter().take_while(|(k, _)| *k == min_key) {
                self.assign(y);
                let (layer, dir, label) = key;
                let edge = if dir {
                    PEdge::arc(x, y, layer, self.p.directed)
                } else {
                    PEdge::arc(y, x, layer, self.p.directed)
                };
                let tuple = CodeTuple {
                    src: self.pos[x as usize],
                    dst: self.pos[y as usize],
                    layer,
                    dir,
                    dst_label: label,
                };
                self.tree[self.pos[y as usize] as usize] = Some((tuple, edge));
                stack.push(y);
                self.dfs(stack);
                stack.pop();
                self.unassign(y);
            }
            break;
        }
        if stack.is_empty() && self.order.len() == self.p.k() {
            self.emit();
        }
        while let Some(x) = popped.pop() {
            stack.push(x);
        }
    }

    fn build_code(&mut self) {
        let p = self.p;
        let pos = &self.pos;
        self.scratch.clear();
        if !self.dfs_mode {
            for e in &p.edges {
                let (a, b) = e.endpoints();
                let (pa, pb) = (pos[a as usize], pos[b as usize]);
                let (src, dst, node) = if pa < pb { (pa, pb, b) } else { (pb, pa, a) };
                self.scratch.push(CodeTuple {
                    src,
                    dst,
                    layer: e.layer,
                    dir: pa < pb || !p.directed,
                    dst_label: p.labels[node as usize],
                });
            }
            self.scratch.sort();
            return;
        }
        // Depth-first: each discovered node contributes its tree tuple followed
        // by the edges that close cycles back to earlier nodes.
        let k = p.k();
        let mut back: Vec<Vec<CodeTuple>> = vec![Vec::new(); k];
        for e in &p.edges {
            let (a, b) = e.endpoints();
            let (pa, pb) = (pos[a as usize], pos[b as usize]);
            let (late, early, early_node) = if pa > pb { (pa, pb, b) } else { (pb, pa, a) };
            let t = CodeTuple {
                src: late,
                dst: early,
                layer: e.layer,
                dir: pa > pb || !p.directed,
                dst_label: p.labels[early_node as usize],
            };
            let (_, tree_edge) = self.tree[late as usize].expect("tree edge for every node > 0");
            if tree_edge == *e {
                continue;
            }
            back[late as usize].push(t);
        }
        for (t, list) in back.iter_mut().enumerate().skip(1) {
            self.scratch.push(self.tree[t].unwrap().0);
            list.sort();
            self.scratch.extend(list.iter().copied());
        }
    }

    fn emit(&mut self) {
        self.build_code();
        let root_label = self.p.labels[self.order[0] as usize];
        let ord = match &self.best {
            None => Ordering::Less,
            Some(b) => root_label
                .cmp(&b.root_label)
                .then_with(|| self.scratch.as_slice().cmp(b.tuples.as_slice())),
        };
        match ord {
            Ordering::Less => {
                self.best = Some(CanonicalCode {
                    root_label,
                    tuples: self.scratch.clone(),
                });
                self.optimal.clear();
                self.optimal.push(self.pos.clone());
            }
            Ordering::Equal => self.optimal.push(self.pos.clone()),
            Ordering::Greater => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(labels: &[Label], edges: &[(u8, u8, LayerId)], directed: bool) -> Pattern {
        Pattern::new(
            labels.to_vec(),
            edges
                .iter()
                .map(|&(a, b, l)| PEdge::arc(a, b, l, directed))
                .collect(),
            directed,
        )
        .unwrap()
    }

    fn all_perms(k: usize) -> Vec<Vec<u8>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(k - 1) {
            for at in 0..k {
                let mut q = p.clone();
                q.insert(at, (k - 1) as u8);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn single_node_code() {
        let c = canonical_code(&Pattern::single(3, true), Strategy::Bfs).unwrap();
        assert_eq!(c.root_label, 3);
        assert!(c.tuples.is_empty());
    }

    #[test]
    fn triangle_permutations_share_code() {
        for directed in [false, true] {
            let p = pat(&[0, 0, 0], &[(0, 1, 0), (1, 2, 0), (2, 0, 0)], directed);
            for s in [Strategy::Bfs, Strategy::Dfs] {
                let codes: std::collections::HashSet<_> = all_perms(3)
                    .iter()
                    .map(|perm| canonical_code(&p.permute(perm), s).unwrap())
                    .collect();
                assert_eq!(codes.len(), 1);
            }
        }
    }

    #[test]
    fn parallel_edges_close_two_cycle() {
        let p = pat(&[0, 0], &[(0, 1, 0), (0, 1, 1)], false);
        for s in [Strategy::Bfs, Strategy::Dfs] {
            let c = canonical_code(&p, s).unwrap();
            assert_eq!(c.tuples.len(), 2);
            let first = c.tuples[0];
            assert_eq!((first.src.min(first.dst), first.src.max(first.dst)), (0, 1));
            // second tuple joins two already numbered nodes
            let second = c.tuples[1];
            assert!(second.src.max(second.dst) <= 1);
        }
    }

    #[test]
    fn direction_distinguishes_patterns() {
        let a = pat(&[0, 1], &[(0, 1, 0)], true);
        let b = pat(&[0, 1], &[(1, 0, 0)], true);
        assert_ne!(
            canonical_code(&a, Strategy::Bfs).unwrap(),
            canonical_code(&b, Strategy::Bfs).unwrap()
        );
        // reciprocated pair is symmetric
        let c = pat(&[0, 0], &[(0, 1, 0), (1, 0, 0)], true);
        let f = canonical_form(&c, Strategy::Bfs).unwrap();
        assert_eq!(f.automorphisms.len(), 2);
    }

    #[test]
    fn disconnected_rejected() {
        let p = pat(&[0, 0, 0], &[(0, 1, 0)], false);
        assert!(matches!(canonical_code(&p, Strategy::Bfs), Err(Error::Disconnected)));
    }

    #[test]
    fn decode_roundtrip_and_string_form() {
        let p = pat(&[1, 0, 2, 0], &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 1, 2), (1, 0, 1)], true);
        for s in [Strategy::Bfs, Strategy::Dfs] {
            let f = canonical_form(&p, s).unwrap();
            let q = f.code.decode(true).unwrap();
            assert_eq!(q, p.permute(&f.numbering));
            assert_eq!(canonical_code(&q, s).unwrap(), f.code);
            let parsed: CanonicalCode = f.code.to_string().parse().unwrap();
            assert_eq!(parsed, f.code);
        }
    }

    #[test]
    fn star_automorphisms() {
        let p = pat(&[0, 0, 0, 0], &[(0, 1, 0), (0, 2, 0), (0, 3, 0)], false);
        let f = canonical_form(&p, Strategy::Bfs).unwrap();
        assert_eq!(f.automorphisms.len(), 6);
        assert_eq!(f.automorphisms[0], vec![0, 1, 2, 3]);
        let canon = f.code.decode(false).unwrap();
        for a in &f.automorphisms {
            assert_eq!(canon.permute(a), canon);
        }
    }
}
