//! Pattern occurrences in a host graph and the minimum-image support.

use crate::error::{Error, Result};
use crate::graph::{MultiplexGraph, NodeId};
use crate::pattern::{PEdge, Pattern};

/// A flat list of embeddings of a `k`-node pattern: embedding `e` maps
/// pattern node `x` to `data[e * k + x]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Embeddings {
    k: usize,
    data: Vec<NodeId>,
}

impl Embeddings {
    pub fn new(k: usize) -> Self {
        Embeddings { k, data: Vec::new() }
    }

    pub fn with_capacity(k: usize, n: usize) -> Self {
        Embeddings {
            k,
            data: Vec::with_capacity(k * n),
        }
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        if self.k == 0 {
            0
        } else {
            self.data.len() / self.k
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, emb: &[NodeId]) {
        debug_assert_eq!(emb.len(), self.k);
        self.data.extend_from_slice(emb);
    }

    pub fn get(&self, idx: usize) -> &[NodeId] {
        &self.data[idx * self.k..(idx + 1) * self.k]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, NodeId> {
        self.data.chunks_exact(self.k.max(1))
    }

    /// Renumbers pattern nodes: old node `x` becomes `perm[x]`.
    pub fn permute(&self, perm: &[u8]) -> Embeddings {
        let mut out = Embeddings::with_capacity(self.k, self.len());
        let mut buf = vec![0; self.k];
        for emb in self.iter() {
            for (x, &v) in emb.iter().enumerate() {
                buf[perm[x] as usize] = v;
            }
            out.push(&buf);
        }
        out
    }

    pub fn to_vecs(&self) -> Vec<Vec<NodeId>> {
        self.iter().map(<[NodeId]>::to_vec).collect()
    }

    /// Minimum over pattern nodes of the number of distinct images; 0 when
    /// empty. Stops early once a column drops below `floor`.
    pub fn mis_support_floor(&self, floor: usize) -> usize {
        if self.is_empty() {
            return 0;
        }
        let bound = self.data.iter().copied().max().unwrap_or(0) as usize + 1;
        let mut seen = vec![usize::MAX; bound];
        let mut best = usize::MAX;
        for x in 0..self.k {
            let mut count = 0;
            for e in self.iter() {
                let slot = &mut seen[e[x] as usize];
                if *slot != x {
                    *slot = x;
                    count += 1;
                }
            }
            best = best.min(count);
            if best < floor {
                break;
            }
        }
        best
    }

    pub fn mis_support(&self) -> usize {
        self.mis_support_floor(0)
    }

    pub fn image_table(&self) -> ImageTable {
        let mut images = Vec::with_capacity(self.k);
        for x in 0..self.k {
            let mut col: Vec<NodeId> = self.iter().map(|e| e[x]).collect();
            col.sort_unstable();
            col.dedup();
            images.push(col);
        }
        ImageTable { images }
    }
}

/// For every pattern node, the distinct graph nodes playing its role across
/// all embeddings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageTable {
    pub images: Vec<Vec<NodeId>>,
}

impl ImageTable {
    pub fn support(&self) -> usize {
        self.images.iter().map(Vec::len).min().unwrap_or(0)
    }
}

/// Minimum-image support of a list of embeddings of a `k`-node pattern.
pub fn mis_support(embs: &[Vec<NodeId>], k: usize) -> Result<usize> {
    let mut flat = Embeddings::with_capacity(k, embs.len());
    for e in embs {
        if e.len() != k {
            return Err(Error::invalid(format!(
                "embedding of arity {} where {k} expected",
                e.len()
            )));
        }
        flat.push(e);
    }
    Ok(flat.mis_support())
}

/// Checks one pattern edge against the host graph under `emb`.
pub(crate) fn edge_holds(g: &MultiplexGraph, emb: &[NodeId], e: &PEdge) -> bool {
    let (a, b) = e.endpoints();
    g.has_edge(emb[a as usize], emb[b as usize], e.layer)
}

struct Step {
    node: u8,
    // (matched neighbor, connecting edge) used to generate candidates
    anchor: Option<(u8, PEdge)>,
    // edges to earlier nodes that must be checked
    checks: Vec<PEdge>,
}

fn match_plan(p: &Pattern) -> Vec<Step> {
    let k = p.k();
    let mut placed = vec![false; k];
    let mut plan = Vec::with_capacity(k);
    // start at the node with the most edges
    let start = (0..k as u8).max_by_key(|&x| (p.degree(x), std::cmp::Reverse(x))).unwrap();
    placed[start as usize] = true;
    plan.push(Step {
        node: start,
        anchor: None,
        checks: Vec::new(),
    });
    while plan.len() < k {
        // next: unplaced node with the most edges into the placed set
        let mut best: Option<(usize, u8)> = None;
        for y in 0..k as u8 {
            if placed[y as usize] {
                continue;
            }
            let links = p
                .edges()
                .iter()
                .filter(|e| (e.i == y && placed[e.j as usize]) || (e.j == y && placed[e.i as usize]))
                .count();
            if links > 0 && best.is_none_or(|(l, _)| links > l) {
                best = Some((links, y));
            }
        }
        let (_, y) = best.expect("pattern is connected");
        let mut links: Vec<PEdge> = p
            .edges()
            .iter()
            .filter(|e| (e.i == y && placed[e.j as usize]) || (e.j == y && placed[e.i as usize]))
            .copied()
            .collect();
        let first = links.remove(0);
        let other = if first.i == y { first.j } else { first.i };
        placed[y as usize] = true;
        plan.push(Step {
            node: y,
            anchor: Some((other, first)),
            checks: links,
        });
    }
    plan
}

/// All injective, label-, layer- and direction-preserving maps of `p` into
/// `g`. Direction bits are ignored for undirected graphs.
pub fn enumerate_embeddings(p: &Pattern, g: &MultiplexGraph) -> Result<Embeddings> {
    if !p.is_connected() {
        return Err(Error::Disconnected);
    }
    let k = p.k();
    let mut out = Embeddings::new(k);
    let plan = match_plan(p);
    let mut emb = vec![NodeId::MAX; k];
    let mut used = vec![false; g.id_bound()];
    let start = &plan[0];
    let start_label = p.labels()[start.node as usize];
    for v in g.nodes() {
        if g.label(v) != start_label {
            continue;
        }
        emb[start.node as usize] = v;
        used[v as usize] = true;
        extend(p, g, &plan, 1, &mut emb, &mut used, &mut out);
        used[v as usize] = false;
    }
    Ok(out)
}

fn extend(
    p: &Pattern,
    g: &MultiplexGraph,
    plan: &[Step],
    depth: usize,
    emb: &mut [NodeId],
    used: &mut [bool],
    out: &mut Embeddings,
) {
    if depth == plan.len() {
        out.push(emb);
        return;
    }
    let step = &plan[depth];
    let (anchor, via) = step.anchor.expect("non-root step has an anchor");
    let label = p.labels()[step.node as usize];
    let (tail, _) = via.endpoints();
    let anchor_is_tail = tail == anchor;
    let directed = g.directed();
    for inc in g.incident(emb[anchor as usize]) {
        if inc.layer != via.layer || (directed && inc.outgoing != anchor_is_tail) {
            continue;
        }
        let w = inc.other;
        if used[w as usize] || g.label(w) != label {
            continue;
        }
        emb[step.node as usize] = w;
        if step.checks.iter().all(|e| edge_holds(g, emb, e)) {
            used[w as usize] = true;
            extend(p, g, plan, depth + 1, emb, used, out);
            used[w as usize] = false;
        }
    }
    emb[step.node as usize] = NodeId::MAX;
}
