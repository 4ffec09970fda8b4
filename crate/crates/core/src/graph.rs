//! Directed / undirected multiplex graphs: a node set shared by every layer,
//! layer-labelled edge triples and one categorical attribute per node.
//!
//! Node, layer and attribute names are remapped to dense integer ids sorted
//! by name (numeric names numerically), so ids do not depend on file order
//! and the canonical serialization is a fixed point of load/serialize.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type LayerId = u16;
pub type Label = u16;

/// Label given to nodes absent from the attribute file.
pub const DEFAULT_LABEL: &str = "_";

/// A layer-labelled edge. Undirected graphs store `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub layer: LayerId,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, layer: LayerId) -> Self {
        Edge { u, v, layer }
    }

    fn key(u: NodeId, v: NodeId, layer: LayerId) -> u64 {
        ((u as u64) << 40) | ((v as u64) << 16) | layer as u64
    }

    fn pair_key(u: NodeId, v: NodeId) -> u64 {
        ((u as u64) << 32) | v as u64
    }
}

const MAX_LINK_LAYERS: usize = 32;

/// One incident edge seen from a node: the other endpoint, the layer and
/// whether the edge leaves the node. Always `outgoing` in undirected graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incident {
    pub other: NodeId,
    pub layer: LayerId,
    pub outgoing: bool,
}

#[derive(Clone, Debug)]
pub struct MultiplexGraph {
    directed: bool,
    node_names: Vec<String>,
    name_index: HashMap<String, NodeId>,
    present: Vec<bool>,
    n_present: usize,
    labels: Vec<Label>,
    label_names: Vec<String>,
    layer_names: Vec<String>,
    // sorted by (layer, u, v)
    edges: Vec<Edge>,
    edge_set: FxHashSet<u64>,
    adj: Vec<Vec<Incident>>,
    // per ordered adjacent pair: bit 2 * layer + outgoing, when layers <= 32
    links: FxHashMap<u64, u64>,
}

/// Orders names numerically when both parse as integers, numbers first.
pub(crate) fn name_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn sorted_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = names.into_iter().collect();
    let mut v: Vec<String> = set.into_iter().map(str::to_owned).collect();
    v.sort_by(|a, b| name_order(a, b));
    v
}

impl MultiplexGraph {
    /// Builds a graph over an explicit id space in which every node is present.
    /// Loops are dropped, undirected edges are normalized to `u < v` and
    /// duplicates collapse.
    pub fn from_parts(
        directed: bool,
        node_names: Vec<String>,
        labels: Vec<Label>,
        label_names: Vec<String>,
        layer_names: Vec<String>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let n = node_names.len();
        if labels.len() != n {
            return Err(Error::invalid(format!(
                "{} labels for {} nodes",
                labels.len(),
                n
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= label_names.len()) {
            return Err(Error::invalid(format!("label id {l} out of range")));
        }
        let mut g = MultiplexGraph {
            directed,
            name_index: node_names
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i as NodeId))
                .collect(),
            node_names,
            present: vec![true; n],
            n_present: n,
            labels,
            label_names,
            layer_names,
            edges: Vec::new(),
            edge_set: FxHashSet::default(),
            adj: vec![Vec::new(); n],
            links: FxHashMap::default(),
        };
        let mut list = Vec::new();
        for e in edges {
            if e.u as usize >= n || e.v as usize >= n {
                return Err(Error::invalid(format!("edge {e:?} endpoint out of range")));
            }
            if e.layer as usize >= g.layer_names.len() {
                return Err(Error::invalid(format!("edge {e:?} layer out of range")));
            }
            list.push(e);
        }
        g.install_edges(list);
        Ok(g)
    }

    /// Small graphs for tests and generators: nodes and layers are named by
    /// their ids, labels by their ids.
    pub fn from_edges(
        n: usize,
        n_layers: usize,
        directed: bool,
        edges: &[(NodeId, NodeId, LayerId)],
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        let labels = labels.unwrap_or_else(|| vec![0; n]);
        let n_labels = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(1);
        Self::from_parts(
            directed,
            (0..n).map(|i| i.to_string()).collect(),
            labels,
            (0..n_labels).map(|i| i.to_string()).collect(),
            (0..n_layers).map(|i| i.to_string()).collect(),
            edges.iter().map(|&(u, v, l)| Edge::new(u, v, l)),
        )
    }

    fn install_edges(&mut self, list: Vec<Edge>) {
        let mut set = FxHashSet::default();
        let mut edges = Vec::with_capacity(list.len());
        for mut e in list {
            if e.u == e.v {
                continue;
            }
            if !self.directed && e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            if set.insert(Edge::key(e.u, e.v, e.layer)) {
                edges.push(e);
            }
        }
        edges.sort_by_key(|e| (e.layer, e.u, e.v));
        let n = self.node_names.len();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u as usize].push(Incident {
                other: e.v,
                layer: e.layer,
                outgoing: true,
            });
            adj[e.v as usize].push(Incident {
                other: e.u,
                layer: e.layer,
                outgoing: !self.directed,
            });
        }
        let mut links = FxHashMap::default();
        if self.layer_names.len() <= MAX_LINK_LAYERS {
            for (u, list) in adj.iter().enumerate() {
                for inc in list {
                    *links.entry(Edge::pair_key(u as NodeId, inc.other)).or_insert(0) |=
                        1u64 << (2 * inc.layer as u32 + inc.outgoing as u32);
                }
            }
        }
        self.edges = edges;
        self.edge_set = set;
        self.adj = adj;
        self.links = links;
    }

    /// Same id space and name tables, restricted to `edges`. The node set
    /// becomes the set of endpoints of the kept edges.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Self {
        let list: Vec<Edge> = edges.into_iter().collect();
        let mut present = vec![false; self.node_names.len()];
        for e in &list {
            present[e.u as usize] = true;
            present[e.v as usize] = true;
        }
        self.with_edges_and_nodes(list, present)
    }

    /// Like [`with_edges`](Self::with_edges) with an explicit node mask.
    pub fn with_edges_and_nodes(&self, edges: Vec<Edge>, present: Vec<bool>) -> Self {
        assert_eq!(present.len(), self.node_names.len());
        for e in &edges {
            assert!(present[e.u as usize] && present[e.v as usize]);
        }
        let mut g = MultiplexGraph {
            directed: self.directed,
            node_names: self.node_names.clone(),
            name_index: self.name_index.clone(),
            n_present: present.iter().filter(|&&p| p).count(),
            present,
            labels: self.labels.clone(),
            label_names: self.label_names.clone(),
            layer_names: self.layer_names.clone(),
            edges: Vec::new(),
            edge_set: FxHashSet::default(),
            adj: Vec::new(),
            links: FxHashMap::default(),
        };
        g.install_edges(edges);
        g
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Number of nodes in the node set.
    pub fn node_count(&self) -> usize {
        self.n_present
    }

    /// Size of the id space (`NodeId`s range over `0..id_bound()`).
    pub fn id_bound(&self) -> usize {
        self.node_names.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| i as NodeId)
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.present.get(v as usize).copied().unwrap_or(false)
    }

    pub fn node_mask(&self) -> &[bool] {
        &self.present
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v as usize]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.name_index.get(name).copied()
    }

    pub fn label(&self, v: NodeId) -> Label {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }

    pub fn label_name(&self, l: Label) -> &str {
        &self.label_names[l as usize]
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn layer_count(&self) -> usize {
        self.layer_names.len()
    }

    pub fn layer_name(&self, l: LayerId) -> &str {
        &self.layer_names[l as usize]
    }

    pub fn layer_names(&self) -> &[String] {
        &self.layer_names
    }

    pub fn layer_id(&self, name: &str) -> Option<LayerId> {
        self.layer_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as LayerId)
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    /// Edges sorted by `(layer, u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Tests for the edge `u -> v` in `layer`; orientation is ignored in
    /// undirected graphs.
    pub fn has_edge(&self, u: NodeId, v: NodeId, layer: LayerId) -> bool {
        let (u, v) = if !self.directed && u > v { (v, u) } else { (u, v) };
        self.edge_set.contains(&Edge::key(u, v, layer))
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.has_edge(e.u, e.v, e.layer)
    }

    /// Every edge between `u` and `v` as bit `2 * layer + outgoing`, seen
    /// from `u`; `None` when the graph has more than 32 layers.
    pub fn link_mask(&self, u: NodeId, v: NodeId) -> Option<u64> {
        if self.layer_names.len() > MAX_LINK_LAYERS {
            return None;
        }
        Some(self.links.get(&Edge::pair_key(u, v)).copied().unwrap_or(0))
    }

    pub fn incident(&self, v: NodeId) -> &[Incident] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    /// Normalizes an edge to this graph's storage convention.
    pub fn normalize(&self, mut e: Edge) -> Edge {
        if !self.directed && e.u > e.v {
            std::mem::swap(&mut e.u, &mut e.v);
        }
        e
    }

    /// Collapses the kept layers (all when `None`) into one layer named `*`:
    /// two nodes are connected when they are connected in any kept layer.
    /// The node set is unchanged.
    pub fn flatten_monoplex(&self, keep_layers: Option<&[LayerId]>) -> Result<Self> {
        let keep: Vec<bool> = match keep_layers {
            None => vec![true; self.layer_count()],
            Some([]) => return Err(Error::invalid("empty layer selection")),
            Some(ls) => {
                let mut keep = vec![false; self.layer_count()];
                for &l in ls {
                    if l as usize >= self.layer_count() {
                        return Err(Error::invalid(format!("unknown layer id {l}")));
                    }
                    keep[l as usize] = true;
                }
                keep
            }
        };
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| keep[e.layer as usize])
            .map(|e| Edge::new(e.u, e.v, 0))
            .collect();
        let mut g = MultiplexGraph {
            layer_names: vec!["*".to_owned()],
            ..self.clone()
        };
        g.install_edges(edges);
        Ok(g)
    }

    /// Canonical edge serialization: `u TAB v TAB layer`, sorted by
    /// `(layer, u, v)` ids.
    pub fn write_edges<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(
                w,
                "{}\t{}\t{}",
                self.node_name(e.u),
                self.node_name(e.v),
                self.layer_name(e.layer)
            )?;
        }
        Ok(())
    }

    /// `node TAB label` for every node in the node set, by id.
    /// Nodes without edges are left out; the edge file cannot name them.
    pub fn write_attributes<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in self.nodes().filter(|&v| self.degree(v) > 0) {
            writeln!(
                w,
                "{}\t{}",
                self.node_name(v),
                self.label_name(self.label(v))
            )?;
        }
        Ok(())
    }

    pub fn edges_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edges(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("names are UTF-8")
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Data lines of a TAB-separated file with their 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        msg: msg.into(),
    }
}

struct RawGraph {
    edges: Vec<(String, String, String)>,
    attrs: BTreeMap<String, String>,
}

fn read_attrs(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = read_to_string(path)?;
    let mut attrs = BTreeMap::new();
    for (line, fields) in data_lines(&text) {
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err(path, line, "expected `node<TAB>label`"));
        }
        if let Some(prev) = attrs.insert(fields[0].to_owned(), fields[1].to_owned()) {
            if prev != fields[1] {
                return Err(parse_err(
                    path,
                    line,
                    format!("conflicting labels for node `{}`", fields[0]),
                ));
            }
        }
    }
    Ok(attrs)
}

fn build(raw: RawGraph, directed: bool) -> Result<MultiplexGraph> {
    let node_names = sorted_names(raw.edges.iter().flat_map(|(u, v, _)| [u.as_str(), v.as_str()]));
    let index: HashMap<&str, NodeId> = node_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as NodeId))
        .collect();
    if let Some(unknown) = raw.attrs.keys().find(|k| !index.contains_key(k.as_str())) {
        return Err(Error::UnknownNode(unknown.clone()));
    }
    let layer_names = sorted_names(raw.edges.iter().map(|(_, _, l)| l.as_str()));
    let layer_index: HashMap<&str, LayerId> = layer_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as LayerId))
        .collect();
    let node_label_names: Vec<&str> = node_names
        .iter()
        .map(|n| raw.attrs.get(n).map(String::as_str).unwrap_or(DEFAULT_LABEL))
        .collect();
    let label_names = sorted_names(node_label_names.iter().copied());
    let label_index: HashMap<&str, Label> = label_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as Label))
        .collect();
    let labels = node_label_names.iter().map(|n| label_index[n]).collect();
    let edges: Vec<Edge> = raw
        .edges
        .iter()
        .map(|(u, v, l)| Edge::new(index[u.as_str()], index[v.as_str()], layer_index[l.as_str()]))
        .collect();
    MultiplexGraph::from_parts(directed, node_names, labels, label_names, layer_names, edges)
}

/// Loads an edge file (`u TAB v TAB layer`) and an optional attribute file
/// (`node TAB label`). Loops are dropped and duplicate triples collapse.
pub fn load_multiplex(
    edge_path: &Path,
    attr_path: Option<&Path>,
    directed: bool,
) -> Result<MultiplexGraph> {
    let text = read_to_string(edge_path)?;
    let mut edges = Vec::new();
    for (line, fields) in data_lines(&text) {
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err(edge_path, line, "expected `u<TAB>v<TAB>layer`"));
        }
        edges.push((fields[0].to_owned(), fields[1].to_owned(), fields[2].to_owned()));
    }
    let attrs = match attr_path {
        Some(p) => read_attrs(p)?,
        None => BTreeMap::new(),
    };
    build(RawGraph { edges, attrs }, directed)
}

/// A multiplex graph whose edges carry an integer timestamp.
#[derive(Clone, Debug)]
pub struct TemporalMultiplexGraph {
    pub base: MultiplexGraph,
    /// Parallel to `base.edges()`.
    pub edge_times: Vec<i64>,
    /// First-seen time per node id (`None` outside the node set).
    pub node_times: Vec<Option<i64>>,
}

impl TemporalMultiplexGraph {
    /// Attaches timestamps to the edges of `base`; a triple listed more than
    /// once keeps its earliest time.
    pub fn new(base: MultiplexGraph, times: impl IntoIterator<Item = (Edge, i64)>) -> Result<Self> {
        let mut best: HashMap<Edge, i64> = HashMap::new();
        for (e, t) in times {
            let e = base.normalize(e);
            if e.u == e.v {
                continue;
            }
            best.entry(e).and_modify(|x| *x = (*x).min(t)).or_insert(t);
        }
        let mut edge_times = Vec::with_capacity(base.edge_count());
        for e in base.edges() {
            match best.get(e) {
                Some(&t) => edge_times.push(t),
                None => return Err(Error::invalid(format!("edge {e:?} has no timestamp"))),
            }
        }
        let mut node_times = vec![None; base.id_bound()];
        for (e, &t) in base.edges().iter().zip(&edge_times) {
            for x in [e.u, e.v] {
                let slot: &mut Option<i64> = &mut node_times[x as usize];
                *slot = Some(slot.map_or(t, |s| s.min(t)));
            }
        }
        Ok(TemporalMultiplexGraph {
            base,
            edge_times,
            node_times,
        })
    }

    pub fn time_range(&self) -> Option<(i64, i64)> {
        let lo = self.edge_times.iter().min()?;
        let hi = self.edge_times.iter().max()?;
        Some((*lo, *hi))
    }
}

/// Loads a temporal edge file (`u TAB v TAB layer TAB t`).
pub fn load_temporal(
    edge_path: &Path,
    attr_path: Option<&Path>,
    directed: bool,
) -> Result<TemporalMultiplexGraph> {
    let text = read_to_string(edge_path)?;
    let mut edges = Vec::new();
    let mut times = Vec::new();
    for (line, fields) in data_lines(&text) {
        if fields.len() != 4 || fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err(edge_path, line, "expected `u<TAB>v<TAB>layer<TAB>t`"));
        }
        let t: i64 = fields[3]
            .parse()
            .map_err(|_| parse_err(edge_path, line, format!("bad timestamp `{}`", fields[3])))?;
        edges.push((fields[0].to_owned(), fields[1].to_owned(), fields[2].to_owned()));
        times.push(t);
    }
    let attrs = match attr_path {
        Some(p) => read_attrs(p)?,
        None => BTreeMap::new(),
    };
    let named = edges.clone();
    let base = build(RawGraph { edges, attrs }, directed)?;
    let timed = named.iter().zip(times).map(|((u, v, l), t)| {
        let e = Edge::new(
            base.node_id(u).expect("node from same file"),
            base.node_id(v).expect("node from same file"),
            base.layer_id(l).expect("layer from same file"),
        );
        (e, t)
    });
    let timed: Vec<(Edge, i64)> = timed.collect();
    TemporalMultiplexGraph::new(base, timed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loops_dropped_directed() {
        let f = file("1\t2\ta\n2\t1\ta\n1\t1\ta\n");
        let g = load_multiplex(f.path(), None, true).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.label_name(g.label(0)), DEFAULT_LABEL);
    }

    #[test]
    fn undirected_collapses_reverse_pairs() {
        let f = file("1\t2\ta\n2\t1\ta\n1\t1\ta\n");
        let g = load_multiplex(f.path(), None, false).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(1, 0, 0));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = file("# header\n1\t2\ta\n1 2 a\n");
        match load_multiplex(f.path(), None, true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_attribute_node_rejected() {
        let e = file("1\t2\ta\n");
        let a = file("1\tx\n7\ty\n");
        match load_multiplex(e.path(), Some(a.path()), true) {
            Err(Error::UnknownNode(n)) => assert_eq!(n, "7"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn attributes_and_default_label() {
        let e = file("1\t2\ta\n2\t3\tb\n");
        let a = file("1\tx\n3\ty\n");
        let g = load_multiplex(e.path(), Some(a.path()), false).unwrap();
        let names: Vec<&str> = g.nodes().map(|v| g.label_name(g.label(v))).collect();
        assert_eq!(names, ["x", "_", "y"]);
    }

    #[test]
    fn ids_sorted_numerically() {
        let f = file("10\t9\ta\n2\t10\tb\n");
        let g = load_multiplex(f.path(), None, true).unwrap();
        assert_eq!(g.node_names(), ["2", "9", "10"]);
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let f = file("b\ta\tz\nc\ta\ty\n3\tb\tz\n");
        let g1 = load_multiplex(f.path(), None, false).unwrap();
        let s1 = g1.edges_string();
        let f2 = file(&s1);
        let s2 = load_multiplex(f2.path(), None, false).unwrap().edges_string();
        assert_eq!(s1, s2);
    }

    #[test]
    fn flatten_union() {
        let g = MultiplexGraph::from_edges(2, 2, false, &[(0, 1, 0), (0, 1, 1)], None).unwrap();
        let m = g.flatten_monoplex(None).unwrap();
        assert_eq!(m.edge_count(), 1);
        assert_eq!(m.layer_count(), 1);
    }

    #[test]
    fn flatten_filter_keeps_nodes() {
        let g = MultiplexGraph::from_edges(4, 2, false, &[(0, 1, 0), (2, 3, 1)], None).unwrap();
        let m = g.flatten_monoplex(Some(&[0])).unwrap();
        assert_eq!(m.edges(), &[Edge::new(0, 1, 0)]);
        assert_eq!(m.node_count(), 4);
        assert!(g.flatten_monoplex(Some(&[])).is_err());
    }

    #[test]
    fn temporal_first_seen() {
        let f = file("1\t2\ta\t5\n2\t3\ta\t7\n1\t2\ta\t9\n");
        let tg = load_temporal(f.path(), None, true).unwrap();
        assert_eq!(tg.base.edge_count(), 2);
        assert_eq!(tg.edge_times, vec![5, 7]);
        assert_eq!(tg.node_times, vec![Some(5), Some(5), Some(7)]);
        assert_eq!(tg.time_range(), Some((5, 7)));
    }
}
