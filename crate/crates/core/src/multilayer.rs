//! Many-to-many multilayer networks and their coupled simple-graph form.
//!
//! Each (node, layer) replica becomes a node labeled by its layer;
//! couplings between replicas become kind-1 edges and intra-layer links
//! kind-2 edges. Mining the simple graph and mapping patterns back
//! recovers the multilayer structure.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Edge, Label, LayerId, MultiplexGraph, NodeId};

/// A node identity as it appears in one layer.
pub type Replica = (NodeId, LayerId);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ManyToManyGraph {
    pub directed: bool,
    pub layer_count: usize,
    pub replicas: BTreeSet<Replica>,
    /// `(u, v, layer)` between replicas of the same layer; `u < v` when
    /// undirected.
    pub intra: BTreeSet<(NodeId, NodeId, LayerId)>,
    /// Undirected links between replicas in different layers, smaller
    /// replica first. A replica may be coupled to several others.
    pub couplings: BTreeSet<(Replica, Replica)>,
}

impl ManyToManyGraph {
    pub fn new(directed: bool, layer_count: usize) -> Self {
        ManyToManyGraph {
            directed,
            layer_count,
            ..Default::default()
        }
    }

    pub fn add_replica(&mut self, node: NodeId, layer: LayerId) {
        self.replicas.insert((node, layer));
    }

    pub fn add_intra(&mut self, mut u: NodeId, mut v: NodeId, layer: LayerId) {
        if !self.directed && u > v {
            std::mem::swap(&mut u, &mut v);
        }
        self.intra.insert((u, v, layer));
    }

    pub fn add_coupling(&mut self, a: Replica, b: Replica) {
        self.couplings.insert((a.min(b), a.max(b)));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Coupling = 1,
    Intra = 2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledSimpleGraph {
    pub directed: bool,
    pub layer_count: usize,
    /// Layer of each node, used as its label.
    pub node_layer: Vec<LayerId>,
    /// Multilayer identity of each node.
    pub origin: Vec<NodeId>,
    /// `(u, v, kind)`; coupling edges and undirected intra edges have
    /// `u < v`.
    pub edges: BTreeSet<(NodeId, NodeId, EdgeKind)>,
}

impl CoupledSimpleGraph {
    /// Two layers, `coupling` and `intra`, with nodes labeled by their
    /// original layer. Coupling edges run both ways in directed graphs.
    pub fn to_multiplex(&self) -> Result<MultiplexGraph> {
        let mut edges = Vec::new();
        for &(u, v, kind) in &self.edges {
            let layer = kind as LayerId - 1;
            edges.push(Edge::new(u, v, layer));
            if self.directed && kind == EdgeKind::Coupling {
                edges.push(Edge::new(v, u, layer));
            }
        }
        MultiplexGraph::from_parts(
            self.directed,
            (0..self.node_layer.len())
                .map(|x| format!("{}@{}", self.origin[x], self.node_layer[x]))
                .collect(),
            self.node_layer.iter().map(|&l| l as Label).collect(),
            (0..self.layer_count.max(1)).map(|l| l.to_string()).collect(),
            vec!["coupling".into(), "intra".into()],
            edges,
        )
    }
}

/// One node per replica in `(node, layer)` order.
pub fn to_coupled(g: &ManyToManyGraph) -> Result<CoupledSimpleGraph> {
    let replicas: Vec<Replica> = g.replicas.iter().copied().collect();
    for &(_, l) in &replicas {
        if l as usize >= g.layer_count {
            return Err(Error::rejected(format!("replica in unknown layer {l}")));
        }
    }
    let id = |r: Replica| -> Result<NodeId> {
        replicas
            .binary_search(&r)
            .map(|i| i as NodeId)
            .map_err(|_| Error::rejected(format!("node {} has no replica in layer {}", r.0, r.1)))
    };
    let mut edges = BTreeSet::new();
    for &(a, b) in &g.couplings {
        if a.1 == b.1 {
            return Err(Error::rejected(format!("coupling {a:?}-{b:?} stays within one layer")));
        }
        let (x, y) = (id(a)?, id(b)?);
        edges.insert((x.min(y), x.max(y), EdgeKind::Coupling));
    }
    for &(u, v, l) in &g.intra {
        if u == v {
            return Err(Error::rejected(format!("self-loop on node {u} in layer {l}")));
        }
        let (mut x, mut y) = (id((u, l))?, id((v, l))?);
        if !g.directed && x > y {
            std::mem::swap(&mut x, &mut y);
        }
        edges.insert((x, y, EdgeKind::Intra));
    }
    Ok(CoupledSimpleGraph {
        directed: g.directed,
        layer_count: g.layer_count,
        node_layer: replicas.iter().map(|r| r.1).collect(),
        origin: replicas.iter().map(|r| r.0).collect(),
        edges,
    })
}

pub fn from_coupled(csg: &CoupledSimpleGraph) -> Result<ManyToManyGraph> {
    let n = csg.node_layer.len();
    if csg.origin.len() != n {
        return Err(Error::Corrupt("node layer and origin tables differ in length".into()));
    }
    let mut g = ManyToManyGraph::new(csg.directed, csg.layer_count);
    for x in 0..n {
        if !g.replicas.insert((csg.origin[x], csg.node_layer[x])) {
            return Err(Error::Corrupt(format!("replica of node {} in layer {} repeated", csg.origin[x], csg.node_layer[x])));
        }
    }
    for &(x, y, kind) in &csg.edges {
        if x as usize >= n || y as usize >= n {
            return Err(Error::Corrupt(format!("edge {x}-{y} references a missing node")));
        }
        let a = (csg.origin[x as usize], csg.node_layer[x as usize]);
        let b = (csg.origin[y as usize], csg.node_layer[y as usize]);
        match kind {
            EdgeKind::Coupling => {
                if a.1 == b.1 {
                    return Err(Error::Corrupt(format!("coupling edge {x}-{y} within layer {}", a.1)));
                }
                g.add_coupling(a, b);
            }
            EdgeKind::Intra => {
                if a.1 != b.1 {
                    return Err(Error::Corrupt(format!("intra edge {x}-{y} spans layers {} and {}", a.1, b.1)));
                }
                g.add_intra(a.0, b.0, a.1);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_coupling() {
        let mut g = ManyToManyGraph::new(false, 2);
        g.add_replica(7, 0);
        g.add_replica(7, 1);
        g.add_coupling((7, 1), (7, 0));
        let c = to_coupled(&g).unwrap();
        assert_eq!(c.node_layer, vec![0, 1]);
        assert_eq!(c.edges.iter().collect::<Vec<_>>(), vec![&(0, 1, EdgeKind::Coupling)]);
        assert_eq!(from_coupled(&c).unwrap(), g);
    }

    #[test]
    fn mixed_couplings() {
        // node 1 in layer 0 maps to nodes 1 and 2 in layer 1
        let mut g = ManyToManyGraph::new(false, 2);
        for r in [(1, 0), (3, 0), (4, 0), (1, 1), (2, 1), (4, 1)] {
            g.add_replica(r.0, r.1);
        }
        g.add_coupling((1, 0), (1, 1));
        g.add_coupling((1, 0), (2, 1));
        g.add_coupling((4, 0), (4, 1));
        g.add_intra(1, 3, 0);
        g.add_intra(3, 4, 0);
        g.add_intra(2, 1, 1);
        g.add_intra(4, 2, 1);
        let c = to_coupled(&g).unwrap();
        let intra: Vec<_> = c.edges.iter().filter(|e| e.2 == EdgeKind::Intra).collect();
        assert_eq!(intra.len(), g.intra.len());
        for &&(x, y, _) in &intra {
            assert_eq!(c.node_layer[x as usize], c.node_layer[y as usize]);
        }
        assert_eq!(from_coupled(&c).unwrap(), g);
        let m = c.to_multiplex().unwrap();
        assert_eq!(m.edge_count(), 7);
        assert_eq!(m.label_count(), 2);
    }

    #[test]
    fn structural_errors() {
        let mut g = ManyToManyGraph::new(false, 2);
        g.add_replica(1, 0);
        g.add_coupling((1, 0), (1, 1));
        assert!(matches!(to_coupled(&g), Err(Error::Rejected(_))));
        let bad = CoupledSimpleGraph {
            directed: false,
            layer_count: 2,
            node_layer: vec![0, 1],
            origin: vec![1, 2],
            edges: [(0, 1, EdgeKind::Intra)].into_iter().collect(),
        };
        assert!(matches!(from_coupled(&bad), Err(Error::Corrupt(_))));
    }
}
