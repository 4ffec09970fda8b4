//! Synthetic power-law clustered multiplex graphs.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Label, LayerId, MultiplexGraph, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub layers: usize,
    pub avg_degree: usize,
    pub p_triangle: f64,
    pub n_labels: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 500,
            layers: 7,
            avg_degree: 8,
            p_triangle: 0.5,
            n_labels: 4,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Edges added per arriving node.
    pub fn attachments(&self) -> usize {
        self.avg_degree / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::invalid("need at least one layer"));
        }
        if self.n_labels == 0 {
            return Err(Error::invalid("need at least one label"));
        }
        if self.avg_degree < 2 {
            return Err(Error::invalid(format!("average degree {} below 2", self.avg_degree)));
        }
        if self.n < self.avg_degree + 1 {
            return Err(Error::invalid(format!(
                "{} nodes cannot reach average degree {}",
                self.n, self.avg_degree
            )));
        }
        if !(0.0..=1.0).contains(&self.p_triangle) {
            return Err(Error::invalid(format!("p_triangle {} outside [0, 1]", self.p_triangle)));
        }
        Ok(())
    }

    /// Edges per layer: every node after the first `m` attaches `m` times.
    pub fn edges_per_layer(&self) -> usize {
        let m = self.attachments();
        m * (self.n - m)
    }
}

/// Holme-Kim growth on one layer: each arriving node makes one
/// preferential attachment, then `m - 1` further links that close a
/// triangle with probability `p_triangle` and attach preferentially
/// otherwise. Duplicate targets are redrawn, so every arrival adds exactly
/// `m` edges.
fn holme_kim(n: usize, m: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut repeated: Vec<NodeId> = (0..m as NodeId).collect();
    let mut edges = Vec::with_capacity(m * (n - m));
    for source in m..n {
        let s = source as NodeId;
        let mut linked: Vec<NodeId> = Vec::with_capacity(m);
        let draw = |rng: &mut ChaCha8Rng, linked: &[NodeId]| -> NodeId {
            for _ in 0..64 {
                let t = *repeated.choose(rng).expect("nonempty");
                if !linked.contains(&t) {
                    return t;
                }
            }
            let free: Vec<NodeId> = (0..s).filter(|t| !linked.contains(t)).collect();
            *free.choose(rng).expect("an earlier node is free")
        };
        let mut target = draw(rng, &linked);
        linked.push(target);
        while linked.len() < m {
            if rng.gen::<f64>() < p {
                let closing: Vec<NodeId> = adj[target as usize]
                    .iter()
                    .copied()
                    .filter(|x| !linked.contains(x))
                    .collect();
                if let Some(&w) = closing.choose(rng) {
                    linked.push(w);
                    continue;
                }
            }
            target = draw(rng, &linked);
            linked.push(target);
        }
        for &t in &linked {
            adj[t as usize].push(s);
            adj[source].push(t);
            edges.push((t, s));
            repeated.push(t);
        }
        repeated.extend(std::iter::repeat(s).take(m));
    }
    edges
}

/// Undirected multiplex graph with independently grown layers over one node
/// set and uniformly random node labels.
pub fn generate(cfg: &SynthConfig) -> Result<MultiplexGraph> {
    cfg.validate()?;
    if cfg.avg_degree % 2 == 1 {
        warn!("odd average degree {}; using {} attachments per node", cfg.avg_degree, cfg.attachments());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let labels: Vec<Label> = (0..cfg.n).map(|_| rng.gen_range(0..cfg.n_labels) as Label).collect();
    let mut edges = Vec::with_capacity(cfg.layers * cfg.edges_per_layer());
    for l in 0..cfg.layers {
        for (u, v) in holme_kim(cfg.n, cfg.attachments(), cfg.p_triangle, &mut rng) {
            edges.push((u, v, l as LayerId));
        }
    }
    MultiplexGraph::from_edges(cfg.n, cfg.layers, false, &edges, Some(labels))
}
