//! Brute-force Hamiltonian path search the way a test tube does it.
//!
//! A directed graph is encoded as a sequence library: every node gets a
//! fixed-length oligo, every edge a linker built from the halves of its
//! endpoints' oligos, and every node a splint (the node oligo's reverse
//! complement) that ligates adjacent linkers. Mixing the library "computes"
//! by assembling random walks; selection then keeps exactly the walks that
//! start and end at the right nodes, have full length, and visit every node.
//!
//! `assemble` offers an exhaustive mode (every walk up to a node budget,
//! once each) that makes selection equivalent to a combinatorial search,
//! and a seeded stochastic mode that mirrors the physical process.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::seq::{design_library, DesignConstraints, DesignError, OligoPool, Sequence};

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least one node")]
    Empty,
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge endpoint {0} is not a node")]
    UnknownEndpoint(NodeId),
}

/// A simple directed graph: distinct integer nodes, no duplicate edges,
/// no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    nodes: Vec<NodeId>,
    out_edges: BTreeMap<NodeId, Vec<NodeId>>,
    edge_count: usize,
}

impl DiGraph {
    pub fn new(nodes: Vec<NodeId>, edges: Vec<(NodeId, NodeId)>) -> Result<DiGraph, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(GraphError::DuplicateNode(n));
            }
        }
        let mut out_edges: BTreeMap<NodeId, Vec<NodeId>> =
            nodes.iter().map(|&n| (n, Vec::new())).collect();
        let mut edge_set = BTreeSet::new();
        for &(u, v) in &edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.contains(&u) {
                return Err(GraphError::UnknownEndpoint(u));
            }
            if !seen.contains(&v) {
                return Err(GraphError::UnknownEndpoint(v));
            }
            if !edge_set.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            out_edges.get_mut(&u).unwrap().push(v);
        }
        for targets in out_edges.values_mut() {
            targets.sort_unstable();
        }
        Ok(DiGraph {
            nodes,
            out_edges,
            edge_count: edges.len(),
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.out_edges.contains_key(&n)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_edges
            .get(&u)
            .is_some_and(|ts| ts.binary_search(&v).is_ok())
    }

    /// Successors of `u` in ascending order; empty for unknown nodes.
    pub fn out(&self, u: NodeId) -> &[NodeId] {
        self.out_edges.get(&u).map_or(&[], |v| v.as_slice())
    }

    /// Edges in ascending (source, target) order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.out_edges
            .iter()
            .flat_map(|(&u, ts)| ts.iter().map(move |&v| (u, v)))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Serialize for DiGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            nodes: self.nodes.clone(),
            edges: self.edges(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<DiGraph, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        DiGraph::new(repr.nodes, repr.edges).map_err(D::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("node sequence length {0} must be even so edges can take half from each endpoint")]
    OddLength(usize),
    #[error("node sequence length {0} is too short; need at least 2 bases")]
    TooShort(usize),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// Sequence assignment for one graph: a node oligo per node, with splints
/// and edge linkers derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    node_seq: BTreeMap<NodeId, Sequence>,
    length: usize,
}

impl Encoding {
    pub fn node_seq(&self, n: NodeId) -> Option<&Sequence> {
        self.node_seq.get(&n)
    }

    /// Ligation splint: the node oligo's reverse complement.
    pub fn splint_seq(&self, n: NodeId) -> Option<Sequence> {
        self.node_seq.get(&n).map(|s| s.reverse_complement())
    }

    /// Edge linker: last half of the source oligo, then first half of the
    /// target oligo.
    pub fn edge_seq(&self, u: NodeId, v: NodeId) -> Option<Sequence> {
        let half = self.length / 2;
        let s = self.node_seq.get(&u)?;
        let t = self.node_seq.get(&v)?;
        Some(s.slice(half, self.length).concat(&t.slice(0, half)))
    }

    pub fn node_len(&self) -> usize {
        self.length
    }
}

/// Default node oligo length in bases.
pub const DEFAULT_NODE_LEN: usize = 20;

/// Assigns a designed sequence library to the graph's nodes.
///
/// The constraint length must be even (edges take half from each endpoint)
/// and at least 2. Design infeasibility propagates.
pub fn encode_graph(
    g: &DiGraph,
    c: &DesignConstraints,
    seed: u64,
) -> Result<Encoding, EncodeError> {
    if c.length < 2 {
        return Err(EncodeError::TooShort(c.length));
    }
    if !c.length.is_multiple_of(2) {
        return Err(EncodeError::OddLength(c.length));
    }
    let lib = design_library(c, g.node_count(), seed)?;
    // Nodes in ascending id order pair with the library in design order,
    // so the assignment is reproducible for a given seed.
    let mut ids: Vec<NodeId> = g.nodes().to_vec();
    ids.sort_unstable();
    Ok(Encoding {
        node_seq: ids.into_iter().zip(lib).collect(),
        length: c.length,
    })
}

/// A multiset of walks. Every walk respects the edges of the graph it was
/// assembled from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathPool {
    walks: BTreeMap<Vec<NodeId>, u64>,
}

impl PathPool {
    pub fn new() -> PathPool {
        PathPool::default()
    }

    pub fn insert(&mut self, walk: Vec<NodeId>, count: u64) {
        if count == 0 {
            return;
        }
        *self.walks.entry(walk).or_insert(0) += count;
    }

    pub fn count(&self, walk: &[NodeId]) -> u64 {
        self.walks.get(walk).copied().unwrap_or(0)
    }

    /// Number of distinct walks.
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<NodeId>, u64)> {
        self.walks.iter().map(|(w, &c)| (w, c))
    }

    pub fn total(&self) -> u64 {
        self.walks.values().sum()
    }
}

/// Hybridization stop probability used when none is given.
pub const DEFAULT_STOP_PROB: f64 = 0.1;

/// How walks are assembled from the encoded library.
#[derive(Debug, Clone, PartialEq)]
pub enum AssemblyMode {
    /// Every walk of 1 to `max_nodes` nodes, exactly once.
    Exhaustive { max_nodes: usize },
    /// `samples` seeded random walks: uniform start node, uniform out-edge
    /// steps, stopping at dead ends or with probability `stop_prob`.
    Stochastic {
        samples: u64,
        seed: u64,
        stop_prob: f64,
    },
}

impl AssemblyMode {
    pub fn stochastic(samples: u64, seed: u64) -> AssemblyMode {
        AssemblyMode::Stochastic {
            samples,
            seed,
            stop_prob: DEFAULT_STOP_PROB,
        }
    }
}

/// Assembles a walk pool from the graph under the given mode.
pub fn assemble(g: &DiGraph, mode: &AssemblyMode) -> PathPool {
    let mut pool = PathPool::new();
    match *mode {
        AssemblyMode::Exhaustive { max_nodes } => {
            let mut walk = Vec::new();
            for &start in g.nodes() {
                walk.push(start);
                extend_exhaustive(g, &mut walk, max_nodes, &mut pool);
                walk.pop();
            }
        }
        AssemblyMode::Stochastic {
            samples,
            seed,
            stop_prob,
        } => {
            assert!(
                (0.0..=1.0).contains(&stop_prob),
                "stop probability in [0, 1]"
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let start = g.nodes()[rng.gen_range(0..g.node_count())];
                let mut walk = vec![start];
                loop {
                    if rng.gen::<f64>() < stop_prob {
                        break;
                    }
                    let outs = g.out(*walk.last().unwrap());
                    if outs.is_empty() {
                        break;
                    }
                    walk.push(outs[rng.gen_range(0..outs.len())]);
                }
                pool.insert(walk, 1);
            }
        }
    }
    pool
}

fn extend_exhaustive(g: &DiGraph, walk: &mut Vec<NodeId>, max_nodes: usize, pool: &mut PathPool) {
    if walk.len() > max_nodes {
        return;
    }
    pool.insert(walk.clone(), 1);
    if walk.len() == max_nodes {
        return;
    }
    let last = *walk.last().unwrap();
    for &next in g.out(last) {
        walk.push(next);
        extend_exhaustive(g, walk, max_nodes, pool);
        walk.pop();
    }
}

/// Walks that start at `start`, end at `end`, and visit every node of `g`
/// exactly once, in ascending walk order.
///
/// Panics if `start` or `end` is not a node of `g`.
pub fn select_hamiltonian(
    pool: &PathPool,
    g: &DiGraph,
    start: NodeId,
    end: NodeId,
) -> Vec<Vec<NodeId>> {
    assert!(g.contains_node(start), "start node {start} not in graph");
    assert!(g.contains_node(end), "end node {end} not in graph");
    let n = g.node_count();
    pool.iter()
        .filter(|(walk, _)| {
            walk.len() == n
                && walk.first() == Some(&start)
                && walk.last() == Some(&end)
                && walk.iter().collect::<BTreeSet<_>>().len() == n
        })
        .map(|(walk, _)| walk.clone())
        .collect()
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error(
        "walk {} visits node {node}, which has no sequence assignment",
        WalkDisplay(path)
    )]
    UnknownNode { path: Vec<NodeId>, node: NodeId },
}

struct WalkDisplay<'a>(&'a [NodeId]);

impl fmt::Display for WalkDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(" -> "))
    }
}

/// Renders every walk in the pool to its physical strand: the node oligos
/// concatenated in walk order. Counts carry over; identical strands merge.
pub fn to_strands(pool: &PathPool, e: &Encoding) -> Result<OligoPool, RenderError> {
    let mut out = OligoPool::new();
    for (walk, count) in pool.iter() {
        let mut strand = Sequence::default();
        for &node in walk {
            let seq = e.node_seq(node).ok_or_else(|| RenderError::UnknownNode {
                path: walk.clone(),
                node,
            })?;
            strand = strand.concat(seq);
        }
        out.insert(strand, count);
    }
    Ok(out)
}
