//! Explicit state space graphs with scenario-dependent arc costs.

use std::collections::VecDeque;

use thiserror::Error;

use crate::choquet::CostVector;

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range (num_nodes = {num_nodes})")]
    NodeOutOfRange { node: NodeId, num_nodes: usize },
    #[error("goals must be non-empty")]
    NoGoals,
    #[error("arc {arc}: cost vector has length {got}, expected m = {expected}")]
    CostLength { arc: usize, expected: usize, got: usize },
    #[error("arc {arc}: cost component {index} = {value} is negative or not finite")]
    BadCost { arc: usize, index: usize, value: f64 },
    #[error("no goal node is reachable from the start node {0}")]
    Unreachable(NodeId),
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(NodeId, NodeId),
    #[error("path must contain at least one node")]
    EmptyPath,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

/// Directed graph `G = (N, A)` with a start node, a goal set and a cost
/// vector of `m` scenario costs on each arc. Arcs are stored in CSR form;
/// parallel arcs are allowed.
#[derive(Debug, Clone)]
pub struct StateSpaceGraph {
    m: usize,
    num_nodes: usize,
    start: NodeId,
    goals: Vec<NodeId>,
    is_goal: Vec<bool>,
    tails: Vec<NodeId>,
    heads: Vec<NodeId>,
    costs: Vec<f64>,
    out_offsets: Vec<usize>,
    out_arcs: Vec<ArcId>,
    in_offsets: Vec<usize>,
    in_arcs: Vec<ArcId>,
}

fn csr(num_nodes: usize, keys: &[NodeId]) -> (Vec<usize>, Vec<ArcId>) {
    let mut offsets = vec![0usize; num_nodes + 1];
    for &k in keys {
        offsets[k + 1] += 1;
    }
    for i in 0..num_nodes {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut arcs = vec![0; keys.len()];
    for (arc, &k) in keys.iter().enumerate() {
        arcs[fill[k]] = arc;
        fill[k] += 1;
    }
    (offsets, arcs)
}

impl StateSpaceGraph {
    /// Builds and validates a graph from `(from, to, costs)` triples.
    /// Arc ids follow the order of `arcs`.
    pub fn new<I, C>(
        m: usize,
        num_nodes: usize,
        start: NodeId,
        goals: Vec<NodeId>,
        arcs: I,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, C)>,
        C: AsRef<[f64]>,
    {
        let check = |node: NodeId| {
            if node >= num_nodes {
                Err(GraphError::NodeOutOfRange { node, num_nodes })
            } else {
                Ok(())
            }
        };
        check(start)?;
        if goals.is_empty() {
            return Err(GraphError::NoGoals);
        }
        let mut is_goal = vec![false; num_nodes];
        for &g in &goals {
            check(g)?;
            is_goal[g] = true;
        }
        let mut tails = Vec::new();
        let mut heads = Vec::new();
        let mut costs = Vec::new();
        for (arc, (from, to, c)) in arcs.into_iter().enumerate() {
            check(from)?;
            check(to)?;
            let c = c.as_ref();
            if c.len() != m {
                return Err(GraphError::CostLength {
                    arc,
                    expected: m,
                    got: c.len(),
                });
            }
            if let Some(index) = c.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(GraphError::BadCost {
                    arc,
                    index,
                    value: c[index],
                });
            }
            tails.push(from);
            heads.push(to);
            costs.extend_from_slice(c);
        }
        let (out_offsets, out_arcs) = csr(num_nodes, &tails);
        let (in_offsets, in_arcs) = csr(num_nodes, &heads);
        let graph = StateSpaceGraph {
            m,
            num_nodes,
            start,
            goals,
            is_goal,
            tails,
            heads,
            costs,
            out_offsets,
            out_arcs,
            in_offsets,
            in_arcs,
        };
        if !graph.goal_reachable() {
            return Err(GraphError::Unreachable(start));
        }
        Ok(graph)
    }

    fn goal_reachable(&self) -> bool {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(n) = queue.pop_front() {
            if self.is_goal[n] {
                return true;
            }
            for &a in self.out_arc_ids(n) {
                let h = self.heads[a];
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        false
    }

    pub fn scenario_count(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_arcs(&self) -> usize {
        self.heads.len()
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn goals(&self) -> &[NodeId] {
        &self.goals
    }

    #[inline]
    pub fn is_goal(&self, n: NodeId) -> bool {
        self.is_goal[n]
    }

    #[inline]
    pub fn tail(&self, a: ArcId) -> NodeId {
        self.tails[a]
    }

    #[inline]
    pub fn head(&self, a: ArcId) -> NodeId {
        self.heads[a]
    }

    #[inline]
    pub fn cost(&self, a: ArcId) -> &[f64] {
        &self.costs[a * self.m..(a + 1) * self.m]
    }

    #[inline]
    pub fn out_arc_ids(&self, n: NodeId) -> &[ArcId] {
        &self.out_arcs[self.out_offsets[n]..self.out_offsets[n + 1]]
    }

    #[inline]
    pub fn in_arc_ids(&self, n: NodeId) -> &[ArcId] {
        &self.in_arcs[self.in_offsets[n]..self.in_offsets[n + 1]]
    }

    pub fn max_arc_cost(&self) -> f64 {
        self.costs.iter().copied().fold(0.0, f64::max)
    }

    /// All arcs as `(from, to, costs)` in id order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, &[f64])> + '_ {
        (0..self.num_arcs()).map(move |a| (self.tails[a], self.heads[a], self.cost(a)))
    }
}

/// A path `⟨n_0, …, n_k⟩`, kept as its start node and the arcs it follows
/// (so parallel arcs give distinct paths).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    nodes: Vec<NodeId>,
    arcs: Vec<ArcId>,
}

impl Path {
    pub fn single(node: NodeId) -> Self {
        Path {
            nodes: vec![node],
            arcs: Vec::new(),
        }
    }

    pub fn from_arcs(graph: &StateSpaceGraph, start: NodeId, arcs: Vec<ArcId>) -> Result<Self, GraphError> {
        let mut nodes = vec![start];
        for &a in &arcs {
            let last = *nodes.last().unwrap();
            if a >= graph.num_arcs() || graph.tail(a) != last {
                return Err(GraphError::NotAdjacent(
                    last,
                    graph.heads.get(a).copied().unwrap_or(usize::MAX),
                ));
            }
            nodes.push(graph.head(a));
        }
        Ok(Path { nodes, arcs })
    }

    /// Resolves each consecutive pair to the first arc listed between them.
    pub fn from_nodes(graph: &StateSpaceGraph, nodes: &[NodeId]) -> Result<Self, GraphError> {
        let (&first, _) = nodes.split_first().ok_or(GraphError::EmptyPath)?;
        if first >= graph.num_nodes() {
            return Err(GraphError::NodeOutOfRange {
                node: first,
                num_nodes: graph.num_nodes(),
            });
        }
        let mut arcs = Vec::with_capacity(nodes.len() - 1);
        for pair in nodes.windows(2) {
            let arc = graph
                .out_arc_ids(pair[0])
                .iter()
                .copied()
                .filter(|&a| graph.head(a) == pair[1])
                .min()
                .ok_or(GraphError::NotAdjacent(pair[0], pair[1]))?;
            arcs.push(arc);
        }
        Ok(Path {
            nodes: nodes.to_vec(),
            arcs,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Path) -> Result<Path, GraphError> {
        if self.last() != other.first() {
            return Err(GraphError::NotAdjacent(self.last(), other.first()));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        Ok(Path { nodes, arcs })
    }
}

/// `c(P, s) = Σ_{a∈P} c(a, s)` for every scenario `s`.
pub fn path_cost(graph: &StateSpaceGraph, path: &Path) -> Result<CostVector, GraphError> {
    let mut total = vec![0.0; graph.scenario_count()];
    let mut at = path.first();
    for &a in path.arcs() {
        if a >= graph.num_arcs() || graph.tail(a) != at {
            return Err(GraphError::NotAdjacent(at, graph.heads.get(a).copied().unwrap_or(usize::MAX)));
        }
        for (t, c) in total.iter_mut().zip(graph.cost(a)) {
            *t += c;
        }
        at = graph.head(a);
    }
    Ok(CostVector::new(total).expect("sums of valid arc costs are valid"))
}

/// Weak Pareto dominance `x ≤ y` componentwise.
#[inline]
pub fn weakly_dominates(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

/// Weak dominance with `x ≠ y`.
#[inline]
pub fn strictly_dominates(x: &[f64], y: &[f64]) -> bool {
    weakly_dominates(x, y) && x != y
}

/// Checked weak Pareto dominance.
pub fn pareto_dominates(x: &CostVector, y: &CostVector) -> Result<bool, GraphError> {
    if x.len() != y.len() {
        return Err(GraphError::Dimension(x.len(), y.len()));
    }
    Ok(weakly_dominates(x.as_slice(), y.as_slice()))
}

/// A detected subpath `[n, g, f, P]` together with its scalarized cost `ḡ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub node: NodeId,
    pub g: CostVector,
    pub f: CostVector,
    pub gbar: f64,
    pub path: Path,
}

/// Keeps the items whose key is not strictly dominated by any other item's
/// key; among items with equal keys only the first one survives.
pub fn nd_filter_by<T>(items: Vec<T>, key: impl Fn(&T) -> &[f64]) -> Vec<T> {
    let keep: Vec<bool> = (0..items.len())
        .map(|i| {
            let gi = key(&items[i]);
            !items.iter().enumerate().any(|(j, other)| {
                let gj = key(other);
                strictly_dominates(gj, gi) || (j < i && gj == gi)
            })
        })
        .collect();
    items
        .into_iter()
        .zip(keep)
        .filter_map(|(item, k)| k.then_some(item))
        .collect()
}

/// Non-dominated labels with respect to their `g` vectors.
pub fn nd_filter(labels: Vec<Label>) -> Vec<Label> {
    nd_filter_by(labels, |l| l.g.as_slice())
}
