//! Optimistic cost-to-go tables, computed by backward Dijkstra from the goals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::capacity::ProbabilityVector;
use crate::choquet::dot;
use crate::graph::{ArcId, NodeId, StateSpaceGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeuristicError {
    #[error("gamma {0} outside (0, 1]")]
    Gamma(f64),
    #[error("dimension mismatch: graph has {expected} scenarios, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(PartialEq)]
struct Entry(f64, NodeId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cheapest cost from every node to the goal set under `weight`.
/// Unreachable nodes get `f64::INFINITY`.
fn distances_to_goals(graph: &StateSpaceGraph, weight: impl Fn(ArcId) -> f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.num_nodes()];
    let mut heap = BinaryHeap::new();
    for &g in graph.goals() {
        dist[g] = 0.0;
        heap.push(Entry(0.0, g));
    }
    while let Some(Entry(d, n)) = heap.pop() {
        if d > dist[n] {
            continue;
        }
        for &a in graph.in_arc_ids(n) {
            let t = graph.tail(a);
            let nd = d + weight(a);
            if nd < dist[t] {
                dist[t] = nd;
                heap.push(Entry(nd, t));
            }
        }
    }
    dist
}

/// `h*_i(n)` for every node and scenario, row-major (`n * m + i`).
pub fn per_scenario_bounds(graph: &StateSpaceGraph) -> Vec<f64> {
    let m = graph.scenario_count();
    let n = graph.num_nodes();
    let mut table = vec![0.0; n * m];
    for i in 0..m {
        let d = distances_to_goals(graph, |a| graph.cost(a)[i]);
        for (node, di) in d.into_iter().enumerate() {
            table[node * m + i] = di;
        }
    }
    table
}

/// `h̄*(n)`: shortest cost to the goals under the scalarized valuation `c_p`.
pub fn scalar_bound(graph: &StateSpaceGraph, p: &ProbabilityVector) -> Result<Vec<f64>, HeuristicError> {
    if p.len() != graph.scenario_count() {
        return Err(HeuristicError::Dimension {
            expected: graph.scenario_count(),
            got: p.len(),
        });
    }
    let p = p.as_slice();
    Ok(distances_to_goals(graph, |a| dot(p, graph.cost(a))))
}

/// Per-scenario vectors `h(n)` and the scalar bound `h̄(n)`, both already
/// scaled by `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicTables {
    m: usize,
    h_vec: Vec<f64>,
    h_scalar: Vec<f64>,
    gamma: f64,
}

impl HeuristicTables {
    /// Exact tables (`gamma = 1`).
    pub fn exact(graph: &StateSpaceGraph, p: &ProbabilityVector) -> Result<Self, HeuristicError> {
        Ok(HeuristicTables {
            m: graph.scenario_count(),
            h_vec: per_scenario_bounds(graph),
            h_scalar: scalar_bound(graph, p)?,
            gamma: 1.0,
        })
    }

    /// Tables with every entry zero: no guidance.
    pub fn zero(graph: &StateSpaceGraph) -> Self {
        let m = graph.scenario_count();
        let n = graph.num_nodes();
        HeuristicTables {
            m,
            h_vec: vec![0.0; n * m],
            h_scalar: vec![0.0; n],
            gamma: 1.0,
        }
    }

    pub fn from_parts(m: usize, h_vec: Vec<f64>, h_scalar: Vec<f64>) -> Self {
        assert_eq!(h_vec.len(), h_scalar.len() * m);
        HeuristicTables {
            m,
            h_vec,
            h_scalar,
            gamma: 1.0,
        }
    }

    #[inline]
    pub fn vector(&self, n: NodeId) -> &[f64] {
        &self.h_vec[n * self.m..(n + 1) * self.m]
    }

    #[inline]
    pub fn scalar(&self, n: NodeId) -> f64 {
        self.h_scalar[n]
    }

    /// Whether some goal is reachable from `n`.
    #[inline]
    pub fn reaches_goal(&self, n: NodeId) -> bool {
        self.h_scalar[n].is_finite()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_nodes(&self) -> usize {
        self.h_scalar.len()
    }
}

/// Scales every finite entry by `gamma ∈ (0, 1]`.
pub fn apply_gamma(tables: &HeuristicTables, gamma: f64) -> Result<HeuristicTables, HeuristicError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(HeuristicError::Gamma(gamma));
    }
    let scale = |x: &f64| if x.is_finite() { x * gamma } else { *x };
    Ok(HeuristicTables {
        m: tables.m,
        h_vec: tables.h_vec.iter().map(scale).collect(),
        h_scalar: tables.h_scalar.iter().map(scale).collect(),
        gamma: tables.gamma * gamma,
    })
}
