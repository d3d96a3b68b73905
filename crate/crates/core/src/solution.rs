//! Types shared by the solvers: inputs, results, statistics, errors.

use serde::Serialize;
use thiserror::Error;

use crate::capacity::{CapacityError, ProbabilityVector, TOL};
use crate::choquet::{CostVector, Criterion};
use crate::graph::{ArcId, Path, StateSpaceGraph};
use crate::heuristics::HeuristicTables;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("no solution path from the start node to a goal")]
    NoSolution,
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("probability vector is not in the core of the dual capacity")]
    OutsideCore,
    #[error("dimension mismatch: {what} has {got} scenarios, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("heuristic tables cover {got} nodes, graph has {expected}")]
    HeuristicSize { expected: usize, got: usize },
}

/// Everything a solver reads. All borrowed, so one set of tables can serve
/// several solves.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub graph: &'a StateSpaceGraph,
    pub criterion: &'a Criterion,
    pub p: &'a ProbabilityVector,
    pub heuristics: &'a HeuristicTables,
}

impl<'a> Problem<'a> {
    pub fn new(
        graph: &'a StateSpaceGraph,
        criterion: &'a Criterion,
        p: &'a ProbabilityVector,
        heuristics: &'a HeuristicTables,
    ) -> Self {
        Problem {
            graph,
            criterion,
            p,
            heuristics,
        }
    }

    /// Concave capacity, `p ∈ core(v̄)`, matching dimensions.
    pub fn validate(&self) -> Result<(), SolveError> {
        let m = self.graph.scenario_count();
        let dims = [
            ("capacity", self.criterion.scenario_count()),
            ("probability vector", self.p.len()),
        ];
        for (what, got) in dims {
            if got != m {
                return Err(SolveError::Dimension {
                    what,
                    expected: m,
                    got,
                });
            }
        }
        if self.heuristics.num_nodes() != self.graph.num_nodes() {
            return Err(SolveError::HeuristicSize {
                expected: self.graph.num_nodes(),
                got: self.heuristics.num_nodes(),
            });
        }
        if !self.criterion.capacity().core_contains(self.p, TOL)? {
            return Err(SolveError::OutsideCore);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub labels_created: u64,
    pub labels_expanded: u64,
    /// Labels discarded or removed by Pareto dominance at their node.
    pub pruned_dominance: u64,
    /// Labels discarded because their bound reached the incumbent value.
    pub pruned_bound: u64,
    /// Goal labels reached (solution paths detected / enumerated).
    pub solutions_found: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub psi: f64,
    pub cost: CostVector,
    pub path: Path,
    pub stats: SearchStats,
    /// Successive incumbent values, one entry per improvement.
    pub incumbents: Vec<f64>,
}

/// Arena of search labels: parent links, arcs and flat cost vectors.
#[derive(Debug)]
pub(crate) struct LabelArena {
    m: usize,
    pub parent: Vec<u32>,
    pub arc: Vec<ArcId>,
    pub node: Vec<usize>,
    pub depth: Vec<u32>,
    pub gbar: Vec<f64>,
    g: Vec<f64>,
}

pub(crate) const NO_PARENT: u32 = u32::MAX;

impl LabelArena {
    pub fn new(m: usize) -> Self {
        LabelArena {
            m,
            parent: Vec::new(),
            arc: Vec::new(),
            node: Vec::new(),
            depth: Vec::new(),
            gbar: Vec::new(),
            g: Vec::new(),
        }
    }

    pub fn push(&mut self, node: usize, parent: u32, arc: ArcId, g: &[f64], gbar: f64) -> u32 {
        let id = self.node.len() as u32;
        let depth = if parent == NO_PARENT {
            0
        } else {
            self.depth[parent as usize] + 1
        };
        self.parent.push(parent);
        self.arc.push(arc);
        self.node.push(node);
        self.depth.push(depth);
        self.gbar.push(gbar);
        self.g.extend_from_slice(g);
        id
    }

    #[inline]
    pub fn g(&self, id: u32) -> &[f64] {
        let i = id as usize * self.m;
        &self.g[i..i + self.m]
    }

    /// Ancestors of `id`, itself included, from `id` back to the root.
    pub fn chain(&self, id: u32) -> impl Iterator<Item = u32> + '_ {
        std::iter::successors(Some(id), move |&l| {
            let p = self.parent[l as usize];
            (p != NO_PARENT).then_some(p)
        })
    }

    pub fn path(&self, graph: &StateSpaceGraph, id: u32) -> Path {
        let mut arcs: Vec<ArcId> = self
            .chain(id)
            .filter(|&l| self.parent[l as usize] != NO_PARENT)
            .map(|l| self.arc[l as usize])
            .collect();
        arcs.reverse();
        Path::from_arcs(graph, graph.start(), arcs).expect("arena paths follow graph arcs")
    }

    pub fn solution(&self, graph: &StateSpaceGraph, id: u32, psi: f64, stats: SearchStats, incumbents: Vec<f64>) -> Solution {
        Solution {
            psi,
            cost: CostVector::new(self.g(id).to_vec()).expect("accumulated costs are valid"),
            path: self.path(graph, id),
            stats,
            incumbents,
        }
    }
}

/// Reusable node marker for the simple-path restriction.
pub(crate) struct PathMarks(Vec<bool>);

impl PathMarks {
    pub fn new(n: usize) -> Self {
        PathMarks(vec![false; n])
    }

    pub fn mark(&mut self, arena: &LabelArena, id: u32, value: bool) {
        for l in arena.chain(id) {
            self.0[arena.node[l as usize]] = value;
        }
    }

    #[inline]
    pub fn contains(&self, n: usize) -> bool {
        self.0[n]
    }
}
