//! Exhaustive references for small instances: every simple solution path,
//! the exact ψ optimum, and a grid search for the max-entropy core element.

use thiserror::Error;

use crate::capacity::{entropy, Capacity, CapacityError, ProbabilityVector};
use crate::choquet::{dot, CostVector, Criterion};
use crate::graph::{ArcId, Path, StateSpaceGraph};
use crate::solution::{SearchStats, Solution};

pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("more than {0} simple solution paths; instance too large for the oracle")]
    CapExceeded(usize),
    #[error("no solution path")]
    NoSolution,
    #[error("grid search supports at most 3 scenarios, got {0}")]
    TooManyScenarios(usize),
    #[error("no grid point at resolution {0} lies in the core")]
    EmptyGrid(f64),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// Every simple path from the start node that ends at its first goal node,
/// with its cost vector. Parallel arcs yield distinct paths.
pub fn enumerate_solution_paths(
    graph: &StateSpaceGraph,
    cap: usize,
) -> Result<Vec<(Path, CostVector)>, OracleError> {
    let m = graph.scenario_count();
    let mut found = Vec::new();
    let mut on_path = vec![false; graph.num_nodes()];
    let mut arcs: Vec<ArcId> = Vec::new();
    let mut costs: Vec<Vec<f64>> = vec![vec![0.0; m]];
    // (node, index of the next out-arc to try)
    let mut stack = vec![(graph.start(), 0usize)];
    on_path[graph.start()] = true;

    let mut fresh = true;
    while let Some(top) = stack.len().checked_sub(1) {
        let (n, next) = stack[top];
        if fresh && graph.is_goal(n) {
            found.push((
                Path::from_arcs(graph, graph.start(), arcs.clone()).expect("dfs follows arcs"),
                CostVector::new(costs.last().unwrap().clone()).expect("valid sums"),
            ));
            if found.len() > cap {
                return Err(OracleError::CapExceeded(cap));
            }
        }
        let out = graph.out_arc_ids(n);
        let step = if graph.is_goal(n) {
            None
        } else {
            (next..out.len()).find(|&k| !on_path[graph.head(out[k])])
        };
        match step {
            Some(k) => {
                stack[top].1 = k + 1;
                let a = out[k];
                let h = graph.head(a);
                let cost: Vec<f64> = costs
                    .last()
                    .unwrap()
                    .iter()
                    .zip(graph.cost(a))
                    .map(|(x, c)| x + c)
                    .collect();
                costs.push(cost);
                arcs.push(a);
                on_path[h] = true;
                stack.push((h, 0));
                fresh = true;
            }
            None => {
                on_path[n] = false;
                stack.pop();
                arcs.pop();
                costs.pop();
                fresh = false;
            }
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedPath {
    pub path: Path,
    pub cost: CostVector,
    /// `c_p` of the path.
    pub cp: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationReport {
    pub paths: Vec<EnumeratedPath>,
    /// Index of the ψ-minimal path (ties: smallest node sequence).
    pub optimum: usize,
}

impl EnumerationReport {
    pub fn best(&self) -> &EnumeratedPath {
        &self.paths[self.optimum]
    }
}

fn argmin_psi(paths: &[EnumeratedPath]) -> Option<usize> {
    (0..paths.len()).min_by(|&a, &b| {
        paths[a]
            .psi
            .total_cmp(&paths[b].psi)
            .then_with(|| paths[a].path.cmp(&paths[b].path))
    })
}

/// Enumerates and evaluates every simple solution path.
pub fn enumerate_report(
    graph: &StateSpaceGraph,
    criterion: &Criterion,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<EnumerationReport, OracleError> {
    let paths: Vec<EnumeratedPath> = enumerate_solution_paths(graph, cap)?
        .into_iter()
        .map(|(path, cost)| EnumeratedPath {
            cp: dot(p.as_slice(), cost.as_slice()),
            psi: criterion.psi(cost.as_slice()),
            path,
            cost,
        })
        .collect();
    let optimum = argmin_psi(&paths).ok_or(OracleError::NoSolution)?;
    Ok(EnumerationReport { paths, optimum })
}

/// The exact ψ optimum by exhaustive enumeration.
pub fn brute_force_optimum(
    graph: &StateSpaceGraph,
    criterion: &Criterion,
    cap: usize,
) -> Result<Solution, OracleError> {
    let report = enumerate_report(
        graph,
        criterion,
        &ProbabilityVector::uniform(graph.scenario_count()),
        cap,
    )?;
    let best = report.paths.into_iter().nth(report.optimum).unwrap();
    Ok(Solution {
        psi: best.psi,
        cost: best.cost,
        path: best.path,
        stats: SearchStats::default(),
        incumbents: vec![best.psi],
    })
}

/// Grid search over the simplex (step `resolution`) for the max-entropy
/// point of `core(v̄)`, membership checked with tolerance `tol`.
pub fn core_grid_max_entropy(
    v: &Capacity,
    resolution: f64,
    tol: f64,
) -> Result<ProbabilityVector, OracleError> {
    let m = v.scenario_count();
    if m > 3 {
        return Err(OracleError::TooManyScenarios(m));
    }
    v.require_concave()?;
    let steps = (1.0 / resolution).round() as usize;
    let denom = steps as f64;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match m {
        1 => candidates.push(vec![1.0]),
        2 => {
            for i in 0..=steps {
                candidates.push(vec![i as f64 / denom, (steps - i) as f64 / denom]);
            }
        }
        _ => {
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    candidates.push(vec![
                        i as f64 / denom,
                        j as f64 / denom,
                        (steps - i - j) as f64 / denom,
                    ]);
                }
            }
        }
    }
    let mut best: Option<(f64, ProbabilityVector)> = None;
    for c in candidates {
        let Ok(p) = ProbabilityVector::new(c) else {
            continue;
        };
        if !v.core_contains(&p, tol)? {
            continue;
        }
        let h = entropy(&p);
        if best.as_ref().is_none_or(|(bh, _)| h > *bh) {
            best = Some((h, p));
        }
    }
    best.map(|(_, p)| p).ok_or(OracleError::EmptyGrid(resolution))
}
