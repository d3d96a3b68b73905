//! Label-based multiobjective best-first search for a ψ-optimal path.
//!
//! Labels are attached to subpaths. At each node only the labels whose cost
//! vectors are Pareto non-dominated are kept (Rule 1), and a label is
//! dropped once `max{ψ(f), w(c_p(P) + h̄(n))}` reaches the value `λ` of the
//! best solution found so far (Rule 2). With admissible heuristics the
//! first of these keys is a lower bound on ψ of every completion, so the
//! search is exact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::choquet::dot;
use crate::graph::{strictly_dominates, weakly_dominates, NodeId};
use crate::solution::{LabelArena, PathMarks, Problem, SearchStats, Solution, SolveError, NO_PARENT};

/// How labels reaching the same node are filtered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retention {
    /// Keep the Pareto non-dominated labels (Rule 1).
    #[default]
    Pareto,
    /// Keep every label.
    KeepAll,
    /// Keep only the label with the smallest ψ of its own cost. Not exact:
    /// ψ does not satisfy the Bellman principle.
    PsiGreedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoConfig {
    pub retention: Retention,
    /// Include `w(c_p(P) + h̄(n))` in the label key (Rule 2).
    pub rule2: bool,
}

impl Default for MoConfig {
    fn default() -> Self {
        MoConfig {
            retention: Retention::Pareto,
            rule2: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct OpenEntry {
    key: f64,
    psi_f: f64,
    depth: u32,
    id: u32,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

// BinaryHeap is a max-heap: reverse everything so the smallest key pops first.
impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.psi_f.total_cmp(&self.psi_f))
            .then_with(|| other.depth.cmp(&self.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Solves with the default configuration (Rule 1 and Rule 2 on).
pub fn solve_mo(problem: &Problem<'_>) -> Result<Solution, SolveError> {
    solve_mo_with(problem, MoConfig::default())
}

pub fn solve_mo_with(problem: &Problem<'_>, config: MoConfig) -> Result<Solution, SolveError> {
    problem.validate()?;
    let graph = problem.graph;
    let crit = problem.criterion;
    let heur = problem.heuristics;
    let p = problem.p.as_slice();
    let m = graph.scenario_count();

    let mut arena = LabelArena::new(m);
    let mut alive: Vec<bool> = Vec::new();
    let mut psi_g_of: Vec<f64> = Vec::new();
    let mut at_node: Vec<Vec<u32>> = vec![Vec::new(); graph.num_nodes()];
    let mut open = BinaryHeap::new();
    let mut marks = PathMarks::new(graph.num_nodes());
    let mut stats = SearchStats::default();
    let mut incumbents = Vec::new();
    let mut lambda = f64::INFINITY;
    let mut best: Option<u32> = None;

    let key_of = |psi_f: f64, gbar: f64, n: NodeId| {
        if config.rule2 {
            psi_f.max(crit.w(gbar + heur.scalar(n)))
        } else {
            psi_f
        }
    };

    let s = graph.start();
    if !heur.reaches_goal(s) {
        return Err(SolveError::NoSolution);
    }
    let zero = vec![0.0; m];
    let root = arena.push(s, NO_PARENT, usize::MAX, &zero, 0.0);
    alive.push(true);
    psi_g_of.push(0.0);
    at_node[s].push(root);
    let psi_f = crit.psi(heur.vector(s));
    open.push(OpenEntry {
        key: key_of(psi_f, 0.0, s),
        psi_f,
        depth: 0,
        id: root,
    });
    stats.labels_created += 1;

    let mut g_new = vec![0.0; m];
    let mut f_new = vec![0.0; m];

    while let Some(entry) = open.pop() {
        let l = entry.id;
        if !alive[l as usize] {
            continue;
        }
        if entry.key >= lambda {
            // Every remaining open label is bounded below by λ.
            stats.pruned_bound += 1 + open.iter().filter(|e| alive[e.id as usize]).count() as u64;
            break;
        }
        stats.labels_expanded += 1;
        // closed: stays in `at_node` for dominance checks, never reopened
        alive[l as usize] = false;
        let n = arena.node[l as usize];

        if graph.is_goal(n) {
            stats.solutions_found += 1;
            let psi_g = crit.psi(arena.g(l));
            if psi_g < lambda {
                lambda = psi_g;
                best = Some(l);
                incumbents.push(psi_g);
            }
            continue;
        }

        marks.mark(&arena, l, true);
        let gbar = arena.gbar[l as usize];
        for &a in graph.out_arc_ids(n) {
            let next = graph.head(a);
            if marks.contains(next) || !heur.reaches_goal(next) {
                continue;
            }
            let c = graph.cost(a);
            let h = heur.vector(next);
            let g = arena.g(l);
            for i in 0..m {
                g_new[i] = g[i] + c[i];
                f_new[i] = g_new[i] + h[i];
            }
            let psi_f = crit.psi(&f_new);
            let gbar_new = gbar + dot(p, c);
            let key = key_of(psi_f, gbar_new, next);
            if key >= lambda {
                stats.pruned_bound += 1;
                continue;
            }

            let psi_g = match config.retention {
                Retention::PsiGreedy => crit.psi(&g_new),
                _ => 0.0,
            };
            match config.retention {
                Retention::KeepAll => {}
                Retention::Pareto => {
                    let labels = &mut at_node[next];
                    if labels.iter().any(|&k| weakly_dominates(arena.g(k), &g_new)) {
                        stats.pruned_dominance += 1;
                        continue;
                    }
                    labels.retain(|&k| {
                        if strictly_dominates(&g_new, arena.g(k)) {
                            if alive[k as usize] {
                                alive[k as usize] = false;
                                stats.pruned_dominance += 1;
                            }
                            false
                        } else {
                            true
                        }
                    });
                }
                Retention::PsiGreedy => {
                    let labels = &mut at_node[next];
                    if let Some(&k) = labels.first() {
                        if psi_g_of[k as usize] <= psi_g {
                            stats.pruned_dominance += 1;
                            continue;
                        }
                        alive[k as usize] = false;
                        stats.pruned_dominance += 1;
                        labels.clear();
                    }
                }
            }

            let id = arena.push(next, l, a, &g_new, gbar_new);
            alive.push(true);
            psi_g_of.push(psi_g);
            at_node[next].push(id);
            open.push(OpenEntry {
                key,
                psi_f,
                depth: arena.depth[id as usize],
                id,
            });
            stats.labels_created += 1;
        }
        marks.mark(&arena, l, false);
    }

    match best {
        Some(id) => Ok(arena.solution(graph, id, lambda, stats, incumbents)),
        None => Err(SolveError::NoSolution),
    }
}
