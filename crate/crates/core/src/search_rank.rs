//! Ranking search: enumerate solution paths by increasing scalarized cost
//! `c_p`, keeping the best ψ value seen. Since `ψ(x) ≥ w(c_p(P))` for
//! `p ∈ core(v̄)`, the enumeration stops as soon as the next candidate's
//! `w(ḡ + h̄)` reaches the incumbent.
//!
//! Labels are attached to paths and every node holds its own queue of
//! labels. A node is *closed* while its one expanded label has not yet been
//! completed into a solution path; its other labels wait until the node is
//! reopened. This favours depth-first completion of the current best
//! candidate. The search stops only when no waiting label, blocked or not,
//! can still beat the incumbent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::choquet::dot;
use crate::graph::NodeId;
use crate::solution::{LabelArena, PathMarks, Problem, SearchStats, Solution, SolveError, NO_PARENT};

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    depth: u32,
    id: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.depth.cmp(&self.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Waiting,
    Expanded,
    /// Part of an emitted solution path.
    Consumed,
    Dead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSolution {
    pub solution: Solution,
    /// Scalarized cost `c_p` of every emitted solution path, in order.
    pub emitted: Vec<f64>,
}

struct State<'p, 'a> {
    problem: &'p Problem<'a>,
    arena: LabelArena,
    status: Vec<Status>,
    live_children: Vec<u32>,
    queues: Vec<BinaryHeap<Entry>>,
    in_open: Vec<bool>,
    closed_by: Vec<Option<u32>>,
    global: BinaryHeap<(Entry, NodeId)>,
    stats: SearchStats,
}

impl State<'_, '_> {
    fn entry(&self, id: u32) -> Entry {
        let n = self.arena.node[id as usize];
        Entry {
            key: self.arena.gbar[id as usize] + self.problem.heuristics.scalar(n),
            depth: self.arena.depth[id as usize],
            id,
        }
    }

    fn open_node(&mut self, n: NodeId) {
        if let Some(&top) = self.queues[n].peek() {
            self.in_open[n] = true;
            self.global.push((top, n));
        }
    }

    /// Pops the best label among open nodes.
    fn select(&mut self) -> Option<u32> {
        while let Some((entry, n)) = self.global.pop() {
            if self.in_open[n] && self.queues[n].peek().map(|e| e.id) == Some(entry.id) {
                return Some(entry.id);
            }
        }
        None
    }

    /// The next label to expand, or `None` once no waiting label anywhere
    /// can beat `lambda`.
    ///
    /// Closed nodes can block each other: a waiting label below a closed
    /// node may belong to the subtree of the other node's closer, and vice
    /// versa. When no open label qualifies, the best blocked label is
    /// expanded anyway and takes over its node.
    fn next_label(&mut self, lambda: f64) -> Option<u32> {
        let crit = self.problem.criterion;
        if let Some(l) = self.select() {
            let e = self.entry(l);
            if crit.w(e.key) < lambda {
                return Some(l);
            }
            self.global.push((e, self.arena.node[l as usize]));
        }
        let blocked = (0..self.queues.len())
            .filter(|&n| self.closed_by[n].is_some())
            .filter_map(|n| self.queues[n].peek())
            .max()?;
        (crit.w(blocked.key) < lambda).then_some(blocked.id)
    }

    /// A label that can no longer lead to a solution path: free its node if
    /// it was the node's expanded label, then propagate to its parent.
    fn kill(&mut self, mut id: u32) {
        loop {
            let was_expanded = self.status[id as usize] == Status::Expanded;
            self.status[id as usize] = Status::Dead;
            let n = self.arena.node[id as usize];
            if was_expanded && self.closed_by[n] == Some(id) {
                self.closed_by[n] = None;
                self.open_node(n);
            }
            let parent = self.arena.parent[id as usize];
            if parent == NO_PARENT {
                return;
            }
            let c = &mut self.live_children[parent as usize];
            *c -= 1;
            if *c > 0 || self.status[parent as usize] != Status::Expanded {
                return;
            }
            id = parent;
        }
    }

    /// Drops every waiting label whose bound reached `lambda`.
    fn collect(&mut self, lambda: f64) {
        let crit = self.problem.criterion;
        let w = |t: f64| crit.w(t);
        let mut dropped = Vec::new();
        for queue in &mut self.queues {
            if queue.peek().is_some_and(|_| queue.iter().any(|e| w(e.key) >= lambda)) {
                let (keep, drop): (Vec<Entry>, Vec<Entry>) =
                    queue.drain().partition(|e| w(e.key) < lambda);
                *queue = keep.into();
                dropped.extend(drop.into_iter().map(|e| e.id));
            }
        }
        self.stats.pruned_bound += dropped.len() as u64;
        for id in dropped {
            self.kill(id);
        }
        for n in 0..self.queues.len() {
            if self.in_open[n] {
                self.in_open[n] = false;
                self.open_node(n);
            }
        }
    }
}

pub fn solve_rank(problem: &Problem<'_>) -> Result<Solution, SolveError> {
    solve_rank_traced(problem).map(|r| r.solution)
}

/// Like [`solve_rank`], also returning the `c_p` values of the emitted
/// solution paths.
pub fn solve_rank_traced(problem: &Problem<'_>) -> Result<RankSolution, SolveError> {
    problem.validate()?;
    let graph = problem.graph;
    let crit = problem.criterion;
    let heur = problem.heuristics;
    let p = problem.p.as_slice();
    let m = graph.scenario_count();
    let nodes = graph.num_nodes();

    let mut st = State {
        problem,
        arena: LabelArena::new(m),
        status: Vec::new(),
        live_children: Vec::new(),
        queues: vec![BinaryHeap::new(); nodes],
        in_open: vec![false; nodes],
        closed_by: vec![None; nodes],
        global: BinaryHeap::new(),
        stats: SearchStats::default(),
    };
    let mut marks = PathMarks::new(nodes);
    let mut emitted = Vec::new();
    let mut incumbents = Vec::new();
    let mut lambda = f64::INFINITY;
    let mut best: Option<u32> = None;

    let s = graph.start();
    if !heur.reaches_goal(s) {
        return Err(SolveError::NoSolution);
    }
    let root = st.arena.push(s, NO_PARENT, usize::MAX, &vec![0.0; m], 0.0);
    st.status.push(Status::Waiting);
    st.live_children.push(0);
    let e = st.entry(root);
    st.queues[s].push(e);
    st.open_node(s);
    st.stats.labels_created += 1;

    let mut g_new = vec![0.0; m];
    while let Some(l) = st.next_label(lambda) {
        let n = st.arena.node[l as usize];
        st.queues[n].pop();
        st.in_open[n] = false;
        st.closed_by[n] = Some(l);
        st.status[l as usize] = Status::Expanded;
        st.stats.labels_expanded += 1;

        if graph.is_goal(n) {
            st.stats.solutions_found += 1;
            emitted.push(st.arena.gbar[l as usize]);
            let psi = crit.psi(st.arena.g(l));
            let improved = psi < lambda;
            if improved {
                lambda = psi;
                best = Some(l);
                incumbents.push(psi);
            }
            // Ancestors consumed by an earlier solution path no longer hold
            // their node.
            let chain: Vec<u32> = st
                .arena
                .chain(l)
                .filter(|&k| st.status[k as usize] == Status::Expanded)
                .collect();
            for &k in &chain {
                st.status[k as usize] = Status::Consumed;
                let node = st.arena.node[k as usize];
                if st.closed_by[node] == Some(k) {
                    st.closed_by[node] = None;
                    st.open_node(node);
                }
            }
            if improved {
                st.collect(lambda);
            }
            continue;
        }

        marks.mark(&st.arena, l, true);
        let gbar = st.arena.gbar[l as usize];
        let mut children = 0;
        for &a in graph.out_arc_ids(n) {
            let next = graph.head(a);
            if marks.contains(next) || !heur.reaches_goal(next) {
                continue;
            }
            let c = graph.cost(a);
            let gbar_new = gbar + dot(p, c);
            if crit.w(gbar_new + heur.scalar(next)) >= lambda {
                st.stats.pruned_bound += 1;
                continue;
            }
            for ((gn, g), ci) in g_new.iter_mut().zip(st.arena.g(l)).zip(c) {
                *gn = g + ci;
            }
            let id = st.arena.push(next, l, a, &g_new, gbar_new);
            st.status.push(Status::Waiting);
            st.live_children.push(0);
            st.stats.labels_created += 1;
            children += 1;
            let e = st.entry(id);
            let was_top = st.queues[next].peek().is_none_or(|t| e.cmp(t) == Ordering::Greater);
            st.queues[next].push(e);
            if st.closed_by[next].is_none() {
                if !st.in_open[next] {
                    st.open_node(next);
                } else if was_top {
                    st.global.push((e, next));
                }
            }
        }
        marks.mark(&st.arena, l, false);
        st.live_children[l as usize] = children;
        if children == 0 {
            st.kill(l);
        }
    }

    let stats = st.stats.clone();
    match best {
        Some(id) => Ok(RankSolution {
            solution: st.arena.solution(graph, id, lambda, stats, incumbents),
            emitted,
        }),
        None => Err(SolveError::NoSolution),
    }
}
