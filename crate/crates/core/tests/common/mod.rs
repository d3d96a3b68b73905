//! Shared helpers for the integration tests: fixtures, the seeded small
//! instance suite, and independent reference implementations.

#![allow(dead_code)]

use std::path::PathBuf;

use choquet_path::capacity::{Capacity, ProbabilityVector};
use choquet_path::graph::StateSpaceGraph;
use choquet_path::heuristics::{apply_gamma, HeuristicTables};
use choquet_path::instance::{generate, CapacityKind, GeneratorParams, Instance, ResolvedInstance};
use choquet_path::search_mo::{solve_mo_with, MoConfig};
use choquet_path::search_rank::{solve_rank_traced, RankSolution};
use choquet_path::solution::{Problem, Solution};

pub const EPS: f64 = 1e-9;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> Instance {
    Instance::load(fixture_path(name)).unwrap()
}

pub const FIXTURES: [&str; 3] = ["example1.json", "example2.json", "example3.json"];

pub struct Case {
    pub seed: u64,
    pub params: GeneratorParams,
    pub alpha: f64,
    pub instance: Instance,
    pub resolved: ResolvedInstance,
}

impl Case {
    pub fn label(&self) -> String {
        format!(
            "seed {} (n = {}, m = {}, {}, alpha = {})",
            self.seed, self.params.num_nodes, self.params.m, self.params.capacity, self.alpha
        )
    }
}

/// `count` seeded instances: 8–12 nodes, density 0.45, m ∈ {2, 3, 4},
/// v1 and v2 capacities, power disutility with exponent 1, 2 or 3.
pub fn small_suite(count: usize) -> Vec<Case> {
    (0..count)
        .map(|k| {
            let n = 8 + k % 5;
            let m = 2 + (k / 5) % 3;
            let kind = if (k / 15) % 2 == 0 { CapacityKind::V1 } else { CapacityKind::V2 };
            let alpha = (1 + (k / 2) % 3) as f64;
            let seed = 1000 + k as u64;
            let params = GeneratorParams::new(n, 0.45, m, kind);
            let mut instance = generate(&params, seed).unwrap();
            instance.disutility.exponent = alpha;
            let resolved = instance.resolve().unwrap();
            Case {
                seed,
                params,
                alpha,
                instance,
                resolved,
            }
        })
        .collect()
}

pub struct Tables {
    pub p: ProbabilityVector,
    pub tables: HeuristicTables,
}

pub fn tables(r: &ResolvedInstance, p: ProbabilityVector, gamma: f64) -> Tables {
    let exact = HeuristicTables::exact(&r.graph, &p).unwrap();
    Tables {
        tables: apply_gamma(&exact, gamma).unwrap(),
        p,
    }
}

pub fn maxent_tables(r: &ResolvedInstance, gamma: f64) -> Tables {
    tables(r, r.capacity().max_entropy().unwrap(), gamma)
}

pub fn run_mo(r: &ResolvedInstance, t: &Tables, config: MoConfig) -> Solution {
    solve_mo_with(&Problem::new(&r.graph, &r.criterion, &t.p, &t.tables), config).unwrap()
}

pub fn run_rank(r: &ResolvedInstance, t: &Tables) -> RankSolution {
    solve_rank_traced(&Problem::new(&r.graph, &r.criterion, &t.p, &t.tables)).unwrap()
}

// ---- independent references -------------------------------------------

/// Choquet integral straight from the definition over the ascending
/// permutation: `Σ_i (z_(i) − z_(i−1)) v({j : z_j ≥ z_(i)})`, recomputing the
/// upper level set by scanning all components.
pub fn reference_choquet(values: &[f64], z: &[f64]) -> f64 {
    let mut levels: Vec<f64> = z.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut prev = 0.0;
    let mut total = 0.0;
    for &t in &levels {
        let mask = z
            .iter()
            .enumerate()
            .filter(|(_, &zi)| zi >= t)
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        total += (t - prev) * values[mask];
        prev = t;
    }
    total
}

pub fn reference_psi(r: &ResolvedInstance, x: &[f64]) -> f64 {
    let w = r.disutility();
    let z: Vec<f64> = x.iter().map(|&t| w.eval(t)).collect();
    reference_choquet(r.capacity().values(), &z)
}

/// All simple start→goal paths stopping at the first goal, as
/// `(node sequence, cost vector)`, by plain recursion.
pub fn reference_paths(g: &StateSpaceGraph) -> Vec<(Vec<usize>, Vec<f64>)> {
    fn go(
        g: &StateSpaceGraph,
        nodes: &mut Vec<usize>,
        cost: Vec<f64>,
        out: &mut Vec<(Vec<usize>, Vec<f64>)>,
    ) {
        let n = *nodes.last().unwrap();
        if g.goals().contains(&n) {
            out.push((nodes.clone(), cost));
            return;
        }
        for (from, to, c) in g.arcs() {
            if from != n || nodes.contains(&to) {
                continue;
            }
            let next: Vec<f64> = cost.iter().zip(c).map(|(a, b)| a + b).collect();
            nodes.push(to);
            go(g, nodes, next, out);
            nodes.pop();
        }
    }
    let mut out = Vec::new();
    go(g, &mut vec![g.start()], vec![0.0; g.scenario_count()], &mut out);
    out
}

/// Minimum ψ over all solution paths, by the references above.
pub fn reference_optimum(r: &ResolvedInstance) -> f64 {
    reference_paths(&r.graph)
        .iter()
        .map(|(_, x)| reference_psi(r, x))
        .fold(f64::INFINITY, f64::min)
}

/// Whether `p` lies in the core of the dual of `v`, checked over all events.
pub fn reference_in_core(v: &Capacity, p: &[f64], tol: f64) -> bool {
    let m = v.scenario_count();
    let full = (1usize << m) - 1;
    (0..=full).all(|a| {
        let pa: f64 = (0..m).filter(|i| a >> i & 1 == 1).map(|i| p[i]).sum();
        let upper = v.values()[a];
        let lower = 1.0 - v.values()[full & !a];
        lower - tol <= pa && pa <= upper + tol
    })
}

/// Exhaustive submodularity check over all `4^m` pairs.
pub fn reference_is_concave(values: &[f64]) -> bool {
    let n = values.len();
    (0..n).all(|a| (0..n).all(|b| values[a | b] + values[a & b] <= values[a] + values[b] + 1e-12))
}
