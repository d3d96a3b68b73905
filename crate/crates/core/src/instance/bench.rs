//! Benchmark harness: timings of both solvers on generated instances over a
//! grid of sizes, scenario counts and scalarization bounds.
//!
//! Every (size, m, seed) instance is solved once per (bound, algorithm) and
//! all the returned ψ values must agree; small instances are also checked
//! against the exhaustive oracle. A disagreement stops the run and leaves a
//! repro bundle (instance file plus run parameters) on disk.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{CapacityError, ProbabilityVector};
use crate::heuristics::{apply_gamma, HeuristicTables};
use crate::oracle::{brute_force_optimum, OracleError, DEFAULT_PATH_CAP};
use crate::search_mo::solve_mo;
use crate::search_rank::solve_rank_traced;
use crate::solution::{Problem, SearchStats, SolveError};

use super::format::ResolvedInstance;
use super::generate::{draw_gamma, generate, generate_resolved, CapacityKind, GenerateError, GeneratorParams};

/// Largest ψ gap accepted between two exact solvers.
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Multiobjective label search.
    Mo,
    /// Ranking by scalarized cost.
    Rank,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mo => "mo",
            Algorithm::Rank => "rank",
        })
    }
}

/// Which core element of the dual capacity scalarizes costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    #[serde(rename = "maxent")]
    MaxEntropy,
    Shapley,
}

impl Bound {
    pub fn probability(self, r: &ResolvedInstance) -> Result<ProbabilityVector, CapacityError> {
        match self {
            Bound::MaxEntropy => r.capacity().max_entropy(),
            Bound::Shapley => r.capacity().shapley(),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::MaxEntropy => "maxent",
            Bound::Shapley => "shapley",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaSpec {
    Fixed(f64),
    /// Drawn in `[0.7, 1)` from the instance seed.
    Random,
}

impl GammaSpec {
    pub fn value(self, seed: u64) -> f64 {
        match self {
            GammaSpec::Fixed(g) => g,
            GammaSpec::Random => draw_gamma(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub scenario_counts: Vec<usize>,
    pub seeds_per_cell: usize,
    /// Instance `k` of a cell uses seed `base_seed + k`.
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub bounds: Vec<Bound>,
    pub gamma: GammaSpec,
    pub density: f64,
    pub capacity: CapacityKind,
    /// Instances with at most this many nodes are also checked by the oracle.
    pub oracle_max_nodes: usize,
    pub repro_dir: PathBuf,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![1000, 2000, 3000],
            scenario_counts: vec![3, 5, 10],
            seeds_per_cell: 5,
            base_seed: 1,
            algorithms: vec![Algorithm::Mo, Algorithm::Rank],
            bounds: vec![Bound::MaxEntropy, Bound::Shapley],
            gamma: GammaSpec::Random,
            density: 0.45,
            capacity: CapacityKind::V1,
            oracle_max_nodes: 12,
            repro_dir: PathBuf::from("bench-repro"),
        }
    }
}

/// One solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub bound: Bound,
    pub num_nodes: usize,
    pub m: usize,
    pub seed: u64,
    pub gamma: f64,
    pub psi: f64,
    /// Heuristic tables (shared by the algorithms on the same bound).
    pub heuristic_secs: f64,
    pub solve_secs: f64,
    /// `heuristic_secs + solve_secs`.
    pub total_secs: f64,
    pub stats: SearchStats,
    /// Solution paths emitted by the ranking search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths_enumerated: Option<usize>,
}

/// Means over the seeds of one (algorithm, bound, size, m) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub bound: Bound,
    pub num_nodes: usize,
    pub m: usize,
    pub seeds: usize,
    pub mean_total_secs: f64,
    pub mean_solve_secs: f64,
    pub mean_heuristic_secs: f64,
    pub mean_labels_created: f64,
    pub mean_labels_expanded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub records: Vec<BenchRecord>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("i/o error writing repro bundle: {0}")]
    Io(#[from] std::io::Error),
    #[error("psi disagreement on n = {num_nodes}, m = {m}, seed = {seed}: {detail}; repro bundle in {}", bundle.display())]
    Disagreement {
        num_nodes: usize,
        m: usize,
        seed: u64,
        detail: String,
        bundle: PathBuf,
    },
}

#[derive(Serialize)]
struct ReproInfo<'a> {
    num_nodes: usize,
    m: usize,
    seed: u64,
    gamma: f64,
    density: f64,
    capacity: CapacityKind,
    results: &'a [(String, f64)],
    detail: &'a str,
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        let fail = |s: &str| Err(BenchError::Config(s.to_string()));
        if self.sizes.is_empty() || self.scenario_counts.is_empty() {
            return fail("sizes and scenario counts must be non-empty");
        }
        if self.algorithms.is_empty() || self.bounds.is_empty() {
            return fail("algorithms and bounds must be non-empty");
        }
        if self.seeds_per_cell == 0 {
            return fail("seeds_per_cell must be at least 1");
        }
        if let GammaSpec::Fixed(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return fail("gamma must lie in (0, 1]");
            }
        }
        Ok(())
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    run_bench_with(config, |_| {})
}

/// Like [`run_bench`], calling `progress` after every solve.
pub fn run_bench_with(
    config: &BenchConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let mut records = Vec::new();
    for &num_nodes in &config.sizes {
        for &m in &config.scenario_counts {
            for k in 0..config.seeds_per_cell {
                let seed = config.base_seed.wrapping_add(k as u64);
                let params = GeneratorParams::new(num_nodes, config.density, m, config.capacity);
                let inst = generate_resolved(&params, seed)?;
                let gamma = config.gamma.value(seed);
                let start = records.len();
                for &bound in &config.bounds {
                    solve_all(config, &inst, bound, seed, gamma, &mut records, &mut progress)?;
                }
                check_agreement(config, &params, &inst, seed, gamma, &records[start..])?;
            }
        }
    }
    let rows = aggregate(&records);
    Ok(BenchReport {
        config: config.clone(),
        rows,
        records,
    })
}

fn solve_all(
    config: &BenchConfig,
    inst: &ResolvedInstance,
    bound: Bound,
    seed: u64,
    gamma: f64,
    records: &mut Vec<BenchRecord>,
    progress: &mut impl FnMut(&BenchRecord),
) -> Result<(), BenchError> {
    let p = bound.probability(inst)?;
    let t0 = Instant::now();
    let exact = HeuristicTables::exact(&inst.graph, &p).expect("p has m entries");
    let tables = apply_gamma(&exact, gamma).expect("gamma validated");
    let heuristic_secs = t0.elapsed().as_secs_f64();
    drop(exact);
    let problem = Problem::new(&inst.graph, &inst.criterion, &p, &tables);
    for &algorithm in &config.algorithms {
        let t1 = Instant::now();
        let (sol, paths_enumerated) = match algorithm {
            Algorithm::Mo => (solve_mo(&problem)?, None),
            Algorithm::Rank => {
                let r = solve_rank_traced(&problem)?;
                let count = r.emitted.len();
                (r.solution, Some(count))
            }
        };
        let solve_secs = t1.elapsed().as_secs_f64();
        let record = BenchRecord {
            algorithm,
            bound,
            num_nodes: inst.graph.num_nodes(),
            m: inst.graph.scenario_count(),
            seed,
            gamma,
            psi: sol.psi,
            heuristic_secs,
            solve_secs,
            total_secs: heuristic_secs + solve_secs,
            stats: sol.stats,
            paths_enumerated,
        };
        progress(&record);
        records.push(record);
    }
    Ok(())
}

fn check_agreement(
    config: &BenchConfig,
    params: &GeneratorParams,
    inst: &ResolvedInstance,
    seed: u64,
    gamma: f64,
    records: &[BenchRecord],
) -> Result<(), BenchError> {
    let mut results: Vec<(String, f64)> = records
        .iter()
        .map(|r| (format!("{}/{}", r.algorithm, r.bound), r.psi))
        .collect();
    if inst.graph.num_nodes() <= config.oracle_max_nodes {
        match brute_force_optimum(&inst.graph, &inst.criterion, DEFAULT_PATH_CAP) {
            Ok(best) => results.push(("oracle".to_string(), best.psi)),
            Err(OracleError::CapExceeded(_)) => {}
            Err(e) => unreachable!("oracle on a generated instance: {e}"),
        }
    }
    let reference = results[0].1;
    let Some((name, psi)) = results
        .iter()
        .find(|(_, psi)| (psi - reference).abs() > AGREEMENT_TOL)
    else {
        return Ok(());
    };
    let detail = format!("{} = {reference} but {name} = {psi}", results[0].0);
    let bundle = config.repro_dir.join(format!("n{}-m{}-seed{seed}", params.num_nodes, params.m));
    fs::create_dir_all(&bundle)?;
    generate(params, seed)?
        .save(bundle.join("instance.json"))
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let info = ReproInfo {
        num_nodes: params.num_nodes,
        m: params.m,
        seed,
        gamma,
        density: params.density,
        capacity: params.capacity,
        results: &results,
        detail: &detail,
    };
    fs::write(
        bundle.join("repro.json"),
        serde_json::to_string_pretty(&info).expect("repro info serializes"),
    )?;
    Err(BenchError::Disagreement {
        num_nodes: params.num_nodes,
        m: params.m,
        seed,
        detail,
        bundle,
    })
}

fn aggregate(records: &[BenchRecord]) -> Vec<BenchRow> {
    let mut cells: BTreeMap<(Algorithm, usize, usize, Bound), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.algorithm, r.num_nodes, r.m, r.bound)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((algorithm, num_nodes, m, bound), rs)| {
            let k = rs.len() as f64;
            let mean = |f: &dyn Fn(&BenchRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / k;
            BenchRow {
                algorithm,
                bound,
                num_nodes,
                m,
                seeds: rs.len(),
                mean_total_secs: mean(&|r| r.total_secs),
                mean_solve_secs: mean(&|r| r.solve_secs),
                mean_heuristic_secs: mean(&|r| r.heuristic_secs),
                mean_labels_created: mean(&|r| r.stats.labels_created as f64),
                mean_labels_expanded: mean(&|r| r.stats.labels_expanded as f64),
            }
        })
        .collect()
}

impl BenchReport {
    pub fn row(&self, algorithm: Algorithm, bound: Bound, num_nodes: usize, m: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.bound == bound && r.num_nodes == num_nodes && r.m == m)
    }

    /// Mean seconds (heuristics included), one line per algorithm and size,
    /// one column per scenario count and bound.
    pub fn table(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = write!(out, "{:<6}{:>7}", "alg", "nodes");
        for &m in &c.scenario_counts {
            for &b in &c.bounds {
                let _ = write!(out, "{:>14}", format!("m={m} {b}"));
            }
        }
        out.push('\n');
        for &a in &c.algorithms {
            for &n in &c.sizes {
                let _ = write!(out, "{:<6}{:>7}", a.to_string(), n);
                for &m in &c.scenario_counts {
                    for &b in &c.bounds {
                        match self.row(a, b, n, m) {
                            Some(r) => {
                                let _ = write!(out, "{:>14.3}", r.mean_total_secs);
                            }
                            None => {
                                let _ = write!(out, "{:>14}", "-");
                            }
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
