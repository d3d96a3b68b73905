use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use choquet_path::heuristics::{apply_gamma, HeuristicTables};
use choquet_path::instance::{
    generate, run_bench_with, Algorithm, BenchConfig, Bound, CapacityKind, GammaSpec, GeneratorParams, Instance,
};
use choquet_path::oracle::{brute_force_optimum, OracleError, DEFAULT_PATH_CAP};
use choquet_path::search_mo::solve_mo;
use choquet_path::search_rank::solve_rank_traced;
use choquet_path::solution::Problem;

#[derive(Parser)]
#[command(name = "choquet-path", version, about = "CED-optimal paths under scenario uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    Mo,
    Rank,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Shapley,
    Maxent,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    V1,
    V2,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Mo => Algorithm::Mo,
            AlgArg::Rank => Algorithm::Rank,
        }
    }
}

impl From<BoundArg> for Bound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Shapley => Bound::Shapley,
            BoundArg::Maxent => Bound::MaxEntropy,
        }
    }
}

impl From<KindArg> for CapacityKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::V1 => CapacityKind::V1,
            KindArg::V2 => CapacityKind::V2,
        }
    }
}

fn parse_gamma(s: &str) -> Result<GammaSpec, String> {
    if s == "random" {
        return Ok(GammaSpec::Random);
    }
    let g: f64 = s.parse().map_err(|_| format!("expected a number in (0, 1] or \"random\", got {s:?}"))?;
    if g > 0.0 && g <= 1.0 {
        Ok(GammaSpec::Fixed(g))
    } else {
        Err(format!("gamma {g} outside (0, 1]"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 0.45)]
        density: f64,
        #[arg(long, short, default_value_t = 3)]
        m: usize,
        #[arg(long, value_enum, default_value_t = KindArg::V1)]
        capacity: KindArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Solve one instance and print a JSON report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgArg::Mo)]
        algorithm: AlgArg,
        #[arg(long, value_enum, default_value_t = BoundArg::Maxent)]
        bound: BoundArg,
        /// Heuristic scaling in (0, 1], or "random" to draw it in [0.7, 1).
        #[arg(long, default_value = "1", value_parser = parse_gamma)]
        gamma: GammaSpec,
        /// Seed for "random" gamma (defaults to the instance seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check both solvers and both bounds against the exhaustive oracle.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// Maximum number of solution paths the oracle may enumerate.
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        cap: usize,
    },
    /// Run the timing benchmark and print a summary table.
    Bench {
        /// Write the machine-readable report here.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1000, 2000, 3000])]
        sizes: Vec<usize>,
        #[arg(long, short, value_delimiter = ',', default_values_t = vec![3, 5, 10])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        #[arg(long, value_delimiter = ',', value_enum, default_values_t = vec![AlgArg::Mo, AlgArg::Rank])]
        algorithms: Vec<AlgArg>,
        #[arg(long, value_delimiter = ',', value_enum, default_values_t = vec![BoundArg::Maxent, BoundArg::Shapley])]
        bounds: Vec<BoundArg>,
        #[arg(long, default_value = "random", value_parser = parse_gamma)]
        gamma: GammaSpec,
        #[arg(long, default_value_t = 0.45)]
        density: f64,
        #[arg(long, value_enum, default_value_t = KindArg::V1)]
        capacity: KindArg,
        /// Directory for repro bundles on disagreement.
        #[arg(long, default_value = "bench-repro")]
        repro_dir: PathBuf,
        #[arg(long, short)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            nodes,
            density,
            m,
            capacity,
            seed,
            out,
        } => {
            let inst = generate(&GeneratorParams::new(nodes, density, m, capacity.into()), seed)?;
            match out {
                Some(path) => inst.save(&path).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{}", inst.to_json()),
            }
        }
        Command::Solve {
            instance,
            algorithm,
            bound,
            gamma,
            seed,
        } => {
            let inst = Instance::load(&instance).with_context(|| format!("loading {}", instance.display()))?;
            let r = inst.resolve()?;
            let bound = Bound::from(bound);
            let gamma = gamma.value(seed.or(inst.metadata.seed).unwrap_or(0));
            let p = bound.probability(&r)?;
            let t0 = Instant::now();
            let tables = apply_gamma(&HeuristicTables::exact(&r.graph, &p)?, gamma)?;
            let heuristic_secs = t0.elapsed().as_secs_f64();
            let problem = Problem::new(&r.graph, &r.criterion, &p, &tables);
            let t1 = Instant::now();
            let (sol, enumerated) = match Algorithm::from(algorithm) {
                Algorithm::Mo => (solve_mo(&problem)?, None),
                Algorithm::Rank => {
                    let t = solve_rank_traced(&problem)?;
                    let n = t.emitted.len();
                    (t.solution, Some(n))
                }
            };
            let solve_secs = t1.elapsed().as_secs_f64();
            let mut report = json!({
                "algorithm": Algorithm::from(algorithm),
                "bound": bound,
                "gamma": gamma,
                "p": p.as_slice(),
                "psi": sol.psi,
                "cost": sol.cost.as_slice(),
                "path": sol.path.nodes(),
                "arcs": sol.path.arcs(),
                "stats": sol.stats,
                "incumbents": sol.incumbents,
                "heuristic_secs": heuristic_secs,
                "solve_secs": solve_secs,
            });
            if let Some(n) = enumerated {
                report["paths_enumerated"] = json!(n);
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Verify { instance, cap } => {
            let inst = Instance::load(&instance).with_context(|| format!("loading {}", instance.display()))?;
            let r = inst.resolve()?;
            let mut results = Vec::new();
            for bound in [Bound::MaxEntropy, Bound::Shapley] {
                let p = bound.probability(&r)?;
                let tables = HeuristicTables::exact(&r.graph, &p)?;
                let problem = Problem::new(&r.graph, &r.criterion, &p, &tables);
                results.push((format!("mo/{bound}"), solve_mo(&problem)?.psi));
                results.push((format!("rank/{bound}"), solve_rank_traced(&problem)?.solution.psi));
            }
            let oracle = match brute_force_optimum(&r.graph, &r.criterion, cap) {
                Ok(s) => Some(s),
                Err(OracleError::CapExceeded(c)) => {
                    eprintln!("oracle skipped: more than {c} solution paths");
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let reference = oracle.as_ref().map_or(results[0].1, |s| s.psi);
            let agree = results.iter().all(|(_, psi)| (psi - reference).abs() <= 1e-9);
            let report = json!({
                "oracle_psi": oracle.as_ref().map(|s| s.psi),
                "oracle_path": oracle.as_ref().map(|s| s.path.nodes().to_vec()),
                "solvers": results.iter().map(|(k, v)| json!({"run": k, "psi": v})).collect::<Vec<_>>(),
                "agree": agree,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !agree {
                bail!("solvers disagree with the reference psi {reference}");
            }
        }
        Command::Bench {
            out,
            sizes,
            m,
            seeds,
            base_seed,
            algorithms,
            bounds,
            gamma,
            density,
            capacity,
            repro_dir,
            quiet,
        } => {
            let config = BenchConfig {
                sizes,
                scenario_counts: m,
                seeds_per_cell: seeds,
                base_seed,
                algorithms: algorithms.into_iter().map(Into::into).collect(),
                bounds: bounds.into_iter().map(Into::into).collect(),
                gamma,
                density,
                capacity: capacity.into(),
                repro_dir,
                ..BenchConfig::default()
            };
            let report = run_bench_with(&config, |r| {
                if !quiet {
                    eprintln!(
                        "n={} m={} seed={} {}/{} psi={:.6e} {:.3}s",
                        r.num_nodes, r.m, r.seed, r.algorithm, r.bound, r.psi, r.total_secs
                    );
                }
            })?;
            print!("{}", report.table());
            std::fs::write(&out, report.to_json()).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}
