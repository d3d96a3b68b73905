//! Browser demo. Every operation takes plain numbers and returns a JSON
//! string, so the page needs no bindings beyond `wasm-bindgen`.
//!
//! The `*_json` functions are ordinary Rust and are tested natively; the
//! `#[wasm_bindgen]` wrappers only turn errors into JS exceptions.

use choquet_path::capacity::Capacity;
use choquet_path::choquet::{Criterion, Disutility};
use choquet_path::heuristics::HeuristicTables;
use choquet_path::instance::{generate_resolved, CapacityKind, GeneratorParams};
use choquet_path::search_mo::solve_mo;
use choquet_path::search_rank::solve_rank_traced;
use choquet_path::solution::Problem;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest graph the demo will generate; the page runs on the main thread.
pub const MAX_DEMO_NODES: usize = 200;
pub const MAX_GRID: usize = 200;

fn capacity(m: usize, values: &[f64]) -> Result<Capacity, String> {
    if values.len() != 1 << m {
        return Err(format!("expected {} capacity values, got {}", 1 << m, values.len()));
    }
    let v = Capacity::new(m, values.to_vec()).map_err(|e| e.to_string())?;
    v.require_concave().map_err(|e| e.to_string())?;
    Ok(v)
}

/// ψ over the square `[0, scale]²` for two scenarios, row-major with
/// `x_2` varying slowest. `values` is the capacity table `[v∅, v{1}, v{2}, v{1,2}]`.
pub fn psi_grid_json(values: &[f64], exponent: f64, scale: f64, resolution: usize) -> Result<String, String> {
    if !(2..=MAX_GRID).contains(&resolution) {
        return Err(format!("resolution must be in 2..={MAX_GRID}"));
    }
    let v = capacity(2, values)?;
    let w = Disutility::power(exponent, scale).map_err(|e| e.to_string())?;
    let p = v.max_entropy().map_err(|e| e.to_string())?;
    let criterion = Criterion::new(v, w);
    let step = scale / (resolution - 1) as f64;
    let mut psi = Vec::with_capacity(resolution * resolution);
    let mut linear = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            let x = [i as f64 * step, j as f64 * step];
            psi.push(criterion.psi(&x));
            linear.push(p[0] * w.eval(x[0]) + p[1] * w.eval(x[1]));
        }
    }
    Ok(json!({
        "resolution": resolution,
        "scale": scale,
        "psi": psi,
        "linear": linear,
        "p": p.as_slice(),
    })
    .to_string())
}

/// Core of the dual capacity for three scenarios: its vertices (one per
/// ordering of the scenarios), the Shapley value and the max-entropy point.
pub fn core_simplex_json(values: &[f64]) -> Result<String, String> {
    let v = capacity(3, values)?;
    let bar = v.dual();
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let mut p = [0.0; 3];
        let mut seen = 0u32;
        for i in order {
            let next = seen | 1 << i;
            p[i] = bar.value_mask(next) - bar.value_mask(seen);
            seen = next;
        }
        if !vertices.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12)) {
            vertices.push(p);
        }
    }
    let shapley = v.shapley().map_err(|e| e.to_string())?;
    let maxent = v.max_entropy().map_err(|e| e.to_string())?;
    Ok(json!({
        "vertices": vertices,
        "shapley": shapley.as_slice(),
        "max_entropy": maxent.as_slice(),
    })
    .to_string())
}

/// Generates a random instance and solves it with both algorithms.
pub fn solve_random_json(nodes: usize, m: usize, seed: u64, plausibility: bool) -> Result<String, String> {
    if nodes > MAX_DEMO_NODES {
        return Err(format!("at most {MAX_DEMO_NODES} nodes in the demo"));
    }
    let kind = if plausibility { CapacityKind::V2 } else { CapacityKind::V1 };
    let r = generate_resolved(&GeneratorParams::new(nodes, 0.45, m, kind), seed).map_err(|e| e.to_string())?;
    let p = r.capacity().max_entropy().map_err(|e| e.to_string())?;
    let tables = HeuristicTables::exact(&r.graph, &p).map_err(|e| e.to_string())?;
    let problem = Problem::new(&r.graph, &r.criterion, &p, &tables);
    let mo = solve_mo(&problem).map_err(|e| e.to_string())?;
    let rank = solve_rank_traced(&problem).map_err(|e| e.to_string())?;
    let summary = |s: &choquet_path::solution::Solution| {
        json!({
            "psi": s.psi,
            "path": s.path.nodes(),
            "cost": s.cost.as_slice(),
            "stats": s.stats,
        })
    };
    Ok(json!({
        "nodes": nodes,
        "arcs": r.graph.num_arcs(),
        "p": p.as_slice(),
        "mo": summary(&mo),
        "rank": summary(&rank.solution),
        "paths_enumerated": rank.emitted.len(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn psi_grid(values: &[f64], exponent: f64, scale: f64, resolution: usize) -> Result<String, JsError> {
    psi_grid_json(values, exponent, scale, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn core_simplex(values: &[f64]) -> Result<String, JsError> {
    core_simplex_json(values).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_random(nodes: usize, m: usize, seed: u64, plausibility: bool) -> Result<String, JsError> {
    solve_random_json(nodes, m, seed, plausibility).map_err(|e| JsError::new(&e))
}
