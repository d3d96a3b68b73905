//! Seeded random instances: dense random digraphs with integer scenario
//! costs in `[0, 100]`, node 0 as start and the last node as single goal.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)`, one stream per concern:
//!
//! | stream | draws |
//! |--------|-------|
//! | 1 | arcs: one uniform per ordered pair `(u, v)`, `u ≠ v`, row-major; arc iff `< density` |
//! | 2 | costs: `floor(101 u)` for every arc in order, scenarios inner |
//! | 3 | capacity: `v1` p by sorted uniform spacings; `v2` masses `1 - u` per non-empty mask, normalized |
//! | 4 | γ for benchmarks: `0.7 + 0.3 u` |
//!
//! A uniform `u` is `(next_u64 >> 11) * 2^-53`. If the goal is unreachable
//! the arc draw is repeated from where stream 1 left off, up to
//! [`MAX_ATTEMPTS`] times.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::MAX_SCENARIOS;
use crate::graph::StateSpaceGraph;

use super::format::{
    ArcRecord, CapacitySpec, DisutilitySpec, Instance, InstanceError, Metadata, ResolvedInstance,
    FORMAT_VERSION,
};

pub const MAX_ATTEMPTS: usize = 100;
pub const MAX_COST: u64 = 100;
/// The disutility exponent of generated instances (`w(x) = (x / M)^2`).
pub const EXPONENT: f64 = 2.0;

const STREAM_ARCS: u64 = 1;
const STREAM_COSTS: u64 = 2;
const STREAM_CAPACITY: u64 = 3;
const STREAM_GAMMA: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityKind {
    /// `v1(A) = 1 - (Σ_{i∉A} p_i)^2` with random `p`.
    V1,
    /// Plausibility of random positive Möbius masses.
    V2,
}

impl fmt::Display for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapacityKind::V1 => "v1",
            CapacityKind::V2 => "v2",
        })
    }
}

impl FromStr for CapacityKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "v1" => Ok(CapacityKind::V1),
            "v2" => Ok(CapacityKind::V2),
            _ => Err(format!("unknown capacity kind {s:?} (expected v1 or v2)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub num_nodes: usize,
    pub density: f64,
    pub m: usize,
    pub capacity: CapacityKind,
}

impl GeneratorParams {
    pub fn new(num_nodes: usize, density: f64, m: usize, capacity: CapacityKind) -> Self {
        GeneratorParams {
            num_nodes,
            density,
            m,
            capacity,
        }
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error("goal unreachable from the start after {0} attempts")]
    Unreachable(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// γ for a benchmark run on the instance generated from `seed`, in `[0.7, 1)`.
pub fn draw_gamma(seed: u64) -> f64 {
    0.7 + 0.3 * uniform(&mut stream(seed, STREAM_GAMMA))
}

/// Uniform point of the simplex by sorted uniform spacings.
pub fn sample_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..m - 1).map(|_| uniform(rng)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut p = Vec::with_capacity(m);
    let mut prev = 0.0;
    for c in cuts {
        p.push(c - prev);
        prev = c;
    }
    p.push(1.0 - prev);
    p
}

/// Raw generated data in flat arrays.
struct Raw {
    tails: Vec<usize>,
    heads: Vec<usize>,
    costs: Vec<f64>,
    capacity: CapacitySpec,
}

fn goal_reachable(n: usize, tails: &[usize], heads: &[usize]) -> bool {
    let mut offsets = vec![0usize; n + 1];
    for &t in tails {
        offsets[t + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut adj = vec![0usize; tails.len()];
    for (&t, &h) in tails.iter().zip(heads) {
        adj[fill[t]] = h;
        fill[t] += 1;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if u == n - 1 {
            return true;
        }
        for &h in &adj[offsets[u]..offsets[u + 1]] {
            if !seen[h] {
                seen[h] = true;
                queue.push_back(h);
            }
        }
    }
    false
}

fn generate_raw(params: &GeneratorParams, seed: u64) -> Result<Raw, GenerateError> {
    let GeneratorParams {
        num_nodes: n,
        density,
        m,
        capacity,
    } = *params;
    if n < 2 {
        return Err(GenerateError::Params(format!("num_nodes = {n}, need at least 2")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::Params(format!("density {density} outside (0, 1]")));
    }
    if m == 0 || m > MAX_SCENARIOS {
        return Err(GenerateError::Params(format!("m = {m} outside 1..={MAX_SCENARIOS}")));
    }

    let mut rng = stream(seed, STREAM_ARCS);
    let expected = (density * (n * (n - 1)) as f64) as usize;
    let mut tails = Vec::with_capacity(expected + expected / 16);
    let mut heads = Vec::with_capacity(expected + expected / 16);
    let mut attempt = 0;
    loop {
        if attempt == MAX_ATTEMPTS {
            return Err(GenerateError::Unreachable(MAX_ATTEMPTS));
        }
        attempt += 1;
        tails.clear();
        heads.clear();
        for u in 0..n {
            for v in 0..n {
                if u != v && uniform(&mut rng) < density {
                    tails.push(u);
                    heads.push(v);
                }
            }
        }
        if goal_reachable(n, &tails, &heads) {
            break;
        }
    }

    let mut rng = stream(seed, STREAM_COSTS);
    let costs: Vec<f64> = (0..tails.len() * m)
        .map(|_| (uniform(&mut rng) * (MAX_COST + 1) as f64).floor())
        .collect();

    let mut rng = stream(seed, STREAM_CAPACITY);
    let capacity = match capacity {
        CapacityKind::V1 => CapacitySpec::V1 {
            p: sample_simplex(&mut rng, m),
        },
        CapacityKind::V2 => {
            let raw: Vec<f64> = (1..1u32 << m).map(|_| 1.0 - uniform(&mut rng)).collect();
            let total: f64 = raw.iter().sum();
            CapacitySpec::Mobius {
                masses: raw.iter().enumerate().map(|(k, x)| (k as u32 + 1, x / total)).collect::<BTreeMap<_, _>>(),
            }
        }
    };
    Ok(Raw {
        tails,
        heads,
        costs,
        capacity,
    })
}

/// Generates an instance file. Deterministic in `(params, seed)`.
pub fn generate(params: &GeneratorParams, seed: u64) -> Result<Instance, GenerateError> {
    let raw = generate_raw(params, seed)?;
    let m = params.m;
    let arcs = raw
        .tails
        .iter()
        .zip(&raw.heads)
        .zip(raw.costs.chunks_exact(m))
        .map(|((&from, &to), c)| ArcRecord {
            from,
            to,
            costs: c.to_vec(),
        })
        .collect();
    Ok(Instance {
        version: FORMAT_VERSION,
        m,
        num_nodes: params.num_nodes,
        start: 0,
        goals: vec![params.num_nodes - 1],
        arcs,
        capacity: raw.capacity,
        disutility: DisutilitySpec::power(EXPONENT),
        metadata: Metadata {
            seed: Some(seed),
            generator: Some(*params),
            name: None,
        },
    })
}

/// Same instance as [`generate`], built straight into solver structures
/// without the per-arc records of the file form.
pub fn generate_resolved(params: &GeneratorParams, seed: u64) -> Result<ResolvedInstance, GenerateError> {
    let raw = generate_raw(params, seed)?;
    let m = params.m;
    let n = params.num_nodes;
    let graph = StateSpaceGraph::new(
        m,
        n,
        0,
        vec![n - 1],
        raw.tails
            .iter()
            .zip(&raw.heads)
            .zip(raw.costs.chunks_exact(m))
            .map(|((&from, &to), c)| (from, to, c)),
    )
    .map_err(InstanceError::from)?;
    drop(raw.costs);
    let capacity = super::format::resolve_capacity(&raw.capacity, m)?;
    capacity.require_concave().map_err(InstanceError::from)?;
    let disutility = crate::choquet::Disutility::power(EXPONENT, super::format::default_scale(&graph))
        .map_err(|e| InstanceError::Disutility(e.to_string()))?;
    Ok(ResolvedInstance {
        graph,
        criterion: crate::choquet::Criterion::new(capacity, disutility),
    })
}
