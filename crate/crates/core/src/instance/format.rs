//! JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "m": 2,
//!   "num_nodes": 3,
//!   "start": 0,
//!   "goals": [2],
//!   "arcs": [{"from": 0, "to": 1, "costs": [3.0, 5.0]}, ...],
//!   "capacity": {"kind": "table", "values": {"0": 0.0, "1": 0.4, ...}},
//!   "disutility": {"kind": "power", "exponent": 2.0},
//!   "metadata": {"seed": 7}
//! }
//! ```
//!
//! Capacities are `table` (every subset keyed by its decimal bitmask),
//! `v1` (`{"p": [...]}`) or `mobius` (`{"masses": {"mask": mass, ...}}`,
//! absent masks meaning zero). A power disutility without `scale` uses
//! `M = (num_nodes - 1) * max arc cost`, which bounds every simple path.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{Capacity, CapacityError, MobiusCapacity, ProbabilityVector, MAX_SCENARIOS};
use crate::choquet::{Criterion, Disutility};
use crate::graph::{GraphError, StateSpaceGraph};

use super::generate::GeneratorParams;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRecord {
    pub from: usize,
    pub to: usize,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CapacitySpec {
    Table {
        #[serde(with = "mask_keys")]
        values: BTreeMap<u32, f64>,
    },
    V1 {
        p: Vec<f64>,
    },
    Mobius {
        #[serde(with = "mask_keys")]
        masses: BTreeMap<u32, f64>,
    },
}

/// Maps keyed by decimal bitmask strings, kept in numeric order.
mod mask_keys {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<u32, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, f64>, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| match k.parse::<u32>() {
                Ok(mask) if mask.to_string() == k => Ok((mask, v)),
                _ => Err(D::Error::custom(format!("subset key {k:?} is not a decimal bitmask"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisutilityKind {
    Power,
    /// `w(t) = t`; the exponent must be 1 and no scale is allowed.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisutilitySpec {
    pub kind: DisutilityKind,
    pub exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl DisutilitySpec {
    pub fn power(exponent: f64) -> Self {
        DisutilitySpec {
            kind: DisutilityKind::Power,
            exponent,
            scale: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub version: u32,
    pub m: usize,
    pub num_nodes: usize,
    pub start: usize,
    pub goals: Vec<usize>,
    pub arcs: Vec<ArcRecord>,
    pub capacity: CapacitySpec,
    pub disutility: DisutilitySpec,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("version: unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("m: scenario count {0} outside 1..={MAX_SCENARIOS}")]
    ScenarioCount(usize),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("capacity.{field}: key {key} is not a subset of {m} scenarios")]
    CapacityKey { field: &'static str, key: u32, m: usize },
    #[error("capacity.values: missing subset {0}")]
    CapacityMissing(u32),
    #[error("capacity.p: length {got}, expected m = {expected}")]
    CapacityLength { expected: usize, got: usize },
    #[error("capacity: {0}")]
    Capacity(#[from] CapacityError),
    #[error("disutility: {0}")]
    Disutility(String),
}

/// A validated instance ready for solving.
#[derive(Debug, Clone)]
pub struct ResolvedInstance {
    pub graph: StateSpaceGraph,
    pub criterion: Criterion,
}

impl ResolvedInstance {
    pub fn capacity(&self) -> &Capacity {
        self.criterion.capacity()
    }

    pub fn disutility(&self) -> Disutility {
        self.criterion.disutility()
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.resolve()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instances serialize");
        s.push('\n');
        s
    }

    /// Reads and validates an instance file.
    pub fn load(path: impl AsRef<FsPath>) -> Result<Self, InstanceError> {
        Instance::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<(), InstanceError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Builds the graph, capacity and disutility, checking every field.
    pub fn resolve(&self) -> Result<ResolvedInstance, InstanceError> {
        if self.version != FORMAT_VERSION {
            return Err(InstanceError::Version(self.version));
        }
        if self.m == 0 || self.m > MAX_SCENARIOS {
            return Err(InstanceError::ScenarioCount(self.m));
        }
        let graph = StateSpaceGraph::new(
            self.m,
            self.num_nodes,
            self.start,
            self.goals.clone(),
            self.arcs.iter().map(|a| (a.from, a.to, a.costs.as_slice())),
        )?;
        let capacity = resolve_capacity(&self.capacity, self.m)?;
        capacity.require_concave()?;
        let disutility = resolve_disutility(&self.disutility, &graph)?;
        Ok(ResolvedInstance {
            graph,
            criterion: Criterion::new(capacity, disutility),
        })
    }
}

/// `M = (num_nodes - 1) * max arc cost`, or 1 when every cost is zero.
pub fn default_scale(graph: &StateSpaceGraph) -> f64 {
    let bound = (graph.num_nodes().saturating_sub(1)) as f64 * graph.max_arc_cost();
    if bound > 0.0 {
        bound
    } else {
        1.0
    }
}

fn resolve_disutility(spec: &DisutilitySpec, graph: &StateSpaceGraph) -> Result<Disutility, InstanceError> {
    match spec.kind {
        DisutilityKind::Identity => {
            if spec.exponent != 1.0 || spec.scale.is_some() {
                return Err(InstanceError::Disutility(
                    "identity takes exponent 1 and no scale".into(),
                ));
            }
            Ok(Disutility::Identity)
        }
        DisutilityKind::Power => {
            let scale = spec.scale.unwrap_or_else(|| default_scale(graph));
            Disutility::power(spec.exponent, scale).map_err(|e| InstanceError::Disutility(e.to_string()))
        }
    }
}

fn check_keys(field: &'static str, table: &BTreeMap<u32, f64>, m: usize) -> Result<(), InstanceError> {
    let size = 1u64 << m;
    match table.keys().find(|&&k| k as u64 >= size) {
        Some(&key) => Err(InstanceError::CapacityKey { field, key, m }),
        None => Ok(()),
    }
}

pub fn resolve_capacity(spec: &CapacitySpec, m: usize) -> Result<Capacity, InstanceError> {
    match spec {
        CapacitySpec::Table { values } => {
            check_keys("values", values, m)?;
            let table = (0..1u32 << m)
                .map(|mask| values.get(&mask).copied().ok_or(InstanceError::CapacityMissing(mask)))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(Capacity::new(m, table)?)
        }
        CapacitySpec::V1 { p } => {
            if p.len() != m {
                return Err(InstanceError::CapacityLength {
                    expected: m,
                    got: p.len(),
                });
            }
            Ok(Capacity::v1(&ProbabilityVector::new(p.clone())?))
        }
        CapacitySpec::Mobius { masses } => {
            check_keys("masses", masses, m)?;
            let mut dense = vec![0.0; 1 << m];
            for (&k, &v) in masses {
                dense[k as usize] = v;
            }
            Ok(Capacity::from_mobius(&MobiusCapacity::new(m, dense)?))
        }
    }
}

impl CapacitySpec {
    /// Explicit table of a capacity.
    pub fn table(v: &Capacity) -> Self {
        CapacitySpec::Table {
            values: v.values().iter().enumerate().map(|(k, &x)| (k as u32, x)).collect(),
        }
    }
}
