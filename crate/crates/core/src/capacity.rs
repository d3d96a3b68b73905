//! Capacities (non-additive belief measures) over a finite scenario set.
//!
//! A capacity on `m` scenarios is stored as a dense table of `2^m` values
//! indexed by the bitmask of the event. All the exhaustive checks in this
//! module (monotonicity, submodularity, core membership) walk that table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for every capacity / probability comparison.
pub const TOL: f64 = 1e-9;

/// Largest supported scenario count.
pub const MAX_SCENARIOS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("scenario count {0} outside 1..={MAX_SCENARIOS}")]
    ScenarioCount(usize),
    #[error("table has {got} entries, expected 2^{m} = {}", 1usize << m)]
    TableSize { m: usize, got: usize },
    #[error("value of the empty set is {0}, expected 0")]
    EmptySet(f64),
    #[error("value of the full set is {0}, expected 1")]
    FullSet(f64),
    #[error("value {value} at subset {mask:#b} is not a finite number in [0, 1]")]
    OutOfRange { mask: u32, value: f64 },
    #[error("not monotone: v({sub:#b}) = {sub_value} > v({sup:#b}) = {sup_value}")]
    NotMonotone {
        sub: u32,
        sup: u32,
        sub_value: f64,
        sup_value: f64,
    },
    #[error("capacity is not concave (submodular)")]
    NotConcave,
    #[error("dimension mismatch: capacity has {expected} scenarios, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid probability vector: {0}")]
    Probability(String),
    #[error("invalid Möbius masses: {0}")]
    Mobius(String),
}

/// An event `A ⊆ S`, encoded as a bitmask (bit `i` set iff scenario `i ∈ A`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScenarioSet {
    mask: u32,
    m: u8,
}

impl ScenarioSet {
    pub fn new(mask: u32, m: usize) -> Result<Self, CapacityError> {
        check_m(m)?;
        if (mask as u64) >= (1u64 << m) {
            return Err(CapacityError::OutOfRange {
                mask,
                value: f64::NAN,
            });
        }
        Ok(ScenarioSet { mask, m: m as u8 })
    }

    pub fn empty(m: usize) -> Self {
        ScenarioSet { mask: 0, m: m as u8 }
    }

    pub fn full(m: usize) -> Self {
        ScenarioSet {
            mask: full_mask(m),
            m: m as u8,
        }
    }

    /// Build from 0-based scenario indices.
    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self, CapacityError> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= m {
                return Err(CapacityError::Dimension {
                    expected: m,
                    got: i + 1,
                });
            }
            mask |= 1 << i;
        }
        ScenarioSet::new(mask, m)
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn scenario_count(self) -> usize {
        self.m as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < self.m as usize && self.mask & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn union(self, other: Self) -> Self {
        ScenarioSet {
            mask: self.mask | other.mask,
            m: self.m,
        }
    }

    pub fn intersection(self, other: Self) -> Self {
        ScenarioSet {
            mask: self.mask & other.mask,
            m: self.m,
        }
    }

    pub fn complement(self) -> Self {
        ScenarioSet {
            mask: !self.mask & full_mask(self.m as usize),
            m: self.m,
        }
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (0..self.m as usize).filter(move |i| mask & (1 << i) != 0)
    }
}

pub(crate) fn full_mask(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

fn check_m(m: usize) -> Result<(), CapacityError> {
    if m == 0 || m > MAX_SCENARIOS {
        Err(CapacityError::ScenarioCount(m))
    } else {
        Ok(())
    }
}

/// A probability distribution over the scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self, CapacityError> {
        check_m(p.len())?;
        if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -TOL) {
            return Err(CapacityError::Probability(format!(
                "component {x} is negative or not finite"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(CapacityError::Probability(format!(
                "components sum to {sum}, expected 1"
            )));
        }
        Ok(ProbabilityVector(p))
    }

    pub fn uniform(m: usize) -> Self {
        ProbabilityVector(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `P(A) = Σ_{i∈A} p_i`
    pub fn measure(&self, mask: u32) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p)
            .sum()
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = CapacityError;
    fn try_from(p: Vec<f64>) -> Result<Self, Self::Error> {
        ProbabilityVector::new(p)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Shannon entropy `-Σ p_i ln p_i`, with `0 ln 0 = 0`.
pub fn entropy(p: &ProbabilityVector) -> f64 {
    -p.0.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Non-negative Möbius masses summing to one; the induced set function
/// `v(A) = Σ_{E∩A≠∅} φ(E)` is a plausibility function.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusCapacity {
    m: usize,
    masses: Vec<f64>,
}

impl MobiusCapacity {
    pub fn new(m: usize, masses: Vec<f64>) -> Result<Self, CapacityError> {
        check_m(m)?;
        if masses.len() != 1 << m {
            return Err(CapacityError::TableSize {
                m,
                got: masses.len(),
            });
        }
        if masses[0] != 0.0 {
            return Err(CapacityError::Mobius(format!(
                "mass of the empty set is {}, expected 0",
                masses[0]
            )));
        }
        if let Some((mask, x)) = masses
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(CapacityError::Mobius(format!(
                "mass {x} at subset {mask:#b} is negative or not finite"
            )));
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(CapacityError::Mobius(format!(
                "masses sum to {sum}, expected 1"
            )));
        }
        Ok(MobiusCapacity { m, masses })
    }

    pub fn scenario_count(&self) -> usize {
        self.m
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// A capacity `v : 2^S → [0, 1]` with `v(∅) = 0`, `v(S) = 1`, monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    m: usize,
    values: Vec<f64>,
}

impl Capacity {
    /// Validates normalization and monotonicity (within [`TOL`]).
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self, CapacityError> {
        check_m(m)?;
        let n = 1usize << m;
        if values.len() != n {
            return Err(CapacityError::TableSize {
                m,
                got: values.len(),
            });
        }
        if values[0].abs() > TOL {
            return Err(CapacityError::EmptySet(values[0]));
        }
        if (values[n - 1] - 1.0).abs() > TOL {
            return Err(CapacityError::FullSet(values[n - 1]));
        }
        for (mask, &value) in values.iter().enumerate() {
            if !(-TOL..=1.0 + TOL).contains(&value) {
                return Err(CapacityError::OutOfRange {
                    mask: mask as u32,
                    value,
                });
            }
        }
        for sub in 0..n {
            for i in 0..m {
                let sup = sub | (1 << i);
                if sup != sub && values[sub] > values[sup] + TOL {
                    return Err(CapacityError::NotMonotone {
                        sub: sub as u32,
                        sup: sup as u32,
                        sub_value: values[sub],
                        sup_value: values[sup],
                    });
                }
            }
        }
        Ok(Capacity { m, values })
    }

    /// Additive capacity `v(A) = Σ_{i∈A} p_i`.
    pub fn additive(p: &ProbabilityVector) -> Self {
        let m = p.len();
        let values = (0..1u32 << m).map(|mask| p.measure(mask)).collect();
        Capacity { m, values }
    }

    /// `v(A) = 1` for every non-empty `A`: the Choquet integral becomes the max.
    pub fn vacuous(m: usize) -> Result<Self, CapacityError> {
        check_m(m)?;
        let mut values = vec![1.0; 1 << m];
        values[0] = 0.0;
        Ok(Capacity { m, values })
    }

    /// `v1(A) = 1 − (Σ_{i∉A} p_i)²`, a concave capacity.
    pub fn v1(p: &ProbabilityVector) -> Self {
        let m = p.len();
        let full = full_mask(m);
        let values = (0..=full)
            .map(|mask| {
                let out = p.measure(!mask & full);
                1.0 - out * out
            })
            .collect();
        Capacity { m, values }
    }

    /// Plausibility function of the given Möbius masses.
    pub fn from_mobius(mu: &MobiusCapacity) -> Self {
        let m = mu.m;
        let n = 1usize << m;
        // v(A) = Σ φ − Σ_{E ⊆ S∖A} φ(E), via subset sums (zeta transform).
        let mut below = mu.masses.clone();
        for i in 0..m {
            for mask in 0..n {
                if mask & (1 << i) != 0 {
                    below[mask] += below[mask ^ (1 << i)];
                }
            }
        }
        let full = n - 1;
        let total = below[full];
        let mut values: Vec<f64> = (0..n).map(|a| total - below[full & !a]).collect();
        values[0] = 0.0;
        values[full] = 1.0;
        Capacity { m, values }
    }

    pub fn scenario_count(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, a: ScenarioSet) -> f64 {
        self.values[a.mask as usize]
    }

    #[inline]
    pub fn value_mask(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    /// `v̄(A) = 1 − v(S∖A)`.
    pub fn dual(&self) -> Capacity {
        let full = full_mask(self.m);
        let values = (0..=full)
            .map(|mask| 1.0 - self.values[(!mask & full) as usize])
            .collect();
        Capacity { m: self.m, values }
    }

    /// Submodularity, `v(A∪B) + v(A∩B) ≤ v(A) + v(B)` for all `A, B`.
    ///
    /// Checked through the equivalent local form (decreasing marginal
    /// contributions), which is `O(2^m m²)` instead of `O(4^m)`.
    pub fn is_concave(&self) -> bool {
        self.local_modularity_check(|lhs, rhs| lhs <= rhs + TOL)
    }

    /// Supermodularity, `v(A∪B) + v(A∩B) ≥ v(A) + v(B)` for all `A, B`.
    pub fn is_convex(&self) -> bool {
        self.local_modularity_check(|lhs, rhs| lhs + TOL >= rhs)
    }

    // v(A ∪ {i,j}) + v(A) vs v(A ∪ {i}) + v(A ∪ {j}) for i, j ∉ A.
    fn local_modularity_check(&self, ok: impl Fn(f64, f64) -> bool) -> bool {
        let n = 1usize << self.m;
        let v = &self.values;
        for a in 0..n {
            for i in 0..self.m {
                if a & (1 << i) != 0 {
                    continue;
                }
                for j in (i + 1)..self.m {
                    if a & (1 << j) != 0 {
                        continue;
                    }
                    let ai = a | (1 << i);
                    let aj = a | (1 << j);
                    if !ok(v[ai | aj] + v[a], v[ai] + v[aj]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn require_concave(&self) -> Result<(), CapacityError> {
        if self.is_concave() {
            Ok(())
        } else {
            Err(CapacityError::NotConcave)
        }
    }

    fn check_dim(&self, got: usize) -> Result<(), CapacityError> {
        if got != self.m {
            Err(CapacityError::Dimension {
                expected: self.m,
                got,
            })
        } else {
            Ok(())
        }
    }

    /// Whether `P` lies in `core(v̄) = {P : v̄(A) ≤ P(A) ≤ v(A) ∀A}`.
    ///
    /// Since `v̄(A) ≤ P(A)` is `P(S∖A) ≤ v(S∖A)`, only the upper
    /// constraints need to be walked.
    pub fn core_contains(&self, p: &ProbabilityVector, tol: f64) -> Result<bool, CapacityError> {
        self.require_concave()?;
        self.check_dim(p.len())?;
        let n = 1usize << self.m;
        let mut measure = vec![0.0; n];
        for mask in 1..n {
            let low = mask.trailing_zeros() as usize;
            measure[mask] = measure[mask & (mask - 1)] + p[low];
        }
        let full = n - 1;
        Ok((0..n).all(|a| {
            let upper = self.values[a];
            let lower = 1.0 - self.values[full & !a];
            measure[a] <= upper + tol && measure[a] >= lower - tol
        }))
    }

    /// Shapley values of the dual game `v̄`.
    pub fn shapley(&self) -> Result<ProbabilityVector, CapacityError> {
        self.require_concave()?;
        let m = self.m;
        let dual = self.dual();
        let mut fact = vec![1.0f64; m + 1];
        for k in 1..=m {
            fact[k] = fact[k - 1] * k as f64;
        }
        let weight: Vec<f64> = (0..m)
            .map(|k| fact[m - k - 1] * fact[k] / fact[m])
            .collect();
        let mut phi = vec![0.0; m];
        for (i, phi_i) in phi.iter_mut().enumerate() {
            let bit = 1usize << i;
            for k in 0..(1usize << m) {
                if k & bit != 0 {
                    continue;
                }
                let size = k.count_ones() as usize;
                *phi_i += weight[size] * (dual.values[k | bit] - dual.values[k]);
            }
        }
        ProbabilityVector::new(phi)
    }

    /// The maximum-entropy element of `core(v̄)`, via the greedy procedure
    /// that repeatedly picks the block `E ⊆ S∖B` minimizing the average
    /// marginal `(v(B∪E) − v(B)) / |E|`.
    ///
    /// When several blocks tie, their union is taken.
    pub fn max_entropy(&self) -> Result<ProbabilityVector, CapacityError> {
        const TIE: f64 = 1e-12;
        self.require_concave()?;
        let m = self.m;
        let full = full_mask(m);
        let mut p = vec![0.0; m];
        let mut placed = 0u32;
        while placed != full {
            let free = full & !placed;
            let base = self.values[placed as usize];
            let mut best = f64::INFINITY;
            let mut block = 0u32;
            // enumerate non-empty subsets of `free`
            let mut e = free;
            while e != 0 {
                let ratio = (self.values[(placed | e) as usize] - base) / e.count_ones() as f64;
                if ratio < best - TIE {
                    best = ratio;
                    block = e;
                } else if ratio <= best + TIE {
                    block |= e;
                }
                e = (e - 1) & free;
            }
            let share = (self.values[(placed | block) as usize] - base) / block.count_ones() as f64;
            for (i, pi) in p.iter_mut().enumerate() {
                if block & (1 << i) != 0 {
                    *pi = share;
                }
            }
            placed |= block;
        }
        ProbabilityVector::new(p)
    }
}
