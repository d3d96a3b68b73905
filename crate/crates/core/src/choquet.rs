//! Choquet integral and Choquet expected disutility (CED).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{full_mask, Capacity, ProbabilityVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChoquetError {
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("component {index} = {value} is negative or not finite")]
    Component { index: usize, value: f64 },
    #[error("cost component {index} = {value} exceeds the disutility scale {scale}")]
    AboveScale { index: usize, value: f64, scale: f64 },
    #[error("invalid disutility: {0}")]
    Disutility(String),
}

/// Per-scenario cost of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(x: Vec<f64>) -> Result<Self, ChoquetError> {
        check_components(&x)?;
        Ok(CostVector(x))
    }

    pub fn zeros(m: usize) -> Self {
        CostVector(vec![0.0; m])
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

    pub fn add_assign(&mut self, other: &[f64]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += b;
        }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for CostVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_components(x: &[f64]) -> Result<(), ChoquetError> {
    match x.iter().position(|v| !v.is_finite() || *v < 0.0) {
        Some(index) => Err(ChoquetError::Component {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// Disutility on costs: `w(0) = 0`, increasing, convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Disutility {
    /// `w(t) = (t / scale)^exponent`, so `w(scale) = 1`.
    Power { exponent: f64, scale: f64 },
    Identity,
}

impl Disutility {
    pub fn power(exponent: f64, scale: f64) -> Result<Self, ChoquetError> {
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(ChoquetError::Disutility(format!(
                "exponent {exponent} must be finite and >= 1"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ChoquetError::Disutility(format!(
                "scale {scale} must be finite and > 0"
            )));
        }
        Ok(Disutility::Power { exponent, scale })
    }

    /// Evaluates `w(t)`. Costs beyond the scale are evaluated by the same
    /// formula (the search compares optimistic bounds that may overshoot it).
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Disutility::Identity => t,
            Disutility::Power { exponent, scale } => {
                let r = t / scale;
                if exponent.fract() == 0.0 && exponent <= 16.0 {
                    r.powi(exponent as i32)
                } else {
                    r.powf(exponent)
                }
            }
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match *self {
            Disutility::Power { scale, .. } => Some(scale),
            Disutility::Identity => None,
        }
    }
}

/// Sorts scenario indices by `(value, index)` into a stack buffer.
#[inline]
fn sorted_indices(z: &[f64], buf: &mut [usize; 16]) {
    let m = z.len();
    for (i, slot) in buf.iter_mut().enumerate().take(m) {
        *slot = i;
    }
    // insertion sort; m ≤ 16
    for i in 1..m {
        let cur = buf[i];
        let mut j = i;
        while j > 0 && (z[buf[j - 1]] > z[cur] || (z[buf[j - 1]] == z[cur] && buf[j - 1] > cur)) {
            buf[j] = buf[j - 1];
            j -= 1;
        }
        buf[j] = cur;
    }
}

fn check_dim(v: &Capacity, z: &[f64]) -> Result<(), ChoquetError> {
    if z.len() != v.scenario_count() {
        return Err(ChoquetError::Dimension {
            expected: v.scenario_count(),
            got: z.len(),
        });
    }
    check_components(z)
}

/// `C_v(z) = Σ_i [v(X_(i)) − v(X_(i+1))] z_(i)`, with tied components merged
/// into one level so that `X_(i)` is exactly `{j : z_j ≥ z_(i)}`.
#[inline]
pub(crate) fn choquet_unchecked(v: &Capacity, z: &[f64]) -> f64 {
    let m = z.len();
    let mut order = [0usize; 16];
    sorted_indices(z, &mut order);
    let mut upper = full_mask(m);
    let mut sum = 0.0;
    let mut k = 0;
    while k < m {
        let level = z[order[k]];
        let mut next = upper;
        while k < m && z[order[k]] == level {
            next &= !(1 << order[k]);
            k += 1;
        }
        sum += (v.value_mask(upper) - v.value_mask(next)) * level;
        upper = next;
    }
    sum
}

/// Choquet integral of a non-negative vector with respect to `v`.
pub fn choquet_integral(v: &Capacity, z: &[f64]) -> Result<f64, ChoquetError> {
    check_dim(v, z)?;
    Ok(choquet_unchecked(v, z))
}

/// The increment form `Σ_i [z_(i) − z_(i−1)] v(X_(i))`, `z_(0) = 0`.
/// Equal to [`choquet_integral`] up to rounding.
pub fn choquet_integral_increments(v: &Capacity, z: &[f64]) -> Result<f64, ChoquetError> {
    check_dim(v, z)?;
    let m = z.len();
    let mut order = [0usize; 16];
    sorted_indices(z, &mut order);
    let mut upper = full_mask(m);
    let mut prev = 0.0;
    let mut sum = 0.0;
    let mut k = 0;
    while k < m {
        let level = z[order[k]];
        sum += (level - prev) * v.value_mask(upper);
        while k < m && z[order[k]] == level {
            upper &= !(1 << order[k]);
            k += 1;
        }
        prev = level;
    }
    Ok(sum)
}

/// The CED criterion `ψ(x) = C_v(w(x_1), …, w(x_m))` bound to a capacity and
/// a disutility. Evaluation skips validation; see [`ced`] for the checked form.
#[derive(Debug, Clone)]
pub struct Criterion {
    capacity: Capacity,
    disutility: Disutility,
}

impl Criterion {
    pub fn new(capacity: Capacity, disutility: Disutility) -> Self {
        Criterion {
            capacity,
            disutility,
        }
    }

    pub fn capacity(&self) -> &Capacity {
        &self.capacity
    }

    pub fn disutility(&self) -> Disutility {
        self.disutility
    }

    pub fn scenario_count(&self) -> usize {
        self.capacity.scenario_count()
    }

    #[inline]
    pub fn psi(&self, x: &[f64]) -> f64 {
        let mut buf = [0.0f64; 16];
        let z = &mut buf[..x.len()];
        for (zi, xi) in z.iter_mut().zip(x) {
            *zi = self.disutility.eval(*xi);
        }
        choquet_unchecked(&self.capacity, z)
    }

    #[inline]
    pub fn w(&self, t: f64) -> f64 {
        self.disutility.eval(t)
    }
}

/// Choquet expected disutility of a cost vector.
pub fn ced(v: &Capacity, w: &Disutility, x: &CostVector) -> Result<f64, ChoquetError> {
    check_dim(v, x.as_slice())?;
    if let Some(scale) = w.scale() {
        if let Some(index) = x.as_slice().iter().position(|&t| t > scale) {
            return Err(ChoquetError::AboveScale {
                index,
                value: x[index],
                scale,
            });
        }
    }
    let z: Vec<f64> = x.as_slice().iter().map(|&t| w.eval(t)).collect();
    Ok(choquet_unchecked(v, &z))
}

/// `c_p(x) = Σ p_i x_i`.
pub fn scalarize(p: &ProbabilityVector, x: &[f64]) -> Result<f64, ChoquetError> {
    if p.len() != x.len() {
        return Err(ChoquetError::Dimension {
            expected: p.len(),
            got: x.len(),
        });
    }
    Ok(dot(p.as_slice(), x))
}

#[inline]
pub(crate) fn dot(p: &[f64], x: &[f64]) -> f64 {
    p.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBounds {
    /// `Σ p_i w(x_i)`
    pub strong: f64,
    /// `w(Σ p_i x_i)`
    pub weak: f64,
}

/// Linear lower bounds on `ψ(x)`, valid for `p ∈ core(v̄)` (and, for the
/// weak one, convex `w`): `ψ(x) ≥ strong ≥ weak`.
pub fn linear_lower_bound(
    p: &ProbabilityVector,
    w: &Disutility,
    x: &CostVector,
) -> Result<LowerBounds, ChoquetError> {
    let mean = scalarize(p, x.as_slice())?;
    let strong = p
        .as_slice()
        .iter()
        .zip(x.as_slice())
        .map(|(pi, xi)| pi * w.eval(*xi))
        .sum();
    Ok(LowerBounds {
        strong,
        weak: w.eval(mean),
    })
}
