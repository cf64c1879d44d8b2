//! Noncontextual hidden-variable models.
//!
//! A model is a probability distribution over the sixteen deterministic ±1
//! assignments to `(A₁, A₂, B₁, B₂)`. One assignment answers every
//! observable for a given particle, whichever partner it is measured with.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::JointDistribution;

pub const ASSIGNMENT_COUNT: usize = 16;
const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LhvAssignment {
    pub a1: i8,
    pub a2: i8,
    pub b1: i8,
    pub b2: i8,
}

impl LhvAssignment {
    /// Assignment at position `index` of the canonical order: binary
    /// counting on `(a1, a2, b1, b2)`, `a1` most significant, with `+1 ↦ 0`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < ASSIGNMENT_COUNT, "assignment index {index} out of range");
        let bit = |shift: usize| if (index >> shift) & 1 == 0 { 1 } else { -1 };
        Self {
            a1: bit(3),
            a2: bit(2),
            b1: bit(1),
            b2: bit(0),
        }
    }

    pub fn index(&self) -> usize {
        let bit = |v: i8| usize::from(v < 0);
        (bit(self.a1) << 3) | (bit(self.a2) << 2) | (bit(self.b1) << 1) | bit(self.b2)
    }

    /// Value of `A_i` (`i` ∈ {1, 2}).
    pub fn path_value(&self, i: usize) -> i8 {
        match i {
            1 => self.a1,
            2 => self.a2,
            _ => panic!("path setting index must be 1 or 2, got {i}"),
        }
    }

    /// Value of `B_j` (`j` ∈ {1, 2}).
    pub fn spin_value(&self, j: usize) -> i8 {
        match j {
            1 => self.b1,
            2 => self.b2,
            _ => panic!("spin setting index must be 1 or 2, got {j}"),
        }
    }
}

pub fn enumerate_assignments() -> Vec<LhvAssignment> {
    (0..ASSIGNMENT_COUNT).map(LhvAssignment::from_index).collect()
}

/// `a1·b1 + a1·b2 + a2·b1 − a2·b2`, always ±2.
pub fn eq1_value(x: &LhvAssignment) -> i32 {
    let (a1, a2, b1, b2) = (
        i32::from(x.a1),
        i32::from(x.a2),
        i32::from(x.b1),
        i32::from(x.b2),
    );
    a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LhvModel {
    weights: [f64; ASSIGNMENT_COUNT],
}

impl LhvModel {
    /// Weights are indexed by the canonical assignment order and must be
    /// non-negative and sum to one.
    pub fn new(weights: [f64; ASSIGNMENT_COUNT]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidModel(format!(
                "weights must be finite and non-negative, found {w}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidModel(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform() -> Self {
        Self {
            weights: [1.0 / ASSIGNMENT_COUNT as f64; ASSIGNMENT_COUNT],
        }
    }

    pub fn point_mass(x: LhvAssignment) -> Self {
        let mut weights = [0.0; ASSIGNMENT_COUNT];
        weights[x.index()] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64; ASSIGNMENT_COUNT] {
        &self.weights
    }

    /// Convex combination `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidModel(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let mut weights = [0.0; ASSIGNMENT_COUNT];
        for (k, w) in weights.iter_mut().enumerate() {
            *w = lambda * self.weights[k] + (1.0 - lambda) * other.weights[k];
        }
        Self::new(weights)
    }

    fn assignments(&self) -> impl Iterator<Item = (f64, LhvAssignment)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, &w)| (w, LhvAssignment::from_index(k)))
    }

    /// `⟨A_i B_j⟩` under the model.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.assignments()
            .map(|(w, x)| w * f64::from(x.path_value(i) * x.spin_value(j)))
            .sum()
    }

    pub fn joint_distribution(&self, i: usize, j: usize) -> JointDistribution {
        let mut cells = [0.0; 4];
        for (w, x) in self.assignments() {
            let cell = 2 * usize::from(x.path_value(i) < 0) + usize::from(x.spin_value(j) < 0);
            cells[cell] += w;
        }
        JointDistribution {
            p_pp: cells[0],
            p_pm: cells[1],
            p_mp: cells[2],
            p_mm: cells[3],
        }
    }
}

impl TryFrom<Vec<f64>> for LhvModel {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        let weights: [f64; ASSIGNMENT_COUNT] = weights.try_into().map_err(|w: Vec<f64>| {
            Error::InvalidModel(format!("expected {ASSIGNMENT_COUNT} weights, got {}", w.len()))
        })?;
        Self::new(weights)
    }
}

impl From<LhvModel> for Vec<f64> {
    fn from(model: LhvModel) -> Self {
        model.weights.to_vec()
    }
}

/// `Σ w(x)·eq1_value(x)`, evaluated as `2(P₊ − P₋)/(P₊ + P₋)` where `P±` is
/// the weight on assignments scoring ±2. Rounding is monotone, so
/// `|P₊ − P₋| ≤ P₊ + P₋` survives in floating point and the result never
/// leaves `[−2, 2]`.
pub fn lhv_chsh(model: &LhvModel) -> f64 {
    let (plus, minus) = model.assignments().fold((0.0, 0.0), |(p, m), (w, x)| {
        if eq1_value(&x) > 0 {
            (p + w, m)
        } else {
            (p, m + w)
        }
    });
    2.0 * ((plus - minus) / (plus + minus))
}

/// Draws one assignment by inverting the cumulative weights.
pub fn sample_assignment<R: Rng + ?Sized>(model: &LhvModel, rng: &mut R) -> LhvAssignment {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (k, &w) in model.weights.iter().enumerate() {
        if w > 0.0 {
            cumulative += w;
            last_positive = k;
            if u < cumulative {
                return LhvAssignment::from_index(k);
            }
        }
    }
    // Rounding can leave the total a hair under one.
    LhvAssignment::from_index(last_positive)
}
