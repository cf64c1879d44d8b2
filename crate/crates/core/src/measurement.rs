//! Path and spin observables and their joint statistics.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    expectation, projectors_of, sigma_x, sigma_y, sigma_z, tensor, Cx, Herm, Herm2, Vec2,
};
use crate::preparation::PathSpinState;

/// Probabilities within this much below zero are rounding noise.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-9;

/// Dichotomic "which output channel" observable `P(ψ₃) − P(ψ₄)` of the
/// BS2 + PS stage.
///
/// BS2 + PS maps the arms to
///
/// ```text
/// ψ₃ = e^{iφ}(sin θ ψ₁ + cos θ ψ₂)
/// ψ₄ =        cos θ ψ₁ − sin θ ψ₂
/// ```
///
/// so `φ` is a global phase on ψ₃ and never reaches the observable. It is
/// kept on the type to record the full BS2 + PS parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathObservable {
    theta: f64,
    phi: f64,
    matrix: Herm2,
}

impl PathObservable {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn matrix(&self) -> &Herm2 {
        &self.matrix
    }

    /// Output channel states `(ψ₃, ψ₄)` in the arm basis.
    pub fn output_channels(&self) -> (Vec2, Vec2) {
        output_channels(self.theta, self.phi)
    }
}

fn output_channels(theta: f64, phi: f64) -> (Vec2, Vec2) {
    let (s, c) = theta.sin_cos();
    let phase = Cx::from_polar(1.0, phi);
    let psi3 = Vec2::new([phase * s, phase * c]).expect("finite angles");
    let psi4 = Vec2::from_real([c, -s]).expect("finite angles");
    (psi3, psi4)
}

/// Angles are reduced mod 2π. Non-finite angles are rejected.
pub fn path_observable(theta: f64, phi: f64) -> Result<PathObservable> {
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite("path observable angles"));
    }
    let theta = theta.rem_euclid(TAU);
    let phi = phi.rem_euclid(TAU);
    let (psi3, psi4) = output_channels(theta, phi);
    let matrix = Herm::new(psi3.projector() - psi4.projector())?;
    Ok(PathObservable { theta, phi, matrix })
}

/// Spin component `n·σ` measured by a Stern-Gerlach device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    n: [f64; 3],
    matrix: Herm2,
}

impl SpinObservable {
    pub fn direction(&self) -> [f64; 3] {
        self.n
    }

    pub fn matrix(&self) -> &Herm2 {
        &self.matrix
    }
}

/// `n` must be a unit vector to within 1e-9; it is renormalized before use.
pub fn spin_observable(n: [f64; 3]) -> Result<SpinObservable> {
    if !n.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("spin direction"));
    }
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitDirection { norm });
    }
    let n = n.map(|x| x / norm);
    let m = sigma_x().matrix().scale(Cx::new(n[0], 0.0))
        + sigma_y().matrix().scale(Cx::new(n[1], 0.0))
        + sigma_z().matrix().scale(Cx::new(n[2], 0.0));
    Ok(SpinObservable {
        n,
        matrix: Herm::new(m)?,
    })
}

/// Bloch direction from polar angle (from +z) and azimuth (from +x).
pub fn bloch_direction(polar: f64, azimuth: f64) -> [f64; 3] {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

pub fn spin_observable_at(polar: f64, azimuth: f64) -> Result<SpinObservable> {
    if !(polar.is_finite() && azimuth.is_finite()) {
        return Err(Error::NonFinite("spin angles"));
    }
    spin_observable(bloch_direction(polar, azimuth))
}

/// Probabilities of the four joint outcomes of (A, B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
}

impl JointDistribution {
    /// Cells in the order (+,+), (+,−), (−,+), (−,−).
    pub fn cells(&self) -> [f64; 4] {
        [self.p_pp, self.p_pm, self.p_mp, self.p_mm]
    }

    pub fn correlation(&self) -> f64 {
        self.p_pp - self.p_pm - self.p_mp + self.p_mm
    }

    pub fn marginal_a_plus(&self) -> f64 {
        self.p_pp + self.p_pm
    }

    pub fn marginal_b_plus(&self) -> f64 {
        self.p_pp + self.p_mp
    }
}

fn clamp_probability(p: f64) -> Result<f64> {
    if p < -NEGATIVE_PROBABILITY_TOL {
        return Err(Error::NegativeProbability { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `p(α, β) = ⟨Ψ| P_A^α ⊗ P_B^β |Ψ⟩`
pub fn joint_distribution(
    state: &PathSpinState,
    a: &PathObservable,
    b: &SpinObservable,
) -> Result<JointDistribution> {
    let (a_plus, a_minus) = projectors_of(a.matrix())?;
    let (b_plus, b_minus) = projectors_of(b.matrix())?;
    let p = |pa: &Herm2, pb: &Herm2| -> Result<f64> {
        clamp_probability(expectation(state.vec(), &tensor(pa, pb))?)
    };
    Ok(JointDistribution {
        p_pp: p(&a_plus, &b_plus)?,
        p_pm: p(&a_plus, &b_minus)?,
        p_mp: p(&a_minus, &b_plus)?,
        p_mm: p(&a_minus, &b_minus)?,
    })
}

/// `⟨Ψ| A ⊗ B |Ψ⟩`
pub fn correlation(state: &PathSpinState, a: &PathObservable, b: &SpinObservable) -> Result<f64> {
    expectation(state.vec(), &tensor(a.matrix(), b.matrix()))
}
