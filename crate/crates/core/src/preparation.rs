//! Path-spin state leaving the first beam splitter.
//!
//! A +z polarized particle hits BS1; the transmitted arm ψ₁ carries a spin
//! flipper and the reflected arm ψ₂ a phase shifter, giving
//! `a|↑ₚ↓_z⟩ + b·e^{iδ}|↓ₚ↑_z⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cx, Vec4, NORM_TOL_CONSTRUCT};

/// BS1 amplitudes and PS1 phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparationConfig {
    /// Transmission amplitude.
    pub a: f64,
    /// Reflection amplitude.
    pub b: f64,
    /// Relative phase δ in radians, `[0, 2π)`.
    pub delta: f64,
}

impl PreparationConfig {
    pub fn new(a: f64, b: f64, delta: f64) -> Result<Self> {
        let cfg = Self { a, b, delta };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Uses `b = sqrt(1 - a²)`.
    pub fn from_transmission(a: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Preparation(format!("a = {a} is outside [0, 1]")));
        }
        Self::new(a, (1.0 - a * a).max(0.0).sqrt(), delta)
    }

    pub fn maximally_entangled() -> Self {
        Self {
            a: FRAC_1_SQRT_2,
            b: FRAC_1_SQRT_2,
            delta: PI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, delta } = *self;
        if !(a.is_finite() && b.is_finite() && delta.is_finite()) {
            return Err(Error::NonFinite("preparation config"));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::Preparation(format!(
                "amplitudes must be non-negative (a = {a}, b = {b})"
            )));
        }
        let norm_sqr = a * a + b * b;
        if (norm_sqr - 1.0).abs() > NORM_TOL_CONSTRUCT {
            return Err(Error::Preparation(format!(
                "a² + b² = {norm_sqr}, expected 1"
            )));
        }
        if !(0.0..TAU).contains(&delta) {
            return Err(Error::Preparation(format!(
                "delta = {delta} is outside [0, 2π)"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpinState {
    vec: Vec4,
    provenance: PreparationConfig,
}

impl PathSpinState {
    pub fn vec(&self) -> &Vec4 {
        &self.vec
    }

    pub fn provenance(&self) -> &PreparationConfig {
        &self.provenance
    }
}

pub fn prepare_state(cfg: PreparationConfig) -> Result<PathSpinState> {
    cfg.validate()?;
    let vec = Vec4::normalized([
        Cx::new(0.0, 0.0),
        Cx::new(cfg.a, 0.0),
        Cx::from_polar(cfg.b, cfg.delta),
        Cx::new(0.0, 0.0),
    ])?;
    Ok(PathSpinState {
        vec,
        provenance: cfg,
    })
}

/// `(|↑ₚ↓_z⟩ − |↓ₚ↑_z⟩)/√2`
pub fn maximally_entangled() -> PathSpinState {
    prepare_state(PreparationConfig::maximally_entangled())
        .expect("maximally entangled configuration is valid")
}
