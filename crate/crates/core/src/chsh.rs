//! The CHSH combination `⟨A₁B₁⟩ + ⟨A₁B₂⟩ + ⟨A₂B₁⟩ − ⟨A₂B₂⟩` and a
//! deterministic search for the settings that maximize its magnitude.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{
    correlation, path_observable, spin_observable_at, PathObservable, SpinObservable,
};
use crate::preparation::PathSpinState;

/// Noncontextual bound on `|S|`.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum maximum of `|S|`, 2√2.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Angle parameterization of a full set of CHSH settings.
///
/// Path settings are the BS2 + PS angles `(θ, φ)`. Spin settings are Bloch
/// polar angle (from +z) and azimuth (from +x) of the Stern-Gerlach axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsAngles {
    pub theta1: f64,
    pub theta2: f64,
    #[serde(default)]
    pub phi1: f64,
    #[serde(default)]
    pub phi2: f64,
    pub b1_polar: f64,
    #[serde(default)]
    pub b1_azimuth: f64,
    pub b2_polar: f64,
    #[serde(default)]
    pub b2_azimuth: f64,
}

impl SettingsAngles {
    /// Settings reaching 2√2 on the maximally entangled state:
    /// `A₁ = σz`, `A₂ = σx` on the path and `B₁,₂ = ∓(x̂ ± ẑ)/√2`.
    pub fn optimal() -> Self {
        Self {
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_4,
            phi1: 0.0,
            phi2: 0.0,
            b1_polar: 5.0 * FRAC_PI_4,
            b1_azimuth: 0.0,
            b2_polar: 3.0 * FRAC_PI_4,
            b2_azimuth: 0.0,
        }
    }

    pub fn to_settings(&self) -> Result<ChshSettings> {
        Ok(ChshSettings {
            a1: path_observable(self.theta1, self.phi1)?,
            a2: path_observable(self.theta2, self.phi2)?,
            b1: spin_observable_at(self.b1_polar, self.b1_azimuth)?,
            b2: spin_observable_at(self.b2_polar, self.b2_azimuth)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a1: PathObservable,
    pub a2: PathObservable,
    pub b1: SpinObservable,
    pub b2: SpinObservable,
}

impl ChshSettings {
    /// The four (A, B) pairs in the order 11, 12, 21, 22.
    pub fn pairs(&self) -> [(&PathObservable, &SpinObservable); 4] {
        [
            (&self.a1, &self.b1),
            (&self.a1, &self.b2),
            (&self.a2, &self.b1),
            (&self.a2, &self.b2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
    pub s: f64,
    pub violated: bool,
}

impl ChshResult {
    pub fn from_correlations(e11: f64, e12: f64, e21: f64, e22: f64) -> Self {
        let s = chsh_combination(e11, e12, e21, e22);
        Self {
            e11,
            e12,
            e21,
            e22,
            s,
            violated: s.abs() > CLASSICAL_BOUND,
        }
    }
}

pub fn chsh_combination(e11: f64, e12: f64, e21: f64, e22: f64) -> f64 {
    e11 + e12 + e21 - e22
}

/// Exact CHSH value. Correlations are clipped to `[−1, 1]` so that rounding
/// on perfectly (anti)correlated pairs cannot push `|S|` past 2.
pub fn chsh_value(state: &PathSpinState, settings: &ChshSettings) -> Result<ChshResult> {
    let [e11, e12, e21, e22] = settings
        .pairs()
        .map(|(a, b)| correlation(state, a, b).map(|e| e.clamp(-1.0, 1.0)));
    Ok(ChshResult::from_correlations(e11?, e12?, e21?, e22?))
}

/// Which spin directions the optimizer may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinSearch {
    /// Spin axes in the x–z Bloch plane; sufficient for δ = π.
    #[default]
    XzPlane,
    /// Polar and azimuthal angles of both spin axes are searched.
    FullSphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub grid_resolution: usize,
    pub refine_iterations: usize,
    pub refine_shrink: f64,
    #[serde(default)]
    pub spin_search: SpinSearch,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            grid_resolution: 64,
            refine_iterations: 60,
            refine_shrink: 0.5,
            spin_search: SpinSearch::XzPlane,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 {
            return Err(Error::InvalidParameter {
                field: "grid_resolution",
                reason: format!("must be at least 2, got {}", self.grid_resolution),
            });
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidParameter {
                field: "refine_shrink",
                reason: format!("must lie in (0, 1), got {}", self.refine_shrink),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub angles: SettingsAngles,
    pub settings: ChshSettings,
    pub result: ChshResult,
    /// `|S|` at the returned settings.
    pub s_max: f64,
}

/// Number of common spin azimuths tried in [`SpinSearch::FullSphere`] mode.
const AZIMUTH_SAMPLES: usize = 16;

/// Coarse grid over `(θ₁, θ₂, β₁, β₂)` followed by coordinate-descent
/// refinement of `|S|`.
///
/// `θ` is gridded over `[0, π)` (the path observable has period π) and the
/// spin polar angles over `[0, 2π)`. The scan is exhaustive over the grid
/// and fully deterministic; the first maximum in scan order wins.
pub fn optimize_settings(state: &PathSpinState, opts: &OptimizerOptions) -> Result<Optimum> {
    opts.validate()?;
    let res = opts.grid_resolution;
    let theta_step = PI / res as f64;
    let polar_step = TAU / res as f64;

    let azimuths: Vec<f64> = match opts.spin_search {
        SpinSearch::XzPlane => vec![0.0],
        // α and α + π are covered by negating the polar angle.
        SpinSearch::FullSphere => (0..AZIMUTH_SAMPLES)
            .map(|k| k as f64 * PI / AZIMUTH_SAMPLES as f64)
            .collect(),
    };

    let mut start: Option<(f64, SettingsAngles)> = None;
    for &azimuth in &azimuths {
        let (value, [i1, i2, j1, j2]) = grid_scan(state, res, azimuth)?;
        if start.is_none_or(|(best, _)| value > best) {
            start = Some((
                value,
                SettingsAngles {
                    theta1: i1 as f64 * theta_step,
                    theta2: i2 as f64 * theta_step,
                    phi1: 0.0,
                    phi2: 0.0,
                    b1_polar: j1 as f64 * polar_step,
                    b1_azimuth: azimuth,
                    b2_polar: j2 as f64 * polar_step,
                    b2_azimuth: azimuth,
                },
            ));
        }
    }
    let (_, start) = start.expect("at least one azimuth is scanned");

    let angles = refine(state, start, opts, theta_step, polar_step)?;
    let settings = angles.to_settings()?;
    let result = chsh_value(state, &settings)?;
    Ok(Optimum {
        angles,
        settings,
        result,
        s_max: result.s.abs(),
    })
}

/// Exhaustive grid maximum of `|S|` at a fixed common spin azimuth.
///
/// For fixed `(θ₁, θ₂)`, `S = f(β₁) + g(β₂)` with
/// `f = E(θ₁,·) + E(θ₂,·)` and `g = E(θ₁,·) − E(θ₂,·)`, so the inner
/// `(β₁, β₂)` maximum of ±S is attained at independent arg-extrema of `f`
/// and `g`. Returns the best value and its grid indices.
fn grid_scan(state: &PathSpinState, res: usize, azimuth: f64) -> Result<(f64, [usize; 4])> {
    let theta_step = PI / res as f64;
    let polar_step = TAU / res as f64;
    let path_ops = (0..res)
        .map(|i| path_observable(i as f64 * theta_step, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let spin_ops = (0..res)
        .map(|j| spin_observable_at(j as f64 * polar_step, azimuth))
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<f64>> = path_ops
        .par_iter()
        .map(|a| spin_ops.iter().map(|b| correlation(state, a, b)).collect())
        .collect::<Result<Vec<_>>>()?;

    // First index of the maximum (or minimum) in scan order.
    fn arg_extreme(values: impl Iterator<Item = f64>, maximize: bool) -> (usize, f64) {
        let mut best = (0, if maximize { f64::NEG_INFINITY } else { f64::INFINITY });
        for (j, v) in values.enumerate() {
            if (maximize && v > best.1) || (!maximize && v < best.1) {
                best = (j, v);
            }
        }
        best
    }

    let per_theta1: Vec<(f64, [usize; 4])> = (0..res)
        .into_par_iter()
        .map(|i1| {
            let mut best = (f64::NEG_INFINITY, [0; 4]);
            for i2 in 0..res {
                let (e1, e2) = (&table[i1], &table[i2]);
                let f = || e1.iter().zip(e2).map(|(x, y)| x + y);
                let g = || e1.iter().zip(e2).map(|(x, y)| x - y);
                let (j1, fmax) = arg_extreme(f(), true);
                let (j2, gmax) = arg_extreme(g(), true);
                if fmax + gmax > best.0 {
                    best = (fmax + gmax, [i1, i2, j1, j2]);
                }
                let (j1, fmin) = arg_extreme(f(), false);
                let (j2, gmin) = arg_extreme(g(), false);
                if -(fmin + gmin) > best.0 {
                    best = (-(fmin + gmin), [i1, i2, j1, j2]);
                }
            }
            best
        })
        .collect();

    // Sequential reduction in index order keeps the result independent of
    // the thread schedule.
    let mut best = (f64::NEG_INFINITY, [0; 4]);
    for candidate in per_theta1 {
        if candidate.0 > best.0 {
            best = candidate;
        }
    }
    Ok(best)
}

/// Pattern search: along each coordinate walk in steps of `h` while `|S|`
/// improves, then shrink `h`.
fn refine(
    state: &PathSpinState,
    start: SettingsAngles,
    opts: &OptimizerOptions,
    theta_step: f64,
    polar_step: f64,
) -> Result<SettingsAngles> {
    let objective = |angles: &SettingsAngles| -> Result<f64> {
        Ok(chsh_value(state, &angles.to_settings()?)?.s.abs())
    };

    type Coord = fn(&mut SettingsAngles) -> &mut f64;
    let mut coords: Vec<(Coord, f64)> = vec![
        (|s| &mut s.theta1, theta_step),
        (|s| &mut s.theta2, theta_step),
        (|s| &mut s.b1_polar, polar_step),
        (|s| &mut s.b2_polar, polar_step),
    ];
    if opts.spin_search == SpinSearch::FullSphere {
        let azimuth_step = PI / AZIMUTH_SAMPLES as f64;
        coords.push((|s| &mut s.b1_azimuth, azimuth_step));
        coords.push((|s| &mut s.b2_azimuth, azimuth_step));
    }

    // Bounds the walk length at one step size.
    let max_walk = 4 * opts.grid_resolution.max(AZIMUTH_SAMPLES);

    let mut current = start;
    let mut best = objective(&current)?;
    let mut scale = 1.0;
    for _ in 0..opts.refine_iterations {
        for &(coord, base_step) in &coords {
            let h = base_step * scale;
            for direction in [1.0, -1.0] {
                for _ in 0..max_walk {
                    let mut trial = current;
                    *coord(&mut trial) += direction * h;
                    let value = objective(&trial)?;
                    if value > best {
                        best = value;
                        current = trial;
                    } else {
                        break;
                    }
                }
            }
        }
        scale *= opts.refine_shrink;
    }
    Ok(normalize_angles(current))
}

fn normalize_angles(mut angles: SettingsAngles) -> SettingsAngles {
    angles.theta1 = angles.theta1.rem_euclid(TAU);
    angles.theta2 = angles.theta2.rem_euclid(TAU);
    angles.b1_polar = angles.b1_polar.rem_euclid(TAU);
    angles.b2_polar = angles.b2_polar.rem_euclid(TAU);
    angles.b1_azimuth = angles.b1_azimuth.rem_euclid(TAU);
    angles.b2_azimuth = angles.b2_azimuth.rem_euclid(TAU);
    angles
}
