//! Shot-level Monte Carlo of the interferometer with Stern-Gerlach readout.
//!
//! Detector wiring: D₃ and D₄ register the path outcome A = +1 and A = −1;
//! each feeds a Stern-Gerlach device whose primed output is B = +1 and
//! double-primed output is B = −1. A shot therefore lands in one of
//! D₃′, D₃″, D₄′, D₄″ or is lost.
//!
//! Every randomized routine takes a seed and is bit-for-bit reproducible.
//! Parallel work derives per-task seeds from `(seed, index)` with
//! [`derive_seed`], so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{ChshSettings, SettingsAngles, CLASSICAL_BOUND};
use crate::error::{Error, Result};
use crate::lhv::{sample_assignment, LhvModel};
use crate::measurement::{joint_distribution, JointDistribution, PathObservable, SpinObservable};
use crate::preparation::PathSpinState;

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Neutron rest mass, kg (CODATA 2018).
pub const NEUTRON_MASS: f64 = 1.674_927_498_04e-27;

/// Per-traversal beam-splitter absorption and per-event detection
/// efficiency. Losses do not depend on the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub absorption: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            absorption: 0.0,
        }
    }

    /// Figures typical of neutron interferometry: absorption below 0.001
    /// per beam splitter, detector efficiency about 0.999.
    pub fn neutron() -> Self {
        Self {
            efficiency: 0.999,
            absorption: 0.001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("efficiency", self.efficiency), ("absorption", self.absorption)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Detector(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Probability that a particle crosses both beam splitters and is
    /// registered.
    pub fn detection_probability(&self) -> f64 {
        (1.0 - self.absorption).powi(2) * self.efficiency
    }
}

/// Event tallies of one run at a fixed (A, B) setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountRecord {
    /// D₃′: A = +1, B = +1
    pub n3p: u64,
    /// D₃″: A = +1, B = −1
    pub n3pp: u64,
    /// D₄′: A = −1, B = +1
    pub n4p: u64,
    /// D₄″: A = −1, B = −1
    pub n4pp: u64,
    pub lost: u64,
    pub shots: u64,
}

impl CountRecord {
    pub fn detected(&self) -> u64 {
        self.n3p + self.n3pp + self.n4p + self.n4pp
    }

    /// Combined D₃ count (A = +1).
    pub fn n3(&self) -> u64 {
        self.n3p + self.n3pp
    }

    /// Combined D₄ count (A = −1).
    pub fn n4(&self) -> u64 {
        self.n4p + self.n4pp
    }

    fn record(&mut self, cell: usize) {
        match cell {
            0 => self.n3p += 1,
            1 => self.n3pp += 1,
            2 => self.n4p += 1,
            _ => self.n4pp += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatedCorrelation {
    pub value: f64,
    pub std_err: f64,
    pub detected: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub s_hat: f64,
    pub s_err: f64,
}

/// Where outcomes come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Quantum(PathSpinState),
    /// A noncontextual model; its outcomes ignore the physical settings.
    Lhv(LhvModel),
}

/// Seed of sub-task `index` in a run seeded with `master` (SplitMix64
/// mixing).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn survives<R: Rng + ?Sized>(det: &DetectorModel, rng: &mut R) -> bool {
    // BS1 then BS2
    for _ in 0..2 {
        if det.absorption > 0.0 && rng.random::<f64>() < det.absorption {
            return false;
        }
    }
    true
}

fn registers<R: Rng + ?Sized>(det: &DetectorModel, rng: &mut R) -> bool {
    det.efficiency >= 1.0 || rng.random::<f64>() < det.efficiency
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidParameter {
            field: "shots",
            reason: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// Simulates `shots` particles whose joint outcome follows `dist`.
pub fn simulate_from_distribution<R: Rng + ?Sized>(
    dist: &JointDistribution,
    shots: u64,
    det: &DetectorModel,
    rng: &mut R,
) -> Result<CountRecord> {
    det.validate()?;
    check_shots(shots)?;
    let cells = dist.cells();
    let cumulative = [cells[0], cells[0] + cells[1], cells[0] + cells[1] + cells[2]];
    let mut record = CountRecord {
        shots,
        ..CountRecord::default()
    };
    for _ in 0..shots {
        if !survives(det, rng) {
            record.lost += 1;
            continue;
        }
        let u: f64 = rng.random();
        let cell = cumulative.iter().position(|&c| u < c).unwrap_or(3);
        if registers(det, rng) {
            record.record(cell);
        } else {
            record.lost += 1;
        }
    }
    Ok(record)
}

/// Shot-level run of the quantum prediction for one (A, B) pair.
pub fn simulate_counts(
    state: &PathSpinState,
    a: &PathObservable,
    b: &SpinObservable,
    shots: u64,
    det: &DetectorModel,
    seed: u64,
) -> Result<CountRecord> {
    let dist = joint_distribution(state, a, b)?;
    simulate_from_distribution(&dist, shots, det, &mut rng_from_seed(seed))
}

/// Shot-level run of a noncontextual model measured on `(A_i, B_j)`: each
/// particle carries one sampled assignment.
pub fn simulate_lhv_counts<R: Rng + ?Sized>(
    model: &LhvModel,
    i: usize,
    j: usize,
    shots: u64,
    det: &DetectorModel,
    rng: &mut R,
) -> Result<CountRecord> {
    det.validate()?;
    check_shots(shots)?;
    let mut record = CountRecord {
        shots,
        ..CountRecord::default()
    };
    for _ in 0..shots {
        if !survives(det, rng) {
            record.lost += 1;
            continue;
        }
        let x = sample_assignment(model, rng);
        let cell = 2 * usize::from(x.path_value(i) < 0) + usize::from(x.spin_value(j) < 0);
        if registers(det, rng) {
            record.record(cell);
        } else {
            record.lost += 1;
        }
    }
    Ok(record)
}

/// Per-event estimator `(N₃′ − N₃″ − N₄′ + N₄″) / detected`.
pub fn estimate_correlation(c: &CountRecord) -> Result<EstimatedCorrelation> {
    let detected = c.detected();
    if detected == 0 {
        return Err(Error::NoDetections);
    }
    let signed = c.n3p as f64 - c.n3pp as f64 - c.n4p as f64 + c.n4pp as f64;
    let value = signed / detected as f64;
    Ok(EstimatedCorrelation {
        value,
        std_err: ((1.0 - value * value).max(0.0) / detected as f64).sqrt(),
        detected,
    })
}

pub fn estimate_chsh(
    c11: &CountRecord,
    c12: &CountRecord,
    c21: &CountRecord,
    c22: &CountRecord,
) -> Result<ChshEstimate> {
    let [e11, e12, e21, e22] = [c11, c12, c21, c22].map(estimate_correlation);
    let (e11, e12, e21, e22) = (e11?, e12?, e21?, e22?);
    Ok(ChshEstimate {
        s_hat: e11.value + e12.value + e21.value - e22.value,
        s_err: [e11, e12, e21, e22]
            .iter()
            .map(|e| e.std_err * e.std_err)
            .sum::<f64>()
            .sqrt(),
    })
}

/// Runs all four setting pairs (order 11, 12, 21, 22) drawing from one
/// generator in sequence.
pub fn simulate_chsh_with<R: Rng + ?Sized>(
    source: &Source,
    settings: &ChshSettings,
    shots: u64,
    det: &DetectorModel,
    rng: &mut R,
) -> Result<[CountRecord; 4]> {
    let mut records = [CountRecord::default(); 4];
    for (k, (a, b)) in settings.pairs().into_iter().enumerate() {
        records[k] = match source {
            Source::Quantum(state) => {
                simulate_from_distribution(&joint_distribution(state, a, b)?, shots, det, rng)?
            }
            Source::Lhv(model) => simulate_lhv_counts(model, k / 2 + 1, k % 2 + 1, shots, det, rng)?,
        };
    }
    Ok(records)
}

pub fn simulate_chsh(
    source: &Source,
    settings: &ChshSettings,
    shots: u64,
    det: &DetectorModel,
    seed: u64,
) -> Result<[CountRecord; 4]> {
    simulate_chsh_with(source, settings, shots, det, &mut rng_from_seed(seed))
}

/// Finite-precision study parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprecisionSpec {
    /// Std. dev. (radians) of the Gaussian jitter applied to each θ and
    /// each spin polar angle, fixed within a trial.
    pub epsilon: f64,
    pub shots_per_setting: u64,
    pub trials: u64,
    /// A trial violates iff `ŝ − sigma_threshold·σ̂ > 2`.
    #[serde(default = "default_sigma_threshold")]
    pub sigma_threshold: f64,
    #[serde(default)]
    pub detector: DetectorModel,
}

fn default_sigma_threshold() -> f64 {
    5.0
}

impl ImprecisionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidParameter {
                field,
                reason: reason.into(),
            })
        };
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad("epsilon", "must be finite and non-negative");
        }
        if self.shots_per_setting == 0 {
            return bad("shots_per_setting", "must be at least 1");
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1");
        }
        if !(self.sigma_threshold.is_finite() && self.sigma_threshold >= 0.0) {
            return bad("sigma_threshold", "must be finite and non-negative");
        }
        self.detector.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub s_hat: f64,
    pub s_err: f64,
    pub violates: bool,
}

/// Settings actually realized in one imprecise trial.
pub fn perturb_angles<R: Rng + ?Sized>(
    nominal: &SettingsAngles,
    epsilon: f64,
    rng: &mut R,
) -> Result<SettingsAngles> {
    let noise = Normal::new(0.0, epsilon).map_err(|e| Error::InvalidParameter {
        field: "epsilon",
        reason: e.to_string(),
    })?;
    let mut realized = *nominal;
    for angle in [
        &mut realized.theta1,
        &mut realized.theta2,
        &mut realized.b1_polar,
        &mut realized.b2_polar,
    ] {
        *angle += noise.sample(rng);
    }
    Ok(realized)
}

/// Runs `spec.trials` independent imprecise experiments.
///
/// Trial `t` uses a generator seeded with `derive_seed(seed, t)`: first the
/// four angle perturbations are drawn, then the four count records.
pub fn imprecision_trials(
    source: &Source,
    nominal: &SettingsAngles,
    spec: &ImprecisionSpec,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    spec.validate()?;
    (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t));
            let realized = perturb_angles(nominal, spec.epsilon, &mut rng)?;
            let settings = realized.to_settings()?;
            let [c11, c12, c21, c22] = simulate_chsh_with(
                source,
                &settings,
                spec.shots_per_setting,
                &spec.detector,
                &mut rng,
            )?;
            let est = estimate_chsh(&c11, &c12, &c21, &c22)?;
            Ok(TrialOutcome {
                s_hat: est.s_hat,
                s_err: est.s_err,
                violates: est.s_hat - spec.sigma_threshold * est.s_err > CLASSICAL_BOUND,
            })
        })
        .collect()
}

/// Fraction of imprecise trials that violate the bound by more than
/// `sigma_threshold` standard errors.
pub fn violation_fraction(
    source: &Source,
    nominal: &SettingsAngles,
    spec: &ImprecisionSpec,
    seed: u64,
) -> Result<f64> {
    let outcomes = imprecision_trials(source, nominal, spec, seed)?;
    let violations = outcomes.iter().filter(|o| o.violates).count();
    Ok(violations as f64 / outcomes.len() as f64)
}

/// Free Gaussian wave packet travelling a fixed distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    /// Initial width, m.
    pub sigma0: f64,
    /// Mean velocity, m/s.
    pub velocity: f64,
    /// Flight distance, m.
    pub distance: f64,
    /// Particle mass, kg.
    pub mass: f64,
}

impl WavePacketSpec {
    /// Thermal-neutron interferometer figures: 0.1 mm packet at 2000 m/s
    /// over 1 m.
    pub fn neutron_interferometer() -> Self {
        Self {
            sigma0: 1e-4,
            velocity: 2e3,
            distance: 1.0,
            mass: NEUTRON_MASS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("sigma0", self.sigma0),
            ("velocity", self.velocity),
            ("mass", self.mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be strictly positive, got {v}"),
                });
            }
        }
        if !(self.distance.is_finite() && self.distance >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "distance",
                reason: format!("must be non-negative, got {}", self.distance),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpread {
    pub final_width: f64,
    pub delta: f64,
}

/// `σ(t) = σ₀·sqrt(1 + (ħt / 2mσ₀²)²)` with `t = distance / velocity`.
pub fn wavepacket_spread(spec: &WavePacketSpec) -> Result<WavePacketSpread> {
    spec.validate()?;
    let t = spec.distance / spec.velocity;
    let ratio = HBAR * t / (2.0 * spec.mass * spec.sigma0 * spec.sigma0);
    let final_width = spec.sigma0 * ratio.hypot(1.0);
    Ok(WavePacketSpread {
        final_width,
        // sqrt(1 + r²) − 1 without cancellation
        delta: spec.sigma0 * ratio * ratio / (ratio.hypot(1.0) + 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{chsh_value, TSIRELSON_BOUND};
    use crate::lhv::LhvAssignment;
    use crate::measurement::{path_observable, spin_observable};
    use crate::preparation::{maximally_entangled, prepare_state, PreparationConfig};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn product_state() -> PathSpinState {
        prepare_state(PreparationConfig::new(1.0, 0.0, 0.0).unwrap()).unwrap()
    }

    fn z_pair() -> (PathObservable, SpinObservable) {
        (
            path_observable(FRAC_PI_2, 0.0).unwrap(),
            spin_observable([0.0, 0.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn ideal_singlet_counts_are_anticorrelated() {
        let (a, b) = z_pair();
        let shots = 1_000_000;
        let c = simulate_counts(&maximally_entangled(), &a, &b, shots, &DetectorModel::ideal(), 1)
            .unwrap();
        assert_eq!(c.n3p, 0);
        assert_eq!(c.n4pp, 0);
        assert_eq!(c.lost, 0);
        let five_sigma = 5.0 * (0.25 / shots as f64).sqrt();
        for n in [c.n3pp, c.n4p] {
            assert!((n as f64 / shots as f64 - 0.5).abs() < five_sigma);
        }
        let e = estimate_correlation(&c).unwrap();
        assert_eq!(e.value, -1.0);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn product_state_counts_are_definite() {
        let (a, b) = z_pair();
        let c = simulate_counts(&product_state(), &a, &b, 1000, &DetectorModel::ideal(), 5).unwrap();
        assert_eq!(
            c,
            CountRecord {
                n3pp: 1000,
                shots: 1000,
                ..CountRecord::default()
            }
        );
    }

    #[test]
    fn lossy_detection_rate() {
        let (a, b) = z_pair();
        let shots = 1_000_000u64;
        let det = DetectorModel::neutron();
        let c = simulate_counts(&maximally_entangled(), &a, &b, shots, &det, 11).unwrap();
        let p = 0.999f64.powi(2) * 0.999;
        assert!((det.detection_probability() - p).abs() < 1e-15);
        let mean = shots as f64 * p;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((c.detected() as f64 - mean).abs() < 5.0 * sigma, "{c:?}");
        assert_eq!(c.detected() + c.lost, shots);
    }

    #[test]
    fn estimator_examples() {
        let c = CountRecord {
            n3pp: 500_000,
            n4p: 500_000,
            shots: 1_000_000,
            ..CountRecord::default()
        };
        assert_eq!(estimate_correlation(&c).unwrap().value, -1.0);
        let c = CountRecord {
            n3p: 250_000,
            n3pp: 250_000,
            n4p: 250_000,
            n4pp: 250_000,
            lost: 0,
            shots: 1_000_000,
        };
        let e = estimate_correlation(&c).unwrap();
        assert_eq!(e.value, 0.0);
        assert!((e.std_err - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn estimator_rejects_empty_records() {
        let c = CountRecord {
            lost: 10,
            shots: 10,
            ..CountRecord::default()
        };
        assert_eq!(estimate_correlation(&c), Err(Error::NoDetections));
        assert!(estimate_chsh(&c, &c, &c, &c).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let (a, b) = z_pair();
        let bad = DetectorModel {
            efficiency: 1.2,
            absorption: 0.0,
        };
        assert!(simulate_counts(&maximally_entangled(), &a, &b, 10, &bad, 0).is_err());
        assert!(simulate_counts(&maximally_entangled(), &a, &b, 0, &DetectorModel::ideal(), 0).is_err());
        let spec = ImprecisionSpec {
            epsilon: -0.1,
            shots_per_setting: 10,
            trials: 1,
            sigma_threshold: 5.0,
            detector: DetectorModel::ideal(),
        };
        assert!(spec.validate().is_err());
    }

    /// Count records holding the exact expected tallies, rounded.
    fn synthetic_record(d: &JointDistribution, shots: u64) -> CountRecord {
        let [p, q, r, s] = d.cells().map(|x| (x * shots as f64).round() as u64);
        CountRecord {
            n3p: p,
            n3pp: q,
            n4p: r,
            n4pp: s,
            lost: 0,
            shots: p + q + r + s,
        }
    }

    #[test]
    fn synthetic_records_reproduce_exact_chsh() {
        let state = maximally_entangled();
        let settings = SettingsAngles::optimal().to_settings().unwrap();
        let shots = 1_000_000;
        let records = settings
            .pairs()
            .map(|(a, b)| synthetic_record(&joint_distribution(&state, a, b).unwrap(), shots));
        // Rounding moves each cell by at most half a count, so each
        // correlation by at most 2/detected.
        for (record, (a, b)) in records.iter().zip(settings.pairs()) {
            let e = estimate_correlation(record).unwrap();
            let exact = crate::measurement::correlation(&state, a, b).unwrap();
            assert!((e.value - exact).abs() <= 2.0 / e.detected as f64);
        }
        let est = estimate_chsh(&records[0], &records[1], &records[2], &records[3]).unwrap();
        let exact = chsh_value(&state, &settings).unwrap().s;
        assert!((est.s_hat - exact).abs() <= 8.0 / shots as f64);
        assert!((exact - TSIRELSON_BOUND).abs() < 1e-12);
    }

    #[test]
    fn counts_are_reproducible() {
        let state = maximally_entangled();
        let a = path_observable(FRAC_PI_4, 0.0).unwrap();
        let b = spin_observable([0.6, 0.0, 0.8]).unwrap();
        let det = DetectorModel::neutron();
        let run = |seed| simulate_counts(&state, &a, &b, 10_000, &det, seed).unwrap();
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn lhv_pipeline_respects_bound() {
        let settings = SettingsAngles::optimal().to_settings().unwrap();
        let models = [
            LhvModel::uniform(),
            LhvModel::point_mass(LhvAssignment::from_index(0)),
            LhvModel::point_mass(LhvAssignment::from_index(6)),
        ];
        for (k, model) in models.into_iter().enumerate() {
            let [c11, c12, c21, c22] = simulate_chsh(
                &Source::Lhv(model),
                &settings,
                100_000,
                &DetectorModel::neutron(),
                k as u64,
            )
            .unwrap();
            let est = estimate_chsh(&c11, &c12, &c21, &c22).unwrap();
            assert!(est.s_hat.abs() <= 2.0 + 5.0 * est.s_err, "{est:?}");
        }
    }

    #[test]
    fn derive_seed_separates_streams() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|t| derive_seed(42, t)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn zero_epsilon_leaves_angles_untouched() {
        let nominal = SettingsAngles::optimal();
        let mut rng = rng_from_seed(0);
        assert_eq!(perturb_angles(&nominal, 0.0, &mut rng).unwrap(), nominal);
        let jittered = perturb_angles(&nominal, 0.1, &mut rng).unwrap();
        assert_ne!(jittered, nominal);
        assert_eq!(jittered.phi1, nominal.phi1);
        assert_eq!(jittered.b1_azimuth, nominal.b1_azimuth);
    }

    #[test]
    fn wavepacket_examples() {
        let spec = WavePacketSpec::neutron_interferometer();
        let w = wavepacket_spread(&spec).unwrap();
        assert!(w.delta <= 1e-6);
        assert!(w.delta > 0.0);
        assert!((w.final_width - spec.sigma0 - w.delta).abs() < 1e-18);

        let still = wavepacket_spread(&WavePacketSpec {
            distance: 0.0,
            ..spec
        })
        .unwrap();
        assert_eq!(still.final_width, spec.sigma0);
        assert_eq!(still.delta, 0.0);

        let wide = wavepacket_spread(&WavePacketSpec {
            sigma0: 2.0 * spec.sigma0,
            ..spec
        })
        .unwrap();
        assert!(wide.delta / (2.0 * spec.sigma0) < w.delta / spec.sigma0);
    }

    #[test]
    fn wavepacket_matches_direct_formula_in_dispersive_regime() {
        // Large spreading: the cancellation-free delta must agree with the
        // naive difference.
        let spec = WavePacketSpec {
            sigma0: 1e-9,
            velocity: 100.0,
            distance: 1.0,
            mass: NEUTRON_MASS,
        };
        let w = wavepacket_spread(&spec).unwrap();
        let t = spec.distance / spec.velocity;
        let naive = spec.sigma0 * (1.0 + (HBAR * t / (2.0 * spec.mass * spec.sigma0.powi(2))).powi(2)).sqrt();
        assert!((w.final_width - naive).abs() / naive < 1e-12);
        assert!((w.delta - (naive - spec.sigma0)).abs() / naive < 1e-12);
    }

    #[test]
    fn wavepacket_rejects_non_positive() {
        let spec = WavePacketSpec::neutron_interferometer();
        assert!(wavepacket_spread(&WavePacketSpec { sigma0: 0.0, ..spec }).is_err());
        assert!(wavepacket_spread(&WavePacketSpec { velocity: -1.0, ..spec }).is_err());
        assert!(wavepacket_spread(&WavePacketSpec { mass: 0.0, ..spec }).is_err());
        assert!(wavepacket_spread(&WavePacketSpec { distance: -1.0, ..spec }).is_err());
    }
}
