//! Run configuration shared by all subcommands, loadable from JSON and
//! overridable from flags.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::chsh::{OptimizerOptions, SettingsAngles};
use crate::experiment::{DetectorModel, WavePacketSpec};
use crate::lhv::LhvModel;
use crate::preparation::PreparationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preparation: PreparationConfig,
    pub settings: SettingsAngles,
    pub detector: DetectorModel,
    pub shots: u64,
    pub trials: u64,
    pub seed: Option<u64>,
    pub epsilon: f64,
    pub sigma_threshold: f64,
    pub optimizer: OptimizerOptions,
    /// Hidden-variable model weights in canonical assignment order;
    /// uniform when absent.
    pub lhv_weights: Option<LhvModel>,
    pub wavepacket: WavePacketSpec,
    pub output: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preparation: PreparationConfig::maximally_entangled(),
            settings: SettingsAngles::optimal(),
            detector: DetectorModel::ideal(),
            shots: 100_000,
            trials: 100,
            seed: None,
            epsilon: 0.0,
            sigma_threshold: 5.0,
            optimizer: OptimizerOptions::default(),
            lhv_weights: None,
            wavepacket: WavePacketSpec::neutron_interferometer(),
            output: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Reads a config file. A JSON report emitted by this tool is accepted
    /// as well; its embedded `config` object is used.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::config("config", format!("invalid JSON: {e}")))?;
        let value = match value.get("config") {
            Some(inner) if value.get("command").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn lhv_model(&self) -> LhvModel {
        self.lhv_weights.clone().unwrap_or_else(LhvModel::uniform)
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::config("seed", "randomized commands require --seed".into()))
    }
}

/// Parses an angle in radians, or in degrees with a `deg`, `d` or `°`
/// suffix.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let (number, degrees) = ["deg", "°", "d"]
        .iter()
        .find_map(|suffix| text.strip_suffix(suffix).map(|n| (n.trim(), true)))
        .unwrap_or((text, false));
    let value: f64 = number
        .parse()
        .map_err(|_| format!("`{text}` is not an angle (radians, or degrees with a `deg` suffix)"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(if degrees { value.to_radians() } else { value })
}

/// Reduces a phase into `[0, 2π)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Fills in the missing amplitude so that `a² + b² = 1` when only one of
/// them is given.
pub fn resolve_amplitudes(
    current: PreparationConfig,
    a: Option<f64>,
    b: Option<f64>,
) -> Result<(f64, f64), CliError> {
    let complement = |x: f64, field: &'static str| {
        if (0.0..=1.0).contains(&x) {
            Ok((1.0 - x * x).sqrt())
        } else {
            Err(CliError::config(field, format!("{x} is outside [0, 1]")))
        }
    };
    Ok(match (a, b) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, complement(a, "prep_a")?),
        (None, Some(b)) => (complement(b, "prep_b")?, b),
        (None, None) => (current.a, current.b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn angles_in_radians_and_degrees() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!((parse_angle("45deg").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("180°").unwrap() - PI).abs() < 1e-15);
        assert!((parse_angle(" -90 d ").unwrap() + PI / 2.0).abs() < 1e-15);
        assert!(parse_angle("abc").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn phases_wrap_into_range() {
        assert_eq!(wrap_phase(TAU), 0.0);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!(wrap_phase(-1e-300) < TAU);
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = RunConfig {
            seed: Some(9),
            lhv_weights: Some(LhvModel::uniform()),
            ..RunConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&json).unwrap(), cfg);
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg = RunConfig::from_json(r#"{"shots": 10, "seed": 1}"#).unwrap();
        assert_eq!(cfg.shots, 10);
        assert_eq!(cfg.preparation, PreparationConfig::maximally_entangled());
        assert!(RunConfig::from_json(r#"{"shotz": 10}"#).is_err());
    }

    #[test]
    fn amplitude_completion() {
        let base = PreparationConfig::maximally_entangled();
        let (a, b) = resolve_amplitudes(base, Some(0.6), None).unwrap();
        assert_eq!(a, 0.6);
        assert!((b - 0.8).abs() < 1e-15);
        let (a, _) = resolve_amplitudes(base, None, Some(0.8)).unwrap();
        assert!((a - 0.6).abs() < 1e-15);
        assert!(resolve_amplitudes(base, Some(1.5), None).is_err());
    }
}
