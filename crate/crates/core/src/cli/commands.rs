use super::config::RunConfig;
use super::report::{Report, Row, Value};
use super::{CliError, SourceKind, SweepKind};
use crate::chsh::{chsh_value, optimize_settings, ChshResult};
use crate::experiment::{
    estimate_chsh, estimate_correlation, imprecision_trials, simulate_chsh, wavepacket_spread,
    CountRecord, ImprecisionSpec, Source,
};
use crate::lhv::lhv_chsh;
use crate::preparation::{prepare_state, PathSpinState, PreparationConfig};

fn state_of(cfg: &RunConfig) -> Result<PathSpinState, CliError> {
    prepare_state(cfg.preparation).map_err(|e| CliError::config("preparation", e.to_string()))
}

fn source_of(cfg: &RunConfig, kind: SourceKind) -> Result<Source, CliError> {
    Ok(match kind {
        SourceKind::Qm => Source::Quantum(state_of(cfg)?),
        SourceKind::Lhv => Source::Lhv(cfg.lhv_model()),
    })
}

fn correlation_fields(r: &ChshResult) -> Row {
    vec![
        ("e11", r.e11.into()),
        ("e12", r.e12.into()),
        ("e21", r.e21.into()),
        ("e22", r.e22.into()),
        ("s", r.s.into()),
        ("violated", r.violated.into()),
    ]
}

pub fn cmd_chsh(cfg: &RunConfig) -> Result<Report, CliError> {
    let result = chsh_value(&state_of(cfg)?, &cfg.settings.to_settings()?)?;
    Ok(Report::new("chsh", cfg, correlation_fields(&result)))
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Report, CliError> {
    let opt = optimize_settings(&state_of(cfg)?, &cfg.optimizer)?;
    let a = &opt.angles;
    let mut fields: Row = vec![
        ("theta1", a.theta1.into()),
        ("theta2", a.theta2.into()),
        ("b1_polar", a.b1_polar.into()),
        ("b1_azimuth", a.b1_azimuth.into()),
        ("b2_polar", a.b2_polar.into()),
        ("b2_azimuth", a.b2_azimuth.into()),
    ];
    fields.extend(correlation_fields(&opt.result));
    fields.push(("s_max", opt.s_max.into()));
    Ok(Report::new("optimize", cfg, fields))
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub optimize: bool,
    pub source: SourceKind,
}

impl SweepSpec {
    fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.steps < 2 {
            return Err(CliError::config("steps", format!("must be at least 2, got {}", self.steps)));
        }
        if !(self.from.is_finite() && self.to.is_finite()) || self.from >= self.to {
            return Err(CliError::config(
                "from/to",
                format!("range [{}, {}] is empty or inverted", self.from, self.to),
            ));
        }
        let span = self.to - self.from;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|k| if k == self.steps - 1 { self.to } else { self.from + span * k as f64 / last })
            .collect())
    }
}

/// Rows `(value, s, error)` for `a` and `theta1`, `(value, fraction, error)`
/// for `epsilon`. Exact rows report zero error; the epsilon sweep reports
/// the binomial standard error of the fraction.
pub fn cmd_sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<Report, CliError> {
    let points = spec.points()?;
    let mut rows = Vec::with_capacity(points.len());
    match spec.kind {
        SweepKind::A => {
            if !(0.0..=1.0).contains(&spec.from) || !(0.0..=1.0).contains(&spec.to) {
                return Err(CliError::config("from/to", "a must lie in [0, 1]".into()));
            }
            for a in points {
                let prep = PreparationConfig::from_transmission(a, cfg.preparation.delta)?;
                let state = prepare_state(prep)?;
                let s = if spec.optimize {
                    optimize_settings(&state, &cfg.optimizer)?.s_max
                } else {
                    chsh_value(&state, &cfg.settings.to_settings()?)?.s
                };
                rows.push(vec![("a", a.into()), ("s", s.into()), ("error", 0.0.into())]);
            }
        }
        SweepKind::Theta1 => {
            let state = state_of(cfg)?;
            for theta1 in points {
                let mut angles = cfg.settings;
                angles.theta1 = theta1;
                let s = chsh_value(&state, &angles.to_settings()?)?.s;
                rows.push(vec![
                    ("theta1", theta1.into()),
                    ("s", s.into()),
                    ("error", 0.0.into()),
                ]);
            }
        }
        SweepKind::Epsilon => {
            if spec.from < 0.0 {
                return Err(CliError::config("from", "epsilon must be non-negative".into()));
            }
            let seed = cfg.require_seed()?;
            let source = source_of(cfg, spec.source)?;
            // Every point reuses the master seed (common random numbers).
            for epsilon in points {
                let outcomes =
                    imprecision_trials(&source, &cfg.settings, &imprecision_spec(cfg, epsilon), seed)?;
                let fraction =
                    outcomes.iter().filter(|o| o.violates).count() as f64 / outcomes.len() as f64;
                let error = (fraction * (1.0 - fraction) / outcomes.len() as f64).sqrt();
                rows.push(vec![
                    ("epsilon", epsilon.into()),
                    ("fraction", fraction.into()),
                    ("error", error.into()),
                ]);
            }
        }
    }
    Ok(Report::table("sweep", cfg, rows))
}

const PAIR_KEYS: [[&str; 8]; 4] = [
    ["n3p_11", "n3pp_11", "n4p_11", "n4pp_11", "lost_11", "shots_11", "e11", "err11"],
    ["n3p_12", "n3pp_12", "n4p_12", "n4pp_12", "lost_12", "shots_12", "e12", "err12"],
    ["n3p_21", "n3pp_21", "n4p_21", "n4pp_21", "lost_21", "shots_21", "e21", "err21"],
    ["n3p_22", "n3pp_22", "n4p_22", "n4pp_22", "lost_22", "shots_22", "e22", "err22"],
];

fn count_fields(records: &[CountRecord; 4]) -> Result<Row, CliError> {
    let mut fields = Row::new();
    for (keys, c) in PAIR_KEYS.iter().zip(records) {
        let e = estimate_correlation(c)?;
        let values: [Value; 8] = [
            c.n3p.into(),
            c.n3pp.into(),
            c.n4p.into(),
            c.n4pp.into(),
            c.lost.into(),
            c.shots.into(),
            e.value.into(),
            e.std_err.into(),
        ];
        fields.extend(keys.iter().copied().zip(values));
    }
    let est = estimate_chsh(&records[0], &records[1], &records[2], &records[3])?;
    fields.push(("s_hat", est.s_hat.into()));
    fields.push(("s_err", est.s_err.into()));
    Ok(fields)
}

pub fn cmd_simulate(cfg: &RunConfig, kind: SourceKind) -> Result<Report, CliError> {
    let seed = cfg.require_seed()?;
    let source = source_of(cfg, kind)?;
    let records = simulate_chsh(&source, &cfg.settings.to_settings()?, cfg.shots, &cfg.detector, seed)?;
    let mut fields: Row = vec![(
        "source",
        match kind {
            SourceKind::Qm => "qm",
            SourceKind::Lhv => "lhv",
        }
        .into(),
    )];
    fields.extend(count_fields(&records)?);
    Ok(Report::new("simulate", cfg, fields))
}

pub fn cmd_lhv(cfg: &RunConfig) -> Result<Report, CliError> {
    let model = cfg.lhv_model();
    let e = |i, j| model.correlation(i, j);
    let s = lhv_chsh(&model);
    let mut fields: Row = vec![
        ("e11", e(1, 1).into()),
        ("e12", e(1, 2).into()),
        ("e21", e(2, 1).into()),
        ("e22", e(2, 2).into()),
        ("s", s.into()),
        ("violated", (s.abs() > crate::chsh::CLASSICAL_BOUND).into()),
    ];
    if let Some(seed) = cfg.seed {
        let records = simulate_chsh(
            &Source::Lhv(model),
            &cfg.settings.to_settings()?,
            cfg.shots,
            &cfg.detector,
            seed,
        )?;
        let est = estimate_chsh(&records[0], &records[1], &records[2], &records[3])?;
        fields.push(("s_hat", est.s_hat.into()));
        fields.push(("s_err", est.s_err.into()));
    }
    Ok(Report::new("lhv", cfg, fields))
}

fn imprecision_spec(cfg: &RunConfig, epsilon: f64) -> ImprecisionSpec {
    ImprecisionSpec {
        epsilon,
        shots_per_setting: cfg.shots,
        trials: cfg.trials,
        sigma_threshold: cfg.sigma_threshold,
        detector: cfg.detector,
    }
}

pub fn cmd_imprecision(cfg: &RunConfig, kind: SourceKind) -> Result<Report, CliError> {
    let seed = cfg.require_seed()?;
    let source = source_of(cfg, kind)?;
    let outcomes = imprecision_trials(&source, &cfg.settings, &imprecision_spec(cfg, cfg.epsilon), seed)?;
    let trials = outcomes.len() as f64;
    let violations = outcomes.iter().filter(|o| o.violates).count() as u64;
    let mean = |f: fn(&crate::experiment::TrialOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / trials;
    Ok(Report::new(
        "imprecision",
        cfg,
        vec![
            ("epsilon", cfg.epsilon.into()),
            ("trials", (outcomes.len() as u64).into()),
            ("violations", violations.into()),
            ("fraction", (violations as f64 / trials).into()),
            ("mean_s_hat", mean(|o| o.s_hat).into()),
            ("mean_s_err", mean(|o| o.s_err).into()),
        ],
    ))
}

pub fn cmd_wavepacket(cfg: &RunConfig) -> Result<Report, CliError> {
    let w = &cfg.wavepacket;
    let spread = wavepacket_spread(w)?;
    Ok(Report::new(
        "wavepacket",
        cfg,
        vec![
            ("sigma0", w.sigma0.into()),
            ("velocity", w.velocity.into()),
            ("distance", w.distance.into()),
            ("mass", w.mass.into()),
            ("time_of_flight", (w.distance / w.velocity).into()),
            ("final_width", spread.final_width.into()),
            ("delta", spread.delta.into()),
        ],
    ))
}
