//! Config files, figure presets and their expansion into sweep runs.
//!
//! Configs are flat TOML. Powers arrive in dBm and gains in dB
//! (`*_db` keys); each such key also has a linear twin so a written config
//! reloads to the identical spec without round-tripping through `log10`.

use std::fmt;
use std::path::Path;

use risnoma_core::harvest::EhParams;
use risnoma_core::params::{db_to_linear, SystemParams};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(String),
    Invalid(String),
    UnknownPreset(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "config io error: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(e) => write!(f, "invalid config: {e}"),
            ConfigError::UnknownPreset(p) => write!(f, "unknown preset: {p}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PtDbm,
    NElements,
    Rho,
    PTh,
    OmegaDb,
    Beta12Db,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PtDbm => "pt_dbm",
            Axis::NElements => "n_elements",
            Axis::Rho => "rho",
            Axis::PTh => "p_th",
            Axis::OmegaDb => "omega_db",
            Axis::Beta12Db => "beta_12_db",
        }
    }

    /// Apply one axis value onto a scenario.
    pub fn apply(self, p: &mut SystemParams, eh: &mut EhParams, value: f64) {
        match self {
            Axis::PtDbm => p.pt_dbm = value,
            Axis::NElements => p.n_elements = value as u32,
            Axis::Rho => p.rho = value,
            Axis::PTh => {
                if let EhParams::NonLinear { p_th, .. } = eh {
                    *p_th = value;
                }
            }
            Axis::OmegaDb => p.omega = db_to_linear(value),
            Axis::Beta12Db => p.beta_12 = db_to_linear(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    OpD1,
    OpD2,
    ErD1,
    ErD2,
    MeanPh,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::OpD1 => "op_d1",
            Metric::OpD2 => "op_d2",
            Metric::ErD1 => "er_d1",
            Metric::ErD2 => "er_d2",
            Metric::MeanPh => "mean_ph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Mc,
}

/// One fully-resolved sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub base: SystemParams,
    pub eh: EhParams,
    pub metrics: Vec<Metric>,
    pub modes: Vec<Mode>,
    pub trials: u64,
    pub seed: u64,
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.is_empty() {
            return Err(ConfigError::Invalid("grid must be nonempty".into()));
        }
        let increasing = self.grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(ConfigError::Invalid("grid must be strictly monotone".into()));
        }
        if self.metrics.is_empty() {
            return Err(ConfigError::Invalid("metrics must be nonempty".into()));
        }
        if self.modes.is_empty() {
            return Err(ConfigError::Invalid("modes must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be >= 1".into()));
        }
        // The axis value replaces the corresponding base field, so validate
        // the base once per grid point.
        for &v in &self.grid {
            let mut p = self.base;
            let mut eh = self.eh;
            self.axis.apply(&mut p, &mut eh, v);
            p.validate()
                .map_err(|e| ConfigError::Invalid(format!("{} = {v}: {e}", self.axis.name())))?;
            eh.validate()
                .map_err(|e| ConfigError::Invalid(format!("{} = {v}: {e}", self.axis.name())))?;
        }
        Ok(())
    }
}

/// Flat config file contents. Every key is optional; whatever is present
/// overrides the preset (or the built-in defaults).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub label: Option<String>,
    pub axis: Option<Axis>,
    pub grid: Option<Vec<f64>>,

    pub pt_dbm: Option<f64>,
    pub noise_density_dbm_hz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub sigma2_w: Option<f64>,
    pub n_elements: Option<u32>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub r1_target: Option<f64>,
    pub r2_target: Option<f64>,
    pub omega: Option<f64>,
    pub omega_db: Option<f64>,
    pub rho: Option<f64>,
    pub m_ss: Option<f64>,
    pub m_s1: Option<f64>,
    pub m_s2: Option<f64>,
    pub omega_ss: Option<f64>,
    pub omega_s1: Option<f64>,
    pub omega_s2: Option<f64>,
    pub beta_ss: Option<f64>,
    pub beta_ss_db: Option<f64>,
    pub beta_s1: Option<f64>,
    pub beta_s1_db: Option<f64>,
    pub beta_s2: Option<f64>,
    pub beta_s2_db: Option<f64>,
    pub beta_12: Option<f64>,
    pub beta_12_db: Option<f64>,
    pub zeta_threshold: Option<f64>,

    pub eh_model: Option<String>,
    pub eh_a: Option<f64>,
    pub eh_b: Option<f64>,
    pub eh_p_th: Option<f64>,
    pub eh_eta: Option<f64>,

    pub metrics: Option<Vec<Metric>>,
    pub modes: Option<Vec<Mode>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl RawConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    fn pick_db(
        linear: Option<f64>,
        db: Option<f64>,
        key: &str,
    ) -> Result<Option<f64>, ConfigError> {
        match (linear, db) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid(format!(
                "{key} and {key}_db are mutually exclusive"
            ))),
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(db_to_linear(d))),
            (None, None) => Ok(None),
        }
    }

    /// Overlay this config onto a run.
    pub fn apply_to(&self, spec: &mut SweepSpec) -> Result<(), ConfigError> {
        if let Some(l) = &self.label {
            spec.label = l.clone();
        }
        if let Some(a) = self.axis {
            spec.axis = a;
        }
        if let Some(g) = &self.grid {
            spec.grid = g.clone();
        }
        let p = &mut spec.base;
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { p.$field = v; })*
            };
        }
        set!(
            pt_dbm,
            noise_density_dbm_hz,
            bandwidth_hz,
            n_elements,
            alpha1,
            alpha2,
            r1_target,
            r2_target,
            rho,
            m_ss,
            m_s1,
            m_s2,
            omega_ss,
            omega_s1,
            omega_s2,
            zeta_threshold
        );
        if let Some(v) = self.sigma2_w {
            p.sigma2_w = Some(v);
        }
        if let Some(v) = Self::pick_db(self.omega, self.omega_db, "omega")? {
            p.omega = v;
        }
        if let Some(v) = Self::pick_db(self.beta_ss, self.beta_ss_db, "beta_ss")? {
            p.beta_ss = v;
        }
        if let Some(v) = Self::pick_db(self.beta_s1, self.beta_s1_db, "beta_s1")? {
            p.beta_s1 = v;
        }
        if let Some(v) = Self::pick_db(self.beta_s2, self.beta_s2_db, "beta_s2")? {
            p.beta_s2 = v;
        }
        if let Some(v) = Self::pick_db(self.beta_12, self.beta_12_db, "beta_12")? {
            p.beta_12 = v;
        }

        match self.eh_model.as_deref() {
            None => {
                if let EhParams::NonLinear { a, b, p_th } = &mut spec.eh {
                    if let Some(v) = self.eh_a {
                        *a = v;
                    }
                    if let Some(v) = self.eh_b {
                        *b = v;
                    }
                    if let Some(v) = self.eh_p_th {
                        *p_th = v;
                    }
                } else if let EhParams::Linear { eta } = &mut spec.eh {
                    if let Some(v) = self.eh_eta {
                        *eta = v;
                    }
                }
            }
            Some("nonlinear") => {
                let EhParams::NonLinear { a, b, p_th } = EhParams::table1() else {
                    unreachable!()
                };
                spec.eh = EhParams::NonLinear {
                    a: self.eh_a.unwrap_or(a),
                    b: self.eh_b.unwrap_or(b),
                    p_th: self.eh_p_th.unwrap_or(p_th),
                };
            }
            Some("linear") => {
                spec.eh = EhParams::Linear { eta: self.eh_eta.unwrap_or(0.8) };
            }
            Some(other) => {
                return Err(ConfigError::Invalid(format!(
                    "eh_model must be \"nonlinear\" or \"linear\", got \"{other}\""
                )))
            }
        }

        if let Some(m) = &self.metrics {
            spec.metrics = m.clone();
        }
        if let Some(m) = &self.modes {
            spec.modes = m.clone();
        }
        if let Some(t) = self.trials {
            spec.trials = t;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        Ok(())
    }
}

/// Write a run back out as a loadable config. Emits linear-scale keys so
/// the reload is bit-exact.
pub fn write_config(spec: &SweepSpec) -> String {
    let p = &spec.base;
    let raw = RawConfig {
        preset: None,
        label: Some(spec.label.clone()),
        axis: Some(spec.axis),
        grid: Some(spec.grid.clone()),
        pt_dbm: Some(p.pt_dbm),
        noise_density_dbm_hz: Some(p.noise_density_dbm_hz),
        bandwidth_hz: Some(p.bandwidth_hz),
        sigma2_w: p.sigma2_w,
        n_elements: Some(p.n_elements),
        alpha1: Some(p.alpha1),
        alpha2: Some(p.alpha2),
        r1_target: Some(p.r1_target),
        r2_target: Some(p.r2_target),
        omega: Some(p.omega),
        omega_db: None,
        rho: Some(p.rho),
        m_ss: Some(p.m_ss),
        m_s1: Some(p.m_s1),
        m_s2: Some(p.m_s2),
        omega_ss: Some(p.omega_ss),
        omega_s1: Some(p.omega_s1),
        omega_s2: Some(p.omega_s2),
        beta_ss: Some(p.beta_ss),
        beta_ss_db: None,
        beta_s1: Some(p.beta_s1),
        beta_s1_db: None,
        beta_s2: Some(p.beta_s2),
        beta_s2_db: None,
        beta_12: Some(p.beta_12),
        beta_12_db: None,
        zeta_threshold: Some(p.zeta_threshold),
        eh_model: Some(match spec.eh {
            EhParams::NonLinear { .. } => "nonlinear".into(),
            EhParams::Linear { .. } => "linear".into(),
        }),
        eh_a: match spec.eh {
            EhParams::NonLinear { a, .. } => Some(a),
            _ => None,
        },
        eh_b: match spec.eh {
            EhParams::NonLinear { b, .. } => Some(b),
            _ => None,
        },
        eh_p_th: match spec.eh {
            EhParams::NonLinear { p_th, .. } => Some(p_th),
            _ => None,
        },
        eh_eta: match spec.eh {
            EhParams::Linear { eta } => Some(eta),
            _ => None,
        },
        metrics: Some(spec.metrics.clone()),
        modes: Some(spec.modes.clone()),
        trials: Some(spec.trials),
        seed: Some(spec.seed),
    };
    toml::to_string(&raw).expect("config serialization cannot fail")
}

fn grid_range(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

fn base_run(n: u32) -> SweepSpec {
    SweepSpec {
        label: "custom".into(),
        axis: Axis::PtDbm,
        grid: Vec::new(),
        base: SystemParams::defaults(n),
        eh: EhParams::table1(),
        metrics: Vec::new(),
        modes: vec![Mode::Analytic, Mode::Mc],
        trials: DEFAULT_TRIALS,
        seed: DEFAULT_SEED,
    }
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Built-in sweep families mirroring the benchmark curves.
pub fn preset_runs(name: &str) -> Result<Vec<SweepSpec>, ConfigError> {
    let mut runs = Vec::new();
    match name {
        // Ergodic rate vs transmit power.
        "fig2" => {
            for n in [30u32, 65, 100] {
                for rho in [0.0, 0.2] {
                    let mut run = base_run(n);
                    run.label = format!("fig2_n{n}_rho{}", fmt_num(rho));
                    run.grid = grid_range(0.0, 5.0, 7);
                    run.base.rho = rho;
                    run.metrics = vec![Metric::ErD1, Metric::ErD2];
                    runs.push(run);
                }
            }
        }
        // Mean harvested power vs transmit power, deep power split.
        "fig3" => {
            for n in [30u32, 65, 100] {
                let mut run = base_run(n);
                run.label = format!("fig3_n{n}");
                run.grid = grid_range(0.0, 5.0, 11);
                run.base.rho = 0.8;
                run.metrics = vec![Metric::MeanPh];
                runs.push(run);
            }
        }
        // Outage vs transmit power, ideal SI cancellation.
        "fig4" => {
            for rho in [0.0, 0.2] {
                let mut run = base_run(100);
                run.label = format!("fig4_rho{}", fmt_num(rho));
                run.grid = grid_range(-10.0, 5.0, 13);
                run.base.rho = rho;
                run.base.omega = 0.0;
                run.metrics = vec![Metric::OpD1, Metric::OpD2];
                runs.push(run);
            }
        }
        // Ergodic rate vs RIS size.
        "fig5" => {
            for rho in [0.0, 0.5] {
                for omega_db in [-45.0, -30.0, -15.0] {
                    let mut run = base_run(30);
                    run.label = format!("fig5_rho{}_omega{}db", fmt_num(rho), fmt_num(omega_db));
                    run.axis = Axis::NElements;
                    run.grid = grid_range(10.0, 10.0, 10);
                    run.base.pt_dbm = 15.0;
                    run.base.rho = rho;
                    run.base.omega = db_to_linear(omega_db);
                    run.metrics = vec![Metric::ErD1, Metric::ErD2];
                    runs.push(run);
                }
            }
        }
        // Outage vs transmit power across SI levels, sigmoid vs linear
        // harvester.
        "fig6" => {
            for (tag, omega) in [("inf", 0.0), ("20db", db_to_linear(-20.0)), ("15db", db_to_linear(-15.0))] {
                for linear in [false, true] {
                    let mut run = base_run(100);
                    run.label = format!(
                        "fig6_omega_neg{tag}_{}",
                        if linear { "linear" } else { "nonlinear" }
                    );
                    run.grid = grid_range(-10.0, 5.0, 13);
                    run.base.rho = 0.5;
                    run.base.omega = omega;
                    if linear {
                        run.eh = EhParams::Linear { eta: 0.8 };
                    }
                    run.metrics = vec![Metric::OpD1, Metric::OpD2];
                    runs.push(run);
                }
            }
        }
        // Outage vs power-split fraction.
        "fig7" => {
            for pt in [15.0, 30.0] {
                for omega_db in [-5.0, -15.0, -30.0] {
                    let mut run = base_run(100);
                    run.label = format!("fig7_pt{}dbm_omega{}db", fmt_num(pt), fmt_num(omega_db));
                    run.axis = Axis::Rho;
                    run.grid = grid_range(0.0, 0.05, 21);
                    run.base.pt_dbm = pt;
                    run.base.omega = db_to_linear(omega_db);
                    run.metrics = vec![Metric::OpD1, Metric::OpD2];
                    runs.push(run);
                }
            }
        }
        // Outage vs transmit power across harvester saturation levels.
        "fig8" => {
            for p_th_mw in [1.0, 25.0, 50.0] {
                for omega_db in [-22.0, -15.0] {
                    let mut run = base_run(100);
                    run.label =
                        format!("fig8_pth{}mw_omega{}db", fmt_num(p_th_mw), fmt_num(omega_db));
                    run.grid = grid_range(-10.0, 5.0, 13);
                    run.base.rho = 0.5;
                    run.base.omega = db_to_linear(omega_db);
                    run.eh = EhParams::NonLinear { a: 150.0, b: 0.014, p_th: p_th_mw * 1e-3 };
                    run.metrics = vec![Metric::OpD1, Metric::OpD2];
                    runs.push(run);
                }
            }
        }
        other => return Err(ConfigError::UnknownPreset(other.into())),
    }
    Ok(runs)
}

/// Resolve the preset name and optional config file into validated runs.
pub fn resolve_runs(
    preset: Option<&str>,
    cfg: Option<&RawConfig>,
) -> Result<Vec<SweepSpec>, ConfigError> {
    let preset = preset.or(cfg.and_then(|c| c.preset.as_deref()));
    let mut runs = match preset {
        Some(name) => preset_runs(name)?,
        None => vec![base_run(100)],
    };
    if let Some(cfg) = cfg {
        for run in &mut runs {
            cfg.apply_to(run)?;
        }
    }
    for run in &runs {
        run.validate()?;
    }
    Ok(runs)
}
