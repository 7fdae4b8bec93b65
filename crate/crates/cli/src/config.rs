//! JSON experiment configuration: parsing, validation and conversion to the
//! core parameter types.

use std::fmt;

use cvd_core::analytic::{asymmetric_bound, double_jump_bound, SqueezeSpec, DEFAULT_SMALLNESS};
use cvd_core::fock::EntropyUnit;
use cvd_core::loss::{LossParams, FIRST_ORDER_GUARD};
use cvd_core::purification::ProtocolParams;
use cvd_core::qnd::{distinguishability, signal_slope, CavityParams, ADIABATIC_LIMIT, MIN_WINDOW_GAMMA};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Option<ProtocolSection>,
    pub loss: Option<LossSection>,
    pub cavity: Option<CavitySection>,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub m: u32,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    pub j_max: Option<u32>,
    /// Mode counts for the asymptotic-yield table.
    pub m_list: Option<Vec<u32>>,
    #[serde(default)]
    pub unit: EntropyUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSection {
    pub eta_a: f64,
    pub eta_b: f64,
    pub tau: f64,
    pub tau_scan: Option<Vec<f64>>,
    /// Outcome used by the filter and the infidelity scan.
    #[serde(default = "default_j")]
    pub j: u32,
    #[serde(default = "default_guard")]
    pub first_order_guard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub chi_over_2pi_hz: f64,
    pub gamma_over_2pi_hz: f64,
    pub kappa_over_2pi_hz: f64,
    pub g: f64,
    pub t_meas_s: f64,
    #[serde(default)]
    pub lo_phase: f64,
    /// Mean photon number per stored mode; taken from the protocol squeezing
    /// when absent.
    pub n_bar: Option<f64>,
    #[serde(default = "default_n_tot")]
    pub n_tot: Vec<u32>,
    #[serde(default = "default_samples")]
    pub n_samples: u64,
    #[serde(default = "default_trajectories")]
    pub sde_trajectories: u64,
    pub sde_dt_s: Option<f64>,
    pub discard_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_shots")]
    pub n_shots: u64,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: Option<String>,
    pub format: Option<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            n_shots: default_shots(),
            seed: 0,
            out_dir: None,
            format: None,
        }
    }
}

fn default_tail_tol() -> f64 {
    1e-12
}
fn default_j() -> u32 {
    1
}
fn default_guard() -> f64 {
    FIRST_ORDER_GUARD
}
fn default_n_tot() -> Vec<u32> {
    (0..=5).collect()
}
fn default_samples() -> u64 {
    100_000
}
fn default_trajectories() -> u64 {
    2000
}
fn default_shots() -> u64 {
    100_000
}

/// Which subcommand the configuration is checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Analytic,
    Protocol,
    Loss,
    Qnd,
    Feasibility,
    Reproduce,
    /// Check whatever sections are present.
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// A parsed configuration with the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub source: String,
    pub text: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub source: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source, self.line, self.message)
    }
}

impl LoadedConfig {
    pub fn parse(source: &str, text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            source: source.to_string(),
            line: e.line().max(1),
            message: e.to_string(),
        })?;
        Ok(LoadedConfig {
            source: source.to_string(),
            text: text.to_string(),
            config,
        })
    }

    /// Built-in empty configuration, used when no file is given.
    pub fn empty() -> Self {
        LoadedConfig {
            source: "<builtin>".into(),
            text: String::new(),
            config: ExperimentConfig::default(),
        }
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }

    /// 1-based line of `"key"` inside `"section"`, falling back to the
    /// section line and then to line 1.
    pub fn line_of(&self, section: &str, key: &str) -> usize {
        let lines: Vec<&str> = self.text.lines().collect();
        let sec = format!("\"{section}\"");
        let start = lines.iter().position(|l| l.contains(&sec));
        let k = format!("\"{key}\"");
        if let Some(s) = start {
            if let Some(off) = lines[s..].iter().position(|l| l.contains(&k)) {
                return s + off + 1;
            }
            return s + 1;
        }
        1
    }

    pub fn validate(&self, purpose: Purpose) -> Diagnostics {
        let mut d = Diagnostics::default();
        let cfg = &self.config;
        let mut err = |sec: &str, key: &str, msg: String| {
            d.errors.push(Diagnostic {
                line: self.line_of(sec, key),
                message: msg,
            })
        };
        let needs = |p: &[Purpose]| p.contains(&purpose);

        if cfg.protocol.is_none() && needs(&[Purpose::Analytic, Purpose::Protocol, Purpose::Loss]) {
            err("protocol", "protocol", "missing section \"protocol\"".into());
        }
        if cfg.loss.is_none() && needs(&[Purpose::Loss]) {
            err("loss", "loss", "missing section \"loss\"".into());
        }
        if cfg.cavity.is_none() && needs(&[Purpose::Qnd, Purpose::Feasibility]) {
            err("cavity", "cavity", "missing section \"cavity\"".into());
        }
        if let Some(p) = &cfg.protocol {
            if p.m == 0 {
                err("protocol", "m", "m must be >= 1".into());
            }
            match (p.r, p.lambda) {
                (Some(_), Some(_)) => err("protocol", "lambda", "give exactly one of r and lambda, not both".into()),
                (None, None) => err("protocol", "m", "one of r or lambda is required".into()),
                (None, Some(l)) if !l.is_finite() || l >= 1.0 => {
                    err("protocol", "lambda", format!("lambda must be < 1 (got {l})"))
                }
                (None, Some(l)) if l < 0.0 => err("protocol", "lambda", format!("lambda must be >= 0 (got {l})")),
                (Some(r), None) if !(r.is_finite() && r >= 0.0) => {
                    err("protocol", "r", format!("r must be finite and >= 0 (got {r})"))
                }
                (Some(r), None) if r.tanh() >= 1.0 => {
                    err("protocol", "r", format!("r = {r} gives lambda = 1; lambda must be < 1"))
                }
                _ => {}
            }
            if !(p.tail_tol > 0.0 && p.tail_tol < 1.0) {
                err("protocol", "tail_tol", format!("tail_tol must be in (0, 1) (got {})", p.tail_tol));
            }
            if let Some(list) = &p.m_list {
                if list.contains(&0) {
                    err("protocol", "m_list", "m_list entries must be >= 1".into());
                }
            }
        }
        if let Some(l) = &cfg.loss {
            for (key, v) in [("eta_a", l.eta_a), ("eta_b", l.eta_b), ("tau", l.tau)] {
                if !(v.is_finite() && v >= 0.0) {
                    err("loss", key, format!("{key} must be finite and >= 0 (got {v})"));
                }
            }
            if let Some(scan) = &l.tau_scan {
                if scan.is_empty() || scan.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    err("loss", "tau_scan", "tau_scan must be a non-empty list of finite values >= 0".into());
                }
            }
            if !(l.first_order_guard > 0.0) {
                err("loss", "first_order_guard", "first_order_guard must be > 0".into());
            }
        }
        if let Some(c) = &cfg.cavity {
            for (key, v) in [
                ("chi_over_2pi_hz", c.chi_over_2pi_hz),
                ("kappa_over_2pi_hz", c.kappa_over_2pi_hz),
                ("g", c.g),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    err("cavity", key, format!("{key} must be finite and >= 0 (got {v})"));
                }
            }
            for (key, v) in [("gamma_over_2pi_hz", c.gamma_over_2pi_hz), ("t_meas_s", c.t_meas_s)] {
                if !(v.is_finite() && v > 0.0) {
                    err("cavity", key, format!("{key} must be finite and > 0 (got {v})"));
                }
            }
            if let Some(nb) = c.n_bar {
                if !(nb.is_finite() && nb >= 0.0) {
                    err("cavity", "n_bar", format!("n_bar must be finite and >= 0 (got {nb})"));
                }
            }
            if let Some(dt) = c.sde_dt_s {
                if !(dt.is_finite() && dt > 0.0) {
                    err("cavity", "sde_dt_s", format!("sde_dt_s must be > 0 (got {dt})"));
                }
            }
            if c.n_tot.is_empty() {
                err("cavity", "n_tot", "n_tot must not be empty".into());
            }
            if c.n_samples == 0 {
                err("cavity", "n_samples", "n_samples must be >= 1".into());
            }
            if c.sde_trajectories < 2 && purpose == Purpose::Qnd {
                err("cavity", "sde_trajectories", "sde_trajectories must be >= 2".into());
            }
            if purpose == Purpose::Feasibility
                && c.n_bar.is_none()
                && cfg.protocol.as_ref().is_none_or(|p| p.r.is_none() && p.lambda.is_none())
            {
                err("cavity", "n_bar", "feasibility needs cavity.n_bar or a protocol squeezing".into());
            }
        }
        if cfg.run.n_shots == 0 {
            err("run", "n_shots", "n_shots must be >= 1".into());
        }
        if let Some(f) = &cfg.run.format {
            if f != "csv" && f != "json" {
                err("run", "format", format!("format must be \"csv\" or \"json\" (got {f:?})"));
            }
        }
        if d.is_ok() {
            self.warnings(purpose, &mut d);
        }
        d
    }

    fn warnings(&self, purpose: Purpose, d: &mut Diagnostics) {
        let mut warn = |sec: &str, key: &str, msg: String| {
            d.warnings.push(Diagnostic {
                line: self.line_of(sec, key),
                message: msg,
            })
        };
        let cfg = &self.config;
        let squeeze = cfg.protocol.as_ref().and_then(|p| protocol_squeeze(p).ok());
        if let (Some(l), true) = (&cfg.loss, matches!(purpose, Purpose::Loss | Purpose::Any)) {
            for (key, eta) in [("eta_a", l.eta_a), ("eta_b", l.eta_b)] {
                let x = eta * l.tau;
                if x > l.first_order_guard {
                    warn(
                        "loss",
                        key,
                        format!(
                            "{key} * tau = {x} exceeds the first-order guard {}; first-order trajectories are skipped",
                            l.first_order_guard
                        ),
                    );
                }
            }
            if let (Some(s), Some(p), Ok(loss)) = (squeeze, &cfg.protocol, LossParams::new(l.eta_a, l.eta_b, l.tau)) {
                let dj = double_jump_bound(p.m, &s, &loss, DEFAULT_SMALLNESS);
                if !dj.valid {
                    warn(
                        "loss",
                        "tau",
                        format!("double-jump weight m^2 n^2 eta_a eta_b tau^2 = {} is not small", dj.value),
                    );
                }
                let ab = asymmetric_bound(&s, l.eta_a, l.tau, DEFAULT_SMALLNESS);
                if !ab.valid {
                    warn("loss", "eta_a", format!("n eta_a tau = {} is not small", ab.value));
                }
            }
        }
        if let (Some(c), true) = (
            &cfg.cavity,
            matches!(purpose, Purpose::Qnd | Purpose::Feasibility | Purpose::Any),
        ) {
            if let Ok(cp) = cavity_params(c) {
                if signal_slope(&cp) == 0.0 {
                    warn("cavity", "chi_over_2pi_hz", "zero signal slope; photon numbers cannot be inferred".into());
                } else if distinguishability(&cp) >= 1.0 {
                    warn(
                        "cavity",
                        "t_meas_s",
                        format!("delta_n = {} >= 1; adjacent photon numbers are not resolved", distinguishability(&cp)),
                    );
                }
                let n_max = c.n_tot.iter().copied().max().unwrap_or(0);
                if !cp.is_adiabatic(n_max) {
                    warn(
                        "cavity",
                        "chi_over_2pi_hz",
                        format!(
                            "adiabatic ratio chi n / gamma = {} at n = {n_max} is not below {ADIABATIC_LIMIT}",
                            cp.adiabatic_ratio(n_max)
                        ),
                    );
                }
                if purpose != Purpose::Feasibility && cp.gamma * cp.t_meas < MIN_WINDOW_GAMMA {
                    warn(
                        "cavity",
                        "t_meas_s",
                        format!("gamma * t_meas = {} < {MIN_WINDOW_GAMMA}; the SDE check will refuse it", cp.gamma * cp.t_meas),
                    );
                }
            }
        }
    }

    pub fn protocol(&self) -> Option<ProtocolParams> {
        let p = self.config.protocol.as_ref()?;
        let s = protocol_squeeze(p).ok()?;
        let mut params = ProtocolParams::new(p.m, s).with_tail_tol(p.tail_tol);
        params.j_max = p.j_max;
        Some(params)
    }

    pub fn loss(&self) -> Option<LossParams> {
        let l = self.config.loss.as_ref()?;
        LossParams::new(l.eta_a, l.eta_b, l.tau).ok()
    }

    pub fn cavity(&self) -> Option<CavityParams> {
        cavity_params(self.config.cavity.as_ref()?).ok()
    }

    /// Mean photon number per stored mode for the feasibility window.
    pub fn n_bar(&self) -> Option<f64> {
        if let Some(nb) = self.config.cavity.as_ref().and_then(|c| c.n_bar) {
            return Some(nb);
        }
        self.config
            .protocol
            .as_ref()
            .and_then(|p| protocol_squeeze(p).ok())
            .map(|s| s.n_bar())
    }
}

pub fn protocol_squeeze(p: &ProtocolSection) -> cvd_core::Result<SqueezeSpec> {
    match (p.r, p.lambda) {
        (Some(r), None) => SqueezeSpec::from_r(r),
        (None, Some(l)) => SqueezeSpec::from_lambda(l),
        _ => Err(cvd_core::Error::InvalidParameter("give exactly one of r and lambda".into())),
    }
}

pub fn cavity_params(c: &CavitySection) -> cvd_core::Result<CavityParams> {
    Ok(CavityParams::from_hz(c.chi_over_2pi_hz, c.gamma_over_2pi_hz, c.kappa_over_2pi_hz, c.g, c.t_meas_s)?
        .with_lo_phase(c.lo_phase))
}
