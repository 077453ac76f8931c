//! Experiment configuration: a flat JSON document with documented defaults.
//!
//! Unknown keys are rejected. The resolved configuration serializes back to
//! the same flat schema, so the echo written into run metadata is itself a
//! loadable config with every default spelled out.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::doa::{SteeringConfig, Trajectory};
use crate::error::{Error, Result};
use crate::streams::{support_size, EpsilonSchedule, NoiseKind, NoiseSpec, StreamConfig};
use crate::tracker::{default_threshold_k, TrackerParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SubspaceTracking,
    DoaTracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    AlphaOpit,
    Opit,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::AlphaOpit => "alpha_opit",
            Algorithm::Opit => "opit",
        }
    }

    pub fn is_robust(self) -> bool {
        matches!(self, Algorithm::AlphaOpit)
    }
}

/// Input document; every field except `experiment` is optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    n: Option<usize>,
    r: Option<usize>,
    #[serde(rename = "T")]
    steps: Option<usize>,
    lambda: Option<f64>,
    alpha: Option<f64>,
    p: Option<f64>,
    k: Option<usize>,
    sparsity: Option<f64>,
    epsilon: Option<f64>,
    noise_kind: Option<NoiseKind>,
    delta: Option<f64>,
    mu: Option<f64>,
    gamma: Option<f64>,
    sigma_n: Option<f64>,
    noiseless: Option<bool>,
    change_points: Option<Vec<usize>>,
    seeds: Option<Vec<u64>>,
    algorithms: Option<Vec<Algorithm>>,
    trajectories: Option<Vec<Trajectory>>,
    burn_in: Option<usize>,
    record_timing: Option<bool>,
    output_dir: Option<PathBuf>,
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub r: usize,
    #[serde(rename = "T")]
    pub steps: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub p: f64,
    pub k: usize,
    pub sparsity: f64,
    pub epsilon: f64,
    pub noise_kind: NoiseKind,
    pub delta: f64,
    pub mu: f64,
    pub gamma: f64,
    pub sigma_n: f64,
    /// DOA only: drop the additive noise entirely.
    pub noiseless: bool,
    pub change_points: Vec<usize>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    /// DOA source paths; empty for subspace tracking.
    pub trajectories: Vec<Trajectory>,
    /// Steps excluded from summary statistics.
    pub burn_in: usize,
    /// When false, `step_time_ns` is written as zero so reruns are
    /// byte-identical.
    pub record_timing: bool,
    pub output_dir: PathBuf,
}

/// Forgetting weight used by subspace-tracking runs unless overridden.
pub const DEFAULT_LAMBDA_SUBSPACE: f64 = 0.015;
/// Forgetting weight used by DOA runs unless overridden.
pub const DEFAULT_LAMBDA_DOA: f64 = 0.3;

/// Parses a config document and resolves defaults.
pub fn load_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let cfg = resolve(raw);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_config_str(&text).map_err(|e| e.context(format!("loading {}", path.display())))
}

fn resolve(raw: RawConfig) -> ExperimentConfig {
    let doa = raw.experiment == ExperimentKind::DoaTracking;
    let noise = NoiseSpec::default();
    let trajectories = if doa {
        raw.trajectories.unwrap_or_else(Trajectory::defaults)
    } else {
        raw.trajectories.unwrap_or_default()
    };
    let n = raw.n.unwrap_or(if doa { 20 } else { 200 });
    let r = raw.r.unwrap_or(if doa { trajectories.len() } else { 5 });
    let sparsity = raw.sparsity.unwrap_or(if doa { 0.0 } else { 0.8 });
    let k = raw
        .k
        .unwrap_or_else(|| default_threshold_k(n, r.max(1), Some(sparsity.clamp(0.0, 1.0))));
    ExperimentConfig {
        experiment: raw.experiment,
        n,
        r,
        steps: raw.steps.unwrap_or(if doa { 1000 } else { 2000 }),
        lambda: raw.lambda.unwrap_or(if doa {
            DEFAULT_LAMBDA_DOA
        } else {
            DEFAULT_LAMBDA_SUBSPACE
        }),
        alpha: raw.alpha.unwrap_or(0.9),
        p: raw.p.unwrap_or(2.0),
        k,
        sparsity,
        epsilon: raw.epsilon.unwrap_or(if doa { 0.0 } else { 1e-2 }),
        noise_kind: raw.noise_kind.unwrap_or(noise.kind),
        delta: raw.delta.unwrap_or(noise.delta),
        mu: raw.mu.unwrap_or(noise.mu),
        gamma: raw.gamma.unwrap_or(noise.gamma),
        sigma_n: raw.sigma_n.unwrap_or(noise.sigma_n),
        noiseless: raw.noiseless.unwrap_or(false),
        change_points: raw
            .change_points
            .unwrap_or(if doa { vec![] } else { vec![1000, 1500] }),
        seeds: raw.seeds.unwrap_or_else(|| vec![1]),
        algorithms: raw
            .algorithms
            .unwrap_or_else(|| vec![Algorithm::AlphaOpit, Algorithm::Opit]),
        trajectories,
        burn_in: raw.burn_in.unwrap_or(100),
        record_timing: raw.record_timing.unwrap_or(true),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigValidation(msg.into())
}

impl ExperimentConfig {
    /// Resolved defaults for an experiment kind.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let name = serde_json::to_string(&experiment).expect("enum serializes");
        load_config_str(&format!("{{\"experiment\": {name}}}")).expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 1 || self.n <= self.r {
            return Err(invalid(format!(
                "need n > r >= 1, got n={}, r={}",
                self.n, self.r
            )));
        }
        if self.steps < 1 {
            return Err(invalid("T must be at least 1"));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(invalid("lambda must lie in (0,1]"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha must lie in (0,1)"));
        }
        if !(self.p > 0.0 && self.p <= 2.0) {
            return Err(invalid("p must lie in (0,2]"));
        }
        if self.k < 1 || self.k > self.n {
            return Err(invalid(format!("k must lie in [1, n={}]", self.n)));
        }
        if !(0.0..1.0).contains(&self.sparsity) {
            return Err(invalid("sparsity must lie in [0,1)"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon must be finite and >= 0"));
        }
        self.noise_spec()
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        if self.change_points.contains(&0) {
            return Err(invalid("change points are step indices starting at 1"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds must be nonempty"));
        }
        if has_duplicates(&self.seeds) {
            return Err(invalid("seeds must be distinct"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("algorithms must be nonempty"));
        }
        if has_duplicates(&self.algorithms) {
            return Err(invalid("algorithms must be distinct"));
        }
        match self.experiment {
            ExperimentKind::SubspaceTracking => {
                support_size(self.n, self.sparsity).map_err(|e| invalid(e.to_string()))?;
                if self.noiseless {
                    return Err(invalid("noiseless is only supported for doa_tracking"));
                }
                if !self.trajectories.is_empty() {
                    return Err(invalid("trajectories are only used by doa_tracking"));
                }
            }
            ExperimentKind::DoaTracking => {
                if self.trajectories.len() != self.r {
                    return Err(invalid(format!(
                        "doa_tracking needs r equal to the number of trajectories ({}), got r={}",
                        self.trajectories.len(),
                        self.r
                    )));
                }
                self.steering_config()
                    .validate(self.steps)
                    .map_err(|e| invalid(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            kind: self.noise_kind,
            delta: self.delta,
            mu: self.mu,
            gamma: self.gamma,
            sigma_n: self.sigma_n,
        }
    }

    pub fn tracker_params(&self, algorithm: Algorithm) -> TrackerParams {
        TrackerParams {
            r: self.r,
            lambda: self.lambda,
            alpha: self.alpha,
            p: self.p,
            k: self.k,
            robust: algorithm.is_robust(),
        }
    }

    pub fn stream_config(&self) -> StreamConfig {
        StreamConfig {
            n: self.n,
            r: self.r,
            sparsity: self.sparsity,
            epsilon: EpsilonSchedule::Constant(self.epsilon),
            noise: self.noise_spec(),
            change_points: self.change_points.clone(),
        }
    }

    pub fn steering_config(&self) -> SteeringConfig {
        SteeringConfig {
            n: self.n,
            trajectories: self.trajectories.clone(),
            noise: (!self.noiseless).then(|| self.noise_spec()),
        }
    }

    /// Canonical JSON echo of the resolved configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 (hex) of the canonical JSON echo.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex_digest(Sha256::digest(&bytes).as_slice())
    }
}

fn has_duplicates<T: Ord + Clone>(items: &[T]) -> bool {
    let mut v = items.to_vec();
    v.sort();
    v.windows(2).any(|w| w[0] == w[1])
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
