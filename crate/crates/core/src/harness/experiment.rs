//! Seeded experiment runs.
//!
//! For each seed the stream is generated once and replayed to every
//! algorithm, so all algorithms see identical samples and share the same
//! random initial basis.

use std::time::Instant;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::config::{hex_digest, Algorithm, ExperimentConfig, ExperimentKind};
use crate::doa::{esprit_angles, generate_doa_sample, match_tracks, DoaEstimate, LabeledAngle};
use crate::error::Result;
use crate::metrics::{sep, summarize_trace, SepTrace, TraceRecord, TraceSummary};
use crate::numerics::{qr_orthonormalize, OrthonormalBasis, Scalar};
use crate::streams::{seeded_rng, StreamProcess};
use crate::tracker::{init_tracker, threshold_columns, TrackerParams, TrackerState};

/// Offset separating the tracker's initial-basis seed from the stream seed.
const INIT_SEED_OFFSET: u64 = 0x005E_ED0F_1A17;

pub fn init_seed(seed: u64) -> u64 {
    seed.wrapping_add(INIT_SEED_OFFSET)
}

/// Pre-generated real-valued stream with its ground truth.
#[derive(Clone, Debug)]
pub struct SubspaceStream {
    pub samples: Vec<Vec<f64>>,
    pub truth: Vec<OrthonormalBasis<f64>>,
    /// Largest heavy-tailed noise magnitude per step (zero when none).
    pub heavy_peak: Vec<f64>,
}

/// Pre-generated array snapshots with the true angles per step.
#[derive(Clone, Debug)]
pub struct DoaStream {
    pub samples: Vec<Vec<Complex64>>,
    pub truth: Vec<Vec<f64>>,
}

pub fn generate_subspace_stream(cfg: &ExperimentConfig, seed: u64) -> Result<SubspaceStream> {
    let mut process = StreamProcess::new(cfg.stream_config(), seed)?;
    let mut out = SubspaceStream {
        samples: Vec::with_capacity(cfg.steps),
        truth: Vec::with_capacity(cfg.steps),
        heavy_peak: Vec::with_capacity(cfg.steps),
    };
    for _ in 0..cfg.steps {
        let sample = process.next_sample()?;
        out.heavy_peak.push(sample.heavy_peak());
        out.truth.push(qr_orthonormalize(&sample.a_true)?.0);
        out.samples.push(sample.x);
    }
    Ok(out)
}

pub fn generate_doa_stream(cfg: &ExperimentConfig, seed: u64) -> Result<DoaStream> {
    let steering = cfg.steering_config();
    let mut rng = seeded_rng(seed);
    let mut out = DoaStream {
        samples: Vec::with_capacity(cfg.steps),
        truth: Vec::with_capacity(cfg.steps),
    };
    for t in 1..=cfg.steps {
        out.samples
            .push(generate_doa_sample(&steering, t, &mut rng)?);
        out.truth.push(steering.angles_at(t));
    }
    Ok(out)
}

/// SHA-256 (hex) over the little-endian bytes of every sample entry.
pub fn stream_digest<T: DigestBytes>(samples: &[Vec<T>]) -> String {
    let mut h = Sha256::new();
    for x in samples {
        for v in x {
            v.feed(&mut h);
        }
    }
    hex_digest(h.finalize().as_slice())
}

/// Byte view used for stream digests.
pub trait DigestBytes {
    fn feed(&self, h: &mut Sha256);
}

impl DigestBytes for f64 {
    fn feed(&self, h: &mut Sha256) {
        h.update(self.to_le_bytes());
    }
}

impl DigestBytes for Complex64 {
    fn feed(&self, h: &mut Sha256) {
        h.update(self.re.to_le_bytes());
        h.update(self.im.to_le_bytes());
    }
}

/// Row-support containment of the current basis in its thresholded sketch.
///
/// No sketch column may keep more than `k` entries, and every nonzero row of
/// the basis must be a nonzero row of the thresholded sketch. The only
/// allowance is when the sketch has fewer than `r` nonzero rows (for
/// instance an all-zero sketch after a weight underflow): an orthonormal
/// basis then needs `r − support` completion rows, and no more are allowed.
pub fn support_contained<T: Scalar>(state: &TrackerState<T>, k: usize) -> Result<bool> {
    let thresholded = threshold_columns(state.sketch(), k)?;
    let (n, r) = thresholded.shape();
    for j in 0..r {
        if thresholded
            .col(j)
            .iter()
            .filter(|v| v.abs_sqr() > 0.0)
            .count()
            > k
        {
            return Ok(false);
        }
    }
    let u = state.basis().matrix();
    let support = (0..n).filter(|&i| !thresholded.is_row_zero(i)).count();
    let outside = (0..n)
        .filter(|&i| thresholded.is_row_zero(i) && !u.is_row_zero(i))
        .count();
    Ok(outside <= r.saturating_sub(support))
}

#[derive(Clone, Debug)]
pub struct SubspaceRun {
    pub trace: SepTrace,
    pub summary: TraceSummary,
    /// Steps failing [`support_contained`].
    pub support_violations: usize,
    pub rank_deficient_steps: usize,
}

#[derive(Clone, Debug)]
pub struct DoaRun {
    pub estimates: Vec<DoaEstimate>,
    pub step_time_ns: Vec<u64>,
    /// Median absolute error per source over steps after the burn-in.
    pub median_abs_err_deg: Vec<f64>,
    pub clipped_steps: usize,
}

#[derive(Clone, Debug)]
pub enum RunTrace {
    Subspace(SubspaceRun),
    Doa(DoaRun),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub trace: RunTrace,
}

#[derive(Clone, Debug)]
pub struct SeedOutcome {
    pub seed: u64,
    pub stream_digest: String,
    /// Per-step heavy-tailed noise peak (subspace runs only).
    pub heavy_peak: Vec<f64>,
    pub runs: Vec<RunOutcome>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub config_digest: String,
    pub seeds: Vec<SeedOutcome>,
}

impl ExperimentResults {
    pub fn run(&self, seed: u64, algorithm: Algorithm) -> Option<&RunOutcome> {
        self.seeds
            .iter()
            .find(|s| s.seed == seed)?
            .runs
            .iter()
            .find(|r| r.algorithm == algorithm)
    }
}

/// Runs every (seed, algorithm) pair of a validated configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    cfg.validate()?;
    let config_digest = cfg.digest();
    let mut seeds = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let outcome = match cfg.experiment {
            ExperimentKind::SubspaceTracking => run_subspace_seed(cfg, seed, &config_digest),
            ExperimentKind::DoaTracking => run_doa_seed(cfg, seed),
        }
        .map_err(|e| e.context(format!("seed {seed}")))?;
        seeds.push(outcome);
    }
    Ok(ExperimentResults {
        config: cfg.clone(),
        config_digest,
        seeds,
    })
}

fn timed<R>(record: bool, f: impl FnOnce() -> R) -> (R, u64) {
    if !record {
        return (f(), 0);
    }
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_nanos() as u64)
}

fn run_subspace_seed(cfg: &ExperimentConfig, seed: u64, digest: &str) -> Result<SeedOutcome> {
    let stream = generate_subspace_stream(cfg, seed)?;
    let mut runs = Vec::with_capacity(cfg.algorithms.len());
    for &algorithm in &cfg.algorithms {
        let params = cfg.tracker_params(algorithm);
        let run = track_subspace(&stream, &params, cfg, seed, algorithm, digest)
            .map_err(|e| e.context(algorithm.label()))?;
        runs.push(RunOutcome {
            algorithm,
            trace: RunTrace::Subspace(run),
        });
    }
    Ok(SeedOutcome {
        seed,
        stream_digest: stream_digest(&stream.samples),
        heavy_peak: stream.heavy_peak,
        runs,
    })
}

fn track_subspace(
    stream: &SubspaceStream,
    params: &TrackerParams,
    cfg: &ExperimentConfig,
    seed: u64,
    algorithm: Algorithm,
    digest: &str,
) -> Result<SubspaceRun> {
    let mut tracker = init_tracker::<f64>(cfg.n, params, init_seed(seed))?;
    let mut trace = SepTrace::new(algorithm.label(), seed, digest);
    let mut support_violations = 0;
    let mut rank_deficient_steps = 0;
    for (i, (x, truth)) in stream.samples.iter().zip(&stream.truth).enumerate() {
        let (report, ns) = timed(cfg.record_timing, || tracker.step(x, params));
        let report = report?;
        if report.rank_deficient {
            rank_deficient_steps += 1;
        }
        if !support_contained(&tracker, params.k)? {
            support_violations += 1;
        }
        trace.push(TraceRecord {
            t: i + 1,
            sep: sep(truth, tracker.basis())?,
            weight: report.weight,
            step_time_ns: ns,
        })?;
    }
    let summary = summarize_trace(&trace, cfg.burn_in)?;
    Ok(SubspaceRun {
        trace,
        summary,
        support_violations,
        rank_deficient_steps,
    })
}

fn run_doa_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let stream = generate_doa_stream(cfg, seed)?;
    let mut runs = Vec::with_capacity(cfg.algorithms.len());
    for &algorithm in &cfg.algorithms {
        let params = cfg.tracker_params(algorithm);
        let run =
            track_doa(&stream, &params, cfg, seed).map_err(|e| e.context(algorithm.label()))?;
        runs.push(RunOutcome {
            algorithm,
            trace: RunTrace::Doa(run),
        });
    }
    Ok(SeedOutcome {
        seed,
        stream_digest: stream_digest(&stream.samples),
        heavy_peak: Vec::new(),
        runs,
    })
}

fn track_doa(
    stream: &DoaStream,
    params: &TrackerParams,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<DoaRun> {
    let mut tracker = init_tracker::<Complex64>(cfg.n, params, init_seed(seed))?;
    let mut estimates: Vec<DoaEstimate> = Vec::with_capacity(cfg.steps);
    let mut step_time_ns = Vec::with_capacity(cfg.steps);
    let mut clipped_steps = 0;
    for (i, (x, truth)) in stream.samples.iter().zip(&stream.truth).enumerate() {
        let (report, ns) = timed(cfg.record_timing, || tracker.step(x, params));
        report?;
        step_time_ns.push(ns);
        let esprit = esprit_angles(tracker.basis())?;
        if esprit.clipped {
            clipped_steps += 1;
        }
        // The first step labels estimates by the truth; later steps carry
        // labels forward by nearest association.
        let previous: Vec<LabeledAngle> = match estimates.last() {
            Some(prev) => prev.angles.clone(),
            None => truth
                .iter()
                .enumerate()
                .map(|(label, &angle_deg)| LabeledAngle { label, angle_deg })
                .collect(),
        };
        estimates.push(DoaEstimate {
            t: i + 1,
            angles: match_tracks(&previous, &esprit.angles_deg)?,
            truth: truth.clone(),
        });
    }
    let median_abs_err_deg = doa_median_errors(&estimates, cfg.burn_in)?;
    Ok(DoaRun {
        estimates,
        step_time_ns,
        median_abs_err_deg,
        clipped_steps,
    })
}

/// Median absolute error per source over steps with `t > burn_in`.
pub fn doa_median_errors(estimates: &[DoaEstimate], burn_in: usize) -> Result<Vec<f64>> {
    let window: Vec<&DoaEstimate> = estimates.iter().filter(|e| e.t > burn_in).collect();
    let Some(first) = window.first() else {
        return Err(crate::error::Error::EmptyWindow {
            len: estimates.len(),
            burn_in,
        });
    };
    let sources = first.truth.len();
    let mut per_source = vec![Vec::with_capacity(window.len()); sources];
    for est in window {
        for (k, err) in est.abs_errors()?.into_iter().enumerate() {
            per_source[k].push(err);
        }
    }
    Ok(per_source
        .iter()
        .map(|v| crate::metrics::median(v))
        .collect())
}
