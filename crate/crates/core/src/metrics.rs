//! Subspace estimation performance (SEP) and trace summaries.
//!
//! `SEP(U_true, U_est) = tr{U_estᴴ (I − P) U_est} / tr{U_estᴴ P U_est}` with
//! `P = U_true U_trueᴴ`. Lower is better; zero means the spans coincide.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, OrthonormalBasis, Scalar};

/// Denominator floor (per column) below which the estimate is reported as
/// orthogonal to the truth.
pub const DIVERGENCE_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sep {
    Finite(f64),
    /// Estimate (numerically) orthogonal to the true subspace.
    Divergent,
}

impl Sep {
    pub fn value(self) -> Option<f64> {
        match self {
            Sep::Finite(v) => Some(v),
            Sep::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Sep::Divergent)
    }
}

impl fmt::Display for Sep {
    /// Seventeen significant digits; divergent values print as `inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sep::Finite(v) => write!(f, "{v:.16e}"),
            Sep::Divergent => f.write_str("inf"),
        }
    }
}

/// SEP between two orthonormal bases of equal shape.
pub fn sep<T: Scalar>(truth: &OrthonormalBasis<T>, estimate: &OrthonormalBasis<T>) -> Result<Sep> {
    sep_matrices(truth.matrix(), estimate.matrix())
}

pub(crate) fn sep_matrices<T: Scalar>(truth: &Matrix<T>, estimate: &Matrix<T>) -> Result<Sep> {
    if truth.shape() != estimate.shape() {
        return Err(Error::Dimension(format!(
            "SEP needs matching shapes, got {:?} and {:?}",
            truth.shape(),
            estimate.shape()
        )));
    }
    if truth == estimate {
        return Ok(Sep::Finite(0.0));
    }
    // inside = ‖U_trueᴴ U_est‖², outside = ‖U_est − U_true (U_trueᴴ U_est)‖²
    let g = truth.adjoint_matmul(estimate)?;
    let inside = g.as_slice().iter().map(|x| x.abs_sqr()).sum::<f64>();
    let outside = estimate.sub(&truth.matmul(&g)?)?.frobenius_norm().powi(2);
    if inside < DIVERGENCE_FLOOR * estimate.cols() as f64 {
        return Ok(Sep::Divergent);
    }
    Ok(Sep::Finite(outside / inside))
}

/// One logged tracker step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub sep: Sep,
    pub weight: f64,
    pub step_time_ns: u64,
}

/// Per-step SEP history of one algorithm on one seeded stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SepTrace {
    pub algorithm: String,
    pub seed: u64,
    pub config_digest: String,
    records: Vec<TraceRecord>,
}

impl SepTrace {
    pub fn new(algorithm: impl Into<String>, seed: u64, config_digest: impl Into<String>) -> Self {
        SepTrace {
            algorithm: algorithm.into(),
            seed,
            config_digest: config_digest.into(),
            records: Vec::new(),
        }
    }

    /// Appends a record; `t` must exceed the previous one.
    pub fn push(&mut self, record: TraceRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.t <= last.t {
                return Err(Error::InvalidParameter(format!(
                    "trace times must increase: {} after {}",
                    record.t, last.t
                )));
            }
        }
        if let Sep::Finite(v) = record.sep {
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("negative SEP {v}")));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// SEP at time `t`, if logged.
    pub fn sep_at(&self, t: usize) -> Option<Sep> {
        self.records
            .binary_search_by_key(&t, |r| r.t)
            .ok()
            .map(|i| self.records[i].sep)
    }

    /// Finite SEP values with `start <= t < end`.
    pub fn finite_window(&self, start: usize, end: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.t >= start && r.t < end)
            .filter_map(|r| r.sep.value())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub median_sep: f64,
    pub mean_sep: f64,
    /// Mean over the last tenth of the (finite) window.
    pub last_decile_mean_sep: f64,
    pub median_step_time_ns: f64,
    pub divergent_count: usize,
    pub window_len: usize,
}

/// Statistics over records with `t > burn_in`. Divergent SEP values are
/// counted but excluded from the SEP statistics.
pub fn summarize_trace(trace: &SepTrace, burn_in: usize) -> Result<TraceSummary> {
    let window: Vec<&TraceRecord> = trace.records.iter().filter(|r| r.t > burn_in).collect();
    if window.is_empty() {
        return Err(Error::EmptyWindow {
            len: trace.len(),
            burn_in,
        });
    }
    let finite: Vec<f64> = window.iter().filter_map(|r| r.sep.value()).collect();
    let divergent_count = window.len() - finite.len();
    let times: Vec<f64> = window.iter().map(|r| r.step_time_ns as f64).collect();

    let (median_sep, mean_sep, last_decile_mean_sep) = if finite.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let tail = finite.len().div_ceil(10);
        (
            median(&finite),
            mean(&finite),
            mean(&finite[finite.len() - tail..]),
        )
    };
    Ok(TraceSummary {
        median_sep,
        mean_sep,
        last_decile_mean_sep,
        median_step_time_ns: median(&times),
        divergent_count,
        window_len: window.len(),
    })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median (average of the middle pair for even lengths). NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
