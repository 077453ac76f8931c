//! Direction-of-arrival tracking on a uniform linear array.
//!
//! Sources with time-varying angles `θ_k(t)` impinge on `n` half-wavelength
//! spaced sensors; the steering column of source `k` is
//! `[1, e^{jω}, …, e^{j(n−1)ω}]ᵀ` with `ω = π sin θ`. Angles are read back
//! from a signal-subspace basis by least-squares ESPRIT on the single-lag
//! shift pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{least_squares_solve, small_eigenvalues, Matrix, OrthonormalBasis, Scalar};
use crate::streams::{sample_noise, NoiseSpec};

/// Angle path of one source, in degrees, as a function of the step index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Trajectory {
    Linear {
        start: f64,
        slope: f64,
    },
    Sawtooth {
        min: f64,
        max: f64,
        period: f64,
    },
    Sinusoid {
        center: f64,
        amplitude: f64,
        period: f64,
    },
}

impl Trajectory {
    pub fn angle_at(&self, t: usize) -> f64 {
        let t = t as f64;
        match *self {
            Trajectory::Linear { start, slope } => start + slope * t,
            Trajectory::Sawtooth { min, max, period } => {
                min + (max - min) * (t.rem_euclid(period) / period)
            }
            Trajectory::Sinusoid {
                center,
                amplitude,
                period,
            } => center + amplitude * (2.0 * PI * t / period).sin(),
        }
    }

    fn period(&self) -> Option<f64> {
        match *self {
            Trajectory::Linear { .. } => None,
            Trajectory::Sawtooth { period, .. } | Trajectory::Sinusoid { period, .. } => {
                Some(period)
            }
        }
    }

    /// The three default sources: linear, sawtooth and sinusoidal.
    pub fn defaults() -> Vec<Trajectory> {
        vec![
            Trajectory::Linear {
                start: -40.0,
                slope: 0.05,
            },
            Trajectory::Sawtooth {
                min: -20.0,
                max: 20.0,
                period: 400.0,
            },
            Trajectory::Sinusoid {
                center: 30.0,
                amplitude: 10.0,
                period: 500.0,
            },
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteeringConfig {
    /// Sensor count.
    pub n: usize,
    pub trajectories: Vec<Trajectory>,
    /// Applied independently to real and imaginary parts; `None` is noiseless.
    pub noise: Option<NoiseSpec>,
}

impl SteeringConfig {
    pub fn sources(&self) -> usize {
        self.trajectories.len()
    }

    pub fn angles_at(&self, t: usize) -> Vec<f64> {
        self.trajectories.iter().map(|tr| tr.angle_at(t)).collect()
    }

    /// Checks `1 ≤ K ≤ n − 1` and `|θ_k(t)| < 90°` for `t ∈ [0, horizon]`.
    pub fn validate(&self, horizon: usize) -> Result<()> {
        let k = self.sources();
        if k < 1 || k + 1 > self.n {
            return Err(Error::Dimension(format!(
                "need 1 <= K <= n-1 sources, got K={k}, n={}",
                self.n
            )));
        }
        for tr in &self.trajectories {
            if tr.period().is_some_and(|p| p.is_nan() || p <= 0.0) {
                return Err(Error::InvalidParameter(
                    "trajectory period must be positive".into(),
                ));
            }
            for t in 0..=horizon {
                let a = tr.angle_at(t);
                if a.is_nan() || a.abs() >= 90.0 {
                    return Err(Error::AngleDomain(a));
                }
            }
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }
}

/// Steering vector of one angle (degrees).
pub fn steering_vector(angle_deg: f64, n: usize) -> Result<Vec<Complex64>> {
    if angle_deg.is_nan() || angle_deg.abs() >= 90.0 {
        return Err(Error::AngleDomain(angle_deg));
    }
    let omega = PI * angle_deg.to_radians().sin();
    Ok((0..n)
        .map(|m| Complex64::from_polar(1.0, m as f64 * omega))
        .collect())
}

/// `n × K` steering matrix for the given angles (degrees).
pub fn steering_matrix(angles_deg: &[f64], n: usize) -> Result<Matrix<Complex64>> {
    if n == 0 || angles_deg.is_empty() {
        return Err(Error::Dimension(
            "steering matrix needs n >= 1 and K >= 1".into(),
        ));
    }
    let columns = angles_deg
        .iter()
        .map(|&a| steering_vector(a, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(&columns))
}

/// `x_t = A_t s_t + ν_t` with `s_t ~ CN(0, I_K)`.
pub fn generate_doa_sample<R: Rng + ?Sized>(
    cfg: &SteeringConfig,
    t: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let a = steering_matrix(&cfg.angles_at(t), cfg.n)?;
    let s: Vec<Complex64> = (0..cfg.sources())
        .map(|_| Complex64::standard_normal(rng))
        .collect();
    let mut x = a.mul_vec(&s)?;
    if let Some(noise) = &cfg.noise {
        let parts = sample_noise(noise, 2 * cfg.n, rng);
        for (xi, pair) in x.iter_mut().zip(parts.chunks_exact(2)) {
            *xi += Complex64::new(pair[0], pair[1]);
        }
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EspritEstimate {
    /// Ascending angles in degrees.
    pub angles_deg: Vec<f64>,
    /// Some `|ω/π|` exceeded one and was clipped before the arcsine.
    pub clipped: bool,
}

/// Angles spanned by a signal-subspace basis (`n ≥ r + 1`).
pub fn esprit_angles(u: &OrthonormalBasis<Complex64>) -> Result<EspritEstimate> {
    let (n, r) = u.matrix().shape();
    if n < r + 1 {
        return Err(Error::Dimension(format!(
            "ESPRIT needs n >= r + 1, got n={n}, r={r}"
        )));
    }
    let upper = u.matrix().row_range(0, n - 1)?;
    let lower = u.matrix().row_range(1, n)?;
    let psi = least_squares_solve(&upper, &lower)?;
    let mut clipped = false;
    let mut angles_deg: Vec<f64> = small_eigenvalues(&psi)?
        .into_iter()
        .map(|ev| {
            let ratio = ev.arg() / PI;
            if ratio.abs() > 1.0 {
                clipped = true;
            }
            ratio.clamp(-1.0, 1.0).asin().to_degrees()
        })
        .collect();
    angles_deg.sort_by(f64::total_cmp);
    Ok(EspritEstimate {
        angles_deg,
        clipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledAngle {
    pub label: usize,
    pub angle_deg: f64,
}

/// Largest source count for which association is exhaustive.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Carries the labels of `previous` over to `current`, pairing angles so the
/// total absolute difference is minimal (exhaustive up to
/// [`EXHAUSTIVE_LIMIT`], greedy closest-pair beyond). Output entry `i`
/// carries `previous[i].label`.
pub fn match_tracks(previous: &[LabeledAngle], current: &[f64]) -> Result<Vec<LabeledAngle>> {
    let k = previous.len();
    if current.len() != k {
        return Err(Error::Dimension(format!(
            "cannot match {} tracks with {} estimates",
            k,
            current.len()
        )));
    }
    let cost = |i: usize, j: usize| (previous[i].angle_deg - current[j]).abs();
    let assignment = if k <= EXHAUSTIVE_LIMIT {
        best_permutation(k, cost)
    } else {
        greedy_assignment(k, cost)
    };
    Ok(previous
        .iter()
        .zip(assignment)
        .map(|(p, j)| LabeledAngle {
            label: p.label,
            angle_deg: current[j],
        })
        .collect())
}

/// Lexicographically first permutation of minimal cost.
fn best_permutation(k: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        let c: f64 = perm.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
        if c < best_cost {
            best_cost = c;
            best.clone_from(&perm);
        }
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn greedy_assignment(k: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| (cost(i, j), i, j))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut out = vec![usize::MAX; k];
    let mut used = vec![false; k];
    for (_, i, j) in pairs {
        if out[i] == usize::MAX && !used[j] {
            out[i] = j;
            used[j] = true;
        }
    }
    out
}

/// Angles of one step with persistent labels, next to the ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct DoaEstimate {
    pub t: usize,
    pub angles: Vec<LabeledAngle>,
    /// Ground truth, indexed by source.
    pub truth: Vec<f64>,
}

impl DoaEstimate {
    /// Estimate assigned to each true source by minimal total distance.
    pub fn per_source(&self) -> Result<Vec<f64>> {
        let reference: Vec<LabeledAngle> = self
            .truth
            .iter()
            .enumerate()
            .map(|(label, &angle_deg)| LabeledAngle { label, angle_deg })
            .collect();
        let current: Vec<f64> = self.angles.iter().map(|a| a.angle_deg).collect();
        Ok(match_tracks(&reference, &current)?
            .into_iter()
            .map(|a| a.angle_deg)
            .collect())
    }

    /// Absolute error per true source, in degrees.
    pub fn abs_errors(&self) -> Result<Vec<f64>> {
        Ok(self
            .per_source()?
            .iter()
            .zip(&self.truth)
            .map(|(e, t)| (e - t).abs())
            .collect())
    }
}
