//! Seeded generators for synthetic corrupted streams.
//!
//! Observations follow `x_t = A_t w_t + ν_t` where `A_t` is a sparse,
//! slowly drifting `n × r` basis, `w_t` has i.i.d. standard normal entries
//! and each entry of `ν_t` is drawn from a Gaussian / heavy-tailed mixture.
//! A `(config, seed)` pair fully determines the stream.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{qr_orthonormalize, Matrix};

/// Random source used by every generator in the crate.
pub type StreamRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Heavy-tailed component of the per-entry noise mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    GaussianOnly,
    LaplaceMix,
    CauchyMix,
    LaplaceCauchyMix,
}

/// Per-entry noise law: with probability `1 − delta` a `N(0, sigma_n²)` draw,
/// otherwise a draw from the heavy-tailed part selected by `kind`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub delta: f64,
    pub mu: f64,
    pub gamma: f64,
    pub sigma_n: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            kind: NoiseKind::CauchyMix,
            delta: 0.1,
            mu: 0.0,
            gamma: 1.0,
            sigma_n: 0.1,
        }
    }
}

impl NoiseSpec {
    pub fn gaussian(sigma_n: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::GaussianOnly,
            delta: 0.0,
            sigma_n,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in [0,1), got {}",
                self.delta
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.sigma_n >= 0.0 && self.sigma_n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_n must be finite and >= 0, got {}",
                self.sigma_n
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        Ok(())
    }

    /// Probability that an entry comes from the heavy-tailed part.
    pub fn heavy_fraction(&self) -> f64 {
        match self.kind {
            NoiseKind::GaussianOnly => 0.0,
            _ => self.delta,
        }
    }
}

/// Laplace(μ, γ) quantile function.
pub fn laplace_quantile(u: f64, mu: f64, gamma: f64) -> f64 {
    let c = u - 0.5;
    mu - gamma * c.signum() * (1.0 - 2.0 * c.abs()).ln()
}

/// Cauchy(μ, γ) quantile function.
pub fn cauchy_quantile(u: f64, mu: f64, gamma: f64) -> f64 {
    mu + gamma * (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Noise vector with a record of which entries came from the heavy tail.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseDraw {
    pub values: Vec<f64>,
    pub heavy: Vec<bool>,
}

pub fn sample_noise_tagged<R: Rng + ?Sized>(spec: &NoiseSpec, n: usize, rng: &mut R) -> NoiseDraw {
    let mut values = Vec::with_capacity(n);
    let mut heavy = Vec::with_capacity(n);
    let p_heavy = spec.heavy_fraction();
    for _ in 0..n {
        let branch: f64 = rng.random();
        if branch < p_heavy {
            let use_laplace = match spec.kind {
                NoiseKind::LaplaceMix => true,
                NoiseKind::CauchyMix => false,
                NoiseKind::LaplaceCauchyMix => rng.random::<bool>(),
                NoiseKind::GaussianOnly => unreachable!("heavy fraction is zero"),
            };
            let u: f64 = rng.sample(Open01);
            values.push(if use_laplace {
                laplace_quantile(u, spec.mu, spec.gamma)
            } else {
                cauchy_quantile(u, spec.mu, spec.gamma)
            });
            heavy.push(true);
        } else {
            let z: f64 = rng.sample(StandardNormal);
            values.push(spec.sigma_n * z);
            heavy.push(false);
        }
    }
    NoiseDraw { values, heavy }
}

/// I.i.d. draws from the mixture described by `spec`.
pub fn sample_noise<R: Rng + ?Sized>(spec: &NoiseSpec, n: usize, rng: &mut R) -> Vec<f64> {
    sample_noise_tagged(spec, n, rng).values
}

pub(crate) fn standard_normal_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub(crate) fn standard_normal_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Number of nonzero rows per column for a given sparsity level.
pub fn support_size(n: usize, sparsity: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidParameter(format!(
            "sparsity must lie in [0,1), got {sparsity}"
        )));
    }
    let k = ((1.0 - sparsity) * n as f64).round() as usize;
    if k < 1 {
        return Err(Error::InfeasibleSparsity { sparsity, n });
    }
    Ok(k.min(n))
}

const MAX_REDRAWS: usize = 1000;

pub(crate) fn draw_sparse_subspace<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    sparsity: f64,
    rng: &mut R,
) -> Result<(Matrix<f64>, Matrix<f64>)> {
    if r < 1 || n <= r {
        return Err(Error::Dimension(format!(
            "need n > r >= 1, got n={n}, r={r}"
        )));
    }
    let k = support_size(n, sparsity)?;
    for _ in 0..MAX_REDRAWS {
        let mut mask = Matrix::zeros(n, r);
        for j in 0..r {
            for i in index::sample(rng, n, k) {
                mask[(i, j)] = 1.0;
            }
        }
        let g = standard_normal_matrix(n, r, rng);
        let a = mask.hadamard(&g)?;
        let (_, dependent) = qr_orthonormalize(&a)?;
        if !dependent {
            return Ok((a, mask));
        }
    }
    Err(Error::InvalidParameter(format!(
        "could not draw {r} independent sparse columns with {k} nonzeros each in dimension {n}"
    )))
}

/// Draws a sparse `n × r` basis with exactly `round((1 − sparsity) n)`
/// nonzeros per column, returning the basis and its 0/1 support mask.
pub fn init_sparse_subspace(
    n: usize,
    r: usize,
    sparsity: f64,
    seed: u64,
) -> Result<(Matrix<f64>, Matrix<f64>)> {
    draw_sparse_subspace(n, r, sparsity, &mut seeded_rng(seed))
}

/// Per-step variation magnitude of the subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonSchedule {
    Constant(f64),
    /// Value for step `t` is entry `t − 1`; the last entry repeats.
    PerStep(Vec<f64>),
}

impl EpsilonSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match self {
            EpsilonSchedule::Constant(e) => *e,
            EpsilonSchedule::PerStep(v) => v
                .get(t.saturating_sub(1))
                .or(v.last())
                .copied()
                .unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            EpsilonSchedule::Constant(e) => *e >= 0.0 && e.is_finite(),
            EpsilonSchedule::PerStep(v) => v.iter().all(|e| *e >= 0.0 && e.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "epsilon must be finite and >= 0".into(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamConfig {
    pub n: usize,
    pub r: usize,
    pub sparsity: f64,
    pub epsilon: EpsilonSchedule,
    pub noise: NoiseSpec,
    /// Times at which the subspace and its support are redrawn.
    pub change_points: Vec<usize>,
}

/// One observation together with its ground truth.
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: usize,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// Low-rank part `A_t w_t`.
    pub ell: Vec<f64>,
    pub nu: Vec<f64>,
    /// Entries of `nu` drawn from the heavy-tailed component.
    pub heavy: Vec<bool>,
    pub a_true: Matrix<f64>,
}

impl Sample {
    /// Largest `|ν_i|` over heavy-tailed entries, or zero if there are none.
    pub fn heavy_peak(&self) -> f64 {
        self.nu
            .iter()
            .zip(&self.heavy)
            .filter(|(_, &h)| h)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Ground-truth generator: a drifting sparse subspace with scheduled
/// abrupt changes. The support mask is fixed between change points.
#[derive(Clone, Debug)]
pub struct StreamProcess {
    cfg: StreamConfig,
    a: Matrix<f64>,
    omega: Matrix<f64>,
    t: usize,
    rng: StreamRng,
}

impl StreamProcess {
    pub fn new(cfg: StreamConfig, seed: u64) -> Result<Self> {
        cfg.noise.validate()?;
        cfg.epsilon.validate()?;
        let mut change_points = cfg.change_points.clone();
        change_points.sort_unstable();
        change_points.dedup();
        let cfg = StreamConfig {
            change_points,
            ..cfg
        };
        let mut rng = seeded_rng(seed);
        let (a, omega) = draw_sparse_subspace(cfg.n, cfg.r, cfg.sparsity, &mut rng)?;
        Ok(StreamProcess {
            cfg,
            a,
            omega,
            t: 0,
            rng,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.cfg
    }

    /// Current ground-truth basis `A_t`.
    pub fn basis(&self) -> &Matrix<f64> {
        &self.a
    }

    pub fn mask(&self) -> &Matrix<f64> {
        &self.omega
    }

    pub fn time(&self) -> usize {
        self.t
    }

    /// Advances to `t + 1`: either `A ← Ω ∘ (A + ε V)` or, at a change
    /// point, a full redraw of the basis and its support.
    pub fn evolve_subspace(&mut self) -> Result<()> {
        self.t += 1;
        let (n, r) = (self.cfg.n, self.cfg.r);
        if self.cfg.change_points.binary_search(&self.t).is_ok() {
            let (a, omega) = draw_sparse_subspace(n, r, self.cfg.sparsity, &mut self.rng)?;
            self.a = a;
            self.omega = omega;
            return Ok(());
        }
        let eps = self.cfg.epsilon.at(self.t);
        let v = standard_normal_matrix(n, r, &mut self.rng);
        for ((a, &m), &dv) in self
            .a
            .as_mut_slice()
            .iter_mut()
            .zip(self.omega.as_slice())
            .zip(v.as_slice())
        {
            *a = if m != 0.0 { *a + eps * dv } else { 0.0 };
        }
        Ok(())
    }

    /// Evolves the subspace and draws the next observation.
    pub fn next_sample(&mut self) -> Result<Sample> {
        self.evolve_subspace()?;
        let w = standard_normal_vec(self.cfg.r, &mut self.rng);
        let ell = self.a.mul_vec(&w)?;
        let NoiseDraw { values: nu, heavy } =
            sample_noise_tagged(&self.cfg.noise, self.cfg.n, &mut self.rng);
        let x = ell.iter().zip(&nu).map(|(l, v)| l + v).collect();
        Ok(Sample {
            t: self.t,
            x,
            w,
            ell,
            nu,
            heavy,
            a_true: self.a.clone(),
        })
    }
}
