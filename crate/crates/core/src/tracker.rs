//! Online power iteration by thresholding, with optional α-divergence
//! sample weighting.
//!
//! Each step projects the new sample onto the previous basis, weights it by
//! `ω_t = exp(−(1−α)/2 · ‖e_t‖^p)` where `e_t` is the projection residual,
//! folds it into the sketch
//!
//! ```text
//! S_t = (1 − λ) S_{t−1} E_{t−1} + λ ω_t x_t w_tᴴ
//! ```
//!
//! keeps the `k` strongest entries of every sketch column and
//! re-orthonormalizes. With `robust = false` the weight is fixed to one and
//! the recursion is plain OPIT with forgetting factor `β = 1 − λ` (up to the
//! constant sketch scale `λ`, which the Q factor ignores).
//!
//! Persistent state is `U_t`, `S_t` and `E_t = U_{t−1}ᴴ U_t`: `2nr + r²`
//! scalars. A step costs `O(nr²)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{norm, qr_orthonormalize, Matrix, OrthonormalBasis, Scalar};
use crate::streams::seeded_rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerParams {
    /// Subspace rank.
    pub r: usize,
    /// Forgetting weight in `(0, 1]`.
    pub lambda: f64,
    /// Divergence parameter in `(0, 1)`.
    pub alpha: f64,
    /// Residual exponent in `(0, 2]`.
    pub p: f64,
    /// Entries kept per sketch column.
    pub k: usize,
    /// `false` fixes every weight to one (plain OPIT).
    pub robust: bool,
}

impl TrackerParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.r < 1 || n <= self.r {
            return Err(Error::Dimension(format!(
                "tracker needs n > r >= 1, got n={n}, r={}",
                self.r
            )));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in (0,1], got {}",
                self.lambda
            )));
        }
        if self.robust && !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if !(self.p > 0.0 && self.p <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0,2], got {}",
                self.p
            )));
        }
        if self.k < 1 || self.k > n {
            return Err(Error::ThresholdOutOfRange { k: self.k, n });
        }
        Ok(())
    }
}

/// Rule for the number of entries kept per column: `round((1 − s) n)` for a
/// known sparsity `s`, otherwise `round(10 r ln n)`; clamped to `[1, n]`.
pub fn default_threshold_k(n: usize, r: usize, sparsity: Option<f64>) -> usize {
    let raw = match sparsity {
        Some(s) => ((1.0 - s) * n as f64).round(),
        None => (10.0 * r as f64 * (n as f64).ln()).round(),
    };
    (raw.max(1.0) as usize).min(n)
}

/// `exp(−(1−α)/2 · residual^p)`. Underflows to zero for huge residuals.
pub fn alpha_weight(residual_norm: f64, alpha: f64, p: f64) -> f64 {
    (-(1.0 - alpha) * 0.5 * residual_norm.powf(p)).exp()
}

/// Keeps, in every column, the `k` entries of largest modulus (ties go to
/// the lower row index) and zeroes the rest.
pub fn threshold_columns<T: Scalar>(s: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    let (n, cols) = s.shape();
    if k < 1 || k > n {
        return Err(Error::ThresholdOutOfRange { k, n });
    }
    let mut out = s.clone();
    if k == n {
        return Ok(out);
    }
    let mut mags: Vec<f64> = Vec::with_capacity(n);
    for j in 0..cols {
        mags.clear();
        mags.extend(s.col(j).iter().map(|x| x.abs_sqr()));
        let mut scratch = mags.clone();
        let (_, &mut cut, _) = scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        // everything strictly above the k-th magnitude survives; ties at
        // the cut fill the remaining slots in row order
        let mut room = k - mags.iter().filter(|&&m| m > cut).count();
        for (x, &m) in out.col_mut(j).iter_mut().zip(&mags) {
            if m > cut {
                continue;
            }
            if m == cut && room > 0 {
                room -= 1;
            } else {
                *x = T::ZERO;
            }
        }
    }
    Ok(out)
}

/// Per-step diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub weight: f64,
    pub residual_norm: f64,
    /// The thresholded sketch was rank deficient and the basis was completed.
    pub rank_deficient: bool,
}

/// Live state of one tracker instance.
#[derive(Clone, Debug)]
pub struct TrackerState<T> {
    u: OrthonormalBasis<T>,
    s: Matrix<T>,
    e: Matrix<T>,
    t: usize,
    last_weight: f64,
    last_residual: f64,
}

/// Seeded random orthonormal start, zero sketch and identity rotation.
pub fn init_tracker<T: Scalar>(
    n: usize,
    params: &TrackerParams,
    seed: u64,
) -> Result<TrackerState<T>> {
    params.validate(n)?;
    let mut rng = seeded_rng(seed);
    let u0 = random_basis(n, params.r, &mut rng)?;
    TrackerState::with_basis(u0, params)
}

pub(crate) fn random_basis<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<OrthonormalBasis<T>> {
    let g = Matrix::from_fn(n, r, |_, _| T::standard_normal(rng));
    Ok(qr_orthonormalize(&g)?.0)
}

impl<T: Scalar> TrackerState<T> {
    /// Starts from a caller-supplied basis.
    pub fn with_basis(u0: OrthonormalBasis<T>, params: &TrackerParams) -> Result<Self> {
        let (n, r) = u0.matrix().shape();
        if r != params.r {
            return Err(Error::Dimension(format!(
                "initial basis has {r} columns, params say r={}",
                params.r
            )));
        }
        params.validate(n)?;
        Ok(TrackerState {
            u: u0,
            s: Matrix::zeros(n, r),
            e: Matrix::identity(r),
            t: 0,
            last_weight: 1.0,
            last_residual: 0.0,
        })
    }

    pub fn basis(&self) -> &OrthonormalBasis<T> {
        &self.u
    }

    pub fn sketch(&self) -> &Matrix<T> {
        &self.s
    }

    pub fn rotation(&self) -> &Matrix<T> {
        &self.e
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn last_weight(&self) -> f64 {
        self.last_weight
    }

    pub fn last_residual(&self) -> f64 {
        self.last_residual
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Scalars held across steps (`U`, `S`, `E`).
    pub fn payload_len(&self) -> usize {
        self.u.matrix().as_slice().len() + self.s.as_slice().len() + self.e.as_slice().len()
    }

    /// Consumes one observation.
    pub fn step(&mut self, x: &[T], params: &TrackerParams) -> Result<StepReport> {
        let (n, r) = self.s.shape();
        if x.len() != n {
            return Err(Error::Dimension(format!(
                "sample has length {}, tracker dimension is {n}",
                x.len()
            )));
        }
        if params.r != r {
            return Err(Error::Dimension(format!(
                "params rank {} does not match state rank {r}",
                params.r
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }

        let u_prev = self.u.matrix();
        let w = u_prev.adjoint_mul_vec(x)?;
        let projected = u_prev.mul_vec(&w)?;
        let residual: Vec<T> = x.iter().zip(&projected).map(|(&a, &b)| a - b).collect();
        let residual_norm = norm(&residual);
        let weight = if params.robust {
            alpha_weight(residual_norm, params.alpha, params.p)
        } else {
            1.0
        };

        // S_t = (1 − λ) S_{t−1} E_{t−1} + λ ω x wᴴ
        let mut s = self.s.matmul(&self.e)?;
        let decay = T::from_real(1.0 - params.lambda);
        let gain = params.lambda * weight;
        for (j, wj) in w.iter().enumerate().take(r) {
            let coeff = wj.conj().scale(gain);
            for (sij, &xi) in s.col_mut(j).iter_mut().zip(x) {
                *sij = decay * *sij + xi * coeff;
            }
        }

        let thresholded = threshold_columns(&s, params.k)?;
        let (u_next, rank_deficient) = qr_orthonormalize(&thresholded)?;
        self.e = u_prev.adjoint_matmul(u_next.matrix())?;
        self.u = u_next;
        self.s = s;
        self.t += 1;
        self.last_weight = weight;
        self.last_residual = residual_norm;

        Ok(StepReport {
            weight,
            residual_norm,
            rank_deficient,
        })
    }
}

/// Batch block power iteration `U ← Q(C U)` from a seeded random start.
pub fn batch_power_iteration<T: Scalar>(
    c: &Matrix<T>,
    r: usize,
    iterations: usize,
    seed: u64,
) -> Result<OrthonormalBasis<T>> {
    let (n, cols) = c.shape();
    if n != cols || r < 1 || r > n {
        return Err(Error::Dimension(format!(
            "power iteration needs square C and 1 <= r <= n, got {n}x{cols}, r={r}"
        )));
    }
    let mut u = random_basis(n, r, &mut seeded_rng(seed))?;
    for _ in 0..iterations {
        u = qr_orthonormalize(&c.matmul(u.matrix())?)?.0;
    }
    Ok(u)
}
