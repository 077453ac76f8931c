//! Thin QR factorization by twice-iterated modified Gram–Schmidt.
//!
//! Columns whose norm after deflation falls below `RANK_TOL` times the
//! largest input column norm are treated as dependent and replaced with
//! canonical basis vectors not already spanned, so the returned factor
//! always has orthonormal columns and seeded runs stay reproducible.
//!
//! Zero rows of the input stay exactly zero in `Q`: spanned columns are
//! combinations of input columns, and completion draws from the input's
//! nonzero rows first. Only when those rows are exhausted (fewer nonzero
//! rows than columns) does a completion vector leave the support.

use super::matrix::{dot, norm};
use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Relative cutoff below which a deflated column counts as dependent.
pub const RANK_TOL: f64 = 1e-12;

/// Tolerance on `‖UᴴU − I‖_F` for a matrix to count as orthonormal.
pub const ORTHO_TOL: f64 = 1e-10;

/// Smallest orthogonal residual accepted for a completion candidate.
const COMPLETION_FLOOR: f64 = 1e-8;

/// An `n × r` matrix with orthonormal columns (`n ≥ r`).
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis<T>(Matrix<T>);

impl<T: Scalar> OrthonormalBasis<T> {
    /// Wraps `m` after checking `‖mᴴm − I‖_F ≤ ORTHO_TOL`.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if m.rows() < m.cols() {
            return Err(Error::Dimension(format!(
                "basis with {} rows cannot hold {} orthonormal columns",
                m.rows(),
                m.cols()
            )));
        }
        let err = m.orthonormality_error();
        if err > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "columns are not orthonormal (error {err:.3e})"
            )));
        }
        Ok(OrthonormalBasis(m))
    }

    /// The leading `r` canonical basis vectors of dimension `n`.
    pub fn canonical(n: usize, r: usize) -> Self {
        assert!(n >= r && r >= 1);
        OrthonormalBasis(Matrix::eye(n, r))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.0.cols()
    }

    /// Right-multiplies by a unitary `r × r` matrix. The span is unchanged.
    pub fn rotate(&self, unitary: &Matrix<T>) -> Result<Self> {
        OrthonormalBasis::new(self.0.matmul(unitary)?)
    }
}

impl<T> AsRef<Matrix<T>> for OrthonormalBasis<T> {
    fn as_ref(&self) -> &Matrix<T> {
        &self.0
    }
}

/// Full output of the thin factorization `M = Q R`.
#[derive(Clone, Debug)]
pub(crate) struct ThinQr<T> {
    pub q: Matrix<T>,
    /// Upper triangular `r × r` factor; zero diagonal on deficient columns.
    pub r: Matrix<T>,
    pub deficient: Vec<usize>,
}

pub(crate) fn thin_qr<T: Scalar>(m: &Matrix<T>) -> Result<ThinQr<T>> {
    let (n, cols) = m.shape();
    if cols > n {
        return Err(Error::Dimension(format!(
            "QR needs rows >= cols, got {n}x{cols}"
        )));
    }
    m.check_finite()?;

    let max_norm = (0..cols).map(|j| norm(m.col(j))).fold(0.0, f64::max);
    let cutoff = RANK_TOL * max_norm;

    let mut q = Matrix::zeros(n, cols);
    let mut r = Matrix::zeros(cols, cols);
    let mut deficient = Vec::new();
    let support: Vec<bool> = (0..n).map(|i| !m.is_row_zero(i)).collect();
    let mut v = vec![T::ZERO; n];

    for j in 0..cols {
        v.copy_from_slice(m.col(j));
        for _ in 0..2 {
            for i in 0..j {
                let coeff = dot(q.col(i), &v);
                r[(i, j)] += coeff;
                axpy_neg(coeff, q.col(i), &mut v);
            }
        }
        let len = norm(&v);
        if len > cutoff && len > 0.0 {
            r[(j, j)] = T::from_real(len);
            for (dst, &x) in q.col_mut(j).iter_mut().zip(&v) {
                *dst = x.scale(1.0 / len);
            }
        } else {
            deficient.push(j);
            let dir = completion_direction(&q, j, &support);
            q.col_mut(j).copy_from_slice(&dir);
        }
    }

    Ok(ThinQr { q, r, deficient })
}

/// Normalized component of a canonical vector orthogonal to `q[:, ..j]`.
/// Rows in `support` are tried first (ascending), so a completed basis stays
/// inside the input's row support whenever that support still has room;
/// other rows are used only after that. Within each group the first
/// candidate with orthogonal residual above one half wins, else the best.
fn completion_direction<T: Scalar>(q: &Matrix<T>, j: usize, support: &[bool]) -> Vec<T> {
    let n = q.rows();
    let residual = |c: usize| {
        let mut v = vec![T::ZERO; n];
        v[c] = T::ONE;
        for _ in 0..2 {
            for i in 0..j {
                let coeff = dot(q.col(i), &v);
                axpy_neg(coeff, q.col(i), &mut v);
            }
        }
        let len = norm(&v);
        (len, v)
    };
    let mut fallback: Option<(f64, Vec<T>)> = None;
    for inside in [true, false] {
        let mut best: Option<(f64, Vec<T>)> = None;
        for c in (0..n).filter(|&c| support[c] == inside) {
            let (len, v) = residual(c);
            if len > 0.5 {
                return v.into_iter().map(|x| x.scale(1.0 / len)).collect();
            }
            if best.as_ref().is_none_or(|(l, _)| len > *l) {
                best = Some((len, v));
            }
        }
        if let Some((len, v)) = best {
            if len > COMPLETION_FLOOR {
                return v.into_iter().map(|x| x.scale(1.0 / len)).collect();
            }
            if fallback.as_ref().is_none_or(|(l, _)| len > *l) {
                fallback = Some((len, v));
            }
        }
    }
    let (len, v) = fallback.expect("n >= 1");
    v.into_iter().map(|x| x.scale(1.0 / len)).collect()
}

#[inline]
fn axpy_neg<T: Scalar>(coeff: T, x: &[T], y: &mut [T]) {
    if coeff == T::ZERO {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi -= coeff * xi;
    }
}

/// Orthonormalizes the columns of `m` (`n ≥ r`), returning the Q factor and
/// whether any column had to be completed.
pub fn qr_orthonormalize<T: Scalar>(m: &Matrix<T>) -> Result<(OrthonormalBasis<T>, bool)> {
    let ThinQr { q, deficient, .. } = thin_qr(m)?;
    Ok((OrthonormalBasis(q), !deficient.is_empty()))
}
