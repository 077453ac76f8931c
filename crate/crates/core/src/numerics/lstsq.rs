use super::qr::{thin_qr, RANK_TOL};
use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Solves `min ‖A X − B‖_F` for full-column-rank `A` (`m ≥ r`) through the
/// thin QR factorization `A = QR`, `X = R⁻¹ Qᴴ B`.
pub fn least_squares_solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let (m, r) = a.shape();
    if b.rows() != m {
        return Err(Error::Dimension(format!(
            "least squares: A is {m}x{r} but B has {} rows",
            b.rows()
        )));
    }
    if m < r {
        return Err(Error::Dimension(format!(
            "least squares needs m >= r, got {m}x{r}"
        )));
    }
    b.check_finite()?;
    let qr = thin_qr(a)?;

    let diag: Vec<f64> = (0..r).map(|j| qr.r[(j, j)].abs()).collect();
    let largest = diag.iter().copied().fold(0.0, f64::max);
    let rank = diag.iter().filter(|&&d| d > RANK_TOL * largest).count();
    if rank < r || largest == 0.0 {
        return Err(Error::RankDeficient { rank, required: r });
    }

    let mut x = qr.q.adjoint_matmul(b)?;
    for col in 0..x.cols() {
        let xc = x.col_mut(col);
        for i in (0..r).rev() {
            let mut acc = xc[i];
            for (j, &xj) in xc.iter().enumerate().take(r).skip(i + 1) {
                acc -= qr.r[(i, j)] * xj;
            }
            xc[i] = acc / qr.r[(i, i)];
        }
    }
    Ok(x)
}
