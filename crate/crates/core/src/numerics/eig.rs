//! Eigenvalues of small dense complex matrices: Householder reduction to
//! upper Hessenberg form followed by Wilkinson-shifted QR sweeps with
//! Givens rotations and deflation.

use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: usize = 64;

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of the square matrix `p`, counted with multiplicity, in
/// the order they deflate (bottom of the Hessenberg form first).
pub fn small_eigenvalues(p: &Matrix<Complex64>) -> Result<Vec<Complex64>> {
    let (n, cols) = p.shape();
    if n != cols {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {n}x{cols}"
        )));
    }
    if n > MAX_ORDER {
        return Err(Error::Dimension(format!(
            "order {n} exceeds small-eigensolver limit {MAX_ORDER}"
        )));
    }
    p.check_finite()?;

    let mut h = p.clone();
    reduce_to_hessenberg(&mut h);

    let budget = SWEEPS_PER_EIGENVALUE * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut eigenvalues = Vec::with_capacity(n);
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eigenvalues.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigenvalues.push(h[(hi, hi)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > budget {
            return Err(Error::NoConvergence { iterations: budget });
        }
        since_deflation += 1;
        let shift = if since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, lo, hi, shift);
    }

    Ok(eigenvalues)
}

fn reduce_to_hessenberg(h: &mut Matrix<Complex64>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;

        // rows k+1.. from the left: H -= beta v (vᴴ H)
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(l, vl)| vl.conj() * h[(k + 1 + l, j)])
                .sum();
            let s = s * beta;
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= vl * s;
            }
        }
        // columns k+1.. from the right: H -= beta (H v) vᴴ
        for i in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(l, vl)| h[(i, k + 1 + l)] * vl)
                .sum();
            let s = s * beta;
            for (l, vl) in v.iter().enumerate() {
                h[(i, k + 1 + l)] -= s * vl.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step `H ← RQ + μI` on the window `lo..=hi`.
fn qr_sweep(h: &mut Matrix<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let top = h[(k, j)];
            let bot = h[(k + 1, j)];
            h[(k, j)] = top * c + s * bot;
            h[(k + 1, j)] = -s.conj() * top + bot * c;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        let last_row = (k + 2).min(hi);
        for i in lo..=last_row {
            let left = h[(i, k)];
            let right = h[(i, k + 1)];
            h[(i, k)] = left * c + right * s.conj();
            h[(i, k + 1)] = -left * s + right * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Rotation `[[c, s], [-s̄, c]]` (c real) mapping `(a, b)` to `(ρ, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let rho = an.hypot(bn);
    let phase = a / an;
    (an / rho, phase * b.conj() / rho)
}
