//! Test-side reference implementations, written independently of the
//! library numerics (plain `Vec<Vec<f64>>`, textbook algorithms).

#![allow(dead_code)]

use num_complex::Complex64;
use sst_core::Matrix;

pub type Dense = Vec<Vec<f64>>;

/// Row-major copy of a real library matrix.
pub fn dense(m: &Matrix<f64>) -> Dense {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix. Returns
/// eigenvalues ascending and the matching eigenvectors as columns.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (ap, aq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * ap[k] - s * aq[k];
                    a[q][k] = s * ap[k] + c * aq[k];
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = v
        .iter()
        .map(|row| order.iter().map(|&i| row[i]).collect())
        .collect();
    (vals, vecs)
}

pub fn jacobi_eigenvalues(a: &Dense) -> Vec<f64> {
    jacobi_eigen(a).0
}

/// Columns `from..to` of a row-major matrix.
pub fn columns(a: &Dense, from: usize, to: usize) -> Dense {
    a.iter().map(|row| row[from..to].to_vec()).collect()
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal real bases, via `sin²θ_max = λ_max(Rᵀ R)`, `R = U − V Vᵀ U`.
pub fn max_principal_angle(u: &Dense, v: &Dense) -> f64 {
    let g = mul(&transpose(v), u);
    let proj = mul(v, &g);
    let resid: Dense = u
        .iter()
        .zip(&proj)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    let rtr = mul(&transpose(&resid), &resid);
    let s2 = jacobi_eigenvalues(&rtr)
        .last()
        .copied()
        .unwrap()
        .clamp(0.0, 1.0);
    s2.sqrt().asin()
}

/// Classical Gram–Schmidt on the columns of a row-major matrix.
pub fn classical_gram_schmidt(a: &Dense) -> Dense {
    let cols = transpose(a);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for qi in &q {
            let d: f64 = qi.iter().zip(&c).map(|(x, y)| x * y).sum();
            for (vi, qv) in v.iter_mut().zip(qi) {
                *vi -= d * qv;
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.push(v.iter().map(|x| x / nrm).collect());
    }
    transpose(&q)
}

/// Steering column `[e^{jπ m sin θ}]` for `m = 0..n`, computed directly.
pub fn steering(angle_deg: f64, n: usize) -> Vec<Complex64> {
    let w = std::f64::consts::PI * angle_deg.to_radians().sin();
    (0..n)
        .map(|m| Complex64::from_polar(1.0, w * m as f64))
        .collect()
}

pub fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Characteristic polynomial coefficients `[1, c1, …, cn]` of a complex
/// matrix by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut m = vec![vec![zero; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let prev = m.clone();
        for i in 0..n {
            for j in 0..n {
                let mut s = zero;
                for l in 0..n {
                    s += a[i][l] * prev[l][j];
                }
                m[i][j] = s + if i == j { coeffs[k - 1] } else { zero };
            }
        }
        // c_k = -tr(A M_k) / k
        let mut tr = zero;
        for i in 0..n {
            for l in 0..n {
                tr += a[i][l] * m[l][i];
            }
        }
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

/// Roots of a monic polynomial `[1, c1, …, cn]` by Durand–Kerner iteration.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Largest distance between two multisets of complex numbers under the best
/// pairing (exhaustive; intended for small sets).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn go(a: &[Complex64], b: &mut Vec<Complex64>) -> f64 {
        let Some((first, rest)) = a.split_first() else {
            return 0.0;
        };
        let mut best = f64::INFINITY;
        for i in 0..b.len() {
            let cand = b.remove(i);
            let d = (first - cand).norm().max(go(rest, b));
            b.insert(i, cand);
            best = best.min(d);
        }
        best
    }
    go(a, &mut b.to_vec())
}
