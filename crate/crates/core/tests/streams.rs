use rand::Rng;
use sst_core::numerics::{least_squares_solve, qr_orthonormalize};
use sst_core::streams::{
    cauchy_quantile, init_sparse_subspace, laplace_quantile, sample_noise, sample_noise_tagged,
    seeded_rng, EpsilonSchedule, NoiseKind, NoiseSpec, StreamConfig, StreamProcess,
};
use sst_core::{sep, Matrix};

const DRAWS: usize = 1_000_000;

fn config(n: usize, r: usize, sparsity: f64, eps: f64, noise: NoiseSpec) -> StreamConfig {
    StreamConfig {
        n,
        r,
        sparsity,
        epsilon: EpsilonSchedule::Constant(eps),
        noise,
        change_points: vec![],
    }
}

/// Heavy-branch draws only, from a mixture with the heavy fraction at one half.
fn heavy_draws(kind: NoiseKind, mu: f64, gamma: f64) -> Vec<f64> {
    let spec = NoiseSpec {
        kind,
        delta: 0.5,
        mu,
        gamma,
        sigma_n: 0.1,
    };
    let d = sample_noise_tagged(&spec, 2 * DRAWS, &mut seeded_rng(77));
    d.values
        .into_iter()
        .zip(d.heavy)
        .filter_map(|(v, h)| h.then_some(v))
        .collect()
}

#[test]
fn gaussian_variance_matches_sigma() {
    let sigma = 0.3;
    let v = sample_noise(&NoiseSpec::gaussian(sigma), DRAWS, &mut seeded_rng(5));
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "variance {var}");
}

#[test]
fn laplace_mean_and_mean_absolute_deviation() {
    let (mu, gamma) = (0.7, 1.3);
    let v = heavy_draws(NoiseKind::LaplaceMix, mu, gamma);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mad = v.iter().map(|x| (x - mu).abs()).sum::<f64>() / n;
    // Var X = 2γ², Var |X − μ| = γ²
    assert!(
        (mean - mu).abs() < 3.0 * (2.0f64).sqrt() * gamma / n.sqrt(),
        "mean {mean}"
    );
    assert!((mad - gamma).abs() < 3.0 * gamma / n.sqrt(), "mad {mad}");
}

#[test]
fn cauchy_median_and_interquartile_half_range() {
    let (mu, gamma) = (-0.4, 2.0);
    let mut v = heavy_draws(NoiseKind::CauchyMix, mu, gamma);
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let q = |p: f64| v[(p * (n - 1.0)).round() as usize];
    let med = q(0.5);
    let half_iqr = 0.5 * (q(0.75) - q(0.25));
    // asymptotic sd of sample quantile: sqrt(p(1−p)) / (f(x_p) √n)
    let sd_median = std::f64::consts::PI * gamma / (2.0 * n.sqrt());
    let sd_quartile = (3.0f64 / 16.0).sqrt() * 2.0 * std::f64::consts::PI * gamma / n.sqrt();
    assert!((med - mu).abs() < 3.0 * sd_median, "median {med}");
    assert!(
        (half_iqr - gamma).abs() < 3.0 * sd_quartile,
        "half IQR {half_iqr}"
    );
}

#[test]
fn combined_mixture_draws_both_tails() {
    let spec = NoiseSpec {
        kind: NoiseKind::LaplaceCauchyMix,
        delta: 0.2,
        ..NoiseSpec::default()
    };
    let d = sample_noise_tagged(&spec, 200_000, &mut seeded_rng(1));
    let frac = d.heavy.iter().filter(|&&h| h).count() as f64 / 200_000.0;
    assert!((frac - 0.2).abs() < 0.005, "heavy fraction {frac}");
}

#[test]
fn quantile_fixtures() {
    assert_eq!(cauchy_quantile(0.5, 1.5, 2.0), 1.5);
    assert!((cauchy_quantile(0.75, 1.5, 2.0) - 3.5).abs() < 1e-12);
    assert_eq!(laplace_quantile(0.5, -1.0, 3.0), -1.0);
    // Laplace CDF at μ + γ ln 2 is 3/4
    assert!((laplace_quantile(0.75, 0.0, 1.0) - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn increment_variance_on_support_is_epsilon_squared() {
    let eps = 1e-2;
    let mut p = StreamProcess::new(config(20, 2, 0.5, eps, NoiseSpec::default()), 8).unwrap();
    let mut incs = Vec::new();
    for _ in 0..1000 {
        let before = p.basis().clone();
        p.evolve_subspace().unwrap();
        for ((a, b), &m) in p
            .basis()
            .as_slice()
            .iter()
            .zip(before.as_slice())
            .zip(p.mask().as_slice())
        {
            if m != 0.0 {
                incs.push(a - b);
            } else {
                assert_eq!(*a, 0.0);
            }
        }
    }
    let n = incs.len() as f64;
    let var = incs.iter().map(|d| d * d).sum::<f64>() / n;
    let sd = eps * eps * (2.0 / n).sqrt();
    assert!((var - eps * eps).abs() < 3.0 * sd, "variance {var}");
}

#[test]
fn drift_grows_distance_from_start() {
    let mut p = StreamProcess::new(config(40, 3, 0.5, 1e-2, NoiseSpec::default()), 2).unwrap();
    let a0 = p.basis().clone();
    let mut last = 0.0;
    for step in 1..=100 {
        p.evolve_subspace().unwrap();
        if step % 25 == 0 {
            let d = p.basis().sub(&a0).unwrap().frobenius_norm();
            assert!(d > last);
            last = d;
        }
    }
}

#[test]
fn noiseless_samples_lie_in_the_true_span() {
    let mut p = StreamProcess::new(config(30, 3, 0.6, 1e-2, NoiseSpec::gaussian(0.0)), 4).unwrap();
    for _ in 0..50 {
        let s = p.next_sample().unwrap();
        let x = Matrix::from_column(&s.x);
        let coef = least_squares_solve(&s.a_true, &x).unwrap();
        let resid = x
            .sub(&s.a_true.matmul(&coef).unwrap())
            .unwrap()
            .frobenius_norm();
        assert!(resid < 1e-10, "residual {resid}");
    }
}

#[test]
fn samples_are_consistent_and_support_exact() {
    let mut p = StreamProcess::new(
        StreamConfig {
            change_points: vec![20],
            ..config(50, 2, 0.8, 1e-2, NoiseSpec::default())
        },
        6,
    )
    .unwrap();
    for _ in 0..40 {
        let s = p.next_sample().unwrap();
        for i in 0..s.x.len() {
            assert_eq!(s.x[i] - (s.ell[i] + s.nu[i]), 0.0);
        }
        assert_eq!(&s.a_true.hadamard(p.mask()).unwrap(), &s.a_true);
    }
}

#[test]
fn seeded_streams_repeat() {
    let cfg = config(25, 2, 0.5, 1e-2, NoiseSpec::default());
    let mut a = StreamProcess::new(cfg.clone(), 13).unwrap();
    let mut b = StreamProcess::new(cfg, 13).unwrap();
    for _ in 0..30 {
        let (sa, sb) = (a.next_sample().unwrap(), b.next_sample().unwrap());
        assert_eq!(sa.x, sb.x);
        assert_eq!(sa.a_true, sb.a_true);
    }
    assert_eq!(
        init_sparse_subspace(10, 2, 0.5, 9).unwrap(),
        init_sparse_subspace(10, 2, 0.5, 9).unwrap()
    );
}

#[test]
fn two_abrupt_changes_are_the_only_large_jumps() {
    let cfg = StreamConfig {
        change_points: vec![1000, 1500],
        ..config(200, 5, 0.8, 1e-2, NoiseSpec::default())
    };
    let mut p = StreamProcess::new(cfg, 1).unwrap();
    let mut prev = qr_orthonormalize(p.basis()).unwrap().0;
    let mut jumps = Vec::new();
    for _ in 0..2000 {
        p.evolve_subspace().unwrap();
        let cur = qr_orthonormalize(p.basis()).unwrap().0;
        let s = sep(&cur, &prev).unwrap();
        if s.value().is_none_or(|v| v > 0.1) {
            jumps.push(p.time());
        }
        prev = cur;
    }
    assert_eq!(jumps, vec![1000, 1500]);
}

#[test]
fn column_support_counts_follow_sparsity() {
    let (a, mask) = init_sparse_subspace(200, 5, 0.8, 21).unwrap();
    for j in 0..5 {
        assert_eq!(mask.col(j).iter().filter(|&&m| m == 1.0).count(), 40);
        assert!(a
            .col(j)
            .iter()
            .zip(mask.col(j))
            .all(|(&v, &m)| m == 1.0 || v == 0.0));
    }
    let mut rng = seeded_rng(0);
    let seed: u64 = rng.random();
    let (_, dense_mask) = init_sparse_subspace(12, 3, 0.0, seed).unwrap();
    assert!(dense_mask.as_slice().iter().all(|&m| m == 1.0));
}
