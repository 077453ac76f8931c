mod common;

use common::steering;
use num_complex::Complex64;
use proptest::prelude::*;
use sst_core::doa::{
    esprit_angles, generate_doa_sample, match_tracks, steering_matrix, steering_vector,
    DoaEstimate, LabeledAngle, SteeringConfig, Trajectory,
};
use sst_core::harness::DEFAULT_LAMBDA_DOA;
use sst_core::numerics::{qr_orthonormalize, Matrix};
use sst_core::streams::seeded_rng;
use sst_core::tracker::{init_tracker, TrackerParams};
use sst_core::{OrthonormalBasis, Scalar};

fn fixed(angles: &[f64]) -> Vec<Trajectory> {
    angles
        .iter()
        .map(|&start| Trajectory::Linear { start, slope: 0.0 })
        .collect()
}

fn exact_basis(angles: &[f64], n: usize) -> OrthonormalBasis<Complex64> {
    qr_orthonormalize(&steering_matrix(angles, n).unwrap())
        .unwrap()
        .0
}

fn max_error(est: &[f64], truth: &[f64]) -> f64 {
    let mut t = truth.to_vec();
    t.sort_by(f64::total_cmp);
    est.iter()
        .zip(&t)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn steering_matches_direct_formula() {
    for &angle in &[-63.0, -10.5, 0.0, 30.0, 71.2] {
        let got = steering_vector(angle, 9).unwrap();
        for (g, e) in got.iter().zip(steering(angle, 9)) {
            assert!((g - e).norm() < 1e-14);
        }
    }
    let v = steering_vector(30.0, 3).unwrap();
    let expected = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
    ];
    for (g, e) in v.iter().zip(expected) {
        assert!((g - e).norm() < 1e-15);
    }
    assert!(steering_vector(0.0, 4)
        .unwrap()
        .iter()
        .all(|z| *z == Complex64::new(1.0, 0.0)));
}

#[test]
fn esprit_recovers_exact_subspaces() {
    for angles in [vec![10.0], vec![-20.0, 35.0], vec![-50.0, -5.0, 12.0, 60.0]] {
        let est = esprit_angles(&exact_basis(&angles, 20)).unwrap();
        assert!(!est.clipped);
        assert!(
            max_error(&est.angles_deg, &angles) < 1e-6,
            "{angles:?}: {:?}",
            est.angles_deg
        );
    }
}

#[test]
fn esprit_depends_only_on_the_span() {
    let u = exact_basis(&[-20.0, 35.0], 20);
    let mut rng = seeded_rng(4);
    let q = qr_orthonormalize(&Matrix::from_fn(2, 2, |_, _| {
        Complex64::standard_normal(&mut rng)
    }))
    .unwrap()
    .0;
    let a = esprit_angles(&u).unwrap().angles_deg;
    let b = esprit_angles(&u.rotate(q.matrix()).unwrap())
        .unwrap()
        .angles_deg;
    assert!(max_error(&a, &b) < 1e-8);
}

#[test]
fn noiseless_single_source_samples_are_multiples_of_the_steering_vector() {
    let cfg = SteeringConfig {
        n: 8,
        trajectories: fixed(&[25.0]),
        noise: None,
    };
    let a = steering(25.0, 8);
    let mut rng = seeded_rng(3);
    for t in 1..=20 {
        let x = generate_doa_sample(&cfg, t, &mut rng).unwrap();
        let coef: Complex64 = a
            .iter()
            .zip(&x)
            .map(|(ai, xi)| ai.conj() * xi)
            .sum::<Complex64>()
            / 8.0;
        let resid: f64 = x
            .iter()
            .zip(&a)
            .map(|(xi, ai)| (xi - coef * ai).norm_sqr())
            .sum();
        assert!(resid.sqrt() < 1e-10);
    }
}

#[test]
fn signal_power_matches_source_count() {
    // E‖A s‖² = tr(AᴴA) = nK for unit-variance sources
    let (n, k, draws) = (6, 3, 100_000);
    let cfg = SteeringConfig {
        n,
        trajectories: fixed(&[-30.0, 5.0, 40.0]),
        noise: None,
    };
    let mut rng = seeded_rng(10);
    let total: f64 = (0..draws)
        .map(|_| {
            generate_doa_sample(&cfg, 1, &mut rng)
                .unwrap()
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    let per_source = total / (draws * n) as f64;
    assert!((per_source / k as f64 - 1.0).abs() < 0.02, "{per_source}");
}

#[test]
fn seeded_samples_repeat() {
    let cfg = SteeringConfig {
        n: 10,
        trajectories: Trajectory::defaults(),
        noise: Some(Default::default()),
    };
    let (mut a, mut b) = (seeded_rng(1), seeded_rng(1));
    for t in 1..10 {
        assert_eq!(
            generate_doa_sample(&cfg, t, &mut a).unwrap(),
            generate_doa_sample(&cfg, t, &mut b).unwrap()
        );
    }
}

#[test]
fn streaming_tracker_locks_onto_static_sources() {
    let truth = [-25.0, 10.0, 40.0];
    let n = 20;
    let cfg = SteeringConfig {
        n,
        trajectories: fixed(&truth),
        noise: None,
    };
    let p = TrackerParams {
        r: 3,
        lambda: DEFAULT_LAMBDA_DOA,
        alpha: 0.9,
        p: 2.0,
        k: n,
        robust: true,
    };
    let mut st = init_tracker::<Complex64>(n, &p, 8).unwrap();
    let mut rng = seeded_rng(8);
    for t in 1..=100 {
        st.step(&generate_doa_sample(&cfg, t, &mut rng).unwrap(), &p)
            .unwrap();
    }
    let est = esprit_angles(st.basis()).unwrap().angles_deg;
    assert!(max_error(&est, &truth) < 0.1, "{est:?}");
}

#[test]
fn track_association_fixtures() {
    let prev = |pairs: &[(f64, usize)]| -> Vec<LabeledAngle> {
        pairs
            .iter()
            .map(|&(angle_deg, label)| LabeledAngle { label, angle_deg })
            .collect()
    };
    let out = match_tracks(&prev(&[(10.0, 0), (50.0, 1)]), &[49.0, 11.0]).unwrap();
    assert_eq!(out, prev(&[(11.0, 0), (49.0, 1)]));
    let same = prev(&[(1.0, 4), (2.0, 7)]);
    assert_eq!(match_tracks(&same, &[1.0, 2.0]).unwrap(), same);
    let out = match_tracks(&prev(&[(29.0, 0), (31.0, 1)]), &[30.5, 29.5]).unwrap();
    assert_eq!(out, prev(&[(29.5, 0), (30.5, 1)]));
}

#[test]
fn per_source_errors_pick_the_best_assignment() {
    let est = DoaEstimate {
        t: 5,
        angles: vec![
            LabeledAngle {
                label: 0,
                angle_deg: 30.2,
            },
            LabeledAngle {
                label: 1,
                angle_deg: -9.9,
            },
        ],
        truth: vec![-10.0, 30.0],
    };
    let errs = est.abs_errors().unwrap();
    assert!((errs[0] - 0.1).abs() < 1e-12 && (errs[1] - 0.2).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_entries_have_unit_modulus(angle in -89.0f64..89.0, n in 1usize..40) {
        let v = steering_vector(angle, n).unwrap();
        prop_assert_eq!(v[0], Complex64::new(1.0, 0.0));
        for z in v {
            prop_assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn esprit_inverts_steering(a in -70.0f64..-5.0, b in 5.0f64..70.0) {
        let est = esprit_angles(&exact_basis(&[a, b], 16)).unwrap();
        prop_assert!(max_error(&est.angles_deg, &[a, b]) < 1e-6);
    }
}
