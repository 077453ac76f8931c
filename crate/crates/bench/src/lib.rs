//! Fixtures shared by the benchmarks.

use sst_core::streams::{EpsilonSchedule, NoiseSpec, StreamConfig, StreamProcess};
use sst_core::tracker::{default_threshold_k, init_tracker, TrackerParams};
use sst_core::TrackerState;

/// A warmed-up tracker plus a batch of fresh samples from the same stream.
pub struct StepFixture {
    pub tracker: TrackerState<f64>,
    pub params: TrackerParams,
    pub samples: Vec<Vec<f64>>,
}

/// Gaussian-noise sparse stream of dimension `n`, rank `r`, sparsity 0.8.
/// The tracker is run for `warmup` steps before `samples` are drawn.
pub fn step_fixture(
    n: usize,
    r: usize,
    warmup: usize,
    samples: usize,
    robust: bool,
) -> StepFixture {
    let mut stream = StreamProcess::new(
        StreamConfig {
            n,
            r,
            sparsity: 0.8,
            epsilon: EpsilonSchedule::Constant(1e-2),
            noise: NoiseSpec::gaussian(0.1),
            change_points: vec![],
        },
        1,
    )
    .expect("valid stream config");
    let params = TrackerParams {
        r,
        lambda: 0.015,
        alpha: 0.9,
        p: 2.0,
        k: default_threshold_k(n, r, Some(0.8)),
        robust,
    };
    let mut tracker = init_tracker(n, &params, 2).expect("valid tracker params");
    for _ in 0..warmup {
        let x = stream.next_sample().expect("sample").x;
        tracker.step(&x, &params).expect("step");
    }
    let samples = (0..samples)
        .map(|_| stream.next_sample().expect("sample").x)
        .collect();
    StepFixture {
        tracker,
        params,
        samples,
    }
}
