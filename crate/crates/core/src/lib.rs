//! Robust sparse online subspace tracking.
//!
//! The crate implements online power iteration by thresholding (OPIT) and
//! its α-divergence weighted variant, which downweights samples whose
//! residual against the current subspace estimate is large. Around the
//! trackers sit seeded generators for corrupted synthetic streams, the SEP
//! tracking metric, an ESPRIT-based direction-of-arrival pipeline and an
//! experiment harness that writes CSV/JSON artifacts.
//!
//! ```
//! use sst_core::streams::{EpsilonSchedule, NoiseSpec, StreamConfig, StreamProcess};
//! use sst_core::tracker::{default_threshold_k, init_tracker, TrackerParams};
//!
//! let (n, r) = (60, 2);
//! let mut stream = StreamProcess::new(
//!     StreamConfig {
//!         n,
//!         r,
//!         sparsity: 0.5,
//!         epsilon: EpsilonSchedule::Constant(0.0),
//!         noise: NoiseSpec::default(),
//!         change_points: vec![],
//!     },
//!     7,
//! )
//! .unwrap();
//! let params = TrackerParams {
//!     r,
//!     lambda: 0.05,
//!     alpha: 0.9,
//!     p: 2.0,
//!     k: default_threshold_k(n, r, Some(0.5)),
//!     robust: true,
//! };
//! let mut tracker = init_tracker::<f64>(n, &params, 7).unwrap();
//! for _ in 0..200 {
//!     let sample = stream.next_sample().unwrap();
//!     tracker.step(&sample.x, &params).unwrap();
//! }
//! assert!(tracker.basis().matrix().orthonormality_error() < 1e-10);
//! ```

pub mod doa;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod streams;
pub mod tracker;

pub use error::{Error, Result};
pub use metrics::{sep, Sep, SepTrace, TraceSummary};
pub use numerics::{Matrix, OrthonormalBasis, Scalar};
pub use streams::{NoiseKind, NoiseSpec, Sample, StreamProcess};
pub use tracker::{TrackerParams, TrackerState};

/// Library version recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
