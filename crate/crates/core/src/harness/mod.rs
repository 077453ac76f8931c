//! Experiment configuration, orchestration and artifact output.

mod config;
mod experiment;
mod output;

pub use config::{
    load_config, load_config_str, Algorithm, ExperimentConfig, ExperimentKind, DEFAULT_LAMBDA_DOA,
    DEFAULT_LAMBDA_SUBSPACE,
};
pub use experiment::{
    doa_median_errors, generate_doa_stream, generate_subspace_stream, init_seed, run_experiment,
    stream_digest, support_contained, DigestBytes, DoaRun, DoaStream, ExperimentResults,
    RunOutcome, RunTrace, SeedOutcome, SubspaceRun, SubspaceStream,
};
pub use output::{
    doa_csv, subspace_csv, trace_file_name, write_outputs, DOA_HEADER, METADATA_FILE,
    SUBSPACE_HEADER,
};
