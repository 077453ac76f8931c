//! CSV traces and JSON run metadata.
//!
//! Floats are written with seventeen significant digits (`{:.16e}`),
//! divergent SEP values as `inf`, and lines end in LF, so a rerun with
//! timing disabled reproduces every file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{DoaRun, ExperimentResults, RunTrace, SubspaceRun};
use crate::error::{Error, Result};
use crate::metrics::TraceSummary;

pub const SUBSPACE_HEADER: &str = "t,sep,weight,step_time_ns";
pub const DOA_HEADER: &str = "t,track,theta_est_deg,theta_true_deg,abs_err_deg";
pub const METADATA_FILE: &str = "metadata.json";

/// Trace file name for one run.
pub fn trace_file_name(algorithm: &str, seed: u64) -> String {
    format!("{algorithm}_seed{seed}.csv")
}

/// Subspace trace as CSV, keeping rows with `t % stride == 0`.
pub fn subspace_csv(run: &SubspaceRun, stride: usize) -> String {
    let mut out = String::with_capacity(64 * run.trace.len() / stride.max(1) + 32);
    out.push_str(SUBSPACE_HEADER);
    out.push('\n');
    for rec in run.trace.records().iter().filter(|r| r.t % stride == 0) {
        writeln!(
            out,
            "{},{},{:.16e},{}",
            rec.t, rec.sep, rec.weight, rec.step_time_ns
        )
        .expect("writing to a String");
    }
    out
}

/// DOA trace as CSV: one row per source and kept step. `track` is the
/// source index; the estimate is the one assigned to that source.
pub fn doa_csv(run: &DoaRun, stride: usize) -> Result<String> {
    let mut out = String::new();
    out.push_str(DOA_HEADER);
    out.push('\n');
    for est in run.estimates.iter().filter(|e| e.t % stride == 0) {
        let assigned = est.per_source()?;
        for (k, (&e, &truth)) in assigned.iter().zip(&est.truth).enumerate() {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e}",
                est.t,
                k,
                e,
                truth,
                (e - truth).abs()
            )
            .expect("writing to a String");
        }
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RunSummary<'a> {
    Subspace {
        #[serde(flatten)]
        summary: &'a TraceSummary,
        support_violations: usize,
        rank_deficient_steps: usize,
    },
    Doa {
        median_abs_err_deg: &'a [f64],
        clipped_steps: usize,
    },
}

#[derive(Serialize)]
struct RunMeta<'a> {
    algorithm: &'static str,
    file: String,
    summary: RunSummary<'a>,
}

#[derive(Serialize)]
struct SeedMeta<'a> {
    seed: u64,
    stream_digest: &'a str,
    runs: Vec<RunMeta<'a>>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    library: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    config_digest: &'a str,
    stride: usize,
    seeds: Vec<SeedMeta<'a>>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes one CSV per (algorithm, seed) and `metadata.json` into `dir`.
/// Returns the paths written.
pub fn write_outputs(
    results: &ExperimentResults,
    dir: &Path,
    stride: usize,
) -> Result<Vec<PathBuf>> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut seeds = Vec::with_capacity(results.seeds.len());
    for seed in &results.seeds {
        let mut runs = Vec::with_capacity(seed.runs.len());
        for run in &seed.runs {
            let file = trace_file_name(run.algorithm.label(), seed.seed);
            let (csv, summary) = match &run.trace {
                RunTrace::Subspace(sr) => (
                    subspace_csv(sr, stride),
                    RunSummary::Subspace {
                        summary: &sr.summary,
                        support_violations: sr.support_violations,
                        rank_deficient_steps: sr.rank_deficient_steps,
                    },
                ),
                RunTrace::Doa(dr) => (
                    doa_csv(dr, stride)?,
                    RunSummary::Doa {
                        median_abs_err_deg: &dr.median_abs_err_deg,
                        clipped_steps: dr.clipped_steps,
                    },
                ),
            };
            let path = dir.join(&file);
            write_file(&path, &csv)?;
            written.push(path);
            runs.push(RunMeta {
                algorithm: run.algorithm.label(),
                file,
                summary,
            });
        }
        seeds.push(SeedMeta {
            seed: seed.seed,
            stream_digest: &seed.stream_digest,
            runs,
        });
    }
    let meta = Metadata {
        library: "sst-core",
        version: crate::VERSION,
        config: &results.config,
        config_digest: &results.config_digest,
        stride,
        seeds,
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');
    let path = dir.join(METADATA_FILE);
    write_file(&path, &json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{load_config_str, run_experiment};

    #[test]
    fn files_and_headers() {
        let cfg = load_config_str(
            r#"{"experiment": "subspace_tracking", "n": 20, "r": 2, "T": 40,
                "change_points": [], "burn_in": 5, "record_timing": false}"#,
        )
        .unwrap();
        let res = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = write_outputs(&res, dir.path(), 4).unwrap();
        assert_eq!(written.len(), 3);
        let csv = fs::read_to_string(dir.path().join("alpha_opit_seed1.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SUBSPACE_HEADER);
        assert_eq!(lines.len(), 11);
        assert!(lines[1].starts_with("4,"));
        assert!(!csv.contains('\r'));
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(METADATA_FILE)).unwrap())
                .unwrap();
        assert_eq!(meta["config"]["n"], 20);
        assert_eq!(meta["stride"], 4);
        assert_eq!(meta["seeds"][0]["runs"][1]["algorithm"], "opit");
        assert_eq!(meta["seeds"][0]["runs"][0]["summary"]["kind"], "subspace");
    }

    #[test]
    fn doa_rows_per_source() {
        let cfg = load_config_str(
            r#"{"experiment": "doa_tracking", "T": 20, "burn_in": 2,
                "algorithms": ["opit"], "record_timing": false}"#,
        )
        .unwrap();
        let res = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&res, dir.path(), 1).unwrap();
        let csv = fs::read_to_string(dir.path().join("opit_seed1.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DOA_HEADER);
        assert_eq!(lines.len(), 1 + 20 * 3);
        assert!(lines[1].starts_with("1,0,"));
        assert!(lines[3].starts_with("1,2,"));
    }

    #[test]
    fn zero_stride_is_rejected() {
        let cfg = load_config_str(r#"{"experiment": "subspace_tracking", "n": 10, "r": 1, "T": 5, "change_points": [], "burn_in": 0}"#).unwrap();
        let res = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(write_outputs(&res, dir.path(), 0).is_err());
    }
}
