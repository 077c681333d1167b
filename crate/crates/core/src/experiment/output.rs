//! CSV and JSON result files, plus the optional per-job raw dump.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{ExperimentError, ExperimentResult, RepetitionRun};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ExperimentError::InvalidSpec(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    policy: &'a str,
    shape: Option<f64>,
    sigma: f64,
    load: Option<f64>,
    timeshape: Option<f64>,
    njobs: usize,
    reps: usize,
    mst_mean: f64,
    mst_std: f64,
    mst_vs_ps: f64,
    mst_vs_srpt: f64,
    slowdown_p50: f64,
    slowdown_p90: f64,
    slowdown_p99: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn encode<E: std::fmt::Display>(e: E) -> ExperimentError {
    ExperimentError::Encode(e.to_string())
}

pub fn results_to_csv(results: &[ExperimentResult]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(CsvRow {
            policy: r.policy.name(),
            shape: r.params.shape,
            sigma: r.params.sigma,
            load: r.params.load,
            timeshape: r.params.timeshape,
            njobs: r.params.njobs,
            reps: r.repetitions,
            mst_mean: r.mst_mean,
            mst_std: r.mst_std,
            mst_vs_ps: r.mst_vs_ps,
            mst_vs_srpt: r.mst_vs_srpt,
            slowdown_p50: r.slowdown_p50,
            slowdown_p90: r.slowdown_p90,
            slowdown_p99: r.slowdown_p99,
        })
        .map_err(encode)?;
    }
    String::from_utf8(w.into_inner().map_err(encode)?).map_err(encode)
}

pub fn results_to_json(results: &[ExperimentResult]) -> Result<String, ExperimentError> {
    serde_json::to_string_pretty(results).map_err(encode)
}

pub fn parse_results_json(text: &str) -> Result<Vec<ExperimentResult>, ExperimentError> {
    serde_json::from_str(text).map_err(encode)
}

/// Writes `results` to `path`, replacing any previous content.
pub fn emit_results(results: &[ExperimentResult], format: Format, path: &Path) -> Result<(), ExperimentError> {
    if results.is_empty() {
        return Err(ExperimentError::InvalidSpec("no results to emit".into()));
    }
    let text = match format {
        Format::Csv => results_to_csv(results)?,
        Format::Json => results_to_json(results)? + "\n",
    };
    // Write-then-rename so an interrupted sweep never leaves a torn file.
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, text).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

/// Streams per-job outcomes, one CSV row per job, policy and repetition.
pub struct RawWriter {
    path: PathBuf,
    out: csv::Writer<BufWriter<File>>,
}

#[derive(Serialize)]
struct RawRow {
    cell: usize,
    policy: &'static str,
    rep: usize,
    job_id: u64,
    arrival: f64,
    size: f64,
    estimate: f64,
    completion: f64,
    sojourn: f64,
    slowdown: f64,
}

impl RawWriter {
    pub fn create(path: &Path) -> Result<Self, ExperimentError> {
        let file = File::create(path).map_err(io_err(path))?;
        Ok(RawWriter {
            path: path.to_path_buf(),
            out: csv::Writer::from_writer(BufWriter::new(file)),
        })
    }

    pub fn write_cell(&mut self, cell: usize, runs: &[RepetitionRun]) -> Result<(), ExperimentError> {
        for run in runs {
            for (job, o) in run.workload.jobs.iter().zip(&run.outcomes) {
                self.out
                    .serialize(RawRow {
                        cell,
                        policy: run.policy.name(),
                        rep: run.repetition,
                        job_id: o.job_id.0,
                        arrival: o.arrival,
                        size: o.size,
                        estimate: job.estimate,
                        completion: o.completion,
                        sojourn: o.sojourn,
                        slowdown: o.slowdown,
                    })
                    .map_err(encode)?;
            }
        }
        self.out.flush().map_err(io_err(&self.path))
    }

    pub fn finish(mut self) -> Result<(), ExperimentError> {
        self.out.flush().map_err(io_err(&self.path))?;
        let inner = self.out.into_inner().map_err(encode)?;
        let mut file = inner.into_inner().map_err(|e| encode(e.error()))?;
        file.flush().map_err(io_err(&self.path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ParamPoint;
    use crate::metrics::McsBin;
    use crate::policies::PolicyKind;

    fn sample(policy: PolicyKind, ratio: f64) -> ExperimentResult {
        ExperimentResult {
            policy,
            params: ParamPoint::default(),
            repetitions: 30,
            base_seed: 5,
            mst_mean: 3.25,
            mst_std: 0.1,
            mst_vs_ps: ratio,
            mst_vs_srpt: 1.1,
            slowdown_p50: 1.0,
            slowdown_p90: 1.7,
            slowdown_p99: 9.3,
            mcs: vec![McsBin {
                mean_size: 0.01,
                mean_slowdown: 1.2,
                count: 500,
            }],
            slowdown_cdf: vec![(1.0, 0.3), (100.0, 1.0)],
        }
    }

    #[test]
    fn one_row_plus_header() {
        let csv = results_to_csv(&[sample(PolicyKind::Ps, 1.0)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "policy,shape,sigma,load,timeshape,njobs,reps,mst_mean,mst_std,mst_vs_ps,mst_vs_srpt,slowdown_p50,slowdown_p90,slowdown_p99"
        );
        assert!(lines[1].starts_with("ps,0.25,0.5,0.9,1.0,10000,30,3.25,0.1,1.0,1.1,"));
    }

    #[test]
    fn json_round_trip() {
        let results = vec![sample(PolicyKind::Spte, 0.123456789012345), sample(PolicyKind::Ps, 1.0)];
        let text = results_to_json(&results).unwrap();
        assert_eq!(parse_results_json(&text).unwrap(), results);
    }

    #[test]
    fn emit_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_results(&[sample(PolicyKind::Ps, 1.0)], Format::Csv, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
        assert!(emit_results(&[], Format::Json, &path).is_err());
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
    }
}
