//! Trace CSV: `job_id,arrival,size[,estimate]`, one job per line, unquoted
//! fields. A header line is optional and `#` starts a comment line. Missing
//! estimates are drawn from the log-normal error model.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use super::error_factor;
use crate::model::{validate_workload, Job, ModelError, Provenance, Workload};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    ParseError { line: u64, reason: String },
    #[error("trace has no jobs")]
    Empty,
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

struct Record {
    id: u64,
    arrival: f64,
    size: f64,
    estimate: Option<f64>,
}

fn parse_field<T: std::str::FromStr>(raw: &str, what: &str, line: u64) -> Result<T, TraceError> {
    raw.parse().map_err(|_| TraceError::ParseError {
        line,
        reason: format!("invalid {what} {raw:?}"),
    })
}

fn looks_like_header(fields: &[&str]) -> bool {
    fields
        .first()
        .is_some_and(|f| f.parse::<u64>().is_err() && f.chars().any(|c| c.is_alphabetic()))
}

/// Parses trace text. `sigma` and `seed` drive estimate synthesis for rows
/// without an estimate column; arrivals are shifted so the earliest is 0.
pub fn parse_trace(text: &str, sigma: f64, seed: u64) -> Result<Vec<Job>, TraceError> {
    let mut records = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if std::mem::take(&mut first) && looks_like_header(&fields) {
            continue;
        }
        if !(3..=4).contains(&fields.len()) {
            return Err(TraceError::ParseError {
                line,
                reason: format!("expected 3 or 4 columns, found {}", fields.len()),
            });
        }
        let estimate = match fields.get(3) {
            Some(raw) if !raw.is_empty() => Some(parse_field(raw, "estimate", line)?),
            _ => None,
        };
        records.push(Record {
            id: parse_field(fields[0], "job id", line)?,
            arrival: parse_field(fields[1], "arrival", line)?,
            size: parse_field(fields[2], "size", line)?,
            estimate,
        });
    }
    if records.is_empty() {
        return Err(TraceError::Empty);
    }

    let origin = records.iter().map(|r| r.arrival).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = records
        .into_iter()
        .map(|r| {
            // One normal draw per row keeps the stream aligned with row order
            // whether or not the row carries its own estimate.
            let z: f64 = StandardNormal.sample(&mut rng);
            let estimate = r.estimate.unwrap_or(r.size * error_factor(sigma, z));
            Job::new(r.id, r.arrival - origin, r.size, estimate)
        })
        .collect();
    Ok(jobs)
}

/// Loads and validates a trace file.
pub fn load_trace(path: &Path, sigma: f64, seed: u64) -> Result<Workload, TraceError> {
    let text = fs::read_to_string(path).map_err(|source| TraceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let jobs = parse_trace(&text, sigma, seed)?;
    let w = validate_workload(Workload {
        jobs,
        provenance: Provenance::Trace {
            path: path.to_path_buf(),
            sigma,
            seed,
        },
    })?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_column_line_maps_directly() {
        let jobs = parse_trace("0,0.0,5.0,4.0\n", 0.5, 1).unwrap();
        assert_eq!(jobs, vec![Job::new(0, 0.0, 5.0, 4.0)]);
    }

    #[test]
    fn zero_sigma_gives_exact_estimates() {
        let jobs = parse_trace("0,1.0,5.0\n1,2.5,3.0\n", 0.0, 9).unwrap();
        assert!(jobs.iter().all(|j| j.estimate == j.size));
        assert_eq!(jobs[0].arrival, 0.0);
        assert_eq!(jobs[1].arrival, 1.5);
    }

    #[test]
    fn synthesized_estimates_are_seeded() {
        let text = "0,0,5\n1,1,3\n2,2,1\n";
        let a = parse_trace(text, 0.5, 42).unwrap();
        let b = parse_trace(text, 0.5, 42).unwrap();
        let c = parse_trace(text, 0.5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().any(|j| j.estimate != j.size));
    }

    #[test]
    fn header_and_comments_are_skipped() {
        let text = "# exported trace\njob_id,arrival,size,estimate\n# mid comment\n7, 3.0, 2.0, 2.5\n";
        let jobs = parse_trace(text, 0.0, 0).unwrap();
        assert_eq!(jobs, vec![Job::new(7, 0.0, 2.0, 2.5)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_trace("0,0,1\n1,0,abc\n", 0.0, 0).unwrap_err();
        assert!(matches!(err, TraceError::ParseError { line: 2, .. }), "{err}");
        let err = parse_trace("0,0,1\n\n1,0\n", 0.0, 0).unwrap_err();
        assert!(matches!(err, TraceError::ParseError { line: 3, .. }), "{err}");
        assert!(matches!(parse_trace("# nothing\n", 0.0, 0), Err(TraceError::Empty)));
    }

    #[test]
    fn non_positive_size_rejected_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        fs::write(&path, "0,0,1\n1,1,0\n").unwrap();
        assert!(matches!(
            load_trace(&path, 0.0, 0),
            Err(TraceError::Invalid(ModelError::NonPositiveSize(..)))
        ));
        assert!(matches!(
            load_trace(&dir.path().join("missing.csv"), 0.0, 0),
            Err(TraceError::Io { .. })
        ));
    }
}
