use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::model::{GenParams, Job, Provenance, Workload};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("weibull sampling requires shape > 0, scale > 0 and u in (0,1); got shape={shape}, scale={scale}, u={u}")]
    DomainError { shape: f64, scale: f64, u: f64 },
}

/// Inverse-CDF Weibull draw: `scale * (-ln u)^(1/shape)`.
pub fn sample_weibull(shape: f64, scale: f64, u: f64) -> Result<f64, GenError> {
    if !(shape > 0.0 && scale > 0.0 && u > 0.0 && u < 1.0) {
        return Err(GenError::DomainError { shape, scale, u });
    }
    Ok(scale * (-u.ln()).powf(1.0 / shape))
}

/// Weibull scale giving mean 1 for the given shape.
pub fn mean_one_scale(shape: f64) -> f64 {
    1.0 / gamma(1.0 + 1.0 / shape)
}

/// Multiplicative log-normal estimation error with median 1, so over- and
/// under-estimation by the same factor are equally likely.
pub fn error_factor(sigma: f64, z: f64) -> f64 {
    (sigma * z).exp()
}

pub fn validate_params(p: &GenParams) -> Result<(), GenError> {
    let bad = |name, value, reason| Err(GenError::InvalidParam { name, value, reason });
    if !(p.shape > 0.0 && p.shape.is_finite()) {
        return bad("shape", p.shape, "must be positive");
    }
    if !(p.timeshape > 0.0 && p.timeshape.is_finite()) {
        return bad("timeshape", p.timeshape, "must be positive");
    }
    if !(p.sigma >= 0.0 && p.sigma.is_finite()) {
        return bad("sigma", p.sigma, "must be non-negative");
    }
    if !(p.load > 0.0 && p.load < 1.0) {
        return bad("load", p.load, "must lie in (0, 1)");
    }
    if p.njobs == 0 {
        return bad("njobs", 0.0, "must be at least 1");
    }
    Ok(())
}

/// Uniform draw in the open interval (0, 1).
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Draws `njobs` jobs with mean size 1 and mean inter-arrival gap `1/load`.
///
/// Per job the stream consumes, in order: one uniform for the gap, one for
/// the size and one standard normal for the estimation error. The first job
/// arrives after one gap.
pub fn generate(params: &GenParams) -> Result<Workload, GenError> {
    validate_params(params)?;
    let size_scale = mean_one_scale(params.shape);
    let gap_scale = mean_one_scale(params.timeshape) / params.load;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut clock = 0.0;
    let mut jobs = Vec::with_capacity(params.njobs);
    for id in 0..params.njobs {
        clock += sample_weibull(params.timeshape, gap_scale, open_unit(&mut rng))?;
        let size = sample_weibull(params.shape, size_scale, open_unit(&mut rng))?;
        let z: f64 = rng.sample(StandardNormal);
        // Extremely skewed shapes can underflow to 0; keep sizes positive.
        let size = size.max(f64::MIN_POSITIVE);
        let estimate = (size * error_factor(params.sigma, z)).max(f64::MIN_POSITIVE);
        jobs.push(Job::new(id as u64, clock, size, estimate));
    }
    Ok(Workload {
        jobs,
        provenance: Provenance::Synthetic(*params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weibull_identities() {
        let u = (-1.0f64).exp();
        assert!((sample_weibull(1.0, 1.0, u).unwrap() - 1.0).abs() < 1e-15);
        assert!((sample_weibull(0.5, 1.0, u).unwrap() - 1.0).abs() < 1e-15);
        assert!(sample_weibull(1.0, 1.0, 0.0).is_err());
        assert!(sample_weibull(1.0, 1.0, 1.0).is_err());
        assert!(sample_weibull(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn scale_matches_factorial() {
        // Gamma(1 + 1/0.25) = Gamma(5) = 4!
        let factorial: f64 = (1..=4).map(|k| k as f64).product();
        assert!((mean_one_scale(0.25) - 1.0 / factorial).abs() < 1e-12);
        assert!((mean_one_scale(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_factor_median_point() {
        assert_eq!(error_factor(3.0, 0.0), 1.0);
        assert_eq!(error_factor(0.0, 1.7), 1.0);
    }

    #[test]
    fn single_job_structure() {
        let w = generate(&GenParams {
            njobs: 1,
            seed: 3,
            ..GenParams::default()
        })
        .unwrap();
        assert_eq!(w.len(), 1);
        let j = w.jobs[0];
        assert!(j.arrival > 0.0 && j.size > 0.0 && j.estimate > 0.0);
        assert_ne!(j.size, j.estimate);
    }

    #[test]
    fn zero_sigma_is_exact() {
        let w = generate(&GenParams {
            sigma: 0.0,
            njobs: 500,
            ..GenParams::default()
        })
        .unwrap();
        assert!(w.jobs.iter().all(|j| j.estimate == j.size));
    }

    #[test]
    fn rejects_bad_params() {
        for p in [
            GenParams {
                shape: 0.0,
                ..GenParams::default()
            },
            GenParams {
                timeshape: -1.0,
                ..GenParams::default()
            },
            GenParams {
                sigma: -0.1,
                ..GenParams::default()
            },
            GenParams {
                load: 1.0,
                ..GenParams::default()
            },
            GenParams {
                njobs: 0,
                ..GenParams::default()
            },
        ] {
            assert!(matches!(generate(&p), Err(GenError::InvalidParam { .. })));
        }
    }
}
