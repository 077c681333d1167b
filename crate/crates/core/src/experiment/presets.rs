//! Named sweeps, one per reproduced figure, plus a reduced CI variant of the
//! shape sweep.

use super::{Axis, ExperimentError, ExperimentSpec, ParamPoint};
use crate::metrics::log_grid;
use crate::policies::PolicyKind::{self, *};

pub const PRESETS: [(&str, &str); 8] = [
    ("fig1-heatmap", "MST vs PS over a 7x7 shape x sigma grid"),
    (
        "fig2-shape",
        "MST vs exact SRPT across size-distribution shapes, sigma 0.5",
    ),
    ("fig3-noerror", "SPT vs FSP with exact sizes across shapes"),
    ("fig4-sigma", "sigma sweep on the three most skewed shapes"),
    ("fig5-slowdown", "slowdown distribution at default parameters"),
    ("fig6-mcs", "mean conditional slowdown at default parameters"),
    ("fig7-trace", "sigma sweep over a replayed trace (needs --trace)"),
    ("ci-fig2", "reduced shape sweep for continuous integration"),
];

const SHAPES: [f64; 7] = [0.125, 0.177, 0.25, 0.5, 1.0, 2.0, 4.0];

const ERROR_FED: [PolicyKind; 7] = [Ps, Las, Srpte, Psbs, Spte, Cse, Mcsse];

fn log_range() -> Vec<f64> {
    log_grid(0.125, 4.0, 7)
}

pub fn preset(name: &str) -> Result<ExperimentSpec, ExperimentError> {
    let spec = |policies: &[PolicyKind], axes: Vec<(Axis, Vec<f64>)>| ExperimentSpec {
        policies: policies.to_vec(),
        axes,
        ..ExperimentSpec::default()
    };
    let s = match name {
        "fig1-heatmap" => spec(
            &[Cse, Mcsse, Psbs, Spte],
            vec![(Axis::Shape, log_range()), (Axis::Sigma, log_range())],
        ),
        "fig2-shape" => spec(&ERROR_FED, vec![(Axis::Shape, SHAPES.to_vec())]),
        "fig3-noerror" => spec(
            &[Spt, Fsp],
            vec![(Axis::Sigma, vec![0.0]), (Axis::Shape, SHAPES.to_vec())],
        ),
        "fig4-sigma" => spec(
            &ERROR_FED,
            vec![(Axis::Shape, vec![0.25, 0.177, 0.125]), (Axis::Sigma, log_range())],
        ),
        "fig5-slowdown" | "fig6-mcs" => spec(&ERROR_FED, Vec::new()),
        "fig7-trace" => spec(&ERROR_FED, vec![(Axis::Sigma, log_range())]),
        "ci-fig2" => ExperimentSpec {
            base: ParamPoint {
                njobs: 2_000,
                ..ParamPoint::default()
            },
            repetitions: 10,
            ..spec(&[Psbs, Spte, Srpte], vec![(Axis::Shape, vec![0.125, 0.25, 1.0, 4.0])])
        },
        _ => {
            return Err(ExperimentError::InvalidSpec(format!(
                "unknown preset {name:?}; known: {}",
                PRESETS.map(|p| p.0).join(", ")
            )))
        }
    };
    Ok(s)
}
