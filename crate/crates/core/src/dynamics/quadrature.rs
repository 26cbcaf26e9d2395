//! Numerical Duhamel integral, used as an independent check of the closed
//! form and of the time stepper.

use super::beam::BeamModel;
use crate::error::{Error, Result};

/// Where the load acts along the span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadPath {
    /// Load travels with `x = vτ`.
    Moving { speed: f64 },
    /// Load stays at `x`.
    Fixed { x: f64 },
}

/// A point load `P(τ)` active on `support`, moving along `path`.
pub struct Forcing<'a> {
    pub load: &'a dyn Fn(f64) -> f64,
    pub path: LoadPath,
    pub support: (f64, f64),
    /// Highest angular frequency present in `load` (rad/s); sets the step limit.
    pub max_frequency: f64,
}

/// Gauss-Legendre 4-point nodes and weights on [-1, 1].
const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Largest admissible panel width: `1/(20·f_max)` with `f_max` the larger
/// of the load frequency and the modal frequency (Hz).
pub fn max_quadrature_step(beam: &BeamModel, forcing: &Forcing<'_>, mode: usize) -> f64 {
    let omega = forcing.max_frequency.max(beam.natural_frequency(mode));
    2.0 * std::f64::consts::PI / (20.0 * omega)
}

/// Evaluates
/// `q_n(t) = 2/(m̄Lω_D) ∫ P(τ) φ_n(x(τ)) e^(-ω_b(t-τ)) sin(ω_D(t-τ)) dτ`
/// on every time in `t_grid` by composite Gauss-Legendre quadrature with
/// panels no wider than `step`.
pub fn duhamel_quadrature(
    beam: &BeamModel,
    forcing: &Forcing<'_>,
    mode: usize,
    t_grid: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let limit = max_quadrature_step(beam, forcing, mode);
    if !(step > 0.0) || step > limit {
        return Err(Error::StepTooCoarse { step, limit });
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t_grid", "must be sorted"));
    }
    let decay = beam.decay_rate(mode);
    let damped = beam.damped_frequency(mode);
    let scale = beam.modal_load_factor() / damped;
    let shape = |tau: f64| match forcing.path {
        LoadPath::Moving { speed } => beam.mode_shape(mode, speed * tau),
        LoadPath::Fixed { x } => beam.mode_shape(mode, x),
    };
    let (lo, hi) = forcing.support;

    Ok(t_grid
        .iter()
        .map(|&t| {
            let upper = t.min(hi);
            if upper <= lo {
                return 0.0;
            }
            let panels = ((upper - lo) / step).ceil().max(1.0) as usize;
            let h = (upper - lo) / panels as f64;
            let mut sum = 0.0;
            for k in 0..panels {
                let mid = lo + (k as f64 + 0.5) * h;
                for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS) {
                    let tau = mid + 0.5 * h * node;
                    let s = t - tau;
                    sum += weight * (forcing.load)(tau) * shape(tau) * (-decay * s).exp() * (damped * s).sin();
                }
            }
            scale * 0.5 * h * sum
        })
        .collect())
}
