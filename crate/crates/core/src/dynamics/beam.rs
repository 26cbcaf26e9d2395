use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler-Bernoulli simply-supported beam with constant modal damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamModel {
    /// Span `L` (m).
    pub span: f64,
    /// Mass per unit length (kg/m).
    pub mass_per_length: f64,
    /// Flexural rigidity `EI` (N·m²).
    pub flexural_rigidity: f64,
    /// Damping ratio, applied to every mode.
    pub damping_ratio: f64,
    pub n_modes: usize,
}

impl BeamModel {
    pub fn new(
        span: f64,
        mass_per_length: f64,
        flexural_rigidity: f64,
        damping_ratio: f64,
        n_modes: usize,
    ) -> Result<Self> {
        let beam = BeamModel {
            span,
            mass_per_length,
            flexural_rigidity,
            damping_ratio,
            n_modes,
        };
        beam.validate()?;
        Ok(beam)
    }

    /// Picks `EI` so the first natural frequency equals `fundamental_hz`.
    pub fn with_fundamental_frequency(
        span: f64,
        mass_per_length: f64,
        fundamental_hz: f64,
        damping_ratio: f64,
        n_modes: usize,
    ) -> Result<Self> {
        if !(fundamental_hz > 0.0) {
            return Err(Error::invalid("fundamental_hz", "must be positive"));
        }
        let omega1 = 2.0 * PI * fundamental_hz;
        let root = omega1 * span * span / (PI * PI);
        Self::new(
            span,
            mass_per_length,
            mass_per_length * root * root,
            damping_ratio,
            n_modes,
        )
    }

    /// The default bridge: 32.6 m span, 3.0e4 kg/m, 4.6 Hz fundamental, 2 %
    /// damping, 12 modes.
    pub fn reference() -> Self {
        Self::with_fundamental_frequency(32.6, 3.0e4, 4.6, 0.02, 12).expect("reference beam is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be positive and finite"))
            }
        };
        positive(self.span, "span")?;
        positive(self.mass_per_length, "mass_per_length")?;
        positive(self.flexural_rigidity, "flexural_rigidity")?;
        if !(0.0..1.0).contains(&self.damping_ratio) {
            return Err(Error::invalid("damping_ratio", "must lie in [0, 1)"));
        }
        if self.n_modes == 0 {
            return Err(Error::invalid("n_modes", "must be at least 1"));
        }
        Ok(())
    }

    /// `ω_n = (nπ/L)² √(EI/m̄)` in rad/s.
    pub fn natural_frequency(&self, mode: usize) -> f64 {
        let k = mode as f64 * PI / self.span;
        k * k * (self.flexural_rigidity / self.mass_per_length).sqrt()
    }

    /// Exponential decay rate `ξ ω_n`.
    pub fn decay_rate(&self, mode: usize) -> f64 {
        self.damping_ratio * self.natural_frequency(mode)
    }

    /// `ω_n √(1 - ξ²)`.
    pub fn damped_frequency(&self, mode: usize) -> f64 {
        self.natural_frequency(mode) * (1.0 - self.damping_ratio * self.damping_ratio).sqrt()
    }

    /// `sin(nπx/L)`.
    pub fn mode_shape(&self, mode: usize, x: f64) -> f64 {
        (mode as f64 * PI * x / self.span).sin()
    }

    /// Scale factor `2/(m̄L)` mapping a point load to modal acceleration.
    pub fn modal_load_factor(&self) -> f64 {
        2.0 / (self.mass_per_length * self.span)
    }

    /// Midspan deflection under a static midspan point load, `PL³/48EI`.
    pub fn static_midspan_deflection(&self, load: f64) -> f64 {
        load * self.span.powi(3) / (48.0 * self.flexural_rigidity)
    }
}
