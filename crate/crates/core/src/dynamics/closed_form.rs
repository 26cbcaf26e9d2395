//! Analytic response of a simply-supported beam to the moving harmonic load
//! produced by one raised-cosine bump.
//!
//! A wheel of unsprung mass `M₁` rolling at speed `v` over the bump feels
//! `M₁ d²w/dt² = M₁ v² w''(vt)`, a cosine of amplitude `P = 2π²v²M₁A/l²` and
//! angular frequency `ω̄ = 2πv/l`, switched on while the wheel is on the bump.
//! Projected on mode `n` it becomes `P cos(ω̄(τ - τa)) sin(nωτ)` with
//! `ω = πv/L`, which splits into two sinusoids at `r₁ = ω̄ + nω` and
//! `r₂ = ω̄ - nω`. Each one is convolved with the damped impulse response
//! `e^(-ω_b s) sin(ω_D s)` in closed form.

use num_complex::Complex64;

use super::beam::BeamModel;
use crate::error::{Error, Result};
use crate::track::HarmonicBump;

/// Irregularity-induced wheel force at time `t` (wheel at `x = vt`).
///
/// Zero outside `[a/v, b/v]`. Inside, `P cos(2π(vt - a)/l)`.
pub fn harmonic_force(bump: &HarmonicBump, unsprung_mass: f64, speed: f64, t: f64) -> f64 {
    if speed <= 0.0 {
        return 0.0;
    }
    let x = speed * t;
    if !bump.contains(x) {
        return 0.0;
    }
    unsprung_mass * speed * speed * bump.curvature(x)
}

/// Force amplitude `P = 2π²v²M₁A/l²`.
pub fn harmonic_force_amplitude(bump: &HarmonicBump, unsprung_mass: f64, speed: f64) -> f64 {
    unsprung_mass * speed * speed * bump.curvature_amplitude()
}

/// Windowed convolution of `sin(rτ - φ)` with `e^(-β(t-τ)) sin(ω_D(t-τ))`
/// over `τ ∈ [lo, hi]`, evaluated through complex exponentials.
#[allow(clippy::too_many_arguments)]
fn windowed_sine_response(
    r: f64,
    phase: f64,
    decay: f64,
    damped: f64,
    t: f64,
    lo: f64,
    hi: f64,
    mode: usize,
) -> Result<f64> {
    let lambda = Complex64::new(-decay, damped);
    let i = Complex64::i();
    let term = |mu: Complex64| -> Result<Complex64> {
        let denom = i * r - mu;
        if denom.norm() <= 1e-12 * (r.abs() + damped) {
            return Err(Error::UndampedResonance { mode, excitation: r });
        }
        let at = |tau: f64| (i * (r * tau - phase) + mu * (t - tau)).exp();
        Ok((at(hi) - at(lo)) / denom)
    };
    // Im(X)·Im(Y) = ½ Re(X·conj(Y) - X·Y)
    let value = 0.5 * (term(lambda.conj())? - term(lambda)?).re;
    Ok(value)
}

/// Generalized coordinate `q_n(t)` (m) of mode `mode` under the single-bump
/// harmonic load. Zero before the wheel reaches the bump; after it leaves,
/// the same expression gives the decaying free vibration.
pub fn modal_response_closed_form(
    beam: &BeamModel,
    bump: &HarmonicBump,
    unsprung_mass: f64,
    speed: f64,
    mode: usize,
    t: f64,
) -> Result<f64> {
    if speed <= 0.0 {
        return Ok(0.0);
    }
    let t_on = bump.start / speed;
    let t_off = bump.end / speed;
    if t <= t_on {
        return Ok(0.0);
    }
    let upper = t.min(t_off);
    let p = harmonic_force_amplitude(bump, unsprung_mass, speed);
    let omega_bar = 2.0 * std::f64::consts::PI * speed / bump.wavelength;
    let n_omega = mode as f64 * std::f64::consts::PI * speed / beam.span;
    let r1 = omega_bar + n_omega;
    let r2 = omega_bar - n_omega;
    let decay = beam.decay_rate(mode);
    let damped = beam.damped_frequency(mode);
    // cos(ω̄τ - φ₀) sin(nωτ) = ½[sin(r₁τ - φ₀) - sin(r₂τ - φ₀)], φ₀ = ω̄ τa
    let phase = omega_bar * t_on;
    let g1 = windowed_sine_response(r1, phase, decay, damped, t, t_on, upper, mode)?;
    let g2 = windowed_sine_response(r2, phase, decay, damped, t, t_on, upper, mode)?;
    Ok(p / (beam.mass_per_length * beam.span * damped) * (g1 - g2))
}

/// Default differencing step for modal accelerations: `1/(8 fs)`.
pub fn default_fd_step(fs: f64) -> f64 {
    1.0 / (8.0 * fs)
}

/// Bridge acceleration at `sensor_x` from the closed-form modal
/// coordinates, truncated at `beam.n_modes`. Modal accelerations come from a
/// five-point central difference with step `fd_step`.
pub fn bridge_acceleration_closed_form(
    beam: &BeamModel,
    bump: &HarmonicBump,
    unsprung_mass: f64,
    speed: f64,
    sensor_x: f64,
    t_grid: &[f64],
    fd_step: f64,
) -> Result<Vec<f64>> {
    if !(sensor_x > 0.0 && sensor_x < beam.span) {
        return Err(Error::OutOfRange {
            x: sensor_x,
            min: 0.0,
            max: beam.span,
        });
    }
    if !(fd_step > 0.0) {
        return Err(Error::invalid("fd_step", "must be positive"));
    }
    let h = fd_step;
    let shapes: Vec<f64> = (1..=beam.n_modes).map(|n| beam.mode_shape(n, sensor_x)).collect();
    t_grid
        .iter()
        .map(|&t| {
            let mut acc = 0.0;
            for (idx, &phi) in shapes.iter().enumerate() {
                if phi.abs() < 1e-12 {
                    continue;
                }
                let n = idx + 1;
                let q = |s: f64| modal_response_closed_form(beam, bump, unsprung_mass, speed, n, s);
                let qdd = (-q(t + 2.0 * h)? + 16.0 * q(t + h)? - 30.0 * q(t)? + 16.0 * q(t - h)? - q(t - 2.0 * h)?)
                    / (12.0 * h * h);
                acc += qdd * phi;
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> HarmonicBump {
        HarmonicBump::new(1e-3, 0.5, 8.0).unwrap()
    }

    #[test]
    fn force_amplitude_at_200_kmh() {
        let v = 200.0 / 3.6;
        let p = harmonic_force_amplitude(&bump(), 1000.0, v);
        assert!((p - 2.437e5).abs() / 2.437e5 < 1e-3, "{p}");
        // Wheel entry is the cosine crest.
        assert!((harmonic_force(&bump(), 1000.0, v, 8.0 / v) - p).abs() < 1e-6 * p);
        assert_eq!(harmonic_force(&bump(), 1000.0, v, 7.0 / v), 0.0);
        assert_eq!(harmonic_force(&bump(), 1000.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn force_matches_finite_difference_of_wheel_path() {
        // Oracle: M₁ d²w(vt)/dt² by central differences of the elevation.
        let b = bump();
        let (m1, v) = (1000.0, 200.0 / 3.6);
        let h = 1e-5;
        let mut max_rel: f64 = 0.0;
        let p = harmonic_force_amplitude(&b, m1, v);
        for k in 1..50 {
            let t = (b.start + k as f64 * 0.01) / v;
            let w = |s: f64| b.elevation(v * s);
            let fd = m1 * (w(t + h) - 2.0 * w(t) + w(t - h)) / (h * h);
            max_rel = max_rel.max((fd - harmonic_force(&b, m1, v, t)).abs() / p);
        }
        assert!(max_rel < 5e-3, "{max_rel}");
    }

    #[test]
    fn excitation_frequency() {
        for (kmh, f) in [(200.0, 111.1), (250.0, 138.9)] {
            let v: f64 = kmh / 3.6;
            assert!((v / 0.5 - f).abs() < 0.05);
        }
    }

    #[test]
    fn causal_before_wheel_entry() {
        let beam = BeamModel::reference();
        let v = 55.556;
        for n in 1..=5 {
            assert_eq!(
                modal_response_closed_form(&beam, &bump(), 1000.0, v, n, 0.1).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn undamped_resonance_is_reported() {
        // Choose a speed whose r₂ hits ω₁ exactly with zero damping.
        let beam = BeamModel {
            damping_ratio: 0.0,
            ..BeamModel::reference()
        };
        let w1 = beam.natural_frequency(1);
        let b = bump();
        let omega_of_v = |v: f64| 2.0 * std::f64::consts::PI * v / b.wavelength - std::f64::consts::PI * v / beam.span;
        let v = w1 / omega_of_v(1.0);
        let res = modal_response_closed_form(&beam, &b, 1000.0, v, 1, b.end / v + 0.1);
        assert!(matches!(res, Err(Error::UndampedResonance { .. })));
    }

    #[test]
    fn midspan_ignores_even_modes_and_scales_linearly() {
        let beam = BeamModel::reference();
        let v = 55.556;
        let t: Vec<f64> = (0..200).map(|k| 0.14 + k as f64 / 500.0).collect();
        let b1 = bump();
        let b2 = HarmonicBump { amplitude: 2e-3, ..b1 };
        let a1 = bridge_acceleration_closed_form(&beam, &b1, 1200.0, v, beam.span / 2.0, &t, 2.5e-4).unwrap();
        let a2 = bridge_acceleration_closed_form(&beam, &b2, 1200.0, v, beam.span / 2.0, &t, 2.5e-4).unwrap();
        for (x, y) in a1.iter().zip(&a2) {
            assert!((2.0 * x - y).abs() <= 1e-9 * y.abs().max(1e-12));
        }
        let odd_only = BeamModel { n_modes: 11, ..beam };
        let a_odd = bridge_acceleration_closed_form(&odd_only, &b1, 1200.0, v, beam.span / 2.0, &t, 2.5e-4).unwrap();
        let single = BeamModel { n_modes: 12, ..beam };
        let a_all = bridge_acceleration_closed_form(&single, &b1, 1200.0, v, beam.span / 2.0, &t, 2.5e-4).unwrap();
        assert_eq!(a_odd, a_all);
    }
}
