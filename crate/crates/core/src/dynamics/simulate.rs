//! Modal time stepping of the bridge under a moving axle set.
//!
//! Each axle `j` at `x_j(t) = v·t - run_in - offset_j` pushes on the beam
//! with `P_j = W_j + M₁_j v² w''(x_j)` while it is on the span. The modal
//! equations
//!
//! `q̈_n + 2ξω_n q̇_n + ω_n² q_n = 2/(m̄L) Σ_j P_j sin(nπx_j/L)`
//!
//! are uncoupled and integrated with the constant-average-acceleration
//! (trapezoidal Newmark) scheme, which is unconditionally stable and exactly
//! energy-conserving without damping.

use serde::{Deserialize, Serialize};

use super::beam::BeamModel;
use super::filter::decimate_zero_phase;
use super::record::AccelerationRecord;
use super::train::{SensorLayout, TrainConfig};
use crate::error::{Error, Result};
use crate::track::TrackProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationOptions {
    /// Output sample rate (Hz).
    pub fs: f64,
    /// Integration steps per output sample.
    pub oversample: usize,
    /// Distance the head travels before the leading axle reaches the span (m).
    pub run_in: f64,
    /// Distance simulated after the last axle leaves the span (m).
    pub tail: f64,
    /// Low-pass corner as a fraction of `fs`, applied before decimation.
    pub lowpass_fraction: f64,
    /// Extra passes that feed the beam acceleration under each wheel back
    /// into the contact force (0 = decoupled).
    pub feedback_iterations: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            fs: 500.0,
            oversample: 32,
            run_in: 10.0,
            tail: 10.0,
            lowpass_fraction: 0.45,
            feedback_iterations: 0,
        }
    }
}

impl SimulationOptions {
    pub fn step(&self) -> f64 {
        1.0 / (self.fs * self.oversample as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fs >= 500.0) || !self.fs.is_finite() {
            return Err(Error::invalid("fs", "sample rate must be at least 500 Hz"));
        }
        if self.oversample == 0 {
            return Err(Error::invalid("oversample", "must be at least 1"));
        }
        if !(self.run_in >= 0.0 && self.tail >= 0.0) {
            return Err(Error::invalid("run_in", "run-in and tail must be nonnegative"));
        }
        if !(self.lowpass_fraction > 0.0 && self.lowpass_fraction <= 0.5) {
            return Err(Error::invalid("lowpass_fraction", "must lie in (0, 0.5]"));
        }
        if self.feedback_iterations > 3 {
            return Err(Error::invalid(
                "feedback_iterations",
                "at most 3 iterations are supported",
            ));
        }
        Ok(())
    }
}

/// Modal displacements and accelerations on the integration grid.
#[derive(Debug, Clone)]
pub struct ModalSolution {
    pub dt: f64,
    pub n_modes: usize,
    pub steps: usize,
    /// `q[k * n_modes + (n - 1)]`
    pub q: Vec<f64>,
    pub qdd: Vec<f64>,
}

impl ModalSolution {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn displacement(&self, beam: &BeamModel, x: f64, k: usize) -> f64 {
        let row = &self.q[k * self.n_modes..(k + 1) * self.n_modes];
        row.iter().enumerate().map(|(i, q)| q * beam.mode_shape(i + 1, x)).sum()
    }

    pub fn acceleration(&self, beam: &BeamModel, x: f64, k: usize) -> f64 {
        let row = &self.qdd[k * self.n_modes..(k + 1) * self.n_modes];
        row.iter().enumerate().map(|(i, a)| a * beam.mode_shape(i + 1, x)).sum()
    }

    /// Acceleration history at `x` on the integration grid.
    pub fn acceleration_series(&self, beam: &BeamModel, x: f64) -> Vec<f64> {
        let shapes: Vec<f64> = (1..=self.n_modes).map(|n| beam.mode_shape(n, x)).collect();
        self.qdd
            .chunks_exact(self.n_modes)
            .map(|row| row.iter().zip(&shapes).map(|(a, s)| a * s).sum())
            .collect()
    }
}

struct AxleState {
    offset: f64,
    static_load: f64,
    mass: f64,
}

fn check_profile_covers_span(profile: &TrackProfile, span: f64) -> Result<()> {
    let lo = profile.origin + profile.grid_step;
    let hi = profile.end() - profile.grid_step;
    if lo > 0.0 || hi < span {
        return Err(Error::invalid(
            "profile",
            format!("profile curvature range [{lo}, {hi}] m does not cover the span [0, {span}] m"),
        ));
    }
    Ok(())
}

/// Integrates every modal equation over the whole passage.
pub fn simulate_modal(
    beam: &BeamModel,
    train: &TrainConfig,
    profile: &TrackProfile,
    opts: &SimulationOptions,
) -> Result<ModalSolution> {
    beam.validate()?;
    train.validate()?;
    opts.validate()?;
    check_profile_covers_span(profile, beam.span)?;

    let v = train.speed;
    let dt = opts.step();
    let t_end = (opts.run_in + beam.span + train.length() + opts.tail) / v;
    let n_out = (t_end * opts.fs).ceil() as usize + 1;
    let steps = (n_out - 1) * opts.oversample + 1;
    let n_modes = beam.n_modes;
    let axles: Vec<AxleState> = train
        .axles
        .iter()
        .map(|a| AxleState {
            offset: a.offset,
            static_load: a.static_load,
            mass: a.unsprung_mass,
        })
        .collect();

    let omegas: Vec<f64> = (1..=n_modes).map(|n| beam.natural_frequency(n)).collect();
    let factor = beam.modal_load_factor();
    let v2 = v * v;

    // Wheel-position curvature does not change between feedback passes.
    let mut curvature = vec![f64::NAN; steps * axles.len()];
    let mut any_on_span = false;
    for k in 0..steps {
        let head = v * k as f64 * dt - opts.run_in;
        for (j, a) in axles.iter().enumerate() {
            let x = head - a.offset;
            if (0.0..=beam.span).contains(&x) {
                curvature[k * axles.len() + j] = profile.second_derivative(x)?;
                any_on_span = true;
            }
        }
    }
    if !any_on_span {
        return Err(Error::AxleNeverOnSpan);
    }

    let mut wheel_acc: Option<Vec<f64>> = None;
    let mut solution = None;
    for _pass in 0..=opts.feedback_iterations {
        let sol = integrate(
            beam,
            &axles,
            &curvature,
            wheel_acc.as_deref(),
            &omegas,
            factor,
            v,
            v2,
            dt,
            steps,
            opts,
        )?;
        if opts.feedback_iterations > 0 {
            // Beam acceleration under each wheel for the next pass.
            let mut acc = vec![0.0; steps * axles.len()];
            for k in 0..steps {
                let head = v * k as f64 * dt - opts.run_in;
                for (j, a) in axles.iter().enumerate() {
                    let x = head - a.offset;
                    if (0.0..=beam.span).contains(&x) {
                        acc[k * axles.len() + j] = sol.acceleration(beam, x, k);
                    }
                }
            }
            wheel_acc = Some(acc);
        }
        solution = Some(sol);
    }
    Ok(solution.expect("at least one pass runs"))
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    beam: &BeamModel,
    axles: &[AxleState],
    curvature: &[f64],
    wheel_acc: Option<&[f64]>,
    omegas: &[f64],
    factor: f64,
    v: f64,
    v2: f64,
    dt: f64,
    steps: usize,
    opts: &SimulationOptions,
) -> Result<ModalSolution> {
    let n_modes = omegas.len();
    let n_axles = axles.len();
    let xi = beam.damping_ratio;

    let modal_force = |k: usize, out: &mut [f64]| {
        out.iter_mut().for_each(|f| *f = 0.0);
        let head = v * k as f64 * dt - opts.run_in;
        for (j, a) in axles.iter().enumerate() {
            let c = curvature[k * n_axles + j];
            if c.is_nan() {
                continue;
            }
            let x = head - a.offset;
            let mut p = a.static_load + a.mass * v2 * c;
            if let Some(acc) = wheel_acc {
                p -= a.mass * acc[k * n_axles + j];
            }
            let p = factor * p;
            for (n, f) in out.iter_mut().enumerate() {
                *f += p * beam.mode_shape(n + 1, x);
            }
        }
    };

    let mut q = vec![0.0; steps * n_modes];
    let mut qdd = vec![0.0; steps * n_modes];
    let mut qd = vec![0.0; n_modes];
    let mut f_next = vec![0.0; n_modes];
    modal_force(0, &mut f_next);
    qdd[..n_modes].copy_from_slice(&f_next);

    let last_offset = axles.last().map_or(0.0, |a| a.offset);
    let mut prev_energy: Option<Vec<f64>> = None;

    for k in 0..steps - 1 {
        modal_force(k + 1, &mut f_next);
        let (cur, next) = q.split_at_mut((k + 1) * n_modes);
        let q_cur = &cur[k * n_modes..];
        let q_next = &mut next[..n_modes];
        let (acur, anext) = qdd.split_at_mut((k + 1) * n_modes);
        let a_cur = &acur[k * n_modes..];
        let a_next = &mut anext[..n_modes];
        for n in 0..n_modes {
            let w = omegas[n];
            let c = 2.0 * xi * w;
            let kk = w * w;
            let pred_v = qd[n] + 0.5 * dt * a_cur[n];
            let pred_q = q_cur[n] + dt * qd[n] + 0.25 * dt * dt * a_cur[n];
            let a = (f_next[n] - c * pred_v - kk * pred_q) / (1.0 + 0.5 * c * dt + 0.25 * kk * dt * dt);
            a_next[n] = a;
            qd[n] = pred_v + 0.5 * dt * a;
            q_next[n] = pred_q + 0.25 * dt * dt * a;
            if !q_next[n].is_finite() {
                return Err(Error::Instability(format!("mode {} diverged at step {}", n + 1, k + 1)));
            }
        }

        // Free vibration after the last axle leaves: energy must not grow.
        let head = v * (k + 1) as f64 * dt - opts.run_in;
        if xi > 0.0 && head - last_offset > beam.span {
            let energy: Vec<f64> = (0..n_modes)
                .map(|n| 0.5 * (qd[n] * qd[n] + omegas[n] * omegas[n] * q_next[n] * q_next[n]))
                .collect();
            if let Some(prev) = &prev_energy {
                for (n, (e, p)) in energy.iter().zip(prev).enumerate() {
                    if *e > p * (1.0 + 1e-9) + f64::MIN_POSITIVE {
                        return Err(Error::Instability(format!(
                            "free-vibration energy of mode {} grew at step {}",
                            n + 1,
                            k + 1
                        )));
                    }
                }
            }
            prev_energy = Some(energy);
        }
    }

    Ok(ModalSolution {
        dt,
        n_modes,
        steps,
        q,
        qdd,
    })
}

/// Sensor accelerations decimated to `opts.fs`.
pub fn record_from_solution(
    beam: &BeamModel,
    train: &TrainConfig,
    sensors: &SensorLayout,
    solution: &ModalSolution,
    opts: &SimulationOptions,
) -> AccelerationRecord {
    let series = sensors
        .positions
        .iter()
        .map(|&x| {
            let fine = solution.acceleration_series(beam, x);
            decimate_zero_phase(&fine, opts.oversample, opts.lowpass_fraction)
        })
        .collect();
    AccelerationRecord {
        fs: opts.fs,
        t0: 0.0,
        speed: train.speed,
        run_in: opts.run_in,
        sensor_positions: sensors.positions.clone(),
        series,
    }
}

/// Simulates with default options at sample rate `fs`.
pub fn simulate_train_passage(
    beam: &BeamModel,
    train: &TrainConfig,
    profile: &TrackProfile,
    sensors: &SensorLayout,
    fs: f64,
) -> Result<AccelerationRecord> {
    let opts = SimulationOptions {
        fs,
        ..SimulationOptions::default()
    };
    simulate_train_passage_with(beam, train, profile, sensors, &opts)
}

pub fn simulate_train_passage_with(
    beam: &BeamModel,
    train: &TrainConfig,
    profile: &TrackProfile,
    sensors: &SensorLayout,
    opts: &SimulationOptions,
) -> Result<AccelerationRecord> {
    sensors.validate(beam.span)?;
    let solution = simulate_modal(beam, train, profile, opts)?;
    Ok(record_from_solution(beam, train, sensors, &solution, opts))
}
