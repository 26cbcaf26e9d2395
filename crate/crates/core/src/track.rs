//! Vertical track irregularity profiles.
//!
//! A [`TrackProfile`] is a uniformly sampled elevation curve. Profiles built
//! from [`HarmonicBump`]s keep the bump parameters alongside the samples so
//! curvature can be evaluated analytically where only bumps contribute.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of grid samples per bump wavelength.
pub const MIN_SAMPLES_PER_WAVELENGTH: f64 = 10.0;

/// Raised-cosine local irregularity `w(x) = A/2 (1 - cos(2π(x - a)/l))` on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBump {
    pub amplitude: f64,
    pub wavelength: f64,
    pub start: f64,
    pub end: f64,
}

impl HarmonicBump {
    /// Single-period bump starting at `start`.
    pub fn new(amplitude: f64, wavelength: f64, start: f64) -> Result<Self> {
        Self::with_periods(amplitude, wavelength, start, 1)
    }

    pub fn with_periods(amplitude: f64, wavelength: f64, start: f64, periods: usize) -> Result<Self> {
        let bump = HarmonicBump {
            amplitude,
            wavelength,
            start,
            end: start + periods as f64 * wavelength,
        };
        bump.validate()?;
        Ok(bump)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("amplitude", "must be positive and finite"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::invalid("wavelength", "must be positive and finite"));
        }
        if !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::invalid("end", "must exceed start"));
        }
        let periods = (self.end - self.start) / self.wavelength;
        if (periods - periods.round()).abs() > 1e-9 * periods.max(1.0) {
            return Err(Error::invalid(
                "end",
                format!("support must be a whole number of wavelengths, got {periods} periods"),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end
    }

    fn phase(&self, x: f64) -> f64 {
        2.0 * PI * (x - self.start) / self.wavelength
    }

    /// Elevation at `x` (zero outside the support).
    pub fn elevation(&self, x: f64) -> f64 {
        if self.contains(x) {
            0.5 * self.amplitude * (1.0 - self.phase(x).cos())
        } else {
            0.0
        }
    }

    /// Peak curvature `2π²A/l²`.
    pub fn curvature_amplitude(&self) -> f64 {
        2.0 * PI * PI * self.amplitude / (self.wavelength * self.wavelength)
    }

    /// Analytic second derivative `w''(x)` (zero outside the support).
    pub fn curvature(&self, x: f64) -> f64 {
        if self.contains(x) {
            self.curvature_amplitude() * self.phase(x).cos()
        } else {
            0.0
        }
    }
}

/// Parameters for a random roughness realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomProfileSpec {
    /// `(spatial frequency 1/m, one-sided PSD m²·m)` rows, frequency ascending.
    pub psd_table: Vec<(f64, f64)>,
    /// `(min, max)` wavelength in m.
    pub wavelength_band: (f64, f64),
    pub seed: u64,
    pub grid_step: f64,
}

impl RandomProfileSpec {
    /// Band-limited power law `S(f) = c·f^-exponent`, with `c` chosen so the
    /// continuous-spectrum RMS equals `rms`.
    pub fn power_law(rms: f64, wavelength_band: (f64, f64), exponent: f64, seed: u64, grid_step: f64) -> Result<Self> {
        let (lmin, lmax) = wavelength_band;
        if !(lmin > 0.0 && lmax > lmin) {
            return Err(Error::invalid("wavelength_band", "must be positive and ordered"));
        }
        if rms < 0.0 {
            return Err(Error::invalid("rms", "must be nonnegative"));
        }
        let (f_lo, f_hi) = (1.0 / lmax, 1.0 / lmin);
        let integral = if (exponent - 1.0).abs() < 1e-12 {
            (f_hi / f_lo).ln()
        } else {
            (f_hi.powf(1.0 - exponent) - f_lo.powf(1.0 - exponent)) / (1.0 - exponent)
        };
        let c = rms * rms / integral;
        let rows = 64;
        let psd_table = (0..rows)
            .map(|i| {
                let f = f_lo * (f_hi / f_lo).powf(i as f64 / (rows - 1) as f64);
                (f, c * f.powf(-exponent))
            })
            .collect();
        Ok(RandomProfileSpec {
            psd_table,
            wavelength_band,
            seed,
            grid_step,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.psd_table.is_empty() {
            return Err(Error::invalid("psd_table", "must not be empty"));
        }
        for w in self.psd_table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("psd_table", "frequencies must be strictly increasing"));
            }
        }
        for &(f, s) in &self.psd_table {
            if !(f > 0.0) || !f.is_finite() {
                return Err(Error::invalid("psd_table", "frequencies must be positive"));
            }
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::invalid("psd_table", "densities must be nonnegative"));
            }
        }
        let (lmin, lmax) = self.wavelength_band;
        if !(lmin > 0.0 && lmax > lmin) {
            return Err(Error::invalid("wavelength_band", "must be positive and ordered"));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::invalid("grid_step", "must be positive"));
        }
        if lmin < 2.0 * self.grid_step {
            return Err(Error::invalid(
                "wavelength_band",
                format!(
                    "minimum wavelength {lmin} m is not resolvable on a {} m grid",
                    self.grid_step
                ),
            ));
        }
        Ok(())
    }

    /// PSD at `f`: log-log interpolation between rows, zero outside the table.
    pub fn density(&self, f: f64) -> f64 {
        let table = &self.psd_table;
        let first = table[0];
        let last = table[table.len() - 1];
        if f < first.0 || f > last.0 {
            return 0.0;
        }
        let idx = table.partition_point(|&(tf, _)| tf <= f);
        if idx == 0 {
            return first.1;
        }
        if idx >= table.len() {
            return last.1;
        }
        let (f0, s0) = table[idx - 1];
        let (f1, s1) = table[idx];
        if s0 > 0.0 && s1 > 0.0 {
            let t = (f / f0).ln() / (f1 / f0).ln();
            (s0.ln() + t * (s1.ln() - s0.ln())).exp()
        } else {
            let t = (f - f0) / (f1 - f0);
            s0 + t * (s1 - s0)
        }
    }
}

/// Uniformly sampled elevation profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackProfile {
    pub grid_step: f64,
    pub origin: f64,
    pub samples: Vec<f64>,
    /// Bumps contained in `samples`, kept for analytic evaluation.
    pub bumps: Vec<HarmonicBump>,
}

impl TrackProfile {
    pub fn new(grid_step: f64, origin: f64, samples: Vec<f64>, bumps: Vec<HarmonicBump>) -> Result<Self> {
        if !(grid_step > 0.0 && grid_step.is_finite()) {
            return Err(Error::invalid("grid_step", "must be positive"));
        }
        if samples.len() < 3 {
            return Err(Error::invalid("samples", "at least 3 samples are required"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "elevations must be finite"));
        }
        Ok(TrackProfile {
            grid_step,
            origin,
            samples,
            bumps,
        })
    }

    /// Flat profile over `domain`.
    pub fn zeros(grid_step: f64, domain: (f64, f64)) -> Result<Self> {
        let n = grid_len(grid_step, domain)?;
        Self::new(grid_step, domain.0, vec![0.0; n], Vec::new())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn position(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.grid_step
    }

    pub fn end(&self) -> f64 {
        self.position(self.samples.len() - 1)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.origin, self.end())
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| self.position(i))
    }

    /// Linear interpolation of the samples; `None` outside the domain.
    pub fn elevation(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let u = (x - self.origin) / self.grid_step;
        let i = (u.floor() as usize).min(self.samples.len() - 2);
        let t = u - i as f64;
        Some(self.samples[i] * (1.0 - t) + self.samples[i + 1] * t)
    }

    fn bump_elevation(&self, x: f64) -> f64 {
        self.bumps.iter().map(|b| b.elevation(x)).sum()
    }

    fn bump_curvature(&self, x: f64) -> f64 {
        self.bumps.iter().map(|b| b.curvature(x)).sum()
    }

    /// Central difference of the non-bump part at grid node `i` (1..=n-2).
    fn residual_curvature_at(&self, i: usize) -> f64 {
        let r = |k: usize| self.samples[k] - self.bump_elevation(self.position(k));
        (r(i + 1) - 2.0 * r(i) + r(i - 1)) / (self.grid_step * self.grid_step)
    }

    /// Second derivative `w''(x)` in 1/m.
    ///
    /// Bumps contribute their analytic curvature; whatever remains after the
    /// bumps are subtracted from the samples is differenced on the grid and
    /// interpolated linearly between nodes.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        let n = self.samples.len();
        let lo = self.position(1);
        let hi = self.position(n - 2);
        // Accept round-off at the edges of the valid range.
        let slack = 1e-9 * self.grid_step;
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfRange { x, min: lo, max: hi });
        }
        let u = ((x - self.origin) / self.grid_step).clamp(1.0, (n - 2) as f64);
        let i = (u.floor() as usize).min(n - 3).max(1);
        let t = u - i as f64;
        let fd = if t <= 0.0 {
            self.residual_curvature_at(i)
        } else {
            self.residual_curvature_at(i) * (1.0 - t) + self.residual_curvature_at(i + 1) * t
        };
        Ok(self.bump_curvature(x) + fd)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["position_m", "elevation_m"])?;
        for (i, v) in self.samples.iter().enumerate() {
            wtr.write_record([self.position(i).to_string(), v.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a two-column profile CSV. Bump metadata is not stored in the
    /// file, so the result uses finite differences everywhere.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let rows = read_two_columns(path)?;
        if rows.len() < 3 {
            return Err(Error::invalid("samples", "at least 3 samples are required"));
        }
        let step = rows[1].0 - rows[0].0;
        for w in rows.windows(2) {
            if ((w[1].0 - w[0].0) - step).abs() > 1e-6 * step.abs() {
                return Err(Error::invalid("position_m", "profile grid must be uniform"));
            }
        }
        TrackProfile::new(step, rows[0].0, rows.iter().map(|r| r.1).collect(), Vec::new())
    }
}

fn grid_len(grid_step: f64, domain: (f64, f64)) -> Result<usize> {
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid_step", "must be positive"));
    }
    if !(domain.1 > domain.0) {
        return Err(Error::invalid("domain", "must be a nonempty interval"));
    }
    Ok(((domain.1 - domain.0) / grid_step).round() as usize + 1)
}

/// Samples a single bump over `domain`.
pub fn harmonic_profile(bump: HarmonicBump, grid_step: f64, domain: (f64, f64)) -> Result<TrackProfile> {
    bump.validate()?;
    if grid_step > bump.wavelength / MIN_SAMPLES_PER_WAVELENGTH {
        return Err(Error::invalid(
            "grid_step",
            format!(
                "{grid_step} m gives fewer than {MIN_SAMPLES_PER_WAVELENGTH} samples per {} m wavelength",
                bump.wavelength
            ),
        ));
    }
    if bump.start < domain.0 || bump.end > domain.1 {
        return Err(Error::invalid(
            "domain",
            format!(
                "[{}, {}] does not contain the bump support [{}, {}]",
                domain.0, domain.1, bump.start, bump.end
            ),
        ));
    }
    let n = grid_len(grid_step, domain)?;
    let samples = (0..n)
        .map(|i| bump.elevation(domain.0 + i as f64 * grid_step))
        .collect();
    TrackProfile::new(grid_step, domain.0, samples, vec![bump])
}

/// Spectral-representation realization: a sum of cosines at the harmonics
/// `k/(domain length)` inside the wavelength band, amplitudes `√(2·S·Δf)`,
/// phases uniform on `[0, 2π)` from a seeded ChaCha stream.
pub fn random_profile(spec: &RandomProfileSpec, domain: (f64, f64)) -> Result<TrackProfile> {
    spec.validate()?;
    let n = grid_len(spec.grid_step, domain)?;
    let length = domain.1 - domain.0;
    let df = 1.0 / length;
    let (lmin, lmax) = spec.wavelength_band;
    let (f_lo, f_hi) = (1.0 / lmax, 1.0 / lmin);

    let mut components: Vec<(f64, f64)> = Vec::new();
    if spec.psd_table.len() == 1 {
        // A single row is a spectral line at the nearest resolvable harmonic.
        let (f0, s0) = spec.psd_table[0];
        let k = (f0 / df).round().max(1.0);
        let f = k * df;
        if f >= f_lo && f <= f_hi && s0 > 0.0 {
            components.push((f, (2.0 * s0 * df).sqrt()));
        }
    } else {
        let k_lo = (f_lo / df).ceil().max(1.0) as u64;
        let k_hi = (f_hi / df).floor() as u64;
        for k in k_lo..=k_hi {
            let f = k as f64 * df;
            let s = spec.density(f);
            if s > 0.0 {
                components.push((f, (2.0 * s * df).sqrt()));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let phased: Vec<(f64, f64, f64)> = components
        .into_iter()
        .map(|(f, a)| (2.0 * PI * f, a, rng.random::<f64>() * 2.0 * PI))
        .collect();

    let samples = (0..n)
        .map(|i| {
            let x = i as f64 * spec.grid_step;
            phased.iter().map(|&(k, a, phi)| a * (k * x + phi).cos()).sum()
        })
        .collect();
    TrackProfile::new(spec.grid_step, domain.0, samples, Vec::new())
}

/// Pointwise sum of profiles. Profiles on different grids are resampled
/// linearly onto the finest step over the common domain.
pub fn superpose(parts: &[TrackProfile]) -> Result<TrackProfile> {
    let first = parts
        .first()
        .ok_or_else(|| Error::invalid("parts", "at least one profile is required"))?;
    let bumps: Vec<HarmonicBump> = parts.iter().flat_map(|p| p.bumps.iter().copied()).collect();

    let same_grid = parts.iter().all(|p| {
        p.samples.len() == first.samples.len()
            && (p.grid_step - first.grid_step).abs() <= 1e-12 * first.grid_step
            && (p.origin - first.origin).abs() <= 1e-9 * first.grid_step
    });
    if same_grid {
        let mut samples = vec![0.0; first.len()];
        for p in parts {
            for (acc, v) in samples.iter_mut().zip(&p.samples) {
                *acc += v;
            }
        }
        return TrackProfile::new(first.grid_step, first.origin, samples, bumps);
    }

    let step = parts.iter().map(|p| p.grid_step).fold(f64::INFINITY, f64::min);
    let lo = parts.iter().map(|p| p.origin).fold(f64::NEG_INFINITY, f64::max);
    let hi = parts.iter().map(|p| p.end()).fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return Err(Error::invalid("parts", "profiles do not share a common domain"));
    }
    let n = ((hi - lo) / step).floor() as usize + 1;
    let samples = (0..n)
        .map(|i| {
            let x = (lo + i as f64 * step).min(hi);
            parts.iter().map(|p| p.elevation(x).unwrap_or(0.0)).sum()
        })
        .collect();
    TrackProfile::new(step, lo, samples, bumps)
}

/// Reads a PSD table CSV (`spatial_frequency_per_m, psd_m2m`).
pub fn read_psd_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_two_columns(path)
}

pub fn write_psd_csv(path: &Path, table: &[(f64, f64)]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["spatial_frequency_per_m", "psd_m2m"])?;
    for (f, s) in table {
        wtr.write_record([f.to_string(), s.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_two_columns(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
                Error::Config(format!(
                    "{}: row {}: column {} is not a number",
                    path.display(),
                    line + 2,
                    i + 1
                ))
            })
        };
        rows.push((parse(0)?, parse(1)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_1() -> HarmonicBump {
        HarmonicBump::new(1e-3, 0.5, 8.0).unwrap()
    }

    #[test]
    fn bump_values() {
        let p = harmonic_profile(single_1(), 0.01, (0.0, 20.0)).unwrap();
        assert!((p.elevation(8.25).unwrap() - 1e-3).abs() < 1e-12);
        assert!((p.elevation(8.125).unwrap() - 0.5e-3).abs() < 1e-12);
        assert!(p.elevation(8.0).unwrap().abs() < 1e-15);
        assert!(p.elevation(8.5).unwrap().abs() < 1e-15);
        assert!(p.samples.iter().all(|&v| (0.0..=1e-3 + 1e-15).contains(&v)));
    }

    #[test]
    fn bump_rejects_coarse_grid_and_bad_domain() {
        assert!(harmonic_profile(single_1(), 0.06, (0.0, 20.0)).is_err());
        assert!(harmonic_profile(single_1(), 0.01, (9.0, 20.0)).is_err());
        assert!(HarmonicBump {
            amplitude: 1e-3,
            wavelength: 0.5,
            start: 0.0,
            end: 0.7
        }
        .validate()
        .is_err());
    }

    #[test]
    fn analytic_curvature_at_start() {
        let p = harmonic_profile(single_1(), 0.01, (0.0, 20.0)).unwrap();
        let c = p.second_derivative(8.0).unwrap();
        assert!((c - 0.078_956_835).abs() < 1e-8, "{c}");
        assert_eq!(p.second_derivative(12.0).unwrap(), 0.0);
        assert!(p.second_derivative(0.0).is_err());
        assert!(p.second_derivative(20.0).is_err());
    }

    #[test]
    fn quadratic_profile_has_unit_curvature() {
        let step = 0.01;
        let samples: Vec<f64> = (0..501)
            .map(|i| {
                let x = i as f64 * step;
                0.5 * x * x
            })
            .collect();
        let p = TrackProfile::new(step, 0.0, samples, Vec::new()).unwrap();
        for x in [0.01, 0.5, 1.234, 4.99] {
            assert!((p.second_derivative(x).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_psd_gives_flat_profile() {
        let spec = RandomProfileSpec {
            psd_table: vec![(0.01, 0.0), (1.0, 0.0)],
            wavelength_band: (1.0, 100.0),
            seed: 3,
            grid_step: 0.01,
        };
        let p = random_profile(&spec, (0.0, 50.0)).unwrap();
        assert!(p.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn random_profile_is_seed_deterministic() {
        let spec = RandomProfileSpec::power_law(1e-3, (1.0, 120.0), 3.0, 99, 0.01).unwrap();
        let a = random_profile(&spec, (-10.0, 60.0)).unwrap();
        let b = random_profile(&spec, (-10.0, 60.0)).unwrap();
        assert_eq!(a.samples, b.samples);
        let other = RandomProfileSpec { seed: 100, ..spec };
        let c = random_profile(&other, (-10.0, 60.0)).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn power_law_rms_is_close_to_target() {
        let spec = RandomProfileSpec::power_law(1e-3, (1.0, 120.0), 3.0, 5, 0.02).unwrap();
        let p = random_profile(&spec, (0.0, 1200.0)).unwrap();
        let n = p.len() as f64;
        let mean = p.samples.iter().sum::<f64>() / n;
        let rms = (p.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        // One realization of a red spectrum: only a handful of components carry
        // most of the variance, so the tolerance is loose.
        assert!(mean.abs() < 1e-6, "{mean}");
        assert!(rms > 0.4e-3 && rms < 1.8e-3, "{rms}");
    }

    #[test]
    fn single_line_variance_matches_parseval() {
        let s0 = 2e-6;
        let domain = (0.0, 2000.0);
        let spec = RandomProfileSpec {
            psd_table: vec![(1.0 / 4.0, s0)],
            wavelength_band: (1.0, 100.0),
            seed: 11,
            grid_step: 0.05,
        };
        let p = random_profile(&spec, domain).unwrap();
        let df = 1.0 / (domain.1 - domain.0);
        let n = p.len() as f64;
        let var = p.samples.iter().map(|v| v * v).sum::<f64>() / n;
        assert!((var / (s0 * df) - 1.0).abs() < 0.05, "{var} vs {}", s0 * df);
    }

    #[test]
    fn unresolvable_band_is_rejected() {
        let spec = RandomProfileSpec::power_law(1e-3, (0.01, 10.0), 3.0, 1, 0.01).unwrap();
        assert!(random_profile(&spec, (0.0, 10.0)).is_err());
    }

    #[test]
    fn superpose_identity_and_cancellation() {
        let spec = RandomProfileSpec::power_law(1e-3, (1.0, 120.0), 3.0, 7, 0.01).unwrap();
        let p = random_profile(&spec, (0.0, 30.0)).unwrap();
        let zero = TrackProfile::zeros(0.01, (0.0, 30.0)).unwrap();
        assert_eq!(superpose(&[p.clone(), zero]).unwrap().samples, p.samples);
        let neg = TrackProfile {
            samples: p.samples.iter().map(|v| -v).collect(),
            ..p.clone()
        };
        assert!(superpose(&[p, neg]).unwrap().samples.iter().all(|&v| v == 0.0));
        assert!(superpose(&[]).is_err());
    }

    #[test]
    fn superpose_resamples_to_finest_grid() {
        let coarse = TrackProfile::new(0.1, 0.0, (0..101).map(|i| i as f64 * 0.1).collect(), vec![]).unwrap();
        let fine = TrackProfile::zeros(0.05, (2.0, 12.0)).unwrap();
        let s = superpose(&[coarse, fine]).unwrap();
        assert_eq!(s.grid_step, 0.05);
        assert_eq!(s.origin, 2.0);
        // Linear data survives linear interpolation.
        for (i, v) in s.samples.iter().enumerate() {
            assert!((v - s.position(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_plus_bump_keeps_spike() {
        let spec = RandomProfileSpec::power_law(1e-3, (1.0, 120.0), 3.0, 4, 0.01).unwrap();
        let r = random_profile(&spec, (-10.0, 40.0)).unwrap();
        let b = harmonic_profile(single_1(), 0.01, (-10.0, 40.0)).unwrap();
        let s = superpose(&[r.clone(), b]).unwrap();
        assert_eq!(s.bumps.len(), 1);
        let jump = s.elevation(8.25).unwrap() - r.elevation(8.25).unwrap();
        assert!((jump - 1e-3).abs() < 1e-12);
        // Curvature picks up the analytic bump term on top of the roughness.
        let c_s = s.second_derivative(8.25).unwrap();
        let c_r = r.second_derivative(8.25).unwrap();
        assert!((c_s - c_r + single_1().curvature_amplitude()).abs() < 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = harmonic_profile(single_1(), 0.01, (0.0, 10.0)).unwrap();
        p.write_csv(&path).unwrap();
        let q = TrackProfile::read_csv(&path).unwrap();
        assert_eq!(q.len(), p.len());
        for (a, b) in p.samples.iter().zip(&q.samples) {
            assert_eq!(a, b);
        }
    }
}
