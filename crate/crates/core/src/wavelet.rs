//! Continuous wavelet transform with derivative-of-Gaussian wavelets and the
//! across-scale coefficient sum used as index-1.
//!
//! With the smoothing kernel `θ(t) = e^(-t²/2)/√(2π)` and `ψ = θ^(m)`, the
//! scaled wavelet is `ψ_a(t) = ψ(t/a)/a`, so
//! `W(a, b) = (x * ψ_a)(b) = a^m dᵐ/dbᵐ (x * θ_a)(b)` with `θ_a(t) = θ(t/a)/a`.
//! For `m = 1`, `|W|` peaks where the smoothed signal changes fastest.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wavelet support half-width in units of scale, beyond the derivative order.
const SUPPORT_BASE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveletKind {
    /// `m`-th derivative of a Gaussian, `m ≥ 1`.
    GaussianDerivative(u32),
}

impl Default for WaveletKind {
    fn default() -> Self {
        WaveletKind::GaussianDerivative(1)
    }
}

impl WaveletKind {
    fn order(&self) -> u32 {
        match *self {
            WaveletKind::GaussianDerivative(m) => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.order()) {
            return Err(Error::invalid("wavelet_order", "derivative order must lie in 1..=8"));
        }
        Ok(())
    }

    /// Center frequency in cycles per unit scale: `√m / 2π`, the peak of
    /// `|ψ̂(ω)| ∝ ωᵐ e^(-ω²/2)`.
    pub fn center_frequency(&self) -> f64 {
        (self.order() as f64).sqrt() / (2.0 * PI)
    }

    /// Truncation half-width in units of scale.
    pub fn support(&self) -> f64 {
        SUPPORT_BASE + self.order() as f64
    }

    /// Mother wavelet value `θ^(m)(t) = (-1)ᵐ Heₘ(t) θ(t)`.
    pub fn evaluate(&self, t: f64) -> f64 {
        let m = self.order();
        // Probabilists' Hermite recurrence: He_{k+1} = t He_k - k He_{k-1}.
        let (mut prev, mut cur) = (1.0, t);
        for k in 1..m {
            let next = t * cur - k as f64 * prev;
            prev = cur;
            cur = next;
        }
        let he = if m == 0 { prev } else { cur };
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * he * (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
    }

    /// Discrete kernel `ψ_a[k]·Δ` for `k ∈ [-h, h]`, shifted to zero sum.
    pub fn kernel(&self, scale: f64, sample_step: f64) -> Vec<f64> {
        let half = self.half_width(scale, sample_step);
        let mut taps: Vec<f64> = (-(half as isize)..=half as isize)
            .map(|k| self.evaluate(k as f64 * sample_step / scale) * sample_step / scale)
            .collect();
        if self.order().is_multiple_of(2) {
            let mean = taps.iter().sum::<f64>() / taps.len() as f64;
            taps.iter_mut().for_each(|t| *t -= mean);
        }
        taps
    }

    /// Kernel half-width in samples.
    pub fn half_width(&self, scale: f64, sample_step: f64) -> usize {
        ((self.support() * scale / sample_step).ceil() as usize).max(1)
    }
}

/// Logarithmically spaced scales with their pseudo-frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    /// Increasing, in units of the input axis (s or m).
    pub scales: Vec<f64>,
    /// Pseudo-frequency per scale (Hz or 1/m), decreasing.
    pub pseudo_frequencies: Vec<f64>,
    pub sample_step: f64,
    pub kind: WaveletKind,
}

impl ScaleGrid {
    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Samples in the longest kernel.
    pub fn longest_support(&self) -> usize {
        self.scales
            .last()
            .map_or(0, |&a| 2 * self.kind.half_width(a, self.sample_step) + 1)
    }
}

/// Minimum number of scales.
pub const MIN_SCALES: usize = 8;

/// Builds `n_scales` log-spaced scales whose pseudo-frequencies run from
/// `band.1` down to `band.0`.
pub fn make_scale_grid(sample_step: f64, band: (f64, f64), n_scales: usize, kind: WaveletKind) -> Result<ScaleGrid> {
    kind.validate()?;
    if n_scales < MIN_SCALES {
        return Err(Error::invalid(
            "n_scales",
            format!("at least {MIN_SCALES} scales are required"),
        ));
    }
    if !(sample_step > 0.0) {
        return Err(Error::invalid("sample_step", "must be positive"));
    }
    let nyquist = 0.5 / sample_step;
    let (f_lo, f_hi) = band;
    if !(f_lo > 0.0 && f_hi > f_lo) {
        return Err(Error::invalid("band", "must be positive and ordered"));
    }
    if f_hi >= nyquist {
        return Err(Error::invalid(
            "band",
            format!("upper edge {f_hi} exceeds the Nyquist frequency {nyquist}"),
        ));
    }
    let fc = kind.center_frequency();
    let (a_min, a_max) = (fc / f_hi, fc / f_lo);
    let ratio = a_max / a_min;
    let scales: Vec<f64> = (0..n_scales)
        .map(|j| {
            if j == n_scales - 1 {
                a_max
            } else {
                a_min * ratio.powf(j as f64 / (n_scales - 1) as f64)
            }
        })
        .collect();
    let pseudo_frequencies = scales.iter().map(|a| fc / a).collect();
    Ok(ScaleGrid {
        scales,
        pseudo_frequencies,
        sample_step,
        kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Time,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convolution {
    Direct,
    Fft,
    /// FFT when the longest kernel exceeds 128 taps.
    #[default]
    Auto,
}

/// Real CWT coefficients, `n_scales × n_positions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalogram {
    pub coefficients: Vec<Vec<f64>>,
    /// `true` where the kernel reaches into the boundary padding.
    pub mask: Vec<Vec<bool>>,
    pub scales: Vec<f64>,
    pub pseudo_frequencies: Vec<f64>,
    pub axis: Axis,
    pub sample_step: f64,
    pub origin: f64,
}

impl Scalogram {
    pub fn n_positions(&self) -> usize {
        self.coefficients.first().map_or(0, Vec::len)
    }

    /// Writes the coefficient matrix as little-endian f64, row-major (one
    /// row per scale), with a JSON header next to it (`<path>.json`).
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(8 * self.scales.len() * self.n_positions());
        for row in &self.coefficients {
            for v in row {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        let mask_runs: Vec<Vec<(usize, usize)>> = self.mask.iter().map(|row| run_lengths(row)).collect();
        let header = serde_json::json!({
            "format": "f64le-row-major",
            "n_scales": self.scales.len(),
            "n_positions": self.n_positions(),
            "scales": self.scales,
            "pseudo_frequencies": self.pseudo_frequencies,
            "axis": self.axis,
            "sample_step": self.sample_step,
            "origin": self.origin,
            "mask_runs": mask_runs,
        });
        let header_path = path.with_extension(format!(
            "{}.json",
            path.extension().and_then(|e| e.to_str()).unwrap_or("bin")
        ));
        std::fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
        Ok(())
    }
}

/// `(start, length)` of each run of `true` values.
fn run_lengths(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, mask.len() - s));
    }
    runs
}

fn symmetric_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    // Half-sample symmetric extension: x[-1] = x[0], x[n] = x[n-1].
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

fn convolve_direct(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = x.len();
    let half = (kernel.len() / 2) as isize;
    (0..n as isize)
        .map(|b| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, &w)| w * x[symmetric_index(b - (j as isize - half), n)])
                .sum()
        })
        .collect()
}

fn convolve_fft(x: &[f64], kernel: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = x.len();
    let half = kernel.len() / 2;
    let padded_len = n + 2 * half;
    let size = (padded_len + kernel.len()).next_power_of_two();
    let mut a: Vec<Complex64> = (0..size)
        .map(|i| {
            if i < padded_len {
                Complex64::new(x[symmetric_index(i as isize - half as isize, n)], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut k: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(kernel.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    fwd.process(&mut a);
    fwd.process(&mut k);
    for (u, w) in a.iter_mut().zip(&k) {
        *u *= w;
    }
    inv.process(&mut a);
    // Full convolution index of output b is b + 2·half.
    (0..n).map(|b| a[b + 2 * half].re / size as f64).collect()
}

/// Continuous wavelet transform of a uniformly sampled series.
pub fn cwt(series: &[f64], grid: &ScaleGrid, axis: Axis, origin: f64) -> Result<Scalogram> {
    cwt_with(series, grid, axis, origin, Convolution::Auto)
}

pub fn cwt_with(series: &[f64], grid: &ScaleGrid, axis: Axis, origin: f64, method: Convolution) -> Result<Scalogram> {
    let required = 4 * grid.longest_support();
    if series.len() < required {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            required,
        });
    }
    let n = series.len();
    let use_fft = match method {
        Convolution::Direct => false,
        Convolution::Fft => true,
        Convolution::Auto => grid.longest_support() > 128,
    };
    let mut planner = FftPlanner::new();
    let mut coefficients = Vec::with_capacity(grid.len());
    let mut mask = Vec::with_capacity(grid.len());
    for &a in &grid.scales {
        let kernel = grid.kind.kernel(a, grid.sample_step);
        let row = if use_fft {
            convolve_fft(series, &kernel, &mut planner)
        } else {
            convolve_direct(series, &kernel)
        };
        let half = kernel.len() / 2;
        mask.push((0..n).map(|b| b < half || b + half >= n).collect());
        coefficients.push(row);
    }
    Ok(Scalogram {
        coefficients,
        mask,
        scales: grid.scales.clone(),
        pseudo_frequencies: grid.pseudo_frequencies.clone(),
        axis,
        sample_step: grid.sample_step,
        origin,
    })
}

/// Index-1 curve for one series: `S(b) = Σ_j |W(a_j, b)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCurve {
    pub values: Vec<f64>,
    /// `true` where no scale is masked.
    pub interior: Vec<bool>,
}

pub fn coefficient_sum(scalogram: &Scalogram) -> IndexCurve {
    let n = scalogram.n_positions();
    let mut values = vec![0.0; n];
    let mut interior = vec![true; n];
    for (row, mask) in scalogram.coefficients.iter().zip(&scalogram.mask) {
        for b in 0..n {
            values[b] += row[b].abs();
            interior[b] &= !mask[b];
        }
    }
    IndexCurve { values, interior }
}

/// Index-1 curves for all sensors of one run on a common position grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSeries {
    pub run_id: u64,
    pub origin: f64,
    pub step: f64,
    pub sensor_ids: Vec<usize>,
    /// One curve per sensor, aligned with `sensor_ids`.
    pub values: Vec<Vec<f64>>,
    pub interior: Vec<bool>,
    /// Width (m) of the moving average applied by [`IndexSeries::smoothed`];
    /// zero for the raw coefficient sum.
    #[serde(default)]
    pub smoothing_m: f64,
}

impl IndexSeries {
    /// Runs the CWT on each series and stacks the coefficient sums.
    pub fn from_series(
        run_id: u64,
        origin: f64,
        series: &[Vec<f64>],
        sensor_ids: &[usize],
        grid: &ScaleGrid,
        axis: Axis,
    ) -> Result<Self> {
        if series.len() != sensor_ids.len() {
            return Err(Error::SensorMismatch(format!(
                "{} series for {} sensor ids",
                series.len(),
                sensor_ids.len()
            )));
        }
        let mut values = Vec::with_capacity(series.len());
        let mut interior: Option<Vec<bool>> = None;
        for s in series {
            let curve = coefficient_sum(&cwt(s, grid, axis, origin)?);
            interior = Some(match interior {
                None => curve.interior,
                Some(prev) => prev.iter().zip(&curve.interior).map(|(a, b)| *a && *b).collect(),
            });
            values.push(curve.values);
        }
        Ok(IndexSeries {
            run_id,
            origin,
            step: grid.sample_step,
            sensor_ids: sensor_ids.to_vec(),
            values,
            interior: interior.unwrap_or_default(),
            smoothing_m: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn position(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    pub fn curve(&self, sensor_id: usize) -> Option<&[f64]> {
        self.sensor_ids
            .iter()
            .position(|&id| id == sensor_id)
            .map(|i| self.values[i].as_slice())
    }

    /// Centered moving average over `window_m` metres.
    ///
    /// A real wavelet leaves |W| oscillating at twice the local vibration
    /// frequency, so the raw sum is ragged at the sub-metre scale. Averaging
    /// keeps the envelope. The interior shrinks by the half-window at both
    /// ends. A zero window returns the series unchanged.
    pub fn smoothed(&self, window_m: f64) -> Result<Self> {
        if !(window_m >= 0.0 && window_m.is_finite()) {
            return Err(Error::invalid("smoothing_m", "must be finite and non-negative"));
        }
        if self.smoothing_m > 0.0 && window_m > 0.0 {
            return Err(Error::invalid("smoothing_m", "series is already smoothed"));
        }
        let half = (0.5 * window_m / self.step).round() as usize;
        if half == 0 {
            return Ok(self.clone());
        }
        let n = self.len();
        let values = self
            .values
            .iter()
            .map(|c| {
                let mut prefix = vec![0.0; n + 1];
                for (i, v) in c.iter().enumerate() {
                    prefix[i + 1] = prefix[i] + v;
                }
                (0..n)
                    .map(|i| {
                        let lo = i.saturating_sub(half);
                        let hi = (i + half + 1).min(n);
                        (prefix[hi] - prefix[lo]) / (hi - lo) as f64
                    })
                    .collect()
            })
            .collect();
        let interior = (0..n)
            .map(|i| i >= half && i + half < n && self.interior[i - half..=i + half].iter().all(|&b| b))
            .collect();
        Ok(IndexSeries {
            values,
            interior,
            smoothing_m: window_m,
            ..self.clone()
        })
    }

    /// Multiplies every curve by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        IndexSeries {
            values: self
                .values
                .iter()
                .map(|c| c.iter().map(|v| v * factor).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Writes `position_m, S_sensor1 … S_sensorN` plus a JSON sidecar
    /// (`<path>.json`) holding run id, sensor ids and the interior range.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header = vec!["position_m".to_string()];
        header.extend(self.sensor_ids.iter().map(|id| format!("S_sensor{id}")));
        wtr.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![self.position(k).to_string()];
            row.extend(self.values.iter().map(|c| c[k].to_string()));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        let first = self.interior.iter().position(|&b| b).unwrap_or(self.len());
        let last = self.interior.iter().rposition(|&b| b).map_or(first, |i| i + 1);
        let meta = serde_json::json!({
            "run_id": self.run_id,
            "origin": self.origin,
            "step": self.step,
            "sensor_ids": self.sensor_ids,
            "interior_start": first,
            "interior_end": last,
            "smoothing_m": self.smoothing_m,
        });
        std::fs::write(sidecar(path), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar(path))?)?;
        let bad = |what: &str| Error::Config(format!("{}: sidecar is missing `{what}`", path.display()));
        let run_id = meta["run_id"].as_u64().ok_or_else(|| bad("run_id"))?;
        let origin = meta["origin"].as_f64().ok_or_else(|| bad("origin"))?;
        let step = meta["step"].as_f64().ok_or_else(|| bad("step"))?;
        let sensor_ids: Vec<usize> = serde_json::from_value(meta["sensor_ids"].clone())?;
        let start = meta["interior_start"].as_u64().ok_or_else(|| bad("interior_start"))? as usize;
        let end = meta["interior_end"].as_u64().ok_or_else(|| bad("interior_end"))? as usize;
        let mut rdr = csv::Reader::from_path(path)?;
        let mut values = vec![Vec::new(); sensor_ids.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (i, col) in values.iter_mut().enumerate() {
                let v = rec
                    .get(i + 1)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("{}: malformed number", path.display())))?;
                col.push(v);
            }
        }
        let n = values.first().map_or(0, Vec::len);
        let interior = (0..n).map(|k| k >= start && k < end).collect();
        Ok(IndexSeries {
            run_id,
            origin,
            step,
            sensor_ids,
            values,
            interior,
            smoothing_m: meta["smoothing_m"].as_f64().unwrap_or(0.0),
        })
    }
}

fn sidecar(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    name.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ScaleGrid {
        make_scale_grid(1.0 / 500.0, (20.0, 200.0), 32, WaveletKind::default()).unwrap()
    }

    #[test]
    fn scale_grid_contract() {
        let g = grid();
        assert_eq!(g.len(), 32);
        assert!((g.pseudo_frequencies[0] / 200.0 - 1.0).abs() < 0.01);
        assert!((g.pseudo_frequencies[31] / 20.0 - 1.0).abs() < 0.01);
        assert!(g.scales.windows(2).all(|w| w[1] > w[0]));
        let g64 = make_scale_grid(1.0 / 500.0, (20.0, 200.0), 64, WaveletKind::default()).unwrap();
        assert_eq!(g64.scales[0], g.scales[0]);
        assert_eq!(g64.scales[63], g.scales[31]);
        assert!(make_scale_grid(1.0 / 500.0, (20.0, 200.0), 1, WaveletKind::default()).is_err());
        assert!(make_scale_grid(1.0 / 500.0, (20.0, 260.0), 32, WaveletKind::default()).is_err());
    }

    #[test]
    fn smoothing_averages_and_shrinks_interior() {
        let ix = IndexSeries {
            run_id: 0,
            origin: 0.0,
            step: 0.5,
            sensor_ids: vec![1],
            values: vec![vec![0.0, 3.0, 0.0, 3.0, 0.0, 3.0, 0.0]],
            interior: vec![true; 7],
            smoothing_m: 0.0,
        };
        let s = ix.smoothed(1.0).unwrap();
        assert_eq!(s.values[0][1..6], [1.0, 2.0, 1.0, 2.0, 1.0]);
        assert_eq!(s.interior, [false, true, true, true, true, true, false]);
        assert_eq!(s.smoothing_m, 1.0);
        assert!(s.smoothed(1.0).is_err());
        assert_eq!(ix.smoothed(0.0).unwrap(), ix);
    }

    #[test]
    fn kernels_have_zero_mean() {
        for m in 1..=4 {
            let kind = WaveletKind::GaussianDerivative(m);
            for a in [0.003, 0.01, 0.05] {
                let k = kind.kernel(a, 1.0 / 500.0);
                let l1: f64 = k.iter().map(|v| v.abs()).sum();
                assert!(k.iter().sum::<f64>().abs() < 1e-10 * l1, "order {m}, scale {a}");
            }
        }
    }

    #[test]
    fn hermite_derivatives() {
        let h = 1e-4;
        let g1 = WaveletKind::GaussianDerivative(1);
        let g2 = WaveletKind::GaussianDerivative(2);
        for t in [-1.3, 0.2, 2.0] {
            let fd = (g1.evaluate(t + h) - g1.evaluate(t - h)) / (2.0 * h);
            assert!((fd - g2.evaluate(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_series_gives_zero_scalogram() {
        let s = cwt(&vec![0.0; 800], &grid(), Axis::Time, 0.0).unwrap();
        assert!(s.coefficients.iter().flatten().all(|&v| v == 0.0));
        let idx = coefficient_sum(&s);
        assert!(idx.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_series_is_rejected() {
        assert!(matches!(
            cwt(&[1.0; 20], &grid(), Axis::Time, 0.0),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn step_is_located_at_fine_scales() {
        let n = 600;
        let p = 311;
        let x: Vec<f64> = (0..n).map(|i| if i >= p { 1.0 } else { 0.0 }).collect();
        let s = cwt(&x, &grid(), Axis::Time, 0.0).unwrap();
        let row = &s.coefficients[0];
        let arg = (0..n).max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs())).unwrap();
        assert!((arg as isize - p as isize).abs() <= 2, "{arg}");
    }

    #[test]
    fn homogeneity_of_coefficient_sum() {
        let x: Vec<f64> = (0..700)
            .map(|i| ((i as f64) * 0.37).sin() + 0.1 * i as f64 % 3.0)
            .collect();
        let s = cwt(&x, &grid(), Axis::Time, 0.0).unwrap();
        let mut s2 = s.clone();
        for row in &mut s2.coefficients {
            row.iter_mut().for_each(|v| *v *= 2.5);
        }
        let a = coefficient_sum(&s);
        let b = coefficient_sum(&s2);
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((2.5 * u - v).abs() <= 1e-12 * v.abs());
        }
    }

    #[test]
    fn mask_covers_edges_only() {
        let s = cwt(&vec![1.0; 800], &grid(), Axis::Time, 0.0).unwrap();
        let idx = coefficient_sum(&s);
        assert!(!idx.interior[0] && !idx.interior[799]);
        assert!(idx.interior[400]);
        assert_eq!(run_lengths(&[true, true, false, true]), vec![(0, 2), (3, 1)]);
    }
}
