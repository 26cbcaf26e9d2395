use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-sensor bridge acceleration sampled in time.
///
/// The train head sits at `speed·t - run_in` at time `t`, so the leading
/// axle reaches the left support at `t = run_in / speed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelerationRecord {
    pub fs: f64,
    pub t0: f64,
    pub speed: f64,
    pub run_in: f64,
    pub sensor_positions: Vec<f64>,
    /// One series per sensor (m/s²), all the same length.
    pub series: Vec<Vec<f64>>,
}

impl AccelerationRecord {
    pub fn len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.fs
    }

    pub fn head_position(&self, t: f64) -> f64 {
        self.speed * t - self.run_in
    }

    /// Head positions covered by the record.
    pub fn head_range(&self) -> (f64, f64) {
        let n = self.len().max(1);
        (self.head_position(self.time(0)), self.head_position(self.time(n - 1)))
    }

    /// Writes `t_s, head_pos_m, acc_s1 … acc_sN`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header = vec!["t_s".to_string(), "head_pos_m".to_string()];
        header.extend((1..=self.series.len()).map(|i| format!("acc_s{i}")));
        wtr.write_record(&header)?;
        for k in 0..self.len() {
            let t = self.time(k);
            let mut row = vec![t.to_string(), self.head_position(t).to_string()];
            row.extend(self.series.iter().map(|s| s[k].to_string()));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a record written by [`write_csv`](Self::write_csv). Sample rate,
    /// speed and run-in are recovered from the time and position columns.
    pub fn read_csv(path: &Path, sensor_positions: Vec<f64>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let n_sensors = rdr.headers()?.len().saturating_sub(2);
        let mut t = Vec::new();
        let mut x = Vec::new();
        let mut series = vec![Vec::new(); n_sensors];
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("{}: malformed number", path.display())))
            };
            t.push(num(0)?);
            x.push(num(1)?);
            for (s, col) in series.iter_mut().zip(2..) {
                s.push(num(col)?);
            }
        }
        if t.len() < 2 {
            return Err(Error::Config(format!("{}: too few rows", path.display())));
        }
        let n = t.len() - 1;
        let fs = n as f64 / (t[n] - t[0]);
        let speed = (x[n] - x[0]) / (t[n] - t[0]);
        let run_in = speed * t[0] - x[0];
        if sensor_positions.len() != n_sensors {
            return Err(Error::SensorMismatch(format!(
                "{} sensor positions for {n_sensors} columns",
                sensor_positions.len()
            )));
        }
        Ok(AccelerationRecord {
            fs,
            t0: t[0],
            speed,
            run_in,
            sensor_positions,
            series,
        })
    }
}

/// Per-sensor acceleration against train-head position on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialSeries {
    pub spatial_step: f64,
    pub start: f64,
    pub series: Vec<Vec<f64>>,
}

impl SpatialSeries {
    pub fn len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, k: usize) -> f64 {
        self.start + k as f64 * self.spatial_step
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.position(k)).collect()
    }
}

/// Linearly interpolates every sensor series onto head positions
/// `range.0 + k·spatial_step` up to `range.1`. Runs at different speeds over
/// the same range come out with the same number of samples.
pub fn resample_spatial(record: &AccelerationRecord, spatial_step: f64, range: (f64, f64)) -> Result<SpatialSeries> {
    let native = record.speed / record.fs;
    if !(spatial_step > 0.0) || spatial_step < native * (1.0 - 1e-9) {
        return Err(Error::invalid(
            "spatial_step",
            format!("{spatial_step} m is finer than the native spacing {native} m"),
        ));
    }
    let (lo, hi) = record.head_range();
    let slack = 1e-9 * native;
    if range.0 < lo - slack || range.1 > hi + slack || !(range.1 > range.0) {
        return Err(Error::OutOfRange {
            x: if range.0 < lo { range.0 } else { range.1 },
            min: lo,
            max: hi,
        });
    }
    let count = ((range.1 - range.0) / spatial_step + 1e-9).floor() as usize + 1;
    let n = record.len();
    let series = record
        .series
        .iter()
        .map(|s| {
            (0..count)
                .map(|k| {
                    let x = range.0 + k as f64 * spatial_step;
                    let t = (x + record.run_in) / record.speed;
                    let u = ((t - record.t0) * record.fs).clamp(0.0, (n - 1) as f64);
                    let i = (u.floor() as usize).min(n - 2);
                    let frac = u - i as f64;
                    s[i] * (1.0 - frac) + s[i + 1] * frac
                })
                .collect()
        })
        .collect();
    Ok(SpatialSeries {
        spatial_step,
        start: range.0,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_record(speed: f64) -> AccelerationRecord {
        let fs = 500.0;
        let n = 3000;
        AccelerationRecord {
            fs,
            t0: 0.0,
            speed,
            run_in: 10.0,
            sensor_positions: vec![1.0],
            series: vec![(0..n).map(|k| 3.0 * k as f64 / fs + 1.0).collect()],
        }
    }

    #[test]
    fn native_step_is_identity() {
        let r = linear_record(50.0);
        let s = resample_spatial(&r, 0.1, (-10.0, 100.0)).unwrap();
        for k in 0..s.len() {
            assert!((s.series[0][k] - r.series[0][k]).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_in_time_is_linear_in_position() {
        let r = linear_record(50.0);
        let s = resample_spatial(&r, 0.37, (0.0, 80.0)).unwrap();
        for k in 0..s.len() {
            let t = (s.position(k) + 10.0) / 50.0;
            assert!((s.series[0][k] - (3.0 * t + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn different_speeds_align() {
        let a = resample_spatial(&linear_record(200.0 / 3.6), 0.15, (0.0, 60.0)).unwrap();
        let b = resample_spatial(&linear_record(250.0 / 3.6), 0.15, (0.0, 60.0)).unwrap();
        assert_eq!(a.len(), b.len());
    }

    #[test]
    fn rejects_out_of_range_and_fine_steps() {
        let r = linear_record(50.0);
        assert!(resample_spatial(&r, 0.1, (-20.0, 10.0)).is_err());
        assert!(resample_spatial(&r, 0.05, (0.0, 10.0)).is_err());
    }
}
