use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One wheelset: offset behind the train head, static load and unsprung mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axle {
    pub offset: f64,
    pub static_load: f64,
    pub unsprung_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub axles: Vec<Axle>,
    /// m/s
    pub speed: f64,
    pub carriage_length: f64,
}

/// Geometry used to build uniform multi-car trains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarGeometry {
    pub cars: usize,
    pub carriage_length: f64,
    /// Distance from car center to each bogie center.
    pub bogie_half_spacing: f64,
    /// Wheelbase within a bogie.
    pub axle_spacing: f64,
    pub axle_load: f64,
    pub unsprung_mass: f64,
}

impl Default for CarGeometry {
    /// Eight 25 m cars, bogie centers ±8.75 m, 2.5 m wheelbase, 140 kN
    /// axles with 1200 kg unsprung mass.
    fn default() -> Self {
        CarGeometry {
            cars: 8,
            carriage_length: 25.0,
            bogie_half_spacing: 8.75,
            axle_spacing: 2.5,
            axle_load: 1.4e5,
            unsprung_mass: 1200.0,
        }
    }
}

impl TrainConfig {
    pub fn new(axles: Vec<Axle>, speed: f64, carriage_length: f64) -> Result<Self> {
        let train = TrainConfig {
            axles,
            speed,
            carriage_length,
        };
        train.validate()?;
        Ok(train)
    }

    /// Uniform train; offsets are measured from the leading axle.
    pub fn from_geometry(geometry: &CarGeometry, speed: f64) -> Result<Self> {
        let g = geometry;
        if g.cars == 0 {
            return Err(Error::invalid("cars", "must be at least 1"));
        }
        let center = 0.5 * g.carriage_length;
        let half_base = 0.5 * g.axle_spacing;
        let in_car = [
            center - g.bogie_half_spacing - half_base,
            center - g.bogie_half_spacing + half_base,
            center + g.bogie_half_spacing - half_base,
            center + g.bogie_half_spacing + half_base,
        ];
        let lead = in_car[0];
        let axles = (0..g.cars)
            .flat_map(|car| {
                in_car.iter().map(move |&o| Axle {
                    offset: car as f64 * g.carriage_length + o - lead,
                    static_load: g.axle_load,
                    unsprung_mass: g.unsprung_mass,
                })
            })
            .collect();
        Self::new(axles, speed, g.carriage_length)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .axles
            .first()
            .ok_or_else(|| Error::invalid("axles", "at least one axle is required"))?;
        if first.offset != 0.0 {
            return Err(Error::invalid("axles", "the first axle offset must be 0"));
        }
        for w in self.axles.windows(2) {
            if !(w[1].offset > w[0].offset) {
                return Err(Error::invalid("axles", "offsets must be strictly increasing"));
            }
        }
        for a in &self.axles {
            if !(a.static_load >= 0.0 && a.unsprung_mass >= 0.0) {
                return Err(Error::invalid("axles", "loads and masses must be nonnegative"));
            }
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::invalid("speed", "must be positive"));
        }
        if !(self.carriage_length > 0.0) {
            return Err(Error::invalid("carriage_length", "must be positive"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.axles.last().map_or(0.0, |a| a.offset)
    }

    pub fn with_speed(&self, speed: f64) -> Self {
        TrainConfig { speed, ..self.clone() }
    }

    /// Centers of axle groups (bogies): axles closer than `max_gap` join the
    /// same group.
    pub fn group_centers(&self, max_gap: f64) -> Vec<f64> {
        let mut centers = Vec::new();
        let mut group: Vec<f64> = Vec::new();
        for a in &self.axles {
            if let Some(&last) = group.last() {
                if a.offset - last > max_gap {
                    centers.push(group.iter().sum::<f64>() / group.len() as f64);
                    group.clear();
                }
            }
            group.push(a.offset);
        }
        if !group.is_empty() {
            centers.push(group.iter().sum::<f64>() / group.len() as f64);
        }
        centers
    }

    /// Distinct offsets of axle groups within one carriage period, relative
    /// to the first group and sorted. Always starts with 0.
    pub fn intra_carriage_offsets(&self, max_gap: f64, tol: f64) -> Vec<f64> {
        let centers = self.group_centers(max_gap);
        let Some(&first) = centers.first() else {
            return vec![0.0];
        };
        let period = self.carriage_length;
        let mut offsets: Vec<f64> = Vec::new();
        for c in centers {
            let d = (c - first).rem_euclid(period);
            let d = if period - d < tol { 0.0 } else { d };
            if !offsets.iter().any(|&o| (o - d).abs() < tol) {
                offsets.push(d);
            }
        }
        offsets.sort_by(f64::total_cmp);
        offsets
    }
}

/// Sensor coordinates along the span, strictly inside `(0, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub positions: Vec<f64>,
}

impl SensorLayout {
    pub fn new(positions: Vec<f64>, span: f64) -> Result<Self> {
        let layout = SensorLayout { positions };
        layout.validate(span)?;
        Ok(layout)
    }

    /// `{e, L/4, L/2, 3L/4, L - e}` for end distance `e`.
    pub fn five_point(span: f64, end_distance: f64) -> Result<Self> {
        Self::new(
            vec![end_distance, 0.25 * span, 0.5 * span, 0.75 * span, span - end_distance],
            span,
        )
    }

    pub fn validate(&self, span: f64) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::invalid("sensors", "at least one sensor is required"));
        }
        if self.positions.iter().any(|&x| !(x > 0.0 && x < span)) {
            return Err(Error::invalid("sensors", "positions must lie strictly inside the span"));
        }
        if self.positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sensors", "positions must be sorted and distinct"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
