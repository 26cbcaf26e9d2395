//! Scenario configuration and the end-to-end pipeline behind the CLI.
//!
//! A scenario file (TOML) describes the bridge, train, sensors, track and
//! speed policy. Each run is identified by its index within the scenario and
//! gets its own seed derived from the master seed, so any single run can be
//! reproduced in isolation.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{self, BaselineStats, DetectParams, DetectionReport, LocalizeParams};
use crate::dynamics::train::CarGeometry;
use crate::dynamics::{
    resample_spatial, simulate_train_passage_with, AccelerationRecord, BeamModel, SensorLayout, SimulationOptions,
    SpatialSeries, TrainConfig,
};
use crate::error::{Error, Result};
use crate::kmh_to_ms;
use crate::track::{self, HarmonicBump, RandomProfileSpec, TrackProfile};
use crate::wavelet::{self, Axis, IndexSeries, ScaleGrid, WaveletKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamSection {
    pub span: f64,
    pub mass_per_length: f64,
    /// Sets `EI` from the first natural frequency. Ignored when
    /// `flexural_rigidity` is given.
    pub fundamental_hz: f64,
    pub flexural_rigidity: Option<f64>,
    pub damping_ratio: f64,
    pub n_modes: usize,
}

impl Default for BeamSection {
    fn default() -> Self {
        BeamSection {
            span: 32.6,
            mass_per_length: 3.0e4,
            fundamental_hz: 4.6,
            flexural_rigidity: None,
            damping_ratio: 0.02,
            n_modes: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSection {
    /// Explicit positions; when absent, five points at `end_distance`,
    /// `L/4`, `L/2`, `3L/4` and `L - end_distance`.
    pub positions: Option<Vec<f64>>,
    pub end_distance: f64,
}

impl Default for SensorSection {
    fn default() -> Self {
        SensorSection {
            positions: None,
            end_distance: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomSection {
    pub enabled: bool,
    pub rms: f64,
    pub wavelength_band: (f64, f64),
    pub exponent: f64,
    /// Two-column PSD table; overrides the power law when present.
    pub psd_file: Option<PathBuf>,
}

impl Default for RandomSection {
    fn default() -> Self {
        RandomSection {
            enabled: true,
            rms: 1e-3,
            wavelength_band: (1.0, 120.0),
            exponent: 3.0,
            psd_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSection {
    /// Start of the bump (m from the left support).
    pub position: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength: f64,
    #[serde(default = "default_periods")]
    pub periods: usize,
}

fn default_amplitude() -> f64 {
    1e-3
}

fn default_wavelength() -> f64 {
    0.5
}

fn default_periods() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackSection {
    pub grid_step: f64,
    pub random: RandomSection,
    pub bumps: Vec<BumpSection>,
}

impl Default for TrackSection {
    fn default() -> Self {
        TrackSection {
            grid_step: 0.01,
            random: RandomSection::default(),
            bumps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Independent uniform draws.
    Uniform,
    /// Evenly spaced, endpoints included.
    Linspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpeedPolicy {
    Fixed {
        kmh: f64,
    },
    Sweep {
        min_kmh: f64,
        max_kmh: f64,
        count: usize,
        distribution: Distribution,
        seed: u64,
    },
}

impl Default for SpeedPolicy {
    fn default() -> Self {
        SpeedPolicy::Fixed { kmh: 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveletSection {
    pub order: u32,
    pub n_scales: usize,
    /// Resampling step along the head-position axis (m).
    pub spatial_step: f64,
    /// Pseudo-frequency band in cycles per metre.
    pub band_per_m: (f64, f64),
    /// Moving-average window applied to index-1 (m); zero keeps the raw sum.
    pub smoothing_m: f64,
}

impl Default for WaveletSection {
    fn default() -> Self {
        WaveletSection {
            order: 1,
            n_scales: 48,
            spatial_step: 0.14,
            band_per_m: (0.29, 2.9),
            smoothing_m: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectSection {
    pub debounce: usize,
    pub keep_ratio: f64,
    pub min_separation: f64,
    pub prominence_sigmas: f64,
    pub tol: f64,
    pub min_chain: usize,
    /// Subtracted from chain origins. The smoothed index-1 of a wheel group
    /// peaks once its trailing axle has crossed the defect, so the default
    /// is one axle spacing.
    pub offset: f64,
    pub min_support: f64,
}

impl Default for DetectSection {
    fn default() -> Self {
        let d = DetectParams::default();
        DetectSection {
            debounce: d.debounce,
            keep_ratio: d.keep_ratio,
            min_separation: d.min_separation,
            prominence_sigmas: d.prominence_sigmas,
            tol: d.localize.tol,
            min_chain: d.min_chain,
            offset: CarGeometry::default().axle_spacing,
            min_support: d.localize.min_support,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Baseline statistics used by `sweep`; calibrated on the fly when absent.
    pub baseline: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub beam: BeamSection,
    #[serde(default)]
    pub train: CarGeometry,
    #[serde(default)]
    pub sensors: SensorSection,
    #[serde(default)]
    pub track: TrackSection,
    #[serde(default)]
    pub speed: SpeedPolicy,
    #[serde(default)]
    pub simulation: SimulationOptions,
    #[serde(default)]
    pub wavelet: WaveletSection,
    #[serde(default)]
    pub detect: DetectSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn field_error(path: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { field, reason } => Error::Config(format!("{path}.{field}: {reason}")),
        other => Error::Config(format!("{path}: {other}")),
    }
}

impl ScenarioConfig {
    /// Parses and validates a scenario file. Relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = &cfg.track.random.psd_file {
            if p.is_relative() {
                cfg.track.random.psd_file = Some(base.join(p));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let beam = self.beam().map_err(|e| field_error("beam", e))?;
        self.train_at(kmh_to_ms(200.0)).map_err(|e| field_error("train", e))?;
        if !(self.train.axle_spacing > 0.0 && self.train.axle_spacing < self.train.carriage_length) {
            return Err(Error::Config(
                "train.axle_spacing: must lie in (0, carriage_length)".into(),
            ));
        }
        self.sensor_layout(&beam).map_err(|e| field_error("sensors", e))?;
        if !(self.track.grid_step > 0.0) {
            return Err(Error::Config("track.grid_step: must be positive".into()));
        }
        for (i, b) in self.track.bumps.iter().enumerate() {
            let path = format!("track.bumps[{i}]");
            self.bump(b).map_err(|e| field_error(&path, e))?;
            if !(b.position >= 0.0 && b.position + b.wavelength * b.periods as f64 <= beam.span) {
                return Err(Error::Config(format!("{path}.position: bump must lie on the span")));
            }
            if self.track.grid_step > b.wavelength / 10.0 {
                return Err(Error::Config(format!(
                    "{path}.wavelength: needs at least 10 samples per wavelength on the track grid"
                )));
            }
        }
        if self.track.random.enabled {
            if let Some(p) = &self.track.random.psd_file {
                if !p.exists() {
                    return Err(Error::Config(format!(
                        "track.random.psd_file: {} does not exist",
                        p.display()
                    )));
                }
            } else {
                RandomProfileSpec::power_law(
                    self.track.random.rms,
                    self.track.random.wavelength_band,
                    self.track.random.exponent,
                    0,
                    self.track.grid_step,
                )
                .and_then(|s| s.validate())
                .map_err(|e| field_error("track.random", e))?;
            }
        }
        match &self.speed {
            SpeedPolicy::Fixed { kmh } => {
                if !(*kmh > 0.0 && kmh.is_finite()) {
                    return Err(Error::Config("speed.kmh: must be positive".into()));
                }
            }
            SpeedPolicy::Sweep {
                min_kmh,
                max_kmh,
                count,
                ..
            } => {
                if !(*min_kmh > 0.0 && max_kmh > min_kmh) {
                    return Err(Error::Config("speed: sweep needs 0 < min_kmh < max_kmh".into()));
                }
                if *count == 0 {
                    return Err(Error::Config("speed.count: must be at least 1".into()));
                }
            }
        }
        self.simulation.validate().map_err(|e| field_error("simulation", e))?;
        let v_max = kmh_to_ms(self.max_speed_kmh());
        let native = v_max / self.simulation.fs;
        if self.wavelet.spatial_step < native {
            return Err(Error::Config(format!(
                "wavelet.spatial_step: {} m is finer than the native spacing {native} m at the top speed",
                self.wavelet.spatial_step
            )));
        }
        self.scale_grid().map_err(|e| field_error("wavelet", e))?;
        if !(self.wavelet.smoothing_m >= 0.0 && self.wavelet.smoothing_m < self.train.carriage_length / 2.0) {
            return Err(Error::Config(
                "wavelet.smoothing_m: must lie in [0, carriage_length / 2)".into(),
            ));
        }
        self.detect_params().validate().map_err(|e| field_error("detect", e))?;
        Ok(())
    }

    pub fn beam(&self) -> Result<BeamModel> {
        let b = &self.beam;
        match b.flexural_rigidity {
            Some(ei) => BeamModel::new(b.span, b.mass_per_length, ei, b.damping_ratio, b.n_modes),
            None => BeamModel::with_fundamental_frequency(
                b.span,
                b.mass_per_length,
                b.fundamental_hz,
                b.damping_ratio,
                b.n_modes,
            ),
        }
    }

    pub fn train_at(&self, speed: f64) -> Result<TrainConfig> {
        TrainConfig::from_geometry(&self.train, speed)
    }

    pub fn sensor_layout(&self, beam: &BeamModel) -> Result<SensorLayout> {
        match &self.sensors.positions {
            Some(p) => SensorLayout::new(p.clone(), beam.span),
            None => SensorLayout::five_point(beam.span, self.sensors.end_distance),
        }
    }

    pub fn bump(&self, b: &BumpSection) -> Result<HarmonicBump> {
        HarmonicBump::with_periods(b.amplitude, b.wavelength, b.position, b.periods)
    }

    pub fn bumps(&self) -> Result<Vec<HarmonicBump>> {
        self.track.bumps.iter().map(|b| self.bump(b)).collect()
    }

    /// Ground-truth bump positions (start of each bump).
    pub fn bump_positions(&self) -> Vec<f64> {
        self.track.bumps.iter().map(|b| b.position).collect()
    }

    pub fn scale_grid(&self) -> Result<ScaleGrid> {
        wavelet::make_scale_grid(
            self.wavelet.spatial_step,
            self.wavelet.band_per_m,
            self.wavelet.n_scales,
            WaveletKind::GaussianDerivative(self.wavelet.order),
        )
    }

    /// Detection parameters; carriage period, wheel-group offsets and span
    /// come from the train and beam sections.
    pub fn detect_params(&self) -> DetectParams {
        let d = &self.detect;
        let train = self.train_at(kmh_to_ms(200.0)).ok();
        // Axles of one bogie sit one wheelbase apart.
        let gap = 1.2 * self.train.axle_spacing;
        let group_offsets = train
            .map(|t| t.intra_carriage_offsets(gap, d.tol.max(1e-6)))
            .unwrap_or_else(|| vec![0.0]);
        DetectParams {
            debounce: d.debounce,
            keep_ratio: d.keep_ratio,
            min_separation: d.min_separation,
            prominence_sigmas: d.prominence_sigmas,
            carriage_length: self.train.carriage_length,
            min_chain: d.min_chain,
            localize: LocalizeParams {
                span: self.beam.span,
                offset: d.offset,
                tol: d.tol,
                group_offsets,
                min_support: d.min_support,
            },
        }
    }

    pub fn max_speed_kmh(&self) -> f64 {
        match &self.speed {
            SpeedPolicy::Fixed { kmh } => *kmh,
            SpeedPolicy::Sweep { max_kmh, .. } => *max_kmh,
        }
    }

    /// Speeds (km/h) of every run, in run order.
    pub fn speeds_kmh(&self) -> Vec<f64> {
        match &self.speed {
            SpeedPolicy::Fixed { kmh } => vec![*kmh],
            SpeedPolicy::Sweep {
                min_kmh,
                max_kmh,
                count,
                distribution,
                seed,
            } => match distribution {
                Distribution::Uniform => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    (0..*count).map(|_| rng.random_range(*min_kmh..*max_kmh)).collect()
                }
                Distribution::Linspace => {
                    if *count == 1 {
                        return vec![0.5 * (min_kmh + max_kmh)];
                    }
                    (0..*count)
                        .map(|i| min_kmh + (max_kmh - min_kmh) * i as f64 / (*count - 1) as f64)
                        .collect()
                }
            },
        }
    }

    /// Head-position range shared by every run of the scenario.
    pub fn spatial_range(&self) -> (f64, f64) {
        let train_length = self.train_at(kmh_to_ms(200.0)).map_or(0.0, |t| t.length());
        (
            -self.simulation.run_in,
            self.beam.span + train_length + self.simulation.tail,
        )
    }

    /// Copy without bumps, used to calibrate baselines.
    pub fn without_bumps(&self) -> Self {
        let mut c = self.clone();
        c.track.bumps.clear();
        c
    }
}

/// SplitMix64 step.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `index` under `master`: `splitmix64(splitmix64(master) + index)`.
pub fn run_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master).wrapping_add(index))
}

/// Master seed of the baseline ensemble a sweep calibrates on when no stats
/// file is given. Kept apart from the sweep's own seeds so calibration never
/// sees the same roughness realizations.
pub fn calibration_master(master: u64) -> u64 {
    splitmix64(master ^ 0xCA11_B4A7_E000_0000)
}

/// Runs in a self-calibrated sweep baseline.
pub const SELF_CALIBRATION_RUNS: usize = 20;

/// Everything produced by one simulated run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub run_id: u64,
    pub seed: u64,
    pub speed_kmh: f64,
    pub profile: TrackProfile,
    pub record: AccelerationRecord,
    pub spatial: SpatialSeries,
    pub index: IndexSeries,
}

/// Track profile for one run: random roughness (seeded) plus bumps.
pub fn build_profile(cfg: &ScenarioConfig, seed: u64) -> Result<TrackProfile> {
    let span = cfg.beam.span;
    let domain = (-cfg.simulation.run_in - 1.0, span + 1.0);
    let step = cfg.track.grid_step;
    let mut parts = vec![TrackProfile::zeros(step, domain)?];
    let r = &cfg.track.random;
    if r.enabled {
        let spec = match &r.psd_file {
            Some(p) => RandomProfileSpec {
                psd_table: track::read_psd_csv(p)?,
                wavelength_band: r.wavelength_band,
                seed,
                grid_step: step,
            },
            None => RandomProfileSpec::power_law(r.rms, r.wavelength_band, r.exponent, seed, step)?,
        };
        parts.push(track::random_profile(&spec, domain)?);
    }
    for b in cfg.bumps()? {
        parts.push(track::harmonic_profile(b, step, domain)?);
    }
    track::superpose(&parts)
}

/// Track → dynamics → spatial resampling → index-1 for one run.
pub fn simulate_run(cfg: &ScenarioConfig, run_id: u64, speed_kmh: f64, seed: u64) -> Result<RunOutput> {
    let beam = cfg.beam()?;
    let train = cfg.train_at(kmh_to_ms(speed_kmh))?;
    let sensors = cfg.sensor_layout(&beam)?;
    let profile = build_profile(cfg, seed)?;
    let record = simulate_train_passage_with(&beam, &train, &profile, &sensors, &cfg.simulation)?;
    let spatial = resample_spatial(&record, cfg.wavelet.spatial_step, cfg.spatial_range())?;
    let grid = cfg.scale_grid()?;
    let ids: Vec<usize> = (1..=sensors.len()).collect();
    let index = IndexSeries::from_series(run_id, spatial.start, &spatial.series, &ids, &grid, Axis::Space)?
        .smoothed(cfg.wavelet.smoothing_m)?;
    Ok(RunOutput {
        run_id,
        seed,
        speed_kmh,
        profile,
        record,
        spatial,
        index,
    })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Index-1 series of `n_runs` baseline runs. Speeds are drawn from the
/// scenario's policy range; run `i` uses seed `run_seed(master, i)`.
pub fn baseline_indices(
    cfg: &ScenarioConfig,
    n_runs: usize,
    master: u64,
    jobs: Option<usize>,
) -> Result<Vec<IndexSeries>> {
    if !cfg.track.bumps.is_empty() {
        return Err(Error::ContaminatedBaseline(cfg.track.bumps.len()));
    }
    let (lo, hi) = match &cfg.speed {
        SpeedPolicy::Fixed { kmh } => (*kmh, *kmh),
        SpeedPolicy::Sweep { min_kmh, max_kmh, .. } => (*min_kmh, *max_kmh),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ 0x5EED_BA5E));
    let speeds: Vec<f64> = (0..n_runs)
        .map(|_| if hi > lo { rng.random_range(lo..hi) } else { lo })
        .collect();
    let runs: Result<Vec<IndexSeries>> = pool(jobs)?.install(|| {
        speeds
            .par_iter()
            .enumerate()
            .map(|(i, &kmh)| simulate_run(cfg, i as u64, kmh, run_seed(master, i as u64)).map(|r| r.index))
            .collect()
    });
    runs
}

/// Calibrates baseline statistics from `n_runs` bump-free runs.
pub fn calibrate(cfg: &ScenarioConfig, n_runs: usize, master: u64, jobs: Option<usize>) -> Result<BaselineStats> {
    if !cfg.track.bumps.is_empty() {
        return Err(Error::ContaminatedBaseline(cfg.track.bumps.len()));
    }
    if n_runs < detect::MIN_BASELINE_RUNS {
        return Err(Error::TooFewRuns {
            required: detect::MIN_BASELINE_RUNS,
            got: n_runs,
        });
    }
    detect::calibrate_baseline(&baseline_indices(cfg, n_runs, master, jobs)?)
}

/// Detection on one run.
pub fn analyze_run(cfg: &ScenarioConfig, run: &RunOutput, stats: &BaselineStats) -> Result<DetectionReport> {
    detect::analyze(&run.index, stats, &cfg.detect_params(), &cfg.name, run.speed_kmh)
}

/// Outcome of one sweep run, as listed in the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: u64,
    pub seed: u64,
    pub speed_kmh: f64,
    pub detected: bool,
    pub selected: Vec<usize>,
    pub estimates_m: Vec<f64>,
    /// Distance from each true bump to its nearest estimate.
    pub errors_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub master_seed: u64,
    pub runs: usize,
    pub detected: usize,
    pub detection_rate: f64,
    pub localized: usize,
    /// Runs with one estimate per bump, each bump within `detect.tol`.
    pub correct: usize,
    pub truth_m: Vec<f64>,
    pub mean_abs_error_m: Option<f64>,
    pub max_abs_error_m: Option<f64>,
    pub rmse_m: Option<f64>,
    pub speed_min_kmh: f64,
    pub speed_max_kmh: f64,
    pub per_run: Vec<RunSummary>,
}

pub fn summarize_run(cfg: &ScenarioConfig, seed: u64, report: &DetectionReport) -> RunSummary {
    let estimates_m: Vec<f64> = report.estimates.iter().map(|e| e.position_m).collect();
    let errors_m = cfg
        .bump_positions()
        .iter()
        .filter_map(|&t| estimates_m.iter().map(|e| (e - t).abs()).min_by(f64::total_cmp))
        .collect();
    RunSummary {
        run_id: report.run_id,
        seed,
        speed_kmh: report.speed_kmh,
        detected: report.detected(),
        selected: report.selected.clone(),
        estimates_m,
        errors_m,
    }
}

pub fn summarize(cfg: &ScenarioConfig, master: u64, mut per_run: Vec<RunSummary>) -> SweepSummary {
    per_run.sort_by_key(|r| r.run_id);
    let runs = per_run.len();
    let detected = per_run.iter().filter(|r| r.detected).count();
    let localized = per_run.iter().filter(|r| !r.estimates_m.is_empty()).count();
    let truth = cfg.bump_positions();
    let correct = per_run
        .iter()
        .filter(|r| {
            !truth.is_empty() && r.estimates_m.len() == truth.len() && r.errors_m.iter().all(|&e| e <= cfg.detect.tol)
        })
        .count();
    let errs: Vec<f64> = per_run.iter().flat_map(|r| r.errors_m.iter().copied()).collect();
    let (mean, max, rmse) = if errs.is_empty() {
        (None, None, None)
    } else {
        let n = errs.len() as f64;
        (
            Some(errs.iter().sum::<f64>() / n),
            Some(errs.iter().copied().fold(0.0, f64::max)),
            Some((errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt()),
        )
    };
    let speeds = per_run.iter().map(|r| r.speed_kmh);
    SweepSummary {
        scenario: cfg.name.clone(),
        master_seed: master,
        runs,
        detected,
        detection_rate: if runs > 0 { detected as f64 / runs as f64 } else { 0.0 },
        localized,
        correct,
        truth_m: truth,
        mean_abs_error_m: mean,
        max_abs_error_m: max,
        rmse_m: rmse,
        speed_min_kmh: speeds.clone().fold(f64::INFINITY, f64::min),
        speed_max_kmh: speeds.fold(f64::NEG_INFINITY, f64::max),
        per_run,
    }
}

/// Writes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// `<file>.json` next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

/// Per-run metadata, enough to re-run the run on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub run_id: u64,
    pub seed: u64,
    pub master_seed: u64,
    pub speed_kmh: f64,
    pub config: ScenarioConfig,
}

impl RunMeta {
    pub fn load(run_dir: &Path) -> Result<Self> {
        let p = run_dir.join(META_FILE);
        if !p.exists() {
            return Err(Error::MissingArtifact(p));
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?)
    }
}

pub const META_FILE: &str = "meta.json";
pub const PROFILE_FILE: &str = "profile.csv";
pub const ACCEL_FILE: &str = "accel.csv";
pub const ACCEL_SPATIAL_FILE: &str = "accel_spatial.csv";
pub const INDEX_FILE: &str = "index1.csv";
pub const REPORT_FILE: &str = "report.json";
pub const INCOMPLETE_FILE: &str = "INCOMPLETE";

pub fn run_dir_name(run_id: u64) -> String {
    format!("run-{run_id:04}")
}

fn write_spatial_csv(path: &Path, s: &SpatialSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["head_pos_m".to_string()];
    header.extend((1..=s.series.len()).map(|i| format!("acc_s{i}")));
    w.write_record(&header)?;
    for k in 0..s.len() {
        let mut row = vec![s.position(k).to_string()];
        row.extend(s.series.iter().map(|c| c[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the run's CSV artifacts, sidecars and metadata into `dir`.
/// An `INCOMPLETE` marker stays behind if any write fails.
pub fn write_run(dir: &Path, meta: &RunMeta, run: &RunOutput, report: Option<&DetectionReport>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let marker = dir.join(INCOMPLETE_FILE);
    std::fs::write(&marker, "")?;
    write_json(&dir.join(META_FILE), meta)?;
    let info = |what: &str, columns: serde_json::Value| {
        serde_json::json!({
            "artifact": what,
            "columns": columns,
            "run_id": meta.run_id,
            "seed": meta.seed,
            "speed_kmh": meta.speed_kmh,
            "scenario": meta.config.name,
            "meta": META_FILE,
        })
    };
    let p = dir.join(PROFILE_FILE);
    run.profile.write_csv(&p)?;
    write_json(
        &sidecar_path(&p),
        &info("track profile", serde_json::json!(["position_m", "elevation_m"])),
    )?;
    let p = dir.join(ACCEL_FILE);
    run.record.write_csv(&p)?;
    let mut side = info(
        "bridge acceleration vs time",
        serde_json::json!(["t_s", "head_pos_m", "acc_s*"]),
    );
    side["fs"] = serde_json::json!(run.record.fs);
    side["sensor_positions_m"] = serde_json::json!(run.record.sensor_positions);
    side["run_in_m"] = serde_json::json!(run.record.run_in);
    write_json(&sidecar_path(&p), &side)?;
    let p = dir.join(ACCEL_SPATIAL_FILE);
    write_spatial_csv(&p, &run.spatial)?;
    let mut side = info(
        "bridge acceleration vs head position",
        serde_json::json!(["head_pos_m", "acc_s*"]),
    );
    side["spatial_step_m"] = serde_json::json!(run.spatial.spatial_step);
    write_json(&sidecar_path(&p), &side)?;
    run.index.write_csv(&dir.join(INDEX_FILE))?;
    if let Some(r) = report {
        r.save(&dir.join(REPORT_FILE))?;
    }
    std::fs::remove_file(marker)?;
    Ok(())
}

/// Runs every speed of the scenario and writes each run directory. With
/// `stats`, each run is also analyzed and gets a report.
pub fn run_all(
    cfg: &ScenarioConfig,
    master: u64,
    out: &Path,
    stats: Option<&BaselineStats>,
    jobs: Option<usize>,
) -> Result<Vec<RunSummary>> {
    let speeds = cfg.speeds_kmh();
    let results: Result<Vec<Option<RunSummary>>> = pool(jobs)?.install(|| {
        speeds
            .par_iter()
            .enumerate()
            .map(|(i, &kmh)| {
                let run_id = i as u64;
                let seed = run_seed(master, run_id);
                let dir = out.join(run_dir_name(run_id));
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join(INCOMPLETE_FILE), "")?;
                let run = simulate_run(cfg, run_id, kmh, seed)?;
                let report = stats.map(|s| analyze_run(cfg, &run, s)).transpose()?;
                let meta = RunMeta {
                    run_id,
                    seed,
                    master_seed: master,
                    speed_kmh: kmh,
                    config: cfg.clone(),
                };
                write_run(&dir, &meta, &run, report.as_ref())?;
                log::info!("{} run {run_id} at {kmh:.2} km/h done", cfg.name);
                Ok(report.map(|r| summarize_run(cfg, seed, &r)))
            })
            .collect()
    });
    Ok(results?.into_iter().flatten().collect())
}

/// Re-runs detection on a run directory written by `simulate` or `sweep`.
pub fn detect_run_dir(run_dir: &Path, stats: &BaselineStats) -> Result<DetectionReport> {
    let meta = RunMeta::load(run_dir)?;
    let p = run_dir.join(INDEX_FILE);
    if !p.exists() {
        return Err(Error::MissingArtifact(p));
    }
    let index = IndexSeries::read_csv(&p)?;
    let report = detect::analyze(
        &index,
        stats,
        &meta.config.detect_params(),
        &meta.config.name,
        meta.speed_kmh,
    )?;
    report.save(&run_dir.join(REPORT_FILE))?;
    Ok(report)
}

pub mod plot {
    //! Plot bundles: self-describing CSVs with JSON sidecars, derived from a
    //! run directory.

    use std::path::{Path, PathBuf};

    use rustfft::num_complex::Complex64;
    use rustfft::FftPlanner;

    use super::*;

    pub const KINDS: [&str; 6] = ["profile", "accel-spatial", "spectrum", "scalogram", "index1", "peaks"];

    fn require(path: PathBuf) -> Result<PathBuf> {
        if path.exists() {
            Ok(path)
        } else {
            Err(Error::MissingArtifact(path))
        }
    }

    fn copy_with_header(src: &Path, dst: &Path, header: serde_json::Value) -> Result<()> {
        std::fs::copy(src, dst)?;
        write_json(&sidecar_path(dst), &header)
    }

    /// Amplitude spectrum `2|X(f)|/N` of each sensor's time series.
    pub fn amplitude_spectrum(series: &[f64], fs: f64) -> (Vec<f64>, Vec<f64>) {
        let n = series.len();
        let mut buf: Vec<Complex64> = series.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2 + 1;
        let freqs = (0..half).map(|k| k as f64 * fs / n as f64).collect();
        let amps = buf[..half].iter().map(|c| 2.0 * c.norm() / n as f64).collect();
        (freqs, amps)
    }

    /// Sum of squared amplitudes with frequency in `[lo, hi]`.
    pub fn band_energy(freqs: &[f64], amps: &[f64], lo: f64, hi: f64) -> f64 {
        freqs
            .iter()
            .zip(amps)
            .filter(|(f, _)| **f >= lo && **f <= hi)
            .map(|(_, a)| a * a)
            .sum()
    }

    /// Writes the bundle for `kind` into `run_dir/plots/` and returns its path.
    pub fn emit(run_dir: &Path, kind: &str) -> Result<PathBuf> {
        if !KINDS.contains(&kind) {
            return Err(Error::UnknownPlotKind(kind.to_string()));
        }
        let meta = RunMeta::load(run_dir)?;
        let out_dir = run_dir.join("plots");
        std::fs::create_dir_all(&out_dir)?;
        let out = out_dir.join(format!("{kind}.csv"));
        let base = serde_json::json!({
            "kind": kind,
            "run_id": meta.run_id,
            "scenario": meta.config.name,
            "speed_kmh": meta.speed_kmh,
            "seed": meta.seed,
        });
        let with = |extra: serde_json::Value| {
            let mut h = base.clone();
            if let (Some(h), Some(e)) = (h.as_object_mut(), extra.as_object()) {
                h.extend(e.clone());
            }
            h
        };
        match kind {
            "profile" => {
                let src = require(run_dir.join(PROFILE_FILE))?;
                copy_with_header(
                    &src,
                    &out,
                    with(serde_json::json!({
                        "columns": ["position_m", "elevation_m"],
                        "bumps_m": meta.config.bump_positions(),
                    })),
                )?;
            }
            "accel-spatial" => {
                let src = require(run_dir.join(ACCEL_SPATIAL_FILE))?;
                copy_with_header(
                    &src,
                    &out,
                    with(serde_json::json!({
                        "columns": ["head_pos_m", "acc_s*"],
                        "units": "m/s^2",
                    })),
                )?;
            }
            "index1" => {
                let src = require(run_dir.join(INDEX_FILE))?;
                let index = IndexSeries::read_csv(&src)?;
                copy_with_header(
                    &src,
                    &out,
                    with(serde_json::json!({
                        "columns": ["position_m", "S_sensor*"],
                        "sensor_ids": index.sensor_ids,
                    })),
                )?;
            }
            "spectrum" => {
                let beam = meta.config.beam()?;
                let sensors = meta.config.sensor_layout(&beam)?;
                let rec = AccelerationRecord::read_csv(&require(run_dir.join(ACCEL_FILE))?, sensors.positions)?;
                let mut columns = Vec::new();
                let mut freqs = Vec::new();
                let mut energies = Vec::new();
                for s in &rec.series {
                    let (f, a) = amplitude_spectrum(s, rec.fs);
                    energies.push(band_energy(&f, &a, 60.0, 130.0));
                    freqs = f;
                    columns.push(a);
                }
                let mut w = csv::Writer::from_path(&out)?;
                let mut header = vec!["frequency_hz".to_string()];
                header.extend((1..=columns.len()).map(|i| format!("amp_s{i}")));
                w.write_record(&header)?;
                for (k, f) in freqs.iter().enumerate() {
                    let mut row = vec![f.to_string()];
                    row.extend(columns.iter().map(|c| c[k].to_string()));
                    w.write_record(&row)?;
                }
                w.flush()?;
                write_json(
                    &sidecar_path(&out),
                    &with(serde_json::json!({
                        "columns": ["frequency_hz", "amp_s*"],
                        "band_energy_60_130_hz": energies,
                    })),
                )?;
            }
            "scalogram" => {
                let grid = meta.config.scale_grid()?;
                let src = require(run_dir.join(ACCEL_SPATIAL_FILE))?;
                let mut rdr = csv::Reader::from_path(&src)?;
                let mut pos = Vec::new();
                let mut cols: Vec<Vec<f64>> = Vec::new();
                for rec in rdr.records() {
                    let rec = rec?;
                    let vals: Vec<f64> = rec.iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect();
                    pos.push(vals[0]);
                    if cols.is_empty() {
                        cols = vec![Vec::new(); vals.len() - 1];
                    }
                    for (c, v) in cols.iter_mut().zip(&vals[1..]) {
                        c.push(*v);
                    }
                }
                // Sensor with the largest index-1 peak.
                let index = IndexSeries::read_csv(&require(run_dir.join(INDEX_FILE))?)?;
                let sensor = (0..index.values.len())
                    .max_by(|&a, &b| {
                        let ma = index.values[a].iter().copied().fold(0.0, f64::max);
                        let mb = index.values[b].iter().copied().fold(0.0, f64::max);
                        ma.total_cmp(&mb).then(b.cmp(&a))
                    })
                    .unwrap_or(0);
                let origin = pos.first().copied().unwrap_or(0.0);
                let sc = wavelet::cwt(&cols[sensor], &grid, Axis::Space, origin)?;
                sc.write_binary(&out_dir.join("scalogram.bin"))?;
                let mut w = csv::Writer::from_path(&out)?;
                let mut header = vec!["position_m".to_string()];
                header.extend((1..=grid.len()).map(|j| format!("W_a{j}")));
                w.write_record(&header)?;
                for (k, p) in pos.iter().enumerate() {
                    let mut row = vec![p.to_string()];
                    row.extend(sc.coefficients.iter().map(|r| r[k].to_string()));
                    w.write_record(&row)?;
                }
                w.flush()?;
                write_json(
                    &sidecar_path(&out),
                    &with(serde_json::json!({
                        "columns": ["position_m", "W_a*"],
                        "sensor_id": sensor + 1,
                        "scales_m": grid.scales,
                        "pseudo_frequencies_per_m": grid.pseudo_frequencies,
                        "binary": "scalogram.bin",
                    })),
                )?;
            }
            "peaks" => {
                let report = DetectionReport::load(&require(run_dir.join(REPORT_FILE))?)?;
                let mut w = csv::Writer::from_path(&out)?;
                w.write_record(["sensor_id", "position_m", "value", "exceedance", "chain"])?;
                for sp in &report.peaks {
                    for p in &sp.peaks {
                        let chain = sp
                            .chains
                            .iter()
                            .position(|c| c.members.iter().any(|m| m.position == p.position))
                            .map_or(-1, |c| c as i64);
                        w.write_record(&[
                            sp.id.to_string(),
                            p.position.to_string(),
                            p.value.to_string(),
                            p.exceedance.to_string(),
                            chain.to_string(),
                        ])?;
                    }
                }
                w.flush()?;
                write_json(
                    &sidecar_path(&out),
                    &with(serde_json::json!({
                        "columns": ["sensor_id", "position_m", "value", "exceedance", "chain"],
                        "chain_origins_m": report.peaks.iter().map(|sp| serde_json::json!({
                            "sensor_id": sp.id,
                            "origins": sp.chains.iter().map(|c| c.origin).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                        "estimates_m": report.estimates.iter().map(|e| e.position_m).collect::<Vec<_>>(),
                    })),
                )?;
            }
            _ => unreachable!("kind checked above"),
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| run_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(run_seed(7, 3), a[3]);
        assert_ne!(run_seed(8, 3), a[3]);
    }

    #[test]
    fn defaults_validate() {
        let cfg = ScenarioConfig::from_toml("name = \"x\"").unwrap();
        assert_eq!(cfg.detect_params().localize.group_offsets, vec![0.0, 17.5]);
        assert_eq!(cfg.spatial_range(), (-10.0, 32.6 + 195.0 + 10.0));
    }

    #[test]
    fn invalid_fields_name_their_path() {
        let err = ScenarioConfig::from_toml("name = \"x\"\n[beam]\nspan = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("beam"), "{err}");
        let err = ScenarioConfig::from_toml("name = \"x\"\n[[track.bumps]]\nposition = 40.0\n").unwrap_err();
        assert!(err.to_string().contains("track.bumps[0]"), "{err}");
        assert!(ScenarioConfig::from_toml("name = \"x\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn sweep_speeds() {
        let cfg = ScenarioConfig::from_toml(
            "name = \"x\"\n[speed]\nkind = \"sweep\"\nmin_kmh = 200.0\nmax_kmh = 250.0\ncount = 50\ndistribution = \"uniform\"\nseed = 3\n",
        )
        .unwrap();
        let s = cfg.speeds_kmh();
        assert_eq!(s.len(), 50);
        assert!(s.iter().all(|&v| (200.0..250.0).contains(&v)));
        assert_eq!(s, cfg.speeds_kmh());
    }
}
