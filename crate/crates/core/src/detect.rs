//! Threshold calibration, detection, sensor screening and localization.
//!
//! A sensor is flagged when its index-1 curve stays above `F = μ + 3σ` for
//! `debounce` consecutive interior samples. Flagged sensors are ranked by
//! mutation degree `max S / F`. Local peaks of index-1 (index-2) repeat once
//! per carriage because every car's wheels cross the same defect, so peaks are
//! chained at the carriage period and each chain origin marks a defect.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::IndexSeries;

/// Minimum number of distinct baseline runs.
pub const MIN_BASELINE_RUNS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorStats {
    pub id: usize,
    pub mu: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub sensors: Vec<SensorStats>,
    pub n_runs: usize,
    /// Smoothing window of the calibration runs; runs under test must match.
    #[serde(default)]
    pub smoothing_m: f64,
}

impl BaselineStats {
    /// Builds stats from `(mu, sigma)` pairs.
    pub fn from_moments(ids: &[usize], moments: &[(f64, f64)]) -> Self {
        BaselineStats {
            sensors: ids
                .iter()
                .zip(moments)
                .map(|(&id, &(mu, sigma))| SensorStats {
                    id,
                    mu,
                    sigma,
                    threshold: mu + 3.0 * sigma,
                    n_samples: 0,
                })
                .collect(),
            n_runs: 0,
            smoothing_m: 0.0,
        }
    }

    pub fn sensor(&self, id: usize) -> Option<&SensorStats> {
        self.sensors.iter().find(|s| s.id == id)
    }

    pub fn ids(&self) -> Vec<usize> {
        self.sensors.iter().map(|s| s.id).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Loads stats and recomputes every threshold from `mu` and `sigma`.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let mut stats: BaselineStats = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        for s in &mut stats.sensors {
            s.threshold = s.mu + 3.0 * s.sigma;
        }
        Ok(stats)
    }

    fn check_sensors(&self, index: &IndexSeries) -> Result<()> {
        if self.ids() != index.sensor_ids {
            return Err(Error::SensorMismatch(format!(
                "baseline has {:?}, run {} has {:?}",
                self.ids(),
                index.run_id,
                index.sensor_ids
            )));
        }
        if (self.smoothing_m - index.smoothing_m).abs() > 1e-9 {
            return Err(Error::invalid(
                "smoothing_m",
                format!(
                    "baseline was smoothed over {} m, run {} over {} m",
                    self.smoothing_m, index.run_id, index.smoothing_m
                ),
            ));
        }
        Ok(())
    }
}

/// Pools interior index-1 samples per sensor across runs.
///
/// Runs are sorted by id and repeated ids are counted once.
pub fn calibrate_baseline(runs: &[IndexSeries]) -> Result<BaselineStats> {
    let mut by_id: BTreeMap<u64, &IndexSeries> = BTreeMap::new();
    for run in runs {
        by_id.entry(run.run_id).or_insert(run);
    }
    if by_id.len() < MIN_BASELINE_RUNS {
        return Err(Error::TooFewRuns {
            required: MIN_BASELINE_RUNS,
            got: by_id.len(),
        });
    }
    let ids = by_id.values().next().map(|r| r.sensor_ids.clone()).unwrap_or_default();
    for run in by_id.values() {
        if run.sensor_ids != ids {
            return Err(Error::SensorMismatch(format!(
                "run {} has sensors {:?}, expected {:?}",
                run.run_id, run.sensor_ids, ids
            )));
        }
    }
    let smoothing_m = by_id.values().next().map_or(0.0, |r| r.smoothing_m);
    if by_id.values().any(|r| (r.smoothing_m - smoothing_m).abs() > 1e-9) {
        return Err(Error::invalid("baseline_runs", "runs differ in smoothing window"));
    }
    let mut sensors = Vec::with_capacity(ids.len());
    for (col, &id) in ids.iter().enumerate() {
        let pooled = || {
            by_id.values().flat_map(move |r| {
                r.values[col]
                    .iter()
                    .zip(&r.interior)
                    .filter(|(_, &keep)| keep)
                    .map(|(&v, _)| v)
            })
        };
        let n = pooled().count();
        if n < 2 {
            return Err(Error::invalid("baseline_runs", "fewer than two interior samples"));
        }
        let mu = pooled().sum::<f64>() / n as f64;
        let var = pooled().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (n - 1) as f64;
        let sigma = var.sqrt();
        sensors.push(SensorStats {
            id,
            mu,
            sigma,
            threshold: mu + 3.0 * sigma,
            n_samples: n,
        });
    }
    Ok(BaselineStats {
        sensors,
        n_runs: by_id.len(),
        smoothing_m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorFlag {
    pub id: usize,
    pub flagged: bool,
    /// `max S / F` over interior samples.
    pub mutation_degree: f64,
}

/// Flags each sensor whose index-1 exceeds its threshold on at least
/// `debounce` consecutive interior samples.
pub fn detect(index: &IndexSeries, stats: &BaselineStats, debounce: usize) -> Result<Vec<SensorFlag>> {
    if debounce == 0 {
        return Err(Error::invalid("debounce", "must be at least 1"));
    }
    stats.check_sensors(index)?;
    Ok(stats
        .sensors
        .iter()
        .zip(&index.values)
        .map(|(s, curve)| {
            let mut run = 0;
            let mut flagged = false;
            let mut max = 0.0_f64;
            for (&v, &keep) in curve.iter().zip(&index.interior) {
                if !keep {
                    run = 0;
                    continue;
                }
                max = max.max(v);
                if v > s.threshold {
                    run += 1;
                    flagged |= run >= debounce;
                } else {
                    run = 0;
                }
            }
            let mutation_degree = if s.threshold > 0.0 {
                max / s.threshold
            } else if max > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            SensorFlag {
                id: s.id,
                flagged,
                mutation_degree,
            }
        })
        .collect())
}

/// Keeps flagged sensors whose mutation degree reaches `keep_ratio` times the
/// largest degree among flagged sensors. Ids are returned in ascending order.
pub fn screen_sensors(flags: &[SensorFlag], keep_ratio: f64) -> Result<Vec<usize>> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(Error::invalid("keep_ratio", "must lie in (0, 1]"));
    }
    let top = flags
        .iter()
        .filter(|f| f.flagged)
        .map(|f| f.mutation_degree)
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::NoDetection);
    }
    let mut ids: Vec<usize> = flags
        .iter()
        .filter(|f| f.flagged && f.mutation_degree >= keep_ratio * top)
        .map(|f| f.id)
        .collect();
    ids.sort_unstable();
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub position: f64,
    pub value: f64,
    /// `value / F`.
    pub exceedance: f64,
}

/// Index-2 peaks per sensor.
pub type PeakSet = BTreeMap<usize, Vec<Peak>>;

/// Local maxima of one sensor's index-1 above its threshold, with prominence
/// of at least `prominence_sigmas · σ` and pairwise separation of at least
/// `min_separation`. Positions sit at the parabolic apex; output is sorted.
pub fn extract_peaks(
    index: &IndexSeries,
    stats: &BaselineStats,
    sensor_id: usize,
    min_separation: f64,
    prominence_sigmas: f64,
) -> Result<Vec<Peak>> {
    stats.check_sensors(index)?;
    let s = stats
        .sensor(sensor_id)
        .ok_or_else(|| Error::SensorMismatch(format!("sensor {sensor_id} is not in the baseline")))?;
    let y = index.curve(sensor_id).expect("sensor ids checked");
    let n = y.len();
    let inside = |i: usize| index.interior[i];
    let min_prominence = prominence_sigmas * s.sigma;

    let mut candidates = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(inside(i) && inside(i - 1) && inside(i + 1)) {
            continue;
        }
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > s.threshold) {
            continue;
        }
        // Topographic prominence within the interior run.
        let mut left_min = y[i];
        let mut j = i;
        while j > 0 && inside(j - 1) && y[j - 1] <= y[i] {
            j -= 1;
            left_min = left_min.min(y[j]);
        }
        let mut right_min = y[i];
        let mut k = i;
        while k + 1 < n && inside(k + 1) && y[k + 1] <= y[i] {
            k += 1;
            right_min = right_min.min(y[k]);
        }
        if y[i] - left_min.max(right_min) < min_prominence {
            continue;
        }
        candidates.push(i);
    }

    // Larger peaks first; ties go to the smaller position.
    candidates.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        let pc = index.position(c);
        if kept.iter().all(|&k| (index.position(k) - pc).abs() >= min_separation) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    Ok(kept
        .into_iter()
        .map(|i| {
            let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
            let curv = y0 - 2.0 * y1 + y2;
            let delta = if curv < 0.0 {
                (0.5 * (y0 - y2) / curv).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            let value = y1 - 0.25 * (y0 - y2) * delta;
            Peak {
                position: index.position(i) + delta * index.step,
                value,
                exceedance: value / s.threshold,
            }
        })
        .collect())
}

/// Peaks repeating at the carriage period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub origin: f64,
    /// Sorted by position.
    pub members: Vec<Peak>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn exceedance(&self) -> f64 {
        self.members.iter().map(|p| p.exceedance).sum()
    }
}

/// Chains peaks at `origin + k·carriage_length ± tol` for consecutive `k`,
/// with each member also within `tol` of `carriage_length` past the previous
/// one so the spacing cannot drift.
///
/// A chain is grown from every peak, taking the nearest peak to each target
/// (ties to the smaller position) and stopping at the first gap. Chains with
/// fewer than `min_chain` members are dropped. Chains sharing more than half
/// the members of the smaller one form a group, reported as the chain grown
/// from the group's earliest origin.
pub fn match_periodicity(peaks: &[Peak], carriage_length: f64, tol: f64, min_chain: usize) -> Result<Vec<Chain>> {
    if !(carriage_length > 0.0) {
        return Err(Error::invalid("carriage_length", "must be positive"));
    }
    if !(tol >= 0.0 && tol < carriage_length / 4.0) {
        return Err(Error::invalid("tol", "must lie in [0, carriage_length / 4)"));
    }
    let mut sorted: Vec<Peak> = peaks.to_vec();
    sorted.sort_by(|a, b| a.position.total_cmp(&b.position));
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for start in 0..sorted.len() {
        let origin = sorted[start].position;
        let mut members = vec![start];
        for k in 1.. {
            let target = origin + k as f64 * carriage_length;
            let prev = sorted[*members.last().expect("chain starts non-empty")].position;
            let best = (0..sorted.len())
                .filter(|&i| {
                    (sorted[i].position - target).abs() <= tol
                        && (sorted[i].position - prev - carriage_length).abs() <= tol
                })
                .min_by(|&a, &b| {
                    (sorted[a].position - target)
                        .abs()
                        .total_cmp(&(sorted[b].position - target).abs())
                        .then(a.cmp(&b))
                });
            match best {
                Some(i) => members.push(i),
                None => break,
            }
        }
        if members.len() >= min_chain.max(1) {
            chains.push(members);
        }
    }
    Ok(merge_chains(chains)
        .into_iter()
        .map(|members| Chain {
            origin: sorted[members[0]].position,
            members: members.iter().map(|&i| sorted[i]).collect(),
        })
        .collect())
}

/// Groups index chains whose overlap exceeds half of the smaller one, by
/// connected components, and keeps the chain with the smallest origin from
/// each group. Chains are ordered by their first member.
pub(crate) fn merge_chains(chains: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = chains.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for a in 0..n {
        for b in a + 1..n {
            let shared = chains[a].iter().filter(|i| chains[b].contains(i)).count();
            let smaller = chains[a].len().min(chains[b].len());
            if 2 * shared > smaller {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, chain) in chains.into_iter().enumerate() {
        let root = find(&mut parent, i);
        let slot = groups.entry(root).or_default();
        if slot.is_empty() || chain[0] < slot[0] {
            *slot = chain;
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Parameters for the localization stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizeParams {
    pub span: f64,
    /// Subtracted from every chain origin.
    pub offset: f64,
    pub tol: f64,
    /// Offsets of the wheel groups within one carriage, relative to the
    /// first. A defect at `x` produces chains at `x + d` for each `d`.
    pub group_offsets: Vec<f64>,
    /// Minimum fraction of selected sensors that must back an estimate.
    pub min_support: f64,
}

impl Default for LocalizeParams {
    fn default() -> Self {
        LocalizeParams {
            span: 32.6,
            offset: 0.0,
            tol: 1.5,
            group_offsets: vec![0.0, 17.5],
            min_support: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub position_m: f64,
    pub sensors: Vec<usize>,
    pub chain_len: usize,
    /// Fraction of selected sensors supporting the estimate.
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Clear,
    Localized,
    DetectedUnlocalized,
}

struct Candidate {
    position: f64,
    weight: f64,
    chain_len: usize,
}

/// Explains one sensor's chains with as few defect positions as possible.
fn cover_chains(chains: &[Chain], params: &LocalizeParams) -> Vec<Candidate> {
    let origins: Vec<f64> = chains.iter().map(|c| c.origin - params.offset).collect();
    let mut candidates: Vec<f64> = origins
        .iter()
        .flat_map(|&o| params.group_offsets.iter().map(move |&d| o - d))
        .filter(|&x| x > 0.0 && x < params.span)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let explains = |x: f64, o: f64| params.group_offsets.iter().any(|&d| (x + d - o).abs() <= params.tol);
    let mut remaining: Vec<usize> = (0..chains.len()).collect();
    let mut out = Vec::new();
    loop {
        // Most chains explained wins; then a candidate whose leading group
        // has its own chain; then the longest supporting chain; then the
        // smallest position.
        let anchored = |x: f64, covered: &[usize]| covered.iter().any(|&c| (origins[c] - x).abs() <= params.tol);
        let best = candidates
            .iter()
            .map(|&x| {
                let covered: Vec<usize> = remaining.iter().copied().filter(|&c| explains(x, origins[c])).collect();
                (x, covered)
            })
            .filter(|(_, c)| !c.is_empty())
            .max_by(|(xa, ca), (xb, cb)| {
                let la = ca.iter().map(|&c| chains[c].len()).max().unwrap_or(0);
                let lb = cb.iter().map(|&c| chains[c].len()).max().unwrap_or(0);
                ca.len()
                    .cmp(&cb.len())
                    .then(anchored(*xa, ca).cmp(&anchored(*xb, cb)))
                    .then(la.cmp(&lb))
                    .then(xb.total_cmp(xa))
            });
        let Some((x, covered)) = best else { break };
        // Anchor on the zero-offset chain when there is one.
        let anchor = covered
            .iter()
            .copied()
            .find(|&c| (origins[c] - x).abs() <= params.tol)
            .unwrap_or(covered[0]);
        out.push(Candidate {
            position: x,
            weight: chains[anchor].exceedance(),
            chain_len: covered.iter().map(|&c| chains[c].len()).max().unwrap_or(0),
        });
        remaining.retain(|c| !covered.contains(c));
    }
    out
}

/// Turns per-sensor chains into fused position estimates.
///
/// Each selected sensor's chains are reduced to defect candidates inside the
/// span; candidates from different sensors within `tol` of each other are
/// averaged with their chain exceedance as weight. Estimates backed by fewer
/// than `min_support` of the selected sensors are dropped.
pub fn localize(
    chains: &BTreeMap<usize, Vec<Chain>>,
    selected: &[usize],
    params: &LocalizeParams,
) -> Result<Vec<Estimate>> {
    if selected.is_empty() {
        return Err(Error::NoDetection);
    }
    let mut all: Vec<(usize, Candidate)> = Vec::new();
    for &id in selected {
        if let Some(cs) = chains.get(&id) {
            all.extend(cover_chains(cs, params).into_iter().map(|c| (id, c)));
        }
    }
    all.sort_by(|a, b| a.1.position.total_cmp(&b.1.position).then(a.0.cmp(&b.0)));
    let mut estimates = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].1.position - all[j - 1].1.position <= params.tol {
            j += 1;
        }
        let group = &all[i..j];
        let wsum: f64 = group.iter().map(|(_, c)| c.weight).sum();
        let position = if wsum > 0.0 {
            group.iter().map(|(_, c)| c.weight * c.position).sum::<f64>() / wsum
        } else {
            group.iter().map(|(_, c)| c.position).sum::<f64>() / group.len() as f64
        };
        let mut sensors: Vec<usize> = group.iter().map(|(id, _)| *id).collect();
        sensors.sort_unstable();
        sensors.dedup();
        i = j;
        if (sensors.len() as f64) < params.min_support * selected.len() as f64 {
            continue;
        }
        estimates.push(Estimate {
            position_m: position,
            confidence: sensors.len() as f64 / selected.len() as f64,
            sensors,
            chain_len: group.iter().map(|(_, c)| c.chain_len).max().unwrap_or(0),
        });
    }
    Ok(estimates)
}

/// All knobs of the detection stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectParams {
    pub debounce: usize,
    pub keep_ratio: f64,
    pub min_separation: f64,
    pub prominence_sigmas: f64,
    pub carriage_length: f64,
    pub min_chain: usize,
    pub localize: LocalizeParams,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            debounce: 3,
            keep_ratio: 0.5,
            min_separation: 5.0,
            prominence_sigmas: 1.0,
            carriage_length: 25.0,
            min_chain: 3,
            localize: LocalizeParams::default(),
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        if self.debounce == 0 {
            return Err(Error::invalid("debounce", "must be at least 1"));
        }
        if !(self.keep_ratio > 0.0 && self.keep_ratio <= 1.0) {
            return Err(Error::invalid("keep_ratio", "must lie in (0, 1]"));
        }
        if !(self.min_separation >= 0.0 && self.prominence_sigmas >= 0.0) {
            return Err(Error::invalid("min_separation", "must be nonnegative"));
        }
        if !(self.carriage_length > 0.0) {
            return Err(Error::invalid("carriage_length", "must be positive"));
        }
        if !(self.localize.tol >= 0.0 && self.localize.tol < self.carriage_length / 4.0) {
            return Err(Error::invalid("tol", "must lie in [0, carriage_length / 4)"));
        }
        if !(0.0..=1.0).contains(&self.localize.min_support) {
            return Err(Error::invalid("min_support", "must lie in [0, 1]"));
        }
        if self.min_chain == 0 {
            return Err(Error::invalid("min_chain", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorPeaks {
    pub id: usize,
    pub peaks: Vec<Peak>,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub scenario: String,
    pub speed_kmh: f64,
    pub run_id: u64,
    pub status: Status,
    pub sensors: Vec<SensorFlag>,
    pub selected: Vec<usize>,
    pub estimates: Vec<Estimate>,
    pub periodicity_m: f64,
    pub peaks: Vec<SensorPeaks>,
    pub params: DetectParams,
}

impl DetectionReport {
    pub fn detected(&self) -> bool {
        self.status != Status::Clear
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Runs detection, screening, peak extraction, chaining and localization.
pub fn analyze(
    index: &IndexSeries,
    stats: &BaselineStats,
    params: &DetectParams,
    scenario: &str,
    speed_kmh: f64,
) -> Result<DetectionReport> {
    params.validate()?;
    let flags = detect(index, stats, params.debounce)?;
    let mut report = DetectionReport {
        scenario: scenario.to_string(),
        speed_kmh,
        run_id: index.run_id,
        status: Status::Clear,
        sensors: flags,
        selected: Vec::new(),
        estimates: Vec::new(),
        periodicity_m: params.carriage_length,
        peaks: Vec::new(),
        params: params.clone(),
    };
    let selected = match screen_sensors(&report.sensors, params.keep_ratio) {
        Ok(s) => s,
        Err(Error::NoDetection) => return Ok(report),
        Err(e) => return Err(e),
    };
    let mut chains = BTreeMap::new();
    for &id in &selected {
        let peaks = extract_peaks(index, stats, id, params.min_separation, params.prominence_sigmas)?;
        let c = match_periodicity(&peaks, params.carriage_length, params.localize.tol, params.min_chain)?;
        report.peaks.push(SensorPeaks {
            id,
            peaks,
            chains: c.clone(),
        });
        chains.insert(id, c);
    }
    report.estimates = localize(&chains, &selected, &params.localize)?;
    report.status = if report.estimates.is_empty() {
        Status::DetectedUnlocalized
    } else {
        Status::Localized
    };
    report.selected = selected;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(run_id: u64, values: Vec<Vec<f64>>) -> IndexSeries {
        let n = values[0].len();
        IndexSeries {
            run_id,
            origin: 0.0,
            step: 1.0,
            sensor_ids: (1..=values.len()).collect(),
            values,
            interior: vec![true; n],
            smoothing_m: 0.0,
        }
    }

    fn peak(x: f64) -> Peak {
        Peak {
            position: x,
            value: 1.0,
            exceedance: 1.0,
        }
    }

    #[test]
    fn pooled_moments() {
        let runs: Vec<IndexSeries> = (0..10)
            .map(|i| series(i, vec![if i == 0 { vec![1.0, 2.0, 3.0] } else { vec![] }]))
            .collect();
        // Runs 1..9 contribute nothing, so the pool is {1, 2, 3}.
        let stats = calibrate_baseline(&runs).unwrap();
        let s = &stats.sensors[0];
        assert!((s.mu - 2.0).abs() < 1e-15 && (s.sigma - 1.0).abs() < 1e-15 && (s.threshold - 5.0).abs() < 1e-15);

        let flat: Vec<IndexSeries> = (0..10).map(|i| series(i, vec![vec![4.0; 5]])).collect();
        let s = calibrate_baseline(&flat).unwrap();
        assert_eq!(s.sensors[0].threshold, 4.0);

        assert!(matches!(
            calibrate_baseline(&flat[..5]),
            Err(Error::TooFewRuns { required: 10, got: 5 })
        ));
        let mut bad = flat.clone();
        bad[3].sensor_ids = vec![7];
        assert!(matches!(calibrate_baseline(&bad), Err(Error::SensorMismatch(_))));
    }

    #[test]
    fn debounced_detection() {
        let stats = BaselineStats::from_moments(&[1], &[(5.0, 0.0)]);
        let quiet = series(0, vec![vec![1.0, 4.0, 2.0]]);
        assert!(!detect(&quiet, &stats, 3).unwrap()[0].flagged);
        let loud = series(0, vec![vec![1.0, 6.0, 6.0, 6.0, 1.0]]);
        assert!(detect(&loud, &stats, 3).unwrap()[0].flagged);
        let short = series(0, vec![vec![1.0, 6.0, 6.0, 1.0, 6.0]]);
        assert!(!detect(&short, &stats, 3).unwrap()[0].flagged);
    }

    #[test]
    fn screening_rule() {
        let flags: Vec<SensorFlag> = [10.0, 8.0, 2.0, 1.0, 1.0]
            .iter()
            .enumerate()
            .map(|(i, &d)| SensorFlag {
                id: i + 1,
                flagged: d > 1.0,
                mutation_degree: d,
            })
            .collect();
        assert_eq!(screen_sensors(&flags, 0.5).unwrap(), vec![1, 2]);
        let one = vec![SensorFlag {
            id: 4,
            flagged: true,
            mutation_degree: 1.2,
        }];
        assert_eq!(screen_sensors(&one, 0.5).unwrap(), vec![4]);
        let none: Vec<SensorFlag> = flags
            .iter()
            .map(|f| SensorFlag {
                flagged: false,
                ..f.clone()
            })
            .collect();
        assert!(matches!(screen_sensors(&none, 0.5), Err(Error::NoDetection)));
    }

    #[test]
    fn triangle_and_separation() {
        let stats = BaselineStats::from_moments(&[1], &[(1.0, 0.0)]);
        let tri: Vec<f64> = (0..40).map(|i| (10.0 - (i as f64 - 20.0).abs()).max(0.0)).collect();
        let p = extract_peaks(&series(0, vec![tri]), &stats, 1, 5.0, 1.0).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].position - 20.0).abs() <= 1.0);

        let mut two = vec![0.0; 40];
        two[10] = 5.0;
        two[13] = 7.0;
        let p = extract_peaks(&series(0, vec![two]), &stats, 1, 5.0, 0.0).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].position - 13.0).abs() <= 0.5);
    }

    #[test]
    fn periodic_chains() {
        let c = match_periodicity(&[9.0, 34.0, 59.0, 84.0].map(peak), 25.0, 1.5, 3).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].origin, 9.0);
        assert_eq!(c[0].len(), 4);

        let c = match_periodicity(&[9.0, 34.0, 19.0, 44.0, 69.0].map(peak), 25.0, 1.5, 2).unwrap();
        let origins: Vec<f64> = c.iter().map(|c| c.origin).collect();
        assert_eq!(origins, vec![9.0, 19.0]);

        assert!(match_periodicity(&[9.0, 34.0].map(peak), 25.0, 1.5, 3)
            .unwrap()
            .is_empty());
        assert!(match_periodicity(&[9.0].map(peak), 25.0, 7.0, 1).is_err());
    }

    #[test]
    fn wheel_groups_collapse_to_one_defect() {
        let chain = |o: f64| Chain {
            origin: o,
            members: (0..4).map(|k| peak(o + 25.0 * k as f64)).collect(),
        };
        let mut chains = BTreeMap::new();
        chains.insert(1, vec![chain(9.25), chain(26.75)]);
        chains.insert(2, vec![chain(9.0), chain(26.5)]);
        let est = localize(&chains, &[1, 2], &LocalizeParams::default()).unwrap();
        assert_eq!(est.len(), 1);
        assert!((est[0].position_m - 9.125).abs() < 1e-12);
        assert_eq!(est[0].sensors, vec![1, 2]);
        assert_eq!(est[0].confidence, 1.0);

        let mut two = BTreeMap::new();
        two.insert(1, vec![chain(9.25), chain(17.25), chain(26.75), chain(34.75)]);
        let est = localize(&two, &[1], &LocalizeParams::default()).unwrap();
        let pos: Vec<f64> = est.iter().map(|e| e.position_m).collect();
        assert_eq!(pos, vec![9.25, 17.25]);

        // A candidate seen by one of three sensors is dropped.
        let mut lone = chains.clone();
        lone.insert(3, vec![chain(9.1), chain(26.6)]);
        lone.get_mut(&3).unwrap().push(chain(20.0));
        let est = localize(&lone, &[1, 2, 3], &LocalizeParams::default()).unwrap();
        assert_eq!(est.len(), 1);
        assert_eq!(est[0].sensors, vec![1, 2, 3]);
    }

    #[test]
    fn unlocalized_is_reported() {
        let stats = BaselineStats::from_moments(&[1], &[(1.0, 0.1)]);
        let mut y = vec![0.5; 60];
        y[30] = 3.0;
        y[29] = 2.0;
        y[31] = 2.0;
        let report = analyze(&series(0, vec![y]), &stats, &DetectParams::default(), "t", 200.0).unwrap();
        assert_eq!(report.status, Status::DetectedUnlocalized);
        assert!(report.estimates.is_empty());
        assert_eq!(report.selected, vec![1]);
    }
}
