//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use track_sentinel::detect::Peak;
use track_sentinel::scenario::ScenarioConfig;

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn preset(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&scenarios_dir().join(format!("{name}.toml"))).expect("preset loads")
}

pub fn peak(position: f64) -> Peak {
    Peak {
        position,
        value: 1.0,
        exceedance: 1.0,
    }
}

/// Brute-force chains: every subset of the peaks whose sorted members sit at
/// `p0 + k·C ± tol` for `k = 0, 1, …` without gaps, with consecutive
/// members `C ± tol` apart, kept when it has at least `min_chain` members
/// and no valid superset with the same first member. Subsets sharing more
/// than half of the smaller one are joined into connected components, and
/// each component is represented by its subset with the smallest first
/// member. Returns sorted member positions, ordered by first member.
pub fn brute_force_chains(positions: &[f64], c: f64, tol: f64, min_chain: usize) -> Vec<Vec<f64>> {
    let mut p = positions.to_vec();
    p.sort_by(f64::total_cmp);
    let n = p.len();
    assert!(n <= 12);
    let valid = |mask: u32| -> bool {
        let members: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| p[i]).collect();
        members.len() >= min_chain.max(1)
            && members
                .iter()
                .enumerate()
                .all(|(k, &x)| (x - (members[0] + k as f64 * c)).abs() <= tol)
            && members.windows(2).all(|w| (w[1] - w[0] - c).abs() <= tol)
    };
    let first = |mask: u32| mask.trailing_zeros();
    let all: Vec<u32> = (1..(1u32 << n)).filter(|&m| valid(m)).collect();
    let maximal: Vec<u32> = all
        .iter()
        .copied()
        .filter(|&m| !all.iter().any(|&o| o != m && o & m == m && first(o) == first(m)))
        .collect();
    // Connected components under the overlap rule.
    let k = maximal.len();
    let mut comp: Vec<usize> = (0..k).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..k {
            for b in 0..k {
                let shared = (maximal[a] & maximal[b]).count_ones();
                let smaller = maximal[a].count_ones().min(maximal[b].count_ones());
                if 2 * shared > smaller && comp[a] != comp[b] {
                    let m = comp[a].min(comp[b]);
                    comp[a] = m;
                    comp[b] = m;
                    changed = true;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, u32> = Default::default();
    for (i, &m) in maximal.iter().enumerate() {
        let slot = groups.entry(comp[i]).or_insert(m);
        if first(m) < first(*slot) {
            *slot = m;
        }
    }
    let mut out: Vec<Vec<f64>> = groups
        .into_values()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| p[i]).collect())
        .collect();
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    out
}

/// Sorted positions at least `min_sep` apart, built from gaps in
/// `[min_sep, min_sep + spread]`.
pub fn separated_positions(start: f64, gaps: &[f64]) -> Vec<f64> {
    let mut x = start;
    let mut out = vec![x];
    for g in gaps {
        x += g;
        out.push(x);
    }
    out
}
