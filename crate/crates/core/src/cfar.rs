//! Cell-averaging CFAR on range profiles.
//!
//! For each cell under test the noise level is the mean linear power of
//! `train_cells` cells on each side, skipping `guard_cells` cells next to
//! the cell under test. A detection additionally has to be the local
//! maximum within its guard interval, so one extended return produces one
//! detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::range::{magnitude_db, RangeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    /// Use whatever training cells exist and rescale alpha to their count.
    #[default]
    Shrink,
    /// Treat the profile as circular.
    Wrap,
    /// Do not test cells without a full window.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CfarConfig {
    /// Training cells per side.
    pub train_cells: usize,
    /// Guard cells per side.
    pub guard_cells: usize,
    /// Design false-alarm probability.
    pub pfa: f64,
    pub edge_policy: EdgePolicy,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self {
            train_cells: 8,
            guard_cells: 4,
            pfa: 1e-3,
            edge_policy: EdgePolicy::Shrink,
        }
    }
}

impl CfarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_cells == 0 {
            return Err(Error::config("CFAR needs at least one training cell per side"));
        }
        if !(self.pfa > 0.0 && self.pfa < 1.0) {
            return Err(Error::config(format!("pfa {} outside (0, 1)", self.pfa)));
        }
        Ok(())
    }

    fn half_window(&self) -> usize {
        self.train_cells + self.guard_cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bin: usize,
    pub range_m: f64,
    pub power_db: f64,
    pub threshold_db: f64,
    pub chirp_index: u64,
    pub t_slow: f64,
}

/// Threshold multiplier `N (pfa^(-1/N) - 1)` for `N` training cells in
/// exponentially distributed noise.
pub fn alpha_for(n_train: usize, pfa: f64) -> f64 {
    let n = n_train as f64;
    n * (pfa.powf(-1.0 / n) - 1.0)
}

/// Multiplier for the full window, `N = 2 * train_cells`.
pub fn cfar_alpha(cfg: &CfarConfig) -> f64 {
    alpha_for(2 * cfg.train_cells, cfg.pfa)
}

/// A cell exceeding its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub bin: usize,
    /// Linear threshold.
    pub threshold: f64,
}

/// CA-CFAR on linear power. Returns hits in increasing bin order.
pub fn ca_cfar_power(power: &[f64], cfg: &CfarConfig) -> Result<Vec<Hit>> {
    cfg.validate()?;
    let n = power.len();
    let half = cfg.half_window();
    if n <= 2 * half {
        return Err(Error::argument(format!(
            "profile of {n} cells is too short for a CFAR window of {} cells",
            2 * half + 1
        )));
    }
    let full_alpha = cfar_alpha(cfg);
    let mut hits = Vec::new();
    for cut in 0..n {
        let interior = cut >= half && cut + half < n;
        if !interior && cfg.edge_policy == EdgePolicy::Skip {
            continue;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for off in cfg.guard_cells + 1..=half {
            for idx in [cut as isize - off as isize, (cut + off) as isize] {
                match cfg.edge_policy {
                    EdgePolicy::Wrap => {
                        sum += power[idx.rem_euclid(n as isize) as usize];
                        count += 1;
                    }
                    _ => {
                        if idx >= 0 && (idx as usize) < n {
                            sum += power[idx as usize];
                            count += 1;
                        }
                    }
                }
            }
        }
        if count == 0 {
            continue;
        }
        let alpha = if count == 2 * cfg.train_cells {
            full_alpha
        } else {
            alpha_for(count, cfg.pfa)
        };
        let threshold = alpha * sum / count as f64;
        if power[cut] > threshold && is_local_max(power, cut, cfg.guard_cells) {
            hits.push(Hit { bin: cut, threshold });
        }
    }
    Ok(hits)
}

/// Strictly above earlier neighbours and at least equal to later ones, so a
/// plateau yields its first cell.
fn is_local_max(power: &[f64], cut: usize, radius: usize) -> bool {
    let lo = cut.saturating_sub(radius);
    let hi = (cut + radius).min(power.len() - 1);
    let p = power[cut];
    power[lo..cut].iter().all(|&q| p > q) && power[cut + 1..=hi].iter().all(|&q| p >= q)
}

/// Detections on one range profile.
pub fn ca_cfar(profile: &RangeProfile, cfg: &CfarConfig, bin_spacing_m: f64) -> Result<Vec<Detection>> {
    let power = profile.linear_power();
    let hits = ca_cfar_power(&power, cfg)?;
    Ok(hits
        .into_iter()
        .map(|h| Detection {
            bin: h.bin,
            range_m: h.bin as f64 * bin_spacing_m,
            power_db: profile.power_db[h.bin],
            threshold_db: magnitude_db(num_complex::Complex64::new(h.threshold.sqrt(), 0.0)),
            chirp_index: profile.chirp_index,
            t_slow: profile.t_slow,
        })
        .collect())
}

/// Inclusive range interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeGate {
    pub min_m: f64,
    pub max_m: f64,
}

impl RangeGate {
    pub const ALL: RangeGate = RangeGate {
        min_m: 0.0,
        max_m: f64::INFINITY,
    };

    pub fn contains(&self, range_m: f64) -> bool {
        range_m >= self.min_m && range_m <= self.max_m
    }
}

/// Highest-power detection inside the gate; ties go to the nearer bin.
pub fn strongest_target(detections: &[Detection], gate: RangeGate) -> Option<Detection> {
    detections
        .iter()
        .filter(|d| gate.contains(d.range_m))
        .fold(None, |best: Option<&Detection>, d| match best {
            Some(b) if b.power_db > d.power_db => Some(b),
            Some(b) if b.power_db == d.power_db && b.bin <= d.bin => Some(b),
            _ => Some(d),
        })
        .copied()
}
