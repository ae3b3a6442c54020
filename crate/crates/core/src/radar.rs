//! Waveform parameters, module presets and range/frequency bookkeeping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Chirp and acquisition parameters of one FMCW radar module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    pub carrier_hz: f64,
    /// Swept bandwidth of one chirp.
    pub bandwidth_hz: f64,
    pub chirp_time_s: f64,
    /// Complex baseband ADC rate.
    pub sample_rate_hz: f64,
    pub samples_per_chirp: usize,
    /// Slow-time spacing between chirp starts.
    pub chirp_interval_s: f64,
    /// 3 dB antenna aperture. Informational; the simulator does not model the beam pattern.
    pub beam_aperture_deg: f64,
    /// Post-FFT SNR of a unit-amplitude scatterer at 1 m, rectangular window.
    pub snr_ref_db: f64,
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("chirp_time_s", self.chirp_time_s),
            ("sample_rate_hz", self.sample_rate_hz),
            ("chirp_interval_s", self.chirp_interval_s),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(format!("{name} must be positive, got {value}")));
            }
        }
        if self.samples_per_chirp == 0 {
            return Err(Error::config("samples_per_chirp must be positive"));
        }
        let max_samples = self.sample_rate_hz * self.chirp_time_s;
        if self.samples_per_chirp as f64 > max_samples * (1.0 + 1e-9) {
            return Err(Error::config(format!(
                "{} samples per chirp exceed the {max_samples} available in one chirp",
                self.samples_per_chirp
            )));
        }
        if self.chirp_interval_s < self.chirp_time_s {
            return Err(Error::config(format!(
                "chirp interval {} s is shorter than the chirp ({} s)",
                self.chirp_interval_s, self.chirp_time_s
            )));
        }
        if !self.snr_ref_db.is_finite() {
            return Err(Error::config("snr_ref_db must be finite"));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// `c / 2B`.
    pub fn range_resolution(&self) -> Result<f64> {
        range_resolution(self.bandwidth_hz)
    }

    /// Chirp slope in Hz/s.
    pub fn slope(&self) -> f64 {
        self.bandwidth_hz / self.chirp_time_s
    }

    /// Largest range whose beat frequency stays below `sample_rate_hz / 2`.
    pub fn max_unambiguous_range(&self) -> f64 {
        0.5 * self.sample_rate_hz * SPEED_OF_LIGHT / (2.0 * self.slope())
    }

    /// Beat frequency of a point reflector at `range_m`.
    pub fn beat_frequency(&self, range_m: f64) -> Result<f64> {
        let max_m = self.max_unambiguous_range();
        if !(0.0..=max_m).contains(&range_m) {
            return Err(Error::OutOfRange { range_m, max_m });
        }
        Ok(self.beat_frequency_unchecked(range_m))
    }

    pub(crate) fn beat_frequency_unchecked(&self, range_m: f64) -> f64 {
        2.0 * self.slope() * range_m / SPEED_OF_LIGHT
    }

    /// Range spanned by one FFT bin at the given transform length.
    pub fn bin_spacing_m(&self, fft_len: usize) -> f64 {
        let df = self.sample_rate_hz / fft_len as f64;
        df * SPEED_OF_LIGHT / (2.0 * self.slope())
    }

    /// Range of each of the first `fft_len / 2` bins.
    pub fn range_axis(&self, fft_len: usize) -> Result<Vec<f64>> {
        if fft_len < self.samples_per_chirp {
            return Err(Error::argument(format!(
                "fft length {fft_len} is shorter than {} samples per chirp",
                self.samples_per_chirp
            )));
        }
        let spacing = self.bin_spacing_m(fft_len);
        Ok((0..fft_len / 2).map(|k| k as f64 * spacing).collect())
    }

    /// Slow-time sampling rate (chirps per second).
    pub fn chirp_rate_hz(&self) -> f64 {
        1.0 / self.chirp_interval_s
    }
}

impl Default for RadarConfig {
    fn default() -> Self {
        ModulePreset::Radar120G.config()
    }
}

/// `c / 2B` for a swept bandwidth in Hz.
pub fn range_resolution(bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
        return Err(Error::config(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * bandwidth_hz))
}

/// The two radar modules compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulePreset {
    #[serde(rename = "RADAR_120G")]
    Radar120G,
    #[serde(rename = "RADAR_94G")]
    Radar94G,
}

impl ModulePreset {
    pub const ALL: [ModulePreset; 2] = [ModulePreset::Radar120G, ModulePreset::Radar94G];

    pub fn name(self) -> &'static str {
        match self {
            ModulePreset::Radar120G => "RADAR_120G",
            ModulePreset::Radar94G => "RADAR_94G",
        }
    }

    pub fn config(self) -> RadarConfig {
        match self {
            // 2 MHz x 256 us = 512 samples: one FFT bin per resolution cell.
            ModulePreset::Radar120G => RadarConfig {
                carrier_hz: 120e9,
                bandwidth_hz: 6e9,
                chirp_time_s: 256e-6,
                sample_rate_hz: 2e6,
                samples_per_chirp: 512,
                chirp_interval_s: 1e-3,
                beam_aperture_deg: 3.0,
                snr_ref_db: 30.0,
            },
            // The wider sweep needs 1024 samples to reach 5.5 m.
            ModulePreset::Radar94G => RadarConfig {
                carrier_hz: 94e9,
                bandwidth_hz: 14e9,
                chirp_time_s: 256e-6,
                sample_rate_hz: 4e6,
                samples_per_chirp: 1024,
                chirp_interval_s: 1e-3,
                beam_aperture_deg: 11.0,
                snr_ref_db: 48.0,
            },
        }
    }
}

impl fmt::Display for ModulePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModulePreset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::config(format!("unknown module preset {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim_config() -> RadarConfig {
        ModulePreset::Radar120G.config()
    }

    #[test]
    fn resolution_of_both_modules() {
        let r120 = ModulePreset::Radar120G.config().range_resolution().unwrap();
        let r94 = ModulePreset::Radar94G.config().range_resolution().unwrap();
        // reported as 2.5 cm and ~1 cm
        assert!((r120 - 0.025).abs() < 1e-4, "{r120}");
        assert!((r94 - 0.010714).abs() < 1e-5, "{r94}");
    }

    #[test]
    fn one_metre_resolution() {
        let r = range_resolution(149.896229e6).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_positive_bandwidth_rejected() {
        assert!(matches!(range_resolution(0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(range_resolution(-1.0), Err(Error::InvalidConfig(_))));
        let mut cfg = sim_config();
        cfg.bandwidth_hz = 0.0;
        assert!(cfg.range_resolution().is_err());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn beat_frequency_examples() {
        let cfg = sim_config();
        assert_eq!(cfg.beat_frequency(0.0).unwrap(), 0.0);
        // one resolution cell is exactly one bin at N = fs * Tc
        let df = cfg.sample_rate_hz / 512.0;
        assert_eq!(df, 3906.25);
        let one_cell = cfg.beat_frequency(cfg.range_resolution().unwrap()).unwrap();
        assert!((one_cell / df - 1.0).abs() < 1e-12);
        // 2.5 cm rounds c; within 1e-3 of one bin
        assert!((cfg.beat_frequency(0.025).unwrap() / 3906.25 - 1.0).abs() < 1e-3);
        let axis = cfg.range_axis(512).unwrap();
        let fb = cfg.beat_frequency(axis[80]).unwrap();
        assert!((fb / 312_500.0 - 1.0).abs() < 1e-9);
        // 2 m lands inside bin 80
        let bin = cfg.beat_frequency(2.0).unwrap() / df;
        assert_eq!(bin.round() as usize, 80);
    }

    #[test]
    fn beat_frequency_rejects_out_of_range() {
        let cfg = sim_config();
        let max = cfg.max_unambiguous_range();
        assert!((max - 6.4).abs() < 0.01);
        assert!(matches!(
            cfg.beat_frequency(max + 0.01),
            Err(Error::OutOfRange { .. })
        ));
        assert!(cfg.beat_frequency(-0.1).is_err());
    }

    #[test]
    fn range_axis_spacing() {
        let cfg = sim_config();
        let axis = cfg.range_axis(512).unwrap();
        assert_eq!(axis.len(), 256);
        assert_eq!(axis[0], 0.0);
        let res = cfg.range_resolution().unwrap();
        assert!(((axis[1] - axis[0]) / res - 1.0).abs() < 1e-9);
        assert!((axis[80] - 2.0).abs() < 2e-3);

        let padded = cfg.range_axis(1024).unwrap();
        assert_eq!(padded.len(), 512);
        assert!(((padded[1] * 2.0) / axis[1] - 1.0).abs() < 1e-12);

        assert!(matches!(cfg.range_axis(256), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn presets_parse_and_validate() {
        for p in ModulePreset::ALL {
            p.config().validate().unwrap();
            assert_eq!(p.name().parse::<ModulePreset>().unwrap(), p);
        }
        assert!("RADAR_77G".parse::<ModulePreset>().is_err());
        let c120 = ModulePreset::Radar120G.config();
        let c94 = ModulePreset::Radar94G.config();
        assert_eq!(c120.carrier_hz, 120e9);
        assert_eq!(c120.bandwidth_hz, 6e9);
        assert_eq!(c120.beam_aperture_deg, 3.0);
        assert_eq!(c94.carrier_hz, 94e9);
        assert_eq!(c94.bandwidth_hz, 14e9);
        assert_eq!(c94.beam_aperture_deg, 11.0);
        assert!(c94.snr_ref_db > c120.snr_ref_db);
    }

    #[test]
    fn validation_rules() {
        let mut cfg = sim_config();
        cfg.samples_per_chirp = 513;
        assert!(cfg.validate().is_err());
        let mut cfg = sim_config();
        cfg.chirp_interval_s = 100e-6;
        assert!(cfg.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn beat_frequency_is_linear(r in 0.0f64..3.0) {
                let cfg = sim_config();
                let a = cfg.beat_frequency(r).unwrap();
                let b = cfg.beat_frequency(2.0 * r).unwrap();
                prop_assert!((b - 2.0 * a).abs() <= 1e-9 * b.abs().max(1.0));
            }

            #[test]
            fn resolution_decreases_with_bandwidth(b in 1e6f64..1e11, k in 1.001f64..10.0) {
                prop_assert!(range_resolution(b * k).unwrap() < range_resolution(b).unwrap());
            }

            #[test]
            fn bin_spacing_matches_resolution_when_fully_sampled(
                n_exp in 6u32..12, fs in 1e5f64..1e7, bw in 1e8f64..2e10,
            ) {
                let n = 1usize << n_exp;
                let cfg = RadarConfig {
                    sample_rate_hz: fs,
                    chirp_time_s: n as f64 / fs,
                    samples_per_chirp: n,
                    chirp_interval_s: 2.0 * n as f64 / fs,
                    bandwidth_hz: bw,
                    ..sim_config()
                };
                let axis = cfg.range_axis(n).unwrap();
                let res = cfg.range_resolution().unwrap();
                prop_assert!(((axis[1] - axis[0]) / res - 1.0).abs() < 1e-9);
            }
        }
    }
}
