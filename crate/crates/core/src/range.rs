//! Fast-time processing: tapering, range FFT, power conversion and the
//! slow-time waterfall of range profiles.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::{Complex32, Complex64};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power assigned to bins with zero magnitude, so silent bins stay finite.
pub const POWER_FLOOR_DB: f64 = -300.0;

/// One chirp of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpFrame {
    pub samples: Vec<Complex32>,
    pub chirp_index: u64,
    /// Acquisition time of the chirp start.
    pub t_slow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Rectangular,
    #[default]
    Hann,
}

/// Taper coefficients of length `n`. Hann is the symmetric form.
pub fn window_coefficients(kind: WindowKind, n: usize) -> Vec<f64> {
    match kind {
        WindowKind::Rectangular => vec![1.0; n],
        WindowKind::Hann if n == 1 => vec![1.0],
        WindowKind::Hann => {
            let denom = (n - 1) as f64;
            (0..n)
                .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / denom).cos())
                .collect()
        }
    }
}

/// Mean of the taper, i.e. the amplitude gain seen by a bin-centred tone.
pub fn coherent_gain(taper: &[f64]) -> f64 {
    if taper.is_empty() {
        return 0.0;
    }
    taper.iter().sum::<f64>() / taper.len() as f64
}

/// Multiplies the frame by the taper; returns the tapered frame and its
/// coherent gain.
pub fn window_apply(frame: &ChirpFrame, kind: WindowKind) -> (ChirpFrame, f64) {
    let taper = window_coefficients(kind, frame.samples.len());
    let samples = frame
        .samples
        .iter()
        .zip(&taper)
        .map(|(s, &w)| *s * w as f32)
        .collect();
    (
        ChirpFrame {
            samples,
            chirp_index: frame.chirp_index,
            t_slow: frame.t_slow,
        },
        coherent_gain(&taper),
    )
}

/// Positive-range half of one chirp's spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    /// `20 log10 |bin|`, floored at [`POWER_FLOOR_DB`].
    pub power_db: Vec<f64>,
    pub complex_bins: Vec<Complex64>,
    pub chirp_index: u64,
    pub t_slow: f64,
}

impl RangeProfile {
    /// Transform length that produced this profile.
    pub fn fft_len(&self) -> usize {
        2 * self.complex_bins.len()
    }

    pub fn len(&self) -> usize {
        self.complex_bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex_bins.is_empty()
    }

    /// Linear power `|bin|^2`.
    pub fn linear_power(&self) -> Vec<f64> {
        self.complex_bins.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn peak_bin(&self) -> Option<usize> {
        self.power_db
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

pub fn magnitude_db(z: Complex64) -> f64 {
    let mag = z.norm();
    if mag > 0.0 {
        (20.0 * mag.log10()).max(POWER_FLOOR_DB)
    } else {
        POWER_FLOOR_DB
    }
}

fn check_fft_len(fft_len: usize, n: usize) -> Result<()> {
    if !fft_len.is_power_of_two() {
        return Err(Error::argument(format!(
            "fft length {fft_len} is not a power of two"
        )));
    }
    if fft_len < n {
        return Err(Error::argument(format!(
            "fft length {fft_len} is shorter than the {n}-sample frame"
        )));
    }
    Ok(())
}

/// Zero-padded full spectrum of a frame (no taper).
pub fn full_spectrum(frame: &ChirpFrame, fft_len: usize) -> Result<Vec<Complex64>> {
    check_fft_len(fft_len, frame.samples.len())?;
    let mut buf = pad(&frame.samples, &vec![1.0; frame.samples.len()], fft_len);
    FftPlanner::new().plan_fft_forward(fft_len).process(&mut buf);
    Ok(buf)
}

/// Inverse transform normalized by `1 / len`.
pub fn inverse_fft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

fn pad(samples: &[Complex32], taper: &[f64], fft_len: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
    for ((dst, s), &w) in buf.iter_mut().zip(samples).zip(taper) {
        *dst = Complex64::new(s.re as f64 * w, s.im as f64 * w);
    }
    buf
}

/// Rectangular-window range FFT of one frame.
pub fn range_fft(frame: &ChirpFrame, fft_len: usize) -> Result<RangeProfile> {
    RangeProcessor::new(frame.samples.len(), fft_len, WindowKind::Rectangular)?.process(frame)
}

/// Range FFT settings; `fft_len` defaults to the samples per chirp.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RangeConfig {
    pub fft_len: Option<usize>,
    pub window: WindowKind,
}

impl RangeConfig {
    pub fn fft_len_for(&self, samples_per_chirp: usize) -> usize {
        self.fft_len.unwrap_or(samples_per_chirp)
    }

    pub fn processor(&self, samples_per_chirp: usize) -> Result<RangeProcessor> {
        RangeProcessor::new(samples_per_chirp, self.fft_len_for(samples_per_chirp), self.window)
    }
}

/// Reusable windowed range FFT with a cached plan.
#[derive(Clone)]
pub struct RangeProcessor {
    samples_per_chirp: usize,
    fft_len: usize,
    taper: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl RangeProcessor {
    pub fn new(samples_per_chirp: usize, fft_len: usize, window: WindowKind) -> Result<Self> {
        check_fft_len(fft_len, samples_per_chirp)?;
        let fft = FftPlanner::new().plan_fft_forward(fft_len);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Ok(Self {
            samples_per_chirp,
            fft_len,
            taper: window_coefficients(window, samples_per_chirp),
            fft,
            scratch,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn coherent_gain(&self) -> f64 {
        coherent_gain(&self.taper)
    }

    pub fn process(&mut self, frame: &ChirpFrame) -> Result<RangeProfile> {
        if frame.samples.len() != self.samples_per_chirp {
            return Err(Error::argument(format!(
                "frame {} has {} samples, expected {}",
                frame.chirp_index,
                frame.samples.len(),
                self.samples_per_chirp
            )));
        }
        let mut buf = pad(&frame.samples, &self.taper, self.fft_len);
        self.fft.process_with_scratch(&mut buf, &mut self.scratch);
        buf.truncate(self.fft_len / 2);
        let power_db = buf.iter().map(|&z| magnitude_db(z)).collect();
        Ok(RangeProfile {
            power_db,
            complex_bins: buf,
            chirp_index: frame.chirp_index,
            t_slow: frame.t_slow,
        })
    }
}

/// Bounded slow-time stack of range profiles, oldest first.
#[derive(Debug, Clone)]
pub struct Waterfall {
    capacity: usize,
    rows: VecDeque<RangeProfile>,
}

impl Waterfall {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "waterfall capacity must be positive");
        Self {
            capacity,
            rows: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a profile, evicting the oldest one when full.
    pub fn push(&mut self, profile: RangeProfile) -> Result<()> {
        if let Some(last) = self.rows.back() {
            if !(profile.t_slow > last.t_slow) {
                return Err(Error::Ordering {
                    t_slow: profile.t_slow,
                    last: last.t_slow,
                });
            }
        }
        if self.rows.len() == self.capacity {
            self.rows.pop_front();
        }
        self.rows.push_back(profile);
        Ok(())
    }

    pub fn rows(&self) -> impl Iterator<Item = &RangeProfile> {
        self.rows.iter()
    }

    /// Slow-time power series (dB) at one range bin.
    pub fn bin_series(&self, bin: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|p| p.power_db.get(bin).copied().unwrap_or(POWER_FLOOR_DB))
            .collect()
    }

    /// CSV matrix: one row per profile, one column per range bin, values in dB.
    pub fn write_csv<W: Write>(&self, out: W, bin_spacing_m: f64) -> std::io::Result<()> {
        write_profiles_csv(out, self.rows.iter(), bin_spacing_m)
    }
}

/// Streams profiles as a waterfall CSV matrix. The column count follows the
/// first profile.
pub fn write_profiles_csv<'a, W, I>(mut out: W, profiles: I, bin_spacing_m: f64) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RangeProfile>,
{
    let mut profiles = profiles.into_iter().peekable();
    let bins = profiles.peek().map_or(0, |p| p.len());
    write_profile_header(&mut out, bins, bin_spacing_m)?;
    for row in profiles {
        write_profile_row(&mut out, row)?;
    }
    Ok(())
}

/// One waterfall CSV row.
pub fn write_profile_row<W: Write>(out: &mut W, row: &RangeProfile) -> std::io::Result<()> {
    write!(out, "{:.6}", row.t_slow)?;
    for p in &row.power_db {
        write!(out, ",{p:.3}")?;
    }
    writeln!(out)
}

/// Header line of a waterfall CSV with `bins` columns.
pub fn write_profile_header<W: Write>(out: &mut W, bins: usize, bin_spacing_m: f64) -> std::io::Result<()> {
    write!(out, "t_slow_s")?;
    for k in 0..bins {
        write!(out, ",{:.6}", k as f64 * bin_spacing_m)?;
    }
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, cycles_per_frame: f64, amp: f32) -> ChirpFrame {
        let samples = (0..n)
            .map(|k| {
                let ph = 2.0 * PI * cycles_per_frame * k as f64 / n as f64;
                Complex32::new(amp * ph.cos() as f32, amp * ph.sin() as f32)
            })
            .collect();
        ChirpFrame {
            samples,
            chirp_index: 0,
            t_slow: 0.0,
        }
    }

    fn profile_at(t: f64) -> RangeProfile {
        RangeProfile {
            power_db: vec![0.0; 4],
            complex_bins: vec![Complex64::new(1.0, 0.0); 4],
            chirp_index: 0,
            t_slow: t,
        }
    }

    #[test]
    fn rectangular_window_is_identity() {
        let f = tone(64, 5.0, 0.7);
        let (w, gain) = window_apply(&f, WindowKind::Rectangular);
        assert_eq!(w, f);
        assert_eq!(gain, 1.0);
    }

    #[test]
    fn hann_definition_and_gain() {
        let n = 512;
        let ones = ChirpFrame {
            samples: vec![Complex32::new(1.0, 0.0); n],
            chirp_index: 3,
            t_slow: 0.003,
        };
        let (w, gain) = window_apply(&ones, WindowKind::Hann);
        for (k, s) in w.samples.iter().enumerate() {
            let expect = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
            assert!((s.re as f64 - expect).abs() < 1e-6);
            assert_eq!(s.im, 0.0);
        }
        // mean of the symmetric taper is 0.5 - 0.5/N
        assert!((gain - 0.5).abs() <= 0.5 / n as f64 + 1e-12);
        assert_eq!(w.chirp_index, 3);
    }

    #[test]
    fn tone_peaks_at_its_bin() {
        let f = tone(512, 80.0, 1.0);
        let p = range_fft(&f, 512).unwrap();
        assert_eq!(p.len(), 256);
        assert_eq!(p.peak_bin(), Some(80));
        for (db, z) in p.power_db.iter().zip(&p.complex_bins) {
            assert!((db - magnitude_db(*z)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_frame_hits_power_floor() {
        let f = tone(128, 3.0, 0.0);
        let p = range_fft(&f, 128).unwrap();
        assert!(p.complex_bins.iter().all(|z| z.norm() == 0.0));
        assert!(p.power_db.iter().all(|&db| db == POWER_FLOOR_DB));
    }

    #[test]
    fn rejects_bad_fft_len() {
        let f = tone(100, 3.0, 1.0);
        assert!(matches!(range_fft(&f, 200), Err(Error::InvalidArgument(_))));
        assert!(matches!(range_fft(&f, 64), Err(Error::InvalidArgument(_))));
        assert!(range_fft(&f, 128).is_ok());
    }

    #[test]
    fn parseval_holds() {
        let f = tone(200, 7.3, 0.9);
        let spec = full_spectrum(&f, 256).unwrap();
        let time: f64 = f.samples.iter().map(|s| s.norm_sqr() as f64).sum();
        let freq: f64 = spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / 256.0;
        assert!((time / freq - 1.0).abs() < 1e-6);
    }

    #[test]
    fn window_does_not_move_bin_centred_peak() {
        let f = tone(256, 40.0, 1.0);
        let mut hann = RangeProcessor::new(256, 256, WindowKind::Hann).unwrap();
        let mut rect = RangeProcessor::new(256, 256, WindowKind::Rectangular).unwrap();
        assert_eq!(hann.process(&f).unwrap().peak_bin(), Some(40));
        assert_eq!(rect.process(&f).unwrap().peak_bin(), Some(40));
    }

    #[test]
    fn waterfall_ring_semantics() {
        let mut wf = Waterfall::new(3);
        wf.push(profile_at(0.0)).unwrap();
        assert_eq!(wf.len(), 1);
        for i in 1..4 {
            wf.push(profile_at(i as f64)).unwrap();
        }
        assert_eq!(wf.len(), 3);
        assert_eq!(wf.rows().next().unwrap().t_slow, 1.0);
        assert!(matches!(wf.push(profile_at(3.0)), Err(Error::Ordering { .. })));
        assert!(matches!(wf.push(profile_at(0.5)), Err(Error::Ordering { .. })));
        assert_eq!(wf.bin_series(2).len(), 3);
    }

    #[test]
    fn waterfall_csv_shape() {
        let mut wf = Waterfall::new(4);
        wf.push(profile_at(0.0)).unwrap();
        wf.push(profile_at(0.001)).unwrap();
        let mut out = Vec::new();
        wf.write_csv(&mut out, 0.025).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 5);
        assert!(lines[0].starts_with("t_slow_s,0.000000,0.025000"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn frame_strategy() -> impl Strategy<Value = ChirpFrame> {
            proptest::collection::vec((-1.0f32..1.0, -1.0f32..1.0), 1..200).prop_map(|v| {
                ChirpFrame {
                    samples: v.into_iter().map(|(a, b)| Complex32::new(a, b)).collect(),
                    chirp_index: 0,
                    t_slow: 0.0,
                }
            })
        }

        proptest! {
            #[test]
            fn inverse_restores_padded_frame(f in frame_strategy()) {
                let n = f.samples.len().next_power_of_two();
                let back = inverse_fft(&full_spectrum(&f, n).unwrap());
                let energy: f64 = f.samples.iter().map(|s| s.norm_sqr() as f64).sum::<f64>().max(1e-30);
                let err: f64 = back.iter().enumerate().map(|(k, z)| {
                    let orig = f.samples.get(k).map_or(Complex64::new(0.0, 0.0),
                        |s| Complex64::new(s.re as f64, s.im as f64));
                    (z - orig).norm_sqr()
                }).sum();
                prop_assert!((err / energy).sqrt() < 1e-9);
            }

            #[test]
            fn fft_is_linear(f in frame_strategy(), k in 0.01f32..100.0) {
                let n = f.samples.len().next_power_of_two();
                let scaled = ChirpFrame {
                    samples: f.samples.iter().map(|s| *s * k).collect(),
                    ..f.clone()
                };
                let a = range_fft(&f, n).unwrap();
                let b = range_fft(&scaled, n).unwrap();
                let scale = a.complex_bins.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-12);
                for (za, zb) in a.complex_bins.iter().zip(&b.complex_bins) {
                    prop_assert!((za * k as f64 - zb).norm() <= 1e-5 * scale * k as f64);
                }
            }
        }
    }
}
