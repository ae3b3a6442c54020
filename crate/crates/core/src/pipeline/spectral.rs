use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

use super::PipelineConfig;

const ZERO_PAD: usize = 8;

/// One-sided periodogram of the mean-removed, Hann-tapered series,
/// zero-padded to `8 * len`. Returns `(power, bin spacing in Hz)`.
fn periodogram(series: &[f64], sample_rate_hz: f64) -> (Vec<f64>, f64) {
    let n = series.len();
    let nfft = ZERO_PAD * n;
    let mean = series.iter().sum::<f64>() / n as f64;
    let taper = crate::range::window_coefficients(crate::range::WindowKind::Hann, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (i, (&x, &w)) in series.iter().zip(&taper).enumerate() {
        buf[i] = Complex64::new((x - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let power = buf[..=nfft / 2].iter().map(|z| z.norm_sqr()).collect();
    (power, sample_rate_hz / nfft as f64)
}

fn in_band(k: usize, df: f64, band: [f64; 2]) -> bool {
    let f = k as f64 * df;
    f >= band[0] && f <= band[1]
}

/// In-band over out-of-band periodogram power in dB; DC is excluded.
/// A series with no variation gives negative infinity.
pub fn presence_ratio_db(series: &[f64], sample_rate_hz: f64, band: [f64; 2]) -> f64 {
    if series.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let (power, df) = periodogram(series, sample_rate_hz);
    let (mut inside, mut outside) = (0.0, 0.0);
    for (k, &p) in power.iter().enumerate().skip(1) {
        if in_band(k, df, band) {
            inside += p;
        } else {
            outside += p;
        }
    }
    if inside <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if outside <= 0.0 {
        return f64::INFINITY;
    }
    10.0 * (inside / outside).log10()
}

/// Dominant in-band frequency with log-parabolic interpolation.
pub fn spectral_peak_hz(series: &[f64], sample_rate_hz: f64, band: [f64; 2]) -> Option<f64> {
    if series.len() < 2 {
        return None;
    }
    let (power, df) = periodogram(series, sample_rate_hz);
    let k = (1..power.len())
        .filter(|&k| in_band(k, df, band))
        .max_by(|&a, &b| power[a].total_cmp(&power[b]).then(b.cmp(&a)))?;
    if !(power[k] > 0.0) {
        return None;
    }
    let mut offset = 0.0;
    if k + 1 < power.len() && power[k - 1] > 0.0 && power[k + 1] > 0.0 {
        let (a, b, c) = (power[k - 1].ln(), power[k].ln(), power[k + 1].ln());
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Some((k as f64 + offset) * df)
}

/// Presence decision over one window of envelope samples.
pub fn presence_flag(envelope: &[f64], sample_rate_hz: f64, cfg: &PipelineConfig) -> bool {
    presence_ratio_db(envelope, sample_rate_hz, cfg.resp_band_hz) > cfg.presence_ratio_db
}

/// Presence over sliding windows of `presence_window_s` stepped by
/// `analysis_interval_s`; one flag per complete window.
pub fn presence_flags(envelope: &[f64], sample_rate_hz: f64, cfg: &PipelineConfig) -> Vec<bool> {
    let win = (cfg.presence_window_s * sample_rate_hz).round() as usize;
    let step = ((cfg.analysis_interval_s * sample_rate_hz).round() as usize).max(1);
    if win == 0 || envelope.len() < win {
        return Vec::new();
    }
    (win..=envelope.len())
        .step_by(step)
        .map(|end| presence_flag(&envelope[end - win..end], sample_rate_hz, cfg))
        .collect()
}

/// Respiration rate in breaths per minute, or `None` without presence.
pub fn estimate_rate(envelope: &[f64], sample_rate_hz: f64, cfg: &PipelineConfig) -> Result<Option<f64>> {
    let needed = cfg.min_rate_samples(sample_rate_hz);
    if envelope.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            available: envelope.len(),
        });
    }
    if !presence_flag(envelope, sample_rate_hz, cfg) {
        return Ok(None);
    }
    Ok(spectral_peak_hz(envelope, sample_rate_hz, cfg.resp_band_hz).map(|f| 60.0 * f))
}
