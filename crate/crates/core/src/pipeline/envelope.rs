use std::collections::VecDeque;

/// Streaming peak-hold envelope followed by a centred moving average.
///
/// The peak-hold stage is `env[i] = max(x[i], env[i-1] * exp(-dt / tau))`.
/// The moving average spans `2h + 1` samples, `h = round(tau * rate / 2)`,
/// and is zero-phase, so output lags input by `h` samples. Both ends are
/// padded with the nearest peak-hold value.
#[derive(Debug, Clone)]
pub struct EnvelopeDetector {
    decay: f64,
    half: usize,
    held: Option<f64>,
    window: VecDeque<f64>,
    pushed: usize,
    emitted: usize,
}

impl EnvelopeDetector {
    pub fn new(sample_rate_hz: f64, smoothing_s: f64) -> Self {
        let decay = (-1.0 / (sample_rate_hz * smoothing_s)).exp();
        let half = (smoothing_s * sample_rate_hz / 2.0).round() as usize;
        Self {
            decay,
            half,
            held: None,
            window: VecDeque::with_capacity(2 * half + 1),
            pushed: 0,
            emitted: 0,
        }
    }

    /// Output delay in samples.
    pub fn delay(&self) -> usize {
        self.half
    }

    /// Feeds one sample; returns the envelope `delay()` samples back once
    /// enough input has arrived.
    pub fn push(&mut self, x: f64) -> Option<f64> {
        let held = match self.held {
            Some(prev) => x.max(prev * self.decay),
            None => {
                for _ in 0..self.half {
                    self.window.push_back(x.max(0.0));
                }
                x
            }
        }
        .max(0.0);
        self.held = Some(held);
        self.window.push_back(held);
        self.pushed += 1;
        self.emit()
    }

    fn emit(&mut self) -> Option<f64> {
        let width = 2 * self.half + 1;
        if self.window.len() < width {
            return None;
        }
        let mean = self.window.iter().sum::<f64>() / width as f64;
        self.window.pop_front();
        self.emitted += 1;
        Some(mean)
    }

    /// Pads the tail and returns the outputs still owed, so the total output
    /// length equals the input length.
    pub fn flush(&mut self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pushed - self.emitted);
        let Some(last) = self.held else {
            return out;
        };
        while self.emitted < self.pushed {
            self.window.push_back(last);
            out.extend(self.emit());
        }
        out
    }
}

/// Envelope of a whole impulse series; same length as the input.
pub fn envelope_detect(impulses: &[f64], sample_rate_hz: f64, smoothing_s: f64) -> Vec<f64> {
    let mut det = EnvelopeDetector::new(sample_rate_hz, smoothing_s);
    let mut out: Vec<f64> = impulses.iter().filter_map(|&x| det.push(x)).collect();
    out.extend(det.flush());
    out
}
