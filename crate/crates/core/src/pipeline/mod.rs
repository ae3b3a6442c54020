//! Slow-time respiration analysis of tracked range peaks.
//!
//! Per chirp: CFAR detections are associated to peak tracks, each track's
//! complex neighbourhood is reconstructed into a fast-time amplitude by a
//! masked inverse FFT, thresholded into impulses and smoothed into an
//! envelope. Presence and rate are decided on a decimated copy of the
//! envelope at a fixed cadence, so per-chirp cost stays bounded.

mod envelope;
mod impulses;
mod queue;
mod recon;
mod spectral;
mod stream;
mod trace;
mod tracker;

use serde::{Deserialize, Serialize};

use crate::cfar::RangeGate;
use crate::error::{Error, Result};

pub use envelope::{envelope_detect, EnvelopeDetector};
pub use impulses::{threshold_impulses, ImpulsePolicy, ImpulseThresholder, SlidingOrderStats};
pub use queue::{BoundedQueue, QueuePolicy};
pub use recon::{reconstruct_amplitude, Reconstructor};
pub use spectral::{
    estimate_rate, presence_flag, presence_flags, presence_ratio_db, spectral_peak_hz,
};
pub use stream::{
    process_batch, process_stream, run_threaded, FrameOutput, StreamOutput, StreamProcessor,
    StreamSummary, TrackSummary,
};
pub use trace::{write_trace_csv, RespirationTrace, TraceRow, TRACE_CSV_HEADER};
pub use tracker::{track_peak, PeakTrack, TrackRecord, TrackUpdate, Tracker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Half-width M of the tracked neighbourhood, in bins.
    pub gate_bins: usize,
    /// Consecutive misses a track may coast through before it is dropped.
    pub miss_tolerance: usize,
    pub max_tracks: usize,
    /// Detections needed before a track's rows are emitted.
    pub confirm_hits: usize,
    pub impulse: ImpulsePolicy,
    pub envelope_smoothing_s: f64,
    pub resp_band_hz: [f64; 2],
    pub presence_ratio_db: f64,
    pub presence_window_s: f64,
    /// Rate of the decimated envelope used for presence and rate decisions.
    pub analysis_rate_hz: f64,
    pub analysis_interval_s: f64,
    /// Only detections inside this gate start or feed tracks.
    pub range_gate: Option<RangeGate>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            gate_bins: 3,
            miss_tolerance: 10,
            max_tracks: 8,
            confirm_hits: 20,
            impulse: ImpulsePolicy::default(),
            envelope_smoothing_s: 0.5,
            resp_band_hz: [0.1, 0.7],
            presence_ratio_db: 6.0,
            presence_window_s: 30.0,
            analysis_rate_hz: 10.0,
            analysis_interval_s: 1.0,
            range_gate: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.resp_band_hz;
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::config(format!(
                "respiration band [{lo}, {hi}] Hz must satisfy 0 < lo < hi"
            )));
        }
        if !(self.envelope_smoothing_s > 0.0) {
            return Err(Error::config("envelope smoothing window must be positive"));
        }
        if !(self.presence_window_s > 0.0 && self.analysis_interval_s > 0.0) {
            return Err(Error::config("presence window and analysis interval must be positive"));
        }
        if !(self.analysis_rate_hz > 2.0 * hi) {
            return Err(Error::config(format!(
                "analysis rate {} Hz cannot resolve the {hi} Hz band edge",
                self.analysis_rate_hz
            )));
        }
        if self.max_tracks == 0 {
            return Err(Error::config("max_tracks must be positive"));
        }
        self.impulse.validate()
    }

    /// Samples a rate estimate needs at `sample_rate_hz`: three periods of the lowest band frequency.
    pub fn min_rate_samples(&self, sample_rate_hz: f64) -> usize {
        (3.0 / self.resp_band_hz[0] * sample_rate_hz - 1e-6).ceil() as usize
    }
}
