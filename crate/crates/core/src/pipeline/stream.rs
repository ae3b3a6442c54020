use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfar::{ca_cfar, CfarConfig, Detection};
use crate::error::{Error, Result};
use crate::radar::RadarConfig;
use crate::range::{ChirpFrame, RangeConfig, RangeProcessor, RangeProfile};

use super::envelope::EnvelopeDetector;
use super::impulses::ImpulseThresholder;
use super::queue::{BoundedQueue, QueuePolicy};
use super::recon::Reconstructor;
use super::spectral::{presence_ratio_db, spectral_peak_hz};
use super::trace::TraceRow;
use super::tracker::{TrackRecord, Tracker};
use super::PipelineConfig;

/// Impulse statistics are refreshed this often.
const IMPULSE_BLOCK_S: f64 = 0.1;

/// Result of feeding one frame.
#[derive(Debug, Clone, Default)]
pub struct FrameOutput {
    pub chirp_index: u64,
    /// Malformed or out-of-order frames are dropped, never processed.
    pub dropped: bool,
    pub profile: Option<RangeProfile>,
    pub detections: Vec<Detection>,
    /// Rows completed by this frame. Rows lag their frame by the impulse
    /// block plus the envelope smoothing delay.
    pub rows: Vec<TraceRow>,
}

/// Latest analysis state of one track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSummary {
    pub target_id: u64,
    pub bin: usize,
    pub range_m: f64,
    pub hits: usize,
    pub samples: u64,
    pub alive: bool,
    pub presence: bool,
    pub ratio_db: Option<f64>,
    pub rate_bpm: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamSummary {
    pub frames_processed: u64,
    pub frames_dropped: u64,
    /// Every track that was confirmed, in creation order.
    pub tracks: Vec<TrackSummary>,
}

impl StreamSummary {
    /// The present track with the strongest band ratio.
    pub fn best(&self) -> Option<&TrackSummary> {
        self.tracks
            .iter()
            .filter(|t| t.presence)
            .max_by(|a, b| {
                let ra = a.ratio_db.unwrap_or(f64::NEG_INFINITY);
                let rb = b.ratio_db.unwrap_or(f64::NEG_INFINITY);
                ra.total_cmp(&rb).then(b.target_id.cmp(&a.target_id))
            })
    }

    pub fn presence(&self) -> bool {
        self.best().is_some()
    }
}

/// Whole-recording output.
#[derive(Debug, Clone, Default)]
pub struct StreamOutput {
    pub rows: Vec<TraceRow>,
    pub detections: Vec<Detection>,
    pub summary: StreamSummary,
}

struct Pending {
    chirp_index: u64,
    t_slow: f64,
    bin: usize,
    raw_power_db: f64,
    recon_amp: f64,
}

struct TrackState {
    id: u64,
    hits: usize,
    bin: usize,
    samples: u64,
    confirmed: bool,
    impulses: ImpulseThresholder,
    envelope: EnvelopeDetector,
    awaiting_impulse: VecDeque<Pending>,
    awaiting_envelope: VecDeque<(Pending, f64)>,
    block_sum: f64,
    block_fill: usize,
    decimated: VecDeque<f64>,
    since_analysis: usize,
    presence: bool,
    ratio_db: Option<f64>,
    rate_bpm: Option<f64>,
}

struct Analysis {
    block: usize,
    rate_hz: f64,
    window: usize,
    interval: usize,
    min_samples: usize,
}

/// Stateful single-consumer processing chain.
///
/// Per frame: window, range FFT, CFAR, tracking and reconstruction, then
/// per track impulse thresholding, envelope smoothing and, every analysis
/// interval, a presence and rate decision over the decimated envelope
/// window. Memory is bounded by the presence window.
pub struct StreamProcessor {
    radar: RadarConfig,
    cfar: CfarConfig,
    cfg: PipelineConfig,
    range: RangeProcessor,
    recon: Reconstructor,
    tracker: Tracker,
    tracks: BTreeMap<u64, TrackState>,
    finished: Vec<TrackSummary>,
    analysis: Analysis,
    impulse_window: usize,
    impulse_block: usize,
    bin_spacing_m: f64,
    last_index: Option<u64>,
    last_t: f64,
    processed: u64,
    dropped: u64,
}

impl StreamProcessor {
    pub fn new(
        radar: RadarConfig,
        range: RangeConfig,
        cfar: CfarConfig,
        cfg: PipelineConfig,
    ) -> Result<Self> {
        radar.validate()?;
        cfar.validate()?;
        cfg.validate()?;
        let n = radar.samples_per_chirp;
        let range_proc = range.processor(n)?;
        let fft_len = range_proc.fft_len();
        let cfar_span = 2 * (cfar.train_cells + cfar.guard_cells) + 1;
        if fft_len / 2 < cfar_span {
            return Err(Error::config(format!(
                "{} range bins cannot hold a {cfar_span}-cell CFAR window",
                fft_len / 2
            )));
        }
        let chirp_rate = radar.chirp_rate_hz();
        if cfg.analysis_rate_hz > chirp_rate {
            return Err(Error::config(format!(
                "analysis rate {} Hz exceeds the chirp rate {chirp_rate} Hz",
                cfg.analysis_rate_hz
            )));
        }
        let block = ((chirp_rate / cfg.analysis_rate_hz).round() as usize).max(1);
        let rate_hz = chirp_rate / block as f64;
        let analysis = Analysis {
            block,
            rate_hz,
            window: ((cfg.presence_window_s * rate_hz).round() as usize).max(1),
            interval: ((cfg.analysis_interval_s * rate_hz).round() as usize).max(1),
            min_samples: cfg.min_rate_samples(rate_hz),
        };
        Ok(Self {
            radar,
            cfar,
            range: range_proc,
            recon: Reconstructor::new(fft_len),
            tracker: Tracker::new(&cfg),
            tracks: BTreeMap::new(),
            finished: Vec::new(),
            analysis,
            impulse_window: ((cfg.presence_window_s * chirp_rate).round() as usize).max(1),
            impulse_block: ((IMPULSE_BLOCK_S * chirp_rate).round() as usize).max(1),
            bin_spacing_m: radar.bin_spacing_m(fft_len),
            cfg,
            last_index: None,
            last_t: f64::NEG_INFINITY,
            processed: 0,
            dropped: 0,
        })
    }

    pub fn radar(&self) -> &RadarConfig {
        &self.radar
    }

    pub fn bin_spacing_m(&self) -> f64 {
        self.bin_spacing_m
    }

    /// Samples between a frame and the trace row it produces.
    pub fn row_latency(&self) -> usize {
        self.impulse_block - 1 + (self.cfg.envelope_smoothing_s * self.radar.chirp_rate_hz() / 2.0).round() as usize
    }

    fn accept(&self, frame: &ChirpFrame) -> bool {
        let ordered = self.last_index.is_none_or(|i| frame.chirp_index > i) && frame.t_slow >= self.last_t;
        ordered
            && frame.t_slow.is_finite()
            && frame.samples.len() == self.radar.samples_per_chirp
            && frame.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Processes one frame. Bad frames are counted and dropped.
    pub fn process_frame(&mut self, frame: &ChirpFrame) -> FrameOutput {
        if !self.accept(frame) {
            return self.drop_frame(frame.chirp_index);
        }
        match self.range.process(frame) {
            Ok(profile) => self.process_profile(profile),
            Err(_) => self.drop_frame(frame.chirp_index),
        }
    }

    fn drop_frame(&mut self, chirp_index: u64) -> FrameOutput {
        self.dropped += 1;
        FrameOutput {
            chirp_index,
            dropped: true,
            ..Default::default()
        }
    }

    fn process_profile(&mut self, profile: RangeProfile) -> FrameOutput {
        self.last_index = Some(profile.chirp_index);
        self.last_t = profile.t_slow;
        self.processed += 1;
        let mut detections = ca_cfar(&profile, &self.cfar, self.bin_spacing_m)
            .expect("profile length checked against the CFAR window at construction");
        if let Some(gate) = self.cfg.range_gate {
            detections.retain(|d| gate.contains(d.range_m));
        }
        let update = self.tracker.update(&profile, &detections);
        let mut rows = Vec::new();
        for id in update.dropped {
            if let Some(mut t) = self.tracks.remove(&id) {
                self.finish_track(&mut t, &mut rows, false);
            }
        }
        for (id, hits, record) in update.records {
            let amp = self.recon.amplitude(record.bin, &record.neighborhood);
            let state = match self.tracks.remove(&id) {
                Some(s) => s,
                None => self.new_track(id),
            };
            let mut state = state;
            self.push_sample(&mut state, hits, &record, amp, &mut rows);
            self.tracks.insert(id, state);
        }
        FrameOutput {
            chirp_index: profile.chirp_index,
            dropped: false,
            profile: Some(profile),
            detections,
            rows,
        }
    }

    fn new_track(&self, id: u64) -> TrackState {
        let chirp_rate = self.radar.chirp_rate_hz();
        TrackState {
            id,
            hits: 0,
            bin: 0,
            samples: 0,
            confirmed: false,
            impulses: ImpulseThresholder::new(self.cfg.impulse, self.impulse_window, self.impulse_block),
            envelope: EnvelopeDetector::new(chirp_rate, self.cfg.envelope_smoothing_s),
            awaiting_impulse: VecDeque::new(),
            awaiting_envelope: VecDeque::new(),
            block_sum: 0.0,
            block_fill: 0,
            decimated: VecDeque::with_capacity(self.analysis.window),
            since_analysis: 0,
            presence: false,
            ratio_db: None,
            rate_bpm: None,
        }
    }

    fn push_sample(
        &self,
        t: &mut TrackState,
        hits: usize,
        record: &TrackRecord,
        amp: f64,
        rows: &mut Vec<TraceRow>,
    ) {
        t.hits = hits;
        t.bin = record.bin;
        t.samples += 1;
        t.confirmed |= hits >= self.cfg.confirm_hits;
        t.awaiting_impulse.push_back(Pending {
            chirp_index: record.chirp_index,
            t_slow: record.t_slow,
            bin: record.bin,
            raw_power_db: record.power_db,
            recon_amp: amp,
        });
        if let Some(block) = t.impulses.push(amp) {
            self.feed_impulses(t, block, rows);
        }
    }

    fn feed_impulses(&self, t: &mut TrackState, block: Vec<f64>, rows: &mut Vec<TraceRow>) {
        for v in block {
            let p = t.awaiting_impulse.pop_front().expect("one pending row per impulse");
            t.awaiting_envelope.push_back((p, v));
            if let Some(e) = t.envelope.push(v) {
                self.complete_row(t, e, rows);
            }
        }
    }

    fn complete_row(&self, t: &mut TrackState, envelope: f64, rows: &mut Vec<TraceRow>) {
        let (p, impulses) = t.awaiting_envelope.pop_front().expect("one pending row per envelope value");
        self.decimate(t, envelope);
        if t.confirmed {
            rows.push(TraceRow {
                target_id: t.id,
                chirp_index: p.chirp_index,
                t_slow: p.t_slow,
                bin: p.bin,
                raw_power_db: p.raw_power_db,
                recon_amp: p.recon_amp,
                impulses,
                envelope,
                rate_bpm: t.rate_bpm,
                presence: t.presence,
            });
        }
    }

    fn decimate(&self, t: &mut TrackState, envelope: f64) {
        t.block_sum += envelope;
        t.block_fill += 1;
        if t.block_fill < self.analysis.block {
            return;
        }
        let mean = t.block_sum / self.analysis.block as f64;
        t.block_sum = 0.0;
        t.block_fill = 0;
        if t.decimated.len() == self.analysis.window {
            t.decimated.pop_front();
        }
        t.decimated.push_back(mean);
        t.since_analysis += 1;
        if t.since_analysis < self.analysis.interval {
            return;
        }
        t.since_analysis = 0;
        if t.decimated.len() < self.analysis.min_samples {
            t.presence = false;
            t.ratio_db = None;
            t.rate_bpm = None;
            return;
        }
        let window = t.decimated.make_contiguous();
        let ratio = presence_ratio_db(window, self.analysis.rate_hz, self.cfg.resp_band_hz);
        t.ratio_db = ratio.is_finite().then_some(ratio);
        t.presence = ratio > self.cfg.presence_ratio_db;
        t.rate_bpm = if t.presence {
            spectral_peak_hz(window, self.analysis.rate_hz, self.cfg.resp_band_hz).map(|f| 60.0 * f)
        } else {
            None
        };
    }

    fn finish_track(&mut self, t: &mut TrackState, rows: &mut Vec<TraceRow>, alive: bool) {
        let tail = t.impulses.flush();
        self.feed_impulses(t, tail, rows);
        for e in t.envelope.flush() {
            self.complete_row(t, e, rows);
        }
        if t.confirmed {
            self.finished.push(TrackSummary {
                target_id: t.id,
                bin: t.bin,
                range_m: t.bin as f64 * self.bin_spacing_m,
                hits: t.hits,
                samples: t.samples,
                alive,
                presence: t.presence,
                ratio_db: t.ratio_db,
                rate_bpm: t.rate_bpm,
            });
        }
    }

    /// Drains every live track and returns the remaining rows with the
    /// final summary.
    pub fn finish(mut self) -> (Vec<TraceRow>, StreamSummary) {
        let mut rows = Vec::new();
        let live = std::mem::take(&mut self.tracks);
        for (_, mut t) in live {
            self.finish_track(&mut t, &mut rows, true);
        }
        self.finished.sort_by_key(|s| s.target_id);
        let summary = StreamSummary {
            frames_processed: self.processed,
            frames_dropped: self.dropped,
            tracks: self.finished,
        };
        (rows, summary)
    }

    /// Current decisions of live confirmed tracks.
    pub fn live_summaries(&self) -> Vec<TrackSummary> {
        self.tracks
            .values()
            .filter(|t| t.confirmed)
            .map(|t| TrackSummary {
                target_id: t.id,
                bin: t.bin,
                range_m: t.bin as f64 * self.bin_spacing_m,
                hits: t.hits,
                samples: t.samples,
                alive: true,
                presence: t.presence,
                ratio_db: t.ratio_db,
                rate_bpm: t.rate_bpm,
            })
            .collect()
    }
}

fn collect(out: &mut StreamOutput, f: FrameOutput) {
    out.rows.extend(f.rows);
    out.detections.extend(f.detections);
}

/// Feeds frames one at a time, in order.
pub fn process_stream<I>(mut processor: StreamProcessor, frames: I) -> StreamOutput
where
    I: IntoIterator<Item = ChirpFrame>,
{
    let mut out = StreamOutput::default();
    for frame in frames {
        let mut f = processor.process_frame(&frame);
        f.profile = None;
        collect(&mut out, f);
    }
    let (rows, summary) = processor.finish();
    out.rows.extend(rows);
    out.summary = summary;
    out
}

/// Offline processing: range FFTs run in parallel, everything stateful runs
/// in frame order through the same processor as [`process_stream`].
pub fn process_batch(mut processor: StreamProcessor, frames: &[ChirpFrame]) -> StreamOutput {
    let template = processor.range.clone();
    let profiles: Vec<Option<RangeProfile>> = frames
        .par_iter()
        .map_init(|| template.clone(), |rp, f| rp.process(f).ok())
        .collect();
    let mut out = StreamOutput::default();
    for (frame, profile) in frames.iter().zip(profiles) {
        let f = match profile {
            Some(p) if processor.accept(frame) => processor.process_profile(p),
            _ => processor.drop_frame(frame.chirp_index),
        };
        collect(&mut out, FrameOutput { profile: None, ..f });
    }
    let (rows, summary) = processor.finish();
    out.rows.extend(rows);
    out.summary = summary;
    out
}

/// Producer thread pulls `frames` into a bounded queue; the calling thread
/// consumes them and hands each output to `on_frame`. Returns the rows
/// flushed at the end, the summary and the number of frames the queue
/// discarded.
pub fn run_threaded<I, F>(
    mut processor: StreamProcessor,
    frames: I,
    capacity: usize,
    policy: QueuePolicy,
    mut on_frame: F,
) -> (Vec<TraceRow>, StreamSummary, u64)
where
    I: IntoIterator<Item = ChirpFrame>,
    I::IntoIter: Send,
    F: FnMut(&StreamProcessor, FrameOutput),
{
    let queue = BoundedQueue::new(capacity, policy);
    let frames = frames.into_iter();
    std::thread::scope(|s| {
        let q = &queue;
        s.spawn(move || {
            for f in frames {
                if q.push(f).is_err() {
                    break;
                }
            }
            q.close();
        });
        while let Some(frame) = queue.pop() {
            let out = processor.process_frame(&frame);
            on_frame(&processor, out);
        }
    });
    let (rows, summary) = processor.finish();
    (rows, summary, queue.dropped())
}
