//! File formats, run configuration and the throughput benchmark.
//!
//! A recording is two files sharing a stem: `<stem>.iq` holds raw
//! interleaved `f32` little-endian samples (real then imaginary), frame
//! after frame, and `<stem>.hdr` is a TOML header describing the radar,
//! the frame count and, for simulated data, the scene.

mod bench;
mod config;
mod outputs;
mod recording;

pub use bench::{bench, BenchReport};
pub use config::{IoPaths, QueueConfig, RunConfig, CONFIG_ENV_VAR};
pub use outputs::{
    write_detections_jsonl, write_summary_json, write_truth_csv, write_waterfall_csv,
    TRUTH_CSV_HEADER,
};
pub use recording::{
    header_path, read_header, read_recording, write_header, write_recording, FrameReader,
    IqRecording, RecordingHeader, RecordingWriter, TruthSample, DATA_LAYOUT, FORMAT_VERSION,
};
