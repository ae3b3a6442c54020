use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex32;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::RadarConfig;
use crate::range::ChirpFrame;
use crate::sim::Scene;

pub const FORMAT_VERSION: u32 = 1;
pub const DATA_LAYOUT: &str = "cf32le-interleaved-frame-major";
const BYTES_PER_SAMPLE: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingHeader {
    pub format_version: u32,
    pub n_chirps: u64,
    pub data_layout: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_seed: Option<u64>,
    pub radar: RadarConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<Scene>,
}

impl RecordingHeader {
    pub fn new(radar: RadarConfig, n_chirps: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n_chirps,
            data_layout: DATA_LAYOUT.to_string(),
            noise_seed: None,
            radar,
            scene: None,
        }
    }

    pub fn with_scene(mut self, scene: Scene) -> Self {
        self.noise_seed = Some(scene.noise_seed);
        self.scene = Some(scene);
        self
    }

    pub fn data_bytes(&self) -> u64 {
        self.n_chirps * self.radar.samples_per_chirp as u64 * BYTES_PER_SAMPLE
    }

    fn check(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.format_version));
        }
        if self.data_layout != DATA_LAYOUT {
            return Err(Error::Format {
                what: "recording header".into(),
                detail: format!("unknown data layout {:?}", self.data_layout),
            });
        }
        self.radar.validate()
    }
}

/// Per-chirp ground truth of a simulated recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSample {
    pub time_s: f64,
    /// Chest displacement of each target, in scene order.
    pub displacement_m: Vec<f64>,
}

/// A recording held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct IqRecording {
    pub header: RecordingHeader,
    pub frames: Vec<ChirpFrame>,
    pub truth: Vec<TruthSample>,
}

/// Sidecar header path: same stem, `hdr` extension.
pub fn header_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("hdr")
}

pub fn write_header(data_path: &Path, header: &RecordingHeader) -> Result<()> {
    let text = toml::to_string(header).map_err(|e| Error::Format {
        what: "recording header".into(),
        detail: e.to_string(),
    })?;
    std::fs::write(header_path(data_path), text)?;
    Ok(())
}

pub fn read_header(data_path: &Path) -> Result<RecordingHeader> {
    let hp = header_path(data_path);
    let text = std::fs::read_to_string(&hp)?;
    // the version is checked before the rest so newer headers fail cleanly
    let raw: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Format {
        what: hp.display().to_string(),
        detail: e.to_string(),
    })?;
    match raw.get("format_version").and_then(|v| v.as_integer()) {
        Some(v) if v == FORMAT_VERSION as i64 => {}
        Some(v) => return Err(Error::UnsupportedVersion(u32::try_from(v).unwrap_or(u32::MAX))),
        None => {
            return Err(Error::Format {
                what: hp.display().to_string(),
                detail: "missing format_version".into(),
            })
        }
    }
    let header: RecordingHeader = toml::from_str(&text).map_err(|e| Error::Format {
        what: hp.display().to_string(),
        detail: e.to_string(),
    })?;
    header.check()?;
    Ok(header)
}

/// Streaming writer. The header is written by [`RecordingWriter::finish`]
/// with the number of frames actually written.
pub struct RecordingWriter {
    path: PathBuf,
    header: RecordingHeader,
    out: BufWriter<File>,
    written: u64,
    buf: Vec<u8>,
}

impl RecordingWriter {
    pub fn create(data_path: &Path, header: RecordingHeader) -> Result<Self> {
        header.check()?;
        let out = BufWriter::with_capacity(1 << 20, File::create(data_path)?);
        Ok(Self {
            path: data_path.to_path_buf(),
            buf: Vec::with_capacity(header.radar.samples_per_chirp * BYTES_PER_SAMPLE as usize),
            header,
            out,
            written: 0,
        })
    }

    pub fn write_frame(&mut self, frame: &ChirpFrame) -> Result<()> {
        let n = self.header.radar.samples_per_chirp;
        if frame.samples.len() != n {
            return Err(Error::argument(format!(
                "frame {} has {} samples, header says {n}",
                frame.chirp_index,
                frame.samples.len()
            )));
        }
        self.buf.clear();
        for z in &frame.samples {
            self.buf.extend_from_slice(&z.re.to_le_bytes());
            self.buf.extend_from_slice(&z.im.to_le_bytes());
        }
        self.out.write_all(&self.buf)?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<RecordingHeader> {
        self.out.flush()?;
        self.header.n_chirps = self.written;
        write_header(&self.path, &self.header)?;
        Ok(self.header)
    }
}

/// Writes `frames` to `data_path` and the header sidecar next to it.
/// The header's frame count is replaced by the number written.
pub fn write_recording<'a, I>(data_path: &Path, header: &RecordingHeader, frames: I) -> Result<RecordingHeader>
where
    I: IntoIterator<Item = &'a ChirpFrame>,
{
    let mut w = RecordingWriter::create(data_path, header.clone())?;
    for f in frames {
        w.write_frame(f)?;
    }
    w.finish()
}

/// Lazy frame iterator over a recording's data file.
pub struct FrameReader {
    input: BufReader<File>,
    samples_per_chirp: usize,
    interval_s: f64,
    next: u64,
    n_chirps: u64,
    buf: Vec<u8>,
}

impl FrameReader {
    pub fn len(&self) -> u64 {
        self.n_chirps - self.next
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Iterator for FrameReader {
    type Item = Result<ChirpFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.n_chirps {
            return None;
        }
        if let Err(e) = self.input.read_exact(&mut self.buf) {
            self.next = self.n_chirps;
            return Some(Err(e.into()));
        }
        let samples = self
            .buf
            .chunks_exact(BYTES_PER_SAMPLE as usize)
            .map(|c| {
                Complex32::new(
                    f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                    f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
                )
            })
            .collect();
        let chirp_index = self.next;
        self.next += 1;
        Some(Ok(ChirpFrame {
            samples,
            chirp_index,
            t_slow: chirp_index as f64 * self.interval_s,
        }))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.len() as usize;
        (n, Some(n))
    }
}

/// Opens a recording, checking the header and the data size.
pub fn read_recording(data_path: &Path) -> Result<(RecordingHeader, FrameReader)> {
    let header = read_header(data_path)?;
    let file = File::open(data_path)?;
    let actual = file.metadata()?.len();
    let expected = header.data_bytes();
    if actual != expected {
        return Err(Error::CorruptFile {
            path: data_path.to_path_buf(),
            expected,
            actual,
        });
    }
    let reader = FrameReader {
        input: BufReader::with_capacity(1 << 20, file),
        samples_per_chirp: header.radar.samples_per_chirp,
        interval_s: header.radar.chirp_interval_s,
        next: 0,
        n_chirps: header.n_chirps,
        buf: vec![0; header.radar.samples_per_chirp * BYTES_PER_SAMPLE as usize],
    };
    debug_assert_eq!(reader.buf.len(), reader.samples_per_chirp * 8);
    Ok((header, reader))
}
