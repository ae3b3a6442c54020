use fmcw_respiration::io::{
    read_header, read_recording, write_recording, RecordingHeader, RunConfig, FORMAT_VERSION,
};
use fmcw_respiration::pipeline::{process_batch, process_stream, write_trace_csv};
use fmcw_respiration::sim::{synth_recording, BreathingTarget, Scene};
use fmcw_respiration::{Error, ModulePreset};

fn scene(seconds: f64) -> Scene {
    Scene::breathing(
        BreathingTarget {
            range_m: 1.2,
            ..Default::default()
        },
        seconds,
        21,
    )
}

#[test]
fn recording_roundtrip_preserves_frames_and_header() {
    let radar = ModulePreset::Radar94G.config();
    let rec = synth_recording(&radar, &scene(0.5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.iq");
    let header = write_recording(&path, &rec.header, &rec.frames).unwrap();
    assert_eq!(header.n_chirps, rec.frames.len() as u64);
    assert_eq!(header.format_version, FORMAT_VERSION);

    let (h, frames) = read_recording(&path).unwrap();
    assert_eq!(h, header);
    assert_eq!(h.scene.as_ref(), Some(&scene(0.5)));
    let back: Vec<_> = frames.collect::<Result<_, _>>().unwrap();
    assert_eq!(back, rec.frames);
}

#[test]
fn processing_a_file_matches_processing_in_memory() {
    let run = RunConfig::default();
    let rec = synth_recording(&run.radar_config(), &scene(12.0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.iq");
    write_recording(&path, &rec.header, &rec.frames).unwrap();

    let (_, reader) = read_recording(&path).unwrap();
    let from_file = process_stream(run.processor().unwrap(), reader.map(Result::unwrap));
    let in_memory = process_batch(run.processor().unwrap(), &rec.frames);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_trace_csv(&mut a, &from_file.rows).unwrap();
    write_trace_csv(&mut b, &in_memory.rows).unwrap();
    assert!(!from_file.rows.is_empty());
    assert_eq!(a, b);
    assert_eq!(from_file.summary, in_memory.summary);
    assert_eq!(from_file.detections, in_memory.detections);
}

#[test]
fn truncated_data_is_reported_with_sizes() {
    let radar = ModulePreset::Radar120G.config();
    let rec = synth_recording(&radar, &scene(0.01)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.iq");
    write_recording(&path, &rec.header, &rec.frames).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    match read_recording(&path) {
        Err(Error::CorruptFile { expected, actual, .. }) => {
            assert_eq!(expected, bytes.len() as u64);
            assert_eq!(actual, bytes.len() as u64 - 3);
        }
        Err(e) => panic!("expected CorruptFile, got {e}"),
        Ok(_) => panic!("truncated file accepted"),
    }
}

#[test]
fn header_is_readable_toml() {
    let radar = ModulePreset::Radar120G.config();
    let header = RecordingHeader::new(radar, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.iq");
    write_recording(&path, &header, &[]).unwrap();
    let text = std::fs::read_to_string(dir.path().join("empty.hdr")).unwrap();
    assert!(text.contains("format_version = 1"), "{text}");
    assert_eq!(read_header(&path).unwrap().n_chirps, 0);
}
