//! Synthesizes a breathing scene, writes it as a recording plus ground truth
//! and reads it back.
//!
//! `cargo run --example simulate_recording -- [out_dir]`

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use fmcw_respiration::io::{header_path, read_recording, write_truth_csv, RecordingWriter};
use fmcw_respiration::sim::{BreathingTarget, Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("fmcw-example"), PathBuf::from);
    std::fs::create_dir_all(&out_dir)?;

    let target = BreathingTarget {
        range_m: 1.5,
        breath_rate_hz: 0.3,
        ..Default::default()
    };
    let sim = SceneSimulator::new(ModulePreset::Radar120G.config(), Scene::breathing(target, 10.0, 42))?;

    let data = out_dir.join("scene.iq");
    let mut writer = RecordingWriter::create(&data, sim.header())?;
    let mut truth = Vec::new();
    for frame in sim.frames() {
        writer.write_frame(&frame)?;
        truth.push(sim.truth(frame.chirp_index));
    }
    let header = writer.finish()?;
    write_truth_csv(BufWriter::new(File::create(out_dir.join("scene_truth.csv"))?), &truth)?;
    println!(
        "wrote {} chirps ({} bytes) to {} with header {}",
        header.n_chirps,
        header.data_bytes(),
        data.display(),
        header_path(&data).display()
    );

    let (read_header, frames) = read_recording(&data)?;
    let mut matched = 0;
    for (i, frame) in frames.enumerate() {
        if frame? == sim.synth_frame(i as u64)? {
            matched += 1;
        }
    }
    println!("read back {matched}/{} identical frames", read_header.n_chirps);
    let peak = truth.iter().map(|t| t.displacement_m[0]).fold(0.0, f64::max);
    println!("peak chest displacement {:.2} mm", peak * 1e3);
    Ok(())
}
