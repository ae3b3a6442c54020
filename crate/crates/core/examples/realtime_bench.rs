//! Per-chirp latency and throughput of the streaming pipeline.
//!
//! `cargo run --release --example realtime_bench -- [RADAR_120G|RADAR_94G]`

use fmcw_respiration::io::{bench, RunConfig};
use fmcw_respiration::sim::Scene;
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    let preset: ModulePreset = std::env::args()
        .nth(1)
        .map_or(Ok(ModulePreset::Radar120G), |s| s.parse())?;
    let report = bench(&RunConfig::for_preset(preset), &Scene::default())?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
    Ok(())
}
