//! Full pipeline over a simulated recording: tracks, impulses, envelope,
//! presence and breathing rate.
//!
//! `cargo run --release --example respiration_trace -- [rate_hz] [range_m] [trace.csv]`

use std::fs::File;
use std::io::BufWriter;

use fmcw_respiration::io::RunConfig;
use fmcw_respiration::pipeline::{process_stream, write_trace_csv, RespirationTrace};
use fmcw_respiration::sim::{BreathingTarget, Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    let mut args = std::env::args().skip(1);
    let rate_hz: f64 = args.next().map_or(0.25, |s| s.parse().expect("rate in Hz"));
    let range_m: f64 = args.next().map_or(2.0, |s| s.parse().expect("range in m"));
    let csv = args.next();

    let run = RunConfig::for_preset(ModulePreset::Radar94G);
    let target = BreathingTarget {
        range_m,
        breath_rate_hz: rate_hz,
        ..Default::default()
    };
    let sim = SceneSimulator::new(run.radar_config(), Scene::breathing(target, 60.0, 3))?;
    let out = process_stream(run.processor()?, sim.frames());

    for t in &out.summary.tracks {
        println!(
            "track {} at {:.2} m: presence {}, ratio {:.1} dB, rate {}",
            t.target_id,
            t.range_m,
            t.presence,
            t.ratio_db.unwrap_or(f64::NAN),
            t.rate_bpm.map_or("-".into(), |r| format!("{r:.2} bpm"))
        );
    }
    match out.summary.best() {
        Some(best) => {
            let trace = RespirationTrace::from_rows(&out.rows, best.target_id);
            println!(
                "breathing at {:.2} m: {:.2} bpm (truth {:.2}), {} trace samples",
                best.range_m,
                trace.final_rate_bpm().unwrap_or(f64::NAN),
                60.0 * rate_hz,
                trace.len()
            );
        }
        None => println!("no breathing target found"),
    }
    if let Some(path) = csv {
        write_trace_csv(BufWriter::new(File::create(&path)?), &out.rows)?;
        println!("wrote {path}");
    }
    Ok(())
}
