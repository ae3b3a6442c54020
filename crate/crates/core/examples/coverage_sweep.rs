//! Detection probability against range and aspect angle for both modules.
//!
//! `cargo run --release --example coverage_sweep -- [seeds]`

use rayon::prelude::*;

use fmcw_respiration::io::RunConfig;
use fmcw_respiration::sim::{BreathingTarget, Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn detected(run: &RunConfig, range_m: f64, angle_deg: f64, seed: u64) -> bool {
    let target = BreathingTarget {
        range_m,
        aspect_angle_deg: angle_deg,
        ..Default::default()
    };
    let radar = run.radar_config();
    let sim = SceneSimulator::new(radar, Scene::breathing(target, 40.0, seed)).expect("valid scene");
    let mut p = run.processor().expect("valid config");
    for frame in sim.frames() {
        p.process_frame(&frame);
    }
    let tol = (run.pipeline.gate_bins + 1) as f64 * p.bin_spacing_m();
    p.finish()
        .1
        .tracks
        .iter()
        .any(|t| t.presence && (t.range_m - range_m).abs() <= tol)
}

fn probability(run: &RunConfig, range_m: f64, angle_deg: f64, seeds: u64) -> f64 {
    let hits = (0..seeds)
        .into_par_iter()
        .filter(|&s| detected(run, range_m, angle_deg, 100 + s))
        .count();
    hits as f64 / seeds as f64
}

fn main() {
    let seeds: u64 = std::env::args().nth(1).map_or(4, |s| s.parse().expect("seed count"));
    for preset in [ModulePreset::Radar120G, ModulePreset::Radar94G] {
        let run = RunConfig::for_preset(preset);
        let by_range: Vec<String> = [1.0, 2.0, 3.0, 4.0, 5.0]
            .iter()
            .map(|&r| format!("{r} m:{:.2}", probability(&run, r, 0.0, seeds)))
            .collect();
        let by_angle: Vec<String> = [0.0, 20.0, 40.0, 60.0]
            .iter()
            .map(|&a| format!("{a} deg:{:.2}", probability(&run, 2.0, a, seeds)))
            .collect();
        println!("{preset} range   {}", by_range.join("  "));
        println!("{preset} angle   {}", by_angle.join("  "));
    }
}
