//! Range FFT of every chirp, kept in a slow-time waterfall. Prints where the
//! strongest returns sit and how much more the chest bin fluctuates than
//! static clutter.
//!
//! `cargo run --example waterfall -- [out.csv]`

use std::fs::File;
use std::io::BufWriter;

use fmcw_respiration::range::{RangeConfig, Waterfall};
use fmcw_respiration::sim::{Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    let radar = ModulePreset::Radar120G.config();
    let sim = SceneSimulator::new(radar, Scene { duration_s: 8.0, ..Scene::default() })?;
    let mut processor = RangeConfig::default().processor(radar.samples_per_chirp)?;
    let spacing = radar.bin_spacing_m(processor.fft_len());

    // one profile every 20 chirps keeps the CSV small
    let mut waterfall = Waterfall::new(400);
    for frame in sim.frames().step_by(20) {
        waterfall.push(processor.process(&frame)?)?;
    }

    let first = waterfall.rows().next().expect("non-empty waterfall");
    let mut order: Vec<usize> = (0..first.len()).collect();
    order.sort_by(|&a, &b| first.power_db[b].total_cmp(&first.power_db[a]));
    for &bin in order.iter().take(3) {
        println!("bin {bin:3} ({:.3} m): {:.1} dB", bin as f64 * spacing, first.power_db[bin]);
    }

    let target = (sim.scene().targets[0].range_m / spacing).round() as usize;
    let clutter = first.peak_bin().unwrap_or(0);
    for (name, bin) in [("clutter", clutter), ("chest", target)] {
        let series = waterfall.bin_series(bin);
        let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("{name} bin {bin} swings {:.2} dB over {} profiles", hi - lo, series.len());
    }

    if let Some(path) = std::env::args().nth(1) {
        waterfall.write_csv(BufWriter::new(File::create(&path)?), spacing)?;
        println!("wrote {path}");
    }
    Ok(())
}
