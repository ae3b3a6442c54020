//! CA-CFAR on a single range profile under each edge policy, and the
//! false-alarm rate it achieves on pure noise.
//!
//! `cargo run --example cfar_detect`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use fmcw_respiration::cfar::{ca_cfar, ca_cfar_power, cfar_alpha, strongest_target, CfarConfig, EdgePolicy, RangeGate};
use fmcw_respiration::range::RangeConfig;
use fmcw_respiration::sim::{Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    let radar = ModulePreset::Radar120G.config();
    let sim = SceneSimulator::new(radar, Scene::default())?;
    let mut processor = RangeConfig::default().processor(radar.samples_per_chirp)?;
    let profile = processor.process(&sim.synth_frame(0)?)?;
    let spacing = radar.bin_spacing_m(processor.fft_len());

    for edge_policy in [EdgePolicy::Shrink, EdgePolicy::Wrap, EdgePolicy::Skip] {
        let cfg = CfarConfig {
            edge_policy,
            ..Default::default()
        };
        let dets = ca_cfar(&profile, &cfg, spacing)?;
        let list: Vec<String> = dets
            .iter()
            .map(|d| format!("{:.2} m ({:.1} dB over {:.1})", d.range_m, d.power_db, d.threshold_db))
            .collect();
        println!("{edge_policy:?}: {}", list.join(", "));
        let gate = RangeGate { min_m: 1.0, max_m: 4.0 };
        if let Some(d) = strongest_target(&dets, gate) {
            println!("  strongest in 1-4 m: bin {}", d.bin);
        }
    }

    let cfg = CfarConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cells = 200_000;
    let noise: Vec<f64> = (0..cells).map(|_| Exp1.sample(&mut rng)).collect();
    let alarms = ca_cfar_power(&noise, &cfg)?.len();
    println!(
        "alpha {:.3}; {alarms} alarms in {cells} noise cells = {:.2e} (design {:.0e})",
        cfar_alpha(&cfg),
        alarms as f64 / cells as f64,
        cfg.pfa
    );
    Ok(())
}
