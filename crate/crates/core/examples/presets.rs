//! Radar module presets and the quantities derived from them.
//!
//! `cargo run --example presets`

use fmcw_respiration::radar::range_resolution;
use fmcw_respiration::ModulePreset;

fn main() -> fmcw_respiration::Result<()> {
    for preset in [ModulePreset::Radar120G, ModulePreset::Radar94G] {
        let cfg = preset.config();
        let n = cfg.samples_per_chirp;
        println!("{preset}");
        println!("  wavelength        {:.3} mm", cfg.wavelength_m() * 1e3);
        println!("  resolution        {:.5} m", cfg.range_resolution()?);
        println!("  bin spacing       {:.5} m", cfg.bin_spacing_m(n));
        println!("  max range         {:.3} m", cfg.max_unambiguous_range());
        println!("  beat at 2 m       {:.1} Hz", cfg.beat_frequency(2.0)?);
        println!("  chirp rate        {:.0} Hz", cfg.chirp_rate_hz());
    }
    for b in [1e9, 6e9, 14e9] {
        println!("c/2B for {:>4.0} GHz: {:.6} m", b / 1e9, range_resolution(b)?);
    }
    Ok(())
}
