//! Threaded streaming: a producer feeds chirps through a bounded queue at
//! the radar's chirp rate while the consumer reports presence as it evolves.
//!
//! `cargo run --release --example live_monitor -- [seconds]`

use std::time::{Duration, Instant};

use fmcw_respiration::io::RunConfig;
use fmcw_respiration::pipeline::{run_threaded, QueuePolicy};
use fmcw_respiration::sim::{Scene, SceneSimulator};

fn main() -> fmcw_respiration::Result<()> {
    let seconds: f64 = std::env::args().nth(1).map_or(45.0, |s| s.parse().expect("duration in s"));
    let run = RunConfig::default();
    let radar = run.radar_config();
    let sim = SceneSimulator::new(radar, Scene { duration_s: seconds, ..Scene::default() })?;
    let interval = Duration::from_secs_f64(1.0 / radar.chirp_rate_hz());

    // paced like a live sensor; frames the consumer cannot absorb are dropped
    let start = Instant::now();
    let frames = sim.frames().inspect(|f| {
        let due = start + interval.mul_f64(f.chirp_index as f64);
        if let Some(wait) = due.checked_duration_since(Instant::now()) {
            std::thread::sleep(wait);
        }
    });

    let mut next_report = 5.0;
    let mut row_count = 0;
    let (tail, summary, dropped) = run_threaded(run.processor()?, frames, 256, QueuePolicy::DropOldest, |p, out| {
        row_count += out.rows.len();
        let t = out.chirp_index as f64 / radar.chirp_rate_hz();
        if t >= next_report {
            next_report += 5.0;
            for s in p.live_summaries() {
                println!(
                    "t={t:5.1}s track {} {:.2} m presence {} rate {}",
                    s.target_id,
                    s.range_m,
                    s.presence,
                    s.rate_bpm.map_or("-".into(), |r| format!("{r:.1} bpm"))
                );
            }
        }
    });
    println!(
        "{} frames processed, {dropped} dropped by the queue, {} trace rows, presence {}",
        summary.frames_processed,
        row_count + tail.len(),
        summary.presence()
    );
    Ok(())
}
