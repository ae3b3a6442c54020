use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::{Scene, SceneSimulator};

use super::config::RunConfig;

const SYNTH_CHUNK: u64 = 1000;

/// Throughput and per-frame latency of the processing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub preset: String,
    pub frames: u64,
    pub processing_s: f64,
    pub frames_per_s: f64,
    /// Scene duration over processing time.
    pub realtime_factor: f64,
    pub latency_p50_us: f64,
    pub latency_p90_us: f64,
    pub latency_p99_us: f64,
    pub latency_max_us: f64,
    pub chirp_interval_us: f64,
    /// p99 latency below the chirp interval and at least 10x real time.
    pub realtime_ok: bool,
}

fn percentile_us(sorted: &[Duration], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1].as_secs_f64() * 1e6
}

/// Simulates `scene` and times the processor on each frame. Synthesis runs
/// ahead in chunks and is not timed.
pub fn bench(config: &RunConfig, scene: &Scene) -> Result<BenchReport> {
    let radar = config.radar_config();
    let sim = SceneSimulator::new(radar, scene.clone())?;
    let mut processor = config.processor()?;
    let n = sim.n_chirps();
    let mut latencies = Vec::with_capacity(n as usize);
    let mut start = 0;
    while start < n {
        let end = (start + SYNTH_CHUNK).min(n);
        let frames = (start..end)
            .into_par_iter()
            .map(|i| sim.synth_frame(i))
            .collect::<Result<Vec<_>>>()?;
        for f in &frames {
            let t0 = Instant::now();
            let out = processor.process_frame(f);
            drop(out);
            latencies.push(t0.elapsed());
        }
        start = end;
    }
    drop(processor.finish());
    let processing_s: f64 = latencies.iter().map(Duration::as_secs_f64).sum();
    latencies.sort();
    let interval_us = radar.chirp_interval_s * 1e6;
    let scene_s = n as f64 * radar.chirp_interval_s;
    let p99 = percentile_us(&latencies, 99.0);
    let realtime_factor = if processing_s > 0.0 {
        scene_s / processing_s
    } else {
        f64::INFINITY
    };
    Ok(BenchReport {
        preset: config
            .radar
            .map_or_else(|| config.preset.name().to_string(), |_| "custom".to_string()),
        frames: n,
        processing_s,
        frames_per_s: if processing_s > 0.0 { n as f64 / processing_s } else { 0.0 },
        realtime_factor,
        latency_p50_us: percentile_us(&latencies, 50.0),
        latency_p90_us: percentile_us(&latencies, 90.0),
        latency_p99_us: p99,
        latency_max_us: latencies.last().map_or(0.0, |d| d.as_secs_f64() * 1e6),
        chirp_interval_us: interval_us,
        realtime_ok: p99 < interval_us && realtime_factor >= 10.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_percentiles() {
        let d: Vec<Duration> = (1..=100).map(Duration::from_micros).collect();
        assert_eq!(percentile_us(&d, 50.0), 50.0);
        assert_eq!(percentile_us(&d, 99.0), 99.0);
        assert_eq!(percentile_us(&d, 100.0), 100.0);
        assert_eq!(percentile_us(&[], 50.0), 0.0);
    }

    #[test]
    fn short_bench_runs() {
        let scene = Scene::breathing(Default::default(), 0.5, 3);
        let r = bench(&RunConfig::default(), &scene).unwrap();
        assert_eq!(r.frames, 500);
        assert!(r.frames_per_s > 0.0);
        assert!(r.latency_p50_us <= r.latency_p99_us);
    }
}
