use fmcw_respiration::cfar::{ca_cfar, CfarConfig};
use fmcw_respiration::io::RunConfig;
use fmcw_respiration::pipeline::{
    envelope_detect, process_batch, process_stream, spectral_peak_hz, threshold_impulses,
    track_peak, ImpulsePolicy, PipelineConfig, RespirationTrace,
};
use fmcw_respiration::range::{ChirpFrame, RangeConfig};
use fmcw_respiration::sim::{BreathingTarget, Scene, SceneSimulator};
use fmcw_respiration::ModulePreset;

fn quiet(target: BreathingTarget, duration_s: f64) -> Scene {
    Scene {
        targets: vec![target],
        clutter: Vec::new(),
        noise_seed: 0,
        duration_s,
        noise_enabled: false,
    }
}

#[test]
fn tracker_holds_bin_for_large_excursion() {
    let radar = ModulePreset::Radar120G.config();
    let target = BreathingTarget {
        displacement_amp_m: 4e-3,
        ..Default::default()
    };
    let sim = SceneSimulator::new(radar, quiet(target, 10.0)).unwrap();
    let mut proc = RangeConfig::default().processor(radar.samples_per_chirp).unwrap();
    let spacing = radar.bin_spacing_m(proc.fft_len());
    let mut profiles = Vec::new();
    let mut dets = Vec::new();
    for f in sim.frames() {
        let p = proc.process(&f).unwrap();
        dets.push(ca_cfar(&p, &CfarConfig::default(), spacing).unwrap());
        profiles.push(p);
    }
    let tracks = track_peak(&profiles, &dets, &PipelineConfig::default());
    assert_eq!(tracks.len(), 1);
    assert_eq!(tracks[0].records.len(), profiles.len());
    assert!(tracks[0].bins().all(|b| b == 80));
}

#[test]
fn impulses_and_envelope_follow_breathing() {
    let run = RunConfig::default();
    let sim = SceneSimulator::new(run.radar_config(), quiet(BreathingTarget::default(), 40.0)).unwrap();
    let out = process_stream(run.processor().unwrap(), sim.frames());
    let trace = RespirationTrace::from_rows(&out.rows, out.summary.best().unwrap().target_id);
    let fs = 1000.0;

    // one burst of impulses per breath
    let onsets: Vec<f64> = trace
        .impulses
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] == 0.0 && w[1] > 0.0)
        .map(|(i, _)| (i + 1) as f64 / fs)
        .collect();
    let mut bursts = vec![onsets[0]];
    for &t in &onsets[1..] {
        if t - bursts.last().unwrap() > 1.0 {
            bursts.push(t);
        }
    }
    let periods: Vec<f64> = bursts.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(periods.len() >= 5, "{bursts:?}");
    let mean = periods.iter().sum::<f64>() / periods.len() as f64;
    assert!((mean - 4.0).abs() <= 0.2, "{periods:?}");

    let f = spectral_peak_hz(&trace.envelope, fs, [0.1, 0.7]).unwrap();
    assert!((f - 0.25).abs() <= 0.03, "{f}");
}

#[test]
fn rate_recovered_at_three_metres_94g() {
    let run = RunConfig::for_preset(ModulePreset::Radar94G);
    let target = BreathingTarget {
        range_m: 3.0,
        breath_rate_hz: 0.3,
        ..Default::default()
    };
    let sim = SceneSimulator::new(run.radar_config(), Scene::breathing(target, 60.0, 11)).unwrap();
    let out = process_stream(run.processor().unwrap(), sim.frames());
    let best = out.summary.best().expect("target present");
    let rate = best.rate_bpm.unwrap();
    assert!((rate - 18.0).abs() <= 1.0, "{rate}");
    assert!((best.range_m - 3.0).abs() < 0.05);
}

#[test]
fn standalone_stages_agree_with_direct_composition() {
    let series: Vec<f64> = (0..4000)
        .map(|i| (i as f64 * 2.0 * std::f64::consts::PI * 0.25 / 100.0).sin() + 1.0)
        .collect();
    let imp = threshold_impulses(&series, &ImpulsePolicy::default(), 3000, 10);
    assert_eq!(imp.len(), series.len());
    let env = envelope_detect(&imp, 100.0, 0.5);
    assert_eq!(env.len(), series.len());
    let f = spectral_peak_hz(&env[1000..], 100.0, [0.1, 0.7]).unwrap();
    assert!((f - 0.25).abs() < 0.03, "{f}");
}

#[test]
fn empty_input_gives_empty_output() {
    let run = RunConfig::default();
    let out = process_stream(run.processor().unwrap(), std::iter::empty());
    assert!(out.rows.is_empty());
    assert!(out.detections.is_empty());
    assert_eq!(out.summary.frames_processed, 0);
    assert!(!out.summary.presence());
}

#[test]
fn malformed_frames_are_dropped_and_counted() {
    let run = RunConfig::default();
    let radar = run.radar_config();
    let sim = SceneSimulator::new(radar, Scene { duration_s: 1.0, ..Scene::default() }).unwrap();
    let mut frames: Vec<ChirpFrame> = sim.frames().collect();
    frames[10].samples.truncate(100);
    frames[20].samples[3].re = f32::NAN;
    let dup = frames[30].clone();
    frames.insert(31, dup);
    let out = process_batch(run.processor().unwrap(), &frames);
    assert_eq!(out.summary.frames_dropped, 3);
    assert_eq!(out.summary.frames_processed, frames.len() as u64 - 3);
}

#[test]
fn detections_invariant_to_received_scale() {
    let run = RunConfig::default();
    let radar = run.radar_config();
    let sim = SceneSimulator::new(radar, Scene { duration_s: 0.2, ..Scene::default() }).unwrap();
    let frames: Vec<ChirpFrame> = sim.frames().collect();
    let base = process_batch(run.processor().unwrap(), &frames);
    for k in [1e-3f32, 7.5, 1e3] {
        let scaled: Vec<ChirpFrame> = frames
            .iter()
            .map(|f| ChirpFrame {
                samples: f.samples.iter().map(|z| z * k).collect(),
                ..f.clone()
            })
            .collect();
        let out = process_batch(run.processor().unwrap(), &scaled);
        let a: Vec<_> = base.detections.iter().map(|d| (d.chirp_index, d.bin)).collect();
        let b: Vec<_> = out.detections.iter().map(|d| (d.chirp_index, d.bin)).collect();
        assert_eq!(a, b, "scale {k}");
    }
}
