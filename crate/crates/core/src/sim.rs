//! Beat-signal simulator for breathing targets and static clutter.
//!
//! Each breathing target is two coherent point scatterers sharing one range
//! cell: a static torso return and a chest-wall return whose range follows
//! the respiration displacement projected onto the line of sight. Their sum
//! amplitude-modulates the peak bin, which is the effect the monitoring
//! chain measures. Motion is sampled once per chirp (stop-and-hop) and the
//! sub-millimetre range change only enters the carrier phase; the beat
//! frequency stays at the nominal range.
//!
//! Received amplitudes fall with `1/R^2` relative to 1 m, and complex white
//! noise is scaled so that a unit-amplitude scatterer at 1 m has a post-FFT
//! SNR of [`RadarConfig::snr_ref_db`]. Every frame draws noise from its own
//! ChaCha stream keyed by `(noise_seed, chirp_index)`, so frames can be
//! synthesized in any order or in parallel.

use std::f64::consts::PI;

use num_complex::{Complex32, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{IqRecording, RecordingHeader, TruthSample};
use crate::radar::RadarConfig;
use crate::range::ChirpFrame;

/// Scatterer amplitude loss per degree of torso rotation.
pub const ASPECT_DERATING_DB_PER_DEG: f64 = 0.15;

/// Fractions of one breathing cycle spent inhaling, exhaling and pausing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Duty {
    pub inhale: f64,
    pub exhale: f64,
    pub pause: f64,
}

impl Default for Duty {
    fn default() -> Self {
        Self {
            inhale: 0.3,
            exhale: 0.45,
            pause: 0.25,
        }
    }
}

impl Duty {
    fn validate(&self) -> Result<()> {
        let parts = [self.inhale, self.exhale, self.pause];
        if parts.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::config("duty fractions must be non-negative"));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "duty fractions sum to {}, expected 1",
                parts.iter().sum::<f64>()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BreathingTarget {
    /// Nominal chest range.
    pub range_m: f64,
    /// Torso rotation away from the line of sight.
    pub aspect_angle_deg: f64,
    pub breath_rate_hz: f64,
    /// Peak chest-wall excursion.
    pub displacement_amp_m: f64,
    pub duty: Duty,
    pub body_amplitude: f64,
    pub chest_amplitude: f64,
}

impl Default for BreathingTarget {
    fn default() -> Self {
        Self {
            range_m: 2.0,
            aspect_angle_deg: 0.0,
            breath_rate_hz: 0.25,
            displacement_amp_m: 0.8e-3,
            duty: Duty::default(),
            body_amplitude: 1.0,
            chest_amplitude: 0.5,
        }
    }
}

impl BreathingTarget {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..90.0).contains(&self.aspect_angle_deg) {
            return Err(Error::config(format!(
                "aspect angle {} deg outside [0, 90)",
                self.aspect_angle_deg
            )));
        }
        if !(0.05..=2.0).contains(&self.breath_rate_hz) {
            return Err(Error::config(format!(
                "breathing rate {} Hz outside [0.05, 2]",
                self.breath_rate_hz
            )));
        }
        if !(0.0..=0.02).contains(&self.displacement_amp_m) {
            return Err(Error::config(format!(
                "displacement {} m outside [0, 0.02]",
                self.displacement_amp_m
            )));
        }
        if !(self.range_m.is_finite() && self.range_m > 0.0) {
            return Err(Error::config("target range must be positive"));
        }
        if !(self.body_amplitude >= 0.0 && self.chest_amplitude >= 0.0) {
            return Err(Error::config("scatterer amplitudes must be non-negative"));
        }
        self.duty.validate()
    }

    /// Amplitude factor from aspect derating and two-way spreading.
    pub fn received_gain(&self) -> f64 {
        let derate = 10f64.powf(-ASPECT_DERATING_DB_PER_DEG * self.aspect_angle_deg / 20.0);
        derate / (self.range_m * self.range_m)
    }

    /// Carrier phase excursion of the chest return relative to the torso.
    pub fn chest_phase(&self, wavelength_m: f64, t: f64) -> f64 {
        4.0 * PI * self.aspect_angle_deg.to_radians().cos() * chest_displacement(self, t)
            / wavelength_m
    }
}

/// Chest-wall displacement at time `t`: a raised-cosine rise over the inhale
/// fraction, a raised-cosine fall over the exhale fraction, then rest.
pub fn chest_displacement(target: &BreathingTarget, t: f64) -> f64 {
    let period = 1.0 / target.breath_rate_hz;
    let phase = (t.max(0.0) / period).fract();
    let Duty { inhale, exhale, .. } = target.duty;
    let d = target.displacement_amp_m;
    if phase < inhale {
        0.5 * d * (1.0 - (PI * phase / inhale).cos())
    } else if phase < inhale + exhale {
        0.5 * d * (1.0 + (PI * (phase - inhale) / exhale).cos())
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClutterPoint {
    pub range_m: f64,
    /// Received amplitude (spreading loss already included).
    pub amplitude: f64,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scene {
    pub targets: Vec<BreathingTarget>,
    pub clutter: Vec<ClutterPoint>,
    pub noise_seed: u64,
    pub duration_s: f64,
    pub noise_enabled: bool,
}

impl Default for Scene {
    fn default() -> Self {
        Self::breathing(BreathingTarget::default(), 60.0, 1)
    }
}

impl Scene {
    /// Furniture near the radar and a back wall.
    pub fn default_clutter() -> Vec<ClutterPoint> {
        vec![
            ClutterPoint {
                range_m: 0.6,
                amplitude: 0.5,
                phase_rad: 0.4,
            },
            ClutterPoint {
                range_m: 5.0,
                amplitude: 0.2,
                phase_rad: 2.1,
            },
        ]
    }

    /// One breathing target in the default clutter.
    pub fn breathing(target: BreathingTarget, duration_s: f64, noise_seed: u64) -> Self {
        Self {
            targets: vec![target],
            clutter: Self::default_clutter(),
            noise_seed,
            duration_s,
            noise_enabled: true,
        }
    }

    /// Clutter and noise only.
    pub fn empty(duration_s: f64, noise_seed: u64) -> Self {
        Self {
            targets: Vec::new(),
            ..Self::breathing(BreathingTarget::default(), duration_s, noise_seed)
        }
    }

    pub fn validate(&self, config: &RadarConfig) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::config("scene duration must be positive"));
        }
        let max_m = config.max_unambiguous_range();
        for t in &self.targets {
            t.validate()?;
            let far = t.range_m + t.displacement_amp_m;
            if far > max_m {
                return Err(Error::OutOfRange { range_m: far, max_m });
            }
        }
        for c in &self.clutter {
            if !(c.range_m >= 0.0 && c.amplitude >= 0.0) {
                return Err(Error::config("clutter range and amplitude must be non-negative"));
            }
            if c.range_m > max_m {
                return Err(Error::OutOfRange {
                    range_m: c.range_m,
                    max_m,
                });
            }
        }
        let cell = config.bin_spacing_m(config.samples_per_chirp);
        for (i, a) in self.targets.iter().enumerate() {
            for b in &self.targets[i + 1..] {
                if (a.range_m - b.range_m).abs() < cell {
                    return Err(Error::config(format!(
                        "targets at {} m and {} m share a range cell",
                        a.range_m, b.range_m
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_chirps(&self, config: &RadarConfig) -> u64 {
        (self.duration_s / config.chirp_interval_s + 1e-9).floor() as u64
    }
}

fn tone(config: &RadarConfig, range_m: f64) -> Vec<Complex64> {
    let fb = config.beat_frequency_unchecked(range_m);
    (0..config.samples_per_chirp)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * fb * k as f64 / config.sample_rate_hz))
        .collect()
}

struct TargetModel {
    target: BreathingTarget,
    tone: Vec<Complex64>,
    /// Gain times torso phase.
    carrier: Complex64,
}

/// Precomputed scene, ready to synthesize frames by index.
pub struct SceneSimulator {
    config: RadarConfig,
    scene: Scene,
    targets: Vec<TargetModel>,
    /// Clutter plus static torso returns.
    static_part: Vec<Complex64>,
    noise_std: f64,
    n_chirps: u64,
}

impl SceneSimulator {
    pub fn new(config: RadarConfig, scene: Scene) -> Result<Self> {
        config.validate()?;
        scene.validate(&config)?;
        let n = config.samples_per_chirp;
        let lambda = config.wavelength_m();
        let mut static_part = vec![Complex64::new(0.0, 0.0); n];
        for c in &scene.clutter {
            let coef = Complex64::from_polar(c.amplitude, c.phase_rad);
            for (s, t) in static_part.iter_mut().zip(tone(&config, c.range_m)) {
                *s += coef * t;
            }
        }
        let mut targets = Vec::with_capacity(scene.targets.len());
        for t in &scene.targets {
            let tone = tone(&config, t.range_m);
            let carrier =
                Complex64::from_polar(t.received_gain(), 4.0 * PI * t.range_m / lambda);
            let body = carrier * t.body_amplitude;
            for (s, z) in static_part.iter_mut().zip(&tone) {
                *s += body * z;
            }
            targets.push(TargetModel {
                target: *t,
                tone,
                carrier,
            });
        }
        // total complex variance per sample: N * 10^(-snr/10)
        let noise_std = if scene.noise_enabled {
            (n as f64 * 10f64.powf(-config.snr_ref_db / 10.0)).sqrt()
        } else {
            0.0
        };
        let n_chirps = scene.n_chirps(&config);
        Ok(Self {
            config,
            scene,
            targets,
            static_part,
            noise_std,
            n_chirps,
        })
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn n_chirps(&self) -> u64 {
        self.n_chirps
    }

    /// Noise standard deviation per complex sample.
    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn slow_time(&self, chirp_index: u64) -> f64 {
        chirp_index as f64 * self.config.chirp_interval_s
    }

    pub fn synth_frame(&self, chirp_index: u64) -> Result<ChirpFrame> {
        let t = self.slow_time(chirp_index);
        if t > self.scene.duration_s + 1e-12 {
            return Err(Error::argument(format!(
                "chirp {chirp_index} at {t} s is past the scene duration {} s",
                self.scene.duration_s
            )));
        }
        let lambda = self.config.wavelength_m();
        let mut acc = self.static_part.clone();
        for m in &self.targets {
            let psi = m.target.chest_phase(lambda, t);
            let coef = m.carrier * Complex64::from_polar(m.target.chest_amplitude, psi);
            for (s, z) in acc.iter_mut().zip(&m.tone) {
                *s += coef * z;
            }
        }
        let samples = if self.noise_std > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.scene.noise_seed);
            rng.set_stream(chirp_index);
            let sd = self.noise_std * std::f64::consts::FRAC_1_SQRT_2;
            acc.iter()
                .map(|s| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex32::new((s.re + sd * re) as f32, (s.im + sd * im) as f32)
                })
                .collect()
        } else {
            acc.iter()
                .map(|s| Complex32::new(s.re as f32, s.im as f32))
                .collect()
        };
        Ok(ChirpFrame {
            samples,
            chirp_index,
            t_slow: t,
        })
    }

    /// Frames in chirp order.
    pub fn frames(&self) -> impl Iterator<Item = ChirpFrame> + '_ {
        (0..self.n_chirps).map(move |i| {
            self.synth_frame(i)
                .expect("index below n_chirps is always within the scene")
        })
    }

    /// True chest displacement of every target at one chirp.
    pub fn truth(&self, chirp_index: u64) -> TruthSample {
        let t = self.slow_time(chirp_index);
        TruthSample {
            time_s: t,
            displacement_m: self
                .scene
                .targets
                .iter()
                .map(|tg| chest_displacement(tg, t))
                .collect(),
        }
    }

    pub fn header(&self) -> RecordingHeader {
        RecordingHeader::new(self.config, self.n_chirps)
            .with_scene(self.scene.clone())
    }
}

pub fn synth_frame(config: &RadarConfig, scene: &Scene, chirp_index: u64) -> Result<ChirpFrame> {
    SceneSimulator::new(*config, scene.clone())?.synth_frame(chirp_index)
}

/// Synthesizes the whole scene in memory, in parallel.
pub fn synth_recording(config: &RadarConfig, scene: &Scene) -> Result<IqRecording> {
    let sim = SceneSimulator::new(*config, scene.clone())?;
    let frames = (0..sim.n_chirps())
        .into_par_iter()
        .map(|i| sim.synth_frame(i))
        .collect::<Result<Vec<_>>>()?;
    let truth = (0..sim.n_chirps()).map(|i| sim.truth(i)).collect();
    Ok(IqRecording {
        header: sim.header(),
        frames,
        truth,
    })
}
