use num_complex::Complex64;

use crate::cfar::Detection;
use crate::range::RangeProfile;

use super::PipelineConfig;

/// One chirp of a peak track.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub chirp_index: u64,
    pub t_slow: f64,
    pub bin: usize,
    pub power_db: f64,
    /// Bins `bin - M ..= bin + M`; bins outside the profile are zero.
    pub neighborhood: Vec<Complex64>,
    /// No detection this chirp; the record was taken at the last known bin.
    pub coasted: bool,
}

/// Full history of one tracked peak.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakTrack {
    pub target_id: u64,
    pub gate_bins: usize,
    pub records: Vec<TrackRecord>,
}

impl PeakTrack {
    pub fn bins(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().map(|r| r.bin)
    }
}

#[derive(Debug, Clone)]
struct Active {
    id: u64,
    bin: usize,
    misses: usize,
    hits: usize,
}

/// What happened to the tracks on one chirp.
#[derive(Debug, Clone, Default)]
pub struct TrackUpdate {
    /// `(target_id, hits so far, record)` for every live track.
    pub records: Vec<(u64, usize, TrackRecord)>,
    pub dropped: Vec<u64>,
}

/// Nearest-bin association of detections to peak tracks, with coasting.
#[derive(Debug, Clone)]
pub struct Tracker {
    gate_bins: usize,
    miss_tolerance: usize,
    max_tracks: usize,
    next_id: u64,
    active: Vec<Active>,
}

impl Tracker {
    pub fn new(cfg: &PipelineConfig) -> Self {
        Self {
            gate_bins: cfg.gate_bins,
            miss_tolerance: cfg.miss_tolerance,
            max_tracks: cfg.max_tracks,
            next_id: 0,
            active: Vec::new(),
        }
    }

    pub fn live_tracks(&self) -> usize {
        self.active.len()
    }

    pub fn update(&mut self, profile: &RangeProfile, detections: &[Detection]) -> TrackUpdate {
        let mut update = TrackUpdate::default();
        let mut taken = vec![false; detections.len()];
        let mut assigned: Vec<Option<usize>> = vec![None; self.active.len()];

        // established tracks choose first
        let mut order: Vec<usize> = (0..self.active.len()).collect();
        order.sort_by_key(|&i| {
            let t = &self.active[i];
            (t.misses, std::cmp::Reverse(t.hits), t.id)
        });
        for i in order {
            let bin = self.active[i].bin;
            let best = detections
                .iter()
                .enumerate()
                .filter(|(j, d)| !taken[*j] && d.bin.abs_diff(bin) <= self.gate_bins)
                .min_by_key(|(_, d)| (d.bin.abs_diff(bin), d.bin));
            if let Some((j, _)) = best {
                taken[j] = true;
                assigned[i] = Some(j);
            }
        }

        let mut survivors = Vec::with_capacity(self.active.len());
        for (mut t, a) in self.active.drain(..).zip(assigned) {
            match a {
                Some(j) => {
                    t.bin = detections[j].bin;
                    t.misses = 0;
                    t.hits += 1;
                }
                None => {
                    t.misses += 1;
                    if t.misses > self.miss_tolerance {
                        update.dropped.push(t.id);
                        continue;
                    }
                }
            }
            survivors.push(t);
        }
        self.active = survivors;

        for (j, d) in detections.iter().enumerate() {
            if taken[j] {
                continue;
            }
            if self.active.len() >= self.max_tracks {
                // make room by evicting the stalest coasting track
                let victim = self
                    .active
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.misses > 0)
                    .max_by_key(|(_, t)| (t.misses, std::cmp::Reverse(t.hits), t.id))
                    .map(|(i, _)| i);
                match victim {
                    Some(i) => update.dropped.push(self.active.remove(i).id),
                    None => continue,
                }
            }
            self.active.push(Active {
                id: self.next_id,
                bin: d.bin,
                misses: 0,
                hits: 1,
            });
            self.next_id += 1;
        }

        self.active.sort_by_key(|t| t.id);
        for t in &self.active {
            update.records.push((t.id, t.hits, self.record(profile, t)));
        }
        update
    }

    fn record(&self, profile: &RangeProfile, t: &Active) -> TrackRecord {
        let m = self.gate_bins as isize;
        let neighborhood = (-m..=m)
            .map(|off| {
                let b = t.bin as isize + off;
                if b >= 0 && (b as usize) < profile.len() {
                    profile.complex_bins[b as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        TrackRecord {
            chirp_index: profile.chirp_index,
            t_slow: profile.t_slow,
            bin: t.bin,
            power_db: profile.power_db[t.bin],
            neighborhood,
            coasted: t.misses > 0,
        }
    }
}

/// Runs the tracker over a sequence of profiles and their detections and
/// returns every track that existed, in creation order.
pub fn track_peak(
    profiles: &[RangeProfile],
    detections: &[Vec<Detection>],
    cfg: &PipelineConfig,
) -> Vec<PeakTrack> {
    let mut tracker = Tracker::new(cfg);
    let mut tracks: Vec<PeakTrack> = Vec::new();
    for (p, d) in profiles.iter().zip(detections) {
        for (id, _, rec) in tracker.update(p, d).records {
            let idx = id as usize;
            if idx == tracks.len() {
                tracks.push(PeakTrack {
                    target_id: id,
                    gate_bins: cfg.gate_bins,
                    records: Vec::new(),
                });
            }
            tracks[idx].records.push(rec);
        }
    }
    tracks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(i: u64, n: usize) -> RangeProfile {
        let bins: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 0.0)).collect();
        RangeProfile {
            power_db: bins.iter().map(|z| crate::range::magnitude_db(*z)).collect(),
            complex_bins: bins,
            chirp_index: i,
            t_slow: i as f64 * 1e-3,
        }
    }

    fn det(i: u64, bin: usize) -> Detection {
        Detection {
            bin,
            range_m: bin as f64 * 0.025,
            power_db: 30.0,
            threshold_db: 10.0,
            chirp_index: i,
            t_slow: i as f64 * 1e-3,
        }
    }

    #[test]
    fn constant_bin_track() {
        let cfg = PipelineConfig::default();
        let profiles: Vec<_> = (0..50).map(|i| profile(i, 128)).collect();
        let dets: Vec<_> = (0..50).map(|i| vec![det(i, 80)]).collect();
        let tracks = track_peak(&profiles, &dets, &cfg);
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].records.len(), 50);
        assert!(tracks[0].bins().all(|b| b == 80));
        let n = &tracks[0].records[0].neighborhood;
        assert_eq!(n.len(), 7);
        assert_eq!(n[3].re, 80.0);
    }

    #[test]
    fn coasts_through_a_dropped_chirp() {
        let cfg = PipelineConfig::default();
        let profiles: Vec<_> = (0..20).map(|i| profile(i, 128)).collect();
        let dets: Vec<_> = (0..20)
            .map(|i| if i == 10 { vec![] } else { vec![det(i, 40)] })
            .collect();
        let tracks = track_peak(&profiles, &dets, &cfg);
        assert_eq!(tracks.len(), 1);
        let t = &tracks[0];
        assert_eq!(t.records.len(), 20);
        assert!(t.records[10].coasted);
        assert_eq!(t.records[10].bin, 40);
        assert!(!t.records[11].coasted);
    }

    #[test]
    fn drops_after_too_many_misses() {
        let cfg = PipelineConfig::default();
        let mut tracker = Tracker::new(&cfg);
        tracker.update(&profile(0, 64), &[det(0, 30)]);
        for i in 1..=10 {
            let u = tracker.update(&profile(i, 64), &[]);
            assert_eq!(u.records.len(), 1);
            assert!(u.dropped.is_empty());
        }
        let u = tracker.update(&profile(11, 64), &[]);
        assert!(u.records.is_empty());
        assert_eq!(u.dropped, vec![0]);
    }

    #[test]
    fn follows_drift_within_gate_and_splits_beyond() {
        let cfg = PipelineConfig::default();
        let mut tracker = Tracker::new(&cfg);
        tracker.update(&profile(0, 128), &[det(0, 50)]);
        let u = tracker.update(&profile(1, 128), &[det(1, 53)]);
        assert_eq!(u.records.len(), 1);
        assert_eq!(u.records[0].2.bin, 53);
        let u = tracker.update(&profile(2, 128), &[det(2, 57)]);
        // 4 bins away: old track coasts, new one starts
        assert_eq!(u.records.len(), 2);
        assert!(u.records[0].2.coasted);
        assert_eq!(u.records[1].2.bin, 57);
    }

    #[test]
    fn neighborhood_zero_padded_at_edges() {
        let cfg = PipelineConfig::default();
        let mut tracker = Tracker::new(&cfg);
        let u = tracker.update(&profile(0, 64), &[det(0, 1)]);
        let n = &u.records[0].2.neighborhood;
        assert_eq!(n[0], Complex64::new(0.0, 0.0));
        assert_eq!(n[1], Complex64::new(0.0, 0.0));
        assert_eq!(n[2].re, 0.0);
        assert_eq!(n[4].re, 2.0);
    }

    #[test]
    fn capacity_evicts_coasting_tracks_first() {
        let cfg = PipelineConfig {
            max_tracks: 2,
            ..Default::default()
        };
        let mut tracker = Tracker::new(&cfg);
        tracker.update(&profile(0, 128), &[det(0, 20), det(0, 60)]);
        // 60 misses and is coasting when the newcomer at 100 needs its slot
        let u = tracker.update(&profile(1, 128), &[det(1, 20), det(1, 100)]);
        assert_eq!(u.dropped, vec![1]);
        let bins: Vec<_> = u.records.iter().map(|r| r.2.bin).collect();
        assert_eq!(bins, vec![20, 100]);
    }
}
