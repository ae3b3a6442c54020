use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clipping and zeroing rule applied to the reconstructed amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImpulsePolicy {
    /// Values above this percentile of the sliding history are clipped to it.
    pub percentile: f64,
    /// Optional absolute ceiling applied on top of the percentile.
    pub clip: Option<f64>,
}

impl Default for ImpulsePolicy {
    fn default() -> Self {
        Self {
            percentile: 99.5,
            clip: None,
        }
    }
}

impl ImpulsePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.percentile) {
            return Err(Error::config(format!(
                "impulse percentile {} outside [0, 100]",
                self.percentile
            )));
        }
        if let Some(c) = self.clip {
            if !(c >= 0.0) {
                return Err(Error::config("impulse clip value must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Sliding window with order-statistic queries, updated in blocks.
#[derive(Debug, Clone)]
pub struct SlidingOrderStats {
    capacity: usize,
    fifo: VecDeque<f64>,
    sorted: Vec<f64>,
}

impl SlidingOrderStats {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            fifo: VecDeque::with_capacity(capacity),
            sorted: Vec::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn push(&mut self, x: f64) {
        self.extend(&[x]);
    }

    /// Appends `block` and evicts the oldest values beyond capacity in one
    /// linear merge.
    pub fn extend(&mut self, block: &[f64]) {
        let block = &block[block.len().saturating_sub(self.capacity)..];
        self.fifo.extend(block.iter().copied());
        let excess = self.fifo.len().saturating_sub(self.capacity);
        let mut gone: Vec<f64> = self.fifo.drain(..excess).collect();
        // values evicted from the block itself never reached `sorted`
        let from_sorted = gone.len().min(self.sorted.len());
        let mut fresh = block.to_vec();
        if gone.len() > from_sorted {
            let skip = gone.len() - from_sorted;
            gone.truncate(from_sorted);
            fresh.drain(..skip);
        }
        gone.sort_by(f64::total_cmp);
        fresh.sort_by(f64::total_cmp);

        let mut merged = Vec::with_capacity(self.sorted.len() - gone.len() + fresh.len());
        let mut g = gone.iter().peekable();
        let mut f = fresh.iter().peekable();
        for &v in &self.sorted {
            if g.next_if(|&&o| o.total_cmp(&v).is_eq()).is_some() {
                continue;
            }
            while let Some(&&n) = f.peek() {
                if n.total_cmp(&v).is_lt() {
                    merged.push(n);
                    f.next();
                } else {
                    break;
                }
            }
            merged.push(v);
        }
        merged.extend(f);
        debug_assert!(g.next().is_none());
        self.sorted = merged;
    }

    /// Linear-interpolated percentile `p` in `[0, 100]`.
    pub fn percentile(&self, p: f64) -> Option<f64> {
        let n = self.sorted.len();
        if n == 0 {
            return None;
        }
        let pos = p / 100.0 * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        Some(self.sorted[lo] + (self.sorted[hi] - self.sorted[lo]) * frac)
    }

    pub fn median(&self) -> Option<f64> {
        self.percentile(50.0)
    }
}

/// Streaming impulse thresholder.
///
/// Input is buffered in blocks. When a block completes it enters the
/// history, the ceiling (percentile) and floor (median) are recomputed, and
/// the block is released thresholded against them. Output therefore lags
/// input by up to one block.
#[derive(Debug, Clone)]
pub struct ImpulseThresholder {
    policy: ImpulsePolicy,
    block_len: usize,
    history: SlidingOrderStats,
    pending: Vec<f64>,
}

impl ImpulseThresholder {
    pub fn new(policy: ImpulsePolicy, window_len: usize, block_len: usize) -> Self {
        let block_len = block_len.max(1);
        Self {
            policy,
            block_len,
            history: SlidingOrderStats::new(window_len.max(1)),
            pending: Vec::with_capacity(block_len),
        }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Feeds one sample; returns a released block, if any.
    pub fn push(&mut self, x: f64) -> Option<Vec<f64>> {
        self.pending.push(x);
        (self.pending.len() == self.block_len).then(|| self.release())
    }

    /// Releases a trailing partial block.
    pub fn flush(&mut self) -> Vec<f64> {
        if self.pending.is_empty() {
            Vec::new()
        } else {
            self.release()
        }
    }

    fn release(&mut self) -> Vec<f64> {
        let block = std::mem::take(&mut self.pending);
        self.history.extend(&block);
        let mut ceiling = self
            .history
            .percentile(self.policy.percentile)
            .expect("history holds the block");
        if let Some(c) = self.policy.clip {
            ceiling = ceiling.min(c);
        }
        let floor = self.history.median().expect("history holds the block");
        self.pending = block;
        let out = self
            .pending
            .iter()
            .map(|&x| {
                let v = x.min(ceiling);
                if v > floor {
                    v
                } else {
                    0.0
                }
            })
            .collect();
        self.pending.clear();
        out
    }
}

/// Batch form of [`ImpulseThresholder`]; same length as the input.
pub fn threshold_impulses(
    series: &[f64],
    policy: &ImpulsePolicy,
    window_len: usize,
    block_len: usize,
) -> Vec<f64> {
    let mut t = ImpulseThresholder::new(*policy, window_len, block_len);
    let mut out = Vec::with_capacity(series.len());
    for &x in series {
        if let Some(b) = t.push(x) {
            out.extend(b);
        }
    }
    out.extend(t.flush());
    out
}
