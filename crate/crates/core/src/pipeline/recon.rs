use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::tracker::TrackRecord;

/// Masked inverse FFT of a tracked neighbourhood.
///
/// The neighbourhood is placed at its original bins in an otherwise zero
/// spectrum of the full transform length and inverted with `1 / fft_len`
/// normalization; the statistic is the peak magnitude over fast time.
#[derive(Clone)]
pub struct Reconstructor {
    fft_len: usize,
    ifft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Reconstructor {
    pub fn new(fft_len: usize) -> Self {
        let ifft = FftPlanner::new().plan_fft_inverse(fft_len);
        let scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];
        Self {
            fft_len,
            ifft,
            buf: vec![Complex64::new(0.0, 0.0); fft_len],
            scratch,
        }
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    /// `neighborhood[j]` sits at bin `center - M + j`, `M = len / 2`.
    pub fn amplitude(&mut self, center_bin: usize, neighborhood: &[Complex64]) -> f64 {
        self.buf.fill(Complex64::new(0.0, 0.0));
        let half = neighborhood.len() as isize / 2;
        let positive = self.fft_len / 2;
        let mut any = false;
        for (j, z) in neighborhood.iter().enumerate() {
            let b = center_bin as isize - half + j as isize;
            if b >= 0 && (b as usize) < positive {
                self.buf[b as usize] = *z;
                any |= z.norm_sqr() > 0.0;
            }
        }
        if !any {
            return 0.0;
        }
        self.ifft.process_with_scratch(&mut self.buf, &mut self.scratch);
        let peak = self.buf.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        peak.sqrt() / self.fft_len as f64
    }
}

pub fn reconstruct_amplitude(record: &TrackRecord, fft_len: usize) -> f64 {
    Reconstructor::new(fft_len).amplitude(record.bin, &record.neighborhood)
}
