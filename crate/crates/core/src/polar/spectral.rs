use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse FFT pair for one ring of `n_theta` samples.
pub(crate) struct RingFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl RingFft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn forward(&self, ring: &[f64], out: &mut [Complex64]) {
        for (o, &v) in out.iter_mut().zip(ring) {
            *o = Complex64::new(v, 0.0);
        }
        self.forward.process(out);
    }

    /// Inverse transform, normalised, keeping the real part.
    pub(crate) fn inverse(&self, spec: &mut [Complex64], ring: &mut [f64]) {
        self.inverse.process(spec);
        let scale = 1.0 / self.n as f64;
        for (r, c) in ring.iter_mut().zip(spec.iter()) {
            *r = c.re * scale;
        }
    }

    /// Signed harmonic of DFT index `k`, in `(-n/2, n/2]`.
    #[inline]
    pub(crate) fn harmonic(&self, k: usize) -> isize {
        if 2 * k <= self.n {
            k as isize
        } else {
            k as isize - self.n as isize
        }
    }

    #[inline]
    pub(crate) fn index_of(&self, harmonic: isize) -> usize {
        harmonic.rem_euclid(self.n as isize) as usize
    }
}

/// Evaluate the trigonometric interpolant of `ring` at `theta * m / n`,
/// assuming `ring` contains only harmonics divisible by `n`: harmonic
/// `k n` is moved to `k m`. A Nyquist coefficient is split evenly between
/// `+k m` and `-k m`.
pub(crate) fn rescale_ring(fft: &RingFft, ring: &[f64], n: usize, m: usize, out: &mut [f64]) {
    let len = ring.len();
    let mut spec = vec![Complex64::new(0.0, 0.0); len];
    fft.forward(ring, &mut spec);
    let mut dest = vec![Complex64::new(0.0, 0.0); len];
    let n_i = n as isize;
    for (k, c) in spec.iter().enumerate() {
        let s = fft.harmonic(k);
        if s % n_i != 0 {
            continue;
        }
        let t = s / n_i * m as isize;
        if 2 * s.unsigned_abs() == len && t != 0 && 2 * t.unsigned_abs() != len {
            dest[fft.index_of(t)] += c * 0.5;
            dest[fft.index_of(-t)] += c * 0.5;
        } else {
            dest[fft.index_of(t)] += c;
        }
    }
    fft.inverse(&mut dest, out);
}
