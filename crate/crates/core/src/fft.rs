//! Thin wrappers over `rustfft` with a per-thread plan cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward transform, `X_k = Σ_j x_j e^{−2πijk/n}`.
pub fn forward(data: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(data.len()));
    fft.process(data);
}

/// In-place unnormalized inverse transform, `x_j = Σ_k X_k e^{2πijk/n}`.
pub fn inverse(data: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(data.len()));
    fft.process(data);
}

pub fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    buf
}

/// Circular application of the Fourier multiplier `m(k)` (FFT bin index).
pub fn apply_multiplier(values: &[f64], m: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = values.len();
    let mut buf = forward_real(values);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= m(k);
    }
    inverse(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

/// Full linear convolution, length `a.len() + b.len() − 1`.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut fa = vec![Complex64::default(); size];
    let mut fb = vec![Complex64::default(); size];
    for (d, &v) in fa.iter_mut().zip(a) {
        d.re = v;
    }
    for (d, &v) in fb.iter_mut().zip(b) {
        d.re = v;
    }
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inverse(&mut fa);
    fa.truncate(out_len);
    fa.iter().map(|z| z.re / size as f64).collect()
}

/// Precomputed transform of a fixed convolution kernel, for repeated products.
pub struct Convolver {
    size: usize,
    kernel_hat: Vec<Complex64>,
    kernel_len: usize,
}

impl Convolver {
    /// Prepares convolution with `kernel` for signals of length up to `max_signal`.
    pub fn new(kernel: &[f64], max_signal: usize) -> Self {
        let size = (kernel.len() + max_signal - 1).next_power_of_two();
        let mut buf = vec![Complex64::default(); size];
        for (d, &v) in buf.iter_mut().zip(kernel) {
            d.re = v;
        }
        forward(&mut buf);
        Self { size, kernel_hat: buf, kernel_len: kernel.len() }
    }

    /// Full linear convolution of the stored kernel with `signal`.
    pub fn convolve(&self, signal: &[f64]) -> Vec<f64> {
        let out_len = self.kernel_len + signal.len() - 1;
        assert!(out_len <= self.size, "signal longer than planned");
        let mut buf = vec![Complex64::default(); self.size];
        for (d, &v) in buf.iter_mut().zip(signal) {
            d.re = v;
        }
        forward(&mut buf);
        for (x, y) in buf.iter_mut().zip(&self.kernel_hat) {
            *x *= *y;
        }
        inverse(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf[..out_len].iter().map(|z| z.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64 * 0.3).sin()).collect();
        let b: Vec<f64> = (0..20).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let fast = convolve(&a, &b);
        let slow = direct(&a, &b);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-12);
        }
        let conv = Convolver::new(&b, a.len());
        for (x, y) in conv.convolve(&a).iter().zip(&slow) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_multiplier_is_identity() {
        let v: Vec<f64> = (0..64).map(|i| (i as f64).cos()).collect();
        let w = apply_multiplier(&v, |_| 1.0);
        for (x, y) in v.iter().zip(&w) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
