//! Circular Gabor filtering through zero-padded FFT convolution.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::patch::EyePatch;

/// Kernel value at offset `(x, y)`: Gaussian envelope `1/sqrt(2 pi sigma^2)
/// exp(-r^2 / 2 sigma^2)` times the radial carrier `exp(2 i pi F r)`.
pub fn gabor_kernel_value(x: f64, y: f64, frequency: f64, sigma: f64) -> Complex64 {
    let r2 = x * x + y * y;
    let g = (-r2 / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt();
    Complex64::from_polar(g, 2.0 * PI * frequency * r2.sqrt())
}

/// Square kernel with odd side `support`, centered, row-major.
pub fn gabor_kernel(support: usize, frequency: f64, sigma: f64) -> Vec<Complex64> {
    let h = (support / 2) as i64;
    let mut k = Vec::with_capacity(support * support);
    for y in -h..=h {
        for x in -h..=h {
            k.push(gabor_kernel_value(x as f64, y as f64, frequency, sigma));
        }
    }
    k
}

/// Precomputed spectrum for repeated filtering of equally sized patches.
pub struct GaborFilter {
    size: usize,
    fft_n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
}

impl GaborFilter {
    pub fn new(size: usize, support: usize, frequency: f64, sigma: f64) -> Self {
        let fft_n = size + support - 1;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_n);
        let inverse = planner.plan_fft_inverse(fft_n);
        let h = support / 2;
        let kernel = gabor_kernel(support, frequency, sigma);
        // kernel origin sits at index 0 with negative offsets wrapped
        let mut spectrum = vec![Complex64::new(0.0, 0.0); fft_n * fft_n];
        for ky in 0..support {
            for kx in 0..support {
                let y = (ky + fft_n - h) % fft_n;
                let x = (kx + fft_n - h) % fft_n;
                spectrum[y * fft_n + x] = kernel[ky * support + kx];
            }
        }
        let mut f = Self {
            size,
            fft_n,
            forward,
            inverse,
            spectrum: Vec::new(),
        };
        f.fft2(&mut spectrum, false);
        f.spectrum = spectrum;
        f
    }

    fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.fft_n;
        let plan = if inverse { &self.inverse } else { &self.forward };
        for row in buf.chunks_exact_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                col[y] = buf[y * n + x];
            }
            plan.process(&mut col);
            for y in 0..n {
                buf[y * n + x] = col[y];
            }
        }
    }

    /// Magnitude of the convolution of the mean-subtracted patch with the
    /// kernel; pixels outside the patch count as zero.
    pub fn response(&self, patch: &EyePatch) -> Vec<f64> {
        assert_eq!(patch.size, self.size, "patch size differs from filter size");
        let (n, m) = (self.fft_n, self.size);
        let mean = patch.pixels.iter().sum::<f64>() / patch.pixels.len() as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        for y in 0..m {
            for x in 0..m {
                buf[y * n + x] = Complex64::new(patch.get(x, y) - mean, 0.0);
            }
        }
        self.fft2(&mut buf, false);
        for (b, k) in buf.iter_mut().zip(&self.spectrum) {
            *b *= k;
        }
        self.fft2(&mut buf, true);
        let scale = 1.0 / (n * n) as f64;
        let mut out = Vec::with_capacity(m * m);
        for y in 0..m {
            for x in 0..m {
                out.push(buf[y * n + x].norm() * scale);
            }
        }
        out
    }
}
