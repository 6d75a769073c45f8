//! Square 2-D FFTs on row-major buffers.
//!
//! Transforms are unnormalised (as in `rustfft`). The forward transform
//! leaves its output transposed: callers that only multiply the spectrum by
//! a multiplier symmetric under `(m1, m2) -> (m2, m1)` and transform back can
//! skip two transposes. [`Fft2::forward`] / [`Fft2::inverse`] hide that detail
//! by transposing back.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Forward transform of a `[y][x]` buffer; the output is indexed
    /// `[kx][ky]`.
    pub fn forward_transposed(&self, data: &mut [Complex64]) {
        self.pass(data, &self.fwd);
    }

    /// Inverse of [`Self::forward_transposed`], consuming a transposed
    /// spectrum and returning data in the original layout (unnormalised).
    pub fn inverse_from_transposed(&self, data: &mut [Complex64]) {
        self.pass(data, &self.inv);
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward_transposed(data);
        transpose_in_place(data, self.n);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        transpose_in_place(data, self.n);
        self.inverse_from_transposed(data);
    }

    // Row transforms, transpose, row transforms.
    fn pass(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n);
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose_in_place(data, n);
        plan.process_with_scratch(data, &mut scratch);
    }
}

/// Blocked in-place transpose of an `n x n` row-major matrix.
pub fn transpose_in_place<T: Copy>(data: &mut [T], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let jstart = if bi == bj { i + 1 } else { bj };
                for j in jstart..(bj + B).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Signed frequency of DFT index `k` on `n` points, in `[-n/2, n/2)`.
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip() {
        let n = 16;
        let orig: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let fft = Fft2::new(n);
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        let scale = 1.0 / (n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_direct_dft() {
        let n = 8;
        let orig: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i * i % 7) as f64, (i % 3) as f64))
            .collect();
        let mut data = orig.clone();
        Fft2::new(n).forward(&mut data);
        for m1 in 0..n {
            for m2 in 0..n {
                let mut acc = Complex64::default();
                for j in 0..n {
                    for i in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * ((m1 * j + m2 * i) as f64) / n as f64;
                        acc += orig[j * n + i] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((data[m1 * n + m2] - acc).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn transpose_matches_naive() {
        for n in [1, 5, 33, 64] {
            let mut a: Vec<usize> = (0..n * n).collect();
            transpose_in_place(&mut a, n);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(a[i * n + j], j * n + i);
                }
            }
        }
    }
}
