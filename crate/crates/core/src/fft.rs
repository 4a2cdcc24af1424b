//! Iterative radix-2 FFT used by every transform on the circle grid.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

/// Precomputed twiddles and bit-reversal table for one power-of-two length.
#[derive(Debug)]
pub(crate) struct FftPlan {
    n: usize,
    // twiddles[k] = exp(-2 pi i k / n), k < n/2; each computed directly so
    // the error does not accumulate along the table.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two() && n >= 2);
        let bits = n.trailing_zeros();
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -TAU * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        FftPlan { n, twiddles, bitrev }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// In place `X_k = sum_j x_j exp(-2 pi i j k / n)`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// In place `x_j = sum_k X_k exp(2 pi i j k / n)` (no 1/n factor).
    pub(crate) fn backward(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "fft length mismatch");
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}
