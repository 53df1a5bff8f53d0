//! Radix-2 complex FFT for power-of-two line lengths.
//!
//! Grids in this crate always have a power-of-two point count per axis, so a
//! plain iterative Cooley-Tukey transform with precomputed twiddles covers
//! every transform the crate performs. `forward` uses the kernel
//! `exp(-2 pi i j k / n)` and `backward` its conjugate; neither applies a
//! `1/n` factor — normalisation is owned by the field layer.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math;

/// Precomputed tables for one line length.
pub struct Plan {
    n: usize,
    rev: Vec<u32>,
    // twiddle[j] = exp(-2 pi i j / n), j < n/2
    twiddle: Vec<Complex64>,
}

impl Plan {
    /// Build a plan for lines of length `n` (a power of two, `n >= 1`).
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "fft length must be a power of two");
        let mut rev = vec![0u32; n];
        let bits = n.trailing_zeros();
        for i in 0..n {
            rev[i] = (i as u32).reverse_bits() >> (32 - bits.max(1)) as u32;
        }
        if n == 1 {
            rev[0] = 0;
        }
        let mut twiddle = Vec::with_capacity(n / 2);
        for j in 0..n / 2 {
            let ang = -2.0 * core::f64::consts::PI * j as f64 / n as f64;
            twiddle.push(Complex64::new(math::cos(ang), math::sin(ang)));
        }
        Plan { n, rev, twiddle }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn permute(&self, buf: &mut [Complex64]) {
        for i in 0..self.n {
            let j = self.rev[i] as usize;
            if j > i {
                buf.swap(i, j);
            }
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(buf.len(), self.n);
        if self.n <= 1 {
            return;
        }
        self.permute(buf);
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let step = self.n / len;
            let mut base = 0;
            while base < self.n {
                let mut k = 0;
                for j in 0..half {
                    let mut w = self.twiddle[k];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[base + j];
                    let b = buf[base + j + half] * w;
                    buf[base + j] = a + b;
                    buf[base + j + half] = a - b;
                    k += step;
                }
                base += len;
            }
            len <<= 1;
        }
    }

    /// In-place forward DFT, kernel `exp(-2 pi i j k / n)`, unscaled.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// In-place backward DFT, kernel `exp(+2 pi i j k / n)`, unscaled.
    pub fn backward(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
    }
}

/// Transform every axis of a row-major `d`-dimensional array with `n` points
/// per axis. `data.len()` must equal `n^d`.
pub fn transform_nd(data: &mut [Complex64], d: usize, n: usize, inverse: bool) {
    let plan = Plan::new(n);
    let total = data.len();
    debug_assert_eq!(total, n.pow(d as u32));
    let mut line = vec![Complex64::default(); n];
    for axis in 0..d {
        // row-major: axis 0 is slowest, stride n^{d-1-axis}
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        let mut base_block = 0;
        while base_block < total {
            for off in 0..stride {
                let base = base_block + off;
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                if inverse {
                    plan.backward(&mut line);
                } else {
                    plan.forward(&mut line);
                }
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
            base_block += block;
        }
    }
}
