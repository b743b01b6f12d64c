//! Complex discrete Fourier transform of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 decimation-in-time kernel.
//! Other lengths are reduced to a power-of-two circular convolution with
//! Bluestein's chirp-z identity, so every length runs in `O(n log n)` on the
//! same radix-2 kernel. Plans are immutable and can be shared across threads.

use num_complex::Complex64;
use std::f64::consts::PI;

/// A reusable transform plan for one length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Trivial,
    Radix2 {
        /// `exp(-2πi k / n)` for `k < n/2`.
        twiddles: Vec<Complex64>,
        /// Bit-reversal permutation.
        rev: Vec<usize>,
    },
    Bluestein {
        m: usize,
        inner: Box<Fft>,
        /// `exp(-iπ j² / n)` for `j < n`.
        chirp: Vec<Complex64>,
        /// Forward transform of the conjugate chirp kernel, pre-scaled by `1/m`.
        kernel_hat: Vec<Complex64>,
    },
}

impl Fft {
    /// Plans a transform of length `n` (`n ≥ 1`).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be positive");
        if n == 1 {
            return Self {
                n,
                kind: Kind::Trivial,
            };
        }
        if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
                .collect();
            let bits = n.trailing_zeros();
            let rev = (0..n)
                .map(|i| i.reverse_bits() >> (usize::BITS - bits))
                .collect();
            return Self {
                n,
                kind: Kind::Radix2 { twiddles, rev },
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = Box::new(Fft::new(m));
        // j² is reduced modulo 2n before scaling so the phase stays accurate
        // for large j.
        let chirp: Vec<Complex64> = (0..n)
            .map(|j| {
                let jj = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
                Complex64::from_polar(1.0, -PI * jj / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            kernel[j] = chirp[j].conj();
            kernel[m - j] = chirp[j].conj();
        }
        inner.forward(&mut kernel);
        let scale = 1.0 / m as f64;
        for k in kernel.iter_mut() {
            *k *= scale;
        }
        Self {
            n,
            kind: Kind::Bluestein {
                m,
                inner,
                chirp,
                kernel_hat: kernel,
            },
        }
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false: plans have positive length.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform `X_q = Σ_j x_j exp(-2πi jq/n)`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2 { twiddles, rev } => radix2(buf, twiddles, rev),
            Kind::Bluestein {
                m,
                inner,
                chirp,
                kernel_hat,
            } => {
                let mut a = vec![Complex64::new(0.0, 0.0); *m];
                for j in 0..self.n {
                    a[j] = buf[j] * chirp[j];
                }
                inner.forward(&mut a);
                for (x, k) in a.iter_mut().zip(kernel_hat) {
                    *x *= k;
                }
                inner.inverse_unscaled(&mut a);
                for q in 0..self.n {
                    buf[q] = a[q] * chirp[q];
                }
            }
        }
    }

    /// In-place unnormalised inverse `x_j = Σ_q X_q exp(+2πi jq/n)`.
    pub fn inverse_unscaled(&self, buf: &mut [Complex64]) {
        for x in buf.iter_mut() {
            *x = x.conj();
        }
        self.forward(buf);
        for x in buf.iter_mut() {
            *x = x.conj();
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64], rev: &[usize]) {
    let n = buf.len();
    for i in 0..n {
        let j = rev[i];
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}
