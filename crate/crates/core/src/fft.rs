//! Complex FFT of arbitrary length: iterative radix-2 for powers of two and
//! Bluestein's chirp-z reduction otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Fft {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2 { twiddles: Vec<Complex64> },
    Bluestein {
        inner: Radix2Plan,
        chirp: Vec<Complex64>,
        /// Forward transform of the conjugate chirp, padded to the inner size.
        kernel: Vec<Complex64>,
    },
}

#[derive(Debug, Clone)]
struct Radix2Plan {
    m: usize,
    twiddles: Vec<Complex64>,
}

fn twiddles(m: usize) -> Vec<Complex64> {
    (0..m / 2)
        .map(|k| {
            let a = -2.0 * PI * k as f64 / m as f64;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

fn radix2_in_place(data: &mut [Complex64], tw: &[Complex64]) {
    let m = data.len();
    if m <= 1 {
        return;
    }
    let bits = m.trailing_zeros();
    for i in 0..m {
        let r = i.reverse_bits() >> (usize::BITS - bits);
        if r > i {
            data.swap(i, r);
        }
    }
    let mut len = 2;
    while len <= m {
        let half = len / 2;
        let step = m / len;
        for start in (0..m).step_by(len) {
            for k in 0..half {
                let w = tw[k * step];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}

impl Fft {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n > 0);
        if n.is_power_of_two() {
            return Self {
                n,
                kind: Kind::Radix2 { twiddles: twiddles(n) },
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        // exp(-iπk²/n), with k² reduced mod 2n to keep the phase accurate.
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let kk = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                let a = -PI * kk / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let inner = Radix2Plan { m, twiddles: twiddles(m) };
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        radix2_in_place(&mut kernel, &inner.twiddles);
        Self {
            n,
            kind: Kind::Bluestein { inner, chirp, kernel },
        }
    }

    /// Unnormalized forward transform `X_k = Σ x_j e^{-2πijk/n}`.
    ///
    /// `scratch` is resized as needed and may be reused between calls.
    pub(crate) fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.n);
        match &self.kind {
            Kind::Radix2 { twiddles } => radix2_in_place(data, twiddles),
            Kind::Bluestein { inner, chirp, kernel } => {
                let m = inner.m;
                scratch.clear();
                scratch.resize(m, Complex64::new(0.0, 0.0));
                for k in 0..self.n {
                    scratch[k] = data[k] * chirp[k];
                }
                radix2_in_place(scratch, &inner.twiddles);
                for (s, k) in scratch.iter_mut().zip(kernel) {
                    *s *= k;
                }
                // Inverse via conjugation.
                for s in scratch.iter_mut() {
                    *s = s.conj();
                }
                radix2_in_place(scratch, &inner.twiddles);
                let inv_m = 1.0 / m as f64;
                for k in 0..self.n {
                    data[k] = scratch[k].conj() * inv_m * chirp[k];
                }
            }
        }
    }
}

/// DST-I of `x` (length `n`): `b_k = Σ_j x_j sin(π(j+1)(k+1)/(n+1))`, computed
/// through a complex transform of length `2(n+1)` supplied by the caller.
pub(crate) fn dst1(x: &[f64], fft: &Fft, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) -> Vec<f64> {
    let n = x.len();
    let m = 2 * (n + 1);
    debug_assert_eq!(fft.n, m);
    buf.clear();
    buf.resize(m, Complex64::new(0.0, 0.0));
    for (j, &v) in x.iter().enumerate() {
        buf[j + 1] = Complex64::new(v, 0.0);
        buf[m - 1 - j] = Complex64::new(-v, 0.0);
    }
    fft.forward(buf, scratch);
    (1..=n).map(|k| -0.5 * buf[k].im).collect()
}
