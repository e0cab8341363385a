//! Exact inverse of the gradient Gram matrix `G` on (quasi-)periodic Q1
//! fields.
//!
//! On a uniform grid `G` is a tensor-product stencil, so Fourier modes
//! `exp(i theta . x)` with `theta = (2 pi m + gamma) / n` diagonalize it with
//! symbol `[(2 - 2 cos t1)(4 + 2 cos t2) + (4 + 2 cos t1)(2 - 2 cos t2)] / 6`.
//! A quasi-periodic field is turned into a periodic one by the node-wise
//! factor `exp(-i gamma . x / n)`. Transforms are dense separable DFTs with
//! precomputed twiddles: `O(n^3)` per application, comparable to the cost of
//! one operator application at the cell sizes used here.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct LaplaceInverse {
    n: usize,
    /// DFT matrix `exp(-2 pi i k j / n)`, row-major.
    dft: Vec<Complex64>,
    /// `1 / symbol`, zero on the null mode.
    inv_symbol: Vec<f64>,
    /// `exp(i gamma_k j / n)` for `j` in `0..n`, per axis.
    untwist: [Vec<Complex64>; 2],
}

/// Symbols below this are treated as the null mode (only reachable at
/// `gamma = 0`, `m = 0`).
const NULL_SYMBOL: f64 = 1e-300;

impl LaplaceInverse {
    pub fn new(n: usize, gamma: [f64; 2]) -> Self {
        let dft = (0..n * n)
            .map(|kj| Complex64::from_polar(1.0, -2.0 * PI * ((kj / n) * (kj % n) % n) as f64 / n as f64))
            .collect();
        let mut inv_symbol = vec![0.0; n * n];
        for m2 in 0..n {
            let t2 = (2.0 * PI * m2 as f64 + gamma[1]) / n as f64;
            let c2 = t2.cos();
            for m1 in 0..n {
                let t1 = (2.0 * PI * m1 as f64 + gamma[0]) / n as f64;
                let c1 = t1.cos();
                let s = ((2.0 - 2.0 * c1) * (4.0 + 2.0 * c2) + (4.0 + 2.0 * c1) * (2.0 - 2.0 * c2)) / 6.0;
                inv_symbol[m2 * n + m1] = if s > NULL_SYMBOL { 1.0 / s } else { 0.0 };
            }
        }
        let untwist = gamma.map(|g| (0..n).map(|j| Complex64::from_polar(1.0, g * j as f64 / n as f64)).collect());
        Self { n, dft, inv_symbol, untwist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place DFT of a strided line; `forward` uses the kernel
    /// `exp(-2 pi i k j / n)`, the backward transform its conjugate.
    fn dft_line(&self, data: &mut [Complex64], start: usize, stride: usize, forward: bool, scratch: &mut [Complex64]) {
        let n = self.n;
        for (j, s) in scratch.iter_mut().enumerate() {
            *s = data[start + j * stride];
        }
        for k in 0..n {
            let row = &self.dft[k * n..(k + 1) * n];
            let (mut re, mut im) = (0.0, 0.0);
            for (w, x) in row.iter().zip(scratch.iter()) {
                let wi = if forward { w.im } else { -w.im };
                re += w.re * x.re - wi * x.im;
                im += w.re * x.im + wi * x.re;
            }
            data[start + k * stride] = Complex64::new(re, im);
        }
    }

    fn dft2(&self, data: &mut [Complex64], forward: bool) {
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for row in 0..n {
            self.dft_line(data, row * n, 1, forward, &mut scratch);
        }
        for col in 0..n {
            self.dft_line(data, col, n, forward, &mut scratch);
        }
    }

    /// `out = G^{-1} r`. At `gamma = 0` the result has zero mean.
    pub fn apply<S: Scalar>(&self, r: &[S], out: &mut [S]) {
        let n = self.n;
        let scale = 1.0 / (n * n) as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..2 {
            for iy in 0..n {
                for ix in 0..n {
                    let k = iy * n + ix;
                    let twist = (self.untwist[0][ix] * self.untwist[1][iy]).conj();
                    buf[k] = r[2 * k + i].to_c64() * twist;
                }
            }
            self.dft2(&mut buf, true);
            for (b, &s) in buf.iter_mut().zip(&self.inv_symbol) {
                *b *= s * scale;
            }
            self.dft2(&mut buf, false);
            for iy in 0..n {
                for ix in 0..n {
                    let k = iy * n + ix;
                    out[2 * k + i] = S::from_c64(buf[k] * self.untwist[0][ix] * self.untwist[1][iy]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{apply_gram, project_mean_zero, Twist};

    fn field(len: usize, seed: u64) -> Vec<f64> {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(seed);
        (0..len).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect()
    }

    #[test]
    fn inverts_periodic_gram() {
        let n = 12;
        let mut v = field(2 * n * n, 5);
        project_mean_zero(&mut v);
        let mut gv = vec![0.0; v.len()];
        apply_gram(n, &Twist::periodic(), &v, &mut gv);
        let mut back = vec![0.0; v.len()];
        LaplaceInverse::new(n, [0.0, 0.0]).apply(&gv, &mut back);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inverts_twisted_gram() {
        let n = 10;
        let gamma = [0.3, -2.5];
        let re = field(4 * n * n, 6);
        let v: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let mut gv = vec![Complex64::default(); v.len()];
        apply_gram(n, &Twist::bloch(gamma).unwrap(), &v, &mut gv);
        let mut back = vec![Complex64::default(); v.len()];
        LaplaceInverse::new(n, gamma).apply(&gv, &mut back);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-11);
        }
    }
}
