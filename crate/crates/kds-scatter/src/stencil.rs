//! Periodic fourth-order first derivative on the uniform `x` grid.
//!
//! The stencil is real and exactly antisymmetric, which is what makes the
//! discrete `h₀`-type forms sums of squares and the split identities hold to
//! round-off. It is circulant, so its symbol, pseudo-inverse and the exact
//! semi-discrete transport `e^{tD}` are all diagonal in the FFT basis.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Derivative {
    pub n: usize,
    pub dx: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// `D e^{ikx} = symbol(k) e^{ikx}` per FFT bin; purely imaginary.
    symbol: Vec<Complex64>,
}

impl std::fmt::Debug for Derivative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Derivative").field("n", &self.n).field("dx", &self.dx).finish()
    }
}

impl Derivative {
    pub fn new(n: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let symbol = (0..n)
            .map(|j| {
                let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                let theta = 2.0 * std::f64::consts::PI * k / n as f64;
                Complex64::new(0.0, (8.0 * theta.sin() - (2.0 * theta).sin()) / (6.0 * dx))
            })
            .collect();
        Self { n, dx, fft, ifft, symbol }
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Largest `|symbol|`.
    pub fn spectral_radius(&self) -> f64 {
        self.symbol.iter().map(|s| s.im.abs()).fold(0.0, f64::max)
    }

    fn multiply_in_fourier<F: Fn(usize) -> Complex64>(&self, u: &[Complex64], factor: F) -> Vec<Complex64> {
        let mut out = u.to_vec();
        self.fft.process(&mut out);
        let scale = 1.0 / self.n as f64;
        for (j, v) in out.iter_mut().enumerate() {
            *v *= factor(j) * scale;
        }
        self.ifft.process(&mut out);
        out
    }

    pub fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(u.len(), self.n);
        let n = u.len();
        let c = 1.0 / (12.0 * self.dx);
        if n < 5 {
            let at = |k: isize| u[k.rem_euclid(n as isize) as usize];
            for j in 0..n as isize {
                out[j as usize] = (at(j - 2) - at(j - 1) * 8.0 + at(j + 1) * 8.0 - at(j + 2)) * c;
            }
            return;
        }
        out[0] = (u[n - 2] - u[n - 1] * 8.0 + u[1] * 8.0 - u[2]) * c;
        out[1] = (u[n - 1] - u[0] * 8.0 + u[2] * 8.0 - u[3]) * c;
        for j in 2..n - 2 {
            out[j] = (u[j - 2] - u[j - 1] * 8.0 + u[j + 1] * 8.0 - u[j + 2]) * c;
        }
        out[n - 2] = (u[n - 4] - u[n - 3] * 8.0 + u[n - 1] * 8.0 - u[0]) * c;
        out[n - 1] = (u[n - 3] - u[n - 2] * 8.0 + u[0] * 8.0 - u[1]) * c;
    }

    pub fn apply_vec(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        self.apply(u, &mut out);
        out
    }

    /// The same stencil with constant extension instead of wrap-around.
    pub fn apply_clamped(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len() as isize;
        let c = 1.0 / (12.0 * self.dx);
        let at = |k: isize| u[k.clamp(0, n - 1) as usize];
        (0..n).map(|j| (at(j - 2) - at(j - 1) * 8.0 + at(j + 1) * 8.0 - at(j + 2)) * c).collect()
    }

    /// Minimum-norm solution of `D v = rho`; the kernel modes (constant and
    /// alternating) of `rho` are dropped.
    pub fn pseudo_inverse(&self, rho: &[Complex64]) -> Vec<Complex64> {
        let tiny = 1e-10 / self.dx;
        self.multiply_in_fourier(rho, |j| {
            let s = self.symbol[j];
            if s.im.abs() > tiny {
                1.0 / s
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `e^{tD} u`, the exact solution of `∂t v = D v` on the periodic grid.
    pub fn propagate(&self, u: &[Complex64], t: f64) -> Vec<Complex64> {
        self.multiply_in_fourier(u, |j| (self.symbol[j] * t).exp())
    }

    /// `∫₀^τ e^{sD} u ds`. Together with a clamped derivative this moves profiles
    /// that are constant but non-zero at the grid ends.
    pub fn propagate_integral(&self, u: &[Complex64], tau: f64) -> Vec<Complex64> {
        let tiny = 1e-12 / self.dx;
        self.multiply_in_fourier(u, |j| {
            let s = self.symbol[j];
            if s.im.abs() > tiny {
                ((s * tau).exp() - 1.0) / s
            } else {
                Complex64::new(tau, 0.0)
            }
        })
    }

    /// The stencil as a dense real matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            e[col] = Complex64::new(1.0, 0.0);
            let d = self.apply_vec(&e);
            for row in 0..n {
                m[(row, col)] = d[row].re;
            }
            e[col] = Complex64::new(0.0, 0.0);
        }
        m
    }
}
