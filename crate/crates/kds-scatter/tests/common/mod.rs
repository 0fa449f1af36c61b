//! Independent oracles shared by the integration tests. Nothing here calls into the
//! library's numerics.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// `Δr(r) = (1 - Λr²/3)(r² + a²) - 2Mr`.
pub fn delta_r(lambda: f64, mass: f64, a: f64, r: f64) -> f64 {
    (1.0 - lambda * r * r / 3.0) * (r * r + a * a) - 2.0 * mass * r
}

/// Roots of `Δr` on `(0, √(3/Λ))` by scanning and plain bisection.
pub fn bisect_roots(lambda: f64, mass: f64, a: f64) -> Vec<f64> {
    let top = (3.0 / lambda).sqrt();
    let f = |r: f64| delta_r(lambda, mass, a, r);
    let n = 40_000;
    let mut roots = Vec::new();
    for k in 0..n {
        let (mut lo, mut hi) = (top * k as f64 / n as f64 + 1e-12, top * (k + 1) as f64 / n as f64);
        if f(lo).signum() == f(hi).signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// `|Δr'(r+)| / (λ(r+² + a²))` with a centred difference for `Δr'`.
pub fn kappa_at(lambda: f64, mass: f64, a: f64, r: f64) -> f64 {
    let h = 1e-6 * r;
    let d = (delta_r(lambda, mass, a, r + h) - delta_r(lambda, mass, a, r - h)) / (2.0 * h);
    let lam = 1.0 + lambda * a * a / 3.0;
    d.abs() / (lam * (r * r + a * a))
}

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `T(r) = ∫_{r0}^{r} λ(s² + a²)/Δr(s) ds`.
pub fn t_of_r(lambda: f64, mass: f64, a: f64, r0: f64, r: f64) -> f64 {
    let lam = 1.0 + lambda * a * a / 3.0;
    let f = |s: f64| lam * (s * s + a * a) / delta_r(lambda, mass, a, s);
    simpson(&f, r0, r, 200_000)
}

/// `exp(tM) v` as a product of degree-24 Taylor polynomials on substeps with
/// `‖hM‖_∞ ≤ 1/2`.
pub fn expm_times(m: &DMatrix<C64>, v: &DVector<C64>, t: f64) -> DVector<C64> {
    let n = m.nrows();
    let norm_inf = (0..n).map(|r| m.row(r).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = (2.0 * norm_inf * t.abs()).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        // Horner: (I + hM(I + hM/2(I + ... (I + hM/24))))
        let mut acc = out.clone();
        for k in (1..=24).rev() {
            acc = &out + (m * &acc) * C64::new(h / k as f64, 0.0);
        }
        out = acc;
    }
    out
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
