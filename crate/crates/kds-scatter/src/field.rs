//! First-order system states `(u₀, u₁)` stored by `P`-mode.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::angular::AngularBasis;
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A state sampled on `n_x` radial nodes for each of `n_modes` angular modes.
///
/// Mode `q` occupies `u0[q*n_x .. (q+1)*n_x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub n: i32,
    pub n_x: usize,
    pub n_modes: usize,
    pub u0: Vec<C64>,
    pub u1: Vec<C64>,
}

impl FieldState {
    pub fn zeros(n: i32, n_x: usize, n_modes: usize) -> Self {
        Self { n, n_x, n_modes, u0: vec![ZERO; n_x * n_modes], u1: vec![ZERO; n_x * n_modes] }
    }

    pub fn zeros_like(other: &FieldState) -> Self {
        Self::zeros(other.n, other.n_x, other.n_modes)
    }

    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }

    pub fn mode0(&self, q: usize) -> &[C64] {
        &self.u0[q * self.n_x..(q + 1) * self.n_x]
    }

    pub fn mode1(&self, q: usize) -> &[C64] {
        &self.u1[q * self.n_x..(q + 1) * self.n_x]
    }

    pub fn mode0_mut(&mut self, q: usize) -> &mut [C64] {
        let n = self.n_x;
        &mut self.u0[q * n..(q + 1) * n]
    }

    pub fn mode1_mut(&mut self, q: usize) -> &mut [C64] {
        let n = self.n_x;
        &mut self.u1[q * n..(q + 1) * n]
    }

    pub fn check_same_shape(&self, other: &FieldState) -> Result<()> {
        if self.n_x != other.n_x || self.n_modes != other.n_modes || self.n != other.n {
            return Err(Error::Shape(format!(
                "({}, {}, n={}) vs ({}, {}, n={})",
                self.n_x, self.n_modes, self.n, other.n_x, other.n_modes, other.n
            )));
        }
        Ok(())
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: C64, other: &FieldState) {
        for (a, b) in self.u0.iter_mut().zip(&other.u0) {
            *a += c * b;
        }
        for (a, b) in self.u1.iter_mut().zip(&other.u1) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: C64) {
        self.u0.iter_mut().chain(self.u1.iter_mut()).for_each(|v| *v *= c);
    }

    pub fn sub(&self, other: &FieldState) -> FieldState {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out
    }

    pub fn add(&self, other: &FieldState) -> FieldState {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other);
        out
    }

    /// Multiply both components pointwise in `x` by a real profile.
    pub fn mul_profile(&mut self, w: &[f64]) {
        for q in 0..self.n_modes {
            for (v, c) in self.mode0_mut(q).iter_mut().zip(w) {
                *v *= *c;
            }
            for (v, c) in self.mode1_mut(q).iter_mut().zip(w) {
                *v *= *c;
            }
        }
    }

    /// Reverse every mode in `x`, the mirror `x ↦ -x` on a symmetric grid.
    pub fn reversed(&self) -> FieldState {
        let mut out = self.clone();
        for q in 0..self.n_modes {
            out.mode0_mut(q).reverse();
            out.mode1_mut(q).reverse();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.u0.iter().chain(&self.u1).all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.u0.iter().chain(&self.u1).map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|u|` over the outer `fraction` of the grid on either side.
    pub fn max_abs_outer(&self, fraction: f64) -> f64 {
        let band = ((self.n_x as f64) * fraction).ceil() as usize;
        let mut m: f64 = 0.0;
        for q in 0..self.n_modes {
            for comp in [self.mode0(q), self.mode1(q)] {
                for v in comp[..band].iter().chain(&comp[self.n_x - band..]) {
                    m = m.max(v.norm());
                }
            }
        }
        m
    }

    /// Nodal values of `u₀` or `u₁` on the angular nodes: row `k`, column `j`.
    pub fn to_nodal(&self, basis: &AngularBasis, component: usize) -> Result<DMatrix<C64>> {
        if basis.len() != self.n_modes {
            return Err(Error::Shape(format!("basis has {} modes, state {}", basis.len(), self.n_modes)));
        }
        let src = if component == 0 { &self.u0 } else { &self.u1 };
        let nk = basis.n_nodes();
        let mut out = DMatrix::<C64>::zeros(nk, self.n_x);
        for k in 0..nk {
            for q in 0..self.n_modes {
                let z = basis.values[(k, q)];
                let row = &src[q * self.n_x..(q + 1) * self.n_x];
                for j in 0..self.n_x {
                    out[(k, j)] += row[j] * z;
                }
            }
        }
        Ok(out)
    }

    /// Project nodal values onto the retained modes by Gauss quadrature.
    pub fn set_from_nodal(&mut self, basis: &AngularBasis, component: usize, nodal: &DMatrix<C64>) -> Result<()> {
        if basis.len() != self.n_modes || nodal.nrows() != basis.n_nodes() || nodal.ncols() != self.n_x {
            return Err(Error::Shape("nodal array does not match basis and state".into()));
        }
        let n_x = self.n_x;
        let dst = if component == 0 { &mut self.u0 } else { &mut self.u1 };
        for q in 0..self.n_modes {
            for j in 0..n_x {
                let mut acc = ZERO;
                for k in 0..basis.n_nodes() {
                    acc += nodal[(k, j)] * (basis.quad_weights[k] * basis.values[(k, q)]);
                }
                dst[q * n_x + j] = acc;
            }
        }
        Ok(())
    }
}

/// `dx Σ a̅ b` over all entries, the discrete `L²(dx dω)` product.
pub fn inner(a: &[C64], b: &[C64], dx: f64) -> C64 {
    let mut s = ZERO;
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s * dx
}

pub fn norm_sq(a: &[C64], dx: f64) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::angular_basis;
    use crate::geometry::SpacetimeParams;

    #[test]
    fn nodal_round_trip_is_identity_on_retained_modes() {
        let p = SpacetimeParams { lambda_c: 0.05, mass: 1.0, spin: 0.2, n: 1, m2: 0.0 };
        let basis = angular_basis(&p, 12, 5).unwrap();
        let mut u = FieldState::zeros(1, 7, 5);
        for (i, v) in u.u0.iter_mut().enumerate() {
            *v = C64::new((i as f64).sin(), (i as f64 * 0.7).cos());
        }
        let nodal = u.to_nodal(&basis, 0).unwrap();
        let mut w = FieldState::zeros_like(&u);
        w.set_from_nodal(&basis, 0, &nodal).unwrap();
        let err = u.u0.iter().zip(&w.u0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}
