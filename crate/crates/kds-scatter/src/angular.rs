//! The deformed spherical operator `P = λn²/sin²θ - (1/sinθ) ∂θ sinθ Δθ ∂θ`
//! restricted to the axial mode `n`.
//!
//! We work in `μ = cosθ` with a Galerkin basis of normalised associated Legendre
//! functions `P̄_ℓ^{|n|}`, `ℓ = |n| .. N_θ-1`. Every integrand is a polynomial in `μ`,
//! so a Gauss rule with a few spare nodes assembles the matrix exactly.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::SpacetimeParams;
use crate::quadrature::gauss_legendre;

/// Values and `μ`-derivatives of `P̄_ℓ^m`, `ℓ = m .. m+count-1`, at one node.
pub fn normalized_legendre(m: usize, count: usize, mu: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = Vec::with_capacity(count);
    let mut dp = Vec::with_capacity(count);
    if count == 0 {
        return (p, dp);
    }
    let s2 = 1.0 - mu * mu;
    let s = s2.sqrt();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for i in 1..=m {
        let fi = i as f64;
        pmm *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * s;
    }
    p.push(pmm);
    if count > 1 {
        p.push(mu * (2.0 * m as f64 + 3.0).sqrt() * pmm);
    }
    let mf = m as f64;
    for k in 2..count {
        let l = (m + k) as f64;
        let a = ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
        let lm1 = l - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let next = a * (mu * p[k - 1] - b * p[k - 2]);
        p.push(next);
    }
    for k in 0..count {
        let l = (m + k) as f64;
        let prev = if k == 0 { 0.0 } else { p[k - 1] };
        let c = ((2.0 * l + 1.0) * (l * l - mf * mf) / (2.0 * l - 1.0)).sqrt();
        dp.push((c * prev - l * mu * p[k]) / s2);
    }
    (p, dp)
}

/// Galerkin matrix of `P_n` in the orthonormal basis `P̄_ℓ^{|n|}`.
#[derive(Clone, Debug)]
pub struct AngularOperator {
    pub n: i32,
    pub matrix: DMatrix<f64>,
}

impl AngularOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Quadratic form `⟨P c, c⟩` for a coefficient vector.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(c);
        v.dot(&(&self.matrix * &v))
    }
}

pub fn assemble_p_n(params: &SpacetimeParams, n_theta: usize) -> Result<AngularOperator> {
    let m = params.n.unsigned_abs() as usize;
    if n_theta < 2 * m + 8 {
        return Err(Error::Grid(format!("n_theta = {n_theta} < 2|n| + 8 = {}", 2 * m + 8)));
    }
    let dim = n_theta - m;
    let (mu, w) = gauss_legendre(n_theta + 4);
    let lam = params.lambda_factor();
    let n2 = (params.n as f64).powi(2);
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    for (&x, &wk) in mu.iter().zip(&w) {
        let (p, dp) = normalized_legendre(m, dim, x);
        let s2 = 1.0 - x * x;
        let dth = params.delta_theta(x);
        for j in 0..dim {
            for k in j..dim {
                let v = wk * (lam * n2 * p[j] * p[k] / s2 + dth * s2 * dp[j] * dp[k]);
                mat[(j, k)] += v;
            }
        }
    }
    for j in 0..dim {
        for k in 0..j {
            mat[(j, k)] = mat[(k, j)];
        }
    }
    Ok(AngularOperator { n: params.n, matrix: mat })
}

/// Eigenpairs `(λ_q, Z_q)` of `P_n`, ascending, with `Z_q` tabulated on Gauss nodes.
///
/// `Z_q` is normalised in `∫ dμ`; the full harmonic is `Z_q(μ) e^{inφ}/√(2π)`.
#[derive(Clone, Debug)]
pub struct AngularBasis {
    pub n: i32,
    /// Gauss nodes in `μ = cosθ`, ascending.
    pub mu: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    /// Weights for `∫ f dμ = ∫ f sinθ dθ`.
    pub quad_weights: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Legendre coefficients of each eigenvector, one column per mode.
    pub coefficients: DMatrix<f64>,
    /// `Z_q(μ_k)` at row `k`, column `q`.
    pub values: DMatrix<f64>,
    /// `∂μ Z_q(μ_k)`.
    pub derivatives: DMatrix<f64>,
}

pub fn spectrum_p(op: &AngularOperator) -> Result<AngularBasis> {
    spectrum_p_on(op, op.dim() + 8)
}

/// As [`spectrum_p`], tabulating the eigenfunctions on an `n_nodes`-point Gauss rule.
pub fn spectrum_p_on(op: &AngularOperator, n_nodes: usize) -> Result<AngularBasis> {
    let dim = op.dim();
    let eig = op
        .matrix
        .clone()
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::Convergence(format!("symmetric eigensolver on {dim}x{dim} matrix")))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut coefficients = DMatrix::<f64>::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // Fix the sign so the leading coefficient is positive.
        let lead = v.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            v.neg_mut();
        }
        coefficients.set_column(col, &v);
    }
    let m = op.n.unsigned_abs() as usize;
    let (mu, w) = gauss_legendre(n_nodes);
    let mut values = DMatrix::<f64>::zeros(n_nodes, dim);
    let mut derivatives = DMatrix::<f64>::zeros(n_nodes, dim);
    for (k, &x) in mu.iter().enumerate() {
        let (p, dp) = normalized_legendre(m, dim, x);
        for q in 0..dim {
            let mut v = 0.0;
            let mut d = 0.0;
            for l in 0..dim {
                v += coefficients[(l, q)] * p[l];
                d += coefficients[(l, q)] * dp[l];
            }
            values[(k, q)] = v;
            derivatives[(k, q)] = d;
        }
    }
    let theta_nodes = mu.iter().map(|x| x.acos()).collect();
    Ok(AngularBasis { n: op.n, mu, theta_nodes, quad_weights: w, eigenvalues, coefficients, values, derivatives })
}

impl AngularBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn n_nodes(&self) -> usize {
        self.mu.len()
    }

    /// Keep the lowest `q_max` modes.
    pub fn truncated(&self, q_max: usize) -> AngularBasis {
        let q = q_max.min(self.len());
        AngularBasis {
            n: self.n,
            mu: self.mu.clone(),
            theta_nodes: self.theta_nodes.clone(),
            quad_weights: self.quad_weights.clone(),
            eigenvalues: self.eigenvalues[..q].to_vec(),
            coefficients: self.coefficients.columns(0, q).into_owned(),
            values: self.values.columns(0, q).into_owned(),
            derivatives: self.derivatives.columns(0, q).into_owned(),
        }
    }

    /// Discrete `∫ Z_p Z_q dμ`.
    pub fn gram(&self) -> DMatrix<f64> {
        let q = self.len();
        DMatrix::from_fn(q, q, |i, j| {
            (0..self.n_nodes()).map(|k| self.quad_weights[k] * self.values[(k, i)] * self.values[(k, j)]).sum()
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "q,lambda_q")?;
        for (q, l) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{q},{l:.15e}")?;
        }
        Ok(())
    }
}

/// Assemble and diagonalise in one call, keeping `q_max` modes.
pub fn angular_basis(params: &SpacetimeParams, n_theta: usize, q_max: usize) -> Result<AngularBasis> {
    let op = assemble_p_n(params, n_theta)?;
    Ok(spectrum_p(&op)?.truncated(q_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, n: i32) -> SpacetimeParams {
        SpacetimeParams { lambda_c: 0.05, mass: 1.0, spin: a, n, m2: 0.1 }
    }

    #[test]
    fn legendre_functions_are_orthonormal() {
        let (mu, w) = gauss_legendre(40);
        for m in 0..4 {
            let count = 10;
            let mut gram = vec![vec![0.0; count]; count];
            for (x, wk) in mu.iter().zip(&w) {
                let (p, _) = normalized_legendre(m, count, *x);
                for i in 0..count {
                    for j in 0..count {
                        gram[i][j] += wk * p[i] * p[j];
                    }
                }
            }
            for i in 0..count {
                for j in 0..count {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((gram[i][j] - e).abs() < 1e-13, "m={m} ({i},{j}) {}", gram[i][j]);
                }
            }
        }
    }

    #[test]
    fn legendre_derivative_matches_difference_quotient() {
        let h = 1e-6;
        for m in 0..3 {
            let (_, d) = normalized_legendre(m, 6, 0.3);
            let (pp, _) = normalized_legendre(m, 6, 0.3 + h);
            let (pm, _) = normalized_legendre(m, 6, 0.3 - h);
            for k in 0..6 {
                assert!((d[k] - (pp[k] - pm[k]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn too_few_nodes_is_a_grid_error() {
        assert!(matches!(assemble_p_n(&params(0.0, 3), 13), Err(Error::Grid(_))));
    }

    #[test]
    fn eigenvectors_are_orthonormal_on_nodes() {
        let b = angular_basis(&params(0.1, 1), 16, 12).unwrap();
        let g = b.gram();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-10);
            }
        }
    }
}
