//! Discrete generators and energy forms on the `x × P-mode` grid.
//!
//! The full operator is projected onto the retained eigenmodes node by node:
//! at each `x_j` the multiplication operators `G = √(fΔθ)/σ`, the angular part
//! plus potential, and `k` become real symmetric `Q×Q` matrices. With these,
//! `h₀ = G Dᵀ f D G + V` is a sum of squares for any antisymmetric `D`.
//!
//! Comparison dynamics are written through the gauge `e^{iL}`, `L = nA - l±x`,
//! which turns `∂x + i(l - l+)` into a conjugated copy of `D`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::AngularBasis;
use crate::error::{Error, Result};
use crate::field::{inner, norm_sq, FieldState, C64, ZERO};
use crate::geometry::{Cutoff, RadialChart, SpacetimeParams};
use crate::stencil::Derivative;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Full,
    InfPlus,
    InfMinus,
    TPlus,
    TMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    FullHom,
    FullInhom,
    TPlus,
    TMinus,
    InfPlus,
    InfMinus,
}

impl NormKind {
    pub fn t_side(side: Side) -> NormKind {
        match side {
            Side::Plus => NormKind::TPlus,
            Side::Minus => NormKind::TMinus,
        }
    }
}

/// Chart data seen from one horizon: for `Minus` every array is mirrored so that
/// the minus-side formulas become the plus-side ones with `l+ → l-`.
#[derive(Clone, Debug)]
pub struct SideFrame {
    pub side: Side,
    pub y: Vec<f64>,
    pub l: Vec<f64>,
    pub l_ref: f64,
    /// `nA` in the side frame.
    pub n_a: Vec<f64>,
    /// `e^{iL}`, `L = nA - l_ref y`.
    pub gauge: Vec<C64>,
    pub cutoff: Cutoff,
    /// The side's own cutoff, `i+` (or mirrored `i-`).
    pub i_cut: Vec<f64>,
}

impl SideFrame {
    pub fn new(chart: &RadialChart, side: Side) -> Self {
        let nf = chart.params.n as f64;
        let n = chart.len();
        let pick = |v: &[f64], j: usize| match side {
            Side::Plus => v[j],
            Side::Minus => v[n - 1 - j],
        };
        let y = chart.x.clone();
        let l: Vec<f64> = (0..n).map(|j| pick(&chart.l, j)).collect();
        let n_a: Vec<f64> = (0..n)
            .map(|j| match side {
                Side::Plus => nf * chart.a_of_x[j],
                Side::Minus => -nf * chart.a_of_x[n - 1 - j],
            })
            .collect();
        let l_ref = match side {
            Side::Plus => chart.l_plus,
            Side::Minus => chart.l_minus,
        };
        let gauge = (0..n).map(|j| C64::from_polar(1.0, n_a[j] - l_ref * y[j])).collect();
        let cutoff = match side {
            Side::Plus => chart.cutoff,
            Side::Minus => chart.cutoff.mirrored(),
        };
        let i_cut = y.iter().map(|&v| cutoff.plus(v)).collect();
        Self { side, y, l, l_ref, n_a, gauge, cutoff, i_cut }
    }

    /// Map a state into this frame (or back: the map is an involution).
    pub fn state(&self, u: &FieldState) -> FieldState {
        match self.side {
            Side::Plus => u.clone(),
            Side::Minus => u.reversed(),
        }
    }

    pub fn profile(&self, v: &[C64]) -> Vec<C64> {
        match self.side {
            Side::Plus => v.to_vec(),
            Side::Minus => v.iter().rev().copied().collect(),
        }
    }
}

/// Multiplication by `σ/√(λ(r²+a²)Δθ)`, from the physical measure to `dx dω`.
pub fn u_weight(params: &SpacetimeParams, r: f64, delta_r: f64, mu: f64) -> f64 {
    let a2 = params.spin * params.spin;
    let f = r * r + a2;
    let dth = params.delta_theta(mu);
    let sigma2 = f * f * dth - a2 * delta_r * (1.0 - mu * mu);
    (sigma2 / (params.lambda_factor() * f * dth)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UDirection {
    ToAnalysis,
    FromAnalysis,
}

/// Apply the unitary transform to nodal data (rows: angular nodes, columns: `x` nodes).
pub fn u_transform(chart: &RadialChart, basis: &AngularBasis, f: &DMatrix<C64>, dir: UDirection) -> Result<DMatrix<C64>> {
    if f.nrows() != basis.n_nodes() || f.ncols() != chart.len() {
        return Err(Error::Shape("nodal array does not match chart and basis".into()));
    }
    let mut out = f.clone();
    for k in 0..basis.n_nodes() {
        for j in 0..chart.len() {
            let w = u_weight(&chart.params, chart.r[j], chart.delta_r[j], basis.mu[k]);
            match dir {
                UDirection::ToAnalysis => out[(k, j)] *= w,
                UDirection::FromAnalysis => out[(k, j)] /= w,
            }
        }
    }
    Ok(out)
}

/// Everything needed to apply the evolution generators and evaluate the energy forms.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub params: SpacetimeParams,
    pub chart: RadialChart,
    pub basis: AngularBasis,
    pub deriv: Derivative,
    pub n_x: usize,
    pub n_modes: usize,
    pub dx: f64,
    /// All coupling matrices are diagonal (the `a = 0` case).
    pub diagonal: bool,
    /// Per-node `Q×Q` blocks, node-major.
    g_mat: Vec<f64>,
    pot_mat: Vec<f64>,
    k_mat: Vec<f64>,
    f: Vec<f64>,
    /// `Δr λ_q/(λ² f²) + Δr m²`, mode-major.
    v_inf: Vec<f64>,
    pub plus: SideFrame,
    pub minus: SideFrame,
    /// `e^{iL}` in the `x` frame for each side.
    gauge_x_plus: Vec<C64>,
    gauge_x_minus: Vec<C64>,
}

pub fn assemble_generators(
    params: &SpacetimeParams,
    chart: &RadialChart,
    basis: &AngularBasis,
) -> Result<GeneratorSet> {
    if chart.params != *params {
        return Err(Error::Shape("chart was built from different parameters".into()));
    }
    if basis.n != params.n {
        return Err(Error::Shape(format!("basis is for n = {}, params have n = {}", basis.n, params.n)));
    }
    if basis.is_empty() {
        return Err(Error::Shape("angular basis has no modes".into()));
    }
    let n_x = chart.len();
    let nq = basis.len();
    let a = params.spin;
    let a2 = a * a;
    let lam = params.lambda_factor();
    let nf = params.n as f64;
    let m2 = params.m2;
    let cth = params.lambda_c * a2 / 3.0;

    let mut g_mat = vec![0.0; n_x * nq * nq];
    let mut pot_mat = vec![0.0; n_x * nq * nq];
    let mut k_mat = vec![0.0; n_x * nq * nq];
    let nk = basis.n_nodes();
    let mut gv = vec![0.0; nk];
    let mut kv = vec![0.0; nk];
    let mut vv = vec![0.0; nk];
    let mut sv = vec![0.0; nk];
    let mut cv = vec![0.0; nk];
    for j in 0..n_x {
        let r = chart.r[j];
        let dr = chart.delta_r[j];
        let f = r * r + a2;
        for k in 0..nk {
            let mu = basis.mu[k];
            let s2 = 1.0 - mu * mu;
            let dth = 1.0 + cth * mu * mu;
            let dth_mu = 2.0 * cth * mu;
            let rho2 = r * r + a2 * mu * mu;
            let sigma2 = f * f * dth - a2 * dr * s2;
            let sigma2_mu = f * f * dth_mu + 2.0 * a2 * dr * mu;
            let sigma = sigma2.sqrt();
            gv[k] = (f * dth).sqrt() / sigma;
            kv[k] = nf * a * (dr - f * dth) / sigma2;
            vv[k] = nf * nf * dr * dth * rho2 * rho2 / (s2 * sigma2 * sigma2) + rho2 * dr * dth * m2 / (lam * lam * sigma2);
            // (Δr/λ²) Δθ (1-μ²) g², g = √Δθ/σ
            sv[k] = dr / (lam * lam) * dth * s2 * dth / sigma2;
            cv[k] = 0.5 * dth_mu / dth - 0.5 * sigma2_mu / sigma2;
        }
        let base = j * nq * nq;
        for p in 0..nq {
            for q in p..nq {
                let (mut g, mut kk, mut pot) = (0.0, 0.0, 0.0);
                for k in 0..nk {
                    let w = basis.quad_weights[k];
                    let zp = basis.values[(k, p)];
                    let zq = basis.values[(k, q)];
                    let zz = w * zp * zq;
                    g += gv[k] * zz;
                    kk += kv[k] * zz;
                    let dp = basis.derivatives[(k, p)] + cv[k] * zp;
                    let dq = basis.derivatives[(k, q)] + cv[k] * zq;
                    pot += vv[k] * zz + w * sv[k] * dp * dq;
                }
                for (mat, v) in [(&mut g_mat, g), (&mut k_mat, kk), (&mut pot_mat, pot)] {
                    mat[base + p * nq + q] = v;
                    mat[base + q * nq + p] = v;
                }
            }
        }
    }

    let f: Vec<f64> = chart.r.iter().map(|r| r * r + a2).collect();
    let mut v_inf = vec![0.0; n_x * nq];
    for q in 0..nq {
        for j in 0..n_x {
            let dr = chart.delta_r[j];
            v_inf[q * n_x + j] = dr * basis.eigenvalues[q] / (lam * lam * f[j] * f[j]) + dr * m2;
        }
    }
    let plus = SideFrame::new(chart, Side::Plus);
    let minus = SideFrame::new(chart, Side::Minus);
    let gauge_x_plus = plus.gauge.clone();
    let gauge_x_minus = minus.profile(&minus.gauge);
    Ok(GeneratorSet {
        params: *params,
        chart: chart.clone(),
        basis: basis.clone(),
        deriv: Derivative::new(n_x, chart.dx),
        n_x,
        n_modes: nq,
        dx: chart.dx,
        diagonal: a == 0.0,
        g_mat,
        pot_mat,
        k_mat,
        f,
        v_inf,
        plus,
        minus,
        gauge_x_plus,
        gauge_x_minus,
    })
}

impl GeneratorSet {
    pub fn frame(&self, side: Side) -> &SideFrame {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn zero_state(&self) -> FieldState {
        FieldState::zeros(self.params.n, self.n_x, self.n_modes)
    }

    pub fn check_state(&self, u: &FieldState) -> Result<()> {
        if u.n_x != self.n_x || u.n_modes != self.n_modes || u.n != self.params.n {
            return Err(Error::Shape(format!(
                "state ({}, {}, n={}) vs generators ({}, {}, n={})",
                u.n_x, u.n_modes, u.n, self.n_x, self.n_modes, self.params.n
            )));
        }
        Ok(())
    }

    /// `k_{±∞} = k_{T,±} = -l±`.
    pub fn k_comparison(&self, side: Side) -> f64 {
        -self.frame(side).l_ref
    }

    /// Multiply a mode-major vector by one of the per-node matrices.
    fn node_matrix(&self, mats: &[f64], v: &[C64]) -> Vec<C64> {
        let (n_x, nq) = (self.n_x, self.n_modes);
        let mut out = vec![ZERO; v.len()];
        if self.diagonal {
            for q in 0..nq {
                for j in 0..n_x {
                    out[q * n_x + j] = v[q * n_x + j] * mats[j * nq * nq + q * nq + q];
                }
            }
            return out;
        }
        let mut buf = vec![ZERO; nq];
        for j in 0..n_x {
            let m = &mats[j * nq * nq..(j + 1) * nq * nq];
            for (p, b) in buf.iter_mut().enumerate() {
                *b = v[p * n_x + j];
            }
            for q in 0..nq {
                let row = &m[q * nq..(q + 1) * nq];
                let mut acc = ZERO;
                for p in 0..nq {
                    acc += buf[p] * row[p];
                }
                out[q * n_x + j] = acc;
            }
        }
        out
    }

    /// `D` applied to each mode.
    pub fn d_modes(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        out.par_chunks_mut(self.n_x).zip(v.par_chunks(self.n_x)).for_each(|(o, i)| self.deriv.apply(i, o));
        out
    }

    pub fn k_apply(&self, v: &[C64]) -> Vec<C64> {
        self.node_matrix(&self.k_mat, v)
    }

    /// `√f D G v`, whose squared norm is the radial part of `⟨h₀ v, v⟩`.
    fn radial_root(&self, v: &[C64]) -> Vec<C64> {
        let gv = self.node_matrix(&self.g_mat, v);
        let mut d = self.d_modes(&gv);
        for q in 0..self.n_modes {
            for j in 0..self.n_x {
                d[q * self.n_x + j] *= self.f[j].sqrt();
            }
        }
        d
    }

    pub fn h0_apply(&self, v: &[C64]) -> Vec<C64> {
        let gv = self.node_matrix(&self.g_mat, v);
        let mut d = self.d_modes(&gv);
        for q in 0..self.n_modes {
            for j in 0..self.n_x {
                d[q * self.n_x + j] *= self.f[j];
            }
        }
        let dd = self.d_modes(&d);
        let mut out = self.node_matrix(&self.g_mat, &dd);
        out.iter_mut().for_each(|z| *z = -*z);
        let pot = self.node_matrix(&self.pot_mat, v);
        for (o, p) in out.iter_mut().zip(&pot) {
            *o += p;
        }
        out
    }

    /// `e^{-iL} Dᵀ D e^{iL} v` for the side's gauge, i.e. `h_{0,T,±}`.
    fn h0_t_apply(&self, side: Side, v: &[C64]) -> Vec<C64> {
        let g = match side {
            Side::Plus => &self.gauge_x_plus,
            Side::Minus => &self.gauge_x_minus,
        };
        let n_x = self.n_x;
        let mut out = vec![ZERO; v.len()];
        out.par_chunks_mut(n_x).zip(v.par_chunks(n_x)).for_each(|(o, vi)| {
            let gv: Vec<C64> = vi.iter().zip(g).map(|(a, b)| a * b).collect();
            let d1 = self.deriv.apply_vec(&gv);
            let d2 = self.deriv.apply_vec(&d1);
            for j in 0..n_x {
                o[j] = -d2[j] * g[j].conj();
            }
        });
        out
    }

    fn h0_inf_apply(&self, v: &[C64]) -> Vec<C64> {
        let n_x = self.n_x;
        let mut out = vec![ZERO; v.len()];
        out.par_chunks_mut(n_x).zip(v.par_chunks(n_x)).zip(self.v_inf.par_chunks(n_x)).for_each(|((o, vi), pot)| {
            let d1 = self.deriv.apply_vec(vi);
            let d2 = self.deriv.apply_vec(&d1);
            for j in 0..n_x {
                o[j] = -d2[j] + vi[j] * pot[j];
            }
        });
        out
    }

    /// `h v` for the given generator.
    pub fn h_apply(&self, gen: Generator, v: &[C64]) -> Vec<C64> {
        match gen {
            Generator::Full => {
                let mut out = self.h0_apply(v);
                let kk = self.k_apply(&self.k_apply(v));
                for (o, k) in out.iter_mut().zip(&kk) {
                    *o -= k;
                }
                out
            }
            Generator::TPlus | Generator::TMinus => {
                let side = if gen == Generator::TPlus { Side::Plus } else { Side::Minus };
                let l = self.frame(side).l_ref;
                let mut out = self.h0_t_apply(side, v);
                for (o, x) in out.iter_mut().zip(v) {
                    *o -= x * (l * l);
                }
                out
            }
            Generator::InfPlus | Generator::InfMinus => {
                let side = if gen == Generator::InfPlus { Side::Plus } else { Side::Minus };
                let l = self.frame(side).l_ref;
                let mut out = self.h0_inf_apply(v);
                for (o, x) in out.iter_mut().zip(v) {
                    *o -= x * (l * l);
                }
                out
            }
        }
    }

    /// `(i v₁, i(h v₀ + 2k v₁))`.
    pub fn rhs(&self, gen: Generator, u: &FieldState) -> FieldState {
        let hv = self.h_apply(gen, &u.u0);
        let mut out = FieldState::zeros_like(u);
        let kv: Vec<C64> = match gen {
            Generator::Full => self.k_apply(&u.u1),
            Generator::TPlus | Generator::InfPlus => u.u1.iter().map(|x| x * self.k_comparison(Side::Plus)).collect(),
            Generator::TMinus | Generator::InfMinus => {
                u.u1.iter().map(|x| x * self.k_comparison(Side::Minus)).collect()
            }
        };
        for i in 0..u.len() {
            out.u0[i] = I * u.u1[i];
            out.u1[i] = I * (hv[i] + kv[i] * 2.0);
        }
        out
    }

    /// `⟨h₀ v, v⟩`, evaluated as a sum of squares plus the projected potential.
    pub fn h0_form(&self, v: &[C64]) -> f64 {
        let rad = norm_sq(&self.radial_root(v), self.dx);
        let pot = inner(v, &self.node_matrix(&self.pot_mat, v), self.dx).re;
        rad + pot
    }

    /// `‖(∂x + i(l - l+))v‖²` (or the minus analogue), through the gauge.
    pub fn t_form(&self, side: Side, v: &[C64]) -> f64 {
        let g = match side {
            Side::Plus => &self.gauge_x_plus,
            Side::Minus => &self.gauge_x_minus,
        };
        let mut total = 0.0;
        for vi in v.chunks(self.n_x) {
            let gv: Vec<C64> = vi.iter().zip(g).map(|(a, b)| a * b).collect();
            total += norm_sq(&self.deriv.apply_vec(&gv), self.dx);
        }
        total
    }

    fn inf_form(&self, v: &[C64]) -> f64 {
        let mut total = 0.0;
        for (vi, pot) in v.chunks(self.n_x).zip(self.v_inf.chunks(self.n_x)) {
            total += norm_sq(&self.deriv.apply_vec(vi), self.dx);
            total += vi.iter().zip(pot).map(|(x, p)| x.norm_sqr() * p).sum::<f64>() * self.dx;
        }
        total
    }

    pub fn energy_norm_sq(&self, u: &FieldState, kind: NormKind) -> Result<f64> {
        self.check_state(u)?;
        let l2 = norm_sq(&u.u0, self.dx) + norm_sq(&u.u1, self.dx);
        let (form, name) = match kind {
            NormKind::FullHom | NormKind::FullInhom => (self.h0_form(&u.u0), "h0"),
            NormKind::TPlus => (self.t_form(Side::Plus, &u.u0), "h0_T_plus"),
            NormKind::TMinus => (self.t_form(Side::Minus, &u.u0), "h0_T_minus"),
            NormKind::InfPlus | NormKind::InfMinus => (self.inf_form(&u.u0), "h0_inf"),
        };
        if form < -1e-10 * l2.max(f64::MIN_POSITIVE) {
            return Err(Error::NegativeQuadraticForm { form: name, value: form, scale: l2 });
        }
        let second = match kind {
            NormKind::FullHom | NormKind::FullInhom => {
                let ku = self.k_apply(&u.u0);
                u.u1.iter().zip(&ku).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * self.dx
            }
            NormKind::TPlus | NormKind::InfPlus => shifted_sq(&u.u0, &u.u1, self.plus.l_ref, self.dx),
            NormKind::TMinus | NormKind::InfMinus => shifted_sq(&u.u0, &u.u1, self.minus.l_ref, self.dx),
        };
        let extra = if kind == NormKind::FullInhom { norm_sq(&u.u0, self.dx) } else { 0.0 };
        Ok(form.max(0.0) + second + extra)
    }

    pub fn energy_norm(&self, u: &FieldState, kind: NormKind) -> Result<f64> {
        Ok(self.energy_norm_sq(u, kind)?.sqrt())
    }

    /// `Ψ(u) = -i(∂x + i(l - l+))u₀ + u₁ + l+ u₀`, vanishing on the right space
    /// (for `Minus`, the mirror functional vanishing on the left space of the minus side).
    pub fn psi_functional(&self, u: &FieldState, side: Side) -> Result<Vec<C64>> {
        self.psi_generic(u, side, 1.0)
    }

    /// The companion functional `+i(∂x + i(l - l+))u₀ + u₁ + l+ u₀`, vanishing on the left space.
    pub fn psi_conjugate(&self, u: &FieldState, side: Side) -> Result<Vec<C64>> {
        self.psi_generic(u, side, -1.0)
    }

    fn psi_generic(&self, u: &FieldState, side: Side, sign: f64) -> Result<Vec<C64>> {
        self.check_state(u)?;
        let fr = self.frame(side);
        let us = fr.state(u);
        let mut out = vec![ZERO; u.len()];
        for q in 0..u.n_modes {
            let dt = self.gauge_derivative(fr, us.mode0(q));
            let o = &mut out[q * self.n_x..(q + 1) * self.n_x];
            for j in 0..self.n_x {
                o[j] = -I * dt[j] * sign + us.mode1(q)[j] + us.mode0(q)[j] * fr.l_ref;
            }
            if side == Side::Minus {
                o.reverse();
            }
        }
        Ok(out)
    }

    /// `e^{-iL} D e^{iL} v` in the side frame.
    pub fn gauge_derivative(&self, fr: &SideFrame, v: &[C64]) -> Vec<C64> {
        let gv: Vec<C64> = v.iter().zip(&fr.gauge).map(|(a, b)| a * b).collect();
        let d = self.deriv.apply_vec(&gv);
        d.iter().zip(&fr.gauge).map(|(a, b)| a * b.conj()).collect()
    }

    /// Separable potential `Δr λ_q/(λ²f²) + Δr m²` of mode `q`.
    pub fn inf_potential(&self, q: usize) -> &[f64] {
        &self.v_inf[q * self.n_x..(q + 1) * self.n_x]
    }

    /// `δ'₂,₁ u₀ = i(i+ h_{+∞} - h_{T,+} i+) u₀` on a single mode profile.
    pub fn delta_prime_apply(&self, u0: &[C64], q: usize) -> Result<Vec<C64>> {
        if u0.len() != self.n_x || q >= self.n_modes {
            return Err(Error::Shape(format!("profile of length {} / mode {q}", u0.len())));
        }
        let du = self.deriv.apply_vec(u0);
        let pot = self.inf_potential(q);
        let ch = &self.chart;
        let l_plus = ch.l_plus;
        let mut out = vec![ZERO; self.n_x];
        for j in 0..self.n_x {
            let jet = ch.cutoff.plus_jet(ch.x[j]);
            let beta = ch.l[j] - l_plus;
            let (u, d) = (u0[j], du[j]);
            let terms = u * (jet.value * pot[j])
                + u * jet.d2
                + d * (2.0 * jet.d1)
                + I * u * (2.0 * beta * jet.d1)
                + I * d * (2.0 * beta * jet.value)
                + I * u * (ch.dl[j] * jet.value)
                - u * (beta * beta * jet.value);
            out[j] = I * terms;
        }
        Ok(out)
    }

    /// `⟨h_{0,+∞} v, v⟩` for one mode profile.
    pub fn h0_inf_form_mode(&self, v: &[C64], q: usize) -> f64 {
        let pot = self.inf_potential(q);
        norm_sq(&self.deriv.apply_vec(v), self.dx) + v.iter().zip(pot).map(|(x, p)| x.norm_sqr() * p).sum::<f64>() * self.dx
    }

    /// Dense matrix of `h` (Full generator) on the whole state space, for oracles.
    pub fn dense_h(&self, gen: Generator) -> DMatrix<Complex64> {
        self.dense_of(|v| self.h_apply(gen, v))
    }

    pub fn dense_k(&self) -> DMatrix<Complex64> {
        self.dense_of(|v| self.k_apply(v))
    }

    fn dense_of<F: Fn(&[C64]) -> Vec<C64>>(&self, op: F) -> DMatrix<Complex64> {
        let n = self.n_x * self.n_modes;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let mut e = vec![ZERO; n];
        for col in 0..n {
            e[col] = C64::new(1.0, 0.0);
            let c = op(&e);
            for row in 0..n {
                m[(row, col)] = c[row];
            }
            e[col] = ZERO;
        }
        m
    }
}

fn shifted_sq(u0: &[C64], u1: &[C64], l: f64, dx: f64) -> f64 {
    u0.iter().zip(u1).map(|(a, b)| (b + a * l).norm_sqr()).sum::<f64>() * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::angular_basis;
    use crate::geometry::build_background;

    fn gens(a: f64) -> GeneratorSet {
        let p = SpacetimeParams::new(0.05, 1.0, a, 1, 0.0).unwrap();
        let ch = build_background(&p, 12.0, 121, Cutoff::new(0.0, 6.0)).unwrap();
        let b = angular_basis(&p, 10, 3).unwrap();
        assemble_generators(&p, &ch, &b).unwrap()
    }

    #[test]
    fn k_vanishes_without_rotation() {
        let g = gens(0.0);
        let v: Vec<C64> = (0..g.n_x * g.n_modes).map(|i| C64::new(1.0, i as f64)).collect();
        assert!(g.k_apply(&v).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_state_has_zero_norms() {
        let g = gens(0.1);
        let u = g.zero_state();
        for kind in [NormKind::FullHom, NormKind::FullInhom, NormKind::TPlus, NormKind::TMinus, NormKind::InfPlus, NormKind::InfMinus] {
            assert_eq!(g.energy_norm(&u, kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn u_weight_at_zero_spin_is_radial() {
        let p = SpacetimeParams::new(0.05, 1.0, 0.0, 1, 0.0).unwrap();
        for r in [2.5, 4.0, 6.0] {
            let dr = p.delta_r(r);
            assert!((u_weight(&p, r, dr, 0.3) - r).abs() < 1e-14 * r);
        }
    }
}
