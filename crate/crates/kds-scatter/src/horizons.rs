//! Horizon traces, horizon energy norms and the identifications `𝓕±` between
//! horizon profiles and comparison data.
//!
//! A profile lives on `τ = *t` (future `+` horizon) or `τ = t*` (future `-` horizon).
//! Both grids are the negated radial grid, which on the mirror-symmetric chart is
//! the radial grid itself. Values are stored mode-major, like [`FieldState`].

use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolveOptions};
use crate::field::{norm_sq, FieldState, C64, ZERO};
use crate::operators::{Generator, GeneratorSet, NormKind, Side};
use crate::scattering::{direct_wave_ops, ScatterOptions};
use crate::transport::{exact_transport_outflow, TransportKind};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative size of `Ψ` above which a state is not accepted as right (or left) data.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonKind {
    FuturePlus,
    FutureMinus,
}

impl HorizonKind {
    pub fn side(self) -> Side {
        match self {
            HorizonKind::FuturePlus => Side::Plus,
            HorizonKind::FutureMinus => Side::Minus,
        }
    }

    pub fn from_side(side: Side) -> Self {
        match side {
            Side::Plus => HorizonKind::FuturePlus,
            Side::Minus => HorizonKind::FutureMinus,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HorizonProfile {
    pub which: HorizonKind,
    pub t_nodes: Vec<f64>,
    pub n_modes: usize,
    /// Mode `q` at `t_nodes[k]` is `values[q * len + k]`.
    pub values: Vec<C64>,
    /// Squared horizon norm.
    pub energy: f64,
}

impl HorizonProfile {
    pub fn len(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_nodes.is_empty()
    }

    pub fn mode(&self, q: usize) -> &[C64] {
        &self.values[q * self.len()..(q + 1) * self.len()]
    }

    pub fn zeros(which: HorizonKind, gens: &GeneratorSet) -> Self {
        Self::from_values(which, vec![ZERO; gens.n_x * gens.n_modes], gens)
    }

    pub fn from_values(which: HorizonKind, values: Vec<C64>, gens: &GeneratorSet) -> Self {
        let mut p = Self { which, t_nodes: gens.chart.x.clone(), n_modes: gens.n_modes, values, energy: 0.0 };
        p.energy = horizon_norm_sq(&p, gens);
        p
    }

    pub fn sub(&self, other: &HorizonProfile, gens: &GeneratorSet) -> HorizonProfile {
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::from_values(self.which, v, gens)
    }

    /// Values on the angular nodes: row `k` is `θ_k`, column `j` is `t_nodes[j]`. The
    /// angular factor is `Z_q(cos θ)`; the `e^{inφ}` factor is left out.
    pub fn nodal(&self, gens: &GeneratorSet) -> DMatrix<C64> {
        let b = &gens.basis;
        let n = self.len();
        DMatrix::from_fn(b.n_nodes(), n, |k, j| {
            (0..self.n_modes).map(|q| self.values[q * n + j] * b.values[(k, q)]).sum()
        })
    }

    pub fn write_csv<W: Write>(&self, gens: &GeneratorSet, mut out: W) -> std::io::Result<()> {
        let head = match self.which {
            HorizonKind::FuturePlus => "star_t",
            HorizonKind::FutureMinus => "t_star",
        };
        writeln!(out, "{head},theta,re,im")?;
        let nodal = self.nodal(gens);
        for (j, t) in self.t_nodes.iter().enumerate() {
            for (k, th) in gens.basis.theta_nodes.iter().enumerate() {
                let v = nodal[(k, j)];
                writeln!(out, "{t:.6},{th:.12},{:.12e},{:.12e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// `2 ∫|∂τ p + i l± p|² dτ dω`.
pub fn horizon_norm_sq(p: &HorizonProfile, gens: &GeneratorSet) -> f64 {
    let l = gens.frame(p.which.side()).l_ref;
    let mut total = 0.0;
    for q in 0..p.n_modes {
        let g: Vec<C64> = p.mode(q).iter().zip(&p.t_nodes).map(|(v, &t)| v * C64::from_polar(1.0, l * t)).collect();
        total += norm_sq(&gens.deriv.apply_vec(&g), gens.dx);
    }
    2.0 * total
}

pub fn horizon_norm(p: &HorizonProfile, gens: &GeneratorSet) -> f64 {
    horizon_norm_sq(p, gens).sqrt()
}

/// `𝓕± p`: the right (for `+`) or left (for `-`) comparison datum with this trace.
pub fn lift_profile(p: &HorizonProfile, gens: &GeneratorSet) -> Result<FieldState> {
    let n = gens.n_x;
    if p.len() != n || p.n_modes != gens.n_modes {
        return Err(Error::Shape("profile does not match the generator grid".into()));
    }
    let side = p.which.side();
    let fr = gens.frame(side);
    let mut us = gens.zero_state();
    for q in 0..p.n_modes {
        let src = p.mode(q);
        let u0: Vec<C64> = (0..n).map(|j| src[n - 1 - j] * C64::from_polar(1.0, -fr.n_a[j])).collect();
        let dt = gens.gauge_derivative(fr, &u0);
        let u1: Vec<C64> = (0..n).map(|j| I * (dt[j] + I * fr.l_ref * u0[j])).collect();
        us.mode0_mut(q).copy_from_slice(&u0);
        us.mode1_mut(q).copy_from_slice(&u1);
    }
    Ok(fr.state(&us))
}

/// Inverse of [`lift_profile`]. Fails if `u` is not right data (`+`) or left data (`-`).
pub fn project_profile(u: &FieldState, which: HorizonKind, gens: &GeneratorSet) -> Result<HorizonProfile> {
    let side = which.side();
    let psi = gens.psi_functional(u, side)?;
    let scale = gens.energy_norm(u, NormKind::t_side(side))?;
    let defect = norm_sq(&psi, gens.dx).sqrt();
    if defect > MEMBERSHIP_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Membership { value: defect / scale.max(f64::MIN_POSITIVE) });
    }
    Ok(first_component_profile(u, which, gens))
}

/// `p(τ = -y) = e^{inA} u₀(y)` in the side frame, without any membership check.
fn first_component_profile(u: &FieldState, which: HorizonKind, gens: &GeneratorSet) -> HorizonProfile {
    let fr = gens.frame(which.side());
    let us = fr.state(u);
    let n = gens.n_x;
    let mut values = vec![ZERO; n * gens.n_modes];
    for q in 0..gens.n_modes {
        let u0 = us.mode0(q);
        for j in 0..n {
            values[q * n + n - 1 - j] = u0[j] * C64::from_polar(1.0, fr.n_a[j]);
        }
    }
    HorizonProfile::from_values(which, values, gens)
}

#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub profile: HorizonProfile,
    /// Relative sup-change between successive checkpoints.
    pub changes: Vec<(f64, f64)>,
    /// Largest change over the last tenth of the checkpoints.
    pub residual: f64,
    pub max_outflow: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    pub t_max: f64,
    pub tol: f64,
    pub checkpoint: f64,
    pub cfl: f64,
}

impl TraceOptions {
    pub fn new(t_max: f64, tol: f64) -> Self {
        Self { t_max, tol, checkpoint: 1.0, cfl: crate::evolution::DEFAULT_CFL }
    }
}

/// `𝒯± u`: stabilized `e^{tW±} i± (e^{itḢ}u)₀`, read off on the horizon grid.
pub fn extract_trace(u: &FieldState, which: HorizonKind, t_max: f64, gens: &GeneratorSet) -> Result<HorizonProfile> {
    Ok(extract_traces(u, &[which], &TraceOptions::new(t_max, 1e-6), gens)?.remove(0).profile)
}

/// Traces on the requested horizons from one forward run.
pub fn extract_traces(
    u: &FieldState,
    which: &[HorizonKind],
    opts: &TraceOptions,
    gens: &GeneratorSet,
) -> Result<Vec<TraceRecord>> {
    gens.check_state(u)?;
    let blank = |w: HorizonKind| TraceRecord {
        profile: HorizonProfile::zeros(w, gens),
        changes: Vec::new(),
        residual: 0.0,
        max_outflow: 0.0,
    };
    if u.max_abs() == 0.0 {
        return Ok(which.iter().map(|&w| blank(w)).collect());
    }
    let ch = &gens.chart;
    let cut: Vec<Vec<f64>> = which
        .iter()
        .map(|w| match w {
            HorizonKind::FuturePlus => ch.x.iter().map(|&x| ch.cutoff.plus(x)).collect(),
            HorizonKind::FutureMinus => ch.x.iter().map(|&x| ch.cutoff.minus(x)).collect(),
        })
        .collect();
    let mut records: Vec<TraceRecord> = which.iter().map(|&w| blank(w)).collect();
    let eo = EvolveOptions { cfl: opts.cfl, ..Default::default() };
    let steps = (opts.t_max / opts.checkpoint).floor() as usize;
    let mut state = u.clone();
    let mut t_prev = 0.0;
    let mut first = true;
    for k in 1..=steps {
        let t = k as f64 * opts.checkpoint;
        state = evolve(&state, t - t_prev, Generator::Full, gens, &EvolveOptions { check_guard: first, ..eo })?;
        first = false;
        t_prev = t;
        for (i, (w, rec)) in which.iter().zip(records.iter_mut()).enumerate() {
            let kind = match w {
                HorizonKind::FuturePlus => TransportKind::WPlus,
                HorizonKind::FutureMinus => TransportKind::WMinus,
            };
            let mut pulled = gens.zero_state();
            for q in 0..gens.n_modes {
                let cutted: Vec<C64> = state.mode0(q).iter().zip(&cut[i]).map(|(a, c)| a * c).collect();
                let (moved, removed) = exact_transport_outflow(&cutted, -t, kind, gens)?;
                rec.max_outflow = rec.max_outflow.max(removed);
                pulled.mode0_mut(q).copy_from_slice(&moved);
            }
            let prof = first_component_profile(&pulled, *w, gens);
            if k > 1 {
                let peak = prof.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
                let change = prof.values.iter().zip(&rec.profile.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                rec.changes.push((t, change / peak));
            }
            rec.profile = prof;
        }
    }
    for rec in records.iter_mut() {
        let tail = (rec.changes.len() / 10).max(1);
        rec.residual = rec.changes.iter().rev().take(tail).map(|c| c.1).fold(0.0, f64::max);
        if rec.changes.is_empty() || rec.residual > opts.tol {
            return Err(Error::NoStabilization { residual: rec.residual, tol: opts.tol });
        }
    }
    Ok(records)
}

/// `W(𝓕₋p₋, 𝓕₊p₊)`: Cauchy data whose horizon traces are the given profiles.
pub fn goursat_solve(
    p_minus: &HorizonProfile,
    p_plus: &HorizonProfile,
    t_max: f64,
    tol: f64,
    gens: &GeneratorSet,
) -> Result<FieldState> {
    goursat_solve_with(p_minus, p_plus, &ScatterOptions::new(t_max, tol), gens)
}

pub fn goursat_solve_with(
    p_minus: &HorizonProfile,
    p_plus: &HorizonProfile,
    opts: &ScatterOptions,
    gens: &GeneratorSet,
) -> Result<FieldState> {
    if p_minus.which != HorizonKind::FutureMinus || p_plus.which != HorizonKind::FuturePlus {
        return Err(Error::Shape("goursat_solve expects (future minus, future plus) profiles".into()));
    }
    let lm = lift_profile(p_minus, gens)?;
    let lp = lift_profile(p_plus, gens)?;
    Ok(direct_wave_ops(&[(Side::Minus, &lm), (Side::Plus, &lp)], opts, gens)?.state)
}
