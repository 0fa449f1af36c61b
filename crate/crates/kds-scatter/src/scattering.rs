//! Inverse and direct wave operators, glued `Ω`/`W`, and convergence diagnostics.
//!
//! `Ω_{T,±}u` is the limit of `e^{-itḢ_{T,±}} i±² e^{itḢ} u`. The full flow is
//! advanced once with RK4; at each checkpoint the cut-off state is made admissible
//! and pulled back exactly by the Kirchhoff formula.
//!
//! `W_{T,±}p` is the limit of `e^{-itḢ} i±² e^{itḢ_{T,±}} p`. Its Cauchy differences
//! are measured at the forward time, `‖i±² F(t_{k+1}) - e^{iΔḢ} i±² F(t_k)‖`, and a
//! single backward RK4 run from the declared time produces the result.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve, evolve_observed, EvolveOptions, DEFAULT_CFL};
use crate::field::FieldState;
use crate::operators::{Generator, GeneratorSet, NormKind, Side};
use crate::transport::{kirchhoff_evolve_outflow, make_admissible};

/// Which power of the cutoff is applied before the pullback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffPower {
    Single,
    Squared,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterOptions {
    pub t_max: f64,
    pub tol: f64,
    /// Spacing of the Cauchy checkpoints.
    pub checkpoint: f64,
    pub cfl: f64,
    pub power: CutoffPower,
    /// Keep going to `t_max` after convergence is declared.
    pub run_to_t_max: bool,
}

impl ScatterOptions {
    pub fn new(t_max: f64, tol: f64) -> Self {
        Self { t_max, tol, checkpoint: 1.0, cfl: DEFAULT_CFL, power: CutoffPower::Squared, run_to_t_max: false }
    }

    fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { cfl: self.cfl, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CauchyPoint {
    pub t: f64,
    /// Relative Cauchy difference to the previous checkpoint.
    pub diff: f64,
    /// Norm of the current iterate.
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct WaveOpRecord {
    pub side: Side,
    pub limit: FieldState,
    pub history: Vec<CauchyPoint>,
    /// Time at which convergence was declared.
    pub converged_at: Option<f64>,
    /// Largest `L²` admissibility correction applied along the way.
    pub max_correction: f64,
    /// Largest `L²` mass removed by the outflow closure.
    pub max_outflow: f64,
}

impl WaveOpRecord {
    fn trivial(side: Side, u: &FieldState) -> Self {
        Self {
            side,
            limit: FieldState::zeros_like(u),
            history: Vec::new(),
            converged_at: Some(0.0),
            max_correction: 0.0,
            max_outflow: 0.0,
        }
    }

    /// Exponential decay rate of the Cauchy differences, fitted after the first quarter
    /// of the history and up to the declared convergence time.
    pub fn fitted_rate(&self) -> Option<f64> {
        let end = match self.converged_at {
            Some(t) => self.history.iter().take_while(|p| p.t <= t).count(),
            None => self.history.len(),
        };
        fit_decay_rate(&self.history[..end], 0.25)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,cauchy_difference,norm")?;
        for p in &self.history {
            writeln!(out, "{:.6},{:.12e},{:.12e}", p.t, p.diff, p.norm)?;
        }
        Ok(())
    }
}

/// Least-squares slope of `-ln(diff)` against `t` over the points after `skip_fraction`
/// of the history, ignoring zero differences.
pub fn fit_decay_rate(history: &[CauchyPoint], skip_fraction: f64) -> Option<f64> {
    let start = (history.len() as f64 * skip_fraction).floor() as usize;
    let pts: Vec<(f64, f64)> =
        history[start..].iter().filter(|p| p.diff > 0.0).map(|p| (p.t, p.diff.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(-sxy / sxx)
}

/// Geometric-tail test: ratio fitted on the last five differences below 0.95 and
/// projected remaining sum below `tol`. Returns the ratio when it can be fitted.
fn tail_test(history: &[CauchyPoint], tol: f64) -> (bool, Option<f64>) {
    if history.len() < 5 {
        return (false, None);
    }
    let last = &history[history.len() - 5..];
    if last.iter().any(|p| p.diff == 0.0) {
        return (last[4].diff == 0.0, Some(0.0));
    }
    let xs: Vec<f64> = (0..5).map(|k| k as f64).collect();
    let ys: Vec<f64> = last.iter().map(|p| p.diff.ln()).collect();
    let slope = {
        let my = ys.iter().sum::<f64>() / 5.0;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - 2.0) * (y - my)).sum();
        sxy / 10.0
    };
    let rho = slope.exp();
    let tail = last[4].diff * rho / (1.0 - rho);
    (rho < 0.95 && tail < tol, Some(rho))
}

fn cutoff_profile(gens: &GeneratorSet, side: Side, power: CutoffPower) -> Vec<f64> {
    let ch = &gens.chart;
    ch.x.iter()
        .map(|&x| {
            let i = match side {
                Side::Plus => ch.cutoff.plus(x),
                Side::Minus => ch.cutoff.minus(x),
            };
            match power {
                CutoffPower::Single => i,
                CutoffPower::Squared => i * i,
            }
        })
        .collect()
}

fn no_convergence(history: &[CauchyPoint], t_max: f64, tol: f64) -> Error {
    let tail = history.last().map(|p| p.diff).unwrap_or(f64::NAN);
    let rate = fit_decay_rate(history, 0.5).unwrap_or(f64::NAN);
    Error::NoConvergence { t_max, tail, tol, rate }
}

fn checkpoints(opts: &ScatterOptions) -> Vec<f64> {
    let n = (opts.t_max / opts.checkpoint).floor() as usize;
    (1..=n).map(|k| k as f64 * opts.checkpoint).collect()
}

/// `Ω_{T,±} u` with its Cauchy history.
pub fn inverse_wave_op(u: &FieldState, side: Side, t_max: f64, tol: f64, gens: &GeneratorSet) -> Result<WaveOpRecord> {
    inverse_wave_op_with(u, side, &ScatterOptions::new(t_max, tol), gens)
}

pub fn inverse_wave_op_with(
    u: &FieldState,
    side: Side,
    opts: &ScatterOptions,
    gens: &GeneratorSet,
) -> Result<WaveOpRecord> {
    let mut records = inverse_wave_ops(u, &[side], opts, gens)?;
    Ok(records.remove(0))
}

/// Both inverse wave operators from a single forward run.
///
/// Every requested side shares the checkpoint times; the run stops once all have converged.
pub fn inverse_wave_ops(
    u: &FieldState,
    sides: &[Side],
    opts: &ScatterOptions,
    gens: &GeneratorSet,
) -> Result<Vec<WaveOpRecord>> {
    gens.check_state(u)?;
    if u.max_abs() == 0.0 {
        return Ok(sides.iter().map(|&s| WaveOpRecord::trivial(s, u)).collect());
    }
    let scale = gens.energy_norm(u, NormKind::FullHom)?.max(f64::MIN_POSITIVE);
    let cut: Vec<Vec<f64>> = sides.iter().map(|&s| cutoff_profile(gens, s, opts.power)).collect();
    let mut records: Vec<WaveOpRecord> = sides
        .iter()
        .map(|&s| WaveOpRecord {
            side: s,
            limit: FieldState::zeros_like(u),
            history: Vec::new(),
            converged_at: None,
            max_correction: 0.0,
            max_outflow: 0.0,
        })
        .collect();
    let eo = opts.evolve_options();
    let mut state = u.clone();
    let mut t_prev = 0.0;
    for t in checkpoints(opts) {
        state = evolve(&state, t - t_prev, Generator::Full, gens, &EvolveOptions { check_guard: false, ..eo })?;
        t_prev = t;
        for (k, rec) in records.iter_mut().enumerate() {
            if rec.converged_at.is_some() && !opts.run_to_t_max {
                continue;
            }
            let mut cutted = state.clone();
            cutted.mul_profile(&cut[k]);
            let (adm, corr) = make_admissible(&cutted, rec.side, gens)?;
            let (pulled, removed) = kirchhoff_evolve_outflow(&adm, -t, rec.side, gens)?;
            rec.max_correction = rec.max_correction.max(corr);
            rec.max_outflow = rec.max_outflow.max(removed);
            let kind = NormKind::t_side(rec.side);
            let norm = gens.energy_norm(&pulled, kind)?;
            if t > opts.checkpoint {
                let diff = gens.energy_norm(&pulled.sub(&rec.limit), kind)? / scale;
                rec.history.push(CauchyPoint { t, diff, norm: norm / scale });
                if rec.converged_at.is_none() && tail_test(&rec.history, opts.tol).0 {
                    rec.converged_at = Some(t);
                }
            }
            rec.limit = pulled;
        }
        if !opts.run_to_t_max && records.iter().all(|r| r.converged_at.is_some()) {
            break;
        }
    }
    if let Some(r) = records.iter().find(|r| r.converged_at.is_none()) {
        return Err(no_convergence(&r.history, opts.t_max, opts.tol));
    }
    Ok(records)
}

/// Result of a direct wave operator.
#[derive(Clone, Debug)]
pub struct DirectRecord {
    pub state: FieldState,
    pub history: Vec<CauchyPoint>,
    pub converged_at: Option<f64>,
    /// Largest `L²` mass removed by the outflow closure.
    pub max_outflow: f64,
}

/// `W_{T,±} p`.
pub fn direct_wave_op(profile: &FieldState, side: Side, t_max: f64, tol: f64, gens: &GeneratorSet) -> Result<FieldState> {
    Ok(direct_wave_ops(&[(side, profile)], &ScatterOptions::new(t_max, tol), gens)?.state)
}

/// `Σ W_{T,s} p_s` over the given `(side, profile)` pairs, sharing one time `t`.
pub fn direct_wave_ops(profiles: &[(Side, &FieldState)], opts: &ScatterOptions, gens: &GeneratorSet) -> Result<DirectRecord> {
    let Some((_, first)) = profiles.first() else {
        return Err(Error::Shape("no profiles given".into()));
    };
    for (_, p) in profiles {
        gens.check_state(p)?;
    }
    if profiles.iter().all(|(_, p)| p.max_abs() == 0.0) {
        return Ok(DirectRecord { state: FieldState::zeros_like(first), history: Vec::new(), converged_at: Some(0.0), max_outflow: 0.0 });
    }
    let mut scale = 0.0;
    for (s, p) in profiles {
        scale += gens.energy_norm(p, NormKind::t_side(*s))?;
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let cut: Vec<Vec<f64>> = profiles.iter().map(|(s, _)| cutoff_profile(gens, *s, opts.power)).collect();
    let eo = EvolveOptions { check_guard: false, ..opts.evolve_options() };
    let mut max_outflow: f64 = 0.0;
    let mut push = |t: f64| -> Result<FieldState> {
        let mut acc = FieldState::zeros_like(first);
        for (k, (s, p)) in profiles.iter().enumerate() {
            let (mut v, removed) = kirchhoff_evolve_outflow(p, t, *s, gens)?;
            max_outflow = max_outflow.max(removed);
            v.mul_profile(&cut[k]);
            acc = acc.add(&v);
        }
        Ok(acc)
    };
    let mut history = Vec::new();
    let mut prev = push(0.0)?;
    let mut converged_at = None;
    let mut t_prev = 0.0;
    let mut last = prev.clone();
    let mut t_last = 0.0;
    for t in checkpoints(opts) {
        let current = push(t)?;
        let carried = evolve(&prev, t - t_prev, Generator::Full, gens, &eo)?;
        let diff = gens.energy_norm(&current.sub(&carried), NormKind::FullHom)? / scale;
        let norm = gens.energy_norm(&current, NormKind::FullHom)? / scale;
        history.push(CauchyPoint { t, diff, norm });
        prev = current;
        t_prev = t;
        last = prev.clone();
        t_last = t;
        if converged_at.is_none() && tail_test(&history, opts.tol).0 {
            converged_at = Some(t);
            if !opts.run_to_t_max {
                break;
            }
        }
    }
    if converged_at.is_none() {
        return Err(no_convergence(&history, opts.t_max, opts.tol));
    }
    let state = evolve(&last, -t_last, Generator::Full, gens, &eo)?;
    Ok(DirectRecord { state, history, converged_at, max_outflow })
}

/// `(Ω₋u, Ω₊u)`.
pub fn global_omega(u: &FieldState, t_max: f64, tol: f64, gens: &GeneratorSet) -> Result<(FieldState, FieldState)> {
    let r = inverse_wave_ops(u, &[Side::Minus, Side::Plus], &ScatterOptions::new(t_max, tol), gens)?;
    Ok((r[0].limit.clone(), r[1].limit.clone()))
}

/// `W(p₋, p₊) = W_{T,-}p₋ + W_{T,+}p₊`.
pub fn global_w(pair: (&FieldState, &FieldState), t_max: f64, tol: f64, gens: &GeneratorSet) -> Result<FieldState> {
    let opts = ScatterOptions::new(t_max, tol);
    Ok(direct_wave_ops(&[(Side::Minus, pair.0), (Side::Plus, pair.1)], &opts, gens)?.state)
}

/// `e^{-itḢ_{+∞}} i+ e^{itḢ} u` at a fixed `t`: a state of the range of `Ω_{+∞}` up to
/// the convergence error at `t`.
pub fn omega_inf_plus_state(u: &FieldState, t: f64, gens: &GeneratorSet, opts: &EvolveOptions) -> Result<FieldState> {
    let mut v = evolve(u, t, Generator::Full, gens, opts)?;
    v.mul_profile(&cutoff_profile(gens, Side::Plus, CutoffPower::Single));
    evolve(&v, -t, Generator::InfPlus, gens, &EvolveOptions { check_guard: false, ..*opts })
}

/// `max ‖i₋ e^{itḢ_{+∞}} u‖_{inf_plus}` over the second half of `[0, t_max]`.
pub fn s_diagnostic(u: &FieldState, t_max: f64, gens: &GeneratorSet) -> Result<f64> {
    gens.check_state(u)?;
    if u.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let i_minus = cutoff_profile(gens, Side::Minus, CutoffPower::Single);
    let mut worst: f64 = 0.0;
    let mut err = None;
    let opts = EvolveOptions { check_guard: false, ..Default::default() };
    evolve_observed(u, t_max, Generator::InfPlus, gens, &opts, |_, t, st| {
        if t >= 0.5 * t_max && err.is_none() {
            let mut v = st.clone();
            v.mul_profile(&i_minus);
            match gens.energy_norm(&v, NormKind::InfPlus) {
                Ok(n) => worst = worst.max(n),
                Err(e) => err = Some(e),
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

/// `‖e^{-itḢ}i₋²e^{itḢ}u + e^{-itḢ}i₊²e^{itḢ}u - u‖ / ‖u‖` in the inhomogeneous norm.
pub fn partition_defect(u: &FieldState, t: f64, gens: &GeneratorSet, opts: &EvolveOptions) -> Result<f64> {
    let v = evolve(u, t, Generator::Full, gens, opts)?;
    let back = EvolveOptions { check_guard: false, ..*opts };
    let mut sum = FieldState::zeros_like(u);
    for side in [Side::Minus, Side::Plus] {
        let mut c = v.clone();
        c.mul_profile(&cutoff_profile(gens, side, CutoffPower::Squared));
        sum = sum.add(&evolve(&c, -t, Generator::Full, gens, &back)?);
    }
    let n = gens.energy_norm(u, NormKind::FullInhom)?;
    Ok(gens.energy_norm(&sum.sub(u), NormKind::FullInhom)? / n.max(f64::MIN_POSITIVE))
}
