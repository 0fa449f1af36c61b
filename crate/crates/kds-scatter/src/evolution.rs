//! Method-of-lines RK4 for `∂t V = i H V`.

use crate::error::{Error, Result};
use crate::field::{norm_sq, FieldState, C64};
use crate::operators::{Generator, GeneratorSet};

pub const DEFAULT_CFL: f64 = 0.4;

/// Fraction of the grid on each side that initial data must leave empty.
pub const GUARD_FRACTION: f64 = 0.125;

/// `Δt = c_CFL Δx`; all generators have unit characteristic speed in `x`.
pub fn cfl_max_dt(gens: &GeneratorSet, cfl: f64) -> f64 {
    cfl * gens.dx
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub cfl: f64,
    /// Reject data that is not negligible on the outer guard bands.
    pub check_guard: bool,
    pub blowup_factor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { cfl: DEFAULT_CFL, check_guard: true, blowup_factor: 1e6 }
    }
}

pub fn check_guard_band(u: &FieldState) -> Result<()> {
    let scale = u.max_abs();
    let outer = u.max_abs_outer(GUARD_FRACTION);
    if outer > 1e-14 * scale.max(1e-300) && outer > 0.0 {
        return Err(Error::Grid(format!(
            "data reaches the guard band: |u| = {outer:.3e} on the outer eighth (max {scale:.3e})"
        )));
    }
    Ok(())
}

/// Number of RK4 steps and the signed step used to cover a duration `t`.
pub fn step_plan(gens: &GeneratorSet, t: f64, cfl: f64) -> (usize, f64) {
    let dt_max = cfl_max_dt(gens, cfl);
    let steps = (t.abs() / dt_max - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return (0, 0.0);
    }
    (steps, t / steps as f64)
}

pub fn rk4_step(gens: &GeneratorSet, gen: Generator, u: &FieldState, dt: f64) -> FieldState {
    let k1 = gens.rhs(gen, u);
    let mut tmp = u.clone();
    tmp.axpy(C64::new(0.5 * dt, 0.0), &k1);
    let k2 = gens.rhs(gen, &tmp);
    tmp.clone_from(u);
    tmp.axpy(C64::new(0.5 * dt, 0.0), &k2);
    let k3 = gens.rhs(gen, &tmp);
    tmp.clone_from(u);
    tmp.axpy(C64::new(dt, 0.0), &k3);
    let k4 = gens.rhs(gen, &tmp);
    let mut out = u.clone();
    out.axpy(C64::new(dt / 6.0, 0.0), &k1);
    out.axpy(C64::new(dt / 3.0, 0.0), &k2);
    out.axpy(C64::new(dt / 3.0, 0.0), &k3);
    out.axpy(C64::new(dt / 6.0, 0.0), &k4);
    out
}

fn raw_norm(u: &FieldState, dx: f64) -> f64 {
    (norm_sq(&u.u0, dx) + norm_sq(&u.u1, dx)).sqrt()
}

/// Evolve by a signed duration `t`, calling `observe(step, time, state)` after every step.
pub fn evolve_observed<F: FnMut(usize, f64, &FieldState)>(
    u: &FieldState,
    t: f64,
    gen: Generator,
    gens: &GeneratorSet,
    opts: &EvolveOptions,
    mut observe: F,
) -> Result<FieldState> {
    gens.check_state(u)?;
    if opts.check_guard {
        check_guard_band(u)?;
    }
    let (steps, dt) = step_plan(gens, t, opts.cfl);
    let n0 = raw_norm(u, gens.dx);
    let mut state = u.clone();
    for s in 1..=steps {
        state = rk4_step(gens, gen, &state, dt);
        if s % 32 == 0 || s == steps {
            let n = raw_norm(&state, gens.dx);
            if !n.is_finite() || (n0 > 0.0 && n > opts.blowup_factor * n0) {
                return Err(Error::Blowup { t: s as f64 * dt, ratio: n / n0 });
            }
        }
        observe(s, s as f64 * dt, &state);
    }
    Ok(state)
}

pub fn evolve(u: &FieldState, t: f64, gen: Generator, gens: &GeneratorSet, opts: &EvolveOptions) -> Result<FieldState> {
    evolve_observed(u, t, gen, gens, opts, |_, _, _| {})
}

/// Norm history `(t, norm)` recorded every `every` steps.
pub fn evolve_with_history(
    u: &FieldState,
    t: f64,
    gen: Generator,
    gens: &GeneratorSet,
    opts: &EvolveOptions,
    kind: crate::operators::NormKind,
    every: usize,
) -> Result<(FieldState, Vec<(f64, f64)>)> {
    let mut hist = vec![(0.0, gens.energy_norm(u, kind)?)];
    let mut err = None;
    let out = evolve_observed(u, t, gen, gens, opts, |s, time, st| {
        if err.is_none() && s % every.max(1) == 0 {
            match gens.energy_norm(st, kind) {
                Ok(n) => hist.push((time, n)),
                Err(e) => err = Some(e),
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok((out, hist))
}
