//! Exact comparison dynamics: transport along principal null directions, the
//! Kirchhoff formula for `e^{itH_{T,±}}` and the left/right split.
//!
//! Everything is done in the gauge `F = e^{iL} f`. There `w+ = D + il+` and
//! `w̃- = -D + il+`, so both propagators are `e^{∓tD}` times the constant phase
//! `e^{-il+ t}`, and `e^{∓tD}` is applied exactly through the stencil's symbol.
//! Minus-side operations run in the mirrored frame.

use crate::error::{Error, Result};
use crate::field::{FieldState, C64, ZERO};
use crate::geometry::Cutoff;
use crate::operators::{GeneratorSet, NormKind, Side, SideFrame};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Width of the smooth step that carries a non-zero phased total.
const STEP_WIDTH: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportKind {
    /// `e^{-t w+}`: outgoing, moves right.
    WPlus,
    /// `e^{-t w̃-}`: moves left, commutes with `w+`.
    WTildeMinus,
    /// `e^{-t w-}`: incoming, moves left.
    WMinus,
    /// `e^{-t w̃+}`: moves right, commutes with `w-`.
    WTildePlus,
}

impl TransportKind {
    fn side(self) -> Side {
        match self {
            TransportKind::WPlus | TransportKind::WTildeMinus => Side::Plus,
            TransportKind::WMinus | TransportKind::WTildePlus => Side::Minus,
        }
    }

    /// Direction of motion in the side frame.
    fn forward(self) -> bool {
        matches!(self, TransportKind::WPlus | TransportKind::WMinus)
    }
}

/// Index range holding everything above `1e-14` of the peak, if any.
fn support(f: &[C64]) -> Option<(usize, usize)> {
    let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let cut = 1e-14 * peak;
    let lo = f.iter().position(|v| v.norm() > cut)?;
    let hi = f.iter().rposition(|v| v.norm() > cut)?;
    Some((lo, hi))
}

/// `F(y - s)` under the exact semi-discrete transport `e^{-sD}`.
///
/// Fails if the support would be carried past either end of the grid.
pub fn shift_profile(f: &[C64], s: f64, gens: &GeneratorSet) -> Result<Vec<C64>> {
    let Some((lo, hi)) = support(f) else {
        return Ok(f.to_vec());
    };
    let n = f.len() as f64;
    let lo_new = lo as f64 + s / gens.dx;
    let hi_new = hi as f64 + s / gens.dx;
    if lo_new < 0.0 || hi_new > n - 1.0 {
        return Err(Error::Grid(format!(
            "transport by {s:.3} moves the support [{lo}, {hi}] off the {}-node grid",
            f.len()
        )));
    }
    Ok(gens.deriv.propagate(f, -s))
}

fn gauge_in(fr: &SideFrame, f: &[C64]) -> Vec<C64> {
    f.iter().zip(&fr.gauge).map(|(a, g)| a * g).collect()
}

fn gauge_out(fr: &SideFrame, f: &[C64]) -> Vec<C64> {
    f.iter().zip(&fr.gauge).map(|(a, g)| a * g.conj()).collect()
}

/// `e^{-t w}` for one of the four first-order transports, on a single `x` profile.
pub fn exact_transport(f: &[C64], t: f64, kind: TransportKind, gens: &GeneratorSet) -> Result<Vec<C64>> {
    if f.len() != gens.n_x {
        return Err(Error::Shape(format!("profile length {} vs grid {}", f.len(), gens.n_x)));
    }
    let fr = gens.frame(kind.side());
    let g = gauge_in(fr, &fr.profile(f));
    let s = if kind.forward() { t } else { -t };
    let phase = C64::from_polar(1.0, -fr.l_ref * t);
    let out: Vec<C64> = shift_profile(&g, s, gens)?.iter().map(|v| v * phase).collect();
    Ok(fr.profile(&gauge_out(fr, &out)))
}

/// [`exact_transport`] with the outflow closure of [`kirchhoff_evolve_outflow`]; also
/// returns the removed `L²` mass.
pub fn exact_transport_outflow(
    f: &[C64],
    t: f64,
    kind: TransportKind,
    gens: &GeneratorSet,
) -> Result<(Vec<C64>, f64)> {
    if f.len() != gens.n_x {
        return Err(Error::Shape(format!("profile length {} vs grid {}", f.len(), gens.n_x)));
    }
    let fr = gens.frame(kind.side());
    let mut g = gauge_in(fr, &fr.profile(f));
    let s = if kind.forward() { t } else { -t };
    let mut removed = 0.0;
    apply_outflow(&mut g, &fr.y, s, &mut removed, gens.dx);
    let phase = C64::from_polar(1.0, -fr.l_ref * t);
    let out: Vec<C64> = shift_profile(&g, s, gens)?.iter().map(|v| v * phase).collect();
    Ok((fr.profile(&gauge_out(fr, &out)), removed.sqrt()))
}

/// The phased total `C(u) = ∫ e^{iL}(u₁ + l± u₀) dx` of each mode.
pub fn phased_integrals(u: &FieldState, side: Side, gens: &GeneratorSet) -> Result<Vec<C64>> {
    gens.check_state(u)?;
    let fr = gens.frame(side);
    let us = fr.state(u);
    Ok((0..u.n_modes)
        .map(|q| {
            let mut s = ZERO;
            for j in 0..u.n_x {
                s += fr.gauge[j] * (us.mode1(q)[j] + us.mode0(q)[j] * fr.l_ref);
            }
            s * gens.dx
        })
        .collect())
}

fn smooth_step(y: f64) -> f64 {
    0.5 * (1.0 + (y / STEP_WIDTH).tanh())
}

/// The unit step moved by `s` under the same semi-discrete transport as compact
/// profiles: `S + ∫₀^{-s} e^{σD} D S dσ`.
fn moved_step(gens: &GeneratorSet, fr: &SideFrame, s: f64) -> Result<Vec<C64>> {
    let step: Vec<C64> = fr.y.iter().map(|&y| C64::new(smooth_step(y), 0.0)).collect();
    let ds = gens.deriv.apply_clamped(&step);
    shift_profile(&ds, s, gens)?;
    let tail = gens.deriv.propagate_integral(&ds, -s);
    Ok(step.iter().zip(&tail).map(|(a, b)| a + b).collect())
}

/// Gauge-form `Ũ = W + C·S` of one mode in the side frame: `W` is compact, `S` is
/// the smooth unit step and `C` the phased total. `D Ũ = ρ` holds wherever `W` and
/// `S` are flat at the grid ends.
struct TildeParts {
    compact: Vec<C64>,
    total: C64,
}

fn tilde_parts(gens: &GeneratorSet, fr: &SideFrame, u0: &[C64], u1: &[C64]) -> TildeParts {
    let n = gens.n_x;
    let rho: Vec<C64> = (0..n).map(|j| -I * fr.gauge[j] * (u1[j] + u0[j] * fr.l_ref)).collect();
    let total: C64 = rho.iter().sum::<C64>() * gens.dx;
    let step: Vec<C64> = fr.y.iter().map(|&y| C64::new(smooth_step(y), 0.0)).collect();
    let dstep = gens.deriv.apply_clamped(&step);
    let reduced: Vec<C64> = rho.iter().zip(&dstep).map(|(r, d)| r - total * d).collect();
    let mut w = gens.deriv.pseudo_inverse(&reduced);
    let w0 = w[0];
    w.iter_mut().for_each(|v| *v -= w0);
    TildeParts { compact: w, total }
}

fn tilde_full(fr: &SideFrame, parts: &TildeParts) -> Vec<C64> {
    parts.compact.iter().zip(&fr.y).map(|(w, &y)| w + parts.total * smooth_step(y)).collect()
}

/// `ũ₁(x) = -i ∫_{-∞}^x e^{-i∫_s^x (l - l+)} (u₁ + l+ u₀)(s) ds`, all modes, `x` frame.
pub fn tilde_u1(u: &FieldState, side: Side, gens: &GeneratorSet) -> Result<Vec<C64>> {
    gens.check_state(u)?;
    let fr = gens.frame(side);
    let us = fr.state(u);
    let mut out = vec![ZERO; u.len()];
    for q in 0..u.n_modes {
        let parts = tilde_parts(gens, fr, us.mode0(q), us.mode1(q));
        let t = tilde_full(fr, &parts);
        out[q * u.n_x..(q + 1) * u.n_x].copy_from_slice(&fr.profile(&gauge_out(fr, &t)));
    }
    Ok(out)
}

/// The fixed bump `ψ` used to restore the integral condition: centred at 0, width `X_max/8`.
pub fn admissibility_bump(gens: &GeneratorSet) -> Vec<f64> {
    let w = gens.chart.x_max() / 8.0;
    gens.chart.x.iter().map(|v| (-(v / w) * (v / w)).exp()).collect()
}

/// Subtract `C_q e^{-iL} ψ / ∫ψ` from each mode of `u₁`. Returns the corrected state
/// and the `L²` size of the correction.
pub fn make_admissible(u: &FieldState, side: Side, gens: &GeneratorSet) -> Result<(FieldState, f64)> {
    let totals = phased_integrals(u, side, gens)?;
    let fr = gens.frame(side);
    let psi = admissibility_bump(gens);
    let mass: f64 = psi.iter().sum::<f64>() * gens.dx;
    let mut us = fr.state(u);
    let mut corr_sq = 0.0;
    for (q, c) in totals.iter().enumerate() {
        let coef = c / mass;
        let m1 = us.mode1_mut(q);
        for j in 0..m1.len() {
            let d = fr.gauge[j].conj() * psi[j] * coef;
            m1[j] -= d;
            corr_sq += d.norm_sqr();
        }
    }
    Ok((fr.state(&us), (corr_sq * gens.dx).sqrt()))
}

/// Rebuild `(u₀, u₁)` from right/left gauge profiles, given `D(right - left)`.
fn assemble_with(fr: &SideFrame, right: &[C64], left: &[C64], d_diff: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let n = right.len();
    let sum: Vec<C64> = (0..n).map(|j| right[j] + left[j]).collect();
    let u1_g: Vec<C64> = (0..n).map(|j| I * d_diff[j] - sum[j] * fr.l_ref).collect();
    (gauge_out(fr, &sum), gauge_out(fr, &u1_g))
}

fn assemble(gens: &GeneratorSet, fr: &SideFrame, right: &[C64], left: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let diff: Vec<C64> = right.iter().zip(left).map(|(a, b)| a - b).collect();
    assemble_with(fr, right, left, &gens.deriv.apply_clamped(&diff))
}

/// `e^{itḢ_{T,±}} u` by the Kirchhoff formula.
///
/// A non-zero phased total is carried by a smooth step, so the formula stays
/// usable on non-admissible data as long as that step stays on the grid.
pub fn kirchhoff_evolve(u: &FieldState, t: f64, side: Side, gens: &GeneratorSet) -> Result<FieldState> {
    kirchhoff_core(u, t, side, gens, None)
}

/// Room kept free at each grid end by the outflow closure.
pub const OUTFLOW_BUFFER: f64 = 4.0;

/// [`kirchhoff_evolve`] with an outflow closure: characteristic components that
/// would be carried past the grid ends are removed before transport instead of
/// raising a grid error. Also returns the `L²` size of what was removed.
pub fn kirchhoff_evolve_outflow(u: &FieldState, t: f64, side: Side, gens: &GeneratorSet) -> Result<(FieldState, f64)> {
    let mut removed = 0.0;
    let out = kirchhoff_core(u, t, side, gens, Some(&mut removed))?;
    Ok((out, removed.sqrt()))
}

/// Smooth indicator of the source points that stay `OUTFLOW_BUFFER` inside the grid
/// after moving by `s`.
fn outflow_mask(y: &[f64], s: f64) -> Vec<f64> {
    let (lo_edge, hi_edge) = (y[0], y[y.len() - 1]);
    let ramp = 4.0;
    let lo = Cutoff::new(lo_edge + OUTFLOW_BUFFER - s + ramp / 2.0, ramp);
    let hi = Cutoff::new(hi_edge - OUTFLOW_BUFFER - s - ramp / 2.0, ramp);
    y.iter().map(|&v| lo.step(v) * (1.0 - hi.step(v))).collect()
}

fn apply_outflow(f: &mut [C64], y: &[f64], s: f64, removed: &mut f64, dx: f64) {
    for (v, m) in f.iter_mut().zip(outflow_mask(y, s)) {
        if m < 1.0 {
            *removed += (*v * (1.0 - m)).norm_sqr() * dx;
            *v *= m;
        }
    }
}

fn kirchhoff_core(
    u: &FieldState,
    t: f64,
    side: Side,
    gens: &GeneratorSet,
    mut outflow: Option<&mut f64>,
) -> Result<FieldState> {
    gens.check_state(u)?;
    let fr = gens.frame(side);
    let us = fr.state(u);
    let phase = C64::from_polar(1.0, -fr.l_ref * t);
    let mut out = FieldState::zeros_like(u);
    for q in 0..u.n_modes {
        let big = gauge_in(fr, us.mode0(q));
        let parts = tilde_parts(gens, fr, us.mode0(q), us.mode1(q));
        let mut rc: Vec<C64> = big.iter().zip(&parts.compact).map(|(a, b)| (a + b) * 0.5).collect();
        let mut lc: Vec<C64> = big.iter().zip(&parts.compact).map(|(a, b)| (a - b) * 0.5).collect();
        if let Some(removed) = outflow.as_deref_mut() {
            apply_outflow(&mut rc, &fr.y, t, removed, gens.dx);
            apply_outflow(&mut lc, &fr.y, -t, removed, gens.dx);
        }
        let rc = shift_profile(&rc, t, gens)?;
        let lc = shift_profile(&lc, -t, gens)?;
        let half = parts.total * 0.5;
        let (sr, sl) = if half == ZERO {
            (vec![ZERO; u.n_x], vec![ZERO; u.n_x])
        } else {
            (moved_step(gens, fr, t)?, moved_step(gens, fr, -t)?)
        };
        let right: Vec<C64> = rc.iter().zip(&sr).map(|(v, s)| (v + half * s) * phase).collect();
        let left: Vec<C64> = lc.iter().zip(&sl).map(|(v, s)| (v - half * s) * phase).collect();
        let (a, b) = assemble(gens, fr, &right, &left);
        out.mode0_mut(q).copy_from_slice(&a);
        out.mode1_mut(q).copy_from_slice(&b);
    }
    Ok(fr.state(&out))
}

/// `u = u^l + u^r` with `u^r` in the right space and `u^l` in the left space of the side.
#[derive(Clone, Debug)]
pub struct LeftRightSplit {
    pub side: Side,
    pub u_left: FieldState,
    pub u_right: FieldState,
}

/// Size of the phased totals, relative to the `T`-norm, above which a split is refused.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

pub fn split_left_right(u: &FieldState, side: Side, gens: &GeneratorSet) -> Result<LeftRightSplit> {
    let totals = phased_integrals(u, side, gens)?;
    let worst = totals.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = gens.energy_norm(u, NormKind::t_side(side))?;
    if worst > ADMISSIBILITY_TOL * scale.max(1.0) {
        return Err(Error::Admissibility { value: worst });
    }
    let fr = gens.frame(side);
    let us = fr.state(u);
    let mut right = FieldState::zeros_like(u);
    let mut left = FieldState::zeros_like(u);
    let zero = vec![ZERO; u.n_x];
    for q in 0..u.n_modes {
        let big = gauge_in(fr, us.mode0(q));
        let parts = tilde_parts(gens, fr, us.mode0(q), us.mode1(q));
        let tilde = tilde_full(fr, &parts);
        let r: Vec<C64> = big.iter().zip(&tilde).map(|(a, b)| (a + b) * 0.5).collect();
        let l: Vec<C64> = big.iter().zip(&tilde).map(|(a, b)| (a - b) * 0.5).collect();
        let (a, b) = assemble(gens, fr, &r, &zero);
        right.mode0_mut(q).copy_from_slice(&a);
        right.mode1_mut(q).copy_from_slice(&b);
        let (a, b) = assemble(gens, fr, &zero, &l);
        left.mode0_mut(q).copy_from_slice(&a);
        left.mode1_mut(q).copy_from_slice(&b);
    }
    Ok(LeftRightSplit { side, u_left: fr.state(&left), u_right: fr.state(&right) })
}

/// The state of the right space of `side` with first component `u₀`: `u₁ = i w u₀`.
pub fn right_state(u0: &FieldState, side: Side, gens: &GeneratorSet) -> FieldState {
    membership_state(u0, side, gens, true)
}

/// The state of the left space of `side` with first component `u₀`: `u₁ = i w̃ u₀`.
pub fn left_state(u0: &FieldState, side: Side, gens: &GeneratorSet) -> FieldState {
    membership_state(u0, side, gens, false)
}

fn membership_state(u: &FieldState, side: Side, gens: &GeneratorSet, right: bool) -> FieldState {
    let fr = gens.frame(side);
    let us = fr.state(u);
    let mut out = us.clone();
    let zero = vec![ZERO; u.n_x];
    for q in 0..u.n_modes {
        let g = gauge_in(fr, us.mode0(q));
        let (a, b) = if right { assemble(gens, fr, &g, &zero) } else { assemble(gens, fr, &zero, &g) };
        out.mode0_mut(q).copy_from_slice(&a);
        out.mode1_mut(q).copy_from_slice(&b);
    }
    fr.state(&out)
}
