//! Background geometry: metric functions, horizons, the Regge-Wheeler chart
//! and the cutoffs living on it.
//!
//! The chart is built by integrating `ln(r+ - r)` (right half) and
//! `ln(r - r-)` (left half) in `x`, so the distance to each horizon keeps full
//! relative precision far out on the grid, where it falls below the spacing of
//! doubles near `r+`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// The physical constants of one De Sitter-Kerr background and the field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeParams {
    /// Cosmological constant.
    pub lambda_c: f64,
    pub mass: f64,
    pub spin: f64,
    /// Axial mode number.
    pub n: i32,
    /// Field mass squared.
    pub m2: f64,
}

impl SpacetimeParams {
    pub fn new(lambda_c: f64, mass: f64, spin: f64, n: i32, m2: f64) -> Result<Self> {
        let p = Self { lambda_c, mass, spin, n, m2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda_c, self.mass, self.spin, self.m2].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("parameters must be finite".into()));
        }
        if self.lambda_c <= 0.0 {
            return Err(Error::Config(format!("lambda_c must be > 0, got {}", self.lambda_c)));
        }
        if self.mass <= 0.0 {
            return Err(Error::Config(format!("mass must be > 0, got {}", self.mass)));
        }
        if self.m2 < 0.0 {
            return Err(Error::Config(format!("m2 must be >= 0, got {}", self.m2)));
        }
        if self.n == 0 && self.m2 <= 0.0 {
            return Err(Error::Config("n = 0 requires m2 > 0".into()));
        }
        Ok(())
    }

    /// `1 + Λa²/3`.
    pub fn lambda_factor(&self) -> f64 {
        1.0 + self.lambda_c * self.spin * self.spin / 3.0
    }

    pub fn delta_r(&self, r: f64) -> f64 {
        let a2 = self.spin * self.spin;
        (1.0 - self.lambda_c * r * r / 3.0) * (r * r + a2) - 2.0 * self.mass * r
    }

    pub fn delta_r_prime(&self, r: f64) -> f64 {
        let a2 = self.spin * self.spin;
        -2.0 * self.lambda_c * r / 3.0 * (r * r + a2) + (1.0 - self.lambda_c * r * r / 3.0) * 2.0 * r
            - 2.0 * self.mass
    }

    pub fn delta_theta(&self, cos_theta: f64) -> f64 {
        1.0 + self.lambda_c * self.spin * self.spin / 3.0 * cos_theta * cos_theta
    }

    /// `l(r) = a n / (a² + r²)`.
    pub fn l_of_r(&self, r: f64) -> f64 {
        self.spin * self.n as f64 / (self.spin * self.spin + r * r)
    }
}

/// The scalar metric functions at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricFunctions {
    pub delta_r: f64,
    pub delta_theta: f64,
    pub rho2: f64,
    pub sigma2: f64,
    pub lambda: f64,
}

pub fn eval_metric_functions(p: &SpacetimeParams, r: f64, theta: f64) -> Result<MetricFunctions> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("theta must lie in (0, pi), got {theta}")));
    }
    let a2 = p.spin * p.spin;
    let (s, c) = theta.sin_cos();
    let delta_r = p.delta_r(r);
    let delta_theta = p.delta_theta(c);
    let rho2 = r * r + a2 * c * c;
    let sigma2 = (r * r + a2).powi(2) * delta_theta - a2 * delta_r * s * s;
    Ok(MetricFunctions { delta_r, delta_theta, rho2, sigma2, lambda: p.lambda_factor() })
}

/// Horizon radii with the factorisation `Δr = α(r) (r - r-)(r+ - r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizons {
    pub r_minus: f64,
    pub r_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    /// `Λ/3` and the coefficients of the remaining quadratic factor `r² + b r + c`.
    scale: f64,
    quad_b: f64,
    quad_c: f64,
}

impl Horizons {
    /// `α(r) = Δr / ((r - r-)(r+ - r))`, smooth and positive on `[r-, r+]`.
    pub fn alpha(&self, r: f64) -> f64 {
        self.scale * (r * r + self.quad_b * r + self.quad_c)
    }

    /// `Δr` evaluated from the horizon distances, accurate near either root.
    pub fn delta_r_from(&self, r: f64, s_minus: f64, s_plus: f64) -> f64 {
        self.alpha(r) * s_minus * s_plus
    }
}

/// Locate `r- < r+`, the two positive simple roots of `Δr` bounding its positive region.
pub fn find_horizons(p: &SpacetimeParams) -> Result<Horizons> {
    p.validate()?;
    let r_hi = (3.0 / p.lambda_c).sqrt();
    let samples = 20_000;
    let mut brackets: Vec<(f64, f64, bool)> = Vec::new();
    let mut prev_r = r_hi * 1e-9;
    let mut prev_v = p.delta_r(prev_r);
    for k in 1..=samples {
        let r = r_hi * k as f64 / samples as f64;
        let v = p.delta_r(r);
        if (prev_v > 0.0) != (v > 0.0) {
            brackets.push((prev_r, r, v > 0.0));
        }
        prev_r = r;
        prev_v = v;
    }
    let Some(&(pa, pb, rising_p)) = brackets.last() else {
        return Err(Error::NoHorizonGap("Δr has no sign change on (0, sqrt(3/Λ))".into()));
    };
    if rising_p || brackets.len() < 2 {
        return Err(Error::NoHorizonGap(format!(
            "Δr has {} sign change(s); need a positive interval bounded by two positive roots",
            brackets.len()
        )));
    }
    let (ma, mb, rising_m) = brackets[brackets.len() - 2];
    if !rising_m {
        return Err(Error::NoHorizonGap("root ordering of Δr is broken".into()));
    }
    let r_plus = refine_root(p, pa, pb);
    let r_minus = refine_root(p, ma, mb);
    if !(r_minus > 0.0 && r_minus < r_plus) {
        return Err(Error::NoHorizonGap(format!("bad root order r- = {r_minus}, r+ = {r_plus}")));
    }
    let dp = p.delta_r_prime(r_plus);
    let dm = p.delta_r_prime(r_minus);
    let scale_d = 1.0 + p.mass;
    if dp.abs() < 1e-9 * scale_d || dm.abs() < 1e-9 * scale_d {
        return Err(Error::NoHorizonGap("horizon roots are not simple".into()));
    }

    // Δr = -(Λ/3)(r - r-)(r - r+)(r² + b r + c).
    let s = r_minus + r_plus;
    let prod = r_minus * r_plus;
    let e2 = -(3.0 / p.lambda_c) * (1.0 - p.lambda_c * p.spin * p.spin / 3.0);
    let quad_b = s;
    let quad_c = e2 + s * quad_b - prod;
    let lam = p.lambda_factor();
    let a2 = p.spin * p.spin;
    let mut h = Horizons {
        r_minus,
        r_plus,
        kappa_minus: 0.0,
        kappa_plus: 0.0,
        scale: p.lambda_c / 3.0,
        quad_b,
        quad_c,
    };
    if h.alpha(r_minus) <= 0.0 || h.alpha(r_plus) <= 0.0 {
        return Err(Error::NoHorizonGap("Δr factorisation is not positive on [r-, r+]".into()));
    }
    h.kappa_plus = dp.abs() / (lam * (r_plus * r_plus + a2));
    h.kappa_minus = dm.abs() / (lam * (r_minus * r_minus + a2));
    Ok(h)
}

fn refine_root(p: &SpacetimeParams, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = p.delta_r(a) > 0.0;
    while (b - a) > 1e-13 * b.abs() {
        let m = 0.5 * (a + b);
        if (p.delta_r(m) > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    let mut r = 0.5 * (a + b);
    for _ in 0..3 {
        let d = p.delta_r_prime(r);
        let next = r - p.delta_r(r) / d;
        if next.is_finite() && (next - r).abs() < 1e-10 * r {
            r = next;
        }
    }
    r
}

/// Smooth partition `i+² + i-² = 1`, with `i+ = 1` to the right of the transition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub center: f64,
    pub width: f64,
}

/// Values and the first two `x`-derivatives of a cutoff.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutoffJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Cutoff {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    /// The same partition seen from `y = -x`: its `plus` is the original `minus`.
    pub fn mirrored(&self) -> Self {
        Self { center: -self.center, width: self.width }
    }

    fn tau(&self, x: f64) -> f64 {
        (x - self.center) / self.width + 0.5
    }

    /// `i+²`, a C∞ smoothstep built from `exp(-1/t)` splices.
    pub fn step(&self, x: f64) -> f64 {
        let t = self.tau(x);
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            let e = 1.0 / t - 1.0 / (1.0 - t);
            if e > 700.0 {
                0.0
            } else {
                1.0 / (1.0 + e.exp())
            }
        }
    }

    pub fn plus(&self, x: f64) -> f64 {
        self.step(x).sqrt()
    }

    pub fn minus(&self, x: f64) -> f64 {
        self.mirrored().plus(-x)
    }

    /// `i+` and its derivatives in `x`.
    pub fn plus_jet(&self, x: f64) -> CutoffJet {
        let t = self.tau(x);
        if t <= 0.0 {
            return CutoffJet::default();
        }
        if t >= 1.0 {
            return CutoffJet { value: 1.0, d1: 0.0, d2: 0.0 };
        }
        let e = 1.0 / t - 1.0 / (1.0 - t);
        if e > 700.0 {
            return CutoffJet::default();
        }
        let s = 1.0 / (1.0 + e.exp());
        let one_minus_s = {
            let big = (-e).exp();
            1.0 / (1.0 + big)
        };
        let e1 = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
        let e2 = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
        let i = s.sqrt();
        let i1 = -0.5 * i * one_minus_s * e1;
        let i2 = -0.5 * (i1 * one_minus_s * e1 + i * s * one_minus_s * e1 * e1 + i * one_minus_s * e2);
        let w = self.width;
        CutoffJet { value: i, d1: i1 / w, d2: i2 / (w * w) }
    }

    pub fn minus_jet(&self, x: f64) -> CutoffJet {
        let j = self.mirrored().plus_jet(-x);
        CutoffJet { value: j.value, d1: -j.d1, d2: j.d2 }
    }
}

/// A point of the open block `(r-, r+)` with both horizon distances kept exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialPoint {
    pub x: f64,
    pub r: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    /// `A(r(x))`.
    pub a_phase: f64,
}

/// Tabulated Regge-Wheeler chart on a uniform, mirror-symmetric `x` grid.
#[derive(Clone, Debug)]
pub struct RadialChart {
    pub params: SpacetimeParams,
    pub horizons: Horizons,
    pub r0: f64,
    pub dx: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub s_plus: Vec<f64>,
    pub delta_r: Vec<f64>,
    pub l: Vec<f64>,
    /// `∂x l`.
    pub dl: Vec<f64>,
    pub l_plus: f64,
    pub l_minus: f64,
    pub a_of_x: Vec<f64>,
    pub cutoff: Cutoff,
    pub i_plus: Vec<f64>,
    pub i_minus: Vec<f64>,
    pub w_weight: Vec<f64>,
    pub q_weight: Vec<f64>,
}

const ODE_STEP: f64 = 1.0 / 128.0;

impl RadialChart {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn kappa_plus(&self) -> f64 {
        self.horizons.kappa_plus
    }

    pub fn kappa_minus(&self) -> f64 {
        self.horizons.kappa_minus
    }

    /// `T(r)` at every node; it equals `x` by construction of the chart.
    pub fn t_of_r(&self) -> &[f64] {
        &self.x
    }

    /// Integrate the chart ODE from the base point to an arbitrary `x`.
    pub fn point_at(&self, x: f64) -> RadialPoint {
        let mut st = Stepper::new(&self.params, &self.horizons, self.r0, x >= 0.0);
        st.advance_to(x);
        st.point()
    }

    /// `T(r) = ∫ λ(r²+a²)/Δr dr` from `r0`, by quadrature in a logarithmic variable.
    pub fn x_of_r(&self, r: f64) -> Result<f64> {
        self.radial_integral(r, |_, f| f)
    }

    /// `A(r) = ∫ λa/Δr dr` from `r0`.
    pub fn a_of_r(&self, r: f64) -> Result<f64> {
        let a = self.params.spin;
        self.radial_integral(r, move |_, _| a)
    }

    fn radial_integral<G: Fn(f64, f64) -> f64>(&self, r: f64, numer: G) -> Result<f64> {
        let h = &self.horizons;
        if !(r > h.r_minus && r < h.r_plus) {
            return Err(Error::Domain(format!("r = {r} outside (r-, r+) = ({}, {})", h.r_minus, h.r_plus)));
        }
        let lam = self.params.lambda_factor();
        let a2 = self.params.spin * self.params.spin;
        let (rm, rp, r0) = (h.r_minus, h.r_plus, self.r0);
        if r >= r0 {
            // s = r+ - e^{-u}
            let u0 = -(rp - r0).ln();
            let u1 = -(rp - r).ln();
            Ok(quadrature::integrate(
                |u| {
                    let sp = (-u).exp();
                    let s = rp - sp;
                    let f = s * s + a2;
                    lam * numer(s, f) / (h.alpha(s) * (s - rm))
                },
                u0,
                u1,
                0.25,
            ))
        } else {
            // s = r- + e^{-v}
            let v0 = -(r0 - rm).ln();
            let v1 = -(r - rm).ln();
            Ok(quadrature::integrate(
                |v| {
                    let sm = (-v).exp();
                    let s = rm + sm;
                    let f = s * s + a2;
                    -lam * numer(s, f) / (h.alpha(s) * (rp - s))
                },
                v0,
                v1,
                0.25,
            ))
        }
    }

    /// Least-squares slopes of `ln(r+ - r)` over the last quarter and of
    /// `ln(r - r-)` over the first quarter, returned as `(κ+, κ-)` estimates.
    pub fn fitted_kappas(&self) -> (f64, f64) {
        let n = self.len();
        let q = n / 4;
        let right: Vec<(f64, f64)> = (n - q..n).map(|j| (self.x[j], self.s_plus[j].ln())).collect();
        let left: Vec<(f64, f64)> = (0..q).map(|j| (self.x[j], self.s_minus[j].ln())).collect();
        (-slope(&right), slope(&left))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,r,delta_r,l,A,i_plus,i_minus,w")?;
        for j in 0..self.len() {
            writeln!(
                out,
                "{:.12e},{:.15e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                self.x[j],
                self.r[j],
                self.delta_r[j],
                self.l[j],
                self.a_of_x[j],
                self.i_plus[j],
                self.i_minus[j],
                self.w_weight[j]
            )?;
        }
        Ok(())
    }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// RK4 integrator for `(ln s, A)` on one half of the chart.
struct Stepper<'a> {
    p: &'a SpacetimeParams,
    h: &'a Horizons,
    right: bool,
    x: f64,
    y: f64,
    a: f64,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a SpacetimeParams, h: &'a Horizons, r0: f64, right: bool) -> Self {
        let y = if right { (h.r_plus - r0).ln() } else { (r0 - h.r_minus).ln() };
        Self { p, h, right, x: 0.0, y, a: 0.0 }
    }

    fn radii(&self, y: f64) -> (f64, f64, f64) {
        let gap = self.h.r_plus - self.h.r_minus;
        let s = y.exp();
        if self.right {
            (self.h.r_plus - s, gap - s, s)
        } else {
            (self.h.r_minus + s, s, gap - s)
        }
    }

    fn rhs(&self, y: f64) -> (f64, f64) {
        let (r, sm, sp) = self.radii(y);
        let f = r * r + self.p.spin * self.p.spin;
        let lam = self.p.lambda_factor();
        let dy = if self.right {
            -self.h.alpha(r) * sm / (lam * f)
        } else {
            self.h.alpha(r) * sp / (lam * f)
        };
        (dy, self.p.spin / f)
    }

    fn advance_to(&mut self, x_target: f64) {
        let span = x_target - self.x;
        if span == 0.0 {
            return;
        }
        let m = (span.abs() / ODE_STEP).ceil().max(1.0) as usize;
        let h = span / m as f64;
        for _ in 0..m {
            let (k1y, k1a) = self.rhs(self.y);
            let (k2y, k2a) = self.rhs(self.y + 0.5 * h * k1y);
            let (k3y, k3a) = self.rhs(self.y + 0.5 * h * k2y);
            let (k4y, k4a) = self.rhs(self.y + h * k3y);
            self.y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            self.a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        }
        self.x = x_target;
    }

    fn point(&self) -> RadialPoint {
        let (r, s_minus, s_plus) = self.radii(self.y);
        RadialPoint { x: self.x, r, s_minus, s_plus, a_phase: self.a }
    }
}

/// Build the chart on `n_x` nodes spanning `[-x_max, x_max]`.
pub fn build_background(params: &SpacetimeParams, x_max: f64, n_x: usize, cutoff: Cutoff) -> Result<RadialChart> {
    params.validate()?;
    if n_x < 16 {
        return Err(Error::Grid(format!("n_x = {n_x} < 16")));
    }
    if !(x_max > 0.0) {
        return Err(Error::Grid(format!("x_max must be positive, got {x_max}")));
    }
    if !(cutoff.width > 0.0) {
        return Err(Error::Grid("cutoff width must be positive".into()));
    }
    let horizons = find_horizons(params)?;
    let dx = 2.0 * x_max / (n_x - 1) as f64;
    let kappa_max = horizons.kappa_plus.max(horizons.kappa_minus);
    if 1.0 / (kappa_max * dx) < 8.0 {
        return Err(Error::Grid(format!(
            "dx = {dx:.4} gives {:.2} nodes per e-folding (need 8)",
            1.0 / (kappa_max * dx)
        )));
    }
    let r0 = 0.5 * (horizons.r_minus + horizons.r_plus);
    let c = (n_x - 1) as f64 / 2.0;
    let x: Vec<f64> = (0..n_x).map(|j| (j as f64 - c) * dx).collect();

    let mut pts = vec![
        RadialPoint { x: 0.0, r: r0, s_minus: 0.0, s_plus: 0.0, a_phase: 0.0 };
        n_x
    ];
    let mut right = Stepper::new(params, &horizons, r0, true);
    for j in 0..n_x {
        if x[j] >= 0.0 {
            right.advance_to(x[j]);
            pts[j] = right.point();
        }
    }
    let mut left = Stepper::new(params, &horizons, r0, false);
    for j in (0..n_x).rev() {
        if x[j] < 0.0 {
            left.advance_to(x[j]);
            pts[j] = left.point();
        }
    }

    let lam = params.lambda_factor();
    let a2 = params.spin * params.spin;
    let nf = params.n as f64;
    let mut chart = RadialChart {
        params: *params,
        horizons,
        r0,
        dx,
        x: x.clone(),
        r: Vec::with_capacity(n_x),
        s_minus: Vec::with_capacity(n_x),
        s_plus: Vec::with_capacity(n_x),
        delta_r: Vec::with_capacity(n_x),
        l: Vec::with_capacity(n_x),
        dl: Vec::with_capacity(n_x),
        l_plus: params.l_of_r(horizons.r_plus),
        l_minus: params.l_of_r(horizons.r_minus),
        a_of_x: Vec::with_capacity(n_x),
        cutoff,
        i_plus: Vec::with_capacity(n_x),
        i_minus: Vec::with_capacity(n_x),
        w_weight: Vec::with_capacity(n_x),
        q_weight: Vec::with_capacity(n_x),
    };
    for (j, p) in pts.iter().enumerate() {
        let dr = horizons.delta_r_from(p.r, p.s_minus, p.s_plus);
        let f = p.r * p.r + a2;
        chart.r.push(p.r);
        chart.s_minus.push(p.s_minus);
        chart.s_plus.push(p.s_plus);
        chart.delta_r.push(dr);
        chart.l.push(params.l_of_r(p.r));
        // dl/dx = dl/dr · Δr/(λ f)
        chart.dl.push(-2.0 * params.spin * nf * p.r / (f * f) * dr / (lam * f));
        chart.a_of_x.push(p.a_phase);
        chart.i_plus.push(cutoff.plus(x[j]));
        chart.i_minus.push(cutoff.minus(x[j]));
        let q = (p.s_minus * p.s_plus).sqrt();
        chart.q_weight.push(q);
        chart.w_weight.push(1.0 / q);
    }
    Ok(chart)
}

/// Build a chart with a prescribed spacing, growing the node count with `x_max`.
pub fn build_background_dx(params: &SpacetimeParams, x_max: f64, dx: f64, cutoff: Cutoff) -> Result<RadialChart> {
    let n_x = (2.0 * x_max / dx).round() as usize + 1;
    build_background(params, x_max, n_x, cutoff)
}

/// An event in Boyer-Lindquist coordinates `(t, r, θ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Images of an event under the Kerr-star changes of coordinates and the horizon maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMaps {
    /// `(*t, r, θ, *φ)`, constant along outgoing principal null geodesics.
    pub star_kerr: Event,
    /// `(t*, r, θ, φ*)`, constant along incoming principal null geodesics.
    pub kerr_star: Event,
    /// Where the outgoing geodesic meets the future cosmological horizon.
    pub f_plus: Event,
    /// Where the incoming geodesic meets the future black-hole horizon.
    pub f_minus: Event,
}

fn wrap_phi(phi: f64) -> f64 {
    phi.rem_euclid(2.0 * PI)
}

pub fn horizon_point_maps(chart: &RadialChart, ev: Event) -> Result<PointMaps> {
    let t_r = chart.x_of_r(ev.r)?;
    let a_r = chart.a_of_r(ev.r)?;
    let h = &chart.horizons;
    let star_kerr = Event { t: ev.t - t_r, r: ev.r, theta: ev.theta, phi: wrap_phi(ev.phi - a_r) };
    let kerr_star = Event { t: ev.t + t_r, r: ev.r, theta: ev.theta, phi: wrap_phi(ev.phi + a_r) };
    Ok(PointMaps {
        star_kerr,
        kerr_star,
        f_plus: Event { r: h.r_plus, ..star_kerr },
        f_minus: Event { r: h.r_minus, ..kerr_star },
    })
}

/// Inverse of the outgoing horizon map restricted to `t = 0`:
/// `(*t, θ, *φ) ↦ (0, T⁻¹(-*t), θ, *φ + A(T⁻¹(-*t)))`.
pub fn f_plus_inverse(chart: &RadialChart, star_t: f64, theta: f64, star_phi: f64) -> Event {
    let p = chart.point_at(-star_t);
    Event { t: 0.0, r: p.r, theta, phi: wrap_phi(star_phi + p.a_phase) }
}

/// Inverse of the incoming horizon map restricted to `t = 0`.
pub fn f_minus_inverse(chart: &RadialChart, t_star: f64, theta: f64, phi_star: f64) -> Event {
    let p = chart.point_at(t_star);
    Event { t: 0.0, r: p.r, theta, phi: wrap_phi(phi_star - p.a_phase) }
}
