//! Initial data used by the scenarios and the verification suites.

use rand::Rng;

use crate::field::{FieldState, C64, ZERO};
use crate::operators::{GeneratorSet, Side};
use crate::transport::right_state;

/// `amp · exp(-((x - center)/width)²) · e^{i k x}` on the chart grid.
pub fn gaussian(gens: &GeneratorSet, center: f64, width: f64, k: f64, amp: C64) -> Vec<C64> {
    gens.chart
        .x
        .iter()
        .map(|&x| {
            let y = (x - center) / width;
            amp * C64::from_polar((-y * y).exp(), k * x)
        })
        .collect()
}

/// Parameters of the random smooth data: bumps per mode and component, their centres
/// and widths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomDataSpec {
    pub bumps: usize,
    pub center_range: f64,
    pub width_min: f64,
    pub width_max: f64,
}

impl Default for RandomDataSpec {
    fn default() -> Self {
        Self { bumps: 2, center_range: 5.0, width_min: 1.5, width_max: 3.0 }
    }
}

/// Sum of random Gaussian bumps in both components of every mode, mode `q` scaled by `1/(q+1)`.
pub fn random_state<R: Rng>(gens: &GeneratorSet, spec: &RandomDataSpec, rng: &mut R) -> FieldState {
    let mut u = gens.zero_state();
    for q in 0..gens.n_modes {
        for comp in 0..2 {
            for _ in 0..spec.bumps {
                let c = rng.gen_range(-spec.center_range..=spec.center_range);
                let w = rng.gen_range(spec.width_min..=spec.width_max);
                let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (q + 1) as f64;
                let g = gaussian(gens, c, w, 0.0, amp);
                let dst = if comp == 0 { u.mode0_mut(q) } else { u.mode1_mut(q) };
                for (d, v) in dst.iter_mut().zip(&g) {
                    *d += v;
                }
            }
        }
    }
    u
}

/// A random profile pair `(p₋, p₊)`: `p₋` left data of the minus side, `p₊` right data of
/// the plus side, each built from random first components.
pub fn random_profile_pair<R: Rng>(
    gens: &GeneratorSet,
    spec: &RandomDataSpec,
    rng: &mut R,
) -> (FieldState, FieldState) {
    let side_data = |side: Side, rng: &mut R| {
        let mut u0 = random_state(gens, spec, rng);
        u0.u1.iter_mut().for_each(|v| *v = ZERO);
        right_state(&u0, side, gens)
    };
    let minus = side_data(Side::Minus, rng);
    let plus = side_data(Side::Plus, rng);
    (minus, plus)
}

/// A modulated Gaussian in mode 0 moving towards the `+` horizon without change of shape
/// under the comparison dynamics.
pub fn outgoing_packet(gens: &GeneratorSet, center: f64, width: f64, k: f64) -> FieldState {
    let mut u0 = gens.zero_state();
    u0.mode0_mut(0).copy_from_slice(&gaussian(gens, center, width, k, C64::new(1.0, 0.0)));
    right_state(&u0, Side::Plus, gens)
}

/// Smallest `R` such that `|u| ≤ 1e-12 max|u|` outside `(-R, R)`.
pub fn support_radius(u: &FieldState, gens: &GeneratorSet) -> f64 {
    let peak = u.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let cut = 1e-12 * peak;
    let mut r: f64 = 0.0;
    for q in 0..u.n_modes {
        for comp in [u.mode0(q), u.mode1(q)] {
            for (v, &x) in comp.iter().zip(&gens.chart.x) {
                if v.norm() > cut {
                    r = r.max(x.abs());
                }
            }
        }
    }
    r
}

impl RandomDataSpec {
    /// Radius outside which every bump is below `1e-12` of its amplitude.
    pub fn radius(&self) -> f64 {
        self.center_range + self.width_max * (1e12f64).ln().sqrt()
    }
}
