use std::sync::OnceLock;

use kds_scatter::config::Config;
use kds_scatter::field::{inner, norm_sq, FieldState, C64};
use kds_scatter::geometry::{build_background, Cutoff, SpacetimeParams};
use kds_scatter::operators::{GeneratorSet, NormKind, Side};
use kds_scatter::scenario::Setup;
use kds_scatter::states::gaussian;
use kds_scatter::stencil::Derivative;
use kds_scatter::transport::{exact_transport, left_state, right_state, TransportKind};
use proptest::prelude::*;

fn setup() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| {
        let cfg = Config::from_toml_str("[grid]\nn_x = 601\nx_max = 30.0\nn_theta = 12\nq_max = 3\n").unwrap();
        Setup::new(&cfg).unwrap()
    })
}

fn bump_state(g: &GeneratorSet, c: f64, w: f64, k: f64, a: (f64, f64), b: (f64, f64)) -> FieldState {
    let mut u = g.zero_state();
    for q in 0..g.n_modes {
        let s = 1.0 / (q + 1) as f64;
        u.mode0_mut(q).copy_from_slice(&gaussian(g, c, w, k, C64::new(a.0, a.1) * s));
        u.mode1_mut(q).copy_from_slice(&gaussian(g, -c, w, -k, C64::new(b.0, b.1) * s));
    }
    u
}

fn amp() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_filter("non-zero", |(a, b)| a.abs() + b.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivative_is_antisymmetric(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 64;
        let d = Derivative::new(n, 0.25);
        let u: Vec<C64> = (0..n).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let lhs = inner(&d.apply_vec(&u), &v, 0.25);
        let rhs = inner(&u, &d.apply_vec(&v), 0.25);
        prop_assert!((lhs + rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn cutoffs_form_a_partition_of_unity(c in -5.0..5.0f64, w in 1.0..10.0f64, x in -30.0..30.0f64) {
        let cut = Cutoff::new(c, w);
        let s = cut.plus(x).powi(2) + cut.minus(x).powi(2);
        prop_assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chart_radius_increases_with_x(a in 0.0..0.5f64) {
        let p = SpacetimeParams::new(0.05, 1.0, a, 1, 0.0).unwrap();
        let chart = build_background(&p, 40.0, 401, Cutoff::new(0.0, 10.0)).unwrap();
        prop_assert!(chart.r.windows(2).all(|w| w[1] > w[0]));
        let h = chart.horizons;
        prop_assert!(chart.r.iter().all(|&r| r > h.r_minus && r < h.r_plus));
    }

    #[test]
    fn exact_transport_is_unitary(c in -8.0..8.0f64, w in 1.0..3.0f64, k in -2.0..2.0f64, t in -6.0..6.0f64) {
        let g = &setup().gens;
        let f = gaussian(g, c, w, k, C64::new(1.0, 0.5));
        let n0 = norm_sq(&f, g.dx);
        for kind in [TransportKind::WPlus, TransportKind::WMinus, TransportKind::WTildeMinus, TransportKind::WTildePlus] {
            let m = exact_transport(&f, t, kind, g).unwrap();
            prop_assert!((norm_sq(&m, g.dx) - n0).abs() < 1e-12 * n0);
        }
    }

    #[test]
    fn right_and_left_states_annihilate_their_functionals(c in -6.0..6.0f64, w in 1.0..3.0f64, k in -1.0..1.0f64, a in amp()) {
        let g = &setup().gens;
        let u0 = bump_state(g, c, w, k, a, (0.0, 0.0));
        for side in [Side::Plus, Side::Minus] {
            let r = right_state(&u0, side, g);
            let l = left_state(&u0, side, g);
            let psi_r = norm_sq(&g.psi_functional(&r, side).unwrap(), g.dx).sqrt();
            let psi_l = norm_sq(&g.psi_conjugate(&l, side).unwrap(), g.dx).sqrt();
            let scale = g.energy_norm(&r, NormKind::t_side(side)).unwrap();
            prop_assert!(psi_r < 1e-12 * scale && psi_l < 1e-12 * scale);
        }
    }

    #[test]
    fn pythagoras_identity_holds(c in -6.0..6.0f64, w in 1.0..3.0f64, k in -1.0..1.0f64, a in amp(), b in amp()) {
        let g = &setup().gens;
        let u = bump_state(g, c, w, k, a, b);
        for side in [Side::Plus, Side::Minus] {
            let p = norm_sq(&g.psi_functional(&u, side).unwrap(), g.dx);
            let q = norm_sq(&g.psi_conjugate(&u, side).unwrap(), g.dx);
            let t = g.energy_norm_sq(&u, NormKind::t_side(side)).unwrap();
            prop_assert!((p + q - 2.0 * t).abs() < 1e-10 * t);
        }
    }

    #[test]
    fn energy_forms_are_nonnegative(c in -6.0..6.0f64, w in 0.5..3.0f64, k in -3.0..3.0f64, a in amp()) {
        let g = &setup().gens;
        let u = bump_state(g, c, w, k, a, a);
        prop_assert!(g.h0_form(&u.u0) >= 0.0);
        for kind in [NormKind::FullHom, NormKind::TPlus, NormKind::TMinus, NormKind::InfPlus] {
            prop_assert!(g.energy_norm_sq(&u, kind).unwrap() >= 0.0);
        }
    }

    #[test]
    fn config_round_trips_through_toml(tol in 1e-8..1e-2f64, seed in any::<u64>(), n_x in 200usize..4000, cfl in 0.05..1.0f64) {
        let mut c = Config::default();
        c.scattering.tol = tol;
        c.run.seed = seed;
        c.grid.n_x = n_x;
        c.grid.cfl = cfl;
        let text = toml::to_string(&c).unwrap();
        prop_assert_eq!(Config::from_toml_str(&text).unwrap(), c);
    }
}
