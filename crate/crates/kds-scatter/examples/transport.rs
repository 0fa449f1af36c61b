//! The comparison dynamics near the cosmological horizon: exact transport, the
//! Kirchhoff formula against RK4, and the left/right split.

use kds_scatter::config::Config;
use kds_scatter::evolution::{evolve, EvolveOptions};
use kds_scatter::field::norm_sq;
use kds_scatter::operators::{Generator, NormKind, Side};
use kds_scatter::scenario::Setup;
use kds_scatter::transport::{kirchhoff_evolve, make_admissible, split_left_right};
use kds_scatter::verify::transport_identities;

fn main() -> kds_scatter::Result<()> {
    let config = Config::from_toml_str("[grid]\nn_x = 1201\nx_max = 60.0\nn_theta = 12\nq_max = 3\n")?;
    let s = Setup::new(&config)?;
    let g = &s.gens;
    let u = s.suite_state(3);

    let id = transport_identities(g, &u, 7.5)?;
    println!("exact transport: unitarity {:.1e}, group law {:.1e}", id.unitarity, id.group_law);
    println!("Psi invariance {:.1e}, Pythagoras {:.1e}", id.psi_invariance, id.pythagoras);

    let t = 10.0;
    let kirch = kirchhoff_evolve(&u, t, Side::Plus, g)?;
    let rk = evolve(&u, t, Generator::TPlus, g, &EvolveOptions { cfl: 0.1, ..Default::default() })?;
    let n = g.energy_norm(&rk, NormKind::TPlus)?;
    println!("Kirchhoff vs RK4 at t = {t}: {:.2e}", g.energy_norm(&kirch.sub(&rk), NormKind::TPlus)? / n);

    let (adm, corr) = make_admissible(&u, Side::Plus, g)?;
    let split = split_left_right(&adm, Side::Plus, g)?;
    let psi_r = norm_sq(&g.psi_functional(&split.u_right, Side::Plus)?, g.dx).sqrt();
    let psi_l = norm_sq(&g.psi_conjugate(&split.u_left, Side::Plus)?, g.dx).sqrt();
    println!("admissibility correction {corr:.2e}; Psi(u^r) = {psi_r:.1e}, conjugate Psi(u^l) = {psi_l:.1e}");
    Ok(())
}
