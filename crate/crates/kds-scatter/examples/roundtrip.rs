//! Inversion in both directions: `W Ω u = u` on random Cauchy data and
//! `Ω W p = p` on random pairs of asymptotic profiles.

use kds_scatter::config::Config;
use kds_scatter::operators::{NormKind, Side};
use kds_scatter::scattering::{direct_wave_ops, inverse_wave_ops};
use kds_scatter::scenario::Setup;
use kds_scatter::states::{random_profile_pair, RandomDataSpec};

const CONFIG: &str = "[grid]\nn_x = 2301\nx_max = 230.0\nn_theta = 24\nq_max = 4\n[scattering]\nt_max = 200.0\n";

fn main() -> kds_scatter::Result<()> {
    let s = Setup::new(&Config::from_toml_str(CONFIG)?)?;
    let g = &s.gens;
    let opts = s.scatter_options();

    let u = s.suite_state(0);
    let om = inverse_wave_ops(&u, &[Side::Minus, Side::Plus], &opts, g)?;
    let w = direct_wave_ops(&[(Side::Minus, &om[0].limit), (Side::Plus, &om[1].limit)], &opts, g)?;
    let err = g.energy_norm(&w.state.sub(&u), NormKind::FullHom)? / g.energy_norm(&u, NormKind::FullHom)?;
    println!("W Omega u: relative error {err:.2e} (Omega converged at {:?}, {:?})", om[0].converged_at, om[1].converged_at);

    let (pm, pp) = random_profile_pair(g, &RandomDataSpec::default(), &mut s.rng(1_000));
    let wp = direct_wave_ops(&[(Side::Minus, &pm), (Side::Plus, &pp)], &opts, g)?;
    let back = inverse_wave_ops(&wp.state, &[Side::Minus, Side::Plus], &opts, g)?;
    let num = g.energy_norm(&back[0].limit.sub(&pm), NormKind::TMinus)? + g.energy_norm(&back[1].limit.sub(&pp), NormKind::TPlus)?;
    let den = g.energy_norm(&pm, NormKind::TMinus)? + g.energy_norm(&pp, NormKind::TPlus)?;
    println!("Omega W p: relative error {:.2e}", num / den);
    Ok(())
}
