//! Characteristic Cauchy problem: recover Cauchy data from its two future horizon
//! traces, and the two-sided comparison of energies.

use kds_scatter::config::Config;
use kds_scatter::horizons::{extract_traces, goursat_solve_with, horizon_norm, HorizonKind};
use kds_scatter::operators::NormKind;
use kds_scatter::scenario::Setup;

const CONFIG: &str = "[grid]\nn_x = 2301\nx_max = 230.0\nn_theta = 24\nq_max = 4\n[scattering]\nt_max = 200.0\n";

fn main() -> kds_scatter::Result<()> {
    let s = Setup::new(&Config::from_toml_str(CONFIG)?)?;
    let g = &s.gens;
    let kinds = [HorizonKind::FutureMinus, HorizonKind::FuturePlus];
    for k in 0..2 {
        let u = s.suite_state(k);
        let un = g.energy_norm(&u, NormKind::FullHom)?;
        let tr = extract_traces(&u, &kinds, &s.trace_options(), g)?;
        let rec = goursat_solve_with(&tr[0].profile, &tr[1].profile, &s.scatter_options(), g)?;
        let ratio = (horizon_norm(&tr[0].profile, g) + horizon_norm(&tr[1].profile, g)) / un;
        let err = g.energy_norm(&rec.sub(&u), NormKind::FullHom)? / un;
        println!("state {k}: (|T- u| + |T+ u|) / |u| = {ratio:.4}, reconstruction error {err:.2e}");
    }
    Ok(())
}
