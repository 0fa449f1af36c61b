//! Future horizon traces of random data, written as `(*t, θ, Re, Im)` tables, and their
//! agreement with the wave operators lifted back from the horizons.

use std::fs::File;
use std::io::BufWriter;

use kds_scatter::config::Config;
use kds_scatter::horizons::{extract_traces, horizon_norm, lift_profile, HorizonKind};
use kds_scatter::operators::{NormKind, Side};
use kds_scatter::scattering::inverse_wave_ops;
use kds_scatter::scenario::Setup;

const CONFIG: &str = "[grid]\nn_x = 2301\nx_max = 230.0\nn_theta = 24\nq_max = 4\n[scattering]\nt_max = 200.0\n";

fn main() -> kds_scatter::Result<()> {
    let s = Setup::new(&Config::from_toml_str(CONFIG)?)?;
    let g = &s.gens;
    let u = s.suite_state(0);
    let un = g.energy_norm(&u, NormKind::FullHom)?;
    let kinds = [HorizonKind::FutureMinus, HorizonKind::FuturePlus];
    let traces = extract_traces(&u, &kinds, &s.trace_options(), g)?;
    let omegas = inverse_wave_ops(&u, &[Side::Minus, Side::Plus], &s.scatter_options(), g)?;
    let dir = std::env::temp_dir();
    for (tr, om) in traces.iter().zip(&omegas) {
        let path = dir.join(format!("trace_{}.csv", om.side.name()));
        tr.profile.write_csv(g, BufWriter::new(File::create(&path)?))?;
        let lifted = lift_profile(&tr.profile, g)?;
        let kind = NormKind::t_side(om.side);
        let agree = g.energy_norm(&lifted.sub(&om.limit), kind)? / g.energy_norm(&om.limit, kind)?;
        println!(
            "{:?}: horizon norm / |u| = {:.6}, stabilisation residual {:.1e}, |F T u - Omega u| rel {:.2e}  -> {}",
            tr.profile.which,
            horizon_norm(&tr.profile, g) / un,
            tr.residual,
            agree,
            path.display()
        );
    }
    Ok(())
}
