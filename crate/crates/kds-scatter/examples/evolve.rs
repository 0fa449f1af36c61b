//! Evolve random data under the full dynamics and watch the norms.
//!
//! The homogeneous energy is not conserved when the spin is non-zero (there is no
//! positive conserved energy), but `⟨h₀u₀,u₀⟩ - ‖k u₀‖² + ‖u₁‖²` is.

use kds_scatter::config::Config;
use kds_scatter::evolution::evolve_with_history;
use kds_scatter::operators::{Generator, NormKind};
use kds_scatter::scenario::{conserved_energy, Setup};

fn main() -> kds_scatter::Result<()> {
    let config = Config::from_toml_str(
        "[physics]\nspin = 0.2\n[grid]\nn_x = 801\nx_max = 40.0\nn_theta = 16\nq_max = 4\n",
    )?;
    let s = Setup::new(&config)?;
    let u = s.suite_state(0);
    let (end, hist) = evolve_with_history(&u, 10.0, Generator::Full, &s.gens, &s.evolve_options(), NormKind::FullHom, 25)?;
    for (t, n) in hist.iter().step_by(4) {
        println!("t = {t:6.2}  |u|_hom = {n:.8}");
    }
    let (e0, e1) = (conserved_energy(&s.gens, &u), conserved_energy(&s.gens, &end));
    println!("conserved energy {e0:.12} -> {e1:.12} (relative drift {:.2e})", ((e1 - e0) / e0).abs());
    Ok(())
}
