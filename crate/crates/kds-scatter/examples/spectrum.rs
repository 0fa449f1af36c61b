//! Eigenvalues of the angular operator at fixed axial mode, for a few spins.
//!
//! At zero spin they are `ℓ(ℓ+1)` with `ℓ ≥ |n|`; rotation splits them smoothly.

use kds_scatter::angular::angular_basis;
use kds_scatter::geometry::SpacetimeParams;

fn main() -> kds_scatter::Result<()> {
    let n = 2;
    println!("{:>6} lowest eigenvalues", "spin");
    for spin in [0.0, 0.05, 0.2, 0.5] {
        let params = SpacetimeParams::new(0.05, 1.0, spin, n, 0.0)?;
        let basis = angular_basis(&params, 24, 6)?;
        let ev: Vec<String> = basis.eigenvalues.iter().map(|v| format!("{v:10.6}")).collect();
        println!("{spin:>6.2} {}", ev.join(" "));
    }
    Ok(())
}
