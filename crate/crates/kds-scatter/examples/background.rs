//! Build the radial chart for a De Sitter-Kerr background and compare the fitted
//! horizon decay rates with the surface gravities.
//!
//! cargo run --example background -- [lambda] [mass] [spin]

use kds_scatter::geometry::{build_background, Cutoff, SpacetimeParams};

fn main() -> kds_scatter::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let lambda = args.first().copied().unwrap_or(0.05);
    let mass = args.get(1).copied().unwrap_or(1.0);
    let spin = args.get(2).copied().unwrap_or(0.05);

    let params = SpacetimeParams::new(lambda, mass, spin, 1, 0.0)?;
    let chart = build_background(&params, 120.0, 1201, Cutoff::new(0.0, 10.0))?;
    let h = &chart.horizons;
    let (fit_plus, fit_minus) = chart.fitted_kappas();

    println!("r- = {:.6}  r+ = {:.6}  (chart base point r0 = {:.6})", h.r_minus, h.r_plus, chart.r0);
    println!("kappa+ = {:.8}  fitted {:.8}", h.kappa_plus, fit_plus);
    println!("kappa- = {:.8}  fitted {:.8}", h.kappa_minus, fit_minus);
    println!("l+ = {:.6e}  l- = {:.6e}", chart.l_plus, chart.l_minus);
    for x in [-20.0, -5.0, 0.0, 5.0, 20.0] {
        let p = chart.point_at(x);
        println!("x = {x:>6.1}  r = {:.10}  T(r) = {:.10}", p.r, chart.x_of_r(p.r)?);
    }
    Ok(())
}
