//! Scenario orchestration behind the `kds` subcommands.
//!
//! Each scenario returns a [`Report`]: named CSV tables plus a JSON summary that embeds the
//! resolved configuration and the crate version. Nothing time- or thread-dependent is
//! written, so identical configurations give byte-identical reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::angular::{assemble_p_n, spectrum_p, AngularBasis};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::evolution::{evolve_observed, EvolveOptions};
use crate::field::{norm_sq, FieldState};
use crate::geometry::{build_background, RadialChart, SpacetimeParams};
use crate::horizons::{extract_traces, lift_profile, horizon_norm, HorizonKind, TraceOptions};
use crate::operators::{assemble_generators, Generator, GeneratorSet, NormKind, Side};
use crate::scattering::{direct_wave_ops, inverse_wave_ops, ScatterOptions, WaveOpRecord};
use crate::states::{random_profile_pair, random_state, RandomDataSpec};
use crate::verify::{run_checks, Check};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Background,
    Spectrum,
    Evolve,
    Scatter,
    Trace,
    Roundtrip,
    Verify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Background,
        Command::Spectrum,
        Command::Evolve,
        Command::Scatter,
        Command::Trace,
        Command::Roundtrip,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Background => "background",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Scatter => "scatter",
            Command::Trace => "trace",
            Command::Roundtrip => "roundtrip",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: Command,
    /// File name to CSV contents.
    pub tables: BTreeMap<String, String>,
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary is plain JSON");
        s.push('\n');
        s
    }

    /// Write every table and `summary.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.tables {
            std::fs::write(dir.join(name), body)?;
        }
        std::fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}

/// Everything built once from a resolved configuration.
pub struct Setup {
    pub config: Config,
    pub params: SpacetimeParams,
    pub chart: RadialChart,
    pub basis: AngularBasis,
    pub gens: GeneratorSet,
}

impl Setup {
    pub fn new(config: &Config) -> Result<Self> {
        let config = config.resolve()?;
        let params = config.params()?;
        let chart = build_background(&params, config.x_max(), config.grid.n_x, config.cutoff())?;
        let op = assemble_p_n(&params, config.grid.n_theta)?;
        let basis = spectrum_p(&op)?.truncated(config.grid.q_max);
        let gens = assemble_generators(&params, &chart, &basis)?;
        Ok(Self { config, params, chart, basis, gens })
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.run.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn scatter_options(&self) -> ScatterOptions {
        let s = &self.config.scattering;
        let mut o = ScatterOptions::new(self.config.t_max(), s.tol);
        o.checkpoint = s.checkpoint;
        o.cfl = self.config.grid.cfl;
        o
    }

    pub fn trace_options(&self) -> TraceOptions {
        let mut o = TraceOptions::new(self.config.t_max(), self.config.scattering.tol.max(1e-5));
        o.checkpoint = self.config.scattering.checkpoint;
        o.cfl = self.config.grid.cfl;
        o
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { cfl: self.config.grid.cfl, ..Default::default() }
    }

    /// The `k`-th state of the random suite.
    pub fn suite_state(&self, k: u64) -> FieldState {
        random_state(&self.gens, &RandomDataSpec::default(), &mut self.rng(k))
    }

    fn summary(&self, command: Command, results: Value, checks: &[Check]) -> Value {
        json!({
            "tool": "kds",
            "version": VERSION,
            "command": command.name(),
            "config": self.config,
            "results": results,
            "checks": checks,
            "passed": checks.iter().all(|c| c.pass),
        })
    }
}

pub fn run_scenario(command: Command, config: &Config) -> Result<Report> {
    // The background needs no angular or generator setup, and must report a missing
    // horizon gap before anything else is attempted.
    if command == Command::Background {
        return background(config);
    }
    let setup = Setup::new(config)?;
    match command {
        Command::Background => unreachable!(),
        Command::Spectrum => spectrum(&setup),
        Command::Evolve => evolve_scenario(&setup),
        Command::Scatter => scatter(&setup),
        Command::Trace => trace(&setup),
        Command::Roundtrip => roundtrip(&setup),
        Command::Verify => verify(&setup),
    }
}

fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Shape(e.to_string()))
}

fn background(config: &Config) -> Result<Report> {
    let config = config.resolve()?;
    let params = config.params()?;
    let chart = build_background(&params, config.x_max(), config.grid.n_x, config.cutoff())?;
    let (fit_plus, fit_minus) = chart.fitted_kappas();
    let h = &chart.horizons;
    let mut tables = BTreeMap::new();
    tables.insert("chart.csv".to_string(), csv(|b| chart.write_csv(b))?);
    let results = json!({
        "r_minus": h.r_minus,
        "r_plus": h.r_plus,
        "kappa_minus": h.kappa_minus,
        "kappa_plus": h.kappa_plus,
        "kappa_minus_fit": fit_minus,
        "kappa_plus_fit": fit_plus,
        "l_minus": chart.l_minus,
        "l_plus": chart.l_plus,
        "n_x": chart.len(),
        "dx": chart.dx,
    });
    let checks = vec![
        Check::below("kappa_plus_fit_relative", ((fit_plus - h.kappa_plus) / h.kappa_plus).abs(), 1e-4),
        Check::below("kappa_minus_fit_relative", ((fit_minus - h.kappa_minus) / h.kappa_minus).abs(), 1e-4),
    ];
    let summary = json!({
        "tool": "kds",
        "version": VERSION,
        "command": "background",
        "config": config,
        "results": results,
        "checks": checks,
        "passed": checks.iter().all(|c| c.pass),
    });
    Ok(Report { command: Command::Background, tables, summary, checks })
}

fn spectrum(s: &Setup) -> Result<Report> {
    let op = assemble_p_n(&s.params, s.config.grid.n_theta)?;
    let full = spectrum_p(&op)?;
    let mut tables = BTreeMap::new();
    tables.insert("spectrum.csv".to_string(), csv(|b| full.write_csv(b))?);
    let results = json!({
        "n": s.params.n,
        "dim": full.len(),
        "retained": s.basis.len(),
        "eigenvalues": full.eigenvalues,
    });
    let summary = s.summary(Command::Spectrum, results, &[]);
    Ok(Report { command: Command::Spectrum, tables, summary, checks: Vec::new() })
}

/// `⟨h u₀, u₀⟩ + ‖u₁‖²`, conserved by the semi-discrete full dynamics.
pub fn conserved_energy(gens: &GeneratorSet, u: &FieldState) -> f64 {
    let ku = gens.k_apply(&u.u0);
    gens.h0_form(&u.u0) - norm_sq(&ku, gens.dx) + norm_sq(&u.u1, gens.dx)
}

fn evolve_scenario(s: &Setup) -> Result<Report> {
    let g = &s.gens;
    let u = s.suite_state(0);
    let t_end = s.config.run.evolve_time;
    let every = ((1.0 / s.config.run.samples_per_unit.max(1) as f64) / (s.config.grid.cfl * g.dx)).round().max(1.0) as usize;
    let e0 = conserved_energy(g, &u);
    let mut rows = vec![(0.0, g.energy_norm(&u, NormKind::FullHom)?, g.energy_norm(&u, NormKind::FullInhom)?, e0)];
    let mut err = None;
    let last = evolve_observed(&u, t_end, Generator::Full, g, &s.evolve_options(), |k, t, st| {
        if k % every == 0 && err.is_none() {
            let row = (|| -> Result<_> {
                Ok((t, g.energy_norm(st, NormKind::FullHom)?, g.energy_norm(st, NormKind::FullInhom)?, conserved_energy(g, st)))
            })();
            match row {
                Ok(r) => rows.push(r),
                Err(e) => err = Some(e),
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let mut body = String::from("t,full_hom,full_inhom,energy\n");
    for (t, a, b, e) in &rows {
        body.push_str(&format!("{t:.6},{a:.12e},{b:.12e},{e:.12e}\n"));
    }
    let drift = rows.iter().map(|r| ((r.3 - e0) / e0.abs().max(f64::MIN_POSITIVE)).abs()).fold(0.0, f64::max);
    let growth = rows.iter().map(|r| r.2 / rows[0].2).fold(0.0, f64::max);
    let mut tables = BTreeMap::new();
    tables.insert("evolve.csv".to_string(), body);
    let results = json!({
        "t_end": t_end,
        "energy_initial": e0,
        "energy_final": conserved_energy(g, &last),
        "max_relative_energy_drift": drift,
        "max_full_inhom_growth": growth,
    });
    let checks = vec![Check::below("relative_energy_drift", drift, 1e-4)];
    let summary = s.summary(Command::Evolve, results, &checks);
    Ok(Report { command: Command::Evolve, tables, summary, checks })
}

fn record_json(r: &WaveOpRecord) -> Value {
    json!({
        "side": r.side,
        "converged_at": r.converged_at,
        "fitted_rate": r.fitted_rate(),
        "checkpoints": r.history.len(),
        "final_difference": r.history.last().map(|p| p.diff),
        "max_admissibility_correction": r.max_correction,
        "max_outflow": r.max_outflow,
    })
}

fn relative(gens: &GeneratorSet, a: &FieldState, b: &FieldState, kind: NormKind) -> Result<f64> {
    let n = gens.energy_norm(b, kind)?;
    Ok(gens.energy_norm(&a.sub(b), kind)? / n.max(f64::MIN_POSITIVE))
}

fn membership(gens: &GeneratorSet, r: &WaveOpRecord) -> Result<f64> {
    let psi = gens.psi_functional(&r.limit, r.side)?;
    let n = gens.energy_norm(&r.limit, NormKind::t_side(r.side))?;
    Ok(norm_sq(&psi, gens.dx).sqrt() / n.max(f64::MIN_POSITIVE))
}

fn scatter(s: &Setup) -> Result<Report> {
    let g = &s.gens;
    let u = s.suite_state(0);
    let opts = s.scatter_options();
    let recs = inverse_wave_ops(&u, &[Side::Minus, Side::Plus], &opts, g)?;
    let w = direct_wave_ops(&[(Side::Minus, &recs[0].limit), (Side::Plus, &recs[1].limit)], &opts, g)?;
    let mut tables = BTreeMap::new();
    tables.insert("omega_minus.csv".to_string(), csv(|b| recs[0].write_csv(b))?);
    tables.insert("omega_plus.csv".to_string(), csv(|b| recs[1].write_csv(b))?);
    let mut body = String::from("t,cauchy_difference,norm\n");
    for p in &w.history {
        body.push_str(&format!("{:.6},{:.12e},{:.12e}\n", p.t, p.diff, p.norm));
    }
    tables.insert("w.csv".to_string(), body);
    let un = g.energy_norm(&u, NormKind::FullHom)?;
    let m_minus = membership(g, &recs[0])?;
    let m_plus = membership(g, &recs[1])?;
    let inv = relative(g, &w.state, &u, NormKind::FullHom)?;
    let results = json!({
        "omega_minus": record_json(&recs[0]),
        "omega_plus": record_json(&recs[1]),
        "omega_minus_norm_ratio": g.energy_norm(&recs[0].limit, NormKind::TMinus)? / un,
        "omega_plus_norm_ratio": g.energy_norm(&recs[1].limit, NormKind::TPlus)? / un,
        "w_converged_at": w.converged_at,
        "w_max_outflow": w.max_outflow,
        "w_omega_residual": inv,
    });
    let tol = s.config.scattering.tol;
    let checks = vec![
        Check::below("membership_omega_minus", m_minus, 10.0 * tol.max(1e-5)),
        Check::below("membership_omega_plus", m_plus, 10.0 * tol.max(1e-5)),
        Check::below("w_omega_residual", inv, 1e-3),
    ];
    let summary = s.summary(Command::Scatter, results, &checks);
    Ok(Report { command: Command::Scatter, tables, summary, checks })
}

fn trace(s: &Setup) -> Result<Report> {
    let g = &s.gens;
    let u = s.suite_state(0);
    let recs = extract_traces(&u, &[HorizonKind::FutureMinus, HorizonKind::FuturePlus], &s.trace_options(), g)?;
    let mut tables = BTreeMap::new();
    tables.insert("trace_minus.csv".to_string(), csv(|b| recs[0].profile.write_csv(g, b))?);
    tables.insert("trace_plus.csv".to_string(), csv(|b| recs[1].profile.write_csv(g, b))?);
    let un = g.energy_norm(&u, NormKind::FullHom)?;
    let results = json!({
        "minus": {"residual": recs[0].residual, "horizon_norm_ratio": horizon_norm(&recs[0].profile, g) / un, "max_outflow": recs[0].max_outflow},
        "plus": {"residual": recs[1].residual, "horizon_norm_ratio": horizon_norm(&recs[1].profile, g) / un, "max_outflow": recs[1].max_outflow},
    });
    let summary = s.summary(Command::Trace, results, &[]);
    Ok(Report { command: Command::Trace, tables, summary, checks: Vec::new() })
}

fn roundtrip(s: &Setup) -> Result<Report> {
    let g = &s.gens;
    let opts = s.scatter_options();
    let u = s.suite_state(0);
    let recs = inverse_wave_ops(&u, &[Side::Minus, Side::Plus], &opts, g)?;
    let w = direct_wave_ops(&[(Side::Minus, &recs[0].limit), (Side::Plus, &recs[1].limit)], &opts, g)?;
    let w_omega = relative(g, &w.state, &u, NormKind::FullHom)?;

    let (pm, pp) = random_profile_pair(g, &RandomDataSpec::default(), &mut s.rng(1_000));
    let wp = direct_wave_ops(&[(Side::Minus, &pm), (Side::Plus, &pp)], &opts, g)?;
    let back = inverse_wave_ops(&wp.state, &[Side::Minus, Side::Plus], &opts, g)?;
    let den = g.energy_norm(&pm, NormKind::TMinus)? + g.energy_norm(&pp, NormKind::TPlus)?;
    let omega_w = (g.energy_norm(&back[0].limit.sub(&pm), NormKind::TMinus)?
        + g.energy_norm(&back[1].limit.sub(&pp), NormKind::TPlus)?)
        / den.max(f64::MIN_POSITIVE);

    let traces = extract_traces(&u, &[HorizonKind::FutureMinus, HorizonKind::FuturePlus], &s.trace_options(), g)?;
    let mut agreement = Vec::new();
    for (t, r) in traces.iter().zip(&recs) {
        let lifted = lift_profile(&t.profile, g)?;
        agreement.push(relative(g, &lifted, &r.limit, NormKind::t_side(r.side))?);
    }
    let mut tables = BTreeMap::new();
    let mut body = String::from("check,value\n");
    for (name, v) in [("w_omega", w_omega), ("omega_w", omega_w), ("trace_minus", agreement[0]), ("trace_plus", agreement[1])] {
        body.push_str(&format!("{name},{v:.12e}\n"));
    }
    tables.insert("roundtrip.csv".to_string(), body);
    let results = json!({
        "w_omega_residual": w_omega,
        "omega_w_residual": omega_w,
        "trace_agreement_minus": agreement[0],
        "trace_agreement_plus": agreement[1],
    });
    let checks = vec![
        Check::below("w_omega_residual", w_omega, 1e-3),
        Check::below("omega_w_residual", omega_w, 1e-3),
        Check::below("trace_agreement_minus", agreement[0], 1e-3),
        Check::below("trace_agreement_plus", agreement[1], 1e-3),
    ];
    let summary = s.summary(Command::Roundtrip, results, &checks);
    Ok(Report { command: Command::Roundtrip, tables, summary, checks })
}

fn verify(s: &Setup) -> Result<Report> {
    let checks = run_checks(s)?;
    let mut body = String::from("check,value,threshold,pass\n");
    for c in &checks {
        body.push_str(&format!("{},{:.6e},{:.6e},{}\n", c.name, c.value, c.threshold, c.pass));
    }
    let mut tables = BTreeMap::new();
    tables.insert("verify.csv".to_string(), body);
    let summary = s.summary(Command::Verify, json!({"checks_run": checks.len()}), &checks);
    Ok(Report { command: Command::Verify, tables, summary, checks })
}
