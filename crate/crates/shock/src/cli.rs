//! Argument parsing and command dispatch.

use std::fs::{create_dir_all, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use conic_core::asymptotics::{fit_remainder_rate, Quantity};
use conic_core::background::{apple_curve, critical_angle, solve};
use conic_core::perturb::{energy_diagnostics, run_march_observed, PerturbationField};
use conic_core::stability::{
    hardy_check_weighted, linear_coefficients, multiplier_eval, random_trig_polynomials, Profile,
};
use serde::Serialize;

use crate::config::{Overrides, RunSpec};
use crate::io::{
    background_rows, multiplier_rows, series_rows, write_csv, write_json, CoefficientRow, ComparisonRow,
    StationDump,
};
use crate::sweep::{multiplier_sweep, Grid};

#[derive(Debug, Parser)]
#[command(name = "conic-shock", version, about = "Supersonic flow past a sharp cone: background, asymptotics, stability and marching")]
pub struct Cli {
    /// JSON run configuration; its fields override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Adiabatic exponent.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Pressure constant in `p = A rho^gamma`.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Freestream density.
    #[arg(long, global = true)]
    pub rho0: Option<f64>,
    /// Freestream speed.
    #[arg(long, global = true)]
    pub q0: Option<f64>,
    /// Cone slope `tan` of the half angle.
    #[arg(long, global = true)]
    pub b0: Option<f64>,
    /// Weight exponent, below -1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Perturbation amplitude.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "conic-shock-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve the background flow; writes `background.json` and `background.csv`.
    Solve,
    /// Sample the cone-slope curve over shock slopes and locate its maximum.
    Polar {
        /// Number of shock slopes sampled.
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Fit the decay of the leading-order remainders over a `q0` sweep.
    Asymptotics {
        /// Values of `b0 q0`.
        #[arg(long, value_delimiter = ',', default_values_t = [25.0, 50.0, 100.0, 200.0, 400.0])]
        b0q0: Vec<f64>,
        /// Quantity names; defaults to the background set.
        #[arg(long, value_delimiter = ',')]
        quantity: Vec<String>,
    },
    /// Evaluate the multiplier conditions and the energy constant.
    Stability,
    /// Check the weighted trace inequality on random and analytic profiles.
    Hardy {
        /// Number of random trigonometric profiles.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Right end `T` of the interval `[1, T]`.
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Highest harmonic in a random profile.
        #[arg(long, default_value_t = 8)]
        harmonics: usize,
        /// Boundary weight `w` of the inequality.
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
    },
    /// March the perturbed flow and report energies and decay.
    March {
        /// Final station.
        #[arg(long)]
        z_end: Option<f64>,
        /// Nodes across the cone-to-shock layer.
        #[arg(long)]
        n_sigma: Option<usize>,
        /// Azimuthal nodes; 1 gives the axisymmetric problem.
        #[arg(long)]
        n_theta: Option<usize>,
        /// Write a binary dump every this many recorded stations.
        #[arg(long)]
        dump_every: Option<usize>,
    },
    /// Multiplier verdict over a grid of `(gamma, b0, b0 q0)`.
    Sweep {
        /// Adiabatic exponents.
        #[arg(long, value_delimiter = ',', default_values_t = [1.2, 1.4, 2.0])]
        gammas: Vec<f64>,
        /// Cone slopes.
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.3])]
        b0s: Vec<f64>,
        /// Values of `b0 q0`.
        #[arg(long, value_delimiter = ',', default_values_t = [25.0, 50.0, 100.0, 200.0, 400.0])]
        b0q0s: Vec<f64>,
    },
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    VerdictFailure,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::VerdictFailure
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::VerdictFailure => 2,
        }
    }
}

impl Cli {
    pub fn spec(&self) -> Result<RunSpec> {
        let o = Overrides {
            gamma: self.gamma,
            a: self.a,
            rho0: self.rho0,
            q0: self.q0,
            b0: self.b0,
            mu: self.mu,
            epsilon: self.epsilon,
            seed: self.seed,
        };
        RunSpec::resolve(&o, self.config.as_deref())
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut spec = cli.spec()?;
    let out = cli.out.as_path();
    create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match &cli.command {
        Command::Solve => cmd_solve(&spec, out),
        Command::Polar { points } => cmd_polar(&spec, out, *points),
        Command::Asymptotics { b0q0, quantity } => cmd_asymptotics(&spec, out, b0q0, quantity),
        Command::Stability => cmd_stability(&spec, out),
        Command::Hardy { samples, t_end, harmonics, weight } => {
            cmd_hardy(&spec, out, *samples, *t_end, *harmonics, *weight)
        }
        Command::March { z_end, n_sigma, n_theta, dump_every } => {
            if let Some(z) = z_end {
                spec.march.z_end = *z;
            }
            if let Some(n) = n_sigma {
                spec.march.n_sigma = *n;
            }
            if let Some(n) = n_theta {
                spec.march.n_theta = *n;
            }
            spec.march.validate()?;
            cmd_march(&spec, out, *dump_every)
        }
        Command::Sweep { gammas, b0s, b0q0s } => {
            let grid = Grid {
                gammas: gammas.clone(),
                b0s: b0s.clone(),
                b0q0s: b0q0s.clone(),
                mu: spec.mu,
                a: spec.a,
                rho0: spec.rho0,
            };
            cmd_sweep(&grid, out)
        }
    }
}

fn cmd_solve(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let bg = solve(spec.gas()?, spec.q0, spec.rho0, spec.b0)?;
    write_json(&out.join("background.json"), &bg)?;
    write_csv(&out.join("background.csv"), background_rows(&bg)?)?;
    let coeffs = linear_coefficients(&bg)?;
    write_csv(&out.join("coefficients.csv"), coeffs.nodes.iter().map(CoefficientRow::from))?;
    let d = &bg.diagnostics;
    println!("s0 = {}", bg.s0);
    println!(
        "tangency {:.3e}  jump {:.3e}  bernoulli {:.3e}  entropy {}",
        d.tangency_residual, d.rh_residual, d.bernoulli_drift, d.entropy.holds
    );
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct PolarReport {
    critical: conic_core::background::CriticalAngle,
    points: Vec<conic_core::background::ApplePoint>,
}

fn cmd_polar(spec: &RunSpec, out: &Path, points: usize) -> Result<Outcome> {
    let gas = spec.gas()?;
    let fs = spec.freestream()?;
    let curve = apple_curve(&gas, &fs, points);
    let critical = critical_angle(&gas, &fs)?;
    write_csv(&out.join("polar.csv"), curve.iter())?;
    println!("critical cone slope = {:.12e} at shock slope {:.12e}", critical.cone_slope, critical.s0);
    write_json(&out.join("polar.json"), &PolarReport { critical, points: curve })?;
    Ok(Outcome::Pass)
}

fn cmd_asymptotics(spec: &RunSpec, out: &Path, b0q0: &[f64], names: &[String]) -> Result<Outcome> {
    let quantities: Vec<Quantity> = if names.is_empty() {
        Quantity::BACKGROUND.to_vec()
    } else {
        names
            .iter()
            .map(|n| Quantity::from_name(n).ok_or_else(|| anyhow!("unknown quantity '{n}'")))
            .collect::<Result<_>>()?
    };
    let gas = spec.gas()?;
    let q0s: Vec<f64> = b0q0.iter().map(|bq| bq / spec.b0).collect();
    let fits = quantities
        .iter()
        .map(|&q| fit_remainder_rate(q, spec.b0, &gas, spec.rho0, &q0s).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    write_csv(&out.join("asymptotics.csv"), fits.iter().flat_map(|f| f.points.iter().map(ComparisonRow::from)))?;
    write_json(&out.join("asymptotics.json"), &fits)?;
    for f in &fits {
        println!(
            "{:>12}  exponent {:+.3} (expected {:+.3})  r2 {:.4}  {}",
            f.quantity.name(),
            f.exponent_fitted,
            f.exponent_expected,
            f.r_squared,
            if f.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(Outcome::from_pass(fits.iter().all(|f| f.passed)))
}

fn cmd_stability(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let bg = solve(spec.gas()?, spec.q0, spec.rho0, spec.b0)?;
    let rep = multiplier_eval(&bg, spec.mu)?;
    write_json(&out.join("stability.json"), &rep)?;
    write_csv(&out.join("multiplier.csv"), multiplier_rows(&rep))?;
    println!(
        "interior {}  window {}  cone residual {:.3e}  Q0 {:.6e} (leading {:.6e})  verdict {}",
        rep.interior_ok,
        rep.lambda_window_ok,
        rep.cone_cancellation_residual,
        rep.q0,
        rep.q0_closed_form,
        if rep.verdict { "pass" } else { "FAIL" }
    );
    Ok(Outcome::from_pass(rep.verdict))
}

/// Ratio bound accepted by the trace-inequality check.
pub const HARDY_TOLERANCE: f64 = 1e-10;

#[derive(Serialize)]
struct HardyReport {
    mu: f64,
    t_end: f64,
    weight: f64,
    seed: u64,
    constant_ratio: f64,
    power_ratio: f64,
    outcome: conic_core::stability::HardyOutcome,
    violations: usize,
    pass: bool,
}

/// Analytic profiles: a constant and `z^(|mu|/2)`.
pub fn analytic_profiles(mu: f64) -> (impl Profile, impl Profile) {
    let k = 0.5 * mu.abs();
    (|_: f64| (1.0, 0.0), move |z: f64| (z.powf(k), k * z.powf(k - 1.0)))
}

fn cmd_hardy(spec: &RunSpec, out: &Path, n: usize, t_end: f64, harmonics: usize, weight: f64) -> Result<Outcome> {
    let polys = random_trig_polynomials(n, t_end, harmonics, spec.march.seed);
    let (c, p) = analytic_profiles(spec.mu);
    let mut samples: Vec<&dyn Profile> = vec![&c, &p];
    samples.extend(polys.iter().map(|p| p as &dyn Profile));
    let outcome = hardy_check_weighted(&samples, spec.mu, t_end, weight)?;
    let violations = outcome.ratios.iter().filter(|r| **r > 1.0 + HARDY_TOLERANCE).count();
    let rep = HardyReport {
        mu: spec.mu,
        t_end,
        weight,
        seed: spec.march.seed,
        constant_ratio: outcome.ratios[0],
        power_ratio: outcome.ratios[1],
        pass: violations == 0,
        violations,
        outcome,
    };
    println!(
        "worst ratio {:.6} (sample {})  violations {}/{}  {}",
        rep.outcome.worst_ratio,
        rep.outcome.worst_index,
        violations,
        samples.len(),
        if rep.pass { "pass" } else { "FAIL" }
    );
    write_json(&out.join("hardy.json"), &rep)?;
    Ok(Outcome::from_pass(rep.pass))
}

#[derive(Serialize)]
struct MarchSummary<'a> {
    spec: &'a RunSpec,
    verdict: conic_core::perturb::EnergyVerdict,
    report: &'a conic_core::perturb::EnergyReport,
}

fn cmd_march(spec: &RunSpec, out: &Path, dump_every: Option<usize>) -> Result<Outcome> {
    let bg = solve(spec.gas()?, spec.q0, spec.rho0, spec.b0)?;
    if spec.march.exceeds_smallness(spec.b0, spec.q0, spec.gamma) {
        eprintln!("warning: epsilon is not small against the hypersonic smallness scale");
    }
    let dump_dir = out.join("stations");
    if dump_every.is_some() {
        create_dir_all(&dump_dir)?;
    }
    let mut count = 0usize;
    let mut dump_err: Option<anyhow::Error> = None;
    let observe = |f: &PerturbationField| {
        if let (Some(k), None) = (dump_every, &dump_err) {
            if count.is_multiple_of(k.max(1)) {
                let path = dump_dir.join(format!("station_{count:06}.bin"));
                let res = File::create(&path)
                    .map_err(anyhow::Error::from)
                    .and_then(|file| StationDump::from(f).write(&mut BufWriter::new(file)));
                if let Err(e) = res {
                    dump_err = Some(e.context(format!("writing {}", path.display())));
                }
            }
        }
        count += 1;
    };
    let report = run_march_observed(&spec.march, &bg, observe)?;
    if let Some(e) = dump_err {
        return Err(e);
    }
    let verdict = energy_diagnostics(&report);
    write_csv(&out.join("march.csv"), series_rows(&report))?;
    write_json(&out.join("march.json"), &MarchSummary { spec, verdict, report: &report })?;
    let m0 = report.decay.map_or(f64::NAN, |d| d.m0);
    println!(
        "steps {}  z_end {:.3}  m0 {:.4}  energy ratio {:.4}  shock ratio {:.4}  trace ratio {:.4}  verdict {}",
        report.steps,
        report.z_end(),
        m0,
        verdict.volume_ratio,
        verdict.shock_ratio,
        verdict.hardy_ratio,
        if verdict.pass { "pass" } else { "FAIL" }
    );
    Ok(Outcome::from_pass(verdict.pass))
}

fn cmd_sweep(grid: &Grid, out: &Path) -> Result<Outcome> {
    let rows = multiplier_sweep(grid)?;
    write_csv(&out.join("sweep.csv"), rows.iter())?;
    let failed = rows.iter().filter(|r| !r.verdict).count();
    println!("{} points, {} failed", rows.len(), failed);
    Ok(Outcome::from_pass(failed == 0))
}
