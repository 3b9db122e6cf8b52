//! Parallel multiplier sweeps over `(gamma, b0, b0 q0)`.

use anyhow::{Context, Result};
use conic_core::asymptotics::expected_exponent;
use conic_core::background::solve;
use conic_core::gas::GasModel;
use conic_core::stability::multiplier_eval;
use rayon::prelude::*;
use serde::Serialize;

/// Environment variable capping the number of sweep threads.
pub const THREADS_VAR: &str = "CONIC_SHOCK_THREADS";

/// Thread pool sized by [`THREADS_VAR`], or by rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR}={v} is not a thread count"))?;
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Axes of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub gammas: Vec<f64>,
    pub b0s: Vec<f64>,
    /// Values of `b0 q0`; the smallest calibrates the identity budget.
    pub b0q0s: Vec<f64>,
    pub mu: f64,
    pub a: f64,
    pub rho0: f64,
}

impl Grid {
    fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &g in &self.gammas {
            for &b in &self.b0s {
                for &bq in &self.b0q0s {
                    out.push((g, b, bq));
                }
            }
        }
        out
    }
}

/// Multiplier verdict at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub b0: f64,
    pub q0: f64,
    pub b0q0: f64,
    pub energy_constant: f64,
    pub energy_constant_leading: f64,
    pub cone_residual: f64,
    pub interior_ok: bool,
    pub window_ok: bool,
    pub identity_error: f64,
    /// `3 |identity(b_min)| (b0 q0 / b_min)^p` with `b_min` the smallest
    /// `b0 q0` of the sweep and `p` the expected remainder exponent.
    pub identity_budget: f64,
    pub verdict: bool,
}

/// Factor on the calibrated remainder allowed for the `C6/C3` identity.
pub const IDENTITY_FACTOR: f64 = 3.0;

/// Evaluate the multiplier conditions over the grid, in grid order.
pub fn multiplier_sweep(grid: &Grid) -> Result<Vec<SweepRow>> {
    let pool = thread_pool()?;
    let pts = grid.points();
    let raw: Vec<Result<(f64, f64, f64, conic_core::stability::MultiplierReport)>> = pool.install(|| {
        pts.par_iter()
            .map(|&(g, b0, bq)| {
                let gas = GasModel::new(grid.a, g)?;
                let bg = solve(gas, bq / b0, grid.rho0, b0)
                    .with_context(|| format!("gamma {g} b0 {b0} b0q0 {bq}"))?;
                Ok((g, b0, bq, multiplier_eval(&bg, grid.mu)?))
            })
            .collect()
    });
    let raw = raw.into_iter().collect::<Result<Vec<_>>>()?;
    let b_min = grid.b0q0s.iter().copied().fold(f64::INFINITY, f64::min);
    let calibration = |g: f64, b0: f64| {
        raw.iter()
            .find(|(gg, bb, bq, _)| *gg == g && *bb == b0 && *bq == b_min)
            .map_or(f64::NAN, |r| r.3.c6_c3_identity.abs())
    };
    Ok(raw
        .iter()
        .map(|(g, b0, bq, rep)| {
            let p = expected_exponent(*g);
            let identity_budget = IDENTITY_FACTOR * calibration(*g, *b0) * (bq / b_min).powf(p);
            let identity_ok = rep.c6_c3_identity.abs() <= identity_budget;
            SweepRow {
                gamma: *g,
                b0: *b0,
                q0: bq / b0,
                b0q0: *bq,
                energy_constant: rep.q0,
                energy_constant_leading: rep.q0_closed_form,
                cone_residual: rep.cone_cancellation_residual,
                interior_ok: rep.interior_ok,
                window_ok: rep.lambda_window_ok,
                identity_error: rep.c6_c3_identity,
                identity_budget,
                verdict: rep.verdict && rep.cone_cancellation_residual <= 1e-12 && identity_ok,
            }
        })
        .collect())
}
