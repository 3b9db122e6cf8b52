//! Self-similar background flow between the cone `r = b0 z` and the conical
//! shock `r = s0 z`.
//!
//! The conical ODE is integrated in the offset `t = s - b0` with state
//! `(rho, u_z, g)` where `g = s u_z - u_r`. In the hypersonic regime the shock
//! hugs the cone (`s0 - b0` can fall below `1e-20`), and carrying the offset
//! and `g` explicitly keeps every quantity at full relative precision.

mod apple;
pub mod jump;

use alloc::vec::Vec;

pub use apple::{apple_curve, critical_angle, ApplePoint, CriticalAngle};
pub use jump::{jump_residuals, post_shock_state, solve_alpha, PostShock};

use crate::error::{Error, Result};
use crate::gas::{Freestream, GasModel};
use crate::math::{abs, expm1, powf, sqrt, tan};
use crate::ode::{dopri45, rk4_step, rk4_step_guarded, Tolerances};
use crate::roots::brent;

/// Density and velocity on the ray `r/z = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConicalState {
    pub s: f64,
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
}

impl ConicalState {
    pub fn speed_sq(&self) -> f64 {
        self.u_r * self.u_r + self.u_z * self.u_z
    }
}

/// `d/ds` of a [`ConicalState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicalDerivative {
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
}

/// `(1 + s^2) c^2 - (s u_z - u_r)^2`.
pub fn denominator(state: &ConicalState, gas: &GasModel) -> f64 {
    let g = state.s * state.u_z - state.u_r;
    (1.0 + state.s * state.s) * gas.sound_speed_sq(state.rho) - g * g
}

/// Right-hand side of the conical ODE.
pub fn ode_rhs(state: &ConicalState, gas: &GasModel) -> Result<ConicalDerivative> {
    let ConicalState { s, rho, u_r, u_z } = *state;
    if !(rho > 0.0) {
        return Err(Error::Domain { what: "density", value: rho });
    }
    let c2 = gas.sound_speed_sq(rho);
    let g = s * u_z - u_r;
    let d = (1.0 + s * s) * c2 - g * g;
    if !(d > 0.0) {
        return Err(Error::SonicDegeneracy { s, denominator: d });
    }
    Ok(ConicalDerivative {
        rho: -rho * u_r * g / (s * d),
        u_r: -c2 * u_r / (s * d),
        u_z: c2 * u_r / d,
    })
}

/// Characteristic slopes `lambda_1 < lambda_2` of the conical flow.
pub fn characteristic_slopes(state: &ConicalState, gas: &GasModel) -> Result<(f64, f64)> {
    let c2 = gas.sound_speed_sq(state.rho);
    let a = state.u_z * state.u_z - c2;
    let q2 = state.speed_sq();
    if !(a > 0.0) {
        return Err(Error::StrongBranchRejected { s: state.s });
    }
    let root = sqrt(c2) * sqrt((q2 - c2).max(0.0));
    let ru = state.u_r * state.u_z;
    Ok(((ru - root) / a, (ru + root) / a))
}

/// The free-stream-facing threshold `b_*` on the cone slope, root of
/// `1 - (gamma-1)/2 b^2 (1+b^2) = 0`.
pub fn supersonic_z_threshold(gamma: f64) -> f64 {
    sqrt(0.5 * (sqrt((gamma + 7.0) / (gamma - 1.0)) - 1.0))
}

/// Largest admissible shock slope considered by the shooting scan.
pub fn max_shock_slope() -> f64 {
    tan(0.99 * core::f64::consts::FRAC_PI_2)
}

/// State vector `(rho, u_z, g)` as a function of `t = s - anchor`.
#[inline]
pub(crate) fn rhs_offset(gas: &GasModel, anchor: f64, t: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
    let [rho, u_z, g] = *y;
    let s = anchor + t;
    if !(rho > 0.0) {
        return Err(Error::Domain { what: "density", value: rho });
    }
    let c2 = gas.sound_speed_sq(rho);
    let u_r = s * u_z - g;
    let d = (1.0 + s * s) * c2 - g * g;
    if !(d > 0.0) {
        return Err(Error::SonicDegeneracy { s, denominator: d });
    }
    let k = c2 * u_r / d;
    Ok([-rho * u_r * g / (s * d), k, u_z + (1.0 + s * s) * k / s])
}

fn offset_denominator(gas: &GasModel, anchor: f64, t: f64, y: &[f64; 3]) -> f64 {
    let s = anchor + t;
    (1.0 + s * s) * gas.sound_speed_sq(y[0]) - y[2] * y[2]
}

/// Which integrator builds the background table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Integrator {
    /// Classical RK4 on the node grid, halving steps where the ODE denominator
    /// drops below `1e-3` of its shock value.
    Rk4,
    /// Adaptive Dormand-Prince 4(5) between consecutive nodes.
    DormandPrince { rtol: f64 },
}

/// Controls for [`shoot_attached_shock`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShootOptions {
    pub nodes: usize,
    pub scan_nodes: usize,
    pub integrator: Integrator,
    /// Exponential grading of the node offsets toward the cone.
    pub grading: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { nodes: 2000, scan_nodes: 200, integrator: Integrator::Rk4, grading: 3.0 }
    }
}

/// A cone in a uniform supersonic stream.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeProblem {
    pub gas: GasModel,
    pub freestream: Freestream,
    pub b0: f64,
}

impl ConeProblem {
    pub fn new(gas: GasModel, q0: f64, rho0: f64, b0: f64) -> Result<Self> {
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::Domain { what: "b0", value: b0 });
        }
        let freestream = Freestream::new(&gas, q0, rho0)?;
        Ok(Self { gas, freestream, b0 })
    }

    /// Post-shock state for a shock at offset `width` from the cone.
    pub fn post_shock(&self, width: f64) -> Result<PostShock> {
        post_shock_state(self.b0 + width, &self.gas, &self.freestream)
    }

    /// Integrate from the shock at offset `width` down to the cone, returning
    /// `(offsets, states)` in ascending offset.
    pub fn integrate_inward(
        &self,
        width: f64,
        post: &PostShock,
        nodes: usize,
        grading: f64,
        integrator: Integrator,
    ) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
        let nodes = nodes.max(2);
        let offsets = graded_offsets(width, nodes, grading);
        let mut ys = alloc::vec![[0.0; 3]; nodes + 1];
        let mut y = [post.rho, post.u_z, post.g];
        ys[nodes] = y;
        let gas = self.gas;
        let b0 = self.b0;
        let mut f = |t: f64, y: &[f64; 3]| rhs_offset(&gas, b0, t, y);
        let d_shock = offset_denominator(&gas, b0, width, &y);
        let stiff = |t: f64, y: &[f64; 3]| offset_denominator(&gas, b0, t, y) < 1e-3 * d_shock;
        for k in (0..nodes).rev() {
            let (t1, t0) = (offsets[k + 1], offsets[k]);
            y = match integrator {
                Integrator::Rk4 => rk4_step_guarded(&mut f, &stiff, t1, &y, t0 - t1, 1e-12)?,
                Integrator::DormandPrince { rtol } => {
                    let tol = Tolerances { rtol, atol: 1e-300, max_steps: 100_000 };
                    dopri45(&mut f, t1, y, t0, t0 - t1, tol)?.y
                }
            };
            ys[k] = y;
        }
        Ok((offsets, ys))
    }

    /// Tangency defect `u_r(b0) - b0 u_z(b0)` for a shock at offset `width`.
    pub fn tangency_residual(&self, width: f64, nodes: usize, integrator: Integrator) -> Result<f64> {
        let post = self.post_shock(width)?;
        let (_, ys) = self.integrate_inward(width, &post, nodes, 3.0, integrator)?;
        Ok(-ys[0][2])
    }

    /// Find the weak attached shock by shooting on `s0`.
    pub fn shoot(&self, opts: &ShootOptions) -> Result<BackgroundSolution> {
        shoot_attached_shock(self, opts)
    }
}

/// Offsets `0 = t_0 < ... < t_n = width`, denser near the cone.
fn graded_offsets(width: f64, n: usize, grading: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=n)
        .map(|k| {
            let x = k as f64 / n as f64;
            if grading.abs() < 1e-12 {
                width * x
            } else {
                width * expm1(grading * x) / expm1(grading)
            }
        })
        .collect();
    t[0] = 0.0;
    t[n] = width;
    t
}

/// Entropy and Mach conditions at the shock.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyCheck {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mach_slope: f64,
    pub holds: bool,
}

/// Quality measures of a converged background.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    /// `|u_r(b0) - b0 u_z(b0)|`.
    pub tangency_residual: f64,
    /// Largest scaled residual of the jump relations and Bernoulli at the shock.
    pub rh_residual: f64,
    /// Largest `|q^2/2 + h - C0|` over the table.
    pub bernoulli_drift: f64,
    pub entropy: EntropyCheck,
    /// Smallest `u_z^2 - c^2` over the table.
    pub min_axial_margin: f64,
    /// Smallest ODE denominator over the table.
    pub min_denominator: f64,
    /// Outward extension length beyond the shock (zero when it rounds away).
    pub extension: f64,
}

/// Converged background with a Hermite-interpolated table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BackgroundSolution {
    pub problem: ConeProblem,
    pub s0: f64,
    /// `s0 - b0`, held exactly.
    pub width: f64,
    pub post: PostShock,
    pub diagnostics: Diagnostics,
    offsets: Vec<f64>,
    ys: Vec<[f64; 3]>,
    dys: Vec<[f64; 3]>,
    shock_index: usize,
}

/// Shoot for the weak shock attached to the cone tip.
///
/// The width `s0 - b0` is scanned geometrically from just above the Mach
/// slope (or from a tiny floor when the cone already lies outside the Mach
/// cone). The first sign change of the tangency residual from negative to
/// positive brackets the weak root, which Brent's method then refines at full
/// resolution.
pub fn shoot_attached_shock(problem: &ConeProblem, opts: &ShootOptions) -> Result<BackgroundSolution> {
    let b0 = problem.b0;
    let fs = &problem.freestream;
    let s_mach = fs.mach_slope() * (1.0 + 1e-9);
    let w_max = max_shock_slope() - b0;
    if w_max <= 0.0 {
        return Err(Error::ShockDetached { b0 });
    }
    let coarse = |w: f64| problem.tangency_residual(w, opts.scan_nodes, Integrator::Rk4);
    let fine = |w: f64| problem.tangency_residual(w, opts.nodes, opts.integrator);

    let shock_margin_ok = |w: f64| {
        problem.post_shock(w).is_ok_and(|p| {
            p.u_z * p.u_z > problem.gas.sound_speed_sq(p.rho)
        })
    };
    let mut w_lo = if s_mach > b0 { s_mach - b0 } else { b0 * 1e-30 };
    if s_mach <= b0 {
        loop {
            match coarse(w_lo) {
                Ok(r) if r < 0.0 => break,
                Ok(_) if w_lo > b0 * 1e-290 => w_lo *= 1e-10,
                _ => return Err(Error::ShockDetached { b0 }),
            }
        }
    }
    let mut last_neg: Option<f64> = None;
    let mut w = w_lo;
    let bracket = loop {
        if w > w_max || !shock_margin_ok(w) {
            return Err(Error::ShockDetached { b0 });
        }
        match coarse(w) {
            Ok(r) if r < 0.0 => last_neg = Some(w),
            Ok(_) => {
                if let Some(a) = last_neg {
                    break (a, w);
                }
            }
            Err(_) => last_neg = None,
        }
        w += (0.5 * w).min(0.02 * (b0 + w));
    };
    let (mut a, mut b) = bracket;
    let (fa, fb) = (fine(a)?, fine(b)?);
    if !(fa < 0.0 && fb >= 0.0) {
        let pad = 0.5 * (b - a);
        a = (a - pad).max(0.5 * a);
        b += pad;
        if !(fine(a)? < 0.0 && fine(b)? >= 0.0) {
            return Err(Error::NoConvergence { what: "tangency bracket" });
        }
    }
    let width = brent(fine, a, b, 1e-14 * a, 400)?;
    build_solution(problem, width, opts)
}

fn build_solution(problem: &ConeProblem, width: f64, opts: &ShootOptions) -> Result<BackgroundSolution> {
    let gas = problem.gas;
    let fs = problem.freestream;
    let post = problem.post_shock(width)?;
    let (offsets, ys) = problem.integrate_inward(width, &post, opts.nodes, opts.grading, opts.integrator)?;
    let shock_index = offsets.len() - 1;

    let shock_state = ConicalState { s: post.s0, rho: post.rho, u_r: post.u_r, u_z: post.u_z };
    let (lambda1, lambda2) = characteristic_slopes(&shock_state, &gas)
        .map_err(|_| Error::StrongBranchRejected { s: post.s0 })?;
    let mach_slope = fs.mach_slope();
    let holds = lambda1 < post.s0 && post.s0 < lambda2 && post.s0 > mach_slope && post.alpha > 1.0;
    if !holds {
        return Err(Error::BranchSelection { s0: post.s0 });
    }
    let entropy = EntropyCheck { lambda1, lambda2, mach_slope, holds };
    let rh_residual = jump_residuals(&post, &gas, &fs).iter().fold(0.0f64, |m, r| m.max(abs(*r)));

    let mut sol = BackgroundSolution {
        problem: *problem,
        s0: post.s0,
        width,
        post,
        diagnostics: Diagnostics {
            tangency_residual: abs(ys[0][2]),
            rh_residual,
            bernoulli_drift: 0.0,
            entropy,
            min_axial_margin: 0.0,
            min_denominator: 0.0,
            extension: 0.0,
        },
        dys: Vec::new(),
        offsets,
        ys,
        shock_index,
    };
    sol.refresh_derivatives()?;
    let tau0 = powf(fs.q0, -4.0 / (gas.gamma - 1.0)) * width;
    let sol = if width + tau0 > width { sol.extend(tau0, 8)? } else { sol };
    let mut sol = sol;
    sol.refresh_diagnostics()?;
    Ok(sol)
}

impl BackgroundSolution {
    fn refresh_derivatives(&mut self) -> Result<()> {
        let gas = self.problem.gas;
        let b0 = self.problem.b0;
        self.dys = self
            .offsets
            .iter()
            .zip(&self.ys)
            .map(|(t, y)| rhs_offset(&gas, b0, *t, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    fn refresh_diagnostics(&mut self) -> Result<()> {
        let gas = self.problem.gas;
        let c0 = self.problem.freestream.bernoulli;
        let mut drift = 0.0f64;
        let mut margin = f64::INFINITY;
        let mut dmin = f64::INFINITY;
        for i in 0..self.offsets.len() {
            let st = self.node(i);
            let c2 = gas.sound_speed_sq(st.rho);
            drift = drift.max(abs(0.5 * st.speed_sq() + c2 / (gas.gamma - 1.0) - c0));
            let m = st.u_z * st.u_z - c2;
            if !(m > 0.0) {
                return Err(Error::StrongBranchRejected { s: st.s });
            }
            margin = margin.min(m);
            dmin = dmin.min(offset_denominator(&gas, self.problem.b0, self.offsets[i], &self.ys[i]));
        }
        self.diagnostics.bernoulli_drift = drift;
        self.diagnostics.min_axial_margin = margin;
        self.diagnostics.min_denominator = dmin;
        self.diagnostics.extension = self.offsets[self.offsets.len() - 1] - self.width;
        Ok(())
    }

    pub fn b0(&self) -> f64 {
        self.problem.b0
    }

    pub fn gas(&self) -> &GasModel {
        &self.problem.gas
    }

    pub fn freestream(&self) -> &Freestream {
        &self.problem.freestream
    }

    /// Number of stored nodes, including any outward extension.
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Index of the node sitting on the shock.
    pub fn shock_index(&self) -> usize {
        self.shock_index
    }

    /// Offset `s - b0` of node `i`.
    pub fn offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// `s u_z - u_r` at node `i`, without cancellation.
    pub fn g(&self, i: usize) -> f64 {
        self.ys[i][2]
    }

    pub fn node(&self, i: usize) -> ConicalState {
        self.state_from(self.offsets[i], &self.ys[i])
    }

    fn state_from(&self, t: f64, y: &[f64; 3]) -> ConicalState {
        let s = self.problem.b0 + t;
        ConicalState { s, rho: y[0], u_r: s * y[1] - y[2], u_z: y[1] }
    }

    /// Largest offset covered by the table.
    pub fn max_offset(&self) -> f64 {
        self.offsets[self.offsets.len() - 1]
    }

    /// Interpolated `(rho, u_z, g)` at offset `t`.
    pub fn raw_at_offset(&self, t: f64) -> Result<[f64; 3]> {
        let n = self.offsets.len();
        if !(t >= 0.0 && t <= self.offsets[n - 1]) {
            return Err(Error::OutsideAnnulus { z: 1.0, r: self.problem.b0 + t });
        }
        let i = self.offsets.partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
        let (t0, t1) = (self.offsets[i], self.offsets[i + 1]);
        let h = t1 - t0;
        let x = (t - t0) / h;
        let (y0, y1, d0, d1) = (&self.ys[i], &self.ys[i + 1], &self.dys[i], &self.dys[i + 1]);
        let x2 = x * x;
        let x3 = x2 * x;
        let h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        let h10 = x3 - 2.0 * x2 + x;
        let h01 = -2.0 * x3 + 3.0 * x2;
        let h11 = x3 - x2;
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = h00 * y0[k] + h10 * h * d0[k] + h01 * y1[k] + h11 * h * d1[k];
        }
        Ok(out)
    }

    /// Interpolated state at offset `t = s - b0`.
    pub fn state_at_offset(&self, t: f64) -> Result<ConicalState> {
        let y = self.raw_at_offset(t)?;
        Ok(self.state_from(t, &y))
    }

    /// Interpolated state at slope `s`.
    pub fn state_at(&self, s: f64) -> Result<ConicalState> {
        self.state_at_offset(s - self.problem.b0)
            .map_err(|_| Error::OutsideAnnulus { z: 1.0, r: s })
    }

    /// `int_{s0}^{s0 + xi} u_r ds`, exactly zero at `xi = 0`.
    pub fn flux_integral(&self, xi: f64) -> Result<f64> {
        if xi == 0.0 {
            return Ok(0.0);
        }
        const X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let mut acc = 0.0;
        for k in 0..3 {
            let t = self.width + 0.5 * xi * (1.0 + X[k]);
            acc += W[k] * self.state_at_offset(t)?.u_r;
        }
        Ok(0.5 * xi * acc)
    }

    /// Potential `z (u_z + s u_r)` and its gradient `(u_z, u_r)` at `(z, r)`.
    pub fn potential_eval(&self, z: f64, r: f64) -> Result<Potential> {
        if !(z > 0.0) {
            return Err(Error::OutsideAnnulus { z, r });
        }
        let st = self
            .state_at_offset((r - self.problem.b0 * z) / z)
            .map_err(|_| Error::OutsideAnnulus { z, r })?;
        Ok(Potential { phi: z * st.u_z + r * st.u_r, phi_z: st.u_z, phi_r: st.u_r })
    }

    /// Copy with the outward extension replaced by `n` RK4 steps over `[s0, s0 + tau]`.
    pub fn extend(&self, tau: f64, n: usize) -> Result<Self> {
        let mut out = self.clone();
        out.offsets.truncate(self.shock_index + 1);
        out.ys.truncate(self.shock_index + 1);
        let gas = self.problem.gas;
        let b0 = self.problem.b0;
        let mut f = |t: f64, y: &[f64; 3]| rhs_offset(&gas, b0, t, y);
        let mut y = self.ys[self.shock_index];
        let n = n.max(1);
        let h = tau / n as f64;
        for k in 0..n {
            let t = self.width + k as f64 * h;
            y = rk4_step(&mut f, t, &y, h)?;
            let t_next = if k + 1 == n { self.width + tau } else { t + h };
            if !(t_next > out.offsets[out.offsets.len() - 1]) {
                continue;
            }
            out.offsets.push(t_next);
            out.ys.push(y);
        }
        out.refresh_derivatives()?;
        out.refresh_diagnostics()?;
        Ok(out)
    }
}

/// Background potential and gradient at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub phi: f64,
    pub phi_z: f64,
    pub phi_r: f64,
}

/// Shoot the weak attached shock with default options.
pub fn solve(gas: GasModel, q0: f64, rho0: f64, b0: f64) -> Result<BackgroundSolution> {
    ConeProblem::new(gas, q0, rho0, b0)?.shoot(&ShootOptions::default())
}
