//! Coefficients of the linearised potential equation about the background and
//! of the linearised shock condition.

use alloc::vec::Vec;

use crate::background::{ode_rhs, BackgroundSolution, ConicalState};
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::math::abs;

/// Background data and linear coefficients on one ray `r/z = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointCoefficients {
    pub s: f64,
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub c2: f64,
    pub drho: f64,
    pub du_r: f64,
    pub du_z: f64,
    /// `u_z^2 - c^2`.
    pub axial_margin: f64,
    /// `P1..P5`.
    pub p: [f64; 5],
    /// `P1'..P3'`.
    pub dp: [f64; 3],
}

/// Evaluate `P1..P5` and `P1'..P3'` at a background state.
///
/// Derivatives follow from the conical ODE by the quotient rule, so no
/// numerical differencing is involved.
pub fn point_coefficients(state: &ConicalState, gas: &GasModel) -> Result<PointCoefficients> {
    let d = ode_rhs(state, gas)?;
    let ConicalState { s, rho, u_r, u_z } = *state;
    let gm = gas.gamma;
    let c2 = gas.sound_speed_sq(rho);
    let dc2 = (gm - 1.0) * c2 * d.rho / rho;
    let m = u_z * u_z - c2;
    if !(m > 0.0) {
        return Err(Error::StrongBranchRejected { s });
    }
    let dm = 2.0 * u_z * d.u_z - dc2;
    let p1 = u_z * u_r / m;
    let p2 = (u_r * u_r - c2) / m;
    let p3 = c2 / m;
    let p4 = (-(gm + 1.0) / 2.0 * s * s * u_z * d.u_z
        + (gm - 1.0) / 2.0 * s * u_z * d.u_r
        + s * u_r * d.u_z
        + (gm - 1.0) / 2.0 * u_z * u_r)
        / m;
    let p5 = (-(gm - 1.0) / 2.0 * s * s * u_r * d.u_z
        + (gm + 1.0) / 2.0 * s * u_r * d.u_r
        + s * u_z * d.u_z
        + (gm - 1.0) / 2.0 * u_r * u_r
        - 0.5 * c2)
        / m;
    let dp1 = (d.u_z * u_r + u_z * d.u_r) / m - p1 * dm / m;
    let dp2 = (2.0 * u_r * d.u_r - dc2) / m - p2 * dm / m;
    let dp3 = dc2 / m - p3 * dm / m;
    Ok(PointCoefficients {
        s,
        rho,
        u_r,
        u_z,
        c2,
        drho: d.rho,
        du_r: d.u_r,
        du_z: d.u_z,
        axial_margin: m,
        p: [p1, p2, p3, p4, p5],
        dp: [dp1, dp2, dp3],
    })
}

/// `P1..P5` and `P1'..P3'` on every node of the table between cone and shock.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearCoefficients {
    pub nodes: Vec<PointCoefficients>,
}

pub fn linear_coefficients(bg: &BackgroundSolution) -> Result<LinearCoefficients> {
    let gas = bg.gas();
    let nodes = (0..=bg.shock_index())
        .map(|i| point_coefficients(&bg.node(i), gas))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearCoefficients { nodes })
}

/// Coefficients of the linearised shock condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShockCoefficients {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Coefficients from the shock state: `B1 d_r + B2 d_z + B3 xi` is the
/// linearisation of the Rankine-Hugoniot relation.
pub fn shock_coefficients(bg: &BackgroundSolution) -> Result<ShockCoefficients> {
    let post = bg.post;
    let st = ConicalState { s: post.s0, rho: post.rho, u_r: post.u_r, u_z: post.u_z };
    shock_coefficients_at(&st, bg.gas(), bg.freestream().q0, bg.freestream().rho0)
}

pub fn shock_coefficients_at(st: &ConicalState, gas: &GasModel, q0: f64, rho0: f64) -> Result<ShockCoefficients> {
    let d = ode_rhs(st, gas)?;
    let ConicalState { rho, u_r, u_z, .. } = *st;
    let c2 = gas.sound_speed_sq(rho);
    let w = u_r * u_r + u_z * (u_z - q0);
    let b1 = -rho / c2 * w * u_r + 2.0 * rho * u_r;
    let b2 = -rho / c2 * w * u_z + 2.0 * rho * (u_z - q0) + (rho - rho0) * q0;
    let b3 = rho * (2.0 * u_r * d.u_r + 2.0 * (u_z - q0) * d.u_z + q0 * d.u_z) + d.rho * w
        - rho0 * q0 * d.u_z;
    let scale = rho * q0;
    if !(abs(b1) > 1e-12 * scale) {
        return Err(Error::DivisionSafety { b1 });
    }
    Ok(ShockCoefficients { b1, b2, b3, mu1: b2 / b1, mu2: b3 / b1 })
}
