//! Jump conditions across the conical shock.

use crate::error::{Error, Result};
use crate::gas::{Freestream, GasModel};
use crate::math::{exp, expm1, ln, ln_1p};
use crate::roots::brent;

/// Flow state just behind a shock of slope `s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PostShock {
    pub s0: f64,
    /// Density ratio `rho+/rho0`.
    pub alpha: f64,
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
    /// `s0 u_z - u_r`, evaluated without cancellation as `s0 q0 / alpha`.
    pub g: f64,
}

fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + ln_1p(-exp(-x))
    } else {
        ln(expm1(x))
    }
}

/// Logarithm of `alpha^2 (alpha^(gamma-1) - 1) / (alpha^2 - 1)` written in `u = ln alpha`.
pub fn ln_density_ratio_lhs(u: f64, gamma: f64) -> f64 {
    2.0 * u + ln_expm1((gamma - 1.0) * u) - ln_expm1(2.0 * u)
}

/// Right-hand side of the density-ratio equation at shock slope `s0`.
pub fn density_ratio_rhs(s0: f64, gas: &GasModel, fs: &Freestream) -> f64 {
    let c0sq = gas.sound_speed_sq(fs.rho0);
    (gas.gamma - 1.0) * s0 * s0 * fs.q0 * fs.q0 / (2.0 * c0sq * (1.0 + s0 * s0))
}

/// Compressive density ratio `alpha > 1` across a shock of slope `s0`.
///
/// The left side tends to `(gamma-1)/2` as `alpha -> 1`, so a root exists
/// exactly when `s0` exceeds the Mach slope of the free stream.
pub fn solve_alpha(s0: f64, gas: &GasModel, fs: &Freestream) -> Result<f64> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::Domain { what: "shock slope", value: s0 });
    }
    let gm1 = gas.gamma - 1.0;
    let target = ln(density_ratio_rhs(s0, gas, fs));
    let f = |u: f64| Ok(ln_density_ratio_lhs(u, gas.gamma) - target);
    let u_lo = 1e-14;
    if f(u_lo)? >= 0.0 {
        return Err(Error::NoCompressiveRoot { s0 });
    }
    let mut u_hi = (target / gm1).max(1.0) + 1.0;
    while f(u_hi)? <= 0.0 {
        u_hi *= 2.0;
        if u_hi > 1e4 {
            return Err(Error::NoCompressiveRoot { s0 });
        }
    }
    let u = brent(f, u_lo, u_hi, 1e-16, 300)?;
    Ok(exp(u))
}

/// Post-shock state from the jump conditions for shock slope `s0`.
pub fn post_shock_state(s0: f64, gas: &GasModel, fs: &Freestream) -> Result<PostShock> {
    let alpha = solve_alpha(s0, gas, fs)?;
    Ok(post_shock_from_alpha(s0, alpha, fs))
}

pub(crate) fn post_shock_from_alpha(s0: f64, alpha: f64, fs: &Freestream) -> PostShock {
    let q0 = fs.q0;
    let d = 1.0 + s0 * s0;
    PostShock {
        s0,
        alpha,
        rho: alpha * fs.rho0,
        u_z: q0 * (1.0 + s0 * s0 / alpha) / d,
        u_r: s0 * q0 * (1.0 - 1.0 / alpha) / d,
        g: s0 * q0 / alpha,
    }
}

/// Residuals of the two jump relations and Bernoulli's law, each scaled to be
/// dimensionless.
pub fn jump_residuals(post: &PostShock, gas: &GasModel, fs: &Freestream) -> [f64; 3] {
    let (q0, rho0, s0) = (fs.q0, fs.rho0, post.s0);
    let mass = (post.rho * post.u_r - s0 * (post.rho * post.u_z - rho0 * q0)) / (rho0 * q0);
    let tangential = (post.u_z - q0 + s0 * post.u_r) / q0;
    let h = gas.sound_speed_sq(post.rho) / (gas.gamma - 1.0);
    let bern = (0.5 * (post.u_r * post.u_r + post.u_z * post.u_z) + h - fs.bernoulli)
        / fs.bernoulli.max(1.0);
    [mass, tangential, bern]
}
