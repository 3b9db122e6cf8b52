//! The apple curve: cone slope reached by integrating inward from every
//! admissible shock slope, and its maximum (the detachment angle).

use alloc::vec::Vec;

use super::{post_shock_state, rhs_offset, max_shock_slope};
use crate::error::{Error, Result};
use crate::gas::{Freestream, GasModel};
use crate::math::{atan, tan};
use crate::ode::{dopri45_event, Tolerances};
use crate::roots::{brent, golden_max};

/// One point of the apple curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApplePoint {
    pub s0: f64,
    pub cone_slope: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub rho: f64,
}

impl ApplePoint {
    /// `u_z^2 - c^2` on the cone surface.
    pub fn axial_margin(&self, gas: &GasModel) -> f64 {
        self.u_z * self.u_z - gas.sound_speed_sq(self.rho)
    }
}

/// Largest cone slope that still carries an attached shock.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalAngle {
    pub s0: f64,
    pub cone_slope: f64,
    /// True when the maximum sits where the cone flow turns sonic in `z`.
    pub axial_sonic_limited: bool,
}

/// Cone slope on which the flow behind a shock of slope `s0` becomes tangent.
pub fn cone_for_shock(s0: f64, gas: &GasModel, fs: &Freestream) -> Result<ApplePoint> {
    let post = post_shock_state(s0, gas, fs)?;
    let tol = Tolerances { rtol: 1e-11, atol: 1e-300, max_steps: 200_000 };
    let y0 = [post.rho, post.u_z, post.g];
    let g_rate = rhs_offset(gas, s0, 0.0, &y0)?[2];
    let h0 = (0.5 * post.g / g_rate).clamp(1e-300, 1e-2 * s0);
    let out = dopri45_event(
        |t, y: &[f64; 3]| rhs_offset(gas, s0, t, y),
        |_, y| y[2],
        0.0,
        y0,
        -s0 * (1.0 - 1e-9),
        -h0,
        tol,
    )?;
    if !out.event {
        return Err(Error::NoConvergence { what: "apple curve tangency" });
    }
    let s = s0 + out.t;
    Ok(ApplePoint { s0, cone_slope: s, u_r: s * out.y[1] - out.y[2], u_z: out.y[1], rho: out.y[0] })
}

/// Sample the apple curve at `n` shock angles spread evenly in angle between
/// the Mach angle and `0.99 pi/2`. Shock slopes whose inward integration
/// reaches a sonic point before tangency are dropped.
pub fn apple_curve(gas: &GasModel, fs: &Freestream, n: usize) -> Vec<ApplePoint> {
    let lo = atan(fs.mach_slope());
    let hi = atan(max_shock_slope());
    (1..=n)
        .filter_map(|k| {
            let beta = lo + (hi - lo) * k as f64 / (n + 1) as f64;
            cone_for_shock(tan(beta), gas, fs).ok()
        })
        .collect()
}

/// Maximum of the apple curve over shocks whose downstream flow stays
/// supersonic in `z` up to the cone.
///
/// The samples are scanned in angle; the admissible range is cut where the
/// cone-surface margin `u_z^2 - c^2` changes sign, and the maximum is refined
/// by golden-section search inside it.
pub fn critical_angle(gas: &GasModel, fs: &Freestream) -> Result<CriticalAngle> {
    let lo = atan(fs.mach_slope());
    let hi = atan(max_shock_slope());
    let n = 64;
    let angles: Vec<f64> = (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect();
    let points: Vec<Option<ApplePoint>> =
        angles.iter().map(|b| cone_for_shock(tan(*b), gas, fs).ok()).collect();

    let margin = |beta: f64| cone_for_shock(tan(beta), gas, fs).map(|p| p.axial_margin(gas));
    let mut top = hi;
    let mut limited = false;
    let mut admissible = n;
    for k in 1..n {
        if let (Some(a), Some(b)) = (points[k - 1], points[k]) {
            if a.axial_margin(gas) > 0.0 && b.axial_margin(gas) <= 0.0 {
                top = brent(margin, angles[k - 1], angles[k], 1e-13, 200)?;
                limited = true;
                admissible = k;
                break;
            }
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for (k, p) in points.iter().enumerate().take(admissible) {
        if let Some(p) = p {
            if p.axial_margin(gas) > 0.0 && best.is_none_or(|(_, c)| p.cone_slope > c) {
                best = Some((k, p.cone_slope));
            }
        }
    }
    let (k, _) = best.ok_or(Error::NoConvergence { what: "apple curve sampling" })?;
    let a = if k == 0 { lo } else { angles[k - 1] };
    let b = if k + 1 >= admissible { top } else { angles[k + 1] };
    let objective = |beta: f64| {
        Ok(match cone_for_shock(tan(beta), gas, fs) {
            Ok(p) if p.axial_margin(gas) > 0.0 || beta == top => p.cone_slope,
            _ => f64::NEG_INFINITY,
        })
    };
    let (mut beta, mut cone) = golden_max(objective, a, b, 1e-12)?;
    if limited && k + 1 >= admissible {
        let edge = cone_for_shock(tan(top), gas, fs)?.cone_slope;
        if edge >= cone {
            beta = top;
            cone = edge;
        }
    }
    let limited = limited && beta == top;
    Ok(CriticalAngle { s0: tan(beta), cone_slope: cone, axial_sonic_limited: limited })
}
