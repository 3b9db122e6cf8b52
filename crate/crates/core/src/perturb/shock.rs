//! Free-boundary closure on the shock: continuity of the potential fixes the
//! trace of the perturbation, and the Rankine-Hugoniot mass balance fixes the
//! shock slope.

use crate::background::BackgroundSolution;
use crate::error::{Error, Result};
use crate::gas::{density_from_speed, Freestream, GasModel};
use crate::math::{abs, sqrt};
use crate::stability::{shock_coefficients, ShockCoefficients};

/// Shock data at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockState {
    /// `d_z chi - s0`.
    pub delta: f64,
    /// Trace `-(int_0^1 u_r(s0 + t xi) dt) z xi` of the perturbation.
    pub phi: f64,
    /// `d_z phi` on the shock.
    pub phi_z: f64,
    /// `d_r phi` on the shock.
    pub phi_r: f64,
    /// `d_theta phi / r` on the shock.
    pub phi_t: f64,
    /// Density behind the shock.
    pub rho: f64,
    /// `d_r phi + mu1 d_z phi + mu2 xi`, the quadratic remainder of the linearised condition.
    pub kappa: f64,
}

/// Mass-balance closure with the background reference value removed, so the
/// unperturbed shock is reproduced exactly.
#[derive(Debug, Clone)]
pub struct ShockClosure<'a> {
    bg: &'a BackgroundSolution,
    gas: GasModel,
    fs: Freestream,
    reference: f64,
    coeffs: ShockCoefficients,
}

struct Trial {
    e: f64,
    rho: f64,
    phi_z: f64,
    phi_r: f64,
    phi_t: f64,
    normal_down: f64,
    norm: f64,
}

/// Data closing the two shock derivatives besides continuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShockData {
    /// `d_r phi` on the shock.
    Radial(f64),
    /// Outgoing invariant `lambda d_z phi + p2 d_r phi`.
    Outgoing { w: f64, lambda: f64, p2: f64 },
}

impl ShockData {
    /// `(d_z phi, d_r phi)` satisfying `d_z phi + chi_z d_r phi = along`.
    pub fn resolve(&self, chi_z: f64, along: f64) -> (f64, f64) {
        match *self {
            ShockData::Radial(q) => (along - chi_z * q, q),
            ShockData::Outgoing { w, lambda, p2 } => {
                let q = (w - lambda * along) / (p2 - lambda * chi_z);
                (along - chi_z * q, q)
            }
        }
    }
}

impl<'a> ShockClosure<'a> {
    pub fn new(bg: &'a BackgroundSolution) -> Result<Self> {
        let mut out = Self {
            bg,
            gas: *bg.gas(),
            fs: *bg.freestream(),
            reference: 0.0,
            coeffs: shock_coefficients(bg)?,
        };
        out.reference = out.trial(1.0, 0.0, 0.0, 0.0, 0.0, ShockData::Radial(0.0))?.e;
        Ok(out)
    }

    pub fn coefficients(&self) -> &ShockCoefficients {
        &self.coeffs
    }

    /// `a1 = -(int_0^1 u_r(s0 + t xi) dt) z`, so that the trace is `a1 xi`.
    pub fn trace_factor(&self, z: f64, xi: f64) -> Result<f64> {
        if xi == 0.0 {
            return Ok(-z * self.bg.state_at(self.bg.s0)?.u_r);
        }
        Ok(-z * self.bg.flux_integral(xi)? / xi)
    }

    fn trial(&self, z: f64, xi: f64, chi_t: f64, g: f64, delta: f64, data: ShockData) -> Result<Trial> {
        let s0 = self.bg.s0;
        let s = s0 + xi;
        let st = self.bg.state_at(s)?;
        let chi = z * s;
        let a = chi_t / chi;
        let chi_z = s0 + delta;
        let (phi_z, phi_r) = data.resolve(chi_z, -g - st.u_r * (chi_z - s));
        let phi_t = -(st.u_r + phi_r) * a;
        let fz = st.u_z + phi_z;
        let fr = st.u_r + phi_r;
        let rho = density_from_speed(&self.gas, &self.fs, fz * fz + fr * fr + phi_t * phi_t)?;
        let normal_down = fr - fz * chi_z - phi_t * a;
        let e = rho * normal_down + self.fs.rho0 * self.fs.q0 * chi_z;
        let norm = sqrt(1.0 + chi_z * chi_z + a * a);
        Ok(Trial { e, rho, phi_z, phi_r, phi_t, normal_down, norm })
    }

    /// Solve for the shock slope given the displacement `xi`, `d_theta chi`
    /// and one more relation between the derivatives of the perturbation.
    pub fn solve(&self, z: f64, xi: f64, chi_t: f64, data: ShockData, guess: f64) -> Result<ShockState> {
        let s0 = self.bg.s0;
        let g = self.bg.flux_integral(xi)?;
        let residual = |d: f64| -> Result<f64> { Ok(self.trial(z, xi, chi_t, g, d, data)?.e - self.reference) };
        let mut delta = guess;
        let mut r = residual(delta)?;
        let h = 1e-7 * s0;
        let mut converged = r == 0.0;
        for _ in 0..40 {
            if converged {
                break;
            }
            let slope = (residual(delta + h)? - residual(delta - h)?) / (2.0 * h);
            if !(slope != 0.0 && slope.is_finite()) {
                return Err(Error::NoConvergence { what: "shock slope" });
            }
            let step = r / slope;
            delta -= step;
            r = residual(delta)?;
            converged = r == 0.0 || abs(step) <= 1e-12 * s0;
        }
        if !converged {
            return Err(Error::NoConvergence { what: "shock slope" });
        }
        let t = self.trial(z, xi, chi_t, g, delta, data)?;
        let chi_z = s0 + delta;
        let c = sqrt(self.gas.sound_speed_sq(t.rho));
        let upstream = self.fs.q0 * chi_z / t.norm;
        let downstream = abs(t.normal_down) / t.norm;
        if !(upstream > self.fs.c0 && downstream < c && t.normal_down < 0.0) {
            return Err(Error::Entropy { z });
        }
        Ok(ShockState {
            delta,
            phi: -z * g,
            phi_z: t.phi_z,
            phi_r: t.phi_r,
            phi_t: t.phi_t,
            rho: t.rho,
            kappa: t.phi_r + self.coeffs.mu1 * t.phi_z + self.coeffs.mu2 * xi,
        })
    }
}
