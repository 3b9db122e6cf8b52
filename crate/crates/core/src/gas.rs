//! Polytropic gas `p = A rho^gamma` and the Bernoulli relation of the free stream.

use crate::error::{Error, Result};
use crate::math::{powf, sqrt};

/// Polytropic equation of state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GasModel {
    pub a: f64,
    pub gamma: f64,
}

impl GasModel {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain { what: "A", value: a });
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::Domain { what: "gamma", value: gamma });
        }
        Ok(Self { a, gamma })
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * powf(rho, self.gamma)
    }

    /// Squared sound speed `c^2 = A gamma rho^(gamma-1)`.
    #[inline]
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        self.a * self.gamma * powf(rho, self.gamma - 1.0)
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain { what: "density", value: rho });
        }
        Ok(sqrt(self.sound_speed_sq(rho)))
    }

    /// Enthalpy `h = c^2 / (gamma - 1)`.
    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain { what: "density", value: rho });
        }
        Ok(self.sound_speed_sq(rho) / (self.gamma - 1.0))
    }

    /// Inverse of [`GasModel::enthalpy`].
    pub fn density_from_enthalpy(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::Domain { what: "enthalpy", value: h });
        }
        Ok(powf((self.gamma - 1.0) * h / (self.a * self.gamma), 1.0 / (self.gamma - 1.0)))
    }

    /// `d(c^2)/d rho`.
    pub fn dc2_drho(&self, rho: f64) -> f64 {
        (self.gamma - 1.0) * self.sound_speed_sq(rho) / rho
    }
}

/// Uniform supersonic stream along the cone axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Freestream {
    pub q0: f64,
    pub rho0: f64,
    pub c0: f64,
    /// Bernoulli constant `q0^2/2 + h(rho0)`.
    pub bernoulli: f64,
}

impl Freestream {
    pub fn new(gas: &GasModel, q0: f64, rho0: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::Domain { what: "rho0", value: rho0 });
        }
        let c0 = gas.sound_speed(rho0)?;
        if !(q0 > c0 && q0.is_finite()) {
            return Err(Error::Domain { what: "q0 (must exceed c0)", value: q0 });
        }
        let bernoulli = 0.5 * q0 * q0 + gas.enthalpy(rho0)?;
        Ok(Self { q0, rho0, c0, bernoulli })
    }

    pub fn mach(&self) -> f64 {
        self.q0 / self.c0
    }

    /// Slope `tan` of the Mach cone of the free stream.
    pub fn mach_slope(&self) -> f64 {
        self.c0 / sqrt(self.q0 * self.q0 - self.c0 * self.c0)
    }

    /// Limiting speed squared, reached as the density vanishes.
    pub fn limiting_speed_sq(&self) -> f64 {
        2.0 * self.bernoulli
    }
}

/// Density from the Bernoulli law `q^2/2 + h(rho) = C0`.
pub fn density_from_speed(gas: &GasModel, fs: &Freestream, speed_sq: f64) -> Result<f64> {
    if !(speed_sq >= 0.0) {
        return Err(Error::Domain { what: "speed squared", value: speed_sq });
    }
    let h = fs.bernoulli - 0.5 * speed_sq;
    if !(h > 0.0) {
        return Err(Error::Cavitation { speed_sq, limit: fs.limiting_speed_sq() });
    }
    gas.density_from_enthalpy(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(GasModel::new(1.0, 1.0).is_err());
        assert!(GasModel::new(0.0, 1.4).is_err());
        let gas = GasModel::new(1.0, 1.4).unwrap();
        assert!(Freestream::new(&gas, 1.0, 1.0).is_err());
    }

    #[test]
    fn freestream_density_recovered() {
        let gas = GasModel::new(1.0, 1.4).unwrap();
        let fs = Freestream::new(&gas, 10.0, 1.0).unwrap();
        let rho = density_from_speed(&gas, &fs, 100.0).unwrap();
        assert!((rho - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cavitation_reported() {
        let gas = GasModel::new(1.0, 1.4).unwrap();
        let fs = Freestream::new(&gas, 10.0, 1.0).unwrap();
        let lim = fs.limiting_speed_sq();
        assert!(matches!(density_from_speed(&gas, &fs, lim), Err(Error::Cavitation { .. })));
    }
}
