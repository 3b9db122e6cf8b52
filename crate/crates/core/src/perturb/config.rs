use crate::error::{Error, Result};
use crate::math::powf;

/// Parameters of one marching run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MarchConfig {
    /// Perturbation amplitude.
    pub epsilon: f64,
    /// Station after which the upstream flow is uniform.
    pub t0: f64,
    pub z_start: f64,
    pub z_end: f64,
    /// Radial nodes from cone to shock, inclusive.
    pub n_sigma: usize,
    /// Angular nodes; 1 selects the axisymmetric mode.
    pub n_theta: usize,
    pub cfl: f64,
    /// Fixed step overriding the CFL choice; rejected if it violates the limit.
    pub dz: Option<f64>,
    /// Weight exponent of the energy diagnostics.
    pub mu: f64,
    /// Half-width in `sigma` of the initial bump, centred at `sigma = 1/2`.
    pub support_l: f64,
    /// Initial shock displacement in units of `epsilon L / u_r(s0)`.
    pub xi_amplitude: f64,
    /// Seed of the angular profile of three-dimensional data.
    pub seed: u64,
    /// Extra rotation of the angular profile.
    pub angular_phase: f64,
    /// Floor of the fourth-difference filter strength.
    pub dissipation: f64,
    /// Freeze `f1..f7` to zero.
    pub linear: bool,
    /// Outward extension of the background table as a fraction of `s0 - b0`.
    pub extension: f64,
    /// Ratio between consecutive recorded stations.
    pub record_ratio: f64,
    /// `sup |grad phi|` above this multiple of `epsilon` counts as blow-up.
    pub blowup_factor: f64,
}

impl Default for MarchConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            t0: 1.0,
            z_start: 1.0,
            z_end: 1000.0,
            n_sigma: 128,
            n_theta: 1,
            cfl: 0.5,
            dz: None,
            mu: -1.5,
            support_l: 0.2,
            xi_amplitude: 0.1,
            seed: 0,
            angular_phase: 0.0,
            dissipation: 0.02,
            linear: false,
            extension: 0.5,
            record_ratio: 1.005,
            blowup_factor: 1e3,
        }
    }
}

impl MarchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason| Err(Error::Config { reason });
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be finite and non-negative");
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return bad("cfl must lie in (0, 0.9]");
        }
        if self.n_sigma < 16 {
            return bad("n_sigma must be at least 16");
        }
        if !(self.n_theta == 1 || (self.n_theta >= 8 && self.n_theta.is_multiple_of(2))) {
            return bad("n_theta must be 1 or an even number of at least 8");
        }
        if !(self.t0 > 0.0 && self.z_start >= self.t0) {
            return bad("z_start must not precede t0");
        }
        if !(self.z_end > self.z_start && self.z_end.is_finite()) {
            return bad("z_end must exceed z_start");
        }
        if !(self.mu < -1.0) {
            return bad("mu must be below -1");
        }
        if !(self.support_l > 0.0 && self.support_l < 0.5) {
            return bad("support_l must lie in (0, 0.5)");
        }
        if !(self.dissipation >= 0.0 && self.dissipation < 0.125) {
            return bad("dissipation must lie in [0, 0.125)");
        }
        if !(self.extension > 0.0 && self.extension <= 2.0) {
            return bad("extension must lie in (0, 2]");
        }
        if !(self.record_ratio > 1.0) {
            return bad("record_ratio must exceed 1");
        }
        if let Some(dz) = self.dz {
            if !(dz > 0.0) {
                return bad("dz must be positive");
            }
        }
        Ok(())
    }

    /// Whether `epsilon` exceeds the smallness scale of the hypersonic regime.
    pub fn exceeds_smallness(&self, b0: f64, q0: f64, gamma: f64) -> bool {
        self.epsilon >= smallness_scale(b0, q0, gamma)
    }
}

/// `min(b0^-2 (b0 q0)^-2, b0^-2 (b0 q0)^(-2/(gamma-1)))`.
pub fn smallness_scale(b0: f64, q0: f64, gamma: f64) -> f64 {
    let bq = b0 * q0;
    let e = (2.0f64).max(2.0 / (gamma - 1.0));
    powf(bq, -e) / (b0 * b0)
}
