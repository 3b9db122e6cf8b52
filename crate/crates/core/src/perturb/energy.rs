use alloc::vec::Vec;

use super::config::MarchConfig;
use super::march::Station;
use crate::error::Result;
use crate::fit::fit_power_law;
use crate::math::{abs, powf};

/// Diagnostics at one recorded station.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StationRecord {
    pub z: f64,
    pub sup_grad: f64,
    pub sup_xi: f64,
    /// `z^mu int |grad phi|^2 dr dtheta` over the slice.
    pub e0: f64,
    /// `z^(2+mu) int |grad^2 phi|^2 dr dtheta` over the slice.
    pub e1: f64,
    /// Running `int E_0 dz`.
    pub v0: f64,
    /// Running `int E_1 dz`.
    pub v1: f64,
    /// Running `int z^(mu+1) |grad phi|^2 dtheta dz` on the shock.
    pub shock_energy: f64,
    /// `sup |B0 phi + mu2 xi|` on the shock.
    pub kappa: f64,
}

/// Least-squares fit of `sup |grad phi| ~ z^-m0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub m0: f64,
    pub r_squared: f64,
    pub z_from: f64,
    pub z_to: f64,
}

/// Weighted trace inequality evaluated on the computed shock trace.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceHardy {
    /// `int z^(mu-1) phi^2` on the shock.
    pub lhs: f64,
    /// `(1+b0^2)^2/mu^2 int z^(mu+1) (d_z phi)^2` on the shock.
    pub gradient: f64,
    /// `2/|mu| z0^mu int phi^2(z0) dtheta`.
    pub boundary: f64,
    pub ratio: f64,
}

/// Summary of one march.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyReport {
    pub epsilon: f64,
    pub mu: f64,
    pub steps: usize,
    pub records: Vec<StationRecord>,
    /// `sup_z z^(mu+1) int |grad phi|^2 dr dtheta`.
    pub sup_slice0: f64,
    /// `sup_z z^(mu+3) int |grad^2 phi|^2 dr dtheta`.
    pub sup_slice1: f64,
    pub hardy: TraceHardy,
    /// `sup |B0 phi + mu2 xi| / (|xi| + |grad phi|)^2` on the shock.
    pub kappa_ratio: f64,
    /// Largest gap between the stored shock slope and the Rankine-Hugoniot slope.
    pub shock_slope_gap: f64,
    pub decay: Option<DecayFit>,
}

pub(crate) struct Accumulator {
    epsilon: f64,
    mu: f64,
    b0: f64,
    prev: Option<(f64, f64, f64, f64, f64, f64)>,
    v0: f64,
    v1: f64,
    shock: f64,
    lhs: f64,
    grad: f64,
    boundary: Option<f64>,
    sup_slice0: f64,
    sup_slice1: f64,
    kappa_ratio: f64,
    records: Vec<StationRecord>,
}

impl Accumulator {
    pub fn new(cfg: &MarchConfig, b0: f64) -> Self {
        Self {
            epsilon: cfg.epsilon,
            mu: cfg.mu,
            b0,
            prev: None,
            v0: 0.0,
            v1: 0.0,
            shock: 0.0,
            lhs: 0.0,
            grad: 0.0,
            boundary: None,
            sup_slice0: 0.0,
            sup_slice1: 0.0,
            kappa_ratio: 0.0,
            records: Vec::new(),
        }
    }

    /// Integrands at `z`: `(E0, E1, shock, trace lhs, trace gradient)`.
    fn integrands(&self, z: f64, s: &Station) -> (f64, f64, f64, f64, f64) {
        let mu = self.mu;
        let e = 1.0 + self.b0 * self.b0;
        (
            powf(z, mu) * s.slice0,
            powf(z, mu + 2.0) * s.slice1,
            powf(z, mu + 1.0) * s.shock_slice,
            powf(z, mu - 1.0) * s.trace_phi2,
            e * e / (mu * mu) * powf(z, mu + 1.0) * s.trace_phi_z2,
        )
    }

    pub fn add_station(&mut self, z: f64, s: &Station) {
        let (e0, e1, sh, lhs, grad) = self.integrands(z, s);
        if self.boundary.is_none() {
            self.boundary = Some(2.0 / abs(self.mu) * powf(z, self.mu) * s.trace_phi2);
        }
        if let Some((z0, a0, a1, a2, a3, a4)) = self.prev {
            let h = 0.5 * (z - z0);
            self.v0 += h * (a0 + e0);
            self.v1 += h * (a1 + e1);
            self.shock += h * (a2 + sh);
            self.lhs += h * (a3 + lhs);
            self.grad += h * (a4 + grad);
        }
        self.prev = Some((z, e0, e1, sh, lhs, grad));
        self.sup_slice0 = self.sup_slice0.max(z * e0);
        self.sup_slice1 = self.sup_slice1.max(z * e1);
        self.kappa_ratio = self.kappa_ratio.max(s.kappa_ratio);
    }

    pub fn record(&mut self, z: f64, s: &Station) {
        let (e0, e1, ..) = self.integrands(z, s);
        self.records.push(StationRecord {
            z,
            sup_grad: s.sup_grad,
            sup_xi: s.sup_xi,
            e0,
            e1,
            v0: self.v0,
            v1: self.v1,
            shock_energy: self.shock,
            kappa: s.sup_kappa,
        });
    }

    pub fn finish(self, steps: usize, shock_slope_gap: f64) -> EnergyReport {
        let boundary = self.boundary.unwrap_or(0.0);
        let rhs = self.grad + boundary;
        let ratio = if self.lhs == 0.0 { 0.0 } else { self.lhs / rhs };
        let mut report = EnergyReport {
            epsilon: self.epsilon,
            mu: self.mu,
            steps,
            records: self.records,
            sup_slice0: self.sup_slice0,
            sup_slice1: self.sup_slice1,
            hardy: TraceHardy { lhs: self.lhs, gradient: self.grad, boundary, ratio },
            kappa_ratio: self.kappa_ratio,
            shock_slope_gap,
            decay: None,
        };
        report.decay = report.fit_decay().ok().flatten();
        report
    }
}

impl EnergyReport {
    pub fn z_end(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.z)
    }

    /// Record closest to `z` from below.
    pub fn at(&self, z: f64) -> Option<&StationRecord> {
        self.records.iter().take_while(|r| r.z <= z * (1.0 + 1e-12)).last()
    }

    /// Fit `m0` over the last decade; `None` for an identically zero run.
    pub fn fit_decay(&self) -> Result<Option<DecayFit>> {
        let z_to = self.z_end();
        let z_from = z_to / 10.0;
        let pts: Vec<&StationRecord> = self.records.iter().filter(|r| r.z >= z_from && r.sup_grad > 0.0).collect();
        if pts.len() < 3 || self.epsilon == 0.0 {
            return Ok(None);
        }
        let x: Vec<f64> = pts.iter().map(|r| r.z).collect();
        let y: Vec<f64> = pts.iter().map(|r| r.sup_grad).collect();
        let fit = fit_power_law(&x, &y)?;
        Ok(Some(DecayFit { m0: -fit.slope, r_squared: fit.r_squared, z_from, z_to }))
    }

    /// `sup_z z^k sup |grad phi|`.
    pub fn weighted_sup(&self, k: f64) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(powf(r.z, k) * r.sup_grad))
    }

    /// Whether `sup |xi|` never grows by more than `ripple` (relative) past `z0`.
    pub fn xi_nonincreasing_after(&self, z0: f64, ripple: f64) -> bool {
        let mut best = f64::INFINITY;
        for r in self.records.iter().filter(|r| r.z >= z0) {
            if r.sup_xi > best * (1.0 + ripple) {
                return false;
            }
            best = best.min(r.sup_xi);
        }
        true
    }
}

/// Empirical energy verdict of a completed run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyVerdict {
    /// Volume energy at the end over its value at half the final station.
    pub volume_ratio: f64,
    /// Same for the shock-surface energy.
    pub shock_ratio: f64,
    pub hardy_ratio: f64,
    pub volume_ok: bool,
    pub shock_ok: bool,
    pub hardy_ok: bool,
    pub pass: bool,
}

/// Saturation tolerance of the cumulative energies.
pub const SATURATION: f64 = 1.1;
/// Slack constant `C` in the `1 + C epsilon` bound of the trace inequality.
pub const HARDY_SLACK: f64 = 10.0;

fn saturation(late: f64, early: f64) -> f64 {
    if late == 0.0 && early == 0.0 {
        1.0
    } else {
        late / early
    }
}

pub fn energy_diagnostics(report: &EnergyReport) -> EnergyVerdict {
    let end = report.records.last();
    let half = report.at(0.5 * report.z_end());
    let (volume_ratio, shock_ratio) = match (end, half) {
        (Some(e), Some(h)) => (saturation(e.v0, h.v0), saturation(e.shock_energy, h.shock_energy)),
        _ => (f64::NAN, f64::NAN),
    };
    let hardy_ratio = report.hardy.ratio;
    let volume_ok = (1.0..=SATURATION).contains(&volume_ratio);
    let shock_ok = (1.0..=SATURATION).contains(&shock_ratio);
    let hardy_ok = hardy_ratio <= 1.0 + HARDY_SLACK * report.epsilon;
    EnergyVerdict {
        volume_ratio,
        shock_ratio,
        hardy_ratio,
        volume_ok,
        shock_ok,
        hardy_ok,
        pass: volume_ok && shock_ok && hardy_ok,
    }
}
