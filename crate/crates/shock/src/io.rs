//! Output files: JSON reports, CSV tables and binary station dumps.
//!
//! Station dump layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `CONICSTA` |
//! | 4 | format version `u32` (1) |
//! | 4 | `n_theta` as `u32` |
//! | 4 | `n_sigma` as `u32` |
//! | 4 | reserved, zero |
//! | 8 | station `z` as `f64` |
//! | 8 n_theta n_sigma | `phi`, row-major over `(theta, sigma)` |
//! | 8 n_theta n_sigma | `d_z phi` |
//! | 8 n_theta n_sigma | `d_r phi` |
//! | 8 n_theta | `xi` |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use conic_core::asymptotics::Comparison;
use conic_core::background::BackgroundSolution;
use conic_core::perturb::{EnergyReport, PerturbationField};
use conic_core::stability::{MultiplierReport, PointCoefficients};
use serde::Serialize;

pub const STATION_MAGIC: &[u8; 8] = b"CONICSTA";
pub const STATION_VERSION: u32 = 1;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct BackgroundRow {
    pub s: f64,
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub c: f64,
    pub mach_z: f64,
}

/// Table nodes from the cone to the shock.
pub fn background_rows(bg: &BackgroundSolution) -> Result<Vec<BackgroundRow>> {
    (0..=bg.shock_index())
        .map(|i| {
            let st = bg.node(i);
            let c = bg.gas().sound_speed(st.rho)?;
            Ok(BackgroundRow { s: st.s, rho: st.rho, u_r: st.u_r, u_z: st.u_z, c, mach_z: st.u_z / c })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ComparisonRow {
    pub quantity: &'static str,
    pub q0: f64,
    pub b0q0: f64,
    pub ode_value: f64,
    pub asym_value: f64,
    pub rel_error: f64,
}

impl From<&Comparison> for ComparisonRow {
    fn from(c: &Comparison) -> Self {
        Self {
            quantity: c.quantity.name(),
            q0: c.q0,
            b0q0: c.b0q0,
            ode_value: c.ode_value,
            asym_value: c.asym_value,
            rel_error: c.rel_error,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MultiplierRow {
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub discriminant: f64,
    pub lambda_min: f64,
}

pub fn multiplier_rows(rep: &MultiplierReport) -> impl Iterator<Item = MultiplierRow> + '_ {
    rep.nodes.iter().map(|n| MultiplierRow {
        s: n.s,
        k1: n.k[0],
        k2: n.k[1],
        k3: n.k[2],
        k4: n.k[3],
        discriminant: n.discriminant,
        lambda_min: n.lambda_min,
    })
}

#[derive(Debug, Serialize)]
pub struct CoefficientRow {
    pub s: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub p5: f64,
}

impl From<&PointCoefficients> for CoefficientRow {
    fn from(pc: &PointCoefficients) -> Self {
        let [p1, p2, p3, p4, p5] = pc.p;
        Self { s: pc.s, p1, p2, p3, p4, p5 }
    }
}

#[derive(Debug, Serialize)]
pub struct SeriesRow {
    pub z: f64,
    pub sup_grad: f64,
    pub sup_xi: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    pub shock_energy: f64,
}

pub fn series_rows(rep: &EnergyReport) -> impl Iterator<Item = SeriesRow> + '_ {
    rep.records.iter().map(|r| SeriesRow {
        z: r.z,
        sup_grad: r.sup_grad,
        sup_xi: r.sup_xi,
        e0: r.e0,
        e1: r.e1,
        shock_energy: r.shock_energy,
    })
}

/// Field arrays of one station as stored in a dump.
#[derive(Debug, Clone, PartialEq)]
pub struct StationDump {
    pub z: f64,
    pub n_theta: usize,
    pub n_sigma: usize,
    pub phi: Vec<f64>,
    pub phi_z: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub xi: Vec<f64>,
}

impl From<&PerturbationField> for StationDump {
    fn from(f: &PerturbationField) -> Self {
        Self {
            z: f.z,
            n_theta: f.n_theta,
            n_sigma: f.n_sigma,
            phi: f.phi.clone(),
            phi_z: f.phi_z.clone(),
            phi_r: f.phi_r.clone(),
            xi: f.xi.clone(),
        }
    }
}

impl StationDump {
    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(STATION_MAGIC)?;
        for v in [STATION_VERSION, u32::try_from(self.n_theta)?, u32::try_from(self.n_sigma)?, 0] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.z.to_le_bytes())?;
        for v in self.phi.iter().chain(&self.phi_z).chain(&self.phi_r).chain(&self.xi) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != STATION_MAGIC {
            bail!("not a station dump");
        }
        let mut word = || -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        };
        let version = word()?;
        if version != STATION_VERSION {
            bail!("unsupported station dump version {version}");
        }
        let n_theta = word()? as usize;
        let n_sigma = word()? as usize;
        word()?;
        let mut float = || -> Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let z = float()?;
        let n = n_theta * n_sigma;
        let mut take = |len: usize| (0..len).map(|_| float()).collect::<Result<Vec<f64>>>();
        let phi = take(n)?;
        let phi_z = take(n)?;
        let phi_r = take(n)?;
        let xi = take(n_theta)?;
        Ok(Self { z, n_theta, n_sigma, phi, phi_z, phi_r, xi })
    }
}
