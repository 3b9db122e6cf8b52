//! Run parameters merged from defaults, command-line flags and a JSON file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use conic_core::gas::{Freestream, GasModel};
use conic_core::perturb::MarchConfig;
use serde::{Deserialize, Serialize};

/// Physical and numerical parameters shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub gamma: f64,
    /// Constant of the pressure law `p = A rho^gamma`.
    pub a: f64,
    pub rho0: f64,
    pub q0: f64,
    pub b0: f64,
    pub mu: f64,
    pub march: MarchConfig,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { gamma: 1.4, a: 1.0, rho0: 1.0, q0: 50.0, b0: 0.1, mu: -1.5, march: MarchConfig::default() }
    }
}

/// Optional overrides; every `Some` replaces the current value.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub rho0: Option<f64>,
    pub q0: Option<f64>,
    pub b0: Option<f64>,
    pub mu: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

impl RunSpec {
    pub fn apply(&mut self, o: &Overrides) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut self.gamma, o.gamma);
        set(&mut self.a, o.a);
        set(&mut self.rho0, o.rho0);
        set(&mut self.q0, o.q0);
        set(&mut self.b0, o.b0);
        set(&mut self.mu, o.mu);
        set(&mut self.march.epsilon, o.epsilon);
        if let Some(s) = o.seed {
            self.march.seed = s;
        }
        self.march.mu = self.mu;
    }

    /// Defaults, then flags, then the JSON file, which wins.
    pub fn resolve(flags: &Overrides, config: Option<&Path>) -> Result<Self> {
        let mut spec = Self::default();
        spec.apply(flags);
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            spec = merge(spec, file).with_context(|| format!("invalid field in {}", path.display()))?;
        }
        spec.march.mu = spec.mu;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma < 3.0) {
            bail!("gamma must lie in (1, 3), got {}", self.gamma);
        }
        if !(self.a > 0.0 && self.rho0 > 0.0) {
            bail!("a and rho0 must be positive");
        }
        if !(self.b0 > 0.0 && self.b0.is_finite()) {
            bail!("b0 must be positive, got {}", self.b0);
        }
        if !(self.mu < -1.0) {
            bail!("mu must be below -1, got {}", self.mu);
        }
        let gas = self.gas()?;
        let c0 = gas.sound_speed(self.rho0)?;
        if !(self.q0 > c0) {
            bail!("q0 = {} must exceed the freestream sound speed {c0}", self.q0);
        }
        self.march.validate()?;
        Ok(())
    }

    pub fn gas(&self) -> Result<GasModel> {
        Ok(GasModel::new(self.a, self.gamma)?)
    }

    pub fn freestream(&self) -> Result<Freestream> {
        Ok(Freestream::new(&self.gas()?, self.q0, self.rho0)?)
    }
}

/// Overlay the fields present in `file` on `spec`, nested `march` included.
fn merge(spec: RunSpec, file: serde_json::Value) -> Result<RunSpec> {
    let mut base = serde_json::to_value(&spec)?;
    overlay(&mut base, file);
    Ok(serde_json::from_value(base)?)
}

fn overlay(dst: &mut serde_json::Value, src: serde_json::Value) {
    match (dst, src) {
        (serde_json::Value::Object(d), serde_json::Value::Object(s)) => {
            for (k, v) in s {
                match d.get_mut(&k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        d.insert(k, v);
                    }
                }
            }
        }
        (d, s) => *d = s,
    }
}
