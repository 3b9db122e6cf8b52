use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::MarchConfig;
use crate::background::BackgroundSolution;
use crate::error::Result;
use crate::math::{abs, cos, exp};

/// Perturbation state on the shock-fitted grid `sigma = (r - b0 z)/(chi - b0 z)`.
///
/// Grids are stored row-major with one row of `n_sigma` nodes per angle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerturbationField {
    pub z: f64,
    pub n_sigma: usize,
    pub n_theta: usize,
    /// Potential perturbation.
    pub phi: Vec<f64>,
    /// `d_z phi` at fixed `(r, theta)`.
    pub phi_z: Vec<f64>,
    /// `d_r phi` at fixed `(z, theta)`.
    pub phi_r: Vec<f64>,
    /// `(chi - s0 z)/z` per angle.
    pub xi: Vec<f64>,
    pub s0: f64,
    pub b0: f64,
}

impl PerturbationField {
    pub fn zeros(z: f64, n_sigma: usize, n_theta: usize, bg: &BackgroundSolution) -> Self {
        Self {
            z,
            n_sigma,
            n_theta,
            phi: vec![0.0; n_sigma * n_theta],
            phi_z: vec![0.0; n_sigma * n_theta],
            phi_r: vec![0.0; n_sigma * n_theta],
            xi: vec![0.0; n_theta],
            s0: bg.s0,
            b0: bg.b0(),
        }
    }

    pub fn index(&self, it: usize, j: usize) -> usize {
        it * self.n_sigma + j
    }

    pub fn sigma(&self, j: usize) -> f64 {
        j as f64 / (self.n_sigma - 1) as f64
    }

    pub fn theta(&self, it: usize) -> f64 {
        2.0 * core::f64::consts::PI * it as f64 / self.n_theta as f64
    }

    /// Shock radius at angle index `it`.
    pub fn chi(&self, it: usize) -> f64 {
        self.z * (self.s0 + self.xi[it])
    }

    /// Radius of node `(it, j)`.
    pub fn radius(&self, it: usize, j: usize) -> f64 {
        let base = self.b0 * self.z;
        base + self.sigma(j) * (self.chi(it) - base)
    }

    pub fn sup_xi(&self) -> f64 {
        self.xi.iter().fold(0.0, |m, x| m.max(abs(*x)))
    }

    /// Shock strictly outside the cone at every angle.
    pub fn shock_outside_cone(&self) -> bool {
        (0..self.n_theta).all(|it| self.chi(it) > self.b0 * self.z)
    }
}

/// `exp(1 - 1/(1 - x^2))` on `|x| < 1`, zero outside; peak value one.
pub fn bump(x: f64) -> f64 {
    if abs(x) >= 1.0 {
        return 0.0;
    }
    exp(1.0 - 1.0 / (1.0 - x * x))
}

/// Derivative of [`bump`].
pub fn bump_slope(x: f64) -> f64 {
    if abs(x) >= 1.0 {
        return 0.0;
    }
    let d = 1.0 - x * x;
    -2.0 * x / (d * d) * bump(x)
}

/// Largest `|bump'|`, attained where `3x^4 = 1`.
pub fn bump_slope_max() -> f64 {
    abs(bump_slope(crate::math::powf(1.0 / 3.0, 0.25)))
}

/// Smooth step rising from 0 at `x <= 0` to 1 at `x >= 1`.
pub fn smooth_step(x: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { exp(-1.0 / t) } else { 0.0 };
    let a = f(x);
    let b = f(1.0 - x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_slope(x: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { exp(-1.0 / t) } else { 0.0 };
    let df = |t: f64| if t > 0.0 { exp(-1.0 / t) / (t * t) } else { 0.0 };
    let (a, b) = (f(x), f(1.0 - x));
    if a + b == 0.0 {
        return 0.0;
    }
    (df(x) * b + a * df(1.0 - x)) / ((a + b) * (a + b))
}

/// Angular profile of the initial data: one for axisymmetric runs, otherwise
/// a seeded two-harmonic modulation.
pub fn angular_profile(cfg: &MarchConfig) -> impl Fn(f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let three_d = cfg.n_theta > 1;
    let a1: f64 = if three_d { rng.gen_range(0.1..0.3) } else { 0.0 };
    let a2: f64 = if three_d { rng.gen_range(0.05..0.2) } else { 0.0 };
    let t1: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    let t2: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    let phase = cfg.angular_phase;
    move |theta: f64| 1.0 + a1 * cos(theta - phase - t1) + a2 * cos(2.0 * (theta - phase - t2))
}

/// Smooth compactly supported initial data of amplitude `epsilon` at `z_start`.
///
/// The potential carries a bump in `sigma` scaled so that `|d_r phi|` peaks
/// at `epsilon`, `d_r phi` is its exact derivative, and `d_z phi` a bump of height `epsilon/2`. A nonzero
/// `xi_amplitude` displaces the shock and blends in the matching shock
/// trace of the potential near `sigma = 1`.
pub fn init_data(cfg: &MarchConfig, bg: &BackgroundSolution) -> Result<PerturbationField> {
    let mut f = PerturbationField::zeros(cfg.z_start, cfg.n_sigma, cfg.n_theta, bg);
    let eps = cfg.epsilon;
    if eps == 0.0 {
        return Ok(f);
    }
    let z = cfg.z_start;
    let width = z * (bg.s0 - bg.b0());
    let ur = bg.state_at(bg.s0)?.u_r;
    let profile = angular_profile(cfg);
    let slope = bump_slope_max();
    for it in 0..cfg.n_theta {
        let ang = profile(f.theta(it));
        let xi0 = cfg.xi_amplitude * eps * width / (ur * z) * ang;
        f.xi[it] = xi0;
        let g = bg.flux_integral(xi0)?;
        for j in 0..cfg.n_sigma {
            let x = (f.sigma(j) - 0.5) / cfg.support_l;
            let y = (f.sigma(j) - 0.75) / 0.25;
            let ramp = smooth_step(y);
            let k = f.index(it, j);
            let l = f.chi(it) - bg.b0() * z;
            f.phi[k] = eps * l * cfg.support_l / slope * bump(x) * ang - ramp * z * g;
            f.phi_z[k] = 0.5 * eps * bump(x) * ang - ramp * g;
            f.phi_r[k] = eps / slope * bump_slope(x) * ang - 4.0 * smooth_step_slope(y) * z * g / l;
        }
    }
    Ok(f)
}
