//! Numerical check of the weighted Hardy inequality on the shock trace,
//!
//! `int_1^T z^(mu-1) phi^2 <= 4/mu^2 int_1^T z^(mu+1) phi'^2 + w phi(1)^2 / |mu|`.
//!
//! With `w = 1` the inequality is the skeleton used by the energy argument;
//! integrating by parts and applying Cauchy-Schwarz only guarantees it with
//! `w = 2`. Power profiles `z^k`, `0 < k < |mu|/2`, violate the `w = 1` form.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{abs, cos, exp, ln, powf, sin};

/// Boundary weight of the skeleton inequality.
pub const SKELETON_BOUNDARY_WEIGHT: f64 = 1.0;
/// Boundary weight that the integration-by-parts argument proves.
pub const PROVEN_BOUNDARY_WEIGHT: f64 = 2.0;

/// A function on `[1, T]` together with its derivative.
pub trait Profile {
    /// `(phi(z), phi'(z))`.
    fn eval(&self, z: f64) -> (f64, f64);
}

impl<F: Fn(f64) -> (f64, f64)> Profile for F {
    fn eval(&self, z: f64) -> (f64, f64) {
        self(z)
    }
}

/// `sum_k a_k cos(k w (z-1)) + b_k sin(k w (z-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub omega: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Profile for TrigPolynomial {
    fn eval(&self, z: f64) -> (f64, f64) {
        let x = z - 1.0;
        let mut v = 0.0;
        let mut d = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = k as f64 * self.omega;
            let (sn, cs) = (sin(w * x), cos(w * x));
            v += a * cs + b * sn;
            d += w * (b * cs - a * sn);
        }
        (v, d)
    }
}

/// Random trigonometric polynomials with one period on `[1, T]`, between one
/// and `max_harmonic` harmonics and coefficients uniform in `(-1, 1)`.
pub fn random_trig_polynomials(n: usize, t_end: f64, max_harmonic: usize, seed: u64) -> Vec<TrigPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = core::f64::consts::TAU / (t_end - 1.0);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_harmonic.max(1));
            let cos = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sin = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            TrigPolynomial { omega, cos, sin }
        })
        .collect()
}

/// The three terms of the inequality for one profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HardyTerms {
    pub lhs: f64,
    pub gradient: f64,
    pub boundary: f64,
    /// `lhs / (gradient + boundary)`.
    pub ratio: f64,
}

const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Evaluate both sides for one profile with composite Gauss-Legendre
/// quadrature on panels uniform in `ln z`.
pub fn hardy_terms(profile: &dyn Profile, mu: f64, t_end: f64, boundary_weight: f64, panels: usize) -> Result<HardyTerms> {
    if !(mu < -1.0) {
        return Err(Error::InvalidWeight { mu });
    }
    if !(t_end > 1.0) {
        return Err(Error::Domain { what: "T", value: t_end });
    }
    let span = ln(t_end);
    let h = span / panels as f64;
    let (mut lhs, mut grad) = (0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL_X.iter().zip(GL_W) {
            let u = mid + 0.5 * h * x;
            let z = exp(u);
            let (v, d) = profile.eval(z);
            // dz = z du
            lhs += w * powf(z, mu) * v * v;
            grad += w * powf(z, mu + 2.0) * d * d;
        }
    }
    lhs *= 0.5 * h;
    grad *= 0.5 * h * 4.0 / (mu * mu);
    let (v1, _) = profile.eval(1.0);
    let boundary = boundary_weight * v1 * v1 / abs(mu);
    let ratio = lhs / (grad + boundary);
    if !(lhs.is_finite() && grad.is_finite() && boundary.is_finite()) {
        return Err(Error::InvalidSample { index: 0 });
    }
    Ok(HardyTerms { lhs, gradient: grad, boundary, ratio })
}

/// Worst ratio over a collection of profiles.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HardyOutcome {
    pub worst_ratio: f64,
    pub worst_index: usize,
    pub ratios: Vec<f64>,
}

/// Check the skeleton inequality (`w = 1`) for every profile.
pub fn hardy_check(samples: &[&dyn Profile], mu: f64, t_end: f64) -> Result<HardyOutcome> {
    hardy_check_weighted(samples, mu, t_end, SKELETON_BOUNDARY_WEIGHT)
}

pub fn hardy_check_weighted(samples: &[&dyn Profile], mu: f64, t_end: f64, boundary_weight: f64) -> Result<HardyOutcome> {
    let mut ratios = Vec::with_capacity(samples.len());
    let (mut worst_ratio, mut worst_index) = (f64::NEG_INFINITY, 0);
    for (i, s) in samples.iter().enumerate() {
        let t = hardy_terms(*s, mu, t_end, boundary_weight, 600)
            .map_err(|e| match e {
                Error::InvalidSample { .. } => Error::InvalidSample { index: i },
                other => other,
            })?;
        if !t.ratio.is_finite() {
            return Err(Error::InvalidSample { index: i });
        }
        if t.ratio > worst_ratio {
            worst_ratio = t.ratio;
            worst_index = i;
        }
        ratios.push(t.ratio);
    }
    Ok(HardyOutcome { worst_ratio, worst_index, ratios })
}
