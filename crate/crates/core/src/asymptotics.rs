//! Leading-order hypersonic expressions for the background, its derivatives,
//! the linear coefficients and the shock coefficients, plus a harness that
//! fits the decay rate of the relative error against the numerical solution.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::background::{characteristic_slopes, supersonic_z_threshold, BackgroundSolution, ConeProblem, ShootOptions};
use crate::error::{Error, Result};
use crate::fit::fit_power_law;
use crate::gas::{Freestream, GasModel};
use crate::math::{abs, exp, powf, sqrt};
use crate::stability::{point_coefficients, shock_coefficients};

/// `(gamma-1)/2 b0^2 (1+b0^2)`; the axial flow is supersonic while this is below one.
pub fn axial_load(b0: f64, gamma: f64) -> f64 {
    0.5 * (gamma - 1.0) * b0 * b0 * (1.0 + b0 * b0)
}

/// Leading-order background state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BackgroundAsymptotics {
    pub s0: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub rho: f64,
    pub q2_minus_c2: f64,
    pub uz2_minus_c2: f64,
    /// `(1+s^2) c^2 - (s u_z - u_r)^2`.
    pub denominator: f64,
    /// Scale `(b0 q0)^((gamma-3)/(gamma-1))` bounding `s u_z - u_r`.
    pub defect_scale: f64,
}

/// Leading-order derivatives and characteristic slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivativeAsymptotics {
    pub du_r: f64,
    pub du_z: f64,
    pub lambda1_minus_s: f64,
    pub lambda2_minus_s: f64,
    /// Scale `1/b0` of the bound on `|rho'|`.
    pub rho_prime_scale: f64,
}

/// Leading-order linear and shock coefficients and energy constants.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientAsymptotics {
    pub p: [f64; 5],
    pub dp: [f64; 3],
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub c3: f64,
    pub c6: f64,
}

fn check(b0: f64, gas: &GasModel) -> Result<()> {
    let b_star = supersonic_z_threshold(gas.gamma);
    if !(b0 > 0.0 && b0 < b_star) {
        return Err(Error::SupersonicInZViolation { b0, b_star });
    }
    Ok(())
}

fn density_constant(b0: f64, gas: &GasModel) -> f64 {
    powf((gas.gamma - 1.0) / (2.0 * gas.a * gas.gamma * (1.0 + b0 * b0)), 1.0 / (gas.gamma - 1.0))
}

pub fn background_asymptotics(b0: f64, gas: &GasModel, fs: &Freestream) -> Result<BackgroundAsymptotics> {
    check(b0, gas)?;
    let g = gas.gamma;
    let q0 = fs.q0;
    let bq = b0 * q0;
    let e = 1.0 + b0 * b0;
    Ok(BackgroundAsymptotics {
        s0: b0,
        u_r: bq / e,
        u_z: q0 / e,
        rho: density_constant(b0, gas) * powf(bq, 2.0 / (g - 1.0)),
        q2_minus_c2: q0 * q0 * (2.0 - (g - 1.0) * b0 * b0) / (2.0 * e),
        uz2_minus_c2: q0 * q0 * (1.0 - axial_load(b0, g)) / (e * e),
        denominator: 0.5 * (g - 1.0) * bq * bq,
        defect_scale: powf(bq, (g - 3.0) / (g - 1.0)),
    })
}

pub fn derivative_asymptotics(b0: f64, gas: &GasModel, fs: &Freestream) -> Result<DerivativeAsymptotics> {
    check(b0, gas)?;
    let g = gas.gamma;
    let q0 = fs.q0;
    let e = 1.0 + b0 * b0;
    let den = 2.0 - (g - 1.0) * b0 * b0 * e;
    let root = sqrt(2.0 - (g - 1.0) * b0 * b0);
    let sg = sqrt(g - 1.0);
    Ok(DerivativeAsymptotics {
        du_r: -q0 / (e * e),
        du_z: b0 * q0 / (e * e),
        lambda1_minus_s: sg * e * b0 * (sg * b0 * b0 - root) / den,
        lambda2_minus_s: sg * e * b0 * (sg * b0 * b0 + root) / den,
        rho_prime_scale: 1.0 / b0,
    })
}

pub fn coefficient_asymptotics(b0: f64, gas: &GasModel, fs: &Freestream) -> Result<CoefficientAsymptotics> {
    check(b0, gas)?;
    let g = gas.gamma;
    let q0 = fs.q0;
    let bq = b0 * q0;
    let e = 1.0 + b0 * b0;
    let k = axial_load(b0, g);
    let den = 1.0 - k;
    let b2s = b0 * b0;
    let p = [
        b0 / den,
        b2s * (0.5 * (3.0 - g) - 0.5 * (g - 1.0) * b2s) / den,
        k / den,
        0.0,
        -0.5 * k / den,
    ];
    let dp = [
        (-1.0 + 0.5 * (g - 3.0) * b2s - 0.5 * (g - 1.0) * b2s * b2s * b2s) / (e * den * den),
        (-2.0 * b0 + 2.0 * (g - 2.0) * b2s * b0 + 2.0 * (g - 1.0) * b2s * b2s * b0) / (e * den * den),
        -(g - 1.0) * b2s * b0 / (den * den),
    ];
    let kr = density_constant(b0, gas);
    let lift = powf(bq, (g + 1.0) / (g - 1.0));
    Ok(CoefficientAsymptotics {
        p,
        dp,
        b1: 2.0 / e * kr * lift,
        b2: (1.0 - b2s) / (b0 * e) * kr * lift,
        b3: -kr * powf(bq, 2.0 * g / (g - 1.0)) / (b0 * e * e),
        mu1: (1.0 - b2s) / (2.0 * b0),
        mu2: -q0 / (2.0 * e),
        c3: (g - 1.0) * b2s * e * e * e / (8.0 * den),
        c6: (g - 1.0) * b2s * b2s * e / (2.0 * den),
    })
}

/// Leading-order `Q0` for weight exponent `mu`.
pub fn q0_leading(b0: f64, gamma: f64, mu: f64) -> f64 {
    let e = 1.0 + b0 * b0;
    (gamma - 1.0) * b0 * b0 * e * e * e / (8.0 * (1.0 - axial_load(b0, gamma))) * (1.0 - 1.0 / (mu * mu))
}

/// Leading-order discriminant `K2^2 - 4 K1 K3` for the multiplier slope `b~ = 1`.
pub fn discriminant_leading(b0: f64, gamma: f64, mu: f64) -> f64 {
    -0.5 * (gamma - 1.0) * (mu - 1.0) * (mu - 3.0) * b0 * b0 * b0 * b0
}

/// Expected decay exponent `-min(2, 2/(gamma-1))` of the relative remainders.
pub fn expected_exponent(gamma: f64) -> f64 {
    -(2.0f64).min(2.0 / (gamma - 1.0))
}

/// A numerically checkable asymptotic statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Quantity {
    ShockSlope,
    RadialVelocity,
    AxialVelocity,
    Density,
    SpeedMinusSound,
    AxialMinusSound,
    Denominator,
    RadialDerivative,
    AxialDerivative,
    Lambda1,
    Lambda2,
    P1,
    P2,
    P3,
    P4,
    P5,
    DP1,
    DP2,
    DP3,
    B1,
    B2,
    B3,
    Mu1,
    Mu2,
}

impl Quantity {
    pub const BACKGROUND: [Quantity; 7] = [
        Quantity::ShockSlope,
        Quantity::RadialVelocity,
        Quantity::AxialVelocity,
        Quantity::Density,
        Quantity::SpeedMinusSound,
        Quantity::AxialMinusSound,
        Quantity::Denominator,
    ];
    pub const DERIVATIVES: [Quantity; 4] =
        [Quantity::RadialDerivative, Quantity::AxialDerivative, Quantity::Lambda1, Quantity::Lambda2];
    pub const COEFFICIENTS: [Quantity; 13] = [
        Quantity::P1,
        Quantity::P2,
        Quantity::P3,
        Quantity::P4,
        Quantity::P5,
        Quantity::DP1,
        Quantity::DP2,
        Quantity::DP3,
        Quantity::B1,
        Quantity::B2,
        Quantity::B3,
        Quantity::Mu1,
        Quantity::Mu2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::ShockSlope => "s0/b0-1",
            Quantity::RadialVelocity => "u_r",
            Quantity::AxialVelocity => "u_z",
            Quantity::Density => "rho",
            Quantity::SpeedMinusSound => "q2-c2",
            Quantity::AxialMinusSound => "uz2-c2",
            Quantity::Denominator => "denominator",
            Quantity::RadialDerivative => "u_r'",
            Quantity::AxialDerivative => "u_z'",
            Quantity::Lambda1 => "lambda1-s",
            Quantity::Lambda2 => "lambda2-s",
            Quantity::P1 => "P1",
            Quantity::P2 => "P2",
            Quantity::P3 => "P3",
            Quantity::P4 => "P4",
            Quantity::P5 => "P5",
            Quantity::DP1 => "P1'",
            Quantity::DP2 => "P2'",
            Quantity::DP3 => "P3'",
            Quantity::B1 => "B1",
            Quantity::B2 => "B2",
            Quantity::B3 => "B3",
            Quantity::Mu1 => "mu1",
            Quantity::Mu2 => "mu2",
        }
    }

    pub fn from_name(name: &str) -> Option<Quantity> {
        Self::BACKGROUND
            .iter()
            .chain(&Self::DERIVATIVES)
            .chain(&Self::COEFFICIENTS)
            .copied()
            .find(|q| q.name() == name)
    }
}

/// One ODE-versus-closed-form comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub quantity: Quantity,
    pub q0: f64,
    pub b0q0: f64,
    pub ode_value: f64,
    pub asym_value: f64,
    /// Largest relative error over the table. For `s0/b0 - 1` and `P4`, whose
    /// leading term vanishes, the remainder itself.
    pub rel_error: f64,
}

/// Compare a quantity on the whole table (or at the shock for shock
/// coefficients) and report the worst relative error.
pub fn compare(quantity: Quantity, bg: &BackgroundSolution) -> Result<Comparison> {
    let b0 = bg.b0();
    let gas = bg.gas();
    let fs = bg.freestream();
    let lead = background_asymptotics(b0, gas, fs)?;
    let der = derivative_asymptotics(b0, gas, fs)?;
    let coef = coefficient_asymptotics(b0, gas, fs)?;
    let mut out = Comparison { quantity, q0: fs.q0, b0q0: b0 * fs.q0, ode_value: 0.0, asym_value: 0.0, rel_error: 0.0 };

    let shock_value = |q: Quantity| -> Result<Option<(f64, f64)>> {
        let sc = shock_coefficients(bg)?;
        Ok(match q {
            Quantity::B1 => Some((sc.b1, coef.b1)),
            Quantity::B2 => Some((sc.b2, coef.b2)),
            Quantity::B3 => Some((sc.b3, coef.b3)),
            Quantity::Mu1 => Some((sc.mu1, coef.mu1)),
            Quantity::Mu2 => Some((sc.mu2, coef.mu2)),
            _ => None,
        })
    };
    if quantity == Quantity::ShockSlope {
        out.ode_value = bg.s0;
        out.asym_value = b0;
        out.rel_error = bg.width / b0;
        return Ok(out);
    }
    if let Some((v, a)) = shock_value(quantity)? {
        out.ode_value = v;
        out.asym_value = a;
        out.rel_error = abs(v / a - 1.0);
        return Ok(out);
    }
    for i in 0..=bg.shock_index() {
        let st = bg.node(i);
        let pc = point_coefficients(&st, gas)?;
        let c2 = pc.c2;
        let (v, a) = match quantity {
            Quantity::RadialVelocity => (st.u_r, lead.u_r),
            Quantity::AxialVelocity => (st.u_z, lead.u_z),
            Quantity::Density => (st.rho, lead.rho),
            Quantity::SpeedMinusSound => (st.speed_sq() - c2, lead.q2_minus_c2),
            Quantity::AxialMinusSound => (pc.axial_margin, lead.uz2_minus_c2),
            Quantity::Denominator => {
                let g = bg.g(i);
                ((1.0 + st.s * st.s) * c2 - g * g, lead.denominator)
            }
            Quantity::RadialDerivative => (pc.du_r, der.du_r),
            Quantity::AxialDerivative => (pc.du_z, der.du_z),
            Quantity::Lambda1 | Quantity::Lambda2 => {
                let (l1, l2) = characteristic_slopes(&st, gas)?;
                if quantity == Quantity::Lambda1 {
                    (l1 - st.s, der.lambda1_minus_s)
                } else {
                    (l2 - st.s, der.lambda2_minus_s)
                }
            }
            Quantity::P1 => (pc.p[0], coef.p[0]),
            Quantity::P2 => (pc.p[1], coef.p[1]),
            Quantity::P3 => (pc.p[2], coef.p[2]),
            Quantity::P4 => (pc.p[3], 0.0),
            Quantity::P5 => (pc.p[4], coef.p[4]),
            Quantity::DP1 => (pc.dp[0], coef.dp[0]),
            Quantity::DP2 => (pc.dp[1], coef.dp[1]),
            Quantity::DP3 => (pc.dp[2], coef.dp[2]),
            _ => unreachable!("shock quantities handled above"),
        };
        let err = if a == 0.0 { abs(v) } else { abs(v / a - 1.0) };
        if i == 0 || err > out.rel_error {
            out.ode_value = v;
            out.asym_value = a;
            out.rel_error = err;
        }
    }
    Ok(out)
}

/// Fitted decay of a relative remainder against `b0 q0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateFit {
    pub quantity: Quantity,
    pub b0: f64,
    pub gamma: f64,
    pub exponent_fitted: f64,
    pub exponent_expected: f64,
    pub r_squared: f64,
    /// Fitted constant `C` in `err = C (b0 q0)^p`.
    pub constant: f64,
    pub passed: bool,
    pub points: Vec<Comparison>,
}

/// Fit the rate from precomputed comparisons.
pub fn fit_comparisons(quantity: Quantity, b0: f64, gamma: f64, points: Vec<Comparison>) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::RateFit { reason: "need at least four values of q0" });
    }
    let x: Vec<f64> = points.iter().map(|p| p.b0q0).collect();
    let (lo, hi) = x.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    if hi < 10.0 * lo {
        return Err(Error::RateFit { reason: "q0 values must span a decade" });
    }
    let y: Vec<f64> = points.iter().map(|p| p.rel_error).collect();
    let fit = fit_power_law(&x, &y)?;
    let expected = expected_exponent(gamma);
    let passed = abs(fit.slope - expected) <= 0.25 * abs(expected) && fit.r_squared >= 0.95;
    Ok(RateFit {
        quantity,
        b0,
        gamma,
        exponent_fitted: fit.slope,
        exponent_expected: expected,
        r_squared: fit.r_squared,
        constant: exp(fit.intercept),
        passed,
        points,
    })
}

/// Solve the background at every `q0` and fit the decay rate of `quantity`.
pub fn fit_remainder_rate(
    quantity: Quantity,
    b0: f64,
    gas: &GasModel,
    rho0: f64,
    q0_list: &[f64],
) -> Result<RateFit> {
    let opts = ShootOptions::default();
    let points = q0_list
        .iter()
        .map(|&q0| {
            ConeProblem::new(*gas, q0, rho0, b0)
                .and_then(|p| p.shoot(&opts))
                .and_then(|bg| compare(quantity, &bg))
                .map_err(|e| Error::SweepPoint { q0, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    fit_comparisons(quantity, b0, gas.gamma, points)
}

/// Relative error at a target `b0 q0` measured against the remainder law
/// `C (b0 q0)^p` calibrated on coarser values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCheck {
    pub quantity: Quantity,
    pub target: Comparison,
    pub exponent: f64,
    /// Empirical `C`: the largest `err (b0 q0)^-p` over the calibration points.
    pub remainder_constant: f64,
    /// `factor * C * (b0 q0)^p`, floored at round-off.
    pub budget: f64,
    pub passed: bool,
}

/// Absolute floor for remainders that sit at round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Calibrate the remainder constant on `calibration` and check the error at
/// `target_b0q0` against `factor` times the extrapolated remainder.
pub fn cross_check(
    quantity: Quantity,
    b0: f64,
    gas: &GasModel,
    rho0: f64,
    calibration: &[f64],
    target_b0q0: f64,
    factor: f64,
) -> Result<CrossCheck> {
    let p = expected_exponent(gas.gamma);
    let opts = ShootOptions::default();
    let at = |bq: f64| -> Result<Comparison> {
        let q0 = bq / b0;
        ConeProblem::new(*gas, q0, rho0, b0)
            .and_then(|pr| pr.shoot(&opts))
            .and_then(|bg| compare(quantity, &bg))
            .map_err(|e| Error::SweepPoint { q0, source: Box::new(e) })
    };
    let mut constant = 0.0f64;
    for &bq in calibration {
        constant = constant.max(at(bq)?.rel_error / powf(bq, p));
    }
    let target = at(target_b0q0)?;
    let budget = (factor * constant * powf(target_b0q0, p)).max(ROUNDOFF_FLOOR);
    Ok(CrossCheck {
        quantity,
        target,
        exponent: p,
        remainder_constant: constant,
        budget,
        passed: target.rel_error <= budget,
    })
}
