//! The multiplier `M phi = z^mu r a(s) d_z phi + z^(mu+1) b(s) d_r phi` and the
//! sign conditions that make the weighted energy identity coercive.

use alloc::vec::Vec;

use super::coefficients::{point_coefficients, shock_coefficients, PointCoefficients};
use crate::background::{characteristic_slopes, BackgroundSolution, ConicalState};
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

/// Multiplier profile `a = 1`, `b = s^2 (1 + (s - b0)/b0)`, with `b'`.
/// The offset `t = s - b0` is passed separately to keep it exact.
pub fn multiplier_profile(s: f64, t: f64, b0: f64) -> (f64, f64, f64) {
    let b = s * s * (1.0 + t / b0);
    let db = 2.0 * s * (1.0 + t / b0) + s * s / b0;
    (1.0, b, db)
}

/// Energy-form coefficients `K1..K4` at one node.
pub fn k_coefficients(pc: &PointCoefficients, a: f64, b: f64, db: f64, mu: f64) -> [f64; 4] {
    let s = pc.s;
    let [p1, p2, p3, p4, p5] = pc.p;
    let [dp1, dp2, dp3] = pc.dp;
    let da = 0.0;
    let k1 = (0.5 * s * s - s * p1) * da + 0.5 * db + (-0.5 * mu * s - p1 - s * dp1 + 2.0 * p4) * a;
    let k2 = -s * p2 * da + s * db + (-p2 + 2.0 * p5 - s * dp2) * a + (-(mu + 1.0) + 2.0 * p4 / s) * b;
    let k3 = -0.5 * s * s * p2 * da
        + (s * p1 - 0.5 * p2) * db
        + (0.5 * mu * s * p2 - 0.5 * s * s * dp2) * a
        + (-(mu + 1.0) * p1 + s * dp1 - 0.5 * dp2 + 2.0 * p5 / s) * b;
    let k4 = 0.5 * s * s * p3 * da - 0.5 * p3 * db
        + (-0.5 * mu * s * p3 + 0.5 * s * s * dp3) * a
        + (p3 / s - 0.5 * dp3) * b;
    [k1, k2, k3, k4]
}

/// Smallest eigenvalue of the `(d_z, d_r)` block of the slice form `N1`.
pub fn lambda_min(s: f64, a: f64, b: f64, p1: f64, p2: f64) -> f64 {
    let d1 = 0.5 * s * a;
    let d2 = b * p1 - 0.5 * s * a * p2;
    0.5 * (d1 + d2 - sqrt((d1 - d2) * (d1 - d2) + b * b))
}

/// Multiplier data on one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiplierNode {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub k: [f64; 4],
    /// `K2^2 - 4 K1 K3`.
    pub discriminant: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `b / (s a)`, which must lie strictly between the characteristic slopes.
    pub ratio: f64,
    pub lambda_min: f64,
}

impl MultiplierNode {
    pub fn interior_ok(&self) -> bool {
        self.k[0] > 0.0 && self.k[3] > 0.0 && self.discriminant < 0.0
    }

    pub fn window_ok(&self) -> bool {
        self.a > 0.0 && self.lambda1 < self.ratio && self.ratio < self.lambda2 && self.lambda_min > 0.0
    }
}

/// Everything needed to judge the first-order energy estimate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiplierReport {
    pub mu: f64,
    pub nodes: Vec<MultiplierNode>,
    /// Extra nodes at quarter spacing in the first and last table intervals.
    pub spot_checks: Vec<MultiplierNode>,
    pub interior_ok: bool,
    pub lambda_window_ok: bool,
    /// Coefficients of `(d_z phi)^2` and `(d_theta phi / r)^2` in `b0 N1 - N2`
    /// on the cone after substituting `d_r = b0 d_z`.
    pub cone_cancellation: [f64; 2],
    pub cone_cancellation_residual: f64,
    pub beta: [f64; 4],
    pub mu1: f64,
    pub mu2: f64,
    pub q1: f64,
    pub q2: f64,
    pub c3: f64,
    pub c6: f64,
    /// Factor turning the shock-trace energy into `(d_z phi)^2` control.
    pub absorption: f64,
    pub q0: f64,
    pub q0_closed_form: f64,
    /// `C6 (1+b0^2)^2 / (4 b0^2 C3) - 1`.
    pub c6_c3_identity: f64,
    pub verdict: bool,
}

fn node_at(st: &ConicalState, t: f64, bg: &BackgroundSolution, mu: f64) -> Result<MultiplierNode> {
    let gas = bg.gas();
    let pc = point_coefficients(st, gas)?;
    let (a, b, db) = multiplier_profile(st.s, t, bg.b0());
    let k = k_coefficients(&pc, a, b, db, mu);
    let (lambda1, lambda2) = characteristic_slopes(st, gas)?;
    Ok(MultiplierNode {
        s: st.s,
        a,
        b,
        k,
        discriminant: k[1] * k[1] - 4.0 * k[0] * k[2],
        lambda1,
        lambda2,
        ratio: b / (st.s * a),
        lambda_min: lambda_min(st.s, a, b, pc.p[0], pc.p[1]),
    })
}

/// Evaluate the multiplier conditions for weight exponent `mu < -1`.
pub fn multiplier_eval(bg: &BackgroundSolution, mu: f64) -> Result<MultiplierReport> {
    if !(mu < -1.0) || !mu.is_finite() {
        return Err(Error::InvalidWeight { mu });
    }
    let b0 = bg.b0();
    let gas = bg.gas();
    let n = bg.shock_index();
    let nodes = (0..=n)
        .map(|i| node_at(&bg.node(i), bg.offset(i), bg, mu))
        .collect::<Result<Vec<_>>>()?;
    let mut spot_checks = Vec::new();
    for i in [0, n - 1] {
        let (t0, t1) = (bg.offset(i), bg.offset(i + 1));
        for k in 1..4 {
            let t = t0 + (t1 - t0) * k as f64 / 4.0;
            spot_checks.push(node_at(&bg.state_at_offset(t)?, t, bg, mu)?);
        }
    }
    let interior_ok = nodes.iter().chain(&spot_checks).all(MultiplierNode::interior_ok);
    let lambda_window_ok = nodes.iter().chain(&spot_checks).all(MultiplierNode::window_ok);

    let cone = point_coefficients(&bg.node(0), gas)?;
    let (a0, bb0, _) = multiplier_profile(b0, 0.0, b0);
    let [p1, p2, p3, ..] = cone.p;
    let x2 = b0 * (0.5 * b0 * a0 + bb0 * b0 + (bb0 * p1 - 0.5 * b0 * a0 * p2) * b0 * b0)
        - ((b0 * a0 * p1 - 0.5 * bb0) + b0 * a0 * p2 * b0 + 0.5 * bb0 * p2 * b0 * b0);
    let th2 = b0 * 0.5 * b0 * a0 * p3 - 0.5 * bb0 * p3;
    let cone_cancellation = [x2, th2];
    let cone_cancellation_residual = abs(x2).max(abs(th2));

    let s0 = bg.s0;
    let shock = point_coefficients(&bg.node(n), gas)?;
    let (a, b, _) = multiplier_profile(s0, bg.width, b0);
    let [p1, p2, p3, ..] = shock.p;
    let beta0 = s0 * p1 * a - 0.5 * s0 * s0 * a - 0.5 * b;
    let beta1 = s0 * p2 * a - s0 * b;
    let beta2 = 0.5 * p2 * b - s0 * p1 * b + 0.5 * s0 * s0 * p2 * a;
    let beta3 = 0.5 * p3 * (b - s0 * s0 * a);
    let sc = shock_coefficients(bg)?;
    let lead = beta0 - sc.mu1 * beta1 + beta2 * sc.mu1 * sc.mu1;
    let cross = beta1 - 2.0 * sc.mu1 * beta2;
    let q1 = lead - 0.5 * abs(cross);
    let q2 = -beta2 + 0.5 * abs(cross);
    let (c3, c6) = (q1, q2);
    let ratio = sc.mu2 / shock.u_r;
    let lever = 1.0 - sc.mu1 * s0;
    let absorption = ratio * ratio * 4.0 * lever * lever / (mu * mu);
    let q0 = c3 - c6 * absorption;
    let kappa = 0.5 * (gas.gamma - 1.0) * b0 * b0 * (1.0 + b0 * b0);
    let q0_closed_form = (gas.gamma - 1.0) * b0 * b0 * powi3(1.0 + b0 * b0) / (8.0 * (1.0 - kappa))
        * (1.0 - 1.0 / (mu * mu));
    let c6_c3_identity = c6 * (1.0 + b0 * b0) * (1.0 + b0 * b0) / (4.0 * b0 * b0 * c3) - 1.0;
    let verdict = interior_ok && lambda_window_ok && q0 > 0.0;
    Ok(MultiplierReport {
        mu,
        nodes,
        spot_checks,
        interior_ok,
        lambda_window_ok,
        cone_cancellation,
        cone_cancellation_residual,
        beta: [beta0, beta1, beta2, beta3],
        mu1: sc.mu1,
        mu2: sc.mu2,
        q1,
        q2,
        c3,
        c6,
        absorption,
        q0,
        q0_closed_form,
        c6_c3_identity,
        verdict,
    })
}

fn powi3(x: f64) -> f64 {
    x * x * x
}
