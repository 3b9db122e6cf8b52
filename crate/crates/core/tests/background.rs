//! Background solve: jump relations, tangency, Bernoulli, integrator
//! agreement and detachment.

use std::time::Instant;

use conic_core::background::{
    apple_curve, critical_angle, ode_rhs, solve, supersonic_z_threshold, ConeProblem, ConicalState, Integrator,
};
use conic_core::error::Error;
use conic_core::gas::{Freestream, GasModel};

fn gas14() -> GasModel {
    GasModel::new(1.0, 1.4).unwrap()
}

#[test]
fn reference_cone_converges() {
    let start = Instant::now();
    let bg = solve(gas14(), 50.0, 1.0, 0.1).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let d = &bg.diagnostics;
    assert!(d.tangency_residual < 1e-10, "{d:?}");
    assert!(d.rh_residual < 1e-12, "{d:?}");
    assert!(d.bernoulli_drift < 1e-9, "{d:?}");
    assert!(d.entropy.holds);
    assert!(elapsed < 1.0, "{elapsed} s");
}

/// Jump relations written out directly from the shock geometry.
#[test]
fn jump_relations_from_geometry() {
    let gas = gas14();
    let bg = solve(gas, 50.0, 1.0, 0.1).unwrap();
    let p = bg.post;
    let fs = bg.freestream();
    // Tangential velocity along (1, s0) is continuous.
    assert!(((p.u_z + p.s0 * p.u_r) - fs.q0).abs() < 1e-12 * fs.q0);
    // Normal mass flux along (-s0, 1) is continuous.
    let down = p.rho * (p.u_r - p.s0 * p.u_z);
    let up = -fs.rho0 * p.s0 * fs.q0;
    assert!((down - up).abs() < 1e-12 * fs.rho0 * fs.q0);
    let bern = 0.5 * (p.u_r * p.u_r + p.u_z * p.u_z) + gas.enthalpy(p.rho).unwrap();
    assert!((bern / fs.bernoulli - 1.0).abs() < 1e-13);
    // Compressive, and the flow is tangent to the cone.
    assert!(p.rho > fs.rho0);
    let cone = bg.node(0);
    assert!((cone.u_r - bg.b0() * cone.u_z).abs() < 1e-10 * cone.u_z);
}

/// Independent fixed-step RK4 in `s` on the conical ODE from the shock to the cone.
#[test]
fn table_matches_independent_integration() {
    let gas = gas14();
    let bg = solve(gas, 50.0, 1.0, 0.1).unwrap();
    let p = bg.post;
    let f = |st: &ConicalState| {
        let d = ode_rhs(st, &gas).unwrap();
        [d.rho, d.u_r, d.u_z]
    };
    let n = 20_000;
    let h = -(bg.s0 - bg.b0()) / n as f64;
    let mut y = [p.rho, p.u_r, p.u_z];
    let mut s = bg.s0;
    let at = |s: f64, y: [f64; 3]| ConicalState { s, rho: y[0], u_r: y[1], u_z: y[2] };
    for _ in 0..n {
        let k1 = f(&at(s, y));
        let y2 = [0, 1, 2].map(|i| y[i] + 0.5 * h * k1[i]);
        let k2 = f(&at(s + 0.5 * h, y2));
        let y3 = [0, 1, 2].map(|i| y[i] + 0.5 * h * k2[i]);
        let k3 = f(&at(s + 0.5 * h, y3));
        let y4 = [0, 1, 2].map(|i| y[i] + h * k3[i]);
        let k4 = f(&at(s + h, y4));
        y = [0, 1, 2].map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        s += h;
    }
    let cone = bg.node(0);
    assert!((cone.rho / y[0] - 1.0).abs() < 1e-9);
    assert!((cone.u_r / y[1] - 1.0).abs() < 1e-9);
    assert!((cone.u_z / y[2] - 1.0).abs() < 1e-12);
    // Midpoint of the table through the Hermite interpolant.
    let mid = bg.state_at(0.5 * (bg.s0 + bg.b0())).unwrap();
    assert!(mid.rho > cone.rho.min(p.rho) && mid.rho < cone.rho.max(p.rho));
}

#[test]
fn rk4_and_dormand_prince_agree() {
    let problem = ConeProblem::new(gas14(), 50.0, 1.0, 0.1).unwrap();
    let bg = solve(gas14(), 50.0, 1.0, 0.1).unwrap();
    let post = problem.post_shock(bg.width).unwrap();
    let (_, a) = problem.integrate_inward(bg.width, &post, 400, 3.0, Integrator::Rk4).unwrap();
    let (_, b) = problem
        .integrate_inward(bg.width, &post, 400, 3.0, Integrator::DormandPrince { rtol: 1e-12 })
        .unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x[0] / y[0] - 1.0).abs() < 1e-10);
        assert!((x[1] / y[1] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn flux_integral_matches_simpson() {
    let bg = solve(gas14(), 50.0, 1.0, 0.1).unwrap().extend(0.05 * (0.10112 - 0.1), 50).unwrap();
    for xi in [1e-6, -3e-5, 4e-5] {
        let n = 200;
        let h = xi / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * bg.state_at(bg.s0 + k as f64 * h).unwrap().u_r;
        }
        let simpson = acc * h / 3.0;
        let g = bg.flux_integral(xi).unwrap();
        assert!((g / simpson - 1.0).abs() < 1e-10, "{xi}: {g} vs {simpson}");
    }
    assert_eq!(bg.flux_integral(0.0).unwrap(), 0.0);
}

#[test]
fn wide_cone_detaches() {
    let err = solve(gas14(), 50.0, 1.0, 2.0).unwrap_err();
    assert!(matches!(err, Error::ShockDetached { .. }), "{err:?}");
}

#[test]
fn axial_threshold_root() {
    for gamma in [1.2, 1.4, 2.0] {
        let b = supersonic_z_threshold(gamma);
        let residual = 1.0 - 0.5 * (gamma - 1.0) * b * b * (1.0 + b * b);
        assert!(residual.abs() < 1e-14);
    }
    assert!((supersonic_z_threshold(1.4) - 1.338).abs() < 1e-3);
}

#[test]
fn critical_angle_below_threshold() {
    let gas = gas14();
    let mut last = 0.0;
    for q0 in [10.0, 40.0] {
        let fs = Freestream::new(&gas, q0, 1.0).unwrap();
        let c = critical_angle(&gas, &fs).unwrap();
        assert!(c.cone_slope < supersonic_z_threshold(1.4));
        assert!(c.cone_slope > last);
        last = c.cone_slope;
        let curve = apple_curve(&gas, &fs, 24);
        assert!(curve.len() > 10);
        assert!(curve.iter().all(|p| p.cone_slope < p.s0));
    }
}

#[test]
fn sweep_of_cones_solves() {
    let gas = gas14();
    for (b0, q0) in [(0.05, 500.0), (0.2, 20.0), (0.3, 1000.0)] {
        let bg = solve(gas, q0, 1.0, b0).unwrap();
        assert!(bg.s0 > b0);
        assert!(bg.diagnostics.tangency_residual < 1e-10);
        assert!(bg.diagnostics.entropy.holds);
    }
}
