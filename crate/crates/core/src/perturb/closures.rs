//! Pointwise form of the perturbed potential equation: background
//! coefficients, quasilinear closures `f1..f7`, and the full equation used
//! to cross-check them.

use crate::error::Result;
use crate::gas::GasModel;
use crate::background::ConicalState;
use crate::stability::{point_coefficients, PointCoefficients};

/// Gradient of the perturbation in physical components `(d_z, d_r, d_theta / r)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Gradient {
    pub z: f64,
    pub r: f64,
    pub t: f64,
}

impl Gradient {
    pub fn norm_sq(&self) -> f64 {
        self.z * self.z + self.r * self.r + self.t * self.t
    }
}

/// Second derivatives in cylindrical coordinates, with raw `theta` derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Hessian {
    pub zz: f64,
    pub zr: f64,
    pub rr: f64,
    pub tt: f64,
    pub zt: f64,
    pub rt: f64,
}

/// Background values needed by the closures at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCoefficients {
    pub s: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub c2: f64,
    pub du_r: f64,
    pub du_z: f64,
    /// `u_z^2 - c^2`.
    pub margin: f64,
    pub p: [f64; 5],
}

impl From<&PointCoefficients> for NodeCoefficients {
    fn from(pc: &PointCoefficients) -> Self {
        Self {
            s: pc.s,
            u_r: pc.u_r,
            u_z: pc.u_z,
            c2: pc.c2,
            du_r: pc.du_r,
            du_z: pc.du_z,
            margin: pc.axial_margin,
            p: pc.p,
        }
    }
}

impl NodeCoefficients {
    pub fn at(state: &ConicalState, gas: &GasModel) -> Result<Self> {
        Ok(Self::from(&point_coefficients(state, gas)?))
    }

    pub(crate) fn to_array(self) -> [f64; 12] {
        let [p1, p2, p3, p4, p5] = self.p;
        [self.s, self.u_r, self.u_z, self.c2, self.du_r, self.du_z, self.margin, p1, p2, p3, p4, p5]
    }

    pub(crate) fn from_array(a: &[f64; 12]) -> Self {
        Self {
            s: a[0],
            u_r: a[1],
            u_z: a[2],
            c2: a[3],
            du_r: a[4],
            du_z: a[5],
            margin: a[6],
            p: [a[7], a[8], a[9], a[10], a[11]],
        }
    }

    /// Characteristic slopes `P1 -+ sqrt(P1^2 - P2)` of the linear operator.
    pub fn slopes(&self) -> (f64, f64) {
        let [p1, p2, ..] = self.p;
        let root = crate::math::sqrt((p1 * p1 - p2).max(0.0));
        (p1 - root, p1 + root)
    }
}

/// `f1..f7` at a node for gradient `g`.
pub fn closures(nc: &NodeCoefficients, gamma: f64, g: Gradient) -> [f64; 7] {
    let inv = 1.0 / nc.margin;
    let half_m = 0.5 * (gamma - 1.0);
    let half_p = 0.5 * (gamma + 1.0);
    let (uz, ur) = (nc.u_z, nc.u_r);
    let t2 = g.t * g.t;
    // Change of c^2, up to the factor -(gamma-1)/2.
    let dq = (2.0 * uz + g.z) * g.z + (2.0 * ur + g.r) * g.r + t2;
    let s = nc.s;
    let f1 = inv * (-2.0 * uz * g.z - g.z * g.z - half_m * dq);
    let f2 = inv * (-2.0 * uz * g.r - 2.0 * ur * g.z - 2.0 * g.z * g.r);
    let f3 = inv * (-2.0 * ur * g.r - g.r * g.r - half_m * dq);
    let f4 = -inv * (t2 + half_m * dq);
    let f5 = -2.0 * inv * (uz * g.t + g.z * g.t);
    let f6 = -2.0 * inv * (ur * g.t + g.r * g.t);
    let f7 = inv
        * (s * s * nc.du_z * (half_p * g.z * g.z + half_m * g.r * g.r + half_m * t2)
            - s * nc.du_r * (half_m * g.z * g.z + half_p * g.r * g.r + half_m * t2)
            - 2.0 * s * nc.du_z * g.z * g.r
            - ur * (half_m * g.z * g.z + half_m * g.r * g.r + 0.5 * (gamma - 3.0) * t2)
            + g.r * (t2 - half_m * dq));
    [f1, f2, f3, f4, f5, f6, f7]
}

/// Linear part `L phi` at radius `r`.
pub fn linear_operator(nc: &NodeCoefficients, r: f64, g: Gradient, h: &Hessian) -> f64 {
    let [p1, p2, p3, p4, p5] = nc.p;
    h.zz + 2.0 * p1 * h.zr + p2 * h.rr - p3 * h.tt / (r * r) + 2.0 * p4 / r * g.z + 2.0 * p5 / r * g.r
}

/// Closure side `sum f_i d^2 phi + f7 / r`.
pub fn closure_side(f: &[f64; 7], r: f64, h: &Hessian) -> f64 {
    f[0] * h.zz + f[1] * h.zr + f[2] * h.rr + f[3] * h.tt / (r * r) + (f[4] * h.zt + f[5] * h.rt + f[6]) / r
}

/// Solve the perturbed equation `L phi = closures + source` for `d_zz phi`
/// given the remaining derivatives. With `linear` set the closures are frozen
/// to zero.
pub fn solve_zz(nc: &NodeCoefficients, gamma: f64, r: f64, g: Gradient, h: &Hessian, source: f64, linear: bool) -> f64 {
    let f = if linear { [0.0; 7] } else { closures(nc, gamma, g) };
    let [p1, p2, p3, p4, p5] = nc.p;
    let rest = -(2.0 * p1 - f[1]) * h.zr - (p2 - f[2]) * h.rr + (p3 + f[3]) * h.tt / (r * r)
        - 2.0 * (p4 * g.z + p5 * g.r) / r
        + (f[4] * h.zt + f[5] * h.rt + f[6]) / r
        + source;
    rest / (1.0 - f[0])
}

/// Residual of the full potential equation in cylindrical coordinates for
/// total gradient `(Phi_z, Phi_r, Phi_theta / r)` and total second derivatives.
pub fn full_potential_residual(gamma: f64, bernoulli: f64, r: f64, g: Gradient, h: &Hessian) -> f64 {
    let c2 = (gamma - 1.0) * (bernoulli - 0.5 * g.norm_sq());
    let (pz, pr, pt) = (g.z, g.r, g.t * r);
    (pz * pz - c2) * h.zz + (pr * pr - c2) * h.rr + (pt * pt / (r * r) - c2) * h.tt / (r * r)
        + 2.0 * pz * (pr * h.zr + pt * h.zt / (r * r))
        + 2.0 * pr * pt * h.rt / (r * r)
        - pr / r * (pt * pt / (r * r) + c2)
}

/// Second derivatives of the background potential at `(z, s z)`.
pub fn background_hessian(nc: &NodeCoefficients, z: f64) -> Hessian {
    Hessian { zz: -nc.s * nc.du_z / z, zr: nc.du_z / z, rr: nc.du_r / z, ..Hessian::default() }
}
