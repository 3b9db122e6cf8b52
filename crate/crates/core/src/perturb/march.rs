use alloc::vec;
use alloc::vec::Vec;

use super::closures::{solve_zz, Gradient, Hessian, NodeCoefficients};
use super::config::MarchConfig;
use super::energy::{Accumulator, EnergyReport};
use super::field::{init_data, PerturbationField};
use super::shock::{ShockClosure, ShockData};
use crate::background::BackgroundSolution;
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

/// Source terms and boundary data for manufactured solutions.
pub trait Forcing {
    /// Right-hand side added to the closures of the perturbed equation.
    fn source(&self, _z: f64, _r: f64, _theta: f64) -> f64 {
        0.0
    }
    /// `(h, dh/dz)` in the cone condition `d_r phi - b0 d_z phi = h`, with the
    /// derivative taken along the cone.
    fn cone(&self, _z: f64, _theta: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
    /// Prescribed trace `phi` and its derivative `d/dz phi(z, s0 z)` along a
    /// shock frozen at `r = s0 z`; `None` selects the free-boundary closure.
    fn frozen_shock(&self, _z: f64, _r: f64, _theta: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Below this value of `(|xi| + |grad phi|)^2` the shock remainder is at
/// round-off and is left out of the remainder ratio.
pub const KAPPA_RESOLVED: f64 = 1e-13;

/// No forcing: the physical problem.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unforced;

impl Forcing for Unforced {}

/// Derivatives and rates at one node.
#[derive(Debug, Clone, Copy, Default)]
struct NodeEval {
    grad: Gradient,
    hess: Hessian,
    r: f64,
    rate_phi: f64,
    rate_phi_z: f64,
    rate_phi_r: f64,
}

/// Per-station quantities gathered while evaluating the rates.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Station {
    pub sup_grad: f64,
    pub sup_xi: f64,
    pub slice0: f64,
    pub slice1: f64,
    pub shock_slice: f64,
    pub trace_phi2: f64,
    pub trace_phi_z2: f64,
    pub sup_kappa: f64,
    pub kappa_ratio: f64,
    pub max_speed: f64,
}

struct Rates {
    phi: Vec<f64>,
    phi_z: Vec<f64>,
    phi_r: Vec<f64>,
    xi: Vec<f64>,
}

impl Rates {
    fn zeros(n: usize, nt: usize) -> Self {
        Self { phi: vec![0.0; n], phi_z: vec![0.0; n], phi_r: vec![0.0; n], xi: vec![0.0; nt] }
    }
}

/// `out = a u + b (v + dz k)` on every evolved array.
fn combine(out: &mut PerturbationField, a: f64, u: &PerturbationField, b: f64, v: &PerturbationField, dz: f64, k: &Rates) {
    let lin = |o: &mut [f64], u: &[f64], v: &[f64], k: &[f64]| {
        for i in 0..o.len() {
            o[i] = a * u[i] + b * (v[i] + dz * k[i]);
        }
    };
    lin(&mut out.phi, &u.phi, &v.phi, &k.phi);
    lin(&mut out.phi_z, &u.phi_z, &v.phi_z, &k.phi_z);
    lin(&mut out.phi_r, &u.phi_r, &v.phi_r, &k.phi_r);
    lin(&mut out.xi, &u.xi, &v.xi, &k.xi);
}

/// Shock-fitted marcher for one configuration.
pub struct Marcher<'a, F: Forcing> {
    cfg: MarchConfig,
    bg: &'a BackgroundSolution,
    closure: ShockClosure<'a>,
    forcing: &'a F,
    gamma: f64,
    bernoulli: f64,
    ns: usize,
    nt: usize,
    dsig: f64,
    dth: f64,
    nc: Vec<NodeCoefficients>,
    nc_ref: Vec<[f64; 12]>,
    nc_slope: Vec<[f64; 12]>,
    xi_ref: Vec<f64>,
    delta: Vec<f64>,
    shock_kappa: Vec<f64>,
    phi_s: Vec<f64>,
}

/// Extended background suitable for marching with `cfg`.
pub fn marching_background(cfg: &MarchConfig, bg: &BackgroundSolution) -> Result<BackgroundSolution> {
    let tau = cfg.extension * (bg.s0 - bg.b0());
    bg.extend(tau, 400)
}

impl<'a, F: Forcing> Marcher<'a, F> {
    /// `bg` must already carry the outward extension; see [`marching_background`].
    pub fn new(cfg: &MarchConfig, bg: &'a BackgroundSolution, forcing: &'a F) -> Result<Self> {
        cfg.validate()?;
        let ns = cfg.n_sigma;
        let nt = cfg.n_theta;
        let probe = NodeCoefficients::at(&bg.node(0), bg.gas())?;
        Ok(Self {
            cfg: cfg.clone(),
            bg,
            closure: ShockClosure::new(bg)?,
            forcing,
            gamma: bg.gas().gamma,
            bernoulli: bg.freestream().bernoulli,
            ns,
            nt,
            dsig: 1.0 / (ns - 1) as f64,
            dth: core::f64::consts::TAU / nt as f64,
            nc: vec![probe; ns * nt],
            nc_ref: vec![[0.0; 12]; ns * nt],
            nc_slope: vec![[0.0; 12]; ns * nt],
            xi_ref: vec![f64::NAN; nt],
            delta: vec![0.0; nt],
            shock_kappa: vec![0.0; nt],
            phi_s: vec![0.0; ns * nt],
        })
    }

    fn up(&self, it: usize) -> usize {
        (it + 1) % self.nt
    }

    fn down(&self, it: usize) -> usize {
        (it + self.nt - 1) % self.nt
    }

    fn theta(&self, it: usize) -> f64 {
        self.dth * it as f64
    }

    /// `(chi_theta, chi_thetatheta)` at angle `it`.
    fn chi_angular(&self, f: &PerturbationField, it: usize) -> (f64, f64) {
        if self.nt == 1 {
            return (0.0, 0.0);
        }
        let (a, b, c) = (f.xi[self.down(it)], f.xi[it], f.xi[self.up(it)]);
        (f.z * (c - a) / (2.0 * self.dth), f.z * (c - 2.0 * b + a) / (self.dth * self.dth))
    }

    /// Background coefficients at every node for the current shock position.
    ///
    /// They are expanded to first order in `xi` about a reference position
    /// that is moved once `xi` drifts by `REFRESH` of the layer width, which
    /// keeps the expansion error near `REFRESH^2` relative.
    fn refresh_coefficients(&mut self, f: &PerturbationField) -> Result<()> {
        const REFRESH: f64 = 1e-6;
        let w = self.bg.s0 - self.bg.b0();
        let limit = self.bg.max_offset() - w;
        let ns = self.ns;
        for it in 0..self.nt {
            let xi = f.xi[it];
            if !(xi < limit && w + xi > 0.0) || !xi.is_finite() {
                return Err(Error::ExtensionExceeded { z: f.z, xi, limit });
            }
            if !(abs(xi - self.xi_ref[it]) <= REFRESH * w) {
                let h = 1e-7 * w;
                let h = if xi + h < limit { h } else { -h };
                for j in 0..ns {
                    let at = |x: f64| -> Result<[f64; 12]> {
                        let st = self.bg.state_at_offset(f.sigma(j) * (w + x))?;
                        Ok(NodeCoefficients::at(&st, self.bg.gas())?.to_array())
                    };
                    let base = at(xi)?;
                    let shifted = at(xi + h)?;
                    let k = it * ns + j;
                    self.nc_ref[k] = base;
                    for m in 0..12 {
                        self.nc_slope[k][m] = (shifted[m] - base[m]) / h;
                    }
                }
                self.xi_ref[it] = xi;
            }
            let d = xi - self.xi_ref[it];
            for j in 0..ns {
                let k = it * ns + j;
                let mut a = self.nc_ref[k];
                if d != 0.0 {
                    for (am, sm) in a.iter_mut().zip(&self.nc_slope[k]) {
                        *am += d * sm;
                    }
                }
                self.nc[k] = NodeCoefficients::from_array(&a);
            }
        }
        Ok(())
    }

    /// Impose the boundary conditions in place: the cone condition on
    /// `d_r phi`, and on the shock the trace, the shock slope and both
    /// derivatives from the outgoing invariant.
    fn close_boundaries(&mut self, f: &mut PerturbationField) -> Result<()> {
        let ns = self.ns;
        let n = ns - 1;
        let b0 = self.bg.b0();
        for it in 0..self.nt {
            let base = it * ns;
            let theta = self.theta(it);
            let (h, _) = self.forcing.cone(f.z, theta);
            f.phi_r[base] = b0 * f.phi_z[base] + h;

            let k = base + n;
            let nc = &self.nc[k];
            let (_, lambda) = nc.slopes();
            let p2 = nc.p[1];
            let w = lambda * f.phi_z[k] + p2 * f.phi_r[k];
            let data = ShockData::Outgoing { w, lambda, p2 };
            if let Some((phi, along)) = self.forcing.frozen_shock(f.z, f.chi(it), theta) {
                let (pz, pr) = data.resolve(self.bg.s0, along);
                f.phi[k] = phi;
                f.phi_z[k] = pz;
                f.phi_r[k] = pr;
                self.delta[it] = 0.0;
                self.shock_kappa[it] = 0.0;
                continue;
            }
            let (chi_t, _) = self.chi_angular(f, it);
            let sh = self.closure.solve(f.z, f.xi[it], chi_t, data, self.delta[it])?;
            f.phi[k] = sh.phi;
            f.phi_z[k] = sh.phi_z;
            f.phi_r[k] = sh.phi_r;
            self.delta[it] = sh.delta;
            self.shock_kappa[it] = sh.kappa;
        }
        Ok(())
    }

    /// `d_sigma phi = L d_r phi` on every node.
    fn refresh_sigma_slopes(&mut self, f: &PerturbationField) {
        let ns = self.ns;
        for it in 0..self.nt {
            let l = f.chi(it) - self.bg.b0() * f.z;
            let base = it * ns;
            for j in 0..ns {
                self.phi_s[base + j] = l * f.phi_r[base + j];
            }
        }
    }

    fn eval_node(&self, f: &PerturbationField, it: usize, j: usize) -> NodeEval {
        let ns = self.ns;
        let n = ns - 1;
        let h = self.dsig;
        let b0 = self.bg.b0();
        let z = f.z;
        let k = it * ns + j;
        let nc = &self.nc[k];
        let l = f.chi(it) - b0 * z;
        let lz = self.bg.s0 + self.delta[it] - b0;
        let (lt, ltt) = self.chi_angular(f, it);
        let sigma = f.sigma(j);
        let r = b0 * z + sigma * l;
        let theta = self.theta(it);
        let srow = &self.phi_s[it * ns..(it + 1) * ns];
        let prow = &f.phi_z[it * ns..(it + 1) * ns];

        let d0 = |row: &[f64]| -> f64 {
            if j == 0 {
                (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h)
            } else if j == n {
                (3.0 * row[n] - 4.0 * row[n - 1] + row[n - 2]) / (2.0 * h)
            } else {
                (row[j + 1] - row[j - 1]) / (2.0 * h)
            }
        };
        let ps = srow[j];
        let pss = d0(srow);
        let qs = d0(prow);

        let (mut pt, mut ptt, mut pst, mut qt) = (0.0, 0.0, 0.0, 0.0);
        if self.nt > 1 {
            let (a, c) = (self.down(it) * ns + j, self.up(it) * ns + j);
            let d = self.dth;
            pt = (f.phi[c] - f.phi[a]) / (2.0 * d);
            ptt = (f.phi[c] - 2.0 * f.phi[k] + f.phi[a]) / (d * d);
            qt = (f.phi_z[c] - f.phi_z[a]) / (2.0 * d);
            pst = (self.phi_s[c] - self.phi_s[a]) / (2.0 * d);
        }
        let st = -sigma * lt / l;
        let phi_t = pt + st * ps;
        let phi_tt = ptt + 2.0 * st * pst + st * st * pss + (-sigma * ltt / l + 2.0 * sigma * lt * lt / (l * l)) * ps;
        let phi_zt = qt + st * qs;
        let phi_rt = (pst + st * pss) / l - lt * ps / (l * l);
        let grad = Gradient { z: prow[j], r: f.phi_r[k], t: phi_t / r };
        let source = self.forcing.source(z, r, theta);
        let mut hess = Hessian { zz: 0.0, zr: qs / l, rr: pss / (l * l), tt: phi_tt, zt: phi_zt, rt: phi_rt };
        hess.zz = solve_zz(nc, self.gamma, r, grad, &hess, source, self.cfg.linear);
        let v = b0 + sigma * lz;
        let mut rate_phi_z = hess.zz + v * hess.zr;
        let mut rate_phi_r = hess.zr + v * hess.rr;
        if j == 0 {
            // lambda1 d_z phi + P2 d_r phi leaves through the cone; the cone
            // condition supplies the other combination.
            let (_, hz) = self.forcing.cone(z, theta);
            let (l1, _) = nc.slopes();
            let p2 = nc.p[1];
            let w = l1 * rate_phi_z + p2 * rate_phi_r;
            rate_phi_z = (w - p2 * hz) / (l1 + p2 * b0);
            rate_phi_r = b0 * rate_phi_z + hz;
        }
        NodeEval { grad, hess, r, rate_phi: grad.z + v * grad.r, rate_phi_z, rate_phi_r }
    }

    /// Rates of the evolved variables at the current state, after imposing the
    /// boundary conditions in place. With `station` the diagnostics of the
    /// state are gathered as well.
    fn evaluate(&mut self, f: &mut PerturbationField, rates: &mut Rates, station: Option<&mut Station>) -> Result<()> {
        self.refresh_coefficients(f)?;
        self.close_boundaries(f)?;
        self.refresh_sigma_slopes(f);
        let ns = self.ns;
        let n = ns - 1;
        let mut acc = Station::default();
        let want = station.is_some();
        let b0 = self.bg.b0();
        for it in 0..self.nt {
            let l = f.chi(it) - b0 * f.z;
            let lz = self.bg.s0 + self.delta[it] - b0;
            let mut slice0 = 0.0;
            let mut slice1 = 0.0;
            for j in 0..ns {
                let k = it * ns + j;
                let e = self.eval_node(f, it, j);
                rates.phi[k] = e.rate_phi;
                rates.phi_z[k] = e.rate_phi_z;
                rates.phi_r[k] = e.rate_phi_r;
                let nc = &self.nc[k];
                let sigma = f.sigma(j);
                let v = b0 + sigma * lz;
                let (l1, l2) = nc.slopes();
                let speed_s = abs(v - l1).max(abs(v - l2)) / (l * self.dsig);
                let speed_t = if self.nt > 1 { sqrt(nc.p[2].max(0.0)) / (e.r * self.dth) } else { 0.0 };
                acc.max_speed = acc.max_speed.max(speed_s + speed_t);
                let total = Gradient { z: nc.u_z + e.grad.z, r: nc.u_r + e.grad.r, t: e.grad.t };
                let c2 = (self.gamma - 1.0) * (self.bernoulli - 0.5 * total.norm_sq());
                if !(total.z * total.z > c2) {
                    return Err(Error::LostHyperbolicity { z: f.z, sigma });
                }
                if want {
                    let g2 = e.grad.norm_sq();
                    let hs = e.hess;
                    let r = e.r;
                    let h2 = hs.zz * hs.zz
                        + 2.0 * hs.zr * hs.zr
                        + hs.rr * hs.rr
                        + 2.0 * (hs.zt / r) * (hs.zt / r)
                        + 2.0 * (hs.rt / r) * (hs.rt / r)
                        + (hs.tt / (r * r)) * (hs.tt / (r * r));
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    slice0 += w * g2;
                    slice1 += w * h2;
                    acc.sup_grad = acc.sup_grad.max(sqrt(g2));
                    if j == n {
                        acc.shock_slice += self.dth * g2;
                        acc.trace_phi2 += self.dth * f.phi[k] * f.phi[k];
                        acc.trace_phi_z2 += self.dth * f.phi_z[k] * f.phi_z[k];
                        let kap = abs(self.shock_kappa[it]);
                        acc.sup_kappa = acc.sup_kappa.max(kap);
                        let size = abs(f.xi[it]) + sqrt(g2);
                        if size * size > KAPPA_RESOLVED {
                            acc.kappa_ratio = acc.kappa_ratio.max(kap / (size * size));
                        }
                    }
                }
            }
            acc.slice0 += self.dth * l * self.dsig * slice0;
            acc.slice1 += self.dth * l * self.dsig * slice1;
            rates.xi[it] = if self.forcing.frozen_shock(f.z, f.chi(it), self.theta(it)).is_some() {
                0.0
            } else {
                (self.delta[it] - f.xi[it]) / f.z
            };
        }
        acc.sup_xi = f.sup_xi();
        if let Some(s) = station {
            *s = acc;
        }
        Ok(())
    }

    /// Fourth-difference filter along `sigma` on interior nodes.
    fn filter(&self, data: &mut [f64], strength: f64, scratch: &mut Vec<f64>) {
        let ns = self.ns;
        for it in 0..self.nt {
            let row = &mut data[it * ns..(it + 1) * ns];
            scratch.clear();
            scratch.extend_from_slice(row);
            for j in 2..ns - 2 {
                let d4 = scratch[j - 2] - 4.0 * scratch[j - 1] + 6.0 * scratch[j] - 4.0 * scratch[j + 1] + scratch[j + 2];
                row[j] -= strength * d4;
            }
        }
    }

    /// March from the given field to `cfg.z_end` with the three-stage
    /// strong-stability-preserving Runge-Kutta scheme, calling `observe` at
    /// every recorded station.
    pub fn run(
        &mut self,
        mut field: PerturbationField,
        mut observe: impl FnMut(&PerturbationField),
    ) -> Result<(EnergyReport, PerturbationField)> {
        let total = self.ns * self.nt;
        let mut k = Rates::zeros(total, self.nt);
        let mut scratch = Vec::with_capacity(self.ns);
        let mut station = Station::default();
        let z_end = self.cfg.z_end;
        let mut acc = Accumulator::new(&self.cfg, self.bg.b0());
        let mut next_record = field.z;
        let mut steps = 0usize;
        let mut slope_gap = 0.0f64;
        let mut s1 = field.clone();
        let mut s2 = field.clone();
        let mut mean_delta = vec![0.0; self.nt];
        loop {
            self.evaluate(&mut field, &mut k, Some(&mut station))?;
            acc.add_station(field.z, &station);
            if field.z >= next_record || field.z >= z_end {
                acc.record(field.z, &station);
                observe(&field);
                while next_record <= field.z {
                    next_record *= self.cfg.record_ratio;
                }
            }
            if self.cfg.epsilon > 0.0 && station.sup_grad > self.cfg.blowup_factor * self.cfg.epsilon {
                return Err(Error::Blowup { z: field.z });
            }
            if field.z >= z_end {
                break;
            }
            let limit = if station.max_speed > 0.0 { self.cfg.cfl / station.max_speed } else { z_end - field.z };
            let mut dz = match self.cfg.dz {
                Some(d) if d > limit * (1.0 + 1e-12) => return Err(Error::Cfl { dz: d, limit }),
                Some(d) => d,
                None => limit,
            };
            if field.z + dz >= z_end || z_end - (field.z + dz) < 1e-9 * dz {
                dz = z_end - field.z;
            }
            let courant = dz * station.max_speed;
            let z0 = field.z;
            let chi_old: Vec<f64> = (0..self.nt).map(|it| field.chi(it)).collect();
            for (m, d) in mean_delta.iter_mut().zip(&self.delta) {
                *m = d / 6.0;
            }

            combine(&mut s1, 0.0, &field, 1.0, &field, dz, &k);
            s1.z = z0 + dz;
            self.evaluate(&mut s1, &mut k, None)?;
            for (m, d) in mean_delta.iter_mut().zip(&self.delta) {
                *m += d / 6.0;
            }
            combine(&mut s2, 0.75, &field, 0.25, &s1, dz, &k);
            s2.z = z0 + 0.5 * dz;
            self.evaluate(&mut s2, &mut k, None)?;
            for (m, d) in mean_delta.iter_mut().zip(&self.delta) {
                *m += 2.0 * d / 3.0;
            }
            s1.clone_from(&field);
            combine(&mut field, 1.0 / 3.0, &s1, 2.0 / 3.0, &s2, dz, &k);
            field.z = z0 + dz;

            for it in 0..self.nt {
                // Stored shock against the mean Rankine-Hugoniot slope of the step.
                let fd = (field.chi(it) - chi_old[it]) / dz - self.bg.s0;
                slope_gap = slope_gap.max(abs(fd - mean_delta[it]));
            }
            let strength = self.cfg.dissipation * courant.min(1.0);
            self.filter(&mut field.phi, strength, &mut scratch);
            self.filter(&mut field.phi_z, strength, &mut scratch);
            self.filter(&mut field.phi_r, strength, &mut scratch);
            steps += 1;
            let finite = field.phi.iter().chain(&field.phi_z).chain(&field.phi_r).chain(&field.xi).all(|v| v.is_finite());
            if !finite {
                return Err(Error::Blowup { z: field.z });
            }
        }
        Ok((acc.finish(steps, slope_gap), field))
    }
}

/// Initial data, extended background and march in one call.
pub fn run_march(cfg: &MarchConfig, bg: &BackgroundSolution) -> Result<EnergyReport> {
    run_march_observed(cfg, bg, |_| {})
}

/// [`run_march`] with an observer called at every recorded station.
pub fn run_march_observed(
    cfg: &MarchConfig,
    bg: &BackgroundSolution,
    observe: impl FnMut(&PerturbationField),
) -> Result<EnergyReport> {
    cfg.validate()?;
    let ext = marching_background(cfg, bg)?;
    let field = init_data(cfg, &ext)?;
    let mut m = Marcher::new(cfg, &ext, &Unforced)?;
    Ok(m.run(field, observe)?.0)
}
