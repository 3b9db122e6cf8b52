//! Fixed-step RK4 with local step halving and an adaptive Dormand-Prince 4(5)
//! integrator with event location.

use crate::error::{Error, Result};
use crate::math::{abs, powf};
use crate::roots::brent;

/// One classical Runge-Kutta step.
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: ?Sized + FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// RK4 step that recursively halves itself while `stiff` flags either end of
/// the step, accepting once a full step and two half steps agree to `tol`
/// (relative to the state magnitude).
pub fn rk4_step_guarded<const N: usize, F, G>(
    f: &mut F,
    stiff: &G,
    t: f64,
    y: &[f64; N],
    h: f64,
    tol: f64,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(f64, &[f64; N]) -> bool,
{
    guarded(f, stiff, t, y, h, tol, 0)
}

fn guarded<const N: usize, F, G>(
    f: &mut F,
    stiff: &G,
    t: f64,
    y: &[f64; N],
    h: f64,
    tol: f64,
    depth: u32,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(f64, &[f64; N]) -> bool,
{
    let full = rk4_step(f, t, y, h)?;
    if !stiff(t, y) && !stiff(t + h, &full) {
        return Ok(full);
    }
    let mid = rk4_step(f, t, y, 0.5 * h)?;
    let two = rk4_step(f, t + 0.5 * h, &mid, 0.5 * h)?;
    let agree = (0..N).all(|i| abs(two[i] - full[i]) <= tol * abs(two[i]).max(1e-300));
    if agree {
        return Ok(two);
    }
    if depth >= 40 {
        return Err(Error::Stiffness { s: t });
    }
    let mid = guarded(f, stiff, t, y, 0.5 * h, tol, depth + 1)?;
    guarded(f, stiff, t + 0.5 * h, &mid, 0.5 * h, tol, depth + 1)
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Tolerances for [`dopri45`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-300, max_steps: 200_000 }
    }
}

/// Where an adaptive integration stopped.
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub event: bool,
    pub steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand-Prince step: fifth-order solution and embedded error vector.
fn dp_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut tmp = [0.0; N];
    for i in 0..N {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    let k2 = f(t + C2 * h, &tmp)?;
    for i in 0..N {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    let k3 = f(t + C3 * h, &tmp)?;
    for i in 0..N {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    let k4 = f(t + C4 * h, &tmp)?;
    for i in 0..N {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    let k5 = f(t + C5 * h, &tmp)?;
    for i in 0..N {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    let k6 = f(t + h, &tmp)?;
    let mut y5 = [0.0; N];
    for i in 0..N {
        y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let k7 = f(t + h, &y5)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok((y5, err, k7))
}

/// Adaptive Dormand-Prince integration from `t0` to `t1` (either direction).
pub fn dopri45<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    h0: f64,
    tol: Tolerances,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    dopri45_event(f, |_, _| 1.0, t0, y0, t1, h0, tol)
}

/// Adaptive Dormand-Prince integration that stops at the first sign change of
/// `event(t, y)`. The crossing is located by re-stepping from the last
/// accepted point with a step length chosen by Brent's method.
pub fn dopri45_event<const N: usize, F, G>(
    mut f: F,
    event: G,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    h0: f64,
    tol: Tolerances,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(f64, &[f64; N]) -> f64,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = abs(t1 - t0);
    let mut t = t0;
    let mut y = y0;
    let mut h = abs(h0).min(span).max(span * 1e-16) * dir;
    let mut k1 = f(t, &y)?;
    let mut g_prev = event(t, &y);
    let mut steps = 0;
    while dir * (t1 - t) > 0.0 {
        if steps >= tol.max_steps {
            return Err(Error::NoConvergence { what: "dopri45 step budget" });
        }
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        let (y_new, err, k7) = match dp_step(&mut f, t, &y, &k1, h) {
            Ok(v) => v,
            Err(e) => {
                if abs(h) <= span * 1e-14 || abs(h) < 1e-300 {
                    return Err(e);
                }
                h *= 0.25;
                continue;
            }
        };
        let mut norm: f64 = 0.0;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * abs(y[i]).max(abs(y_new[i]));
            let r = err[i] / sc;
            norm = norm.max(abs(r));
        }
        if norm <= 1.0 {
            let t_new = t + h;
            let g_new = event(t_new, &y_new);
            steps += 1;
            if (g_prev > 0.0) != (g_new > 0.0) || g_new == 0.0 {
                let (tt, yy) = locate(&mut f, &event, t, &y, &k1, h, g_prev)?;
                return Ok(Outcome { t: tt, y: yy, event: true, steps });
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            g_prev = g_new;
            let fac = if norm == 0.0 { 5.0 } else { (0.9 * powf(norm, -0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if norm.is_finite() { (0.9 * powf(norm, -0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
            if abs(h) < span * 1e-15 || abs(h) < 1e-300 {
                return Err(Error::Stiffness { s: t });
            }
        }
    }
    Ok(Outcome { t, y, event: false, steps })
}

fn locate<const N: usize, F, G>(
    f: &mut F,
    event: &G,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    g0: f64,
) -> Result<(f64, [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(f64, &[f64; N]) -> f64,
{
    let sign = if g0 > 0.0 { 1.0 } else { -1.0 };
    let hs = brent(
        |hh| {
            if hh == 0.0 {
                return Ok(g0 * sign);
            }
            let (yy, _, _) = dp_step(f, t, y, k1, hh)?;
            Ok(event(t + hh, &yy) * sign)
        },
        0.0,
        h,
        abs(h) * 1e-15,
        200,
    )?;
    let (yy, _, _) = dp_step(f, t, y, k1, hs)?;
    Ok((t + hs, yy))
}
