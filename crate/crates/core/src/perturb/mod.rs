//! Shock-fitted marching of small perturbations of the conical background.
//!
//! The annulus between cone and shock is mapped to `sigma in [0, 1]` and the
//! potential perturbation is advanced in `z` together with its axial and
//! radial derivatives. Both boundaries are closed characteristically: the
//! cone condition supplies the incoming invariant on the cone, and on the
//! shock continuity of the potential and the Rankine-Hugoniot mass balance
//! fix the incoming invariant and the shock slope.

pub mod closures;
mod config;
mod energy;
mod field;
mod march;
pub mod shock;

pub use config::{smallness_scale, MarchConfig};
pub use energy::{energy_diagnostics, DecayFit, EnergyReport, EnergyVerdict, StationRecord, TraceHardy, HARDY_SLACK, SATURATION};
pub use field::{angular_profile, bump, bump_slope, bump_slope_max, init_data, smooth_step, smooth_step_slope, PerturbationField};
pub use march::{marching_background, run_march, run_march_observed, Forcing, Marcher, Unforced, KAPPA_RESOLVED};
pub use shock::{ShockClosure, ShockData, ShockState};
