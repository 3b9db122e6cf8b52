use alloc::boxed::Box;
use core::fmt;

/// Every failure the solver stack can report.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A parameter is outside its physical range.
    Domain { what: &'static str, value: f64 },
    /// The requested speed exceeds the limiting speed `sqrt(2 C0)`.
    Cavitation { speed_sq: f64, limit: f64 },
    /// No compressive density ratio solves the jump relation at this slope.
    NoCompressiveRoot { s0: f64 },
    /// The inward integration hit a sonic point of the conical ODE.
    SonicDegeneracy { s: f64, denominator: f64 },
    /// Step halving could not resolve a steep stretch of the background.
    Stiffness { s: f64 },
    /// The tangency residual never changes sign: the shock cannot attach.
    ShockDetached { b0: f64 },
    /// The converged shock violates the compressive entropy conditions.
    BranchSelection { s0: f64 },
    /// The flow behind the shock is not supersonic along the axis.
    StrongBranchRejected { s: f64 },
    /// A point lies outside the annulus between cone and shock.
    OutsideAnnulus { z: f64, r: f64 },
    /// The cone half-angle is too wide for the linearisation.
    SupersonicInZViolation { b0: f64, b_star: f64 },
    /// The multiplier weight `mu` is not admissible.
    InvalidWeight { mu: f64 },
    /// The leading shock coefficient vanishes.
    DivisionSafety { b1: f64 },
    /// A Hardy sample is not smooth or finite on `[1, T]`.
    InvalidSample { index: usize },
    /// A rate fit was requested on unusable data.
    RateFit { reason: &'static str },
    /// A background solve inside a sweep failed.
    SweepPoint { q0: f64, source: Box<Error> },
    /// Malformed configuration.
    Config { reason: &'static str },
    /// The requested step size violates the CFL bound.
    Cfl { dz: f64, limit: f64 },
    /// The perturbation grew beyond the allowed bound.
    Blowup { z: f64 },
    /// The shock left the stored outward extension of the background.
    ExtensionExceeded { z: f64, xi: f64, limit: f64 },
    /// Hyperbolicity in `z` was lost at a grid node.
    LostHyperbolicity { z: f64, sigma: f64 },
    /// The entropy inequality failed on the perturbed shock.
    Entropy { z: f64 },
    /// An iterative solver ran out of iterations.
    NoConvergence { what: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of range: {value}"),
            Error::Cavitation { speed_sq, limit } => {
                write!(f, "speed squared {speed_sq} exceeds limiting value {limit}")
            }
            Error::NoCompressiveRoot { s0 } => {
                write!(f, "no compressive density ratio at shock slope {s0}")
            }
            Error::SonicDegeneracy { s, denominator } => {
                write!(f, "sonic degeneracy at s = {s} (denominator {denominator})")
            }
            Error::Stiffness { s } => write!(f, "step underflow near s = {s}"),
            Error::ShockDetached { b0 } => {
                write!(f, "no attached shock for cone slope {b0}: tangency residual keeps one sign")
            }
            Error::BranchSelection { s0 } => {
                write!(f, "shock at slope {s0} violates the entropy conditions")
            }
            Error::StrongBranchRejected { s } => {
                write!(f, "flow is not supersonic in z at s = {s}")
            }
            Error::OutsideAnnulus { z, r } => {
                write!(f, "point (z = {z}, r = {r}) lies outside the flow region")
            }
            Error::SupersonicInZViolation { b0, b_star } => {
                write!(f, "cone slope {b0} is not below the threshold {b_star}")
            }
            Error::InvalidWeight { mu } => write!(f, "weight exponent {mu} must be below -1"),
            Error::DivisionSafety { b1 } => write!(f, "shock coefficient B1 = {b1} is too small"),
            Error::InvalidSample { index } => write!(f, "Hardy sample {index} is not finite"),
            Error::RateFit { reason } => write!(f, "rate fit: {reason}"),
            Error::SweepPoint { q0, source } => write!(f, "sweep point q0 = {q0}: {source}"),
            Error::Config { reason } => write!(f, "configuration: {reason}"),
            Error::Cfl { dz, limit } => write!(f, "step {dz} exceeds the CFL limit {limit}"),
            Error::Blowup { z } => write!(f, "perturbation blew up at z = {z}"),
            Error::ExtensionExceeded { z, xi, limit } => {
                write!(f, "shock offset {xi} at z = {z} leaves the background extension {limit}")
            }
            Error::LostHyperbolicity { z, sigma } => {
                write!(f, "lost hyperbolicity in z at z = {z}, sigma = {sigma}")
            }
            Error::Entropy { z } => write!(f, "entropy condition failed on the shock at z = {z}"),
            Error::NoConvergence { what } => write!(f, "{what} did not converge"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::SweepPoint { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
