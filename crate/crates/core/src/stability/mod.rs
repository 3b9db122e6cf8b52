//! Linearised coefficients, the multiplier energy conditions and the Hardy
//! inequality on the shock trace.

mod coefficients;
mod hardy;
mod multiplier;

pub use coefficients::{
    linear_coefficients, point_coefficients, shock_coefficients, shock_coefficients_at,
    LinearCoefficients, PointCoefficients, ShockCoefficients,
};
pub use hardy::{
    hardy_check, hardy_check_weighted, hardy_terms, random_trig_polynomials, HardyOutcome, HardyTerms, Profile,
    TrigPolynomial, PROVEN_BOUNDARY_WEIGHT, SKELETON_BOUNDARY_WEIGHT,
};
pub use multiplier::{
    k_coefficients, lambda_min, multiplier_eval, multiplier_profile, MultiplierNode,
    MultiplierReport,
};
