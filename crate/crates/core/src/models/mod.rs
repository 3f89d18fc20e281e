//! Model builders.
//!
//! Three tiers share one parameter chain: physical cavities
//! ([`RawOptomechParams`]) are hybridized into [`EffectiveParams`], which build
//! the four-mode model, the reduced two-mode model, or map onto the
//! [`GenericParams`] of the two-phonon stabilization model.

mod generic;
mod hybrid;
mod normal_mode;
mod optomech;

pub use generic::{
    analytic_generic_steady, build_generic, AnalyticRatios, AnalyticSolution, GenericParams,
    RegimeRatios, GENERIC_MODES,
};
pub use hybrid::{
    choose_r_for_zero_gmm, derive_drive_params, derive_effective_modes, reverse_transform,
    tunneling_for_ratio, DriveParams, HybridModes, RawOptomechParams,
};
pub use normal_mode::{
    back_transform, diagonal_corrections, normal_mode_generator, phonon_populations,
    DiagonalCorrections, GeneratorCoefficients, GENERATOR_NORM_WARN,
};
pub use optomech::{
    build_full, build_reduced, ideal_detuning, map_to_generic, DerivedRates, EffectiveParams,
    ReducedOptions, DEFAULT_FULL_DIMS, FULL_MODES, REDUCED_MODES,
};
