//! Multiscale flatness and curvature diagnostics for weighted point clouds.
//!
//! A measure `μ = Σ wᵢ δ_{xᵢ}` in `ℝ^m` carries an intrinsic dimension `n`;
//! the crate computes its β-numbers against `n`-planes, Menger-type
//! curvatures over `(n+1)`-tuples, Jones square functions, density profiles
//! and secant frames, and checks the inequalities that relate them.
//!
//! All balls are closed. Reductions use fixed-shape pairwise summation, so
//! results do not depend on the number of worker threads.

pub mod beta;
pub mod curvature;
pub mod density;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod index;
pub mod io;
pub mod measure;
pub mod numeric;
pub mod scales;
pub mod secant;
pub mod verify;

pub use beta::{beta2, beta2_centered, beta_p, jones_function, BetaResult, BetaVariant, JonesResult};
pub use curvature::{
    curv_estimate, curv_exhaustive, curv_integrand, curv_monte_carlo, curv_profile, CurvMethod, CurvOptions,
    CurvatureEstimate, MethodChoice, SamplingStrategy,
};
pub use error::{Error, Result};
pub use generators::{generate, GeneratorKind, GeneratorSpec, WeightScheme};
pub use geometry::{affine_hull, diameter, dist_to_affine, h_min, menger_curvature, simplex_volume, AffineSubspace, Simplex};
pub use index::SpatialIndex;
pub use measure::{Ball, DiscreteMeasure};
pub use scales::{ScaleConfig, ScaleProfile};
pub use secant::{find_secant_frame, theoretical_constants, SecantConfig, SecantFrame, SecantMode};
pub use verify::InequalityReport;
