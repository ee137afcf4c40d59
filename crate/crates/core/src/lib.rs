//! Radial Besov and Lizorkin-Triebel quasi-norms.
//!
//! A radial function `f(x) = g(|x|)` on `R^d` is represented by its even
//! profile `g` on the line. The crate evaluates the difference-based
//! characterisations of the radial subspaces (sup-differences, cap-measure
//! averages, the explicit three-dimensional five-term form, smooth-weight
//! forms), the Fourier-analytic weighted norms they are compared against, and
//! the geometry underneath: the neighbourhoods `Ω_t(x)`, sphere-ball
//! intersection measures and Muckenhoupt constants.
//!
//! ```
//! use radnorm::{corpus, norm_triangle3d_f, QuadratureConfig, SmoothnessParams};
//!
//! let g = corpus("gaussian", &[1.0]).unwrap();
//! let params = SmoothnessParams::new(3, 0.5, 2.0, 2.0);
//! let report = norm_triangle3d_f(&g, &params, &QuadratureConfig::default()).unwrap();
//! assert_eq!(report.terms.len(), 5);
//! ```

// negated comparisons such as `!(a < b)` reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod norms;
pub mod numerics;
pub mod profiles;
pub mod serde_ext;
pub mod table;
pub mod weights;

pub use error::{Error, Result};
pub use fourier::{
    coincidence_ratio, dyadic_bands, weighted_fourier_norm, weighted_fourier_norm_profile, DyadicPartition,
    FourierGrid, GridField1D,
};
pub use geometry::{
    cap_measure_exact, cap_measure_mc, omega_contains, sandwich_bounds, split_regions, verified_bounds, CapMeasure,
    CapSpec, Envelope, OmegaQuery, Region, RegionSplit, Span,
};
pub use norms::{
    compute_norm, embedding_gap, norm_rho_smooth_b, norm_rho_smooth_f, norm_sharp_b, norm_sharp_f, norm_sobolev_radial,
    norm_triangle3d_b, norm_triangle3d_f, norm_triangle_b, norm_triangle_f, norm_weighted_lp, quasi_triangle_constant,
    strauss_ratio, strauss_study, validate, Hypothesis, NormKind, NormReport, Scale, SmoothnessParams, Term,
};
pub use numerics::{GeometricGrid, McEstimate, QuadratureConfig};
pub use profiles::{corpus, extend, parse_profile, trace, AmbientField, RadialProfile, Support};
pub use weights::{ap_classify, ap_constant_estimate, ApEstimate, IntervalFamily, Weight};
