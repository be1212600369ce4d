//! Exact geometric quantization dimensions of complex projective spaces and
//! generalized Hirzebruch fibrations.
//!
//! For a symplectic toric manifold the quantization dimension is the number
//! of lattice points in its moment polytope. This crate builds those
//! polytopes in half-space form, counts their lattice points by brute-force
//! enumeration, by summing slice simplices, and by binomial closed forms,
//! and checks the resulting identities, the recurrence in the twist, the
//! symplectic volume and the large-twist Bernoulli asymptotics in exact
//! integer and rational arithmetic.
//!
//! ```
//! use hirzebruch_core::{count_slice_sum, quantization_dimension, FibrationParams};
//!
//! let p = FibrationParams::new(1, 1, 2, 1).unwrap();
//! assert_eq!(quantization_dimension(p).dimension, 9u32.into());
//! assert_eq!(count_slice_sum(p).value, 9u32.into());
//! ```

pub mod analysis;
pub mod counting;
pub mod decimal;
pub mod error;
pub mod polytope;
pub mod quantization;
pub mod sweep;
pub mod verify;

pub use analysis::{
    asymptotic_series, bernoulli, convergence_csv, bernoulli_numbers, finite_difference, iterated_difference, ratio_convergence,
    recurrence_residual, slice_integral_volume, symplectic_volume, AsymptoticSeries, BernoulliConvention,
    ConvergenceRow, ExactRational, RecurrenceReport,
};
pub use counting::{
    binomial, count_brute_force, count_brute_force_with_workers, count_closed_form, count_simplex_closed_form,
    count_slice_sum, ensure_cell_budget, layer_counts, monomial_basis, CountMethod, CountResult, MonomialBasis,
};
pub use error::{Error, Result};
pub use polytope::{
    bounding_box, build_hirzebruch_polytope, build_simplex, contains, slice, vertices, BoundingBox,
    FibrationParams, HPolytope, HalfSpace, LatticePoint, SimplexParams, VertexSet,
};
pub use quantization::{
    blowup_count_formula, blowup_decomposition, hirzebruch_surface_closed_form, quantization_dimension,
    untwisted_product_formula, Decomposition, IdentityName, IdentityReport, QuantizationRecord,
};
pub use sweep::{run_sweep, OutputFormat, SweepRow, SweepSpec};
pub use verify::{run_verification, CheckResult, VerifyConfig, VerifyReport};
