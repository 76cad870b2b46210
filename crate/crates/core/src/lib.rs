//! Numerical toolkit for bipartite entanglement measures.
//!
//! The crate provides dense complex linear algebra sized for small Hilbert
//! spaces, bipartite state types and random-state generators (including the
//! Werner family), pure-state concurrence and D-concurrence, Wootters'
//! two-qubit formula, closed-form upper/lower bounds with majorization-based
//! separability checks, and a multi-start convex-roof optimizer that extends
//! the pure-state measures to mixed states.

pub mod bounds;
mod error;
pub mod linalg;
pub mod measures;
pub mod roof;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bounds::{
    det_superadditivity_check, d_lower_bound, d_upper_bound, majorizes, mb_lower_bound_c2,
    nielsen_kempe_check, purity_upper_bound_c2, separability_witness, BoundReport,
    MajorizationCheck, NielsenKempe, Witness,
};
pub use linalg::{det_hermitian, hermitian_eigensystem, ComplexMatrix, EigenSystem, Subsystem};
pub use measures::{
    concurrence_pure, concurrence_pure_twofold, concurrence_two_qubit_pure, d_concurrence_pure,
    d_concurrence_pure_b, wootters_concurrence, MeasureKind, MeasureValue,
};
pub use roof::{
    average_measure, decomposition_from_isometry, minimize_roof, RoofConfig, RoofEstimate,
};
pub use states::{
    bell_state, density_from_pure, ginibre_random_density, haar_random_pure, max_entangled,
    random_isometry, random_separable, reduced_density, werner_state, Decomposition,
    DensityMatrix, PureState,
};
