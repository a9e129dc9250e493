//! Construction and numerical verification of programmable unambiguous
//! discriminators for `n` unknown quantum states in an `m`-dimensional space.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`] — dense complex matrices, Hermitian operators, eigensolves.
//! * [`registers`] — composite register spaces: kron, permutation operators,
//!   partial traces, local-unitary conjugation.
//! * [`antisym`] — wedge products and the antisymmetric subspace projector.
//! * [`gram`] — Gram matrices, determinants, linear-independence tests.
//! * [`discriminator`] — the POVM families (optimal equal-dimension device,
//!   universal device, trivial all-inconclusive device) and their structural
//!   checks.
//! * [`harness`] — seeded Monte Carlo experiments and property oracles.

pub mod antisym;
pub mod discriminator;
pub mod error;
pub mod gram;
pub mod harness;
pub mod matrix;
pub mod registers;

pub use antisym::{
    antisym_basis, antisym_overlap, antisym_projector, increasing_tuples, wedge, IncreasingTuple,
    StateVector,
};
pub use discriminator::{
    build_optimal_equal, build_trivial, build_universal, check_support_reduction,
    check_unambiguity_structure, closed_form_success, covariance_gram, input_state,
    max_feasible_c, success_probabilities, validate_povm, CovarianceGram, Povm, PovmKind,
    ProgramInput,
};
pub use error::CoreError;
pub use gram::{gram_det, gram_matrix, is_linearly_independent, min_eigenvalue, GramMatrix};
pub use harness::{
    build_device, haar_random_state, haar_random_unitary, product_bound_oracle, product_bound_slack,
    random_program, run_experiment, trial_rng, ExperimentConfig, ExperimentRecord,
    ExperimentSummary, ProductBoundReport, Tolerances,
};
pub use matrix::{hermitian_eig, is_psd, CMatrix, CVector, HermitianEig, HermitianOperator};
pub use registers::{
    conjugate_tensor_power, partial_trace, permutation_operator, permute_subsystems, Permutation,
    RegisterLayout,
};
