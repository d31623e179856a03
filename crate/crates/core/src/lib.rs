//! Exact Graver test sets for integer programs with separable Z-convex
//! objectives, and an augmentation solver that uses them.

pub mod augment;
mod completion;
pub mod error;
pub mod exact;
pub mod graver;
pub mod objective;
pub mod qap;
pub mod quadratic;
pub mod testset;

pub use augment::{
    aip_subproblem_oracle, brute_force_optimum, find_improving, line_search, solve, solve_slack, CipInstance, SolveOptions,
    SolveReport, SolveStatus, SolveStep,
};
pub use error::{Error, Result};
pub use exact::{canonical_rep, conformal_leq, kernel_lattice_basis, IntMatrix, IntVector, RatMatrix};
pub use graver::{compute_graver, graver_oracle, GraverBasis};
pub use objective::{
    check_zconvex_window, eval_fn, eval_objective, increment, PiecewiseTable, SeparableObjective, TableGrowth, Term,
    ZConvexFn,
};
pub use qap::{
    assignment_matrix, permutation_oracle, read_qaplib, solve_qap, to_cip, write_qaplib, BoundMode, QapInstance,
};
pub use quadratic::{
    binary_rephrase, choose_lambda_bar, congruence_diagonalize, is_psd, to_separable, DiagonalizationResult, PivotOrder,
};
pub use testset::{build_ak_matrix, build_lifted_matrix, compute_hcip, compute_hcip_bounded, filter_directions, TestSet};
