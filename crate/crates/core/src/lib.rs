//! Discrete maximal operators, commutators, variable-exponent Luxemburg norms
//! and Lipschitz-oscillation functionals on cell-centered grids in one or two
//! dimensions.
//!
//! All integrals are exact weighted sums over cells, so algebraic identities
//! between averages hold exactly in this model. Suprema run over a finite
//! family of cell-aligned cubes inside the box (see [`CubeFamily`]).
//!
//! The data-parallel loops run on rayon when the `parallel` feature is on
//! (the default); [`par::set_backend`] switches to the sequential path at
//! runtime. Both backends produce identical bits.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod grid;
pub mod io;
pub mod lip;
pub mod lux;
pub mod maximal;
pub mod par;
mod window;

pub use error::{Error, Result};
pub use exponents::{
    build_pair, split_exponents, validate_p, ExponentPair, LogHolder, SplitExponents, VariableExponent,
};
pub use grid::{Cube, CubeFamily, Grid, GridFunction, PrefixSums};
pub use lip::{
    lambda_sharp, lambda_star, lambda_var, lip_seminorm, opnorm_lower, osc_norm_q, BankEntry, LipResult,
    NormLowerBound, Witness,
};
pub use lux::{
    check_s_norm, cube_duality_product, cube_embedding_ratio, holder_constant, holder_defect, lux_norm, modular,
    NormResult,
};
pub use maximal::{
    apply, comm_m, comm_sharp, frac_max, hl_max, local_max, local_max_in, max_commutator, sharp_max, LocalMax,
    OperatorTag,
};
