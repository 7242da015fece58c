//! Real zeros of random cosine polynomials `V(x) = sum_{j=0}^{n} a_j cos(jx)`
//! whose Gaussian coefficients are tied together in palindromic blocks.
//!
//! Three independent routes to the expected zero count on `(0, 2 pi)`:
//!
//! * [`experiment::run_mc`] samples coefficient vectors and counts sign changes;
//! * [`kac_rice::expected_zeros`] integrates the Kac-Rice density of the
//!   scheme's [`schemes::EffectiveBasis`];
//! * [`k_constant::k_ell`] evaluates the limiting constant `K_ell` of the
//!   large-`n` law `E[N] ~ (2n / sqrt 3) K_ell`.
//!
//! Data-parallel loops (trials, quadrature panels) run on rayon when the
//! `parallel` feature is on; every reduction happens in index order, so results
//! do not depend on the thread count.

pub mod error;
pub mod experiment;
pub mod k_constant;
pub mod kac_rice;
pub mod par;
pub mod quadrature;
pub mod schemes;
pub mod trig;
pub mod zeros;

pub use error::{Error, Result};
pub use experiment::{compare_with_theory, run_mc, write_results, ExperimentConfig, ExperimentResult, OutputFormat};
pub use k_constant::{inner_identity, k_ell, table1, KEllResult};
pub use kac_rice::{a_closed_form, abc_direct, asymptotic_integrand, density, expected_zeros, i_ell, KacRiceTriple};
pub use par::Execution;
pub use quadrature::{QuadResult, QuadratureConfig};
pub use schemes::{
    decompose, effective_basis, index_map, sample_coefficients, BlockDecomposition, CoefficientScheme, EffectiveBasis,
    IndexMap, SchemeKind,
};
pub use trig::{dirichlet_cos_sum, dirichlet_sin_sum, u_kernel, CosinePolynomial};
pub use zeros::{count_zeros, locate_zeros, refine_zero, GridConfig, GridMethod};
