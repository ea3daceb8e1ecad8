//! Adaptive quasi-Monte Carlo cubature for pricing multidimensional vanilla
//! options in the Black-Scholes model.
//!
//! The integration engine fits reduced Chebyshev polynomial models on
//! Halton points drawn from the Chebyshev density, turns the least-squares
//! fit into quadrature rules, and drives an adaptive partition of the
//! truncated Gaussian integration domain using a hierarchical error
//! indicator. Two splitting strategies are provided: fully adaptive
//! splitting (FAS), which tries every axis and keeps the best bisection,
//! and geometrical random splitting (GRS), which bisects a longest axis
//! uniformly at random and bounds the cell aspect ratio by two.
//!
//! On top of the integrator sit the pricing layers: basket, digital basket
//! and put-on-minimum payoffs on a correlated lognormal model
//! ([`model`]), interpolation-based deltas with a finite-difference Monte
//! Carlo benchmark ([`greeks`]), and a PCA-driven control-variate Monte
//! Carlo estimator for high dimensions ([`reduction_cv`]).

pub mod adaptive;
pub mod greeks;
pub mod index_basis;
pub mod model;
pub mod quadrature;
pub mod reduction_cv;
pub mod rng;

mod error;
mod stats;

#[cfg(test)]
pub(crate) mod test_oracles;

pub use error::{Error, Result};

pub use adaptive::{
    error_indicator, export_mesh, export_mesh_to_path, integrate_adaptive, run_replications,
    AdaptiveConfig, AdaptiveResult, HyperRectangle, ReplicationStats, Strategy,
};
pub use index_basis::{basis_integral, build_index_set, tcheb_eval, IndexSet, MultiIndex};
pub use model::{
    bs_closed_form_1d, bs_closed_form_delta_1d, equicorrelation, mc_price, parity_residual, payoff,
    price_adaptive, terminal_price, Estimate, ModelConfig, ModelSpec, PayoffKind, PricedAdaptive,
};
pub use quadrature::{
    build_rule, cached_rule, halton_points, tcheb_distributed_points, QuadratureResult,
    QuadratureRule, Rect,
};
pub use reduction_cv::{build_pca, control_expectation, cv_estimator, CvEstimate, PcaModel};
