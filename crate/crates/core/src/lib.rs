//! Solvers for the parking spot selection game.
//!
//! `N` drivers choose between competing for `R` on-street spots and paying
//! for a private lot. This crate computes the game's pure, symmetric mixed,
//! Bayesian and safety-level equilibria, the social cost and Price of
//! Anarchy, and provides oracles (brute force, enumeration, Monte Carlo)
//! that check those results independently.
//!
//! ```
//! use parking_core::{mixed_equilibrium, price_of_anarchy, GameConfig, Method};
//!
//! let cfg = GameConfig::new(500, 50, 1.0, 5.0, 7.0).unwrap();
//! assert_eq!(cfg.sigma0(), 150.0);
//! let p = mixed_equilibrium(&cfg, Method::ClosedForm).unwrap().p_pub;
//! assert!((p - 0.3).abs() < 1e-15);
//! assert!((price_of_anarchy(&cfg).poa - 25.0 / 23.0).abs() < 1e-12);
//! ```

pub mod binomial;
pub mod efficiency;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod oracle;
pub mod roots;
pub mod sweep;
pub mod verify;

pub use efficiency::{
    less_is_more_population, poa_bound, poa_integer_case, price_of_anarchy, price_of_anarchy_continuous,
    pricing_thresholds, LessIsMore, PoaReport, PricingThresholds,
};
pub use equilibria::{
    bayesian_equilibrium, bayesian_equilibrium_with, deviation_incentive, f_indifference, h_indifference,
    mixed_equilibrium, potential, potential_minimizers, pure_equilibria, safety_level_equilibrium, EquilibriumBranch,
    EquilibriumSet, Method, MixedEquilibrium, Regime,
};
pub use error::{GameError, Result};
pub use model::{
    cost_private, cost_public, optimal_social_cost, sigma0, social_cost_mixed, social_cost_pure, Action,
    BayesianConfig, GameConfig, MetaProfile, Tolerances,
};
pub use oracle::{
    bayesian_oracle_cost, brute_force_pure_equilibria, exact_expected_public_cost, exhaustive_social_cost_mixed,
    monte_carlo_profile, SimOutcome,
};
pub use sweep::{Axis, Baseline, CurveMode, Metric, SweepParam, SweepSpec, Table};
