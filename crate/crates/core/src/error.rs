use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("requires n_drivers > 1 (got {0})")]
    TooFewDrivers(usize),
    #[error("requires r_spots >= 1")]
    NoSpots,
    #[error("requires c_pub_s > 0 (got {0})")]
    NonPositiveCost(f64),
    #[error("requires 1 < beta < gamma (got beta={beta}, gamma={gamma})")]
    InvalidPricing { beta: f64, gamma: f64 },
    #[error("requires 0 <= p_act <= 1 (got {0})")]
    ActivityOutOfRange(f64),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("competitor count {value} outside [{min}, {max}]")]
    CountOutOfRange { value: usize, min: usize, max: usize },
    #[error("no driver plays {action} at sigma_pub = {sigma}")]
    NoSuchDeviator { action: crate::model::Action, sigma: usize },
    #[error("no interior mixed equilibrium: N = {n} <= sigma0 = {sigma0} (boundary equilibrium p = 1)")]
    BoundaryEquilibrium { n: usize, sigma0: f64 },
    #[error("requires N > R (got N={n}, R={r})")]
    NoOverdemand { n: usize, r: usize },
    #[error("requires integer sigma0 with R + 1 <= sigma0 <= N (got sigma0={sigma0}, N={n})")]
    NotIntegerThreshold { n: usize, sigma0: f64 },
    #[error("p_act = 0: no active drivers, Bayesian equilibrium undefined")]
    NoActiveDrivers,
    #[error("N = {n} exceeds the exhaustive-check cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
