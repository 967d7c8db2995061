//! Game definition, per-driver cost functions and social cost.
//!
//! All costs are reported in the same monetary unit as `c_pub_s`. The private
//! lot is treated as having unbounded capacity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binomial;
use crate::error::{GameError, Result};

/// Absolute tolerance used when comparing costs.
pub const COST_TOLERANCE: f64 = 1e-9;
/// Distance from the nearest integer below which `sigma0` counts as integral.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Comparison tolerances used by the equilibrium solvers and the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cost: f64,
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cost: COST_TOLERANCE,
            integrality: INTEGRALITY_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Public,
    Private,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Public => f.write_str("public"),
            Action::Private => f.write_str("private"),
        }
    }
}

/// A parking spot selection game with `n_drivers` drivers and `r_spots`
/// on-street spots. A successful public attempt costs `c_pub_s`, a failed one
/// `gamma * c_pub_s`, and the private lot `beta * c_pub_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameConfig {
    n_drivers: usize,
    r_spots: usize,
    c_pub_s: f64,
    beta: f64,
    gamma: f64,
}

impl GameConfig {
    pub fn new(n_drivers: usize, r_spots: usize, c_pub_s: f64, beta: f64, gamma: f64) -> Result<Self> {
        if n_drivers <= 1 {
            return Err(GameError::TooFewDrivers(n_drivers));
        }
        if r_spots == 0 {
            return Err(GameError::NoSpots);
        }
        if !(c_pub_s.is_finite() && c_pub_s > 0.0) {
            return Err(GameError::NonPositiveCost(c_pub_s));
        }
        // written so that NaN fails
        if !(beta.is_finite() && gamma.is_finite() && 1.0 < beta && beta < gamma) {
            return Err(GameError::InvalidPricing { beta, gamma });
        }
        Ok(GameConfig {
            n_drivers,
            r_spots,
            c_pub_s,
            beta,
            gamma,
        })
    }

    /// Builds the config from the private multiplier and the excess cost
    /// `delta = gamma - beta`.
    pub fn with_delta(n_drivers: usize, r_spots: usize, c_pub_s: f64, beta: f64, delta: f64) -> Result<Self> {
        Self::new(n_drivers, r_spots, c_pub_s, beta, beta + delta)
    }

    /// Same pricing and capacity, different population.
    pub fn with_drivers(&self, n_drivers: usize) -> Result<Self> {
        Self::new(n_drivers, self.r_spots, self.c_pub_s, self.beta, self.gamma)
    }

    pub fn n_drivers(&self) -> usize {
        self.n_drivers
    }

    pub fn r_spots(&self) -> usize {
        self.r_spots
    }

    pub fn c_pub_s(&self) -> f64 {
        self.c_pub_s
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Excess cost of a failed on-street attempt over the private fee.
    pub fn delta(&self) -> f64 {
        self.gamma - self.beta
    }

    /// Competition level at which an on-street attempt costs exactly as much
    /// as the private lot: `R (gamma - 1) / delta`.
    pub fn sigma0(&self) -> f64 {
        self.r_spots as f64 * (self.gamma - 1.0) / self.delta()
    }

    pub fn c_pub_fail(&self) -> f64 {
        self.gamma * self.c_pub_s
    }

    pub fn c_priv(&self) -> f64 {
        self.beta * self.c_pub_s
    }

    /// Expected public cost in units of `c_pub_s` when `k >= 1` drivers compete.
    pub(crate) fn public_units(&self, k: usize) -> f64 {
        let success = (self.r_spots as f64 / k as f64).min(1.0);
        success + (1.0 - success) * self.gamma
    }

    /// Social cost in units of `c_pub_s` when `sigma` drivers compete.
    pub(crate) fn social_units(&self, sigma: usize) -> f64 {
        let winners = sigma.min(self.r_spots) as f64;
        let losers = sigma.saturating_sub(self.r_spots) as f64;
        winners + losers * self.gamma + (self.n_drivers - sigma) as f64 * self.beta
    }

    pub fn profile(&self, sigma_pub: usize) -> Result<MetaProfile> {
        MetaProfile::new(self, sigma_pub)
    }
}

/// Game config plus an i.i.d. Bernoulli activity prior: each driver is
/// independently looking for parking with probability `p_act`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesianConfig {
    game: GameConfig,
    p_act: f64,
}

impl BayesianConfig {
    pub fn new(game: GameConfig, p_act: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_act) {
            return Err(GameError::ActivityOutOfRange(p_act));
        }
        Ok(BayesianConfig { game, p_act })
    }

    pub fn game(&self) -> &GameConfig {
        &self.game
    }

    pub fn p_act(&self) -> f64 {
        self.p_act
    }
}

/// Number of drivers playing `public`. Individual profiles with the same
/// count are cost-equivalent, so this is the only state the solvers track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MetaProfile {
    sigma_pub: usize,
}

impl MetaProfile {
    pub fn new(cfg: &GameConfig, sigma_pub: usize) -> Result<Self> {
        check_count(sigma_pub, 0, cfg.n_drivers)?;
        Ok(MetaProfile { sigma_pub })
    }

    pub fn sigma_pub(&self) -> usize {
        self.sigma_pub
    }
}

pub(crate) fn check_count(value: usize, min: usize, max: usize) -> Result<()> {
    if value < min || value > max {
        return Err(GameError::CountOutOfRange { value, min, max });
    }
    Ok(())
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GameError::ProbabilityOutOfRange(p));
    }
    Ok(())
}

/// Expected cost of one driver playing `public` when `k` drivers compete in
/// total (the driver included).
pub fn cost_public(cfg: &GameConfig, k: usize) -> Result<f64> {
    check_count(k, 1, cfg.n_drivers)?;
    Ok(cfg.public_units(k) * cfg.c_pub_s)
}

pub fn cost_private(cfg: &GameConfig) -> f64 {
    cfg.c_priv()
}

pub fn sigma0(cfg: &GameConfig) -> f64 {
    cfg.sigma0()
}

pub fn social_cost_pure(cfg: &GameConfig, m: MetaProfile) -> Result<f64> {
    check_count(m.sigma_pub, 0, cfg.n_drivers)?;
    Ok(cfg.social_units(m.sigma_pub) * cfg.c_pub_s)
}

/// Expected social cost when every driver independently competes with
/// probability `p`.
pub fn social_cost_mixed(cfg: &GameConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    let units = binomial::expect(cfg.n_drivers, p, |sigma| cfg.social_units(sigma));
    Ok(units * cfg.c_pub_s)
}

/// Cost of the centrally coordinated assignment: `min(N, R)` drivers on the
/// street, everyone else in the private lot.
pub fn optimal_social_cost(cfg: &GameConfig) -> f64 {
    let n = cfg.n_drivers;
    let r = cfg.r_spots;
    cfg.c_pub_s * (n.min(r) as f64 + cfg.beta * n.saturating_sub(r) as f64)
}
