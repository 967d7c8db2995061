//! Pure, symmetric mixed, Bayesian and safety-level equilibria, plus the
//! exact potential of the complete-information game.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::binomial;
use crate::error::{GameError, Result};
use crate::model::{check_count, check_probability, Action, BayesianConfig, GameConfig, MetaProfile, Tolerances};
use crate::roots::{bisect, Bisection};

/// Lower and upper edge of the bracket handed to the root finder.
pub const ROOT_BRACKET_EPS: f64 = 1e-12;

/// Which case of the pure-equilibrium characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `N <= sigma0`: everyone competes.
    AllCompete,
    /// `R < sigma0 < N`, `sigma0` fractional: `floor(sigma0)` compete.
    NonIntegerThreshold,
    /// `sigma0` integral in `[R+1, N]`: both `sigma0` and `sigma0 - 1` are equilibria.
    IntegerThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumBranch {
    pub sigma_ne: usize,
    /// Number of individual action profiles with this many competitors.
    pub profile_count: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSet {
    pub regime: Regime,
    pub branches: Vec<EquilibriumBranch>,
}

impl EquilibriumSet {
    /// Equilibrium competitor counts in ascending order.
    pub fn sigmas(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.branches.iter().map(|b| b.sigma_ne).collect();
        s.sort_unstable();
        s
    }

    /// The equilibrium with the most competitors, which is also the costliest.
    pub fn worst_sigma(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.sigma_ne)
            .max()
            .expect("at least one branch")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    RootFound,
}

/// A symmetric mixed strategy: every (active) driver competes with
/// probability `p_pub`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedEquilibrium {
    pub p_pub: f64,
    pub p_priv: f64,
    pub method: Method,
}

impl MixedEquilibrium {
    fn new(p_pub: f64, method: Method) -> Self {
        let p_pub = p_pub.clamp(0.0, 1.0);
        MixedEquilibrium {
            p_pub,
            p_priv: 1.0 - p_pub,
            method,
        }
    }
}

/// Whether a driver currently playing `action` in meta-profile `m` strictly
/// gains by switching, decided from the position of `sigma_pub` relative to
/// `R` and `sigma0`.
pub fn deviation_incentive(cfg: &GameConfig, m: MetaProfile, action: Action) -> Result<bool> {
    deviation_incentive_with(cfg, m, action, &Tolerances::default())
}

pub fn deviation_incentive_with(cfg: &GameConfig, m: MetaProfile, action: Action, tol: &Tolerances) -> Result<bool> {
    let sigma = m.sigma_pub();
    check_count(sigma, 0, cfg.n_drivers())?;
    let r = cfg.r_spots();
    let s0 = cfg.sigma0();
    match action {
        Action::Private => {
            if sigma == cfg.n_drivers() {
                return Err(GameError::NoSuchDeviator { action, sigma });
            }
            // A spot is guaranteed to the switcher, or joining keeps the
            // competition level strictly below the threshold.
            Ok(sigma < r || ((sigma + 1) as f64) < s0 - tol.integrality)
        }
        Action::Public => {
            if sigma == 0 {
                return Err(GameError::NoSuchDeviator { action, sigma });
            }
            Ok(sigma > r && (sigma as f64) > s0 + tol.integrality)
        }
    }
}

pub fn pure_equilibria(cfg: &GameConfig) -> EquilibriumSet {
    pure_equilibria_with(cfg, &Tolerances::default())
}

pub fn pure_equilibria_with(cfg: &GameConfig, tol: &Tolerances) -> EquilibriumSet {
    equilibria_for_threshold(cfg.n_drivers(), cfg.r_spots(), cfg.sigma0(), tol)
}

/// Pure equilibria as a function of the threshold alone. Kept separate so the
/// verification battery can feed it a perturbed threshold.
pub(crate) fn equilibria_for_threshold(n: usize, r: usize, s0: f64, tol: &Tolerances) -> EquilibriumSet {
    let nearest = s0.round();
    let integral = (s0 - nearest).abs() < tol.integrality && nearest >= (r + 1) as f64;
    let branch = |sigma: usize| EquilibriumBranch {
        sigma_ne: sigma,
        profile_count: binomial::choose(n, sigma),
    };

    if integral && nearest <= n as f64 {
        let s = nearest as usize;
        EquilibriumSet {
            regime: Regime::IntegerThreshold,
            branches: vec![branch(s), branch(s - 1)],
        }
    } else if n as f64 <= s0 {
        EquilibriumSet {
            regime: Regime::AllCompete,
            branches: vec![EquilibriumBranch {
                sigma_ne: n,
                profile_count: BigUint::one(),
            }],
        }
    } else {
        EquilibriumSet {
            regime: Regime::NonIntegerThreshold,
            branches: vec![branch(s0.floor() as usize)],
        }
    }
}

/// Exact potential of the congestion game, in cost units.
///
/// The harmonic tail `H_m - H_R` is summed term by term.
pub fn potential(cfg: &GameConfig, m: MetaProfile) -> Result<f64> {
    let m = m.sigma_pub();
    check_count(m, 0, cfg.n_drivers())?;
    let n = cfg.n_drivers() as f64;
    let r = cfg.r_spots();
    let (beta, gamma) = (cfg.beta(), cfg.gamma());
    let units = if m <= r {
        beta * n - (beta - 1.0) * m as f64
    } else {
        let tail: f64 = (r + 1..=m).map(|k| 1.0 / k as f64).sum();
        beta * n + cfg.delta() * m as f64 - r as f64 * (gamma - 1.0) + r as f64 * (1.0 - gamma) * tail
    };
    Ok(cfg.c_pub_s() * units)
}

/// `Phi(0..=N)`, accumulating the harmonic tail incrementally.
pub fn potential_curve(cfg: &GameConfig) -> Vec<f64> {
    let n = cfg.n_drivers();
    let r = cfg.r_spots();
    let (beta, gamma, delta) = (cfg.beta(), cfg.gamma(), cfg.delta());
    let mut tail = 0.0;
    (0..=n)
        .map(|m| {
            let units = if m <= r {
                beta * n as f64 - (beta - 1.0) * m as f64
            } else {
                tail += 1.0 / m as f64;
                beta * n as f64 + delta * m as f64 - r as f64 * (gamma - 1.0) + r as f64 * (1.0 - gamma) * tail
            };
            cfg.c_pub_s() * units
        })
        .collect()
}

/// Local minimizers of the potential over `0..=N` (ties included).
pub fn potential_minimizers(cfg: &GameConfig, tol: &Tolerances) -> Vec<usize> {
    let phi = potential_curve(cfg);
    let slack = tol.cost * cfg.c_pub_s();
    (0..phi.len())
        .filter(|&m| {
            let left_ok = m == 0 || phi[m] - phi[m - 1] <= slack;
            let right_ok = m + 1 == phi.len() || phi[m + 1] - phi[m] >= -slack;
            left_ok && right_ok
        })
        .collect()
}

/// Expected public cost minus private cost, in units of `c_pub_s`, when each
/// of the `N - 1` opponents competes with probability `q`.
fn indifference_units(cfg: &GameConfig, q: f64) -> f64 {
    -cfg.beta() + binomial::expect(cfg.n_drivers() - 1, q, |k| cfg.public_units(k + 1))
}

/// Indifference function whose root is the symmetric mixed equilibrium.
/// Strictly increasing in `p` when `N > R`.
pub fn f_indifference(cfg: &GameConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(indifference_units(cfg, p))
}

pub fn mixed_equilibrium(cfg: &GameConfig, method: Method) -> Result<MixedEquilibrium> {
    let n = cfg.n_drivers() as f64;
    let s0 = cfg.sigma0();
    match method {
        Method::ClosedForm => {
            let p = if n <= s0 { 1.0 } else { s0 / n };
            Ok(MixedEquilibrium::new(p, method))
        }
        Method::RootFound => {
            if n <= s0 {
                return Err(GameError::BoundaryEquilibrium {
                    n: cfg.n_drivers(),
                    sigma0: s0,
                });
            }
            let p = solve_increasing(|p| indifference_units(cfg, p)).ok_or(GameError::BoundaryEquilibrium {
                n: cfg.n_drivers(),
                sigma0: s0,
            })?;
            Ok(MixedEquilibrium::new(p, method))
        }
    }
}

/// Root in `[0, 1]` of an increasing function. If the function is still
/// negative at the top of the bracket but not at 1, the root lies within
/// `ROOT_BRACKET_EPS` of 1 and 1 is returned.
fn solve_increasing<F: FnMut(f64) -> f64>(mut f: F) -> Option<f64> {
    bisect(&mut f, ROOT_BRACKET_EPS, 1.0 - ROOT_BRACKET_EPS, Bisection::default())
        .or_else(|| (f(1.0 - ROOT_BRACKET_EPS) < 0.0 && f(1.0) >= 0.0).then_some(1.0))
}

/// Bayesian indifference function.
///
/// An active driver faces `n_act ~ Bin(N-1, p_act)` active opponents, each
/// competing with probability `p`; the number of competitors among them is
/// therefore `Bin(N-1, p_act * p)`, which collapses the double sum over
/// `n_act` and `k` into a single binomial expectation.
pub fn h_indifference(bcfg: &BayesianConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(indifference_units(bcfg.game(), bcfg.p_act() * p))
}

/// Closed-form symmetric Bayesian equilibrium.
pub fn bayesian_equilibrium(bcfg: &BayesianConfig) -> Result<MixedEquilibrium> {
    bayesian_equilibrium_with(bcfg, Method::ClosedForm)
}

pub fn bayesian_equilibrium_with(bcfg: &BayesianConfig, method: Method) -> Result<MixedEquilibrium> {
    let p_act = bcfg.p_act();
    if p_act == 0.0 {
        return Err(GameError::NoActiveDrivers);
    }
    let cfg = bcfg.game();
    let n = cfg.n_drivers() as f64;
    let s0 = cfg.sigma0();
    match method {
        Method::ClosedForm => {
            let p = if p_act < s0 / n {
                1.0
            } else {
                (s0 / (n * p_act)).min(1.0)
            };
            Ok(MixedEquilibrium::new(p, method))
        }
        Method::RootFound => {
            let boundary = GameError::BoundaryEquilibrium {
                n: cfg.n_drivers(),
                sigma0: s0,
            };
            if n * p_act < s0 {
                return Err(boundary);
            }
            let p = solve_increasing(|p| indifference_units(cfg, p_act * p)).ok_or(boundary)?;
            Ok(MixedEquilibrium::new(p, method))
        }
    }
}

/// Safety-level strategy of the game where only an upper bound on the number
/// of drivers is known: the mixed equilibrium of the game at that bound.
pub fn safety_level_equilibrium(cfg_max: &GameConfig) -> MixedEquilibrium {
    mixed_equilibrium(cfg_max, Method::ClosedForm).expect("closed form is total")
}
