//! Price of Anarchy and the pricing quantities derived from it.

use serde::Serialize;

use crate::equilibria::{mixed_equilibrium, pure_equilibria, Method, Regime};
use crate::error::{GameError, Result};
use crate::model::{optimal_social_cost, social_cost_pure, GameConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoaReport {
    pub poa: f64,
    /// Competitor count of the costliest pure equilibrium.
    pub worst_sigma: usize,
    pub c_worst: f64,
    pub c_opt: f64,
    /// `1 / (1 - R/N)` when `N > R`, infinite otherwise.
    pub bound: f64,
}

/// Pure Price of Anarchy: worst equilibrium social cost over the optimum.
pub fn price_of_anarchy(cfg: &GameConfig) -> PoaReport {
    let n = cfg.n_drivers() as f64;
    let r = cfg.r_spots() as f64;
    let (beta, gamma, delta) = (cfg.beta(), cfg.gamma(), cfg.delta());
    let s0 = cfg.sigma0();
    let min_nr = n.min(r);

    // The integrality snap lives in pure_equilibria, so take the worst count
    // from there instead of flooring a noisy sigma0 here.
    let worst_sigma = pure_equilibria(cfg).worst_sigma();
    let poa = if s0 >= n || worst_sigma == cfg.n_drivers() {
        // gamma N - (gamma - 1) min(N, R), arranged so that N <= R gives exactly N / N
        (n + (gamma - 1.0) * (n - min_nr)) / (min_nr + beta * (n - r).max(0.0))
    } else {
        (worst_sigma as f64 * delta - r * (gamma - 1.0) + beta * n) / (r + beta * (n - r))
    };

    let c_worst =
        social_cost_pure(cfg, cfg.profile(worst_sigma).expect("worst sigma within [0, N]")).expect("validated profile");
    let c_opt = optimal_social_cost(cfg);
    let bound = if n > r { 1.0 / (1.0 - r / n) } else { f64::INFINITY };
    PoaReport {
        poa,
        worst_sigma,
        c_worst,
        c_opt,
        bound,
    }
}

/// PoA with the worst equilibrium count replaced by the real-valued
/// threshold `sigma0` (no flooring). Smooth in `beta` and `delta`; the
/// floored PoA differs from it by less than `delta / (R + beta (N - R))`.
pub fn price_of_anarchy_continuous(cfg: &GameConfig) -> f64 {
    let n = cfg.n_drivers() as f64;
    let r = cfg.r_spots() as f64;
    let (beta, gamma, delta) = (cfg.beta(), cfg.gamma(), cfg.delta());
    let s0 = cfg.sigma0();
    if s0 >= n {
        let min_nr = n.min(r);
        (n + (gamma - 1.0) * (n - min_nr)) / (min_nr + beta * (n - r).max(0.0))
    } else {
        (s0 * delta - r * (gamma - 1.0) + beta * n) / (r + beta * (n - r))
    }
}

/// PoA when `sigma0` is an integer in `[R+1, N]`: `1 / (1 - (beta-1) R / (beta N))`.
pub fn poa_integer_case(cfg: &GameConfig) -> Result<f64> {
    if pure_equilibria(cfg).regime != Regime::IntegerThreshold {
        return Err(GameError::NotIntegerThreshold {
            n: cfg.n_drivers(),
            sigma0: cfg.sigma0(),
        });
    }
    let beta = cfg.beta();
    let ratio = (beta - 1.0) * cfg.r_spots() as f64 / (beta * cfg.n_drivers() as f64);
    Ok(1.0 / (1.0 - ratio))
}

pub fn poa_bound(cfg: &GameConfig) -> Result<f64> {
    let (n, r) = overdemand(cfg)?;
    Ok(1.0 / (1.0 - r / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricingThresholds {
    /// Private-to-public price ratio where PoA turns from increasing to
    /// decreasing in `beta`.
    pub beta_star: f64,
    /// Excess cost above which PoA no longer depends on `delta`.
    pub delta_star: f64,
}

pub fn pricing_thresholds(cfg: &GameConfig) -> Result<PricingThresholds> {
    let (n, r) = overdemand(cfg)?;
    Ok(PricingThresholds {
        beta_star: (cfg.delta() * (n - r) + r) / r,
        delta_star: r * (cfg.beta() - 1.0) / (n - r),
    })
}

fn overdemand(cfg: &GameConfig) -> Result<(f64, f64)> {
    if cfg.n_drivers() <= cfg.r_spots() {
        return Err(GameError::NoOverdemand {
            n: cfg.n_drivers(),
            r: cfg.r_spots(),
        });
    }
    Ok((cfg.n_drivers() as f64, cfg.r_spots() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LessIsMore {
    /// Nearest-integer population.
    pub k: usize,
    /// `delta N_max / (gamma - 1)` before rounding.
    pub k_real: f64,
    /// Safety-level competition probability at `N_max`.
    pub p_safety: f64,
}

/// Population size at which drivers using the safety-level strategy for
/// `N_max` expect exactly `R` competitors.
pub fn less_is_more_population(cfg_max: &GameConfig) -> Result<LessIsMore> {
    let n = cfg_max.n_drivers() as f64;
    let s0 = cfg_max.sigma0();
    if n <= s0 {
        return Err(GameError::BoundaryEquilibrium {
            n: cfg_max.n_drivers(),
            sigma0: s0,
        });
    }
    let k_real = cfg_max.delta() * n / (cfg_max.gamma() - 1.0);
    let p_safety = mixed_equilibrium(cfg_max, Method::ClosedForm)?.p_pub;
    Ok(LessIsMore {
        k: k_real.round() as usize,
        k_real,
        p_safety,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::social_cost_mixed;
    use proptest::prelude::*;

    fn cfg(n: usize, r: usize, beta: f64, gamma: f64) -> GameConfig {
        GameConfig::new(n, r, 1.0, beta, gamma).unwrap()
    }

    #[test]
    fn poa_examples() {
        let rep = price_of_anarchy(&cfg(10, 50, 5.0, 7.0));
        assert_eq!(rep.poa, 1.0);
        assert_eq!(rep.bound, f64::INFINITY);
        assert_eq!(rep.worst_sigma, 10);

        let rep = price_of_anarchy(&cfg(500, 50, 5.0, 7.0));
        assert!((rep.poa - 2500.0 / 2300.0).abs() < 1e-12);
        assert_eq!(rep.worst_sigma, 150);
        assert!((rep.c_worst - 2500.0).abs() < 1e-9);
        assert_eq!(rep.c_opt, 2300.0);

        let rep = price_of_anarchy(&cfg(500, 160, 2.0, 3.0));
        assert_eq!(rep.worst_sigma, 320);
        assert!((rep.poa - 1000.0 / 840.0).abs() < 1e-12);
    }

    #[test]
    fn integer_case_examples() {
        let c = cfg(500, 50, 5.0, 7.0);
        let v = poa_integer_case(&c).unwrap();
        assert!((v - 1.0 / (1.0 - 200.0 / 2500.0)).abs() < 1e-12);
        assert!((v - price_of_anarchy(&c).poa).abs() < 1e-9);

        let c = cfg(500, 50, 2.0, 4.0);
        assert!((c.sigma0() - 75.0).abs() < 1e-12);
        let v = poa_integer_case(&c).unwrap();
        assert!((v - 1.0 / (1.0 - 50.0 / 1000.0)).abs() < 1e-12);
        assert!((v - price_of_anarchy(&c).poa).abs() < 1e-9);

        // N = 2R: 1 / (1 - (beta - 1) / (2 beta)); beta = 3, delta = 2 gives sigma0 = 2R
        let c = cfg(100, 50, 3.0, 5.0);
        let v = poa_integer_case(&c).unwrap();
        assert!((v - 1.0 / (1.0 - 2.0 / 6.0)).abs() < 1e-12);

        assert!(matches!(
            poa_integer_case(&cfg(500, 50, 3.1, 8.0)),
            Err(GameError::NotIntegerThreshold { .. })
        ));
        assert!(poa_integer_case(&cfg(100, 50, 5.0, 7.0)).is_err());
    }

    #[test]
    fn bound_examples() {
        assert!((poa_bound(&cfg(500, 50, 5.0, 7.0)).unwrap() - 1.0 / 0.9).abs() < 1e-12);
        assert!((poa_bound(&cfg(500, 160, 5.0, 7.0)).unwrap() - 1.0 / 0.68).abs() < 1e-12);
        assert_eq!(poa_bound(&cfg(100, 50, 5.0, 7.0)).unwrap(), 2.0);
        assert!(matches!(
            poa_bound(&cfg(50, 50, 5.0, 7.0)),
            Err(GameError::NoOverdemand { .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        let t = pricing_thresholds(&cfg(500, 50, 5.0, 7.0)).unwrap();
        assert!((t.beta_star - 19.0).abs() < 1e-12);
        let t = pricing_thresholds(&cfg(500, 160, 5.0, 7.0)).unwrap();
        assert!((t.delta_star - 640.0 / 340.0).abs() < 1e-12);
        let t = pricing_thresholds(&cfg(51, 50, 4.0, 6.5)).unwrap();
        assert!((t.beta_star - 52.5 / 50.0).abs() < 1e-12);
        assert!((t.delta_star - 150.0).abs() < 1e-12);
        assert!(pricing_thresholds(&cfg(10, 50, 5.0, 7.0)).is_err());
    }

    #[test]
    fn less_is_more_examples() {
        let l = less_is_more_population(&cfg(500, 50, 5.0, 7.0)).unwrap();
        assert_eq!(l.k, 167);
        assert!((l.k_real - 1000.0 / 6.0).abs() < 1e-12);
        assert!((l.k as f64 * l.p_safety - 50.1).abs() < 1e-9);

        let l = less_is_more_population(&cfg(500, 50, 3.0, 8.0)).unwrap();
        assert_eq!(l.k, 357);
        assert!((l.k as f64 * l.p_safety - 49.98).abs() < 1e-9);

        // N_max = sigma0 = 150
        assert!(matches!(
            less_is_more_population(&cfg(150, 50, 5.0, 7.0)),
            Err(GameError::BoundaryEquilibrium { .. })
        ));
    }

    #[test]
    fn uncertainty_beats_complete_information_at_k() {
        for base in [cfg(500, 50, 5.0, 7.0), cfg(500, 50, 3.0, 8.0)] {
            let l = less_is_more_population(&base).unwrap();
            let game_k = base.with_drivers(l.k).unwrap();
            let informed = mixed_equilibrium(&game_k, Method::ClosedForm).unwrap().p_pub;
            let safety = social_cost_mixed(&game_k, l.p_safety).unwrap();
            let complete = social_cost_mixed(&game_k, informed).unwrap();
            assert!(safety < complete, "{safety} vs {complete}");
        }
    }

    #[test]
    fn delta_plateau_beyond_threshold() {
        // N > sigma0 for every delta on the grid
        let beta = 3.0;
        let base = price_of_anarchy_continuous(&cfg(500, 50, beta, beta + 1.0));
        let delta_star = pricing_thresholds(&cfg(500, 50, beta, beta + 1.0)).unwrap().delta_star;
        for i in 0..40 {
            let delta = delta_star + 0.01 + i as f64 * 0.1;
            let c = cfg(500, 50, beta, beta + delta);
            assert!((price_of_anarchy_continuous(&c) - base).abs() < 1e-12);
            let staircase = delta / (50.0 + beta * 450.0);
            assert!((price_of_anarchy(&c).poa - base).abs() <= staircase);
        }
    }

    #[test]
    fn beta_ridge_at_threshold() {
        for (r, delta) in [(160usize, 1.0), (160, 2.5), (50, 1.0)] {
            let c = cfg(500, r, 2.0, 2.0 + delta);
            let beta_star = pricing_thresholds(&c).unwrap().beta_star;
            let betas: Vec<f64> = (0..=149).map(|i| 1.1 + i as f64 * 0.1).collect();
            let poa: Vec<(f64, f64, f64)> = betas
                .iter()
                .map(|&b| {
                    let g = cfg(500, r, b, b + delta);
                    (b, price_of_anarchy_continuous(&g), price_of_anarchy(&g).poa)
                })
                .collect();
            for w in poa.windows(2) {
                let (b0, c0, _) = w[0];
                let (b1, c1, _) = w[1];
                if b1 <= beta_star {
                    assert!(c1 - c0 >= -1e-12, "rising below beta*: {b0} -> {b1}");
                } else if b0 >= beta_star {
                    assert!(c1 - c0 <= 1e-12, "falling above beta*: {b0} -> {b1}");
                }
            }
            for (b, cont, floored) in &poa {
                let staircase = delta / (r as f64 + b * (500 - r) as f64);
                assert!((cont - floored).abs() <= staircase + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn poa_is_a_cost_ratio_below_the_bound(
            n in 2usize..2000, r in 1usize..600, beta in 1.1f64..16.0, delta in 0.5f64..5.0,
        ) {
            let c = GameConfig::with_delta(n, r, 1.0, beta, delta).unwrap();
            let rep = price_of_anarchy(&c);
            prop_assert!((rep.poa - rep.c_worst / rep.c_opt).abs() < 1e-12);
            prop_assert!(rep.poa >= 1.0 - 1e-12);
            if n > r {
                prop_assert!(rep.poa < rep.bound);
            } else {
                prop_assert_eq!(rep.poa, 1.0);
            }
        }
    }
}
