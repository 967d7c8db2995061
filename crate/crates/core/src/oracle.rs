//! Independent checks for the analytic results.
//!
//! Nothing here goes through the pmf recurrence or the closed-form thresholds
//! used by the solvers: pure equilibria are found by comparing the two
//! action costs at every competitor count, binomial weights come from
//! convolving one Bernoulli driver at a time, and the Monte-Carlo estimator
//! plays the parking lottery directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GameError, Result};
use crate::model::{check_probability, cost_private, cost_public, BayesianConfig, GameConfig, Tolerances};

/// Largest population for exhaustive pure-equilibrium certification.
pub const BRUTE_FORCE_CAP: usize = 200;
/// Largest population for enumeration over all `2^N` action profiles.
pub const ENUMERATION_CAP: usize = 20;

/// Every competitor count at which no driver gains by switching, found by
/// comparing `cost_public` against `cost_private` directly.
pub fn brute_force_pure_equilibria(cfg: &GameConfig) -> Result<Vec<usize>> {
    brute_force_pure_equilibria_with(cfg, &Tolerances::default())
}

pub fn brute_force_pure_equilibria_with(cfg: &GameConfig, tol: &Tolerances) -> Result<Vec<usize>> {
    let n = cfg.n_drivers();
    if n > BRUTE_FORCE_CAP {
        return Err(GameError::CapExceeded {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let private = cost_private(cfg);
    let mut out = Vec::new();
    for sigma in 0..=n {
        let private_player_moves = sigma < n && cost_public(cfg, sigma + 1)? < private - tol.cost;
        let public_player_moves = sigma > 0 && private < cost_public(cfg, sigma)? - tol.cost;
        if !private_player_moves && !public_player_moves {
            out.push(sigma);
        }
    }
    Ok(out)
}

/// Row-by-row distributions of the number of successes among `0, 1, ..., n`
/// independent Bernoulli(p) trials. `visit(j, dist)` sees `dist[k] = P(k of j)`.
fn convolve_bernoulli<F>(n: usize, p: f64, mut visit: F)
where
    F: FnMut(usize, &[f64]),
{
    let mut dist = Vec::with_capacity(n + 1);
    dist.push(1.0);
    visit(0, &dist);
    for j in 1..=n {
        dist.push(0.0);
        for k in (1..=j).rev() {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        }
        dist[0] *= 1.0 - p;
        visit(j, &dist);
    }
}

fn bernoulli_count_distribution(n: usize, p: f64) -> Vec<f64> {
    let mut out = Vec::new();
    convolve_bernoulli(n, p, |j, d| {
        if j == n {
            out = d.to_vec();
        }
    });
    out
}

/// Expected cost of a driver who competes while each of the other `N - 1`
/// drivers competes independently with probability `p`.
pub fn exact_expected_public_cost(cfg: &GameConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    let dist = bernoulli_count_distribution(cfg.n_drivers() - 1, p);
    let mut total = 0.0;
    for (opponents, weight) in dist.iter().enumerate() {
        total += weight * cost_public(cfg, opponents + 1)?;
    }
    Ok(total)
}

/// Expected public cost of an active driver in the Bayesian game, summing
/// over the number of active opponents and, inside, over how many of them
/// compete. Quadratic in `N`.
pub fn bayesian_oracle_cost(bcfg: &BayesianConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    let cfg = bcfg.game();
    let others = cfg.n_drivers() - 1;
    let activity = bernoulli_count_distribution(others, bcfg.p_act());
    let public: Vec<f64> = (1..=cfg.n_drivers())
        .map(|k| cost_public(cfg, k))
        .collect::<Result<_>>()?;

    let mut total = 0.0;
    convolve_bernoulli(others, p, |n_act, competing| {
        // cost of competing in a game with n_act + 1 active drivers
        let inner: f64 = competing.iter().enumerate().map(|(k, w)| w * public[k]).sum();
        total += activity[n_act] * inner;
    });
    Ok(total)
}

/// Expected social cost by enumerating all `2^N` action profiles.
pub fn exhaustive_social_cost_mixed(cfg: &GameConfig, p: f64) -> Result<f64> {
    check_probability(p)?;
    let n = cfg.n_drivers();
    if n > ENUMERATION_CAP {
        return Err(GameError::CapExceeded {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        let competing = mask.count_ones() as usize;
        let prob = p.powi(competing as i32) * (1.0 - p).powi((n - competing) as i32);
        if prob == 0.0 {
            continue;
        }
        // each competitor pays its expected lottery cost, everyone else the fee
        let cost = if competing == 0 {
            0.0
        } else {
            competing as f64 * cost_public(cfg, competing)?
        } + (n - competing) as f64 * cost_private(cfg);
        total += prob * cost;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOutcome {
    /// Realized cost of a tagged driver forced to compete.
    pub mean_cost_public_action: f64,
    /// Realized cost of the same driver sent to the private lot.
    pub mean_cost_private_action: f64,
    pub mean_social_cost: f64,
    pub n_samples: usize,
    /// Standard error of `mean_social_cost`.
    pub std_error: f64,
    /// Standard error of `mean_cost_public_action`.
    pub std_error_public: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    social: Moments,
    public: Moments,
}

fn simulate(cfg: &GameConfig, p: f64, n_samples: usize, rng: &mut ChaCha8Rng) -> Tally {
    let n = cfg.n_drivers();
    let r = cfg.r_spots();
    let c = cfg.c_pub_s();
    let opponents_dist = Binomial::new((n - 1) as u64, p).expect("p validated");
    let mut tally = Tally::default();
    for _ in 0..n_samples {
        let opponents = opponents_dist.sample(rng) as usize;
        let tagged_competes = rng.random_bool(p);

        // Spots go to a uniformly random subset of min(k, R) competitors, so
        // the social cost depends only on how many compete.
        let sigma = opponents + usize::from(tagged_competes);
        let winners = sigma.min(r);
        let social =
            winners as f64 * c + (sigma - winners) as f64 * cfg.c_pub_fail() + (n - sigma) as f64 * cfg.c_priv();
        tally.social.push(social);

        // The tagged driver competing: wins iff its uniform rank among the
        // k competitors falls inside the first R.
        let k = opponents + 1;
        let wins = rng.random_range(0..k) < r;
        tally.public.push(if wins { c } else { cfg.c_pub_fail() });
    }
    tally
}

fn outcome(cfg: &GameConfig, tally: Tally) -> SimOutcome {
    SimOutcome {
        mean_cost_public_action: tally.public.mean,
        mean_cost_private_action: cfg.c_priv(),
        mean_social_cost: tally.social.mean,
        n_samples: tally.social.n,
        std_error: tally.social.std_error(),
        std_error_public: tally.public.std_error(),
    }
}

/// Monte-Carlo realization of the parking lottery with every driver
/// competing independently with probability `p`. ChaCha8 seeded from `seed`;
/// identical inputs give bit-identical output.
pub fn monte_carlo_profile(cfg: &GameConfig, p: f64, n_samples: usize, seed: u64) -> Result<SimOutcome> {
    check_probability(p)?;
    if n_samples == 0 {
        return Err(GameError::CountOutOfRange {
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(outcome(cfg, simulate(cfg, p, n_samples, &mut rng)))
}

/// Same estimator split over `batches` independent ChaCha8 streams (stream
/// id = batch index) and pooled in batch order, so the result depends on
/// `(seed, batches)` but not on thread scheduling.
pub fn monte_carlo_profile_parallel(
    cfg: &GameConfig,
    p: f64,
    n_samples: usize,
    seed: u64,
    batches: usize,
) -> Result<SimOutcome> {
    check_probability(p)?;
    if n_samples == 0 || batches == 0 {
        return Err(GameError::CountOutOfRange {
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let per = n_samples / batches;
    let extra = n_samples % batches;
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            simulate(cfg, p, per + usize::from(b < extra), &mut rng)
        })
        .collect();
    let pooled = tallies.into_iter().fold(Tally::default(), |acc, t| Tally {
        social: acc.social.merge(t.social),
        public: acc.public.merge(t.public),
    });
    Ok(outcome(cfg, pooled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{self, Method};
    use crate::model::social_cost_mixed;

    fn cfg(n: usize, r: usize, beta: f64, gamma: f64) -> GameConfig {
        GameConfig::new(n, r, 1.0, beta, gamma).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_pure_equilibria(&cfg(10, 50, 5.0, 7.0)).unwrap(), vec![10]);
        assert_eq!(
            brute_force_pure_equilibria(&cfg(20, 5, 5.0, 7.0)).unwrap(),
            vec![14, 15]
        );
        assert_eq!(brute_force_pure_equilibria(&cfg(20, 5, 5.0, 7.2)).unwrap(), vec![14]);
        assert!(matches!(
            brute_force_pure_equilibria(&cfg(201, 5, 5.0, 7.0)),
            Err(GameError::CapExceeded { .. })
        ));
    }

    #[test]
    fn expected_public_cost_examples() {
        let c = cfg(500, 50, 5.0, 7.0);
        assert!((exact_expected_public_cost(&c, 0.3).unwrap() - 5.0).abs() < 1e-9);
        assert_eq!(exact_expected_public_cost(&c, 0.0).unwrap(), 1.0);
        assert!((exact_expected_public_cost(&c, 1.0).unwrap() - 6.4).abs() < 1e-12);
        assert!(exact_expected_public_cost(&c, 2.0).is_err());
    }

    #[test]
    fn expected_public_cost_tracks_indifference_function() {
        for (n, r, beta, gamma) in [(500, 50, 3.0, 8.0), (37, 4, 1.5, 2.2)] {
            let c = cfg(n, r, beta, gamma);
            for p in [0.05, 0.3, 0.61, 0.95] {
                let f = equilibria::f_indifference(&c, p).unwrap();
                let direct = exact_expected_public_cost(&c, p).unwrap() - cost_private(&c);
                assert!((f - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bayesian_oracle_examples() {
        let base = cfg(500, 50, 5.0, 7.0);
        let full = BayesianConfig::new(base, 1.0).unwrap();
        for p in [0.0, 0.2, 0.9] {
            let a = bayesian_oracle_cost(&full, p).unwrap();
            let b = exact_expected_public_cost(&base, p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let half = BayesianConfig::new(base, 0.5).unwrap();
        assert!((bayesian_oracle_cost(&half, 0.6).unwrap() - 5.0).abs() < 1e-9);

        // binomial thinning: 0.7 * 0.4 = 0.28
        let small = cfg(30, 5, 2.0, 3.0);
        let b = BayesianConfig::new(small, 0.7).unwrap();
        let thinned = exact_expected_public_cost(&small, 0.7 * 0.4).unwrap();
        assert!((bayesian_oracle_cost(&b, 0.4).unwrap() - thinned).abs() < 1e-12);
        assert!(bayesian_oracle_cost(&b, -1.0).is_err());
    }

    #[test]
    fn enumeration_matches_binomial_sum() {
        for n in 2..=12 {
            let c = cfg(n, (n / 3).max(1), 2.0, 3.5);
            for p in [0.0, 0.25, 0.5, 0.9, 1.0] {
                let a = exhaustive_social_cost_mixed(&c, p).unwrap();
                let b = social_cost_mixed(&c, p).unwrap();
                assert!((a - b).abs() <= 1e-9 * b.abs(), "n={n} p={p}: {a} vs {b}");
            }
        }
        assert!(exhaustive_social_cost_mixed(&cfg(21, 3, 2.0, 3.0), 0.5).is_err());
    }

    #[test]
    fn degenerate_simulation() {
        let c = cfg(500, 50, 5.0, 7.0);
        let out = monte_carlo_profile(&c, 0.0, 1000, 7).unwrap();
        assert_eq!(out.mean_social_cost, 2500.0);
        assert_eq!(out.std_error, 0.0);
        assert_eq!(out.mean_cost_public_action, 1.0);
        assert_eq!(out.n_samples, 1000);
        assert!(monte_carlo_profile(&c, 0.5, 0, 7).is_err());
    }

    #[test]
    fn small_game_simulation_matches_enumeration() {
        let c = cfg(4, 1, 2.0, 3.0);
        let exact = exhaustive_social_cost_mixed(&c, 0.5).unwrap();
        let out = monte_carlo_profile(&c, 0.5, 1_000_000, 1).unwrap();
        assert!((out.mean_social_cost - exact).abs() < 3.0 * out.std_error);
        let public = exact_expected_public_cost(&c, 0.5).unwrap();
        assert!((out.mean_cost_public_action - public).abs() < 3.0 * out.std_error_public);
        assert!(out.mean_social_cost >= 4.0 && out.mean_social_cost <= 12.0);
    }

    #[test]
    fn simulation_is_reproducible() {
        let c = cfg(200, 20, 3.0, 4.0);
        let a = monte_carlo_profile(&c, 0.4, 20_000, 99).unwrap();
        let b = monte_carlo_profile(&c, 0.4, 20_000, 99).unwrap();
        assert_eq!(a, b);
        let other = monte_carlo_profile(&c, 0.4, 20_000, 100).unwrap();
        assert_ne!(a.mean_social_cost, other.mean_social_cost);

        let pa = monte_carlo_profile_parallel(&c, 0.4, 20_001, 99, 4).unwrap();
        let pb = monte_carlo_profile_parallel(&c, 0.4, 20_001, 99, 4).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(pa.n_samples, 20_001);
    }

    #[test]
    fn parallel_estimator_is_consistent() {
        let c = cfg(500, 50, 5.0, 7.0);
        let p = equilibria::mixed_equilibrium(&c, Method::ClosedForm).unwrap().p_pub;
        let out = monte_carlo_profile_parallel(&c, p, 400_000, 5, 8).unwrap();
        let exact = social_cost_mixed(&c, p).unwrap();
        assert!((out.mean_social_cost - exact).abs() < 4.0 * out.std_error);
    }

    #[test]
    fn pooled_moments_match_sequential() {
        let xs: Vec<f64> = (0..101).map(|i| ((i * 37) % 17) as f64 * 0.5).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|x| all.push(*x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..40].iter().for_each(|x| a.push(*x));
        xs[40..].iter().for_each(|x| b.push(*x));
        let m = a.merge(b);
        assert_eq!(m.n, all.n);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9);
    }
}
