//! Fixtures shared by the solver benchmarks.

use parking_core::sweep::{Axis, SweepParam};
use parking_core::{Baseline, BayesianConfig, GameConfig, Metric, SweepSpec};

/// Canonical game scaled to `n` drivers with `R = n / 10`.
pub fn scaled_game(n: usize) -> GameConfig {
    GameConfig::new(n, (n / 10).max(1), 1.0, 5.0, 7.0).expect("valid game")
}

pub fn scaled_bayesian(n: usize, p_act: f64) -> BayesianConfig {
    BayesianConfig::new(scaled_game(n), p_act).expect("valid activity")
}

/// The beta x delta PoA grid at N = 500, R = 50.
pub fn poa_grid() -> SweepSpec {
    SweepSpec {
        baseline: Baseline::from_config(&scaled_game(500)),
        axes: vec![
            Axis::new(SweepParam::Beta, 1.1, 16.0, 0.1).expect("valid axis"),
            Axis::new(SweepParam::Delta, 1.0, 5.0, 0.1).expect("valid axis"),
        ],
        outputs: vec![Metric::Poa, Metric::PNe],
    }
}
