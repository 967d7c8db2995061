//! Cross-checks the closed-form solvers against the oracles over a grid of
//! small games.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{equilibria_for_threshold, mixed_equilibrium, potential_curve, potential_minimizers, Method};
use crate::error::{GameError, Result};
use crate::model::{cost_private, cost_public, GameConfig, Tolerances};
use crate::oracle::{brute_force_pure_equilibria, exact_expected_public_cost, BRUTE_FORCE_CAP};

pub const INDIFFERENCE_TOLERANCE: f64 = 1e-9;
pub const POTENTIAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyGrid {
    pub n_min: usize,
    pub n_max: usize,
    pub betas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Added to `sigma0` before the closed-form equilibria are computed.
    /// Zero except when checking that the battery catches a wrong threshold.
    pub sigma0_offset: f64,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            n_min: 2,
            n_max: BRUTE_FORCE_CAP,
            betas: vec![1.5, 2.0, 3.0, 5.0, 8.0],
            deltas: vec![0.5, 1.0, 2.0, 4.0],
            sigma0_offset: 0.0,
        }
    }
}

/// `{1, ceil(N/4), ceil(N/2), N}` without duplicates.
pub fn capacity_levels(n: usize) -> Vec<usize> {
    let mut rs = vec![1, n.div_ceil(4), n.div_ceil(2), n];
    rs.dedup();
    rs
}

impl VerifyGrid {
    pub fn configs(&self) -> Result<Vec<GameConfig>> {
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(GameError::InvalidSweep(format!(
                "population range [{}, {}] must satisfy 2 <= n_min <= n_max",
                self.n_min, self.n_max
            )));
        }
        if self.n_max > BRUTE_FORCE_CAP {
            return Err(GameError::CapExceeded {
                n: self.n_max,
                cap: BRUTE_FORCE_CAP,
            });
        }
        let mut out = Vec::new();
        for n in self.n_min..=self.n_max {
            for r in capacity_levels(n) {
                for &beta in &self.betas {
                    for &delta in &self.deltas {
                        out.push(GameConfig::with_delta(n, r, 1.0, beta, delta)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub config: String,
    pub check: &'static str,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub configs: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn describe(cfg: &GameConfig) -> String {
    format!(
        "N={} R={} c={} beta={} gamma={}",
        cfg.n_drivers(),
        cfg.r_spots(),
        cfg.c_pub_s(),
        cfg.beta(),
        cfg.gamma()
    )
}

fn check_config(cfg: &GameConfig, sigma0_offset: f64) -> Result<(usize, Vec<Failure>)> {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut expect = |check: &'static str, ok: bool, expected: String, actual: String| {
        checks += 1;
        if !ok {
            failures.push(Failure {
                config: describe(cfg),
                check,
                expected,
                actual,
            });
        }
    };

    let brute = brute_force_pure_equilibria(cfg)?;
    let closed_form =
        equilibria_for_threshold(cfg.n_drivers(), cfg.r_spots(), cfg.sigma0() + sigma0_offset, &tol).sigmas();
    expect(
        "pure equilibria",
        brute == closed_form,
        format!("{brute:?}"),
        format!("{closed_form:?}"),
    );

    let minimizers = potential_minimizers(cfg, &tol);
    expect(
        "potential minimizers",
        brute == minimizers,
        format!("{brute:?}"),
        format!("{minimizers:?}"),
    );

    let phi = potential_curve(cfg);
    let private = cost_private(cfg);
    let mut worst = 0.0f64;
    for m in 0..cfg.n_drivers() {
        let step = phi[m + 1] - phi[m];
        worst = worst.max((step - (cost_public(cfg, m + 1)? - private)).abs());
    }
    expect(
        "exact potential increments",
        worst < POTENTIAL_TOLERANCE,
        format!("< {POTENTIAL_TOLERANCE:e}"),
        format!("{worst:e}"),
    );

    if (cfg.n_drivers() as f64) > cfg.sigma0() {
        let p = mixed_equilibrium(cfg, Method::RootFound)?.p_pub;
        let gap = (exact_expected_public_cost(cfg, p)? - private).abs();
        expect(
            "indifference at mixed equilibrium",
            gap < INDIFFERENCE_TOLERANCE,
            format!("< {INDIFFERENCE_TOLERANCE:e}"),
            format!("{gap:e} at p={p}"),
        );
    }
    Ok((checks, failures))
}

/// Runs every check on every grid config. Failures are collected, not
/// returned as errors; `Err` means the grid itself was unusable.
pub fn run_verification(grid: &VerifyGrid) -> Result<VerifyReport> {
    let configs = grid.configs()?;
    let results = configs
        .par_iter()
        .map(|cfg| check_config(cfg, grid.sigma0_offset))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerifyReport {
        configs: configs.len(),
        checks: 0,
        failures: Vec::new(),
    };
    for (checks, failures) in results {
        report.checks += checks;
        report.failures.extend(failures);
    }
    Ok(report)
}
