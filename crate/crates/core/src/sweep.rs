//! Parameter grids and the tables behind the social-cost, PoA and
//! equilibrium-probability curves.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::price_of_anarchy;
use crate::equilibria::{bayesian_equilibrium, mixed_equilibrium, potential, Method};
use crate::error::{GameError, Result};
use crate::model::{social_cost_mixed, social_cost_pure, BayesianConfig, GameConfig};

/// Number of probability points on the mixed social-cost curve (step 1/200).
pub const MIXED_CURVE_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Beta,
    Delta,
    NDrivers,
    PAct,
    P,
    Sigma,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::Beta,
        SweepParam::Delta,
        SweepParam::NDrivers,
        SweepParam::PAct,
        SweepParam::P,
        SweepParam::Sigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Beta => "beta",
            SweepParam::Delta => "delta",
            SweepParam::NDrivers => "n_drivers",
            SweepParam::PAct => "p_act",
            SweepParam::P => "p",
            SweepParam::Sigma => "sigma",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| GameError::InvalidSweep(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SocialCostPure,
    SocialCostMixed,
    Poa,
    PNe,
    PNeBayes,
    Potential,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::SocialCostPure,
        Metric::SocialCostMixed,
        Metric::Poa,
        Metric::PNe,
        Metric::PNeBayes,
        Metric::Potential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SocialCostPure => "social_cost_pure",
            Metric::SocialCostMixed => "social_cost_mixed",
            Metric::Poa => "poa",
            Metric::PNe => "p_ne",
            Metric::PNeBayes => "p_ne_bayes",
            Metric::Potential => "potential",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| GameError::InvalidSweep(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(param: SweepParam, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(GameError::InvalidSweep(format!(
                "{param}: step must be > 0 (got {step})"
            )));
        }
        if start.partial_cmp(&stop).is_none_or(|o| o.is_gt()) {
            return Err(GameError::InvalidSweep(format!(
                "{param}: start {start} must not exceed stop {stop}"
            )));
        }
        Ok(Axis {
            param,
            start,
            stop,
            step,
        })
    }

    /// Grid values `start, start + step, ...` up to `stop` inclusive, each
    /// rounded to 12 significant digits.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| round_significant(self.start + i as f64 * self.step, 12))
            .collect()
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Values used for every parameter an axis does not cover. `gamma` is
/// always recomputed as `beta + delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub n_drivers: usize,
    pub r_spots: usize,
    pub c_pub_s: f64,
    pub beta: f64,
    pub delta: f64,
    pub p_act: Option<f64>,
    pub p: Option<f64>,
    pub sigma: Option<usize>,
}

impl Baseline {
    pub fn from_config(cfg: &GameConfig) -> Self {
        Baseline {
            n_drivers: cfg.n_drivers(),
            r_spots: cfg.r_spots(),
            c_pub_s: cfg.c_pub_s(),
            beta: cfg.beta(),
            delta: cfg.delta(),
            p_act: None,
            p: None,
            sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub baseline: Baseline,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Metric>,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(GameError::InvalidSweep(format!(
                "expected one or two axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(GameError::InvalidSweep(format!(
                "axis `{}` given twice",
                self.axes[0].param
            )));
        }
        if self.outputs.is_empty() {
            return Err(GameError::InvalidSweep("no output metrics requested".into()));
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.param.name().to_string())
            .chain(self.outputs.iter().map(|m| m.name().to_string()))
            .collect()
    }
}

/// Rectangular numeric table with a header row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn as_count(param: SweepParam, v: f64) -> Result<usize> {
    let rounded = v.round();
    if (v - rounded).abs() > 1e-9 || rounded < 0.0 {
        return Err(GameError::InvalidSweep(format!(
            "{param} must be a non-negative integer (got {v})"
        )));
    }
    Ok(rounded as usize)
}

/// Evaluates `outputs` at the baseline with the given parameters overridden.
pub fn evaluate_point(baseline: &Baseline, assignments: &[(SweepParam, f64)], outputs: &[Metric]) -> Result<Vec<f64>> {
    let mut pt = *baseline;
    for &(param, v) in assignments {
        match param {
            SweepParam::Beta => pt.beta = v,
            SweepParam::Delta => pt.delta = v,
            SweepParam::NDrivers => pt.n_drivers = as_count(param, v)?,
            SweepParam::PAct => pt.p_act = Some(v),
            SweepParam::P => pt.p = Some(v),
            SweepParam::Sigma => pt.sigma = Some(as_count(param, v)?),
        }
    }

    let describe = || {
        assignments
            .iter()
            .map(|(p, v)| format!("{p}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let at_point = |e: GameError| GameError::InvalidSweep(format!("at ({}): {e}", describe()));
    let needs =
        |metric: Metric, what: &str| GameError::InvalidSweep(format!("metric {metric} needs a value for {what}"));

    let cfg = GameConfig::with_delta(pt.n_drivers, pt.r_spots, pt.c_pub_s, pt.beta, pt.delta).map_err(at_point)?;
    outputs
        .iter()
        .map(|&metric| {
            let value = match metric {
                Metric::SocialCostPure | Metric::Potential => {
                    let sigma = pt.sigma.ok_or_else(|| needs(metric, "sigma"))?;
                    let m = cfg.profile(sigma).map_err(at_point)?;
                    if metric == Metric::Potential {
                        potential(&cfg, m)
                    } else {
                        social_cost_pure(&cfg, m)
                    }
                    .map_err(at_point)?
                }
                Metric::SocialCostMixed => {
                    let p = pt.p.ok_or_else(|| needs(metric, "p"))?;
                    social_cost_mixed(&cfg, p).map_err(at_point)?
                }
                Metric::Poa => price_of_anarchy(&cfg).poa,
                Metric::PNe => mixed_equilibrium(&cfg, Method::ClosedForm).map_err(at_point)?.p_pub,
                Metric::PNeBayes => {
                    let p_act = pt.p_act.ok_or_else(|| needs(metric, "p_act"))?;
                    let b = BayesianConfig::new(cfg, p_act).map_err(at_point)?;
                    bayesian_equilibrium(&b).map_err(at_point)?.p_pub
                }
            };
            Ok(value)
        })
        .collect()
}

/// Evaluates every grid point. The first axis varies slowest; row order is
/// fixed regardless of how the points are scheduled across threads.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let first = spec.axes[0].values();
    let second = spec.axes.get(1).map(Axis::values);
    let mut points: Vec<Vec<(SweepParam, f64)>> = Vec::new();
    for &a in &first {
        match &second {
            Some(bs) => {
                for &b in bs {
                    points.push(vec![(spec.axes[0].param, a), (spec.axes[1].param, b)]);
                }
            }
            None => points.push(vec![(spec.axes[0].param, a)]),
        }
    }

    let rows = points
        .par_iter()
        .map(|assign| {
            let mut row: Vec<f64> = assign.iter().map(|(_, v)| *v).collect();
            row.extend(evaluate_point(&spec.baseline, assign, &spec.outputs)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: spec.header(),
        rows,
    })
}

/// PoA over `beta x delta` at fixed `N` and `R`.
pub fn poa_surface(baseline: Baseline, beta: Axis, delta: Axis) -> Result<Table> {
    run_sweep(&SweepSpec {
        baseline,
        axes: vec![beta, delta],
        outputs: vec![Metric::Poa],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMode {
    Pure,
    Mixed,
}

/// Social cost against the number of competitors (`Pure`) or the common
/// competition probability (`Mixed`). The last column is 1 on the row
/// attaining the curve's minimum.
pub fn social_cost_curve(cfg: &GameConfig, mode: CurveMode) -> Result<Table> {
    let (label, xs, costs): (&str, Vec<f64>, Vec<f64>) = match mode {
        CurveMode::Pure => {
            let costs = (0..=cfg.n_drivers())
                .map(|s| social_cost_pure(cfg, cfg.profile(s)?))
                .collect::<Result<Vec<_>>>()?;
            ("sigma", (0..=cfg.n_drivers()).map(|s| s as f64).collect(), costs)
        }
        CurveMode::Mixed => {
            let steps = (MIXED_CURVE_POINTS - 1) as f64;
            let ps: Vec<f64> = (0..MIXED_CURVE_POINTS).map(|i| i as f64 / steps).collect();
            let costs = ps
                .par_iter()
                .map(|&p| social_cost_mixed(cfg, p))
                .collect::<Result<Vec<_>>>()?;
            ("p", ps, costs)
        }
    };
    let argmin = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty curve");
    let rows = xs
        .into_iter()
        .zip(costs)
        .enumerate()
        .map(|(i, (x, c))| vec![x, c, if i == argmin { 1.0 } else { 0.0 }])
        .collect();
    Ok(Table {
        header: vec![label.into(), "social_cost".into(), "is_min".into()],
        rows,
    })
}

/// Equilibrium competition probability against population size, one curve
/// per `(p_act, beta, gamma)` combination.
pub fn equilibrium_probability_curves(
    r_spots: usize,
    c_pub_s: f64,
    n_axis: &Axis,
    p_acts: &[f64],
    pricing: &[(f64, f64)],
) -> Result<Table> {
    if n_axis.param != SweepParam::NDrivers {
        return Err(GameError::InvalidSweep(format!(
            "expected an n_drivers axis, got {}",
            n_axis.param
        )));
    }
    let ns = n_axis
        .values()
        .into_iter()
        .map(|v| as_count(SweepParam::NDrivers, v))
        .collect::<Result<Vec<_>>>()?;
    for &(beta, gamma) in pricing {
        GameConfig::new(2, r_spots, c_pub_s, beta, gamma)?;
    }
    for &p_act in p_acts {
        if !(p_act > 0.0 && p_act <= 1.0) {
            return Err(GameError::InvalidSweep(format!(
                "p_act must be in (0, 1] (got {p_act})"
            )));
        }
    }

    let mut rows = Vec::with_capacity(ns.len() * p_acts.len() * pricing.len());
    for &(beta, gamma) in pricing {
        for &p_act in p_acts {
            for &n in &ns {
                let cfg = GameConfig::new(n, r_spots, c_pub_s, beta, gamma)?;
                let p = bayesian_equilibrium(&BayesianConfig::new(cfg, p_act)?)?.p_pub;
                rows.push(vec![n as f64, p_act, beta, gamma, p]);
            }
        }
    }
    Ok(Table {
        header: ["n_drivers", "p_act", "beta", "gamma", "p_ne"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Baseline {
        Baseline::from_config(&GameConfig::new(500, 50, 1.0, 5.0, 7.0).unwrap())
    }

    #[test]
    fn axis_values_are_clean() {
        let a = Axis::new(SweepParam::Beta, 1.1, 16.0, 0.1).unwrap();
        let v = a.values();
        assert_eq!(v.len(), 150);
        assert_eq!(v[3], 1.4);
        assert_eq!(*v.last().unwrap(), 16.0);
        assert!(Axis::new(SweepParam::Beta, 2.0, 1.0, 0.1).is_err());
        assert!(Axis::new(SweepParam::Beta, 1.0, 2.0, 0.0).is_err());
        assert_eq!(Axis::new(SweepParam::P, 0.5, 0.5, 1.0).unwrap().values(), vec![0.5]);
    }

    #[test]
    fn names_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("gamma".parse::<SweepParam>().is_err());
    }

    #[test]
    fn poa_surface_rows() {
        let mut b = base();
        b.r_spots = 160;
        let t = poa_surface(
            b,
            Axis::new(SweepParam::Beta, 2.0, 2.0, 1.0).unwrap(),
            Axis::new(SweepParam::Delta, 1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(t.header, vec!["beta", "delta", "poa"]);
        assert!((t.rows[0][2] - 1000.0 / 840.0).abs() < 1e-9);

        let t = poa_surface(
            base(),
            Axis::new(SweepParam::Beta, 5.0, 5.0, 1.0).unwrap(),
            Axis::new(SweepParam::Delta, 2.0, 2.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((t.rows[0][2] - 2500.0 / 2300.0).abs() < 1e-9);
    }

    #[test]
    fn column_count_and_order() {
        let mut b = base();
        b.p_act = Some(0.5);
        b.p = Some(0.3);
        let spec = SweepSpec {
            baseline: b,
            axes: vec![
                Axis::new(SweepParam::Sigma, 0.0, 500.0, 50.0).unwrap(),
                Axis::new(SweepParam::Beta, 2.0, 4.0, 1.0).unwrap(),
            ],
            outputs: vec![
                Metric::Potential,
                Metric::Poa,
                Metric::PNeBayes,
                Metric::SocialCostPure,
                Metric::SocialCostMixed,
                Metric::PNe,
            ],
        };
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.rows.len(), 11 * 3);
        assert!(t.rows.iter().all(|r| r.len() == 2 + 6));
        assert_eq!(t.header[0], "sigma");
        assert_eq!(t.header[2], "potential");
        // first axis slowest
        assert_eq!(t.rows[0][0], 0.0);
        assert_eq!(t.rows[1][0], 0.0);
        assert_eq!(t.rows[1][1], 3.0);
        assert_eq!(t.rows[3][0], 50.0);
    }

    #[test]
    fn sweep_errors() {
        let spec = SweepSpec {
            baseline: base(),
            axes: vec![Axis::new(SweepParam::Beta, 1.1, 2.0, 0.1).unwrap()],
            outputs: vec![Metric::SocialCostPure],
        };
        let err = run_sweep(&spec).unwrap_err().to_string();
        assert!(err.contains("needs a value for sigma"), "{err}");

        let spec = SweepSpec {
            baseline: base(),
            axes: vec![Axis::new(SweepParam::Delta, -1.0, 1.0, 0.5).unwrap()],
            outputs: vec![Metric::Poa],
        };
        let err = run_sweep(&spec).unwrap_err().to_string();
        assert!(err.contains("requires 1 < beta < gamma"), "{err}");

        let spec = SweepSpec {
            baseline: base(),
            axes: vec![Axis::new(SweepParam::NDrivers, 10.0, 11.0, 0.5).unwrap()],
            outputs: vec![Metric::Poa],
        };
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn pure_curve_minimum() {
        let cfg = GameConfig::new(500, 50, 1.0, 5.0, 7.0).unwrap();
        let t = social_cost_curve(&cfg, CurveMode::Pure).unwrap();
        assert_eq!(t.rows.len(), 501);
        let min_row = t.rows.iter().find(|r| r[2] == 1.0).unwrap();
        assert_eq!(min_row[0], 50.0);
        assert!((min_row[1] - 2300.0).abs() < 1e-9);

        // charging more for the private lot lifts the curve left of R
        let steep = GameConfig::new(500, 50, 1.0, 16.0, 17.0).unwrap();
        let s = social_cost_curve(&steep, CurveMode::Pure).unwrap();
        for sigma in 0..50 {
            assert!(s.rows[sigma][1] > t.rows[sigma][1]);
        }
    }

    #[test]
    fn mixed_curve_minimum_near_capacity_share() {
        let cfg = GameConfig::new(500, 50, 1.0, 5.0, 7.0).unwrap();
        let t = social_cost_curve(&cfg, CurveMode::Mixed).unwrap();
        assert_eq!(t.rows.len(), MIXED_CURVE_POINTS);
        let at_tenth = t.rows.iter().find(|r| (r[0] - 0.1).abs() < 1e-15).unwrap();
        assert_eq!(at_tenth[1], social_cost_mixed(&cfg, 0.1).unwrap());
        let min_row = t.rows.iter().find(|r| r[2] == 1.0).unwrap();
        assert!((min_row[0] - 0.1).abs() <= 1.0 / 200.0 + 1e-12, "min at {}", min_row[0]);
    }

    #[test]
    fn probability_curves() {
        let axis = Axis::new(SweepParam::NDrivers, 100.0, 1000.0, 100.0).unwrap();
        let t = equilibrium_probability_curves(50, 1.0, &axis, &[0.5, 0.7, 1.0], &[(5.0, 7.0)]).unwrap();
        let find = |n: f64, pa: f64| t.rows.iter().find(|r| r[0] == n && r[1] == pa).unwrap()[4];
        assert!((find(500.0, 1.0) - 0.3).abs() < 1e-12);
        assert!((find(500.0, 0.5) - 0.6).abs() < 1e-12);
        assert_eq!(find(100.0, 1.0), 1.0);
        for curve in t.rows.chunks(10) {
            for w in curve.windows(2) {
                assert!(w[1][4] <= w[0][4]);
            }
        }
        assert!(equilibrium_probability_curves(50, 1.0, &axis, &[1.0], &[(4.0, 3.0)]).is_err());
        assert!(equilibrium_probability_curves(50, 1.0, &axis, &[0.0], &[(3.0, 4.0)]).is_err());
    }
}
