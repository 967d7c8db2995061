use anyhow::{bail, Result};
use parking_core::equilibria::bayesian_equilibrium;
use parking_core::oracle::monte_carlo_profile_parallel;
use parking_core::sweep::{equilibrium_probability_curves, run_sweep, social_cost_curve, Axis, SweepParam};
use parking_core::verify::{run_verification, VerifyGrid};
use parking_core::{
    cost_private, less_is_more_population, mixed_equilibrium, price_of_anarchy, pricing_thresholds, pure_equilibria,
    social_cost_mixed, Baseline, BayesianConfig, Method, Metric, SweepSpec,
};

use crate::args::{CurveArgs, EquilibriumCurveArgs, SolveArgs, SweepArgs, VerifyArgs, FIGURE_DEFAULTS};
use crate::output::{Cell, Output};

/// Independent random streams used for the Monte-Carlo check. Fixed so the
/// output depends only on `--seed` and `--samples`.
const MC_BATCHES: usize = 8;

pub const DEFAULT_P_ACTS: [f64; 3] = [0.5, 0.7, 1.0];

/// Exit status of a command that ran to completion.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 2;

pub fn solve(args: &SolveArgs) -> Result<i32> {
    let opts = args.common.resolve()?;
    let cfg = opts.game()?;
    let n = cfg.n_drivers() as f64;
    let s0 = cfg.sigma0();

    let eq = pure_equilibria(&cfg);
    let p_ne = mixed_equilibrium(&cfg, Method::ClosedForm)?.p_pub;
    let p_root = if n > s0 {
        Some(mixed_equilibrium(&cfg, Method::RootFound)?.p_pub)
    } else {
        None
    };
    let p_bayes = match opts.p_act {
        Some(p_act) => Some(bayesian_equilibrium(&BayesianConfig::new(cfg, p_act)?)?.p_pub),
        None => None,
    };
    let poa = price_of_anarchy(&cfg);
    let thresholds = pricing_thresholds(&cfg).ok();
    let lim = less_is_more_population(&cfg).ok();

    let mut fields: Vec<(&str, Cell)> = vec![
        ("n_drivers", cfg.n_drivers().into()),
        ("r_spots", cfg.r_spots().into()),
        ("c_pub_s", cfg.c_pub_s().into()),
        ("beta", cfg.beta().into()),
        ("gamma", cfg.gamma().into()),
        ("delta", cfg.delta().into()),
        ("sigma0", s0.into()),
        ("regime", format!("{:?}", eq.regime).into()),
        (
            "sigma_ne",
            Cell::List(eq.branches.iter().map(|b| b.sigma_ne.into()).collect()),
        ),
        (
            "profile_count",
            Cell::List(eq.branches.iter().map(|b| b.profile_count.to_string().into()).collect()),
        ),
        ("p_ne", p_ne.into()),
        ("p_ne_root_found", p_root.into()),
        ("p_act", opts.p_act.into()),
        ("p_ne_bayes", p_bayes.into()),
        ("poa", poa.poa.into()),
        ("worst_sigma", poa.worst_sigma.into()),
        ("social_cost_worst", poa.c_worst.into()),
        ("social_cost_opt", poa.c_opt.into()),
        ("poa_bound", poa.bound.is_finite().then_some(poa.bound).into()),
        ("beta_star", thresholds.map(|t| t.beta_star).into()),
        ("delta_star", thresholds.map(|t| t.delta_star).into()),
        ("less_is_more_k", lim.map(|l| l.k).into()),
        ("less_is_more_k_real", lim.map(|l| l.k_real).into()),
    ];

    if let Some(samples) = opts.samples {
        let seed = opts.seed.unwrap_or(0);
        let sim = monte_carlo_profile_parallel(&cfg, p_ne, samples, seed, MC_BATCHES)?;
        fields.extend([
            ("mc_samples", samples.into()),
            ("mc_seed", Cell::Num(seed as f64)),
            ("mc_social_cost", sim.mean_social_cost.into()),
            ("mc_social_cost_se", sim.std_error.into()),
            ("social_cost_mixed", social_cost_mixed(&cfg, p_ne)?.into()),
            ("mc_cost_public", sim.mean_cost_public_action.into()),
            ("mc_cost_public_se", sim.std_error_public.into()),
            ("cost_private", cost_private(&cfg).into()),
        ]);
    }

    let (header, row): (Vec<String>, Vec<Cell>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
    Output {
        header,
        rows: vec![row],
    }
    .write(opts.format, opts.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn curve(args: &CurveArgs) -> Result<i32> {
    let opts = args.common.resolve()?;
    let cfg = opts.figure_game()?;
    Output::from(social_cost_curve(&cfg, args.mode.into())?).write(opts.format, opts.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn sweep(args: &SweepArgs) -> Result<i32> {
    let opts = args.common.resolve()?;
    let mut baseline = Baseline::from_config(&opts.figure_game()?);
    baseline.p_act = opts.p_act;
    baseline.p = args.p;
    baseline.sigma = args.sigma;

    let figure = args.figure.is_some();
    let axes = if args.axes.is_empty() && figure {
        vec![
            Axis::new(SweepParam::Beta, 1.1, 16.0, 0.1)?,
            Axis::new(SweepParam::Delta, 1.0, 5.0, 0.1)?,
        ]
    } else {
        args.axes.clone()
    };
    let outputs = if args.metrics.is_empty() && figure {
        vec![Metric::Poa]
    } else {
        args.metrics.clone()
    };
    let table = run_sweep(&SweepSpec {
        baseline,
        axes,
        outputs,
    })?;
    Output::from(table).write(opts.format, opts.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn equilibrium_curve(args: &EquilibriumCurveArgs) -> Result<i32> {
    let opts = args.common.resolve()?;
    if opts.n.is_some() {
        bail!("equilibrium-curve takes its populations from --n-range, not --n");
    }
    let (_, r_default, c_default, beta, gamma) = FIGURE_DEFAULTS;
    let p_acts = match (&args.p_acts[..], opts.p_act) {
        ([], Some(p)) => vec![p],
        ([], None) => DEFAULT_P_ACTS.to_vec(),
        (list, _) => list.to_vec(),
    };
    let pricing = if args.pricing.is_empty() {
        vec![opts.pricing()?.unwrap_or((beta, gamma))]
    } else {
        args.pricing.clone()
    };
    let table = equilibrium_probability_curves(
        opts.r.unwrap_or(r_default),
        opts.c_pub.unwrap_or(c_default),
        &args.n_range,
        &p_acts,
        &pricing,
    )?;
    Output::from(table).write(opts.format, opts.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn verify(args: &VerifyArgs) -> Result<i32> {
    let defaults = VerifyGrid::default();
    let grid = VerifyGrid {
        n_min: args.n_min,
        n_max: args.n_max,
        betas: if args.betas.is_empty() {
            defaults.betas
        } else {
            args.betas.clone()
        },
        deltas: if args.deltas.is_empty() {
            defaults.deltas
        } else {
            args.deltas.clone()
        },
        sigma0_offset: args.corrupt_sigma0,
    };
    let report = run_verification(&grid)?;
    let rows = report
        .failures
        .iter()
        .map(|f| {
            vec![
                Cell::Text(f.config.clone()),
                Cell::Text(f.check.to_string()),
                Cell::Text(f.expected.clone()),
                Cell::Text(f.actual.clone()),
            ]
        })
        .collect();
    Output {
        header: ["config", "check", "expected", "actual"].map(String::from).to_vec(),
        rows,
    }
    .write(args.format.unwrap_or_default(), args.out.as_deref())?;
    eprintln!(
        "verify: {} configs, {} checks, {} failures",
        report.configs,
        report.checks,
        report.failures.len()
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
