//! The five experiments. Rows for different `n` (or γ, or r) are independent
//! and computed in parallel on the current rayon pool; row order follows the
//! config.

use bdop_core::funcmodel::PiecewiseFunction;
use bdop_core::kernel_dist::{default_ks_grid, limit_variance, KernelDistribution, Seed};
use bdop_core::limits::{
    lupas_sup_error, nu_closed_form, nu_from_gaussian, nu_from_integral, pdf_convergence_check, predicted_limit,
};
use bdop_core::operators::{weighted_durrmeyer_op, OperatorPoint};
use bdop_core::quadrature::QuadratureRule;
use bdop_core::stats::{
    assert_decreasing_trend, assert_decreasing_trend_with_floor, dkw_bound, ks_distance, linspace, CdfFunction,
    ConvergenceTable,
};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::report::{Cell, ExperimentReport};

pub const DEFAULT_KS_POINTS: usize = 4001;
pub const DEFAULT_KS_TOLERANCE: f64 = 0.02;
pub const DEFAULT_BV_TOLERANCE: f64 = 0.02;
pub const DEFAULT_NU_TOLERANCE: f64 = 1e-8;
/// Confidence level of the DKW band in the Monte Carlo column.
pub const DKW_DELTA: f64 = 0.01;
/// Errors at or below this are treated as round-off when checking a trend.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// `(n, ks_exact, Some((ks_mc, dkw_bound)))`.
type NormalityRow = (u64, f64, Option<(f64, f64)>);

pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    if let Some(declared) = cfg.experiment {
        if declared != experiment {
            return Err(CliError::Config {
                line: None,
                msg: format!(
                    "config declares experiment '{}' but '{}' was requested",
                    declared.name(),
                    experiment.name()
                ),
            });
        }
    }
    match experiment {
        Experiment::KernelNormality => run_kernel_normality(cfg),
        Experiment::BvLimit => run_bv_limit(cfg),
        Experiment::LupasLimit => run_lupas_limit(cfg),
        Experiment::BetaPdf => run_beta_pdf(cfg),
        Experiment::NuTable => run_nu_table(cfg),
    }
}

fn require_x(cfg: &ExperimentConfig, e: Experiment) -> Result<f64, CliError> {
    cfg.x.ok_or_else(|| CliError::missing("x", e.name()))
}

fn require_ns(cfg: &ExperimentConfig, e: Experiment) -> Result<&[u64], CliError> {
    if cfg.n_values.is_empty() {
        return Err(CliError::missing("n_values", e.name()));
    }
    Ok(&cfg.n_values)
}

fn require_f(cfg: &ExperimentConfig, e: Experiment) -> Result<&PiecewiseFunction, CliError> {
    cfg.f.as_ref().ok_or_else(|| CliError::missing("[f]", e.name()))
}

pub fn run_kernel_normality(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let e = Experiment::KernelNormality;
    let x = require_x(cfg, e)?;
    let ns = require_ns(cfg, e)?;
    let grid = match cfg.grid {
        Some(g) => g.values(),
        None => default_ks_grid(x, DEFAULT_KS_POINTS),
    };
    let mc = cfg.mc_samples;
    let seed = Seed(cfg.seed);
    let rows: Vec<NormalityRow> = ns
        .par_iter()
        .map(|&n| -> Result<_, CliError> {
            let d = KernelDistribution::new(n, x)?;
            let exact = d.ks_to_normal_limit(&grid);
            let mc_cols = if mc > 0 {
                let root = (n as f64).sqrt();
                let draws: Vec<f64> = d.sample_stream(seed, n, mc).iter().map(|v| root * (v - x)).collect();
                let emp = CdfFunction::empirical(&draws)?;
                let limit = CdfFunction::normal(0.0, limit_variance(x));
                Some((ks_distance(&emp, &limit, &grid), dkw_bound(mc, DKW_DELTA)))
            } else {
                None
            };
            Ok((n, exact, mc_cols))
        })
        .collect::<Result<_, _>>()?;

    let header = if mc > 0 {
        vec!["n", "ks_exact", "ks_mc", "dkw_bound"]
    } else {
        vec!["n", "ks_exact"]
    };
    let mut report = ExperimentReport::new(e, header);
    for &(n, exact, mc_cols) in &rows {
        let mut row = vec![Cell::Int(n), Cell::Real(exact)];
        if let Some((ks_mc, band)) = mc_cols {
            row.extend([Cell::Real(ks_mc), Cell::Real(band)]);
        }
        report.rows.push(row);
    }
    let table = ConvergenceTable::new("N(0, 2x(1-x))", rows.iter().map(|r| (r.0, r.1)));
    let tol = cfg.tolerance.unwrap_or(DEFAULT_KS_TOLERANCE);
    report.check("ks_exact nonincreasing in n", assert_decreasing_trend(&table, 0.0));
    report.check(
        format!("ks_exact at largest n below {tol}"),
        table.last().is_some_and(|r| r.distance < tol),
    );
    if mc > 0 {
        let ok = rows
            .iter()
            .all(|&(_, exact, m)| m.is_some_and(|(ks_mc, band)| (ks_mc - exact).abs() <= band));
        report.check("|ks_mc - ks_exact| within the 99% DKW band", ok);
    }
    Ok(report)
}

pub fn run_bv_limit(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let e = Experiment::BvLimit;
    let x = require_x(cfg, e)?;
    let ns = require_ns(cfg, e)?;
    let f = require_f(cfg, e)?;
    let one = PiecewiseFunction::constant(1.0);
    let w = cfg.w.as_ref().unwrap_or(&one);
    let limit = predicted_limit(f, w, x)?;
    let q = QuadratureRule::default();
    let values: Vec<f64> = ns
        .par_iter()
        .map(|&n| Ok(weighted_durrmeyer_op(f, w, OperatorPoint::new(n, x)?, &q)?))
        .collect::<Result<_, CliError>>()?;

    let mut report = ExperimentReport::new(e, vec!["n", "M_nw_value", "predicted_limit", "abs_error"]);
    let mut table = ConvergenceTable::new(format!("{limit}"), []);
    for (&n, &v) in ns.iter().zip(&values) {
        let err = (v - limit).abs();
        table.push(n, err);
        report
            .rows
            .push(vec![Cell::Int(n), Cell::Real(v), Cell::Real(limit), Cell::Real(err)]);
    }
    let tol = cfg.tolerance.unwrap_or(DEFAULT_BV_TOLERANCE);
    report.check(
        "abs_error nonincreasing in n",
        assert_decreasing_trend_with_floor(&table, 0.0, ROUNDOFF_FLOOR),
    );
    report.check(
        format!("abs_error at largest n below {tol}"),
        table.last().is_some_and(|r| r.distance < tol),
    );
    Ok(report)
}

pub fn run_lupas_limit(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let e = Experiment::LupasLimit;
    let x = require_x(cfg, e)?;
    let ns = require_ns(cfg, e)?;
    let f = require_f(cfg, e)?;
    let alphas = match cfg.grid {
        Some(g) => g.values(),
        None => linspace(-3.0, 3.0, 61),
    };
    let q = QuadratureRule::default();
    let errors: Vec<f64> = ns
        .par_iter()
        .map(|&n| Ok(lupas_sup_error(f, n, x, &alphas, &q)?))
        .collect::<Result<_, CliError>>()?;

    let mut report = ExperimentReport::new(e, vec!["n", "sup_error"]);
    let table = ConvergenceTable::new("lupas limit", ns.iter().copied().zip(errors.iter().copied()));
    for (&n, &err) in ns.iter().zip(&errors) {
        report.rows.push(vec![Cell::Int(n), Cell::Real(err)]);
    }
    report.check(
        "sup_error nonincreasing in n",
        assert_decreasing_trend_with_floor(&table, 0.0, ROUNDOFF_FLOOR),
    );
    if let Some(tol) = cfg.tolerance {
        report.check(
            format!("sup_error at largest n below {tol}"),
            table.last().is_some_and(|r| r.distance < tol),
        );
    }
    Ok(report)
}

pub fn run_beta_pdf(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let e = Experiment::BetaPdf;
    if cfg.gammas.is_empty() {
        return Err(CliError::missing("gammas", e.name()));
    }
    if cfg.scales.is_empty() {
        return Err(CliError::missing("scales", e.name()));
    }
    let grid = match cfg.grid {
        Some(g) => g.values(),
        None => linspace(-3.0, 3.0, 601),
    };
    let tables: Vec<_> = cfg
        .gammas
        .par_iter()
        .map(|&g| pdf_convergence_check(g, &cfg.scales, &grid))
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport::new(e, vec!["gamma", "scale", "sup_error"]);
    for (&gamma, rows) in cfg.gammas.iter().zip(&tables) {
        for r in rows {
            report
                .rows
                .push(vec![Cell::Real(gamma), Cell::Real(r.scale), Cell::Real(r.sup_error)]);
        }
        report.check(
            format!("gamma={gamma}: sup_error strictly decreasing in scale"),
            rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error),
        );
        if let Some(tol) = cfg.tolerance {
            report.check(
                format!("gamma={gamma}: sup_error at largest scale below {tol}"),
                rows.last().is_some_and(|r| r.sup_error < tol),
            );
        }
    }
    Ok(report)
}

fn weights_for(r: f64) -> (f64, f64) {
    if r.is_infinite() {
        (0.0, 1.0)
    } else {
        (1.0, r)
    }
}

pub fn run_nu_table(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let e = Experiment::NuTable;
    if cfg.r_values.is_empty() {
        return Err(CliError::missing("r_values", e.name()));
    }
    let x = cfg.x.unwrap_or(0.5);
    let rows: Vec<[f64; 5]> = cfg
        .r_values
        .par_iter()
        .map(|&r| {
            let (wl, wr) = weights_for(r);
            let c = nu_closed_form(r)?.nu;
            let u = nu_from_integral(wl, wr)?.nu;
            let g = nu_from_gaussian(wl, wr, x)?.nu;
            let worst = (c - u).abs().max((u - g).abs()).max((c - g).abs());
            Ok([r, c, u, g, worst])
        })
        .collect::<Result<_, CliError>>()?;

    let mut report = ExperimentReport::new(
        e,
        vec!["r", "nu_closed", "nu_integral", "nu_gaussian", "max_discrepancy"],
    );
    for row in &rows {
        report.rows.push(row.iter().map(|&v| Cell::Real(v)).collect());
    }
    let tol = cfg.tolerance.unwrap_or(DEFAULT_NU_TOLERANCE);
    report.check(
        format!("max_discrepancy at most {tol:e}"),
        rows.iter().all(|r| r[4] <= tol),
    );
    Ok(report)
}
