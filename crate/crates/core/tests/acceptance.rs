//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails. Thresholds are pinned below and are not tuned per run.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use bdop_core::funcmodel::PiecewiseFunction;
use bdop_core::kernel_dist::{default_ks_grid, limit_variance, KernelDistribution, Seed};
use bdop_core::limits::{
    lupas_sup_error, nu_closed_form, nu_from_gaussian, nu_from_integral, pdf_convergence_check, predicted_limit,
};
use bdop_core::operators::{bernstein_op, durrmeyer_op, lupas_moment, lupas_op, weighted_durrmeyer_op, OperatorPoint};
use bdop_core::quadrature::QuadratureRule;
use bdop_core::specfun::bernstein_row;
use bdop_core::stats::{
    assert_decreasing_trend, assert_decreasing_trend_with_floor, dkw_bound, is_strictly_decreasing, ks_distance,
    linspace, CdfFunction, ConvergenceTable,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

// 1
const KS_NS: [u64; 4] = [64, 256, 1024, 4096];
const KS_XS: [f64; 3] = [0.2, 0.5, 0.8];
const KS_GRID_POINTS: usize = 4001;
const KS_FINAL_MAX: f64 = 0.02;
const KS_SECONDS_PER_X: f64 = 60.0;
// 2
const VAR_N: u64 = 10_000;
const VAR_XS: [f64; 2] = [0.3, 0.5];
const VAR_REL_TOL: f64 = 0.02;
// 3
const JUMP_NS: [u64; 3] = [128, 512, 2048];
const UNWEIGHTED_FINAL_MAX: f64 = 0.01;
/// M_n(step)(½) is ½ exactly for every n by symmetry; errors at or below this
/// are round-off and count as nonincreasing.
const ROUNDOFF_FLOOR: f64 = 1e-12;
// 4
const WEIGHTED_FINAL_MAX: f64 = 0.02;
// 5
const NU_RS: [f64; 8] = [0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 10.0, 100.0];
const NU_XS: [f64; 2] = [0.3, 0.7];
const NU_TOL: f64 = 1e-8;
// 6
const LUPAS_NS: [u64; 3] = [64, 256, 1024];
const LUPAS_ALPHA_POINTS: usize = 61;
// 7
const PDF_SCALES: [f64; 3] = [1e2, 1e3, 1e4];
const PDF_GAMMAS: [f64; 2] = [0.3, 0.5];
const PDF_FINAL_MAX: f64 = 0.01;
// 8
const MC_N: u64 = 50;
const MC_X: f64 = 0.4;
const MC_DRAWS: usize = 100_000;
const MC_SEEDS: u64 = 50;
const MC_MIN_INSIDE: usize = 48;
const MC_DELTA: f64 = 0.01;
// 9
const ALGEBRA_TOL: f64 = 1e-10;
const ALGEBRA_SECONDS: f64 = 300.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|d| format!("{d:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn kernel_normality() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for x in KS_XS {
        let start = Instant::now();
        let grid = default_ks_grid(x, KS_GRID_POINTS);
        let rows: Vec<(u64, f64)> = KS_NS
            .par_iter()
            .map(|&n| (n, KernelDistribution::new(n, x).unwrap().ks_to_normal_limit(&grid)))
            .collect();
        let secs = start.elapsed().as_secs_f64();
        let table = ConvergenceTable::new(format!("N(0, {})", limit_variance(x)), rows);
        let last = table.last().unwrap().distance;
        let ok = assert_decreasing_trend(&table, 0.0) && last < KS_FINAL_MAX && secs < KS_SECONDS_PER_X;
        pass &= ok;
        detail.push(format!("x={x}: ks={} ({secs:.1}s)", fmt_list(&table.distances())));
    }
    outcome(pass, detail.join("; "))
}

fn variance_constant() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for x in VAR_XS {
        let (_, var) = KernelDistribution::new(VAR_N, x).unwrap().mixture_moments();
        let scaled = VAR_N as f64 * var;
        let rel = (scaled / limit_variance(x) - 1.0).abs();
        pass &= rel <= VAR_REL_TOL;
        detail.push(format!("x={x}: n*Var={scaled:.6} rel.err={rel:.2e}"));
    }
    outcome(pass, detail.join("; "))
}

fn jump_table(f: &PiecewiseFunction, w: Option<&PiecewiseFunction>, target: f64) -> ConvergenceTable {
    let q = QuadratureRule::default();
    let rows: Vec<(u64, f64)> = JUMP_NS
        .iter()
        .map(|&n| {
            let p = OperatorPoint::new(n, 0.5).unwrap();
            let v = match w {
                Some(w) => weighted_durrmeyer_op(f, w, p, &q).unwrap(),
                None => durrmeyer_op(f, p, &q).unwrap(),
            };
            (n, (v - target).abs())
        })
        .collect();
    ConvergenceTable::new(format!("{target}"), rows)
}

fn unweighted_jump_limit() -> Outcome {
    let f = PiecewiseFunction::step(0.5, 0.0, 1.0).unwrap();
    let one = PiecewiseFunction::constant(1.0);
    let target = predicted_limit(&f, &one, 0.5).unwrap();
    let t = jump_table(&f, None, target);
    let last = t.last().unwrap().distance;
    let pass =
        target == 0.5 && last < UNWEIGHTED_FINAL_MAX && assert_decreasing_trend_with_floor(&t, 0.0, ROUNDOFF_FLOOR);
    outcome(pass, format!("|M_n - 1/2| = {}", fmt_list(&t.distances())))
}

fn weighted_limit() -> Outcome {
    let f = PiecewiseFunction::step(0.5, 0.0, 1.0).unwrap();
    let w = PiecewiseFunction::step(0.5, 1.0, 2.0).unwrap();
    let target = predicted_limit(&f, &w, 0.5).unwrap();
    let exact = 2.0 - 2.0 * std::f64::consts::LN_2;
    let t = jump_table(&f, Some(&w), target);
    let last = t.last().unwrap().distance;
    let pass = (target - exact).abs() < 1e-12 && last < WEIGHTED_FINAL_MAX && assert_decreasing_trend(&t, 0.0);
    outcome(
        pass,
        format!("limit {target:.10}, |M_nw - limit| = {}", fmt_list(&t.distances())),
    )
}

fn nu_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for r in NU_RS {
        let c = nu_closed_form(r).unwrap().nu;
        let u = nu_from_integral(1.0, r).unwrap().nu;
        worst = worst.max((c - u).abs());
        let gs: Vec<f64> = NU_XS.iter().map(|&x| nu_from_gaussian(1.0, r, x).unwrap().nu).collect();
        for &g in &gs {
            worst = worst.max((g - u).abs()).max((g - c).abs());
        }
        worst = worst.max((gs[0] - gs[1]).abs());
    }
    outcome(
        worst <= NU_TOL,
        format!("max discrepancy {worst:.2e} over {} ratios", NU_RS.len()),
    )
}

fn lupas_uniform() -> Outcome {
    let f = PiecewiseFunction::step(0.5, 0.0, 1.0).unwrap();
    let alphas = linspace(-3.0, 3.0, LUPAS_ALPHA_POINTS);
    let q = QuadratureRule::default();
    let rows: Vec<(u64, f64)> = LUPAS_NS
        .iter()
        .map(|&n| (n, lupas_sup_error(&f, n, 0.5, &alphas, &q).unwrap()))
        .collect();
    let t = ConvergenceTable::new("lupas limit", rows);
    outcome(
        assert_decreasing_trend(&t, 0.0),
        format!("sup error = {}", fmt_list(&t.distances())),
    )
}

fn standardized_pdf() -> Outcome {
    let grid = linspace(-3.0, 3.0, 601);
    let mut pass = true;
    let mut detail = Vec::new();
    for gamma in PDF_GAMMAS {
        let rows = pdf_convergence_check(gamma, &PDF_SCALES, &grid).unwrap();
        let t = ConvergenceTable::new("pdf", rows.iter().map(|r| (r.scale as u64, r.sup_error)));
        pass &= is_strictly_decreasing(&t);
        if gamma == 0.5 {
            pass &= rows.last().unwrap().sup_error < PDF_FINAL_MAX;
        }
        detail.push(format!("gamma={gamma}: {}", fmt_list(&t.distances())));
    }
    outcome(pass, detail.join("; "))
}

fn sampler_fidelity() -> Outcome {
    let d = KernelDistribution::new(MC_N, MC_X).unwrap();
    let band = dkw_bound(MC_DRAWS, MC_DELTA);
    let grid = linspace(0.0, 1.0, 101);
    let distances: Vec<f64> = (0..MC_SEEDS)
        .into_par_iter()
        .map(|s| {
            let draws = d.sample(Seed(s), MC_DRAWS);
            let e = CdfFunction::empirical(&draws).unwrap();
            let exact = CdfFunction::exact(|z| d.cdf_polynomial(z));
            ks_distance(&e, &exact, &grid)
        })
        .collect();
    let inside = distances.iter().filter(|&&v| v <= band).count();
    let worst = distances.iter().copied().fold(0.0, f64::max);
    outcome(
        inside >= MC_MIN_INSIDE,
        format!("{inside}/{MC_SEEDS} seeds inside band {band:.5} (worst {worst:.5})"),
    )
}

fn operator_algebra() -> Outcome {
    let start = Instant::now();
    let q = QuadratureRule::default();
    let mut failures = Vec::new();

    for n in 0..=200u64 {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let s: f64 = bernstein_row(n, t).iter().sum();
            if (s - 1.0).abs() >= 1e-12 {
                failures.push(format!("partition n={n} t={t}"));
            }
        }
    }

    let one = PiecewiseFunction::constant(1.0);
    let w_step = PiecewiseFunction::step(0.5, 1.0, 2.0).unwrap();
    let points: Vec<OperatorPoint> = [1u64, 7, 64, 512, 2048]
        .iter()
        .flat_map(|&n| [0.01, 0.3, 0.5, 0.77, 0.99].map(move |x| OperatorPoint::new(n, x).unwrap()))
        .collect();
    for &p in &points {
        let vals = [
            bernstein_op(&one, p).unwrap(),
            durrmeyer_op(&one, p, &q).unwrap(),
            weighted_durrmeyer_op(&one, &w_step, p, &q).unwrap(),
            lupas_op(&one, p.n(), p.x(), &q).unwrap(),
        ];
        if vals.iter().any(|v| (v - 1.0).abs() > ALGEBRA_TOL) {
            failures.push(format!("constants n={} x={}", p.n(), p.x()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..40 {
        let cf = common::breakpoints(&mut rng, 3);
        let ch = common::breakpoints(&mut rng, 2);
        let f = common::signed_function(&mut rng, &cf);
        let h = common::nonnegative_function(&mut rng, &ch);
        let g = common::add(&f, &h);
        let w = common::nonnegative_function(&mut rng, &[0.5]);
        let p = points[case % points.len()];
        let tol = 1e-12 * (f.sup_bound() + g.sup_bound());
        let ops = |u: &PiecewiseFunction| {
            [
                bernstein_op(u, p).unwrap(),
                durrmeyer_op(u, p, &q).unwrap(),
                weighted_durrmeyer_op(u, &w, p, &q).unwrap(),
                lupas_op(u, p.n(), p.x(), &q).unwrap(),
            ]
        };
        let (of, og, oh) = (ops(&f), ops(&g), ops(&h));
        if oh.iter().any(|&v| v < -1e-12 * h.sup_bound()) {
            failures.push(format!("positivity case {case}"));
        }
        if of.iter().zip(&og).any(|(a, b)| *a > b + tol) {
            failures.push(format!("monotonicity case {case}"));
        }
        let plain = durrmeyer_op(&f, p, &q).unwrap();
        let reduced = weighted_durrmeyer_op(&f, &one, p, &q).unwrap();
        if (plain - reduced).abs() > ALGEBRA_TOL {
            failures.push(format!("weighted reduction case {case}"));
        }
    }

    for n in [1u64, 10, 100, 250, 500] {
        for y in [0.0, 0.13, 0.5, 0.91, 1.0] {
            for m in 0..=6u32 {
                let mut c = vec![0.0; m as usize + 1];
                c[m as usize] = 1.0;
                let f = PiecewiseFunction::polynomial(c).unwrap();
                let got = lupas_op(&f, n, y, &q).unwrap();
                if (got - lupas_moment(n, y, m).unwrap()).abs() > ALGEBRA_TOL {
                    failures.push(format!("lupas moment n={n} y={y} m={m}"));
                }
            }
        }
    }

    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < ALGEBRA_SECONDS;
    let detail = if failures.is_empty() {
        format!("all checks green ({secs:.1}s)")
    } else {
        format!("{} failures, first: {} ({secs:.1}s)", failures.len(), failures[0])
    };
    outcome(pass, detail)
}

type Check = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Check; 9] = [
        ("kernel normality (KS trend, n=4096 < 0.02)", kernel_normality),
        ("variance constant n*Var ~ 2x(1-x)", variance_constant),
        ("unweighted jump limit 1/2", unweighted_jump_limit),
        ("weighted jump limit 2 - 2 ln 2", weighted_limit),
        ("three-path nu agreement", nu_agreement),
        ("Lupas uniform convergence", lupas_uniform),
        ("standardized Beta pdf convergence", standardized_pdf),
        ("sampler inside DKW band", sampler_fidelity),
        ("operator algebra suite", operator_algebra),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} -- {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
