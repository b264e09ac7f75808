//! Distribution comparison: empirical cdfs, Kolmogorov-Smirnov distances on a
//! declared grid, and convergence tables.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::specfun::normal_cdf;

/// Right-continuous empirical cdf of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `F(x-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    /// Sorted sample values (the jump locations, with repeats).
    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfKind {
    Exact,
    Empirical,
}

/// A cumulative distribution function: either a continuous closed-form map or
/// an empirical step function.
pub enum CdfFunction<'a> {
    Exact(Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>),
    Empirical(Ecdf),
}

impl<'a> CdfFunction<'a> {
    pub fn exact(f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        CdfFunction::Exact(Box::new(f))
    }

    /// Cdf of `N(mean, variance)`; panics if `variance <= 0`.
    pub fn normal(mean: f64, variance: f64) -> Self {
        assert!(variance > 0.0, "normal variance must be positive");
        Self::exact(move |z| normal_cdf(z, mean, variance).expect("variance checked"))
    }

    pub fn empirical(samples: &[f64]) -> Result<Self> {
        Ok(CdfFunction::Empirical(Ecdf::new(samples)?))
    }

    pub fn kind(&self) -> CdfKind {
        match self {
            CdfFunction::Exact(_) => CdfKind::Exact,
            CdfFunction::Empirical(_) => CdfKind::Empirical,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CdfFunction::Exact(f) => f(x),
            CdfFunction::Empirical(e) => e.eval(x),
        }
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        match self {
            CdfFunction::Exact(f) => f(x),
            CdfFunction::Empirical(e) => e.eval_left(x),
        }
    }

    fn jump_points(&self) -> &[f64] {
        match self {
            CdfFunction::Exact(_) => &[],
            CdfFunction::Empirical(e) => e.samples(),
        }
    }
}

/// Empirical cdf of `samples`.
pub fn ecdf(samples: &[f64]) -> Result<CdfFunction<'static>> {
    CdfFunction::empirical(samples)
}

/// `max |a - b|` over `grid` and, for empirical cdfs, over both sides of every jump.
pub fn ks_distance(a: &CdfFunction<'_>, b: &CdfFunction<'_>, grid: &[f64]) -> f64 {
    let mut sup = grid.iter().map(|&x| (a.eval(x) - b.eval(x)).abs()).fold(0.0, f64::max);
    for jumps in [a.jump_points(), b.jump_points()] {
        let mut prev = f64::NAN;
        for &p in jumps {
            if p == prev {
                continue;
            }
            prev = p;
            let (av, bv) = (a.eval(p), b.eval(p));
            let al = if a.kind() == CdfKind::Empirical {
                a.eval_left(p)
            } else {
                av
            };
            let bl = if b.kind() == CdfKind::Empirical {
                b.eval_left(p)
            } else {
                bv
            };
            sup = sup.max((av - bv).abs()).max((al - bl).abs());
        }
    }
    sup
}

/// Dvoretzky-Kiefer-Wolfowitz band half-width `√(ln(2/δ) / (2m))`.
pub fn dkw_bound(m: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * m as f64)).sqrt()
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub distance: f64,
}

/// Distances to a limit object, indexed by `n` and kept sorted by `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
    target_description: String,
}

impl ConvergenceTable {
    pub fn new(target_description: impl Into<String>, rows: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = rows
            .into_iter()
            .map(|(n, distance)| ConvergenceRow { n, distance })
            .collect();
        rows.sort_by_key(|r| r.n);
        Self {
            rows,
            target_description: target_description.into(),
        }
    }

    pub fn push(&mut self, n: u64, distance: f64) {
        let at = self.rows.partition_point(|r| r.n <= n);
        self.rows.insert(at, ConvergenceRow { n, distance });
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    pub fn target_description(&self) -> &str {
        &self.target_description
    }

    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }

    pub fn last(&self) -> Option<ConvergenceRow> {
        self.rows.last().copied()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,distance\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.16e}", r.n, r.distance);
        }
        out
    }
}

/// True iff every distance is at most `previous * (1 + slack)`.
pub fn assert_decreasing_trend(t: &ConvergenceTable, slack: f64) -> bool {
    assert_decreasing_trend_with_floor(t, slack, 0.0)
}

/// As [`assert_decreasing_trend`], but a distance at or below `floor` (round-off
/// level for quantities that are exactly zero) always passes.
pub fn assert_decreasing_trend_with_floor(t: &ConvergenceTable, slack: f64, floor: f64) -> bool {
    t.rows
        .windows(2)
        .all(|w| w[1].distance <= w[0].distance * (1.0 + slack) || w[1].distance <= floor)
}

/// True iff every distance is strictly below the previous one.
pub fn is_strictly_decreasing(t: &ConvergenceTable) -> bool {
    t.rows.windows(2).all(|w| w[1].distance < w[0].distance)
}
