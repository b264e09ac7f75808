//! The law `K_n(x, t) dt` as a Binomial-indexed mixture of Beta laws.
//!
//! With `C ~ Bin(n, x)` and, given `C = k`, `X ~ Beta(k+1, n-k+1)`, the
//! variable `X` has density `K_n(x, ·)`. Its cdf is therefore
//! `Σ_k p_{n,k}(x) I_z(k+1, n-k+1)`, which is what [`KernelDistribution::cdf`]
//! evaluates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma};

use crate::error::Result;
use crate::operators::{durrmeyer_kernel, OperatorPoint};
use crate::specfun::{bernstein_row, reg_inc_beta};
use crate::stats::{ks_distance, linspace, CdfFunction};

/// Variance `2x(1-x)` of the normal limit of `√n (X_n - x)`.
pub fn limit_variance(x: f64) -> f64 {
    2.0 * x * (1.0 - x)
}

/// `points` equally spaced values over `±6σ` of the normal limit.
pub fn default_ks_grid(x: f64, points: usize) -> Vec<f64> {
    let sd = limit_variance(x).sqrt();
    linspace(-6.0 * sd, 6.0 * sd, points)
}

/// Mixture components with a binomial weight below this are dropped; the cdf
/// error is at most `(n + 1)` times this.
const WEIGHT_CUTOFF: f64 = 1e-20;

/// Seed for the two-stage sampler. Independent streams are derived with
/// [`Seed::rng`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// ChaCha8 generator for `(seed, stream)`.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDistribution {
    point: OperatorPoint,
    /// First retained mixture index.
    k_lo: usize,
    /// Binomial weights `p_{n,k}(x)` for `k = k_lo, k_lo + 1, ...`.
    weights: Vec<f64>,
    /// `P(Bin(n, x) <= j - 1)` for `j = 0..=n+1`.
    binomial_cdf: Vec<f64>,
}

impl KernelDistribution {
    pub fn new(n: u64, x: f64) -> Result<Self> {
        Ok(Self::from_point(OperatorPoint::new(n, x)?))
    }

    pub fn from_point(point: OperatorPoint) -> Self {
        let row = bernstein_row(point.n(), point.x());
        let k_lo = row.iter().position(|&w| w >= WEIGHT_CUTOFF).unwrap_or(0);
        let k_hi = row.iter().rposition(|&w| w >= WEIGHT_CUTOFF).unwrap_or(row.len() - 1);
        let mut binomial_cdf = Vec::with_capacity(row.len() + 1);
        let mut acc = 0.0;
        binomial_cdf.push(0.0);
        for &w in &row {
            acc += w;
            binomial_cdf.push(acc.min(1.0));
        }
        *binomial_cdf.last_mut().expect("nonempty") = 1.0;
        Self {
            point,
            k_lo,
            weights: row[k_lo..=k_hi].to_vec(),
            binomial_cdf,
        }
    }

    pub fn n(&self) -> u64 {
        self.point.n()
    }

    pub fn x(&self) -> f64 {
        self.point.x()
    }

    pub fn point(&self) -> OperatorPoint {
        self.point
    }

    /// `P(X_n <= z)`.
    pub fn mixture_cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= 1.0 {
            return 1.0;
        }
        let n = self.n() as f64;
        let total: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let k = (self.k_lo + i) as f64;
                w * reg_inc_beta(z, k + 1.0, n - k + 1.0).expect("shapes and z are in range")
            })
            .sum();
        total.clamp(0.0, 1.0)
    }

    /// `P(X_n <= z)` through the identity `I_z(k+1, n-k+1) = P(Bin(n+1, z) > k)`,
    /// which makes the cdf a degree `n + 1` Bernstein polynomial in `z` with
    /// coefficients `P(Bin(n, x) <= j - 1)`. Evaluated by de Casteljau in
    /// `O(n²)`, so meant for moderate `n`.
    pub fn cdf_polynomial(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= 1.0 {
            return 1.0;
        }
        let mut b = self.binomial_cdf.clone();
        let zc = 1.0 - z;
        for len in (1..b.len()).rev() {
            for j in 0..len {
                b[j] = zc * b[j] + z * b[j + 1];
            }
        }
        b[0]
    }

    /// `P(√n (X_n - x) <= s)`.
    pub fn standardized_cdf(&self, s: f64) -> f64 {
        self.mixture_cdf(self.x() + s / (self.n() as f64).sqrt())
    }

    /// KS distance on `grid` between the standardized cdf and `N(0, 2x(1-x))`.
    pub fn ks_to_normal_limit(&self, grid: &[f64]) -> f64 {
        let exact = CdfFunction::exact(|s| self.standardized_cdf(s));
        let limit = CdfFunction::normal(0.0, limit_variance(self.x()));
        ks_distance(&exact, &limit, grid)
    }

    /// Density `K_n(x, z)`; zero outside `[0, 1]`.
    pub fn density(&self, z: f64) -> f64 {
        if !(0.0..=1.0).contains(&z) {
            return 0.0;
        }
        durrmeyer_kernel(self.point, z).expect("z is in [0, 1]")
    }

    /// Closed-form `(E X_n, Var X_n)`.
    ///
    /// The variance is `E[Var(X | C)] + Var(E[X | C])`, which sums to
    /// `(n+1)(2n x(1-x) + 1) / ((n+2)² (n+3))`.
    pub fn mixture_moments(&self) -> (f64, f64) {
        let n = self.n() as f64;
        let x = self.x();
        let mean = (n * x + 1.0) / (n + 2.0);
        let var = (n + 1.0) * (2.0 * n * x * (1.0 - x) + 1.0) / ((n + 2.0) * (n + 2.0) * (n + 3.0));
        (mean, var)
    }

    /// One draw: `k ~ Bin(n, x)`, then a Beta(k+1, n-k+1) variate as a ratio of Gammas.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n = self.n();
        let k = Binomial::new(n, self.x()).expect("x in (0, 1)").sample(rng);
        let g1 = Gamma::new((k + 1) as f64, 1.0).expect("shape >= 1").sample(rng);
        let g2 = Gamma::new((n - k + 1) as f64, 1.0).expect("shape >= 1").sample(rng);
        g1 / (g1 + g2)
    }

    /// `count` independent draws from stream 0 of `seed`.
    pub fn sample(&self, seed: Seed, count: usize) -> Vec<f64> {
        self.sample_stream(seed, 0, count)
    }

    pub fn sample_stream(&self, seed: Seed, stream: u64, count: usize) -> Vec<f64> {
        let mut rng = seed.rng(stream);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}
