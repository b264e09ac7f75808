//! Gauss-Legendre quadrature: fixed composite rules and an adaptive
//! bisection driver built on the same node set.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if !(2..=64).contains(&order) {
            return domain("GaussLegendre", format!("order {order} outside [2, 64]"));
        }
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_m
            let mut z = (PI * (i as f64 + 0.75) / (m + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, z);
                dp = d;
                let step = p / d;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[order - 1 - i] = z;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on `[lo, hi]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum();
        sum * half
    }
}

fn legendre_with_derivative(order: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=order {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let m = order as f64;
    (p1, m * (z * p1 - p0) / (z * z - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendreComposite,
    Adaptive,
}

/// A quadrature recipe: `panels` equal panels per interval, each integrated with
/// a `nodes_per_panel`-point Gauss-Legendre rule. The adaptive kind bisects a
/// panel until the two-halves estimate agrees with the whole-panel estimate to
/// within that panel's share of `abs_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: QuadratureKind,
    panels: usize,
    abs_tol: f64,
    rule: GaussLegendre,
}

const MAX_DEPTH: u32 = 48;

impl QuadratureRule {
    pub fn new(kind: QuadratureKind, panels: usize, nodes_per_panel: usize, abs_tol: f64) -> Result<Self> {
        if panels == 0 {
            return domain("QuadratureRule", "panels must be at least 1");
        }
        if !(abs_tol > 0.0) {
            return domain("QuadratureRule", format!("abs_tol = {abs_tol} must be positive"));
        }
        Ok(Self {
            kind,
            panels,
            abs_tol,
            rule: GaussLegendre::new(nodes_per_panel)?,
        })
    }

    pub fn composite(panels: usize, nodes_per_panel: usize) -> Result<Self> {
        Self::new(QuadratureKind::GaussLegendreComposite, panels, nodes_per_panel, 1e-12)
    }

    pub fn adaptive(nodes_per_panel: usize, abs_tol: f64) -> Result<Self> {
        Self::new(QuadratureKind::Adaptive, 4, nodes_per_panel, abs_tol)
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.rule.order()
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    /// `∫_lo^hi f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        self.integrate_with_cuts(f, lo, hi, &[])
    }

    /// `∫_lo^hi f` with panel boundaries forced at every cut inside `(lo, hi)`.
    ///
    /// Cuts are where the integrand is known to be non-smooth or sharply peaked.
    pub fn integrate_with_cuts<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64, cuts: &[f64]) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return domain("QuadratureRule::integrate", format!("bad interval [{lo}, {hi}]"));
        }
        if hi == lo {
            return Ok(0.0);
        }
        let mut edges = vec![lo];
        let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(hi);

        let total_len = hi - lo;
        let mut value = 0.0;
        let mut error = 0.0;
        for seg in edges.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let width = (b - a) / self.panels as f64;
            for p in 0..self.panels {
                let pa = a + width * p as f64;
                let pb = if p + 1 == self.panels { b } else { pa + width };
                match self.kind {
                    QuadratureKind::GaussLegendreComposite => value += self.rule.integrate(&f, pa, pb),
                    QuadratureKind::Adaptive => {
                        let tol = self.abs_tol * (pb - pa) / total_len;
                        let whole = self.rule.integrate(&f, pa, pb);
                        let (v, e) = self.bisect(&f, pa, pb, whole, tol, 0);
                        value += v;
                        error += e;
                    }
                }
            }
        }
        if error > self.abs_tol {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_estimate: error,
                tolerance: self.abs_tol,
            });
        }
        Ok(value)
    }

    fn bisect<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(f, a, mid);
        let right = self.rule.integrate(f, mid, b);
        let refined = left + right;
        let err = (refined - whole).abs();
        if err <= tol || depth >= MAX_DEPTH || mid <= a || mid >= b {
            let unresolved = if err <= tol { 0.0 } else { err };
            return (refined, unresolved);
        }
        let (lv, le) = self.bisect(f, a, mid, left, 0.5 * tol, depth + 1);
        let (rv, re) = self.bisect(f, mid, b, right, 0.5 * tol, depth + 1);
        (lv + rv, le + re)
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(QuadratureKind::Adaptive, 4, 20, 1e-13).expect("valid default rule")
    }
}
