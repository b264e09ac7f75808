//! Limit objects: the jump weight ν, the limit of the weighted operator at a
//! jump, the pointwise limit of the Lupaş operator along `k_n(α) = xn + α√n`,
//! and the standardized Beta density with its normal target.

use crate::error::{domain, Error, Result};
use crate::funcmodel::{JumpData, PiecewiseFunction};
use crate::operators::lupas_op;
use crate::quadrature::QuadratureRule;
use crate::specfun::{beta_pdf, log1pmx, normal_cdf, normal_pdf};

/// Below this `|r - 1|` the closed form for ν is replaced by its Taylor series.
pub const NU_SERIES_RADIUS: f64 = 1e-4;

/// Half-width of the Gaussian integration window, in standard deviations.
const GAUSS_WINDOW: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuPath {
    ClosedForm,
    UIntegral,
    GaussianIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuResult {
    pub nu: f64,
    /// `w(x+) / w(x-)`, possibly `+∞`.
    pub r: f64,
    pub path: NuPath,
}

/// `ν(r) = (r² - r(1 + ln r)) / (r - 1)²`, extended by continuity to `r = 0, 1, ∞`.
pub fn nu_closed_form(r: f64) -> Result<NuResult> {
    if r.is_nan() || r < 0.0 {
        return domain("nu_closed_form", format!("r = {r} must be nonnegative"));
    }
    if r == f64::INFINITY {
        return nu_from_integral(0.0, 1.0);
    }
    let nu = if r == 0.0 {
        0.0
    } else {
        let e = r - 1.0;
        if e.abs() < NU_SERIES_RADIUS {
            nu_series(e)
        } else {
            // r² - r - r ln r = -r (ln(1+e) - e)
            -r * log1pmx(e) / (e * e)
        }
    };
    Ok(NuResult {
        nu: nu.clamp(0.0, 1.0),
        r,
        path: NuPath::ClosedForm,
    })
}

/// `ν(1 + e) = ½ + Σ_{j≥1} (-1)^{j+1} e^j / ((j+1)(j+2))`.
fn nu_series(e: f64) -> f64 {
    let mut sum = 0.5;
    let mut pow = 1.0;
    for j in 1..=8 {
        pow *= -e;
        let j = j as f64;
        sum -= pow / ((j + 1.0) * (j + 2.0));
    }
    sum
}

fn check_weight_pair(func: &'static str, w_left: f64, w_right: f64) -> Result<f64> {
    if !(w_left >= 0.0 && w_right >= 0.0) || !w_left.is_finite() || !w_right.is_finite() {
        return domain(
            func,
            format!("weights ({w_left}, {w_right}) must be finite and nonnegative"),
        );
    }
    if w_left == 0.0 && w_right == 0.0 {
        return Err(Error::HypothesisViolation(format!(
            "{func}: both one-sided weight limits vanish"
        )));
    }
    Ok(if w_left == 0.0 { f64::INFINITY } else { w_right / w_left })
}

/// `ν = ∫₀¹ w₊(1-u) / (w₋u + w₊(1-u)) du` by adaptive quadrature.
pub fn nu_from_integral(w_left: f64, w_right: f64) -> Result<NuResult> {
    let r = check_weight_pair("nu_from_integral", w_left, w_right)?;
    let q = QuadratureRule::adaptive(20, 1e-13)?;
    let nu = q.integrate(
        |u| {
            let num = w_right * (1.0 - u);
            num / (w_left * u + num)
        },
        0.0,
        1.0,
    )?;
    Ok(NuResult {
        nu: nu.clamp(0.0, 1.0),
        r,
        path: NuPath::UIntegral,
    })
}

/// The same weight written against the `N(0, x(1-x))` law Ψ:
/// `∫ w₊Ψ(α) / (w₋Ψ(-α) + w₊Ψ(α)) dΨ(α)`, truncated at ±8σ.
pub fn nu_from_gaussian(w_left: f64, w_right: f64, x: f64) -> Result<NuResult> {
    let r = check_weight_pair("nu_from_gaussian", w_left, w_right)?;
    if !(x > 0.0 && x < 1.0) {
        return domain("nu_from_gaussian", format!("x = {x} outside (0, 1)"));
    }
    let var = x * (1.0 - x);
    let sd = var.sqrt();
    let q = QuadratureRule::adaptive(20, 1e-13)?;
    let cuts: Vec<f64> = [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0].iter().map(|c| c * sd).collect();
    let nu = q.integrate_with_cuts(
        |a| {
            let below = normal_cdf(-a, 0.0, var).expect("positive variance");
            let above = normal_cdf(a, 0.0, var).expect("positive variance");
            let num = w_right * above;
            let den = w_left * below + num;
            let dens = normal_pdf(a, 0.0, var).expect("positive variance");
            if den == 0.0 {
                0.0
            } else {
                num / den * dens
            }
        },
        -GAUSS_WINDOW * sd,
        GAUSS_WINDOW * sd,
        &cuts,
    )?;
    Ok(NuResult {
        nu: nu.clamp(0.0, 1.0),
        r,
        path: NuPath::GaussianIntegral,
    })
}

/// ν for the one-sided limits of a weight at a point.
pub fn nu_for_weight(w: &JumpData) -> Result<NuResult> {
    w.check_weight()?;
    if w.left == 0.0 {
        nu_from_integral(0.0, w.right)
    } else {
        nu_closed_form(w.ratio)
    }
}

/// `(1 - ν) f(x-) + ν f(x+)`, the limit of the weighted operator at `x`.
pub fn predicted_limit(f: &PiecewiseFunction, w: &PiecewiseFunction, x: f64) -> Result<f64> {
    let fj = f.one_sided_limits(x)?;
    let nu = nu_for_weight(&w.one_sided_limits(x)?)?.nu;
    Ok((1.0 - nu) * fj.left + nu * fj.right)
}

/// `Ψ(-α) f(x-) + (1 - Ψ(-α)) f(x+)` with Ψ the `N(0, x(1-x))` cdf.
pub fn lupas_limit_function(f: &PiecewiseFunction, x: f64, alpha: f64) -> Result<f64> {
    let fj = f.one_sided_limits(x)?;
    let var = x * (1.0 - x);
    let below = normal_cdf(-alpha, 0.0, var)?;
    let above = normal_cdf(alpha, 0.0, var)?;
    Ok(below * fj.left + above * fj.right)
}

/// Evaluation point `k_n(α)/n` with `k_n(α) = xn + α√n` clamped to `[0, n]`.
pub fn lupas_node(n: u64, x: f64, alpha: f64) -> f64 {
    let nf = n as f64;
    (x * nf + alpha * nf.sqrt()).clamp(0.0, nf) / nf
}

/// `sup_α |L_n(f)(k_n(α)/n) - lupas_limit_function(f, x, α)|` over `alphas`.
pub fn lupas_sup_error(f: &PiecewiseFunction, n: u64, x: f64, alphas: &[f64], q: &QuadratureRule) -> Result<f64> {
    let mut sup = 0.0f64;
    for &alpha in alphas {
        let value = lupas_op(f, n, lupas_node(n, x, alpha), q)?;
        sup = sup.max((value - lupas_limit_function(f, x, alpha)?).abs());
    }
    Ok(sup)
}

/// Shapes of `β_{r1,r2}` and the ratio γ they approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedBetaParams {
    r1: f64,
    r2: f64,
    gamma: f64,
}

impl StandardizedBetaParams {
    pub fn new(r1: f64, r2: f64, gamma: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
            return domain(
                "StandardizedBetaParams",
                format!("shapes ({r1}, {r2}) must be positive"),
            );
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return domain("StandardizedBetaParams", format!("gamma = {gamma} outside (0, 1)"));
        }
        Ok(Self { r1, r2, gamma })
    }

    /// `r1 = γ s`, `r2 = (1 - γ) s`.
    pub fn proportional(gamma: f64, scale: f64) -> Result<Self> {
        Self::new(gamma * scale, (1.0 - gamma) * scale, gamma)
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Variance `γ(1 - γ)` of the normal target.
    pub fn target_variance(&self) -> f64 {
        self.gamma * (1.0 - self.gamma)
    }
}

/// Density of `Y = √s (β_{r1,r2} - r1/s)` with `s = r1 + r2`; zero off the support.
pub fn standardized_beta_pdf(p: StandardizedBetaParams, y: f64) -> f64 {
    let s = p.r1 + p.r2;
    let root = s.sqrt();
    let t = p.r1 / s + y / root;
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    beta_pdf(p.r1, p.r2, t).expect("shapes validated") / root
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfErrorRow {
    pub scale: f64,
    pub sup_error: f64,
}

/// Sup over `grid` of `|f_Y - φ_{γ(1-γ)}|` for each scale on the proportional path.
pub fn pdf_convergence_check(gamma: f64, scales: &[f64], grid: &[f64]) -> Result<Vec<PdfErrorRow>> {
    if scales.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("pdf_convergence_check", "scales must be strictly increasing");
    }
    if grid.is_empty() {
        return domain("pdf_convergence_check", "grid is empty");
    }
    scales
        .iter()
        .map(|&scale| {
            let p = StandardizedBetaParams::proportional(gamma, scale)?;
            let var = p.target_variance();
            let mut sup = 0.0f64;
            for &y in grid {
                sup = sup.max((standardized_beta_pdf(p, y) - normal_pdf(y, 0.0, var)?).abs());
            }
            Ok(PdfErrorRow { scale, sup_error: sup })
        })
        .collect()
}
