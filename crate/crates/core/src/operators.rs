//! Bernstein, Bernstein-Durrmeyer, weighted Bernstein-Durrmeyer and Lupaş
//! Beta operators.
//!
//! Every integral against a Bernstein basis function is an expectation under a
//! Beta law, `(n+1) ∫ f p_{n,k} = E f(B)` with `B ~ Beta(k+1, n-k+1)`, and is
//! evaluated by [`beta_expectation`]. Polynomial pieces (steps included) are
//! integrated in closed form from Beta moments and incomplete-Beta
//! differences; any other piece falls back to quadrature on panels aligned to
//! the piece boundaries and to the bulk of the Beta density.

use crate::error::{domain, Error, Result};
use crate::funcmodel::{Piece, PiecewiseFunction};
use crate::quadrature::QuadratureRule;
use crate::specfun::{bernstein_row, beta_interval_mass, beta_pdf};

/// Degree `n` and evaluation point `x` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorPoint {
    n: u64,
    x: f64,
}

impl OperatorPoint {
    pub fn new(n: u64, x: f64) -> Result<Self> {
        if n == 0 {
            return domain("OperatorPoint", "n must be at least 1");
        }
        if !(x > 0.0 && x < 1.0) {
            return domain("OperatorPoint", format!("x = {x} outside (0, 1)"));
        }
        Ok(Self { n, x })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// `E[t^m]` for `t ~ Beta(a, b)`.
fn beta_raw_moment(a: f64, b: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (a + j as f64) / (a + b + j as f64))
}

/// `E[piece(B) 1{lo < B <= hi}]` for `B ~ Beta(a, b)`.
fn piece_expectation(piece: &Piece, lo: f64, hi: f64, a: f64, b: f64, quad: &QuadratureRule) -> Result<f64> {
    if let Some(poly) = piece.as_polynomial() {
        // t^m Beta(a, b)-density = E[t^m] * Beta(a + m, b)-density
        let mut total = 0.0;
        for (m, &c) in poly.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            total += c * beta_raw_moment(a, b, m) * beta_interval_mass(lo, hi, a + m as f64, b)?;
        }
        return Ok(total);
    }
    let mean = a / (a + b);
    let sd = (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt();
    let cuts: Vec<f64> = [0.0, -1.0, 1.0, -3.0, 3.0, -6.0, 6.0, -12.0, 12.0]
        .iter()
        .map(|s| mean + s * sd)
        .collect();
    quad.integrate_with_cuts(|t| piece.eval(t) * beta_pdf(a, b, t).unwrap_or(0.0), lo, hi, &cuts)
}

/// `E f(B)` for `B ~ Beta(a, b)`.
pub fn beta_expectation(f: &PiecewiseFunction, a: f64, b: f64, quad: &QuadratureRule) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain("beta_expectation", format!("shapes a = {a}, b = {b} must be positive"));
    }
    f.intervals()
        .map(|(lo, hi, piece)| piece_expectation(piece, lo, hi, a, b, quad))
        .sum()
}

/// `B_n(f)(x) = Σ_k p_{n,k}(x) f(k/n)`.
pub fn bernstein_op(f: &PiecewiseFunction, p: OperatorPoint) -> Result<f64> {
    let n = p.n as f64;
    let mut total = 0.0;
    for (k, w) in bernstein_row(p.n, p.x).into_iter().enumerate() {
        total += w * f.eval(k as f64 / n)?;
    }
    Ok(total)
}

/// Durrmeyer kernel `K_n(x, t) = (n+1) Σ_k p_{n,k}(x) p_{n,k}(t)`.
pub fn durrmeyer_kernel(p: OperatorPoint, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return domain("durrmeyer_kernel", format!("t = {t} outside [0, 1]"));
    }
    let row_x = bernstein_row(p.n, p.x);
    let row_t = bernstein_row(p.n, t);
    let s: f64 = row_x.iter().zip(&row_t).map(|(a, b)| a * b).sum();
    Ok((p.n as f64 + 1.0) * s)
}

/// `M_n(f)(x) = ∫ f(t) K_n(x, t) dt = Σ_k p_{n,k}(x) E f(B_{n,k})`.
pub fn durrmeyer_op(f: &PiecewiseFunction, p: OperatorPoint, q: &QuadratureRule) -> Result<f64> {
    let n = p.n as f64;
    let mut total = 0.0;
    for (k, w) in bernstein_row(p.n, p.x).into_iter().enumerate() {
        let k = k as f64;
        total += w * beta_expectation(f, k + 1.0, n - k + 1.0, q)?;
    }
    Ok(total)
}

/// Smallest admissible `∫ p_{n,k} w`.
pub const MIN_WEIGHT_DENOMINATOR: f64 = 1e-300;

/// `M_{n,w}(f)(x) = Σ_k p_{n,k}(x) ∫ f p_{n,k} w / ∫ p_{n,k} w`.
pub fn weighted_durrmeyer_op(
    f: &PiecewiseFunction,
    w: &PiecewiseFunction,
    p: OperatorPoint,
    q: &QuadratureRule,
) -> Result<f64> {
    if w.sampled_min(256) < 0.0 {
        return Err(Error::HypothesisViolation("weight takes negative values".into()));
    }
    let fw = f.product(w);
    let n = p.n as f64;
    let mut total = 0.0;
    for (k, basis) in bernstein_row(p.n, p.x).into_iter().enumerate() {
        let kf = k as f64;
        let (a, b) = (kf + 1.0, n - kf + 1.0);
        // E_w = (n+1) ∫ w p_{n,k}
        let den = beta_expectation(w, a, b, q)?;
        let raw = den / (n + 1.0);
        if !(raw >= MIN_WEIGHT_DENOMINATOR) {
            return Err(Error::DegenerateWeight { k, value: raw });
        }
        let num = beta_expectation(&fw, a, b, q)?;
        total += basis * (num / den);
    }
    Ok(total)
}

/// Lupaş Beta operator: `E f(B)` with `B ~ Beta(ny+1, n(1-y)+1)`.
pub fn lupas_op(f: &PiecewiseFunction, n: u64, y: f64, q: &QuadratureRule) -> Result<f64> {
    check_lupas_args(n, y)?;
    let n = n as f64;
    beta_expectation(f, n * y + 1.0, n * (1.0 - y) + 1.0, q)
}

/// `m`-th moment of Beta(ny+1, n(1-y)+1): `Π_{j<m} (ny+1+j)/(n+2+j)`.
pub fn lupas_moment(n: u64, y: f64, m: u32) -> Result<f64> {
    check_lupas_args(n, y)?;
    let n = n as f64;
    Ok((0..m).fold(1.0, |acc, j| acc * (n * y + 1.0 + j as f64) / (n + 2.0 + j as f64)))
}

fn check_lupas_args(n: u64, y: f64) -> Result<()> {
    if n == 0 {
        return domain("lupas_op", "n must be at least 1");
    }
    if !(0.0..=1.0).contains(&y) {
        return domain("lupas_op", format!("y = {y} outside [0, 1]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{ClosedForm, Elementary};

    fn quad() -> QuadratureRule {
        QuadratureRule::default()
    }

    fn pt(n: u64, x: f64) -> OperatorPoint {
        OperatorPoint::new(n, x).unwrap()
    }

    #[test]
    fn operator_point_validation() {
        assert!(OperatorPoint::new(0, 0.5).is_err());
        assert!(OperatorPoint::new(3, 0.0).is_err());
        assert!(OperatorPoint::new(3, 1.0).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let one = PiecewiseFunction::constant(1.0);
        for (n, x) in [(1, 0.2), (17, 0.5), (300, 0.9)] {
            assert!((bernstein_op(&one, pt(n, x)).unwrap() - 1.0).abs() < 1e-13);
        }
        let id = PiecewiseFunction::identity();
        assert!((bernstein_op(&id, pt(50, 0.3)).unwrap() - 0.3).abs() < 1e-14);
        let sq = PiecewiseFunction::polynomial(vec![0.0, 0.0, 1.0]).unwrap();
        assert!((bernstein_op(&sq, pt(10, 0.5)).unwrap() - 0.275).abs() < 1e-14);
    }

    #[test]
    fn bernstein_second_moment_by_direct_summation() {
        // Σ C(n,k) x^k (1-x)^{n-k} (k/n)² with plain binomial coefficients
        let (n, x) = (10u64, 0.5f64);
        let mut choose = 1.0;
        let mut want = 0.0;
        for k in 0..=n {
            if k > 0 {
                choose *= (n - k + 1) as f64 / k as f64;
            }
            let kf = k as f64;
            want += choose * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32) * (kf / n as f64).powi(2);
        }
        let sq = PiecewiseFunction::polynomial(vec![0.0, 0.0, 1.0]).unwrap();
        let got = bernstein_op(&sq, pt(n, x)).unwrap();
        assert!((got - want).abs() < 1e-14, "{got} {want}");
    }

    #[test]
    fn kernel_examples() {
        let k = durrmeyer_kernel(pt(1, 0.5), 0.5).unwrap();
        assert!((k - 1.0).abs() < 1e-14, "{k}");
        let p = pt(30, 0.4);
        let mass = quad().integrate(|t| durrmeyer_kernel(p, t).unwrap(), 0.0, 1.0).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(durrmeyer_kernel(p, 1.2).is_err());
    }

    #[test]
    fn kernel_peaks_near_x() {
        let p = pt(200, 0.3);
        let (argmax, _) = (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .map(|t| (t, durrmeyer_kernel(p, t).unwrap()))
            .fold((0.0, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
        assert!((argmax - 0.3).abs() < 0.05);
    }

    #[test]
    fn kernel_is_symmetric() {
        for (x, t) in [(0.2, 0.7), (0.45, 0.46), (0.9, 0.1)] {
            let a = durrmeyer_kernel(pt(25, x), t).unwrap();
            let b = durrmeyer_kernel(pt(25, t), x).unwrap();
            assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn durrmeyer_examples() {
        let q = quad();
        let one = PiecewiseFunction::constant(1.0);
        assert!((durrmeyer_op(&one, pt(40, 0.7), &q).unwrap() - 1.0).abs() < 1e-13);
        let id = PiecewiseFunction::identity();
        assert!((durrmeyer_op(&id, pt(10, 0.5), &q).unwrap() - 0.5).abs() < 1e-14);
        // (nx + 1)/(n + 2)
        let got = durrmeyer_op(&id, pt(13, 0.3), &q).unwrap();
        assert!((got - (13.0 * 0.3 + 1.0) / 15.0).abs() < 1e-14);
    }

    #[test]
    fn durrmeyer_exact_path_matches_quadrature_of_kernel() {
        let q = quad();
        let f = PiecewiseFunction::new(
            vec![0.35],
            vec![
                Piece::Polynomial(crate::funcmodel::Polynomial::new(vec![1.0, -2.0, 0.5])),
                Piece::constant(0.25),
            ],
            vec![None],
        )
        .unwrap();
        let p = pt(20, 0.4);
        let exact = durrmeyer_op(&f, p, &q).unwrap();
        let oracle = q
            .integrate_with_cuts(
                |t| f.eval(t).unwrap() * durrmeyer_kernel(p, t).unwrap(),
                0.0,
                1.0,
                &[0.35],
            )
            .unwrap();
        assert!((exact - oracle).abs() < 1e-11);
    }

    #[test]
    fn closed_form_pieces_use_quadrature() {
        let q = quad();
        let f = PiecewiseFunction::smooth(Piece::Closed(ClosedForm {
            kind: Elementary::Exp,
            amplitude: 1.0,
            freq: 1.0,
            phase: 0.0,
            offset: 0.0,
        }))
        .unwrap();
        // E exp(B) for B ~ Beta(1, 1) is e - 1
        let got = beta_expectation(&f, 1.0, 1.0, &q).unwrap();
        assert!((got - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let got = lupas_op(&f, 400, 0.25, &q).unwrap();
        let series: f64 = (0..40)
            .map(|m| lupas_moment(400, 0.25, m).unwrap() / (1..=m).map(|j| j as f64).product::<f64>())
            .sum();
        assert!((got - series).abs() < 1e-11);
    }

    #[test]
    fn weighted_examples() {
        let q = quad();
        let f = PiecewiseFunction::polynomial(vec![0.1, 2.0, -1.5]).unwrap();
        let one = PiecewiseFunction::constant(1.0);
        let p = pt(25, 0.3);
        let plain = durrmeyer_op(&f, p, &q).unwrap();
        let weighted = weighted_durrmeyer_op(&f, &one, p, &q).unwrap();
        assert!((plain - weighted).abs() < 1e-10);

        let w = PiecewiseFunction::step(0.5, 1.0, 2.0).unwrap();
        let got = weighted_durrmeyer_op(&one, &w, pt(60, 0.45), &q).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_rejects_degenerate_weights() {
        let q = quad();
        let one = PiecewiseFunction::constant(1.0);
        let zero_left = PiecewiseFunction::step(0.5, 0.0, 1.0).unwrap();
        let res = weighted_durrmeyer_op(&one, &zero_left, pt(2048, 0.5), &q);
        assert!(matches!(res, Err(Error::DegenerateWeight { k: 0, .. })));
        let negative = PiecewiseFunction::step(0.5, -1.0, 1.0).unwrap();
        assert!(weighted_durrmeyer_op(&one, &negative, pt(10, 0.5), &q).is_err());
    }

    #[test]
    fn lupas_examples() {
        let q = quad();
        let one = PiecewiseFunction::constant(1.0);
        for (n, y) in [(1, 0.0), (8, 0.25), (100, 1.0)] {
            assert!((lupas_op(&one, n, y, &q).unwrap() - 1.0).abs() < 1e-14);
        }
        let id = PiecewiseFunction::identity();
        assert!((lupas_op(&id, 8, 0.25, &q).unwrap() - 0.3).abs() < 1e-15);
        assert!(lupas_op(&id, 8, 1.5, &q).is_err());
        assert!(lupas_op(&id, 0, 0.5, &q).is_err());
    }

    #[test]
    fn lupas_moment_examples() {
        assert_eq!(lupas_moment(8, 0.25, 0).unwrap(), 1.0);
        assert!((lupas_moment(8, 0.25, 1).unwrap() - 0.3).abs() < 1e-15);
        assert!((lupas_moment(8, 0.25, 2).unwrap() - 6.0 / 55.0).abs() < 1e-15);
        // quadrature of θ² against the Beta(3, 7) density
        let q = quad();
        let by_quad = q
            .integrate(|t| t * t * beta_pdf(3.0, 7.0, t).unwrap(), 0.0, 1.0)
            .unwrap();
        assert!((by_quad - 6.0 / 55.0).abs() < 1e-13);
    }

    #[test]
    fn lupas_mean_cross_checked_by_quadrature() {
        let q = quad();
        let (n, y) = (8.0, 0.25);
        let by_quad = q
            .integrate(|t| t * beta_pdf(n * y + 1.0, n * (1.0 - y) + 1.0, t).unwrap(), 0.0, 1.0)
            .unwrap();
        assert!((by_quad - 0.3).abs() < 1e-14);
    }
}
