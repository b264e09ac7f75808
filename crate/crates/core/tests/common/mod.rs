#![allow(dead_code)]

use bdop_core::funcmodel::{Piece, PiecewiseFunction, Polynomial};
use rand::Rng;

/// Sorted distinct breakpoints in (0.05, 0.95), at most `max` of them.
pub fn breakpoints<R: Rng>(rng: &mut R, max: usize) -> Vec<f64> {
    let count = rng.random_range(0..=max);
    let mut b: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..0.95)).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn random_poly<R: Rng>(rng: &mut R, degree: usize) -> Polynomial {
    Polynomial::new((0..=degree).map(|_| rng.random_range(-2.0..2.0)).collect())
}

/// Piecewise polynomial with arbitrary signs.
pub fn signed_function<R: Rng>(rng: &mut R, cuts: &[f64]) -> PiecewiseFunction {
    let pieces = (0..=cuts.len())
        .map(|_| {
            let d = rng.random_range(0..=3);
            Piece::Polynomial(random_poly(rng, d))
        })
        .collect();
    PiecewiseFunction::new(cuts.to_vec(), pieces, vec![None; cuts.len()]).unwrap()
}

/// Piecewise polynomial of the form `c + p(t)²` with `c >= 0` on every piece.
pub fn nonnegative_function<R: Rng>(rng: &mut R, cuts: &[f64]) -> PiecewiseFunction {
    let pieces = (0..=cuts.len())
        .map(|_| {
            let d = rng.random_range(0..=2);
            let p = random_poly(rng, d);
            let c = rng.random_range(0.0..1.0);
            let sq = p.mul(&p);
            let mut coeffs = sq.coeffs().to_vec();
            if coeffs.is_empty() {
                coeffs.push(0.0);
            }
            coeffs[0] += c;
            Piece::Polynomial(Polynomial::new(coeffs))
        })
        .collect();
    PiecewiseFunction::new(cuts.to_vec(), pieces, vec![None; cuts.len()]).unwrap()
}

/// `f + h` on the common refinement, with `h >= 0`.
pub fn add(f: &PiecewiseFunction, h: &PiecewiseFunction) -> PiecewiseFunction {
    let mut cuts: Vec<f64> = f.breakpoints().iter().chain(h.breakpoints()).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(&cuts);
    edges.push(1.0);
    let pieces = edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let pf = piece_at(f, mid);
            let ph = piece_at(h, mid);
            let n = pf.coeffs().len().max(ph.coeffs().len());
            let c = (0..n)
                .map(|i| pf.coeffs().get(i).unwrap_or(&0.0) + ph.coeffs().get(i).unwrap_or(&0.0))
                .collect();
            Piece::Polynomial(Polynomial::new(c))
        })
        .collect();
    PiecewiseFunction::new(cuts.clone(), pieces, vec![None; cuts.len()]).unwrap()
}

fn piece_at(f: &PiecewiseFunction, t: f64) -> Polynomial {
    f.intervals()
        .find(|(lo, hi, _)| *lo <= t && t < *hi)
        .and_then(|(_, _, p)| p.as_polynomial().cloned())
        .expect("piecewise polynomial covering t")
}
