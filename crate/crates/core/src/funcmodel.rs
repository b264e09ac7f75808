//! Bounded-variation functions on `[0, 1]` with finitely many jumps.
//!
//! A [`PiecewiseFunction`] is a list of breakpoints in `(0, 1)` and one smooth
//! [`Piece`] per open subinterval. Each piece is defined by a formula, so the
//! one-sided limits at a breakpoint are exact evaluations of the neighbouring
//! formulas. At a breakpoint, `eval` returns the explicit point value if one
//! was given and the right limit otherwise.

use std::fmt;

use crate::error::{domain, Error, Result};

/// Polynomial `c0 + c1 t + c2 t² + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `Σ |c_i| M^i` with `M = max(|lo|, |hi|)`: an upper bound for `|p|` on `[lo, hi]`.
    fn abs_bound(&self, lo: f64, hi: f64) -> f64 {
        let m = lo.abs().max(hi.abs());
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * m + c.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Sin,
    Cos,
}

/// `offset + amplitude * g(freq * t + phase)` for an elementary `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub kind: Elementary,
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
    pub offset: f64,
}

impl ClosedForm {
    pub fn eval(&self, t: f64) -> f64 {
        let u = self.freq * t + self.phase;
        let g = match self.kind {
            Elementary::Exp => u.exp(),
            Elementary::Sin => u.sin(),
            Elementary::Cos => u.cos(),
        };
        self.offset + self.amplitude * g
    }

    /// Bound on `|g|` (and on `|g'|`) over `[lo, hi]`.
    fn inner_bound(&self, lo: f64, hi: f64) -> f64 {
        match self.kind {
            Elementary::Exp => (self.freq * lo + self.phase).max(self.freq * hi + self.phase).exp(),
            Elementary::Sin | Elementary::Cos => 1.0,
        }
    }
}

/// One smooth piece of a piecewise function.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Polynomial(Polynomial),
    Closed(ClosedForm),
    Product(Box<Piece>, Box<Piece>),
}

impl Piece {
    pub fn constant(c: f64) -> Self {
        Piece::Polynomial(Polynomial::constant(c))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.eval(t),
            Piece::Closed(c) => c.eval(t),
            Piece::Product(a, b) => a.eval(t) * b.eval(t),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Piece::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    pub fn mul(&self, other: &Piece) -> Piece {
        match (self, other) {
            (Piece::Polynomial(a), Piece::Polynomial(b)) => Piece::Polynomial(a.mul(b)),
            _ => Piece::Product(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    /// Upper bound for `|piece|` on `[lo, hi]`.
    pub fn sup_bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.abs_bound(lo, hi),
            Piece::Closed(c) => c.offset.abs() + c.amplitude.abs() * c.inner_bound(lo, hi),
            Piece::Product(a, b) => a.sup_bound(lo, hi) * b.sup_bound(lo, hi),
        }
    }

    /// Upper bound for the total variation on `[lo, hi]`.
    pub fn variation_bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.derivative().abs_bound(lo, hi) * (hi - lo),
            Piece::Closed(c) => (c.amplitude * c.freq).abs() * c.inner_bound(lo, hi) * (hi - lo),
            Piece::Product(a, b) => {
                a.sup_bound(lo, hi) * b.variation_bound(lo, hi) + b.sup_bound(lo, hi) * a.variation_bound(lo, hi)
            }
        }
    }
}

/// One-sided limits of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpData {
    pub left: f64,
    pub right: f64,
    /// `right / left`; `+∞` when only the left limit vanishes, NaN when both do.
    pub ratio: f64,
}

impl JumpData {
    pub fn new(left: f64, right: f64) -> Self {
        let ratio = if left == 0.0 {
            if right == 0.0 {
                f64::NAN
            } else {
                f64::INFINITY
            }
        } else {
            right / left
        };
        Self { left, right, ratio }
    }

    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }

    /// Checks the hypotheses on a weight at the point: nonnegative limits, not both zero.
    pub fn check_weight(&self) -> Result<()> {
        if self.left < 0.0 || self.right < 0.0 {
            return Err(Error::HypothesisViolation(format!(
                "weight limits must be nonnegative, got ({}, {})",
                self.left, self.right
            )));
        }
        if self.left == 0.0 && self.right == 0.0 {
            return Err(Error::HypothesisViolation(
                "weight has vanishing left and right limits at x".into(),
            ));
        }
        Ok(())
    }
}

/// A bounded-variation function on `[0, 1]` made of finitely many smooth pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    point_values: Vec<Option<f64>>,
}

impl PiecewiseFunction {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>, point_values: Vec<Option<f64>>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if point_values.len() != breakpoints.len() {
            return Err(Error::InvalidFunction(
                "one (optional) point value per breakpoint is required".into(),
            ));
        }
        if breakpoints.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidFunction("breakpoints must lie in (0, 1)".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        let f = Self {
            breakpoints,
            pieces,
            point_values,
        };
        for (lo, hi, piece) in f.intervals() {
            let s = piece.sup_bound(lo, hi);
            let v = piece.variation_bound(lo, hi);
            if !s.is_finite() || !v.is_finite() {
                return Err(Error::InvalidFunction(format!(
                    "piece on [{lo}, {hi}] is not certifiably bounded"
                )));
            }
        }
        if f.point_values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("point values must be finite".into()));
        }
        Ok(f)
    }

    /// A single smooth piece on all of `[0, 1]`.
    pub fn smooth(piece: Piece) -> Result<Self> {
        Self::new(vec![], vec![piece], vec![])
    }

    pub fn constant(c: f64) -> Self {
        Self::smooth(Piece::constant(c)).expect("constants are valid")
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::smooth(Piece::Polynomial(Polynomial::new(coeffs)))
    }

    pub fn identity() -> Self {
        Self::polynomial(vec![0.0, 1.0]).expect("identity is valid")
    }

    /// `left` on `[0, at)` and `right` on `[at, 1]`.
    pub fn step(at: f64, left: f64, right: f64) -> Result<Self> {
        Self::new(
            vec![at],
            vec![Piece::constant(left), Piece::constant(right)],
            vec![None],
        )
    }

    /// Replaces the value taken exactly at breakpoint `at`.
    pub fn with_point_value(mut self, at: f64, value: f64) -> Result<Self> {
        let Some(i) = self.breakpoints.iter().position(|&b| b == at) else {
            return Err(Error::InvalidFunction(format!("{at} is not a breakpoint")));
        };
        if !value.is_finite() {
            return Err(Error::InvalidFunction("point values must be finite".into()));
        }
        self.point_values[i] = Some(value);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn point_values(&self) -> &[Option<f64>] {
        &self.point_values
    }

    /// `(lo, hi, piece)` for each subinterval, in order.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, &Piece)> + '_ {
        self.pieces.iter().enumerate().map(move |(i, p)| {
            let lo = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
            let hi = self.breakpoints.get(i).copied().unwrap_or(1.0);
            (lo, hi, p)
        })
    }

    pub fn is_piecewise_polynomial(&self) -> bool {
        self.pieces.iter().all(|p| p.as_polynomial().is_some())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return domain("PiecewiseFunction::eval", format!("t = {t} outside [0, 1]"));
        }
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i > 0 && self.breakpoints[i - 1] == t {
            if let Some(v) = self.point_values[i - 1] {
                return Ok(v);
            }
        }
        Ok(self.pieces[i].eval(t))
    }

    /// Exact `f(x-)` and `f(x+)` from the neighbouring piece formulas.
    pub fn one_sided_limits(&self, x: f64) -> Result<JumpData> {
        if !(x > 0.0 && x < 1.0) {
            return domain("PiecewiseFunction::one_sided_limits", format!("x = {x} outside (0, 1)"));
        }
        let right = self.breakpoints.partition_point(|&b| b <= x);
        let left = self.breakpoints.partition_point(|&b| b < x);
        Ok(JumpData::new(self.pieces[left].eval(x), self.pieces[right].eval(x)))
    }

    /// Pointwise product on the common refinement of both breakpoint sets.
    pub fn product(&self, other: &Self) -> Self {
        let mut breakpoints: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let mut pieces = Vec::with_capacity(breakpoints.len() + 1);
        for i in 0..=breakpoints.len() {
            let lo = if i == 0 { 0.0 } else { breakpoints[i - 1] };
            let hi = breakpoints.get(i).copied().unwrap_or(1.0);
            let mid = 0.5 * (lo + hi);
            let a = &self.pieces[self.breakpoints.partition_point(|&b| b <= mid)];
            let b = &other.pieces[other.breakpoints.partition_point(|&b| b <= mid)];
            pieces.push(a.mul(b));
        }
        let point_values = breakpoints
            .iter()
            .map(|&b| {
                let has_value = |f: &Self| {
                    f.breakpoints
                        .iter()
                        .position(|&c| c == b)
                        .and_then(|i| f.point_values[i])
                        .is_some()
                };
                if has_value(self) || has_value(other) {
                    Some(self.eval(b).unwrap_or(f64::NAN) * other.eval(b).unwrap_or(f64::NAN))
                } else {
                    None
                }
            })
            .collect();
        Self {
            breakpoints,
            pieces,
            point_values,
        }
    }

    /// Upper bound for `sup |f|` on `[0, 1]`.
    pub fn sup_bound(&self) -> f64 {
        let pieces = self.intervals().map(|(lo, hi, p)| p.sup_bound(lo, hi));
        let points = self.point_values.iter().flatten().map(|v| v.abs());
        pieces.chain(points).fold(0.0, f64::max)
    }

    /// Upper bound for the total variation on `[0, 1]`: piece variations plus jumps.
    pub fn total_variation_bound(&self) -> f64 {
        let pieces: f64 = self.intervals().map(|(lo, hi, p)| p.variation_bound(lo, hi)).sum();
        let jumps: f64 = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let left = self.pieces[i].eval(b);
                let right = self.pieces[i + 1].eval(b);
                let at = self.point_values[i].unwrap_or(right);
                (at - left).abs() + (right - at).abs()
            })
            .sum();
        pieces + jumps
    }

    /// Smallest value seen on a dense sample of every piece, its endpoints and the
    /// point values. Used to screen weights for negativity.
    pub fn sampled_min(&self, per_piece: usize) -> f64 {
        let per_piece = per_piece.max(2);
        let mut min = f64::INFINITY;
        for (lo, hi, p) in self.intervals() {
            for j in 0..=per_piece {
                let t = lo + (hi - lo) * j as f64 / per_piece as f64;
                min = min.min(p.eval(t));
            }
        }
        self.point_values.iter().flatten().fold(min, |m, &v| m.min(v))
    }
}

impl fmt::Display for PiecewiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi, p)) in self.intervals().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match p {
                Piece::Polynomial(poly) => {
                    write!(f, "piece({lo}, {hi}):")?;
                    for c in poly.coeffs() {
                        write!(f, " {c}")?;
                    }
                }
                other => write!(f, "piece({lo}, {hi}): {other:?}")?,
            }
        }
        for (b, v) in self.breakpoints.iter().zip(&self.point_values) {
            if let Some(v) = v {
                write!(f, "; at({b}): {v}")?;
            }
        }
        Ok(())
    }
}
