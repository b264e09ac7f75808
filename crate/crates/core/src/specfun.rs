//! Special functions: log-gamma, log-Beta, the regularized incomplete Beta
//! function, Gaussian pdf/cdf and the (real-index) Bernstein basis.
//!
//! Everything that involves a Beta normalisation goes through
//! [`ln_beta_front`], which evaluates `ln(z^a (1-z)^b / B(a, b))` with the
//! Stirling corrections split off so that large shape parameters (up to
//! about 1e6) do not lose digits to cancellation between `ln Γ` terms.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// `ln √(2π)`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Shapes at or above this use the Stirling series.
const STIRLING_MIN: f64 = 10.0;

const LANCZOS_G: f64 = 5.242_187_5; // 671/128
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// Stirling remainder `δ(x) = ln Γ(x) - (x - ½) ln x + x - ln √(2π)`, for `x >= 10`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    // Bernoulli terms B_{2k} / (2k (2k - 1)), k = 1..7
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 * (1.0 / 156.0)))))))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_MIN {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x);
    }
    let mut y = x;
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain("ln_gamma", format!("x = {x} must be positive and finite"));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `ln(1 + e) - e`, accurate for small `|e|`.
pub(crate) fn log1pmx(e: f64) -> f64 {
    if (-0.5..=1.0).contains(&e) {
        // ln(1+e) = 2 atanh(s) with s = e/(2+e); 2s - e = -e²/(2+e)
        let s = e / (2.0 + e);
        let s2 = s * s;
        let first = s * s2;
        let mut term = first;
        let mut sum = 0.0f64;
        let mut j = 3.0;
        while term.abs() > 1e-17 * first.abs() && j < 200.0 {
            sum += term / j;
            term *= s2;
            j += 2.0;
        }
        -e * e / (2.0 + e) + 2.0 * sum
    } else {
        e.ln_1p() - e
    }
}

fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let s = p + q;
    if p >= STIRLING_MIN {
        p * (p / s).ln() + q * (q / s).ln() - 0.5 * (p * q / s).ln()
            + LN_SQRT_2PI
            + stirling_correction(p)
            + stirling_correction(q)
            - stirling_correction(s)
    } else if q >= STIRLING_MIN {
        // ln Γ(q) - ln Γ(p + q) with the leading terms combined
        let tail = -(q - 0.5) * (p / q).ln_1p() - p * s.ln() + p + stirling_correction(q) - stirling_correction(s);
        ln_gamma_unchecked(p) + tail
    } else {
        ln_gamma_unchecked(p) + ln_gamma_unchecked(q) - ln_gamma_unchecked(s)
    }
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_shapes("ln_beta", a, b)?;
    Ok(ln_beta_unchecked(a, b))
}

/// `ln(z^a (1-z)^b / B(a, b))` for `z` in `(0, 1)`, with `zc = 1 - z`.
///
/// Whichever of `z`, `zc` is at most ½ is taken as exact; the other only
/// enters through it.
pub(crate) fn ln_beta_front(a: f64, b: f64, z: f64, zc: f64) -> f64 {
    let small_z = z <= 0.5;
    if a >= STIRLING_MIN && b >= STIRLING_MIN {
        let s = a + b;
        let x0 = a / s;
        let y0 = b / s;
        let d = if small_z { z - x0 } else { y0 - zc };
        a * log1pmx(d / x0) + b * log1pmx(-d / y0) + 0.5 * (a * b / s).ln()
            - LN_SQRT_2PI
            - (stirling_correction(a) + stirling_correction(b) - stirling_correction(s))
    } else {
        let (ln_z, ln_zc) = if small_z {
            (z.ln(), (-z).ln_1p())
        } else {
            ((-zc).ln_1p(), zc.ln())
        };
        a * ln_z + b * ln_zc - ln_beta_unchecked(a, b)
    }
}

fn check_shapes(func: &'static str, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return domain(func, format!("shapes a = {a}, b = {b} must be positive and finite"));
    }
    Ok(())
}

/// Modified Lentz evaluation of the incomplete Beta continued fraction.
fn beta_cf(a: f64, b: f64, z: f64, zc: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let max_iter = 10_000 + (20.0 * a.max(b).sqrt()) as usize;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    // 1 - (a+b) z / (a+1), written so z -> 1 does not cancel
    let mut d = ((a + 1.0) * zc + (1.0 - b) * z) / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }
    h
}

/// Lower tail `I_z(a, b)` for `z <= a/(a+b)`, where the continued fraction converges fast.
fn inc_beta_lower(a: f64, b: f64, z: f64, zc: f64) -> f64 {
    let ln_front = ln_beta_front(a, b, z, zc);
    if ln_front < -745.0 {
        return 0.0;
    }
    ln_front.exp() * beta_cf(a, b, z, zc) / a
}

/// `I_z(a, b)` from the positive-term series
/// `z^a (1-z)^b / (a B(a, b)) · ₂F₁(a+b, 1; a+1; z)`, for small `z` above the mean.
fn inc_beta_series(a: f64, b: f64, z: f64, zc: f64) -> f64 {
    const RESCALE: f64 = 1e250;
    let mut ln_front = ln_beta_front(a, b, z, zc);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while n < 1e6 {
        let ratio = (a + b + n) / (a + 1.0 + n) * z;
        term *= ratio;
        sum += term;
        n += 1.0;
        if ratio < 1.0 && term < 1e-17 * sum {
            break;
        }
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_front += RESCALE.ln();
        }
    }
    ((ln_front + sum.ln()).exp() / a).min(1.0)
}

/// The continued fraction loses about `pdf(z) * ulp` when its argument is close
/// to 1; there the tail on the other side is summed as a series instead.
fn use_series(y: f64, a: f64, b: f64) -> bool {
    y < 0.1 && (a + b) * y <= 5e4
}

/// Regularized incomplete Beta `I_z(a, b)` together with its complement `1 - I_z(a, b)`.
///
/// The continued fraction is always evaluated for the tail on the near side
/// of `a/(a+b)`, so whichever half is small keeps its relative precision.
pub fn reg_inc_beta_pair(z: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    check_shapes("reg_inc_beta", a, b)?;
    if !(0.0..=1.0).contains(&z) {
        return domain("reg_inc_beta", format!("z = {z} outside [0, 1]"));
    }
    if z == 0.0 {
        return Ok((0.0, 1.0));
    }
    if z == 1.0 {
        return Ok((1.0, 0.0));
    }
    let zc = 1.0 - z;
    if z <= a / (a + b) {
        if use_series(zc, a, b) {
            let upper = inc_beta_series(b, a, zc, z);
            return Ok((1.0 - upper, upper));
        }
        let lower = inc_beta_lower(a, b, z, zc).min(1.0);
        Ok((lower, 1.0 - lower))
    } else {
        if use_series(z, a, b) {
            let lower = inc_beta_series(a, b, z, zc);
            return Ok((lower, 1.0 - lower));
        }
        let upper = inc_beta_lower(b, a, zc, z).min(1.0);
        Ok((1.0 - upper, upper))
    }
}

/// Regularized incomplete Beta function `I_z(a, b)`: the Beta(a, b) cdf at `z`.
pub fn reg_inc_beta(z: f64, a: f64, b: f64) -> Result<f64> {
    reg_inc_beta_pair(z, a, b).map(|(lower, _)| lower)
}

/// `P(lo < B <= hi)` for `B ~ Beta(a, b)` and `0 <= lo <= hi <= 1`, choosing the
/// tail that avoids cancellation.
pub fn beta_interval_mass(lo: f64, hi: f64, a: f64, b: f64) -> Result<f64> {
    let (lo_cdf, lo_sf) = reg_inc_beta_pair(lo, a, b)?;
    let (hi_cdf, hi_sf) = reg_inc_beta_pair(hi, a, b)?;
    let mass = if hi_cdf <= 0.5 { hi_cdf - lo_cdf } else { lo_sf - hi_sf };
    Ok(mass.max(0.0))
}

/// Density of Beta(a, b) at `t`; zero outside `[0, 1]`.
pub fn beta_pdf(a: f64, b: f64, t: f64) -> Result<f64> {
    check_shapes("beta_pdf", a, b)?;
    if t.is_nan() {
        return domain("beta_pdf", "t is NaN");
    }
    if !(0.0..=1.0).contains(&t) {
        return Ok(0.0);
    }
    let edge = |shape: f64, other: f64| {
        if shape > 1.0 {
            0.0
        } else if shape == 1.0 {
            (-ln_beta_unchecked(1.0, other)).exp()
        } else {
            f64::INFINITY
        }
    };
    if t == 0.0 {
        return Ok(edge(a, b));
    }
    if t == 1.0 {
        return Ok(edge(b, a));
    }
    Ok((ln_beta_front(a, b, t, 1.0 - t) - t.ln() - (-t).ln_1p()).exp())
}

/// Degree `n` and (possibly fractional) index `k` of an extended Bernstein basis polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisIndex {
    n: u64,
    k: f64,
}

impl BasisIndex {
    pub fn new(n: u64, k: f64) -> Result<Self> {
        if n == 0 {
            return domain("BasisIndex", "degree n must be at least 1");
        }
        if !(0.0..=n as f64).contains(&k) {
            return domain("BasisIndex", format!("k = {k} outside [0, {n}]"));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Extended Bernstein basis `p_{n,k}(t) = Γ(n+1)/(Γ(k+1)Γ(n-k+1)) t^k (1-t)^{n-k}`,
/// zero outside `[0, 1]`.
///
/// At the endpoints the continuous limit is used: `p_{n,0}(0) = p_{n,n}(1) = 1`
/// and every other basis function vanishes there (including fractional `k`).
pub fn bernstein_basis(idx: BasisIndex, t: f64) -> f64 {
    let n = idx.n as f64;
    let k = idx.k;
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    if t == 0.0 {
        return if k == 0.0 { 1.0 } else { 0.0 };
    }
    if t == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let a = k + 1.0;
    let b = n - k + 1.0;
    (ln_beta_front(a, b, t, 1.0 - t) - t.ln() - (-t).ln_1p() - (n + 1.0).ln()).exp()
}

/// All integer-index basis values `p_{n,0}(t), ..., p_{n,n}(t)`.
pub fn bernstein_row(n: u64, t: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| bernstein_basis(BasisIndex { n, k: k as f64 }, t))
        .collect()
}

fn check_variance(func: &'static str, variance: f64) -> Result<()> {
    if !(variance > 0.0) || !variance.is_finite() {
        return domain(func, format!("variance = {variance} must be positive and finite"));
    }
    Ok(())
}

/// Cdf of `N(mean, variance)` at `z`.
pub fn normal_cdf(z: f64, mean: f64, variance: f64) -> Result<f64> {
    check_variance("normal_cdf", variance)?;
    let u = (z - mean) / (2.0 * variance).sqrt();
    Ok(0.5 * libm::erfc(-u))
}

/// Density of `N(mean, variance)` at `z`.
pub fn normal_pdf(z: f64, mean: f64, variance: f64) -> Result<f64> {
    check_variance("normal_pdf", variance)?;
    let d = z - mean;
    Ok((-0.5 * d * d / variance).exp() / (2.0 * PI * variance).sqrt())
}
