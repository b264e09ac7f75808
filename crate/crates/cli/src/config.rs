//! Experiment config: flat `key = value` lines, plus `[f]` and `[w]` sections
//! holding piecewise polynomials as
//!
//! ```text
//! piece(0, 0.5): 0
//! piece(0.5, 1): 1 0 2     # 1 + 2t²
//! at(0.5): 0.5
//! ```
//!
//! `#` starts a comment. Pieces must tile `[0, 1]` in order.

use std::path::PathBuf;
use std::str::FromStr;

use bdop_core::funcmodel::{Piece, PiecewiseFunction, Polynomial};
use clap::ValueEnum;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    KernelNormality,
    BvLimit,
    LupasLimit,
    BetaPdf,
    NuTable,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::KernelNormality => "kernel-normality",
            Experiment::BvLimit => "bv-limit",
            Experiment::LupasLimit => "lupas-limit",
            Experiment::BetaPdf => "beta-pdf",
            Experiment::NuTable => "nu-table",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

/// `points` equally spaced values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        bdop_core::stats::linspace(self.lo, self.hi, self.points)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub x: Option<f64>,
    pub n_values: Vec<u64>,
    pub grid: Option<Grid>,
    pub seed: u64,
    pub mc_samples: usize,
    pub output: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub gammas: Vec<f64>,
    pub scales: Vec<f64>,
    pub r_values: Vec<f64>,
    pub f: Option<PiecewiseFunction>,
    pub w: Option<PiecewiseFunction>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    F,
    W,
}

struct PieceLine {
    line: usize,
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

#[derive(Default)]
struct FunctionSpec {
    header: usize,
    pieces: Vec<PieceLine>,
    points: Vec<(usize, f64, f64)>,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config {
        line: Some(line),
        msg: msg.into(),
    })
}

fn number(line: usize, key: &str, s: &str) -> Result<f64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(line, format!("{key}: '{}' is not a finite number", s.trim())),
    }
}

fn number_list(line: usize, key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|p| number(line, key, p)).collect()
}

fn integer<T: FromStr>(line: usize, key: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse::<T>()
        .or_else(|_| err(line, format!("{key}: '{}' is not a nonnegative integer", s.trim())))
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        let mut section = Section::Top;
        let mut f_spec: Option<FunctionSpec> = None;
        let mut w_spec: Option<FunctionSpec> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                let (spec, next) = match content {
                    "[f]" => (&mut f_spec, Section::F),
                    "[w]" => (&mut w_spec, Section::W),
                    _ => return err(line, format!("unknown section {content}")),
                };
                if spec.is_some() {
                    return err(line, format!("section {content} appears twice"));
                }
                *spec = Some(FunctionSpec {
                    header: line,
                    ..FunctionSpec::default()
                });
                section = next;
                continue;
            }
            match section {
                Section::Top => cfg.set_key(line, content, &mut seen)?,
                Section::F => parse_piece_line(line, content, f_spec.as_mut().expect("section open"))?,
                Section::W => parse_piece_line(line, content, w_spec.as_mut().expect("section open"))?,
            }
        }
        cfg.f = f_spec.map(|s| build_function("f", s)).transpose()?;
        cfg.w = w_spec.map(|s| build_function("w", s)).transpose()?;
        Ok(cfg)
    }

    fn set_key(&mut self, line: usize, content: &str, seen: &mut Vec<String>) -> Result<(), CliError> {
        let Some((key, value)) = content.split_once('=') else {
            return err(line, format!("expected 'key = value', got '{content}'"));
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return err(line, format!("duplicate key '{key}'"));
        }
        seen.push(key.to_string());
        match key {
            "experiment" => {
                self.experiment = Some(
                    value
                        .parse()
                        .or_else(|_| err(line, format!("unknown experiment '{value}'")))?,
                )
            }
            "x" => {
                let x = number(line, key, value)?;
                if !(x > 0.0 && x < 1.0) {
                    return err(line, format!("x = {x} must lie in (0, 1)"));
                }
                self.x = Some(x);
            }
            "n_values" => {
                let ns = value
                    .split(',')
                    .map(|p| integer::<u64>(line, key, p))
                    .collect::<Result<Vec<_>, _>>()?;
                if ns.is_empty() || ns.contains(&0) {
                    return err(line, "n_values must be positive integers");
                }
                if ns.windows(2).any(|w| w[1] <= w[0]) {
                    return err(line, "n_values must be sorted ascending without repeats");
                }
                self.n_values = ns;
            }
            "grid" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return err(line, "grid needs 'lo, hi, points'");
                }
                let lo = number(line, key, parts[0])?;
                let hi = number(line, key, parts[1])?;
                let points = integer::<usize>(line, key, parts[2])?;
                if !(hi > lo) || points < 2 {
                    return err(line, "grid needs lo < hi and at least 2 points");
                }
                self.grid = Some(Grid { lo, hi, points });
            }
            "seed" => self.seed = integer(line, key, value)?,
            "mc_samples" => self.mc_samples = integer(line, key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "tolerance" => {
                let t = number(line, key, value)?;
                if !(t > 0.0) {
                    return err(line, "tolerance must be positive");
                }
                self.tolerance = Some(t);
            }
            "gammas" => {
                let g = number_list(line, key, value)?;
                if g.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
                    return err(line, "gammas must lie in (0, 1)");
                }
                self.gammas = g;
            }
            "scales" => {
                let s = number_list(line, key, value)?;
                if s.iter().any(|&s| !(s > 0.0)) || !strictly_increasing(&s) {
                    return err(line, "scales must be positive and strictly increasing");
                }
                self.scales = s;
            }
            "r_values" => {
                let r = value
                    .split(',')
                    .map(|p| match p.trim() {
                        "inf" | "+inf" => Ok(f64::INFINITY),
                        other => number(line, key, other),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if r.iter().any(|&r| r < 0.0) {
                    return err(line, "r_values must be nonnegative");
                }
                self.r_values = r;
            }
            _ => return err(line, format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

fn parse_piece_line(line: usize, content: &str, spec: &mut FunctionSpec) -> Result<(), CliError> {
    let Some((head, body)) = content.split_once(':') else {
        return err(
            line,
            format!("expected 'piece(lo, hi): c0 c1 ...' or 'at(x): v', got '{content}'"),
        );
    };
    let head = head.trim();
    let args = |prefix: &str| -> Option<&str> { head.strip_prefix(prefix)?.strip_suffix(')') };
    if let Some(inner) = args("piece(") {
        let bounds = number_list(line, "piece", inner)?;
        if bounds.len() != 2 || !(bounds[1] > bounds[0]) {
            return err(line, "piece needs 'lo, hi' with lo < hi");
        }
        let coeffs = body
            .split_whitespace()
            .map(|c| number(line, "piece", c))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return err(line, "piece needs at least one coefficient");
        }
        spec.pieces.push(PieceLine {
            line,
            lo: bounds[0],
            hi: bounds[1],
            coeffs,
        });
    } else if let Some(inner) = args("at(") {
        spec.points
            .push((line, number(line, "at", inner)?, number(line, "at", body)?));
    } else {
        return err(line, format!("unknown function entry '{head}'"));
    }
    Ok(())
}

fn build_function(name: &str, spec: FunctionSpec) -> Result<PiecewiseFunction, CliError> {
    let Some(first) = spec.pieces.first() else {
        return err(spec.header, format!("[{name}] has no pieces"));
    };
    if first.lo != 0.0 {
        return err(first.line, format!("[{name}] must start at 0"));
    }
    for pair in spec.pieces.windows(2) {
        if pair[1].lo != pair[0].hi {
            return err(
                pair[1].line,
                format!("[{name}] pieces must tile [0, 1]: gap or overlap at {}", pair[0].hi),
            );
        }
    }
    let last = spec.pieces.last().expect("nonempty");
    if last.hi != 1.0 {
        return err(last.line, format!("[{name}] must end at 1"));
    }
    let breakpoints: Vec<f64> = spec.pieces[1..].iter().map(|p| p.lo).collect();
    let pieces = spec
        .pieces
        .iter()
        .map(|p| Piece::Polynomial(Polynomial::new(p.coeffs.clone())))
        .collect();
    let mut f = PiecewiseFunction::new(breakpoints.clone(), pieces, vec![None; breakpoints.len()])
        .or_else(|e| err(spec.header, format!("[{name}]: {e}")))?;
    for (line, at, value) in spec.points {
        f = f
            .with_point_value(at, value)
            .or_else(|e| err(line, format!("[{name}]: {e}")))?;
    }
    Ok(f)
}
