//! Bang degrees, Remez type propagation factors, and the uniqueness
//! constant for weights with divergent logarithmic integral.
//!
//! The chain is: a moment sequence gives a Bang degree for each level
//! `lambda`, the Bang degree gives a one dimensional propagation factor
//! `Theta_1`, and `d` dimensions are handled by iterating the one
//! dimensional bound, halving the density parameter on the way down. The
//! final constant is `C = sqrt(4 / gamma) * Theta`.
//!
//! Propagation factors overflow `f64` in log scale already for harmless
//! looking inputs, so they are carried as [`LogScale`] values which spill
//! into a doubly logarithmic representation when needed.

use std::cmp::Ordering;
use std::f64::consts::E;

use thiserror::Error;

use crate::weights::{MomentSequence, PlsClass, Weight, WeightError};

/// Plain log values above this threshold are stored doubly logarithmically.
pub const PROMOTE_THRESHOLD: f64 = 1e300;

#[derive(Debug, Error)]
pub enum QuasiError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("the logarithmic integral of the weight does not provably diverge")]
    InvalidWeight,
    #[error("moment data up to n_max = {n_max} is insufficient at level {level}")]
    ExceedsNMax { n_max: usize, level: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl QuasiError {
    fn at_level(self, level: usize) -> Self {
        match self {
            QuasiError::ExceedsNMax { n_max, .. } => QuasiError::ExceedsNMax { n_max, level },
            other => other,
        }
    }

    fn with_n_max(self, n_max: usize) -> Self {
        match self {
            QuasiError::ExceedsNMax { level, .. } => QuasiError::ExceedsNMax { n_max, level },
            other => other,
        }
    }
}

/// A positive quantity in log scale.
///
/// With `nested = false` the field holds `ln v`. With `nested = true` it
/// holds `ln ln v`, used once `ln v` itself passes [`PROMOTE_THRESHOLD`].
/// Arithmetic stays exact to about `1e-12` relative error in the stored
/// component as long as operands sit within one nesting level of each
/// other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScale {
    log: f64,
    nested: bool,
}

impl LogScale {
    pub fn from_log(log: f64) -> Self {
        if log.is_finite() && log > PROMOTE_THRESHOLD {
            LogScale {
                log: log.ln(),
                nested: true,
            }
        } else {
            LogScale { log, nested: false }
        }
    }

    pub fn one() -> Self {
        LogScale {
            log: 0.0,
            nested: false,
        }
    }

    fn demoted(log: f64, nested: bool) -> Self {
        if nested && log <= PROMOTE_THRESHOLD.ln() {
            LogScale {
                log: log.exp(),
                nested: false,
            }
        } else {
            LogScale { log, nested }
        }
    }

    /// `ln v`; `+inf` when even the plain logarithm overflows.
    pub fn log_value(&self) -> f64 {
        if self.nested {
            self.log.exp()
        } else {
            self.log
        }
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    /// The stored component, `ln v` or `ln ln v` depending on `nested`.
    pub fn raw_log(&self) -> f64 {
        self.log
    }

    /// Product of the underlying values.
    pub fn mul(&self, other: &LogScale) -> LogScale {
        match (self.nested, other.nested) {
            (false, false) => LogScale::from_log(self.log + other.log),
            (true, true) => {
                let (a, b) = if self.log >= other.log {
                    (self.log, other.log)
                } else {
                    (other.log, self.log)
                };
                LogScale::demoted(a + (b - a).exp().ln_1p(), true)
            }
            (true, false) => nested_plus_plain(self.log, other.log),
            (false, true) => nested_plus_plain(other.log, self.log),
        }
    }

    /// The underlying value raised to the power `k > 0`.
    pub fn powf(&self, k: f64) -> LogScale {
        assert!(k > 0.0 && k.is_finite(), "exponent must be positive and finite");
        if self.nested {
            LogScale::demoted(self.log + k.ln(), true)
        } else {
            let s = self.log * k;
            if s.is_finite() || self.log <= 0.0 {
                LogScale::from_log(s)
            } else {
                LogScale {
                    log: k.ln() + self.log.ln(),
                    nested: true,
                }
            }
        }
    }
}

fn nested_plus_plain(nested_log: f64, plain_log: f64) -> LogScale {
    LogScale::demoted(
        nested_log + (plain_log * (-nested_log).exp()).ln_1p(),
        true,
    )
}

impl PartialOrd for LogScale {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.nested, other.nested) {
            (false, false) | (true, true) => self.log.partial_cmp(&other.log),
            (false, true) => self.log.partial_cmp(&other.log.exp()),
            (true, false) => self.log.exp().partial_cmp(&other.log),
        }
    }
}

/// A propagation factor together with the Bang degrees that produced it,
/// one entry per level.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEval {
    pub log_theta: LogScale,
    pub bang_levels: Vec<usize>,
}

/// Report produced by [`pls_constant`].
#[derive(Debug, Clone)]
pub struct PlsReport {
    pub log_c: LogScale,
    pub log_theta: LogScale,
    pub bang_levels: Vec<usize>,
    pub lambda: f64,
    pub a: f64,
}

/// Bang degree of the sequence at level `lambda`: the last `N` with
/// `sum_{n0 <= n <= N} mu_n < e`, where `n0` is the smallest integer
/// exceeding `lambda`.
pub fn bang_degree(seq: &MomentSequence, lambda: f64) -> Result<usize, QuasiError> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(QuasiError::InvalidParam(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let n_max = seq.n_max();
    if lambda.floor() + 1.0 > n_max as f64 {
        return Err(QuasiError::ExceedsNMax { n_max, level: 1 });
    }
    let n0 = lambda.floor() as usize + 1;
    let mut cum = 0.0;
    for n in n0..=n_max {
        cum += seq.mu(n);
        if cum >= E {
            return Ok(n - 1);
        }
    }
    Err(QuasiError::ExceedsNMax { n_max, level: 1 })
}

/// Convexity defect coefficient `gamma_M(n)`, the supremum over
/// `1 <= j <= n` of `j (M_{j+1} M_{j-1} / M_j^2 - 1)`, clamped at zero.
/// Needs `log M` up to `n + 1`.
pub fn gamma_m(seq: &MomentSequence, n: usize) -> Result<f64, QuasiError> {
    if n + 1 > seq.n_max() {
        return Err(QuasiError::ExceedsNMax {
            n_max: seq.n_max(),
            level: 1,
        });
    }
    let mut g: f64 = 0.0;
    for j in 1..=n {
        let d2 = seq.log_moment(j + 1) + seq.log_moment(j - 1) - 2.0 * seq.log_moment(j);
        g = g.max(j as f64 * d2.exp_m1());
    }
    Ok(g)
}

/// `log Gamma_M(n) = log 4 + 4 + 4 gamma_M(n)`.
pub fn log_big_gamma(seq: &MomentSequence, n: usize) -> Result<f64, QuasiError> {
    Ok(4f64.ln() + 4.0 + 4.0 * gamma_m(seq, n)?)
}

fn theta_log_from_bang(n: usize, log_big_gamma: f64, s: f64) -> f64 {
    2.0 * n as f64 * (log_big_gamma - s.ln())
}

fn check_s(s: f64) -> Result<(), QuasiError> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(QuasiError::InvalidParam(format!(
            "s must lie in (0, 1], got {s}"
        )));
    }
    Ok(())
}

/// One dimensional propagation factor: with `n` the Bang degree at level
/// `lambda`, `log Theta_1 = 2 n (log Gamma_M(2n) - log s)`. Needs `log M`
/// up to `2n + 1`.
pub fn remez_theta_1d(
    seq: &MomentSequence,
    lambda: f64,
    s: f64,
) -> Result<ThetaEval, QuasiError> {
    check_s(s)?;
    let n = bang_degree(seq, lambda)?;
    if 2 * n + 1 > seq.n_max() {
        return Err(QuasiError::ExceedsNMax {
            n_max: seq.n_max(),
            level: 1,
        });
    }
    let lg = log_big_gamma(seq, 2 * n)?;
    Ok(ThetaEval {
        log_theta: LogScale::from_log(theta_log_from_bang(n, lg, s)),
        bang_levels: vec![n],
    })
}

/// `d` dimensional propagation factor, obtained by iterating the one
/// dimensional bound. Every level but the base works at half the density,
/// raises `lambda` by the level's `log Theta_1`, and halves `s` once more
/// for the next level. With `d = 1` the result agrees bitwise with
/// [`remez_theta_1d`]. Errors carry the one based level that failed.
pub fn remez_theta_nd(
    seq: &MomentSequence,
    d: usize,
    lambda: f64,
    s: f64,
) -> Result<ThetaEval, QuasiError> {
    if d < 1 {
        return Err(QuasiError::InvalidParam(
            "dimension must be at least 1".into(),
        ));
    }
    check_s(s)?;
    let mut lam = lambda;
    let mut s_cur = s;
    let mut total = LogScale::one();
    let mut bangs = Vec::with_capacity(d);
    for level in 1..d {
        s_cur *= 0.5;
        let t = remez_theta_1d(seq, lam, s_cur).map_err(|e| e.at_level(level))?;
        lam += t.log_theta.log_value();
        total = total.mul(&t.log_theta);
        bangs.extend_from_slice(&t.bang_levels);
    }
    let t = remez_theta_1d(seq, lam, s_cur).map_err(|e| e.at_level(d))?;
    total = total.mul(&t.log_theta);
    bangs.extend_from_slice(&t.bang_levels);
    Ok(ThetaEval {
        log_theta: total,
        bang_levels: bangs,
    })
}

/// Default separation parameter `a = max(e, 2 sqrt(2 d!))`. The factor
/// `sqrt(2 d!)` is a crude bound for the embedding constant that controls
/// point evaluation of low band functions in `d` variables.
pub fn default_a(d: usize) -> f64 {
    let mut fact = 1.0f64;
    for k in 2..=d {
        fact *= k as f64;
    }
    E.max(2.0 * (2.0 * fact).sqrt())
}

/// Uniqueness constant for a weight whose logarithmic integral diverges.
///
/// `c_w >= 1` is the spectral concentration constant, `gamma` in `(0, 1)`
/// the density of the sampling set, `a > 1` the separation parameter, and
/// `n_max` how far the moment sequence of the weight is tabulated. The
/// shifted sequence `M~_n = a^n M_{n+d} / M_d` enters the `d` dimensional
/// propagation bound at level
/// `lambda = log c_w + (1 + d) log a + log M_d`, and the constant is
/// `C = sqrt(4 / gamma) * Theta`.
pub fn pls_constant(
    w: &Weight,
    d: usize,
    c_w: f64,
    gamma: f64,
    a: f64,
    n_max: usize,
) -> Result<PlsReport, QuasiError> {
    if w.pls_classify() != PlsClass::Holds {
        return Err(QuasiError::InvalidWeight);
    }
    if d < 1 {
        return Err(QuasiError::InvalidParam(
            "dimension must be at least 1".into(),
        ));
    }
    if !c_w.is_finite() || c_w < 1.0 {
        return Err(QuasiError::InvalidParam(format!(
            "c_w must be finite and at least 1, got {c_w}"
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(QuasiError::InvalidParam(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if !a.is_finite() || a <= 1.0 {
        return Err(QuasiError::InvalidParam(format!(
            "a must be finite and exceed 1, got {a}"
        )));
    }
    if n_max < d + 2 {
        return Err(QuasiError::InvalidParam(format!(
            "n_max = {n_max} leaves no room above d = {d}"
        )));
    }
    let seq = w.moment_sequence(n_max)?;
    let ln_a = a.ln();
    let lambda = c_w.ln() + (1.0 + d as f64) * ln_a + seq.log_moment(d);
    let mut tilde = Vec::with_capacity(n_max - d + 1);
    for n in 0..=(n_max - d) {
        tilde.push(n as f64 * ln_a + seq.log_moment(n + d) - seq.log_moment(d));
    }
    let tilde_seq = MomentSequence::from_log_moments(tilde)?;
    let theta =
        remez_theta_nd(&tilde_seq, d, lambda, gamma / 2.0).map_err(|e| e.with_n_max(n_max))?;
    let log_c = theta
        .log_theta
        .mul(&LogScale::from_log(0.5 * (4.0 / gamma).ln()));
    Ok(PlsReport {
        log_c,
        log_theta: theta.log_theta,
        bang_levels: theta.bang_levels,
        lambda,
        a,
    })
}
