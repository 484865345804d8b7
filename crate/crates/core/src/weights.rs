//! Weight families on the frequency axis and their moment sequences.
//!
//! A weight is a nondecreasing function `W: [0, inf) -> [1, inf]` whose
//! logarithm is convex as a function of `log t` on `t >= 1`. Everything here
//! works with `log W` directly, because the interesting weights overflow
//! `f64` almost immediately.
//!
//! The moment sequence of a weight is `M_n = sup_{t >= 1} t^n / W(t)`. Raw
//! moments can drop below one when `W(1) > 1`, so [`MomentSequence`] stores
//! the envelope `max(M_n, 1)`. That normalization keeps the ratios
//! `mu_n = M_{n-1} / M_n` inside `(0, 1]` and nonincreasing, which is what
//! the Ostrowski function and the Bang degree machinery downstream assume.
//! [`Weight::log_moment`] returns the raw, unenveloped value.

use std::f64::consts::E;

use thiserror::Error;

/// Largest log convexity defect tolerated when validating moment data.
pub const LOG_CONVEXITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("moment of order {n} diverges")]
    Divergent { n: usize },
    #[error("log moments fail convexity at n = {n} (defect {defect:.3e})")]
    NotLogConvex { n: usize, defect: f64 },
    #[error("tail growth undeclared, result is undecidable")]
    Undecidable,
}

/// Supported weight families.
///
/// Variants are exposed for matching; construct values through the checked
/// constructors so the parameter constraints hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    /// `W = 1` on `[0, edge]`, infinite beyond: band limited spectra.
    BandLimit { edge: f64 },
    /// `log W(t) = c t^alpha` for `t >= 1`, `W = 1` on `[0, 1)`.
    PowerExp { c: f64, alpha: f64 },
    /// `log W(t) = c t / log^delta(e + t)`, continuous on `[0, inf)`.
    EndPoint { delta: f64, c: f64 },
    /// Piecewise linear `log W` against `log t`, knots `(log t, log W)`.
    /// `slope` declares the growth past the last knot. Without it the last
    /// segment is continued for evaluation, but tail dependent questions
    /// stay undecidable.
    Tabulated {
        knots: Vec<(f64, f64)>,
        slope: Option<f64>,
    },
}

/// Outcome of the logarithmic integral divergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlsClass {
    Holds,
    Fails,
    Undecidable,
}

/// One value of the Ostrowski function, in log scale.
///
/// `truncated` means the last available ratio still contributed, so the
/// value is only a lower bound for the full series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRho {
    pub value: f64,
    pub truncated: bool,
}

impl Weight {
    pub fn band_limit(edge: f64) -> Result<Self, WeightError> {
        if !edge.is_finite() || edge < 1.0 {
            return Err(WeightError::InvalidParam(format!(
                "band edge must be finite and at least 1, got {edge}"
            )));
        }
        Ok(Weight::BandLimit { edge })
    }

    pub fn power_exp(c: f64, alpha: f64) -> Result<Self, WeightError> {
        if !c.is_finite() || c <= 0.0 {
            return Err(WeightError::InvalidParam(format!(
                "c must be positive, got {c}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(WeightError::InvalidParam(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Weight::PowerExp { c, alpha })
    }

    pub fn end_point(delta: f64, c: f64) -> Result<Self, WeightError> {
        if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
            return Err(WeightError::InvalidParam(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(WeightError::InvalidParam(format!(
                "c must be positive, got {c}"
            )));
        }
        Ok(Weight::EndPoint { delta, c })
    }

    pub fn tabulated(knots: Vec<(f64, f64)>, slope: Option<f64>) -> Result<Self, WeightError> {
        if knots.len() < 2 {
            return Err(WeightError::InvalidParam(
                "need at least two knots".into(),
            ));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(WeightError::InvalidParam(
                "first knot must be (0, 0), i.e. W(1) = 1".into(),
            ));
        }
        if knots.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(WeightError::InvalidParam("knots must be finite".into()));
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for w in knots.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x1 <= x0 {
                return Err(WeightError::InvalidParam(
                    "knot abscissas must strictly increase".into(),
                ));
            }
            if y1 < y0 {
                return Err(WeightError::InvalidParam(
                    "log W must be nondecreasing".into(),
                ));
            }
            let s = (y1 - y0) / (x1 - x0);
            if s < prev_slope - 1e-12 {
                return Err(WeightError::InvalidParam(
                    "knots must describe a convex graph".into(),
                ));
            }
            prev_slope = s;
        }
        if let Some(k) = slope {
            if !k.is_finite() || k < prev_slope - 1e-12 {
                return Err(WeightError::InvalidParam(format!(
                    "declared slope {k} must be finite and at least the last segment slope"
                )));
            }
        }
        Ok(Weight::Tabulated { knots, slope })
    }

    /// `log W(t)` for `t >= 0`. Returns `+inf` where the weight is infinite.
    pub fn log_weight(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "weights are evaluated on t >= 0");
        match self {
            Weight::BandLimit { edge } => {
                if t <= *edge {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Weight::PowerExp { c, alpha } => {
                if t < 1.0 {
                    0.0
                } else {
                    c * t.powf(*alpha)
                }
            }
            Weight::EndPoint { delta, c } => c * t / (E + t).ln().powf(*delta),
            Weight::Tabulated { knots, slope } => {
                if t < 1.0 {
                    return 0.0;
                }
                tabulated_eval(knots, *slope, t.ln())
            }
        }
    }

    /// `log W(e^x)`, stable for arguments far past the overflow point of
    /// `exp`.
    fn log_weight_at_exp(&self, x: f64) -> f64 {
        match self {
            Weight::EndPoint { delta, c } if x > 600.0 => (c.ln() + x - delta * x.ln()).exp(),
            _ => self.log_weight(x.exp()),
        }
    }

    /// Raw `log M_n` with `M_n = sup_{t >= 1} t^n / W(t)`. No envelope is
    /// applied, so the result may be negative. Errors when the supremum is
    /// infinite.
    pub fn log_moment(&self, n: usize) -> Result<f64, WeightError> {
        let nf = n as f64;
        match self {
            Weight::BandLimit { edge } => Ok(nf * edge.ln()),
            Weight::PowerExp { c, alpha } => {
                if n == 0 {
                    return Ok(-c);
                }
                let arg = nf / (c * alpha);
                if arg.powf(1.0 / alpha) <= 1.0 {
                    Ok(-c)
                } else {
                    Ok(nf / alpha * (arg.ln() - 1.0))
                }
            }
            Weight::EndPoint { .. } => {
                if n == 0 {
                    return Ok(-self.log_weight(1.0));
                }
                let h = |x: f64| nf * x - self.log_weight_at_exp(x);
                let mut hi = 2.0;
                while hi < 1e4 && h(hi) >= h(0.5 * hi) {
                    hi *= 2.0;
                }
                if hi >= 1e4 {
                    return Err(WeightError::Divergent { n });
                }
                let x_star = golden_max(&h, 0.0, hi, 1e-10);
                Ok(h(x_star).max(h(0.0)))
            }
            Weight::Tabulated { knots, slope } => {
                let k_eff = effective_tail_slope(knots, *slope);
                if nf > k_eff + 1e-9 {
                    return Err(WeightError::Divergent { n });
                }
                Ok(knots
                    .iter()
                    .map(|&(x, y)| nf * x - y)
                    .fold(f64::NEG_INFINITY, f64::max))
            }
        }
    }

    /// Enveloped moment sequence for `n = 0..=n_max`.
    pub fn moment_sequence(&self, n_max: usize) -> Result<MomentSequence, WeightError> {
        if n_max < 1 {
            return Err(WeightError::InvalidParam(
                "n_max must be at least 1".into(),
            ));
        }
        let mut raw = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            raw.push(self.log_moment(n)?);
        }
        MomentSequence::from_log_moments(raw)
    }

    /// The logarithmic integral `int_1^inf log W(t) / t^2 dt`.
    ///
    /// Divergence is reported as `+inf`. A tabulated weight without a
    /// declared tail slope has an unknown tail, hence no decidable integral.
    pub fn log_integral(&self) -> Result<f64, WeightError> {
        match self {
            Weight::BandLimit { .. } | Weight::EndPoint { .. } => Ok(f64::INFINITY),
            Weight::PowerExp { c, alpha } => {
                if *alpha == 1.0 {
                    return Ok(f64::INFINITY);
                }
                let beta = 1.0 - alpha;
                let u_max = (30.0 + c.ln().max(0.0)) / beta;
                let quad = adaptive_simpson(&|u: f64| c * (-beta * u).exp(), 0.0, u_max, 1e-11);
                Ok(quad + c * (-beta * u_max).exp() / beta)
            }
            Weight::Tabulated { knots, slope } => {
                let k = match slope {
                    None => return Err(WeightError::Undecidable),
                    Some(k) => *k,
                };
                let mut total = 0.0;
                for w in knots.windows(2) {
                    let (u0, y0) = w[0];
                    let (u1, y1) = w[1];
                    let m = (y1 - y0) / (u1 - u0);
                    total += (y0 + m) * (-u0).exp() - (y1 + m) * (-u1).exp();
                }
                let (u_last, y_last) = *knots.last().unwrap();
                Ok(total + (y_last + k) * (-u_last).exp())
            }
        }
    }

    /// Whether the logarithmic integral diverges.
    pub fn pls_classify(&self) -> PlsClass {
        match self {
            Weight::BandLimit { .. } | Weight::EndPoint { .. } => PlsClass::Holds,
            Weight::PowerExp { alpha, .. } => {
                if *alpha == 1.0 {
                    PlsClass::Holds
                } else {
                    PlsClass::Fails
                }
            }
            Weight::Tabulated { slope, .. } => {
                if slope.is_some() {
                    PlsClass::Fails
                } else {
                    PlsClass::Undecidable
                }
            }
        }
    }

    /// Least `C` with `log W(e t) <= C log W(t)` for all `t >= 1`. `None`
    /// when the ratio is unbounded, in particular when `log W` vanishes
    /// somewhere on `t >= 1`.
    pub fn doubling_constant(&self) -> Option<f64> {
        match self {
            Weight::BandLimit { .. } | Weight::Tabulated { .. } => None,
            Weight::PowerExp { alpha, .. } => Some(alpha.exp()),
            Weight::EndPoint { .. } => Some(E),
        }
    }

    /// Supremum of `d log W / dt` over `t >= 0`, `None` when `log W` jumps.
    pub fn lipschitz_log(&self) -> Option<f64> {
        match self {
            Weight::BandLimit { .. } | Weight::PowerExp { .. } => None,
            Weight::EndPoint { c, .. } => Some(*c),
            Weight::Tabulated { knots, slope } => {
                let mut best: f64 = 0.0;
                for w in knots.windows(2) {
                    let (x0, y0) = w[0];
                    let (x1, y1) = w[1];
                    best = best.max((y1 - y0) / (x1 - x0) * (-x0).exp());
                }
                let (x_last, _) = *knots.last().unwrap();
                best = best.max(effective_tail_slope(knots, *slope) * (-x_last).exp());
                Some(best)
            }
        }
    }
}

fn tabulated_eval(knots: &[(f64, f64)], slope: Option<f64>, x: f64) -> f64 {
    let (x_last, y_last) = *knots.last().unwrap();
    if x >= x_last {
        return y_last + effective_tail_slope(knots, slope) * (x - x_last);
    }
    let i = knots.partition_point(|&(xk, _)| xk <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn effective_tail_slope(knots: &[(f64, f64)], slope: Option<f64>) -> f64 {
    slope.unwrap_or_else(|| {
        let (x0, y0) = knots[knots.len() - 2];
        let (x1, y1) = knots[knots.len() - 1];
        (y1 - y0) / (x1 - x0)
    })
}

/// Normalized log moments `log max(M_n, 1)` together with the consecutive
/// ratios `mu_n = M_{n-1} / M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    log_m: Vec<f64>,
    mu: Vec<f64>,
}

impl MomentSequence {
    /// Builds the sequence from raw `log M_n` for `n = 0..=n_max`. Applies
    /// the envelope `max(M_n, 1)`, flattens rounding level decreases, and
    /// validates monotonicity and log convexity.
    pub fn from_log_moments(raw: Vec<f64>) -> Result<Self, WeightError> {
        if raw.len() < 2 {
            return Err(WeightError::InvalidParam(
                "need log moments up to n_max >= 1".into(),
            ));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(WeightError::InvalidParam(
                "log moments must be finite".into(),
            ));
        }
        let mut log_m: Vec<f64> = raw.iter().map(|&v| v.max(0.0)).collect();
        for n in 1..log_m.len() {
            if log_m[n] < log_m[n - 1] {
                if log_m[n - 1] - log_m[n] > 1e-9 {
                    return Err(WeightError::InvalidParam(format!(
                        "enveloped log moments decrease at n = {n}"
                    )));
                }
                log_m[n] = log_m[n - 1];
            }
        }
        for n in 1..log_m.len() - 1 {
            let defect = log_m[n + 1] + log_m[n - 1] - 2.0 * log_m[n];
            if defect < -LOG_CONVEXITY_TOL {
                return Err(WeightError::NotLogConvex { n, defect });
            }
        }
        let mut mu = vec![1.0];
        for n in 1..log_m.len() {
            mu.push((log_m[n - 1] - log_m[n]).exp());
        }
        Ok(MomentSequence { log_m, mu })
    }

    /// Builds the sequence from the ratios `mu_n` for `n = 1..=n_max`, with
    /// the normalization `M_0 = 1`.
    pub fn from_ratios(mu: Vec<f64>) -> Result<Self, WeightError> {
        if mu.is_empty() {
            return Err(WeightError::InvalidParam(
                "need at least one ratio".into(),
            ));
        }
        for (i, &m) in mu.iter().enumerate() {
            if !(m > 0.0 && m <= 1.0) || !m.is_finite() {
                return Err(WeightError::InvalidParam(format!(
                    "mu_{} = {m} lies outside (0, 1]",
                    i + 1
                )));
            }
        }
        for i in 1..mu.len() {
            let defect = mu[i].ln() - mu[i - 1].ln();
            if defect > LOG_CONVEXITY_TOL {
                return Err(WeightError::NotLogConvex { n: i + 1, defect });
            }
        }
        let mut log_m = vec![0.0];
        for &m in &mu {
            log_m.push(log_m.last().unwrap() - m.ln());
        }
        let mut full_mu = vec![1.0];
        full_mu.extend_from_slice(&mu);
        Ok(MomentSequence {
            log_m,
            mu: full_mu,
        })
    }

    pub fn n_max(&self) -> usize {
        self.log_m.len() - 1
    }

    /// `log max(M_n, 1)`.
    pub fn log_moment(&self, n: usize) -> f64 {
        self.log_m[n]
    }

    /// `mu_n = M_{n-1} / M_n` for `1 <= n <= n_max`.
    pub fn mu(&self, n: usize) -> f64 {
        assert!(n >= 1, "mu is defined for n >= 1");
        self.mu[n]
    }

    /// Sum of `mu_n` over `from <= n <= n_max`.
    pub fn mu_tail_sum(&self, from: usize) -> f64 {
        assert!(from >= 1);
        self.mu[from.min(self.mu.len())..].iter().sum()
    }

    /// Ostrowski function `log rho(r) = sum_{n>=1} max(0, log r + log mu_n)`.
    pub fn log_rho(&self, r: f64) -> LogRho {
        assert!(r > 0.0 && r.is_finite(), "rho is evaluated at finite r > 0");
        let lr = r.ln();
        let mut value = 0.0;
        let mut last_term = 0.0;
        for n in 1..self.log_m.len() {
            last_term = lr + self.log_m[n - 1] - self.log_m[n];
            if last_term > 0.0 {
                value += last_term;
            }
        }
        LogRho {
            value,
            truncated: last_term > 0.0,
        }
    }
}

fn golden_max(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_895;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut hc = h(c);
    let mut hd = h(d);
    while b - a > tol {
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - INVPHI * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + INVPHI * (b - a);
            hd = h(d);
        }
    }
    0.5 * (a + b)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn base(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let left = base(fa, flm, fm, m - a);
        let right = base(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    rec(f, a, b, fa, fm, fb, base(fa, fm, fb, b - a), tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent brute force oracle for `log M_n`, a plain grid search
    /// over `t = e^x` on `[0, x_max]`.
    fn grid_log_moment(w: &Weight, n: usize, x_max: f64, steps: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let x = x_max * i as f64 / steps as f64;
            let v = n as f64 * x - w.log_weight(x.exp());
            if v > best {
                best = v;
            }
        }
        best
    }

    fn log_rho_sup_form(seq: &MomentSequence, r: f64) -> f64 {
        (0..=seq.n_max())
            .map(|n| n as f64 * r.ln() - seq.log_moment(n))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn band_limit_moments_are_powers_of_the_edge() {
        let w = Weight::band_limit(10.0).unwrap();
        for n in 0..6 {
            let expect = n as f64 * 10f64.ln();
            assert!((w.log_moment(n).unwrap() - expect).abs() < 1e-12);
        }
        let seq = w.moment_sequence(5).unwrap();
        for n in 1..=5 {
            assert!((seq.mu(n) - 0.1).abs() < 1e-12);
        }
        let rho = seq.log_rho(5.0);
        assert_eq!(rho.value, 0.0);
        assert!(!rho.truncated);
        let rho = seq.log_rho(20.0);
        assert!((rho.value - 5.0 * 2f64.ln()).abs() < 1e-12);
        assert!(rho.truncated);
    }

    #[test]
    fn power_exp_moments_match_closed_form_and_grid() {
        let w = Weight::power_exp(1.0, 1.0).unwrap();
        assert!((w.log_moment(2).unwrap() - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-12);
        assert_eq!(w.log_moment(1).unwrap(), -1.0);
        assert_eq!(w.log_moment(0).unwrap(), -1.0);

        let w = Weight::power_exp(1.0, 0.5).unwrap();
        assert!((w.log_moment(1).unwrap() - (4f64.ln() - 2.0)).abs() < 1e-12);
        for n in [1usize, 2, 5, 10] {
            let grid = grid_log_moment(&w, n, 20.0, 2_000_000);
            assert!(
                (w.log_moment(n).unwrap() - grid).abs() < 1e-6,
                "n = {n}"
            );
        }
    }

    #[test]
    fn end_point_moments_match_grid() {
        for w in [
            Weight::end_point(1.0, 0.25).unwrap(),
            Weight::end_point(0.5, 2.0).unwrap(),
        ] {
            for n in [0usize, 1, 3, 8] {
                let grid = grid_log_moment(&w, n, 20.0, 2_000_000);
                assert!(
                    (w.log_moment(n).unwrap() - grid).abs() < 1e-6,
                    "{w:?}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn envelope_lifts_small_moments_to_one() {
        let w = Weight::power_exp(1.0, 0.5).unwrap();
        assert!(w.log_moment(1).unwrap() < 0.0);
        let seq = w.moment_sequence(6).unwrap();
        assert_eq!(seq.log_moment(0), 0.0);
        assert_eq!(seq.log_moment(1), 0.0);
        assert_eq!(seq.mu(1), 1.0);
        let log_m2 = 2.0 * 16f64.ln() - 4.0;
        assert!((seq.log_moment(2) - log_m2).abs() < 1e-12);
        assert!((seq.mu(2) - (-log_m2).exp()).abs() < 1e-12);
        for n in 2..=6 {
            assert!(seq.mu(n) <= seq.mu(n - 1) + 1e-12);
        }
    }

    #[test]
    fn tabulated_evaluation_and_moments() {
        let knots = vec![(0.0, 0.0), (1.0, 2.0), (2.0, 5.0)];
        let w = Weight::tabulated(knots.clone(), None).unwrap();
        assert_eq!(w.log_weight(0.5), 0.0);
        assert!((w.log_weight(0.5f64.exp()) - 1.0).abs() < 1e-12);
        assert!((w.log_weight(1.5f64.exp()) - 3.5).abs() < 1e-12);
        assert!((w.log_weight(3.0f64.exp()) - 8.0).abs() < 1e-12);

        assert!((w.log_moment(2).unwrap() - 0.0).abs() < 1e-12);
        assert!((w.log_moment(3).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            w.log_moment(4),
            Err(WeightError::Divergent { n: 4 })
        ));

        let w5 = Weight::tabulated(knots.clone(), Some(5.0)).unwrap();
        assert!((w5.log_moment(4).unwrap() - 3.0).abs() < 1e-12);
        assert!((w5.log_weight(3.0f64.exp()) - 10.0).abs() < 1e-12);

        assert_eq!(w.pls_classify(), PlsClass::Undecidable);
        assert_eq!(w5.pls_classify(), PlsClass::Fails);
        assert!(matches!(w.log_integral(), Err(WeightError::Undecidable)));
        let expect = 2.0 + 1.0 / E + 2.0 / (E * E);
        assert!((w5.log_integral().unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn tabulated_constructor_rejects_bad_data() {
        assert!(Weight::tabulated(vec![(0.0, 0.0)], None).is_err());
        assert!(Weight::tabulated(vec![(0.0, 1.0), (1.0, 2.0)], None).is_err());
        assert!(Weight::tabulated(vec![(0.0, 0.0), (0.0, 1.0)], None).is_err());
        assert!(Weight::tabulated(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)], None).is_err());
        assert!(Weight::tabulated(vec![(0.0, 0.0), (1.0, 2.0)], Some(1.0)).is_err());
        assert!(Weight::tabulated(vec![(0.0, 0.0), (1.0, 2.0)], Some(f64::INFINITY)).is_err());
    }

    #[test]
    fn log_integral_matches_closed_forms() {
        let w = Weight::power_exp(1.0, 0.5).unwrap();
        assert!((w.log_integral().unwrap() - 2.0).abs() < 1e-8);
        let w = Weight::power_exp(0.3, 0.25).unwrap();
        assert!((w.log_integral().unwrap() - 0.4).abs() < 1e-8);
        assert_eq!(
            Weight::power_exp(2.0, 1.0).unwrap().log_integral().unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            Weight::end_point(1.0, 0.25).unwrap().log_integral().unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            Weight::band_limit(3.0).unwrap().log_integral().unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn classification_by_family() {
        assert_eq!(
            Weight::band_limit(2.0).unwrap().pls_classify(),
            PlsClass::Holds
        );
        assert_eq!(
            Weight::power_exp(0.5, 1.0).unwrap().pls_classify(),
            PlsClass::Holds
        );
        assert_eq!(
            Weight::power_exp(0.5, 0.7).unwrap().pls_classify(),
            PlsClass::Fails
        );
        assert_eq!(
            Weight::end_point(0.3, 4.0).unwrap().pls_classify(),
            PlsClass::Holds
        );
    }

    #[test]
    fn doubling_and_lipschitz_constants() {
        let w = Weight::end_point(1.0, 0.25).unwrap();
        assert!((w.doubling_constant().unwrap() - E).abs() < 1e-12);
        assert!((w.lipschitz_log().unwrap() - 0.25).abs() < 1e-12);

        let w = Weight::power_exp(0.7, 0.5).unwrap();
        assert!((w.doubling_constant().unwrap() - 0.5f64.exp()).abs() < 1e-12);
        assert!(w.lipschitz_log().is_none());

        let w = Weight::band_limit(4.0).unwrap();
        assert!(w.doubling_constant().is_none());
        assert!(w.lipschitz_log().is_none());

        let w = Weight::tabulated(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 5.0)], None).unwrap();
        assert!(w.doubling_constant().is_none());
        assert!((w.lipschitz_log().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rho_sum_form_equals_sup_form() {
        let seq = MomentSequence::from_ratios(vec![0.9, 0.7, 0.7, 0.3, 0.1]).unwrap();
        for i in 0..50 {
            let r = 0.5 * (10f64).powf(i as f64 / 12.0);
            let rho = seq.log_rho(r);
            let sup = log_rho_sup_form(&seq, r).max(0.0);
            assert!(
                (rho.value - sup).abs() <= 1e-9 * (1.0 + sup),
                "r = {r}"
            );
        }
    }

    #[test]
    fn moment_sequence_validation_errors() {
        assert!(matches!(
            MomentSequence::from_log_moments(vec![0.0, 2.0, 2.5, 4.0]),
            Err(WeightError::NotLogConvex { n: 1, .. })
        ));
        assert!(MomentSequence::from_log_moments(vec![0.0]).is_err());
        assert!(MomentSequence::from_log_moments(vec![0.0, f64::NAN]).is_err());
        assert!(matches!(
            MomentSequence::from_ratios(vec![0.5, 0.9]),
            Err(WeightError::NotLogConvex { n: 2, .. })
        ));
        assert!(MomentSequence::from_ratios(vec![1.5]).is_err());
        assert!(MomentSequence::from_ratios(vec![0.0]).is_err());
    }

    proptest! {
        #[test]
        fn moment_sequences_are_monotone_and_log_convex(
            c in 0.1f64..5.0,
            alpha in 0.1f64..1.0,
            delta in 0.1f64..1.0,
        ) {
            for w in [
                Weight::power_exp(c, alpha).unwrap(),
                Weight::end_point(delta, c).unwrap(),
            ] {
                let seq = w.moment_sequence(40).unwrap();
                for n in 1..=seq.n_max() {
                    prop_assert!(seq.mu(n) > 0.0 && seq.mu(n) <= 1.0);
                    if n >= 2 {
                        prop_assert!(seq.mu(n) <= seq.mu(n - 1) * (1.0 + 1e-9));
                    }
                    prop_assert!(seq.log_moment(n) + 1e-9 >= w.log_moment(n).unwrap());
                }
            }
        }

        #[test]
        fn rho_forms_agree_for_end_point_weights(r in 1.0f64..1e4) {
            let w = Weight::end_point(1.0, 0.25).unwrap();
            let seq = w.moment_sequence(60).unwrap();
            let rho = seq.log_rho(r);
            let sup = log_rho_sup_form(&seq, r).max(0.0);
            prop_assert!((rho.value - sup).abs() <= 1e-9 * (1.0 + sup));
        }
    }
}
