//! Numerical checks on the cyclic group `Z_N`.
//!
//! The discrete model uses the unitary transform
//! `f_hat(q) = N^{-1/2} sum_x f(x) e^{-2 pi i q x / N}`. For a frequency
//! set `Q` and a space set `E` the observability constant is the smallest
//! singular value of the synthesis submatrix
//! `A[e, q] = e^{2 pi i q e / N} / sqrt(N)`; it is the worst case fraction
//! of the norm of a `Q` supported function that survives restriction to
//! `E`, and `1 / sigma` is the recovery constant. Frequencies are read as
//! signed integers, `q > N/2` meaning `q - N`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::covers::{self, CoverError, GammaDensePlacement};
use crate::weights::{MomentSequence, Weight};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("the function is identically zero")]
    ZeroFunction,
    #[error("moment ratio tail {tail} at the cut is not below eps = {eps}")]
    TailTooFat { tail: f64, eps: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl From<CoverError> for VerifyError {
    fn from(e: CoverError) -> Self {
        VerifyError::InvalidParam(e.to_string())
    }
}

fn fft_in_place(buf: &mut [Complex<f64>], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// Forward unitary transform.
pub fn dft_unitary(values: &[Complex<f64>]) -> Vec<Complex<f64>> {
    assert!(!values.is_empty());
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    let s = 1.0 / (values.len() as f64).sqrt();
    for v in &mut buf {
        *v *= s;
    }
    buf
}

/// Inverse unitary transform.
pub fn idft_unitary(coeffs: &[Complex<f64>]) -> Vec<Complex<f64>> {
    assert!(!coeffs.is_empty());
    let mut buf = coeffs.to_vec();
    fft_in_place(&mut buf, true);
    let s = 1.0 / (coeffs.len() as f64).sqrt();
    for v in &mut buf {
        *v *= s;
    }
    buf
}

/// Frequency index as a signed integer in `(-N/2, N/2]`.
pub fn signed_freq(q: usize, n: usize) -> f64 {
    if q <= n / 2 {
        q as f64
    } else {
        q as f64 - n as f64
    }
}

fn check_indices(n: usize, idx: &[usize], what: &str) -> Result<(), VerifyError> {
    if idx.is_empty() {
        return Err(VerifyError::InvalidParam(format!("{what} must be nonempty")));
    }
    let mut seen = vec![false; n];
    for &i in idx {
        if i >= n {
            return Err(VerifyError::InvalidParam(format!(
                "{what} index {i} is outside 0..{n}"
            )));
        }
        if seen[i] {
            return Err(VerifyError::InvalidParam(format!(
                "{what} index {i} appears twice"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    /// Dense SVD of the synthesis submatrix. Exact but limited to
    /// moderate `N`.
    FullSvd,
    /// Gram matrix of the frequency columns assembled from one FFT of the
    /// space indicator, then inverse power iteration on its smallest
    /// eigenvalue. Scales to large `N` when `|Q|` is small.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observability {
    pub sigma_min: f64,
    pub method: SigmaMethod,
    /// Set when the submatrix is rank deficient to working precision.
    pub singular: bool,
}

const SINGULAR_SIGMA: f64 = 1e-14;

/// Smallest singular value of the restriction of `Q` supported functions
/// to `E`. More frequencies than samples is rank deficient outright and
/// reports zero without computing.
pub fn observability_constant(
    n: usize,
    freqs: &[usize],
    space: &[usize],
    method: SigmaMethod,
) -> Result<Observability, VerifyError> {
    if n == 0 {
        return Err(VerifyError::InvalidParam("N must be positive".into()));
    }
    check_indices(n, freqs, "frequency")?;
    check_indices(n, space, "space")?;
    if freqs.len() > space.len() {
        return Ok(Observability {
            sigma_min: 0.0,
            method,
            singular: true,
        });
    }
    let sigma = match method {
        SigmaMethod::FullSvd => {
            if n > 8192 {
                return Err(VerifyError::InvalidParam(
                    "the full SVD handles N up to 8192, use the iterative method".into(),
                ));
            }
            let scale = 1.0 / (n as f64).sqrt();
            let a = DMatrix::from_fn(space.len(), freqs.len(), |r, c| {
                let k = (freqs[c] * space[r]) % n;
                Complex::from_polar(scale, 2.0 * PI * k as f64 / n as f64)
            });
            let svd = a.try_svd(false, false, f64::EPSILON, 0).ok_or_else(|| {
                VerifyError::InvalidParam("the SVD did not converge".into())
            })?;
            svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
        }
        SigmaMethod::Iterative => {
            if freqs.len() > 4096 {
                return Err(VerifyError::InvalidParam(
                    "the Gram matrix is limited to 4096 frequencies".into(),
                ));
            }
            let mut chi = vec![Complex::new(0.0, 0.0); n];
            for &x in space {
                chi[x] = Complex::new(1.0, 0.0);
            }
            fft_in_place(&mut chi, true);
            let m = freqs.len();
            let g = DMatrix::from_fn(m, m, |i, j| chi[(freqs[j] + n - freqs[i]) % n] / n as f64);
            let g = (&g + g.adjoint()).scale(0.5);
            match smallest_eigenvalue(&g)? {
                None => 0.0,
                Some(lambda) => lambda.max(0.0).sqrt(),
            }
        }
    };
    let sigma = sigma.clamp(0.0, 1.0);
    Ok(Observability {
        sigma_min: sigma,
        method,
        singular: sigma < SINGULAR_SIGMA,
    })
}

/// Inverse power iteration on a Hermitian positive definite matrix.
/// `Ok(None)` means the Cholesky factorization failed, so the matrix is
/// numerically semidefinite and the smallest eigenvalue is zero to
/// working precision.
fn smallest_eigenvalue(g: &DMatrix<Complex<f64>>) -> Result<Option<f64>, VerifyError> {
    let m = g.nrows();
    let Some(chol) = Cholesky::new(g.clone()) else {
        return Ok(None);
    };
    let mut best: Option<(f64, f64)> = None;
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(97 + attempt);
        let x0 = DVector::from_fn(m, |_, _| {
            Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if x0.norm() == 0.0 {
            continue;
        }
        let mut x = x0.unscale(x0.norm());
        for _ in 0..800 {
            let y = chol.solve(&x);
            let ny = y.norm();
            if !ny.is_finite() || ny == 0.0 {
                break;
            }
            x = y.unscale(ny);
            let gx = g * &x;
            let lambda = x.dotc(&gx).re;
            let rel = (&gx - x.scale(lambda)).norm() / lambda.abs().max(f64::MIN_POSITIVE);
            if best.is_none_or(|(r, _)| rel < r) {
                best = Some((rel, lambda));
            }
            if rel <= 1e-10 {
                return Ok(Some(lambda));
            }
        }
        if let Some((rel, lambda)) = best {
            if rel <= 1e-8 {
                return Ok(Some(lambda));
            }
        }
    }
    match best {
        Some((rel, lambda)) if rel <= 1e-8 => Ok(Some(lambda)),
        _ => Err(VerifyError::InvalidParam(
            "the inverse power iteration did not converge".into(),
        )),
    }
}

#[derive(Debug, Clone)]
pub enum SpectrumProfile {
    /// Independent unit complex Gaussian coefficients on the given
    /// frequencies.
    Mask,
    /// Gaussian coefficients damped by the weight at the signed
    /// frequency. If the weighted to plain norm ratio still lands above
    /// the budget `0.995 c_w^2`, the zero frequency coefficient is
    /// enlarged to bring it exactly onto the budget.
    Decay { weight: Weight, c_w: f64 },
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    /// Spectral coefficients, index equals frequency.
    pub coeffs: Vec<Complex<f64>>,
    /// Inverse unitary transform of the coefficients.
    pub values: Vec<Complex<f64>>,
    /// Achieved `||W f_hat|| / ||f_hat||`, for decay profiles.
    pub norm_ratio: Option<f64>,
    /// Whether the zero frequency coefficient was enlarged.
    pub balanced: bool,
}

fn unit_gaussian(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn synth_from_profile(
    n: usize,
    freqs: &[usize],
    profile: &SpectrumProfile,
    seed: u64,
) -> Result<Synthesis, VerifyError> {
    if n < 2 {
        return Err(VerifyError::InvalidParam("N must be at least 2".into()));
    }
    check_indices(n, freqs, "frequency")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex::new(0.0, 0.0); n];
    let mut norm_ratio = None;
    let mut balanced = false;
    match profile {
        SpectrumProfile::Mask => {
            for &q in freqs {
                coeffs[q] = unit_gaussian(&mut rng);
            }
        }
        SpectrumProfile::Decay { weight, c_w } => {
            if !c_w.is_finite() || *c_w <= 1.0 {
                return Err(VerifyError::InvalidParam(format!(
                    "c_w = {c_w} must be finite and above one"
                )));
            }
            let budget = 0.995 * c_w * c_w;
            if budget <= 1.0 {
                return Err(VerifyError::InvalidParam(format!(
                    "c_w = {c_w} leaves no room under the budget"
                )));
            }
            let mut log_w = Vec::with_capacity(freqs.len());
            for &q in freqs {
                let g = unit_gaussian(&mut rng);
                let lw = weight.log_weight(signed_freq(q, n).abs());
                log_w.push(lw);
                coeffs[q] = g * (-lw).exp();
            }
            let mut plain = 0.0;
            let mut weighted = 0.0;
            for (i, &q) in freqs.iter().enumerate() {
                let a2 = coeffs[q].norm_sqr();
                if a2 > 0.0 {
                    plain += a2;
                    weighted += (a2.ln() + 2.0 * log_w[i]).exp();
                }
            }
            if plain == 0.0 {
                return Err(VerifyError::ZeroFunction);
            }
            if weighted / plain > budget {
                let Some(&q0) = freqs.iter().find(|&&q| signed_freq(q, n) == 0.0) else {
                    return Err(VerifyError::InvalidParam(
                        "the zero frequency is needed to balance the weighted ratio".into(),
                    ));
                };
                let a0 = coeffs[q0].norm_sqr();
                let plain_rest = plain - a0;
                let weighted_rest = weighted - a0;
                let alpha_sq = (weighted_rest - budget * plain_rest) / (budget - 1.0);
                coeffs[q0] = Complex::new(alpha_sq.sqrt(), 0.0);
                plain = plain_rest + alpha_sq;
                weighted = weighted_rest + alpha_sq;
                balanced = true;
            }
            norm_ratio = Some((weighted / plain).sqrt());
        }
    }
    if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(VerifyError::ZeroFunction);
    }
    let values = idft_unitary(&coeffs);
    Ok(Synthesis {
        coeffs,
        values,
        norm_ratio,
        balanced,
    })
}

/// Fraction of the norm of `values` that lives on `space`.
pub fn recovery_ratio(values: &[Complex<f64>], space: &[usize]) -> Result<f64, VerifyError> {
    check_indices(values.len(), space, "space")?;
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Err(VerifyError::ZeroFunction);
    }
    let kept: f64 = space.iter().map(|&x| values[x].norm_sqr()).sum();
    Ok((kept / total).sqrt().min(1.0))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// A compactly supported test profile built from a moment sequence. The
/// transform is
/// `M_{n0-1} sinc(eps xi / n0)^{2 n0} prod_{n >= n0} sinc(mu_n xi)`,
/// an even function supported in `[-3 eps, 3 eps]` on the space side:
/// the sinc power contributes support `2 eps` and the ratio tail at most
/// `eps` more, which is what the tail sum condition guards.
#[derive(Debug, Clone)]
pub struct PaleyWienerProfile {
    /// Transform values on the requested grid.
    pub values: Vec<f64>,
    pub log_amplitude: f64,
    pub eps: f64,
    pub n0: usize,
    /// `mu_n` for `n = n0 ..= n_max`.
    pub mu_tail: Vec<f64>,
}

impl PaleyWienerProfile {
    /// Log of a pointwise upper bound for `|f_hat(xi)|`, from
    /// `|sinc(x)| <= min(1, 1/|x|)` factor by factor. Telescoping the
    /// ratio factors turns it into the moment envelope
    /// `min_k M_{n0-1+k} / |xi|^k` shrunk further by the sinc power.
    pub fn log_tail_bound(&self, xi: f64) -> f64 {
        let ax = xi.abs();
        let mut lb = self.log_amplitude;
        let b = self.eps / self.n0 as f64 * ax;
        if b > 1.0 {
            lb -= 2.0 * self.n0 as f64 * b.ln();
        }
        for &mu in &self.mu_tail {
            if mu * ax > 1.0 {
                lb -= (mu * ax).ln();
            }
        }
        lb
    }
}

pub fn paley_wiener_profile(
    m: &MomentSequence,
    eps: f64,
    n0: usize,
    xi: &[f64],
) -> Result<PaleyWienerProfile, VerifyError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(VerifyError::InvalidParam(format!(
            "eps = {eps} must be positive and finite"
        )));
    }
    if n0 < 10 {
        return Err(VerifyError::InvalidParam("n0 must be at least 10".into()));
    }
    if n0 > m.n_max() {
        return Err(VerifyError::InvalidParam(format!(
            "n0 = {n0} exceeds the sequence length {}",
            m.n_max()
        )));
    }
    let tail = m.mu_tail_sum(n0);
    if tail >= eps {
        return Err(VerifyError::TailTooFat { tail, eps });
    }
    let log_amplitude = m.log_moment(n0 - 1);
    let amplitude = log_amplitude.exp();
    let mu_tail: Vec<f64> = (n0..=m.n_max()).map(|k| m.mu(k)).collect();
    let b = eps / n0 as f64;
    let mut values = Vec::with_capacity(xi.len());
    for &x in xi {
        if !x.is_finite() {
            return Err(VerifyError::InvalidParam(format!(
                "grid point {x} is not finite"
            )));
        }
        let mut v = amplitude * sinc(b * x).powi(2 * n0 as i32);
        for &mu in &mu_tail {
            v *= sinc(mu * x);
        }
        values.push(v);
    }
    Ok(PaleyWienerProfile {
        values,
        log_amplitude,
        eps,
        n0,
        mu_tail,
    })
}

/// Trapezoid rule for `int |f_hat|^2 W^2` on the given grid. A zero
/// profile value kills its term even where the weight is infinite, and a
/// log integrand above 700 makes the result infinite rather than
/// overflowing quietly.
pub fn weighted_energy(
    xi: &[f64],
    f_hat: &[f64],
    w: Option<&Weight>,
) -> Result<f64, VerifyError> {
    if xi.len() != f_hat.len() {
        return Err(VerifyError::InvalidParam(format!(
            "grid has {} points but the profile has {}",
            xi.len(),
            f_hat.len()
        )));
    }
    if xi.len() < 2 {
        return Err(VerifyError::InvalidParam(
            "the grid needs at least two points".into(),
        ));
    }
    for pair in xi.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(VerifyError::InvalidParam(format!(
                "grid is not strictly increasing at {} .. {}",
                pair[0], pair[1]
            )));
        }
    }
    let term = |i: usize| -> f64 {
        let v = f_hat[i].abs();
        if v == 0.0 {
            return 0.0;
        }
        let mut s = 2.0 * v.ln();
        if let Some(w) = w {
            s += 2.0 * w.log_weight(xi[i].abs());
        }
        if s > 700.0 {
            f64::INFINITY
        } else {
            s.exp()
        }
    };
    let mut total = 0.0;
    let mut left = term(0);
    for i in 1..xi.len() {
        let right = term(i);
        total += 0.5 * (xi[i] - xi[i - 1]) * (left + right);
        left = right;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    /// Relative gap between the restricted spatial norm of the spectral
    /// derivative and the direct multiplier sum.
    pub rel_err: f64,
    /// `||D^order f|| / ||f||`; a pure tone at frequency `k` gives
    /// `(2 pi k)^order`.
    pub derivative_gain: f64,
}

pub fn plancherel_derivative_check(
    values: &[Complex<f64>],
    order: u32,
) -> Result<DerivativeCheck, VerifyError> {
    if values.is_empty() {
        return Err(VerifyError::InvalidParam("empty sample vector".into()));
    }
    if order == 0 || order > 4 {
        return Err(VerifyError::InvalidParam(format!(
            "order {order} must be between 1 and 4"
        )));
    }
    let n = values.len();
    let norm_f_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    if norm_f_sq == 0.0 {
        return Err(VerifyError::ZeroFunction);
    }
    let coeffs = dft_unitary(values);
    let mut spec = coeffs.clone();
    let mut direct = 0.0;
    for (q, c) in spec.iter_mut().enumerate() {
        let k = signed_freq(q, n);
        direct += (2.0 * PI * k.abs()).powi(2 * order as i32) * c.norm_sqr();
        *c *= Complex::new(0.0, 2.0 * PI * k).powu(order);
    }
    let deriv = idft_unitary(&spec);
    let spatial: f64 = deriv.iter().map(|v| v.norm_sqr()).sum();
    let rel_err = (spatial - direct).abs() / direct.max(f64::MIN_POSITIVE);
    Ok(DerivativeCheck {
        rel_err,
        derivative_gain: (spatial / norm_f_sq).sqrt(),
    })
}

/// Indicator of the depth level digit restricted Cantor set on
/// `0 .. base^depth`: a point belongs when every base digit lies in
/// `digits`. Matches [`covers::cantor_set`] with `length = base^depth`
/// through cell midpoints.
pub fn cantor_mask(base: u32, digits: &[u32], depth: u32) -> Result<Vec<bool>, VerifyError> {
    if base < 3 {
        return Err(VerifyError::InvalidParam("base must be at least 3".into()));
    }
    if digits.is_empty() {
        return Err(VerifyError::InvalidParam("digits must be nonempty".into()));
    }
    for w in digits.windows(2) {
        if w[0] >= w[1] {
            return Err(VerifyError::InvalidParam(
                "digits must be strictly increasing".into(),
            ));
        }
    }
    if *digits.last().unwrap() >= base {
        return Err(VerifyError::InvalidParam(format!(
            "digit {} is not below the base {base}",
            digits.last().unwrap()
        )));
    }
    let len = (base as usize)
        .checked_pow(depth)
        .filter(|&l| l <= 20_000_000)
        .ok_or_else(|| {
            VerifyError::InvalidParam(format!("base^depth = {base}^{depth} is too large"))
        })?;
    let keep: Vec<bool> = (0..base).map(|d| digits.contains(&d)).collect();
    let mut mask = Vec::with_capacity(len);
    for x in 0..len {
        let mut v = x;
        let mut ok = true;
        for _ in 0..depth {
            if !keep[v % base as usize] {
                ok = false;
                break;
            }
            v /= base as usize;
        }
        mask.push(ok);
    }
    Ok(mask)
}

/// Indicator on `0 .. block * cells` of a gamma dense union scaled by
/// `block`: sample `x` belongs when the continuum set contains the cell
/// midpoint `(x + 1/2) / block`.
pub fn gamma_dense_mask(
    gamma: f64,
    block: usize,
    cells: usize,
    placement: GammaDensePlacement,
) -> Result<Vec<bool>, VerifyError> {
    if block == 0 || cells == 0 {
        return Err(VerifyError::InvalidParam(
            "block and cells must be positive".into(),
        ));
    }
    if block.checked_mul(cells).is_none_or(|l| l > 20_000_000) {
        return Err(VerifyError::InvalidParam(format!(
            "{block} * {cells} samples is too large"
        )));
    }
    let union = covers::gamma_dense_intervals(gamma, (0.0, cells as f64), placement)?;
    Ok((0..block * cells)
        .map(|x| union.contains((x as f64 + 0.5) / block as f64))
        .collect())
}
