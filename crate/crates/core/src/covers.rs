//! Short covers of frequency sets organized by scale.
//!
//! Scale `n` owns the band `e^n <= |t| <= e^{n+1}` together with its
//! negative mirror and carries the length `Omega_n = log W(e^n)`. A short
//! cover places intervals of length `Omega_n` over the part of the target
//! inside that band, and its size is `sum_n card_n (Omega_n / e^n)^2`.
//! Frequencies with `|t| < 1` sit below every scale and are never covered.
//! Closed bands overlap at their endpoints, so a frequency exactly at
//! `e^{n+1}` is seen by scales `n` and `n + 1`; covering it at either one
//! is enough.

use std::collections::BTreeMap;
use std::f64::consts::E;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::intervals::{IntervalError, IntervalSet};
use crate::weights::Weight;

/// Scales whose length exceeds a quarter of the band width are rejected
/// with this much relative slack for round off.
const HYPOTHESIS_SLACK: f64 = 1e-12;

/// Hard cap on the total number of intervals a single cover may hold.
pub const MAX_COVER_INTERVALS: usize = 4_000_000;

#[derive(Debug, Error)]
pub enum CoverError {
    /// `log W(e^n) > e^n / 4`: the scale length outgrows its band.
    #[error("scale hypothesis violated: {0}")]
    HypothesisViolation(String),
    /// `log W(e^n) <= 0`: the scale carries no length.
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl From<IntervalError> for CoverError {
    fn from(e: IntervalError) -> Self {
        CoverError::InvalidParam(e.to_string())
    }
}

/// Length `Omega_n = log W(e^n)` of scale `n`, checked against the
/// hypotheses `0 < Omega_n <= e^n / 4`.
pub fn omega_scale(w: &Weight, n: u32) -> Result<f64, CoverError> {
    let t = E.powi(n as i32);
    let omega = w.log_weight(t);
    if omega.is_nan() || omega <= 0.0 {
        return Err(CoverError::DegenerateScale(format!(
            "log W(e^{n}) = {omega} carries no length"
        )));
    }
    if omega > t / 4.0 + HYPOTHESIS_SLACK * t {
        return Err(CoverError::HypothesisViolation(format!(
            "log W(e^{n}) = {omega} exceeds a quarter of the band width e^{n}"
        )));
    }
    Ok(omega)
}

/// The intervals a cover uses at one scale. They are kept in placement
/// order and may touch or overlap; they are deliberately not an
/// [`IntervalSet`], whose normal form would merge them and lose the count.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCover {
    pub omega: f64,
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverFamily {
    pub scales: BTreeMap<u32, ScaleCover>,
    /// `sum_n card_n (Omega_n / e^n)^2`, accumulated in scale order.
    pub norm: f64,
}

impl CoverFamily {
    pub fn recompute_norm(&self) -> f64 {
        let mut norm = 0.0;
        for (&n, sc) in &self.scales {
            let ratio = sc.omega / E.powi(n as i32);
            norm += sc.intervals.len() as f64 * ratio * ratio;
        }
        norm
    }

    pub fn total_intervals(&self) -> usize {
        self.scales.values().map(|sc| sc.intervals.len()).sum()
    }

    pub fn scale_counts(&self) -> Vec<(u32, usize)> {
        self.scales
            .iter()
            .map(|(&n, sc)| (n, sc.intervals.len()))
            .collect()
    }

    pub fn scale_range(&self) -> Option<(u32, u32)> {
        let lo = self.scales.keys().next()?;
        let hi = self.scales.keys().next_back()?;
        Some((*lo, *hi))
    }
}

fn top_scale(target: &IntervalSet) -> Option<u32> {
    let max_abs = target
        .iter()
        .map(|(a, b)| a.abs().max(b.abs()))
        .fold(f64::NEG_INFINITY, f64::max);
    if max_abs >= 1.0 {
        Some(max_abs.ln().floor() as u32)
    } else {
        None
    }
}

fn scale_slice(target: &IntervalSet, n: u32) -> (IntervalSet, IntervalSet) {
    let lo = E.powi(n as i32);
    let hi = E.powi(n as i32 + 1);
    (target.window(-hi, -lo), target.window(lo, hi))
}

fn greedy_component(
    slice: &IntervalSet,
    omega: f64,
    intervals: &mut Vec<(f64, f64)>,
    budget: &mut usize,
) -> Result<(), CoverError> {
    let mut cursor = f64::NEG_INFINITY;
    while let Some(p) = slice.first_point_beyond(cursor) {
        *budget += 1;
        if *budget > MAX_COVER_INTERVALS {
            return Err(CoverError::InvalidParam(format!(
                "cover needs more than {MAX_COVER_INTERVALS} intervals"
            )));
        }
        intervals.push((p, p + omega));
        cursor = p + omega;
    }
    Ok(())
}

/// Covers each scale slice of `target` greedily from the left: every
/// interval starts at the infimum of the part not yet covered.
pub fn greedy_short_cover(target: &IntervalSet, w: &Weight) -> Result<CoverFamily, CoverError> {
    let mut scales = BTreeMap::new();
    let mut norm = 0.0;
    let mut budget = 0usize;
    if let Some(n_top) = top_scale(target) {
        for n in 0..=n_top {
            let (neg, pos) = scale_slice(target, n);
            if neg.is_empty() && pos.is_empty() {
                continue;
            }
            let omega = omega_scale(w, n)?;
            let mut intervals = Vec::new();
            greedy_component(&neg, omega, &mut intervals, &mut budget)?;
            greedy_component(&pos, omega, &mut intervals, &mut budget)?;
            let ratio = omega / E.powi(n as i32);
            norm += intervals.len() as f64 * ratio * ratio;
            scales.insert(n, ScaleCover { omega, intervals });
        }
    }
    Ok(CoverFamily { scales, norm })
}

/// Checks that `family` covers `target` scale by scale: the stored scale
/// lengths match the weight, no interval is longer than its scale allows,
/// and each nonempty slice of the target is covered up to finitely many
/// boundary points.
pub fn check_cover(
    family: &CoverFamily,
    target: &IntervalSet,
    w: &Weight,
) -> Result<(), CoverError> {
    let Some(n_top) = top_scale(target) else {
        return Ok(());
    };
    for n in 0..=n_top {
        let (neg, pos) = scale_slice(target, n);
        if neg.is_empty() && pos.is_empty() {
            continue;
        }
        let Some(sc) = family.scales.get(&n) else {
            return Err(CoverError::NotACover(format!("scale {n} is missing")));
        };
        let omega = omega_scale(w, n)?;
        if (sc.omega - omega).abs() > 1e-9 * omega.max(1.0) {
            return Err(CoverError::NotACover(format!(
                "scale {n} stores length {} but the weight gives {omega}",
                sc.omega
            )));
        }
        for &(a, b) in &sc.intervals {
            if b - a > omega * (1.0 + 1e-9) {
                return Err(CoverError::NotACover(format!(
                    "interval ({a}, {b}) at scale {n} is longer than {omega}"
                )));
            }
        }
        let union = IntervalSet::new(sc.intervals.clone())?;
        for slice in [&neg, &pos] {
            let missed = slice.difference(&union);
            if !missed.is_empty() {
                return Err(CoverError::NotACover(format!(
                    "scale {n} leaves measure {} uncovered",
                    missed.measure()
                )));
            }
        }
    }
    Ok(())
}

/// Rebuilds a cover in regular position: at each scale the intervals are
/// centered at points of the target that are maximally `Omega_n / 2`
/// separated, chosen left to right. Consecutive intervals then overlap in
/// at most a half, so their half intervals have disjoint interiors.
pub fn regularize_cover(target: &IntervalSet, w: &Weight) -> Result<CoverFamily, CoverError> {
    let mut scales = BTreeMap::new();
    let mut norm = 0.0;
    let mut budget = 0usize;
    if let Some(n_top) = top_scale(target) {
        for n in 0..=n_top {
            let (neg, pos) = scale_slice(target, n);
            if neg.is_empty() && pos.is_empty() {
                continue;
            }
            let omega = omega_scale(w, n)?;
            let half = 0.5 * omega;
            let mut intervals = Vec::new();
            for slice in [&neg, &pos] {
                let mut next = slice.first_point_at_or_after(f64::NEG_INFINITY);
                while let Some(p) = next {
                    budget += 1;
                    if budget > MAX_COVER_INTERVALS {
                        return Err(CoverError::InvalidParam(format!(
                            "cover needs more than {MAX_COVER_INTERVALS} intervals"
                        )));
                    }
                    intervals.push((p - half, p + half));
                    next = slice.first_point_at_or_after(p + half);
                }
            }
            let ratio = omega / E.powi(n as i32);
            norm += intervals.len() as f64 * ratio * ratio;
            scales.insert(n, ScaleCover { omega, intervals });
        }
    }
    Ok(CoverFamily { scales, norm })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityEstimate {
    pub value: f64,
    /// The shift realizing the maximum.
    pub shift: f64,
}

/// Lower bound for the shift invariant cover size
/// `sup_s inf_cover size(cover of target + s)`. The supremum is sampled at
/// zero, at shifts putting each endpoint of the target at the origin, and
/// at any caller supplied shifts; each sample is the greedy cover's size,
/// an upper bound on the optimal one at that shift.
pub fn sparsity_estimate(
    target: &IntervalSet,
    w: &Weight,
    extra_shifts: &[f64],
) -> Result<SparsityEstimate, CoverError> {
    if target.is_empty() {
        return Ok(SparsityEstimate {
            value: 0.0,
            shift: 0.0,
        });
    }
    let mut shifts = vec![0.0];
    for (a, b) in target.iter() {
        shifts.push(-a);
        shifts.push(-b);
    }
    shifts.extend_from_slice(extra_shifts);
    let mut best = SparsityEstimate {
        value: f64::NEG_INFINITY,
        shift: 0.0,
    };
    for &s in &shifts {
        if !s.is_finite() {
            return Err(CoverError::InvalidParam(format!("shift {s} is not finite")));
        }
        let family = greedy_short_cover(&target.translate(s), w)?;
        if family.norm > best.value {
            best = SparsityEstimate {
                value: family.norm,
                shift: s,
            };
        }
    }
    Ok(best)
}

/// Log of the smooth majorant attached to a regular cover:
/// `sqrt(max(1, |t|))` plus, for every interval `J` at a scale with
/// `Omega_n >= 4`, a trapezoid bump of height `Omega_{n+2}` that is flat
/// on `2J` and vanishes outside `3J`. On the covered part of the target
/// the bump alone dominates `log W`, since there `t` lies in `2J` and
/// `log W(t) <= Omega_{n+1} <= Omega_{n+2}`.
pub fn majorant_log_weight(
    family: &CoverFamily,
    w: &Weight,
    t: f64,
) -> Result<f64, CoverError> {
    if !t.is_finite() {
        return Err(CoverError::InvalidParam(format!("t = {t} is not finite")));
    }
    let mut phi = t.abs().max(1.0).sqrt();
    for (&n, sc) in &family.scales {
        if sc.omega < 4.0 {
            continue;
        }
        let bump = omega_scale(w, n + 2)?;
        for &(a, b) in &sc.intervals {
            let c = 0.5 * (a + b);
            let d = (t - c).abs();
            let eta = if d <= sc.omega {
                1.0
            } else {
                ((1.5 * sc.omega - d) / (0.5 * sc.omega)).max(0.0)
            };
            phi += bump * eta;
        }
    }
    Ok(phi)
}

/// Size bound for any cover whose per scale counts are controlled by a
/// nondecreasing `phi`: the scale `n` part contributes at most
/// `2 phi(8 (n + 1)) / n^2`. Scales past `n_max` are bounded through the
/// declared growth exponent of `phi`; an exponent of one or more makes
/// the tail diverge and the bound is infinite.
pub fn phi_regular_norm_bound(
    phi: impl Fn(f64) -> f64,
    n_max: u32,
    tail_exponent: f64,
) -> Result<f64, CoverError> {
    if n_max < 1 {
        return Err(CoverError::InvalidParam("n_max must be at least 1".into()));
    }
    if !tail_exponent.is_finite() {
        return Err(CoverError::InvalidParam(
            "tail exponent must be finite".into(),
        ));
    }
    let mut partial = 0.0;
    for n in 1..=n_max {
        let v = phi(8.0 * (n as f64 + 1.0));
        if !(v >= 0.0) || !v.is_finite() {
            return Err(CoverError::InvalidParam(format!(
                "phi(8 ({n} + 1)) = {v} is not a finite count"
            )));
        }
        partial += 2.0 * v / (n as f64 * n as f64);
    }
    if tail_exponent >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let last_arg = 8.0 * (n_max as f64 + 1.0);
    let c = phi(last_arg) / last_arg.powf(tail_exponent);
    let tail = 2.0 * c * 16f64.powf(tail_exponent) * (n_max as f64).powf(tail_exponent - 1.0)
        / (1.0 - tail_exponent);
    Ok(partial + tail)
}

/// Digit restricted Cantor set: starting from `[0, length]`, each level
/// keeps the `base` adic subintervals whose digit lies in `digits`.
/// Children sharing an endpoint merge, so `digits = [0, 1]` produces
/// solid blocks.
pub fn cantor_set(
    base: u32,
    digits: &[u32],
    depth: u32,
    length: f64,
) -> Result<IntervalSet, CoverError> {
    if base < 3 {
        return Err(CoverError::InvalidParam("base must be at least 3".into()));
    }
    if digits.is_empty() {
        return Err(CoverError::InvalidParam("digits must be nonempty".into()));
    }
    for w in digits.windows(2) {
        if w[0] >= w[1] {
            return Err(CoverError::InvalidParam(
                "digits must be strictly increasing".into(),
            ));
        }
    }
    if *digits.last().unwrap() >= base {
        return Err(CoverError::InvalidParam(format!(
            "digit {} is not below the base {base}",
            digits.last().unwrap()
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(CoverError::InvalidParam(format!(
            "length {length} must be positive and finite"
        )));
    }
    let count = (digits.len() as f64).powi(depth as i32);
    if count > 2_000_000.0 {
        return Err(CoverError::InvalidParam(format!(
            "{} digits at depth {depth} give {count:.0} pieces",
            digits.len()
        )));
    }
    let mut starts = vec![0.0f64];
    let mut len = length;
    for _ in 0..depth {
        len /= base as f64;
        let mut next = Vec::with_capacity(starts.len() * digits.len());
        for &s in &starts {
            for &d in digits {
                next.push(s + d as f64 * len);
            }
        }
        starts = next;
    }
    Ok(IntervalSet::new(
        starts.iter().map(|&s| (s, s + len)).collect(),
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaDensePlacement {
    /// The subinterval sits at the left edge of its cell.
    Left,
    /// The offset inside each cell is uniform, seeded for reproducibility.
    Random(u64),
}

/// A set meeting every unit cell of the window in an interval of length
/// `gamma`. Cells cut by the window boundary contribute their clipped
/// part.
pub fn gamma_dense_intervals(
    gamma: f64,
    window: (f64, f64),
    placement: GammaDensePlacement,
) -> Result<IntervalSet, CoverError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(CoverError::InvalidParam(format!(
            "gamma = {gamma} must lie in (0, 1]"
        )));
    }
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(CoverError::InvalidParam(format!(
            "window ({lo}, {hi}) must be finite and ordered"
        )));
    }
    let k0 = lo.floor() as i64;
    let k1 = hi.ceil() as i64;
    if k1 - k0 > 10_000_000 {
        return Err(CoverError::InvalidParam(format!(
            "window spans {} cells",
            k1 - k0
        )));
    }
    let mut rng = match placement {
        GammaDensePlacement::Left => None,
        GammaDensePlacement::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut ivs = Vec::new();
    for k in k0..k1 {
        let offset = match rng.as_mut() {
            None => 0.0,
            Some(r) => r.random::<f64>() * (1.0 - gamma),
        };
        let a = k as f64 + offset;
        let b = a + gamma;
        let a2 = a.max(lo);
        let b2 = b.min(hi);
        if a2 <= b2 {
            ivs.push((a2, b2));
        }
    }
    Ok(IntervalSet::new(ivs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn set(ivs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(ivs.to_vec()).unwrap()
    }

    #[test]
    fn omega_scale_values_and_hypotheses() {
        let w = Weight::end_point(1.0, 0.25).unwrap();
        let omega0 = omega_scale(&w, 0).unwrap();
        assert!((omega0 - 0.25 / (E + 1.0).ln()).abs() < 1e-15);

        let w = Weight::power_exp(0.25, 1.0).unwrap();
        assert_eq!(omega_scale(&w, 0).unwrap(), 0.25);
        assert_eq!(omega_scale(&w, 1).unwrap(), 0.25 * E);

        let w = Weight::power_exp(0.3, 1.0).unwrap();
        assert!(matches!(
            omega_scale(&w, 0),
            Err(CoverError::HypothesisViolation(_))
        ));

        let w = Weight::band_limit(10.0).unwrap();
        assert!(matches!(
            omega_scale(&w, 0),
            Err(CoverError::DegenerateScale(_))
        ));
        assert!(matches!(
            omega_scale(&w, 3),
            Err(CoverError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn greedy_cover_of_a_unit_interval_is_exact() {
        let w = Weight::power_exp(0.25, 1.0).unwrap();
        let target = set(&[(3.0, 4.0)]);
        let family = greedy_short_cover(&target, &w).unwrap();

        assert_eq!(family.scales.len(), 1);
        let sc = &family.scales[&1];
        let omega = 0.25 * E;
        assert_eq!(sc.omega, omega);
        assert_eq!(sc.intervals.len(), 2);
        assert_eq!(sc.intervals[0], (3.0, 3.0 + omega));
        assert_eq!(sc.intervals[1], (3.0 + omega, 3.0 + 2.0 * omega));
        assert_eq!(family.norm, 0.125);
        assert_eq!(family.recompute_norm(), 0.125);
        check_cover(&family, &target, &w).unwrap();

        let mirrored = set(&[(-4.0, -3.0), (3.0, 4.0)]);
        let family = greedy_short_cover(&mirrored, &w).unwrap();
        assert_eq!(family.scales[&1].intervals.len(), 4);
        assert_eq!(family.norm, 0.25);
        check_cover(&family, &mirrored, &w).unwrap();

        let empty = greedy_short_cover(&IntervalSet::empty(), &w).unwrap();
        assert!(empty.scales.is_empty());
        assert_eq!(empty.norm, 0.0);

        let low = greedy_short_cover(&set(&[(-0.5, 0.5)]), &w).unwrap();
        assert!(low.scales.is_empty());
    }

    #[test]
    fn check_cover_flags_defects() {
        let w = Weight::power_exp(0.25, 1.0).unwrap();
        let target = set(&[(3.0, 4.0)]);
        let good = greedy_short_cover(&target, &w).unwrap();

        let mut missing = good.clone();
        missing.scales.clear();
        assert!(matches!(
            check_cover(&missing, &target, &w),
            Err(CoverError::NotACover(_))
        ));

        let mut short = good.clone();
        short.scales.get_mut(&1).unwrap().intervals.pop();
        assert!(matches!(
            check_cover(&short, &target, &w),
            Err(CoverError::NotACover(_))
        ));

        let mut long = good.clone();
        long.scales.get_mut(&1).unwrap().intervals = vec![(3.0, 4.0)];
        assert!(matches!(
            check_cover(&long, &target, &w),
            Err(CoverError::NotACover(_))
        ));

        let mut stale = good;
        stale.scales.get_mut(&1).unwrap().omega *= 2.0;
        assert!(matches!(
            check_cover(&stale, &target, &w),
            Err(CoverError::NotACover(_))
        ));
    }

    #[test]
    fn regularized_cover_centers_on_separated_target_points() {
        let w = Weight::power_exp(0.25, 1.0).unwrap();
        let target = set(&[(3.0, 4.0)]);
        let family = regularize_cover(&target, &w).unwrap();
        let sc = &family.scales[&1];
        let omega = 0.25 * E;
        let half = 0.5 * omega;

        assert_eq!(sc.intervals.len(), 3);
        let centers: Vec<f64> = sc.intervals.iter().map(|(a, b)| 0.5 * (a + b)).collect();
        assert!((centers[0] - 3.0).abs() < 1e-12);
        assert!((centers[1] - (3.0 + half)).abs() < 1e-12);
        assert!((centers[2] - (3.0 + omega)).abs() < 1e-12);
        for (a, b) in &sc.intervals {
            assert!((b - a - omega).abs() < 1e-12);
        }
        for pair in sc.intervals.windows(2) {
            let c1 = 0.5 * (pair[0].0 + pair[0].1);
            let c2 = 0.5 * (pair[1].0 + pair[1].1);
            assert!(c2 - c1 >= half * (1.0 - 1e-12));
        }
    }

    #[test]
    fn majorant_dominates_the_weight_on_covered_scales() {
        let w = Weight::end_point(1.0, 0.25).unwrap();
        let t0 = E.powi(5) + 1.0;
        let target = set(&[(t0, t0 + 1.0)]);
        let family = regularize_cover(&target, &w).unwrap();

        let omega5 = omega_scale(&w, 5).unwrap();
        assert!(omega5 >= 4.0);
        let sc = &family.scales[&5];
        assert_eq!(sc.intervals.len(), 1);

        let bump = omega_scale(&w, 7).unwrap();
        for t in [t0, t0 + 0.5, t0 + 1.0] {
            let phi = majorant_log_weight(&family, &w, t).unwrap();
            assert!(phi >= w.log_weight(t));
            assert!(phi >= t.sqrt() + bump * 0.9);
        }

        let c = 0.5 * (sc.intervals[0].0 + sc.intervals[0].1);
        let mid = c + 1.25 * omega5;
        let phi = majorant_log_weight(&family, &w, mid).unwrap();
        assert!((phi - (mid.sqrt() + 0.5 * bump)).abs() < 1e-9);

        let far = 300.0;
        assert!((far - c).abs() > 1.5 * omega5);
        assert_eq!(majorant_log_weight(&family, &w, far).unwrap(), far.sqrt());

        let low = E.powi(4) + 1.0;
        let small = regularize_cover(&set(&[(low, low + 1.0)]), &w).unwrap();
        assert!(small.scales[&4].omega < 4.0);
        assert_eq!(majorant_log_weight(&small, &w, low).unwrap(), low.sqrt());
    }

    #[test]
    fn phi_bound_brackets_the_constant_count_series() {
        let partial_only = phi_regular_norm_bound(|_| 1.0, 1000, 0.0).unwrap();
        let mut partial = 0.0;
        for n in 1..=1000u32 {
            partial += 2.0 / (n as f64 * n as f64);
        }
        let exact = PI * PI / 3.0;
        assert!(partial < exact);
        assert!(partial_only >= exact);
        assert!(partial_only - exact < 2e-3);

        assert_eq!(
            phi_regular_norm_bound(|x| x, 50, 1.0).unwrap(),
            f64::INFINITY
        );
        let sub = phi_regular_norm_bound(|x| x.sqrt(), 50, 0.5).unwrap();
        assert!(sub.is_finite() && sub > 0.0);
        assert!(phi_regular_norm_bound(|_| -1.0, 10, 0.0).is_err());
        assert!(phi_regular_norm_bound(|_| 1.0, 0, 0.0).is_err());
    }

    #[test]
    fn cantor_sets_by_digit_patterns() {
        let thirds = cantor_set(3, &[0, 2], 1, 1.0).unwrap();
        assert_eq!(thirds.as_slice(), &[(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)]);
        let depth2 = cantor_set(3, &[0, 2], 2, 1.0).unwrap();
        assert_eq!(depth2.len(), 4);
        assert!((depth2.measure() - 4.0 / 9.0).abs() < 1e-15);

        let merged = cantor_set(3, &[0, 1], 2, 1.0).unwrap();
        assert_eq!(merged.len(), 2);
        assert!((merged.measure() - 4.0 / 9.0).abs() < 1e-15);
        assert!((merged.as_slice()[0].1 - 2.0 / 9.0).abs() < 1e-15);

        let scaled = cantor_set(4, &[1, 3], 1, 8.0).unwrap();
        assert_eq!(scaled.as_slice(), &[(2.0, 4.0), (6.0, 8.0)]);

        assert!(cantor_set(2, &[0, 1], 1, 1.0).is_err());
        assert!(cantor_set(3, &[], 1, 1.0).is_err());
        assert!(cantor_set(3, &[0, 3], 1, 1.0).is_err());
        assert!(cantor_set(3, &[0, 0], 1, 1.0).is_err());
        assert!(cantor_set(3, &[0, 2], 21, 1.0).is_err());
    }

    #[test]
    fn gamma_dense_families_fill_every_cell() {
        let left = gamma_dense_intervals(0.5, (0.0, 4.0), GammaDensePlacement::Left).unwrap();
        assert_eq!(
            left.as_slice(),
            &[(0.0, 0.5), (1.0, 1.5), (2.0, 2.5), (3.0, 3.5)]
        );

        let clipped =
            gamma_dense_intervals(0.5, (-0.75, 1.0), GammaDensePlacement::Left).unwrap();
        assert_eq!(clipped.as_slice(), &[(-0.75, -0.5), (0.0, 0.5)]);

        let a = gamma_dense_intervals(0.3, (0.0, 40.0), GammaDensePlacement::Random(7)).unwrap();
        let b = gamma_dense_intervals(0.3, (0.0, 40.0), GammaDensePlacement::Random(7)).unwrap();
        assert_eq!(a, b);
        let c = gamma_dense_intervals(0.3, (0.0, 40.0), GammaDensePlacement::Random(8)).unwrap();
        assert_ne!(a, c);
        for k in 0..40 {
            let cell = a.window(k as f64, k as f64 + 1.0);
            assert!((cell.measure() - 0.3).abs() < 1e-12);
        }

        let full = gamma_dense_intervals(1.0, (0.0, 5.0), GammaDensePlacement::Random(3)).unwrap();
        assert_eq!(full.as_slice(), &[(0.0, 5.0)]);
        assert!(gamma_dense_intervals(0.0, (0.0, 1.0), GammaDensePlacement::Left).is_err());
        assert!(gamma_dense_intervals(0.5, (1.0, 1.0), GammaDensePlacement::Left).is_err());
    }

    proptest! {
        #[test]
        fn greedy_always_covers_and_regular_stays_within_factor_seven(
            raw in proptest::collection::vec((1.5f64..40.0, 0.1f64..5.0), 1..6),
        ) {
            let w = Weight::end_point(1.0, 0.25).unwrap();
            let target = IntervalSet::new(raw.iter().map(|&(a, l)| (a, a + l)).collect()).unwrap();
            let greedy = greedy_short_cover(&target, &w).unwrap();
            check_cover(&greedy, &target, &w).unwrap();
            prop_assert!((greedy.norm - greedy.recompute_norm()).abs() <= 1e-12 * greedy.norm.max(1.0));

            let regular = regularize_cover(&target, &w).unwrap();
            for (&n, sc) in &regular.scales {
                let half = 0.5 * sc.omega;
                let mut by_comp: Vec<Vec<f64>> = vec![Vec::new()];
                for (a, b) in sc.intervals.iter() {
                    let c = 0.5 * (a + b);
                    if let Some(last) = by_comp.last().and_then(|v| v.last()) {
                        if c < *last {
                            by_comp.push(Vec::new());
                        }
                    }
                    by_comp.last_mut().unwrap().push(c);
                }
                for comp in &by_comp {
                    for pair in comp.windows(2) {
                        prop_assert!(pair[1] - pair[0] >= half * (1.0 - 1e-12));
                    }
                }
                let greedy_card = greedy.scales[&n].intervals.len();
                prop_assert!(sc.intervals.len() <= 7 * greedy_card);
            }
        }
    }
}
