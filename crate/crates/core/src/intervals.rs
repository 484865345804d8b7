//! Finite unions of closed intervals on the line.
//!
//! The normal form is sorted and pairwise disjoint, with touching intervals
//! merged: `[0, 1]` and `[1, 2]` collapse to `[0, 2]`. Degenerate intervals
//! (single points) are allowed. The text format is one interval per line,
//! two whitespace separated numbers, with `#` starting a comment.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntervalError {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    /// Normalizes arbitrary closed intervals: sorts, merges overlaps and
    /// touching endpoints.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self, IntervalError> {
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() {
                return Err(IntervalError::InvalidInterval(format!(
                    "({a}, {b}) is not finite"
                )));
            }
            if a > b {
                return Err(IntervalError::InvalidInterval(format!(
                    "({a}, {b}) is reversed"
                )));
            }
        }
        intervals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of connected components.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.intervals.iter().copied()
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Total length.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Smallest interval containing the whole set.
    pub fn span(&self) -> Option<(f64, f64)> {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(&(a, _)), Some(&(_, b))) => Some((a, b)),
            _ => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|&(a, _)| a <= x);
        i > 0 && self.intervals[i - 1].1 >= x
    }

    /// Intersection with the closed interval `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> IntervalSet {
        assert!(lo <= hi, "window endpoints must be ordered");
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let a2 = a.max(lo);
            let b2 = b.min(hi);
            if a2 <= b2 {
                out.push((a2, b2));
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn translate(&self, dx: f64) -> IntervalSet {
        assert!(dx.is_finite());
        IntervalSet {
            intervals: self.intervals.iter().map(|&(a, b)| (a + dx, b + dx)).collect(),
        }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalSet::new(all).expect("normal forms are valid")
    }

    /// Closure of `self` minus `other`. Single point remainders are
    /// dropped, so the result of `[0, 2] - [1, 2]` is `[0, 1]` and the
    /// result of `[0, 1] - [0, 1]` is empty.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let mut j = 0;
        for &(a, b) in &self.intervals {
            let mut lo = a;
            while j < other.intervals.len() && other.intervals[j].1 <= lo {
                j += 1;
            }
            let mut k = j;
            let mut open = true;
            while k < other.intervals.len() && other.intervals[k].0 < b {
                let (oa, ob) = other.intervals[k];
                if oa > lo {
                    out.push((lo, oa));
                }
                lo = lo.max(ob);
                if lo >= b {
                    open = false;
                    break;
                }
                k += 1;
            }
            if open && lo < b {
                out.push((lo, b));
            }
        }
        IntervalSet { intervals: out }
    }

    /// Smallest point of the set that is `>= x`.
    pub fn first_point_at_or_after(&self, x: f64) -> Option<f64> {
        let i = self.intervals.partition_point(|&(_, b)| b < x);
        self.intervals.get(i).map(|&(a, _)| a.max(x))
    }

    /// Smallest point `p >= x` such that the set still has positive
    /// measure or a component to the right of `p`. Unlike
    /// [`Self::first_point_at_or_after`] this skips a component whose right
    /// endpoint is exactly `x`.
    pub fn first_point_beyond(&self, x: f64) -> Option<f64> {
        let i = self.intervals.partition_point(|&(_, b)| b <= x);
        self.intervals.get(i).map(|&(a, _)| a.max(x))
    }

    pub fn from_text(text: &str) -> Result<Self, IntervalError> {
        let mut ivs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(sa), Some(sb)) = (parts.next(), parts.next()) else {
                return Err(IntervalError::Parse {
                    line: idx + 1,
                    msg: "expected two numbers".into(),
                });
            };
            if parts.next().is_some() {
                return Err(IntervalError::Parse {
                    line: idx + 1,
                    msg: "expected exactly two numbers".into(),
                });
            }
            let a: f64 = sa.parse().map_err(|_| IntervalError::Parse {
                line: idx + 1,
                msg: format!("bad number {sa:?}"),
            })?;
            let b: f64 = sb.parse().map_err(|_| IntervalError::Parse {
                line: idx + 1,
                msg: format!("bad number {sb:?}"),
            })?;
            ivs.push((a, b));
        }
        IntervalSet::new(ivs)
    }

    /// One interval per line. `f64` display round trips, so
    /// `from_text(to_text(s)) == s`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for &(a, b) in &self.intervals {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(ivs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(ivs.to_vec()).unwrap()
    }

    #[test]
    fn normalization_sorts_and_merges_touching() {
        let s = set(&[(3.0, 4.0), (0.0, 1.0), (1.0, 2.0), (3.5, 3.7)]);
        assert_eq!(s.as_slice(), &[(0.0, 2.0), (3.0, 4.0)]);
        assert_eq!(s.len(), 2);
        assert!((s.measure() - 3.0).abs() < 1e-15);
        assert_eq!(s.span(), Some((0.0, 4.0)));

        let s = set(&[(1.0, 1.0), (2.0, 3.0)]);
        assert_eq!(s.as_slice(), &[(1.0, 1.0), (2.0, 3.0)]);
        let s = set(&[(1.0, 1.0), (1.0, 3.0)]);
        assert_eq!(s.as_slice(), &[(1.0, 3.0)]);

        assert!(IntervalSet::new(vec![(2.0, 1.0)]).is_err());
        assert!(IntervalSet::new(vec![(f64::NAN, 1.0)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn contains_and_window() {
        let s = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert!(s.contains(0.0));
        assert!(s.contains(1.0));
        assert!(!s.contains(1.5));
        assert!(s.contains(2.0));
        assert!(!s.contains(-0.1));
        assert!(!s.contains(3.1));

        let w = s.window(0.5, 2.5);
        assert_eq!(w.as_slice(), &[(0.5, 1.0), (2.0, 2.5)]);
        let w = s.window(1.0, 2.0);
        assert_eq!(w.as_slice(), &[(1.0, 1.0), (2.0, 2.0)]);
        assert!(s.window(1.2, 1.8).is_empty());
    }

    #[test]
    fn difference_closure_semantics() {
        let s = set(&[(0.0, 2.0)]);
        assert_eq!(s.difference(&set(&[(1.0, 2.0)])).as_slice(), &[(0.0, 1.0)]);
        assert!(s.difference(&set(&[(0.0, 2.0)])).is_empty());
        assert_eq!(
            s.difference(&set(&[(0.5, 1.0)])).as_slice(),
            &[(0.0, 0.5), (1.0, 2.0)]
        );
        assert_eq!(
            s.difference(&set(&[(-1.0, 0.5), (1.5, 3.0)])).as_slice(),
            &[(0.5, 1.5)]
        );
        let s = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(
            s.difference(&set(&[(0.5, 2.5)])).as_slice(),
            &[(0.0, 0.5), (2.5, 3.0)]
        );
        assert_eq!(s.difference(&IntervalSet::empty()), s);
    }

    #[test]
    fn first_points() {
        let s = set(&[(0.0, 1.0), (2.0, 2.0), (3.0, 4.0)]);
        assert_eq!(s.first_point_at_or_after(-5.0), Some(0.0));
        assert_eq!(s.first_point_at_or_after(0.5), Some(0.5));
        assert_eq!(s.first_point_at_or_after(1.0), Some(1.0));
        assert_eq!(s.first_point_at_or_after(1.5), Some(2.0));
        assert_eq!(s.first_point_at_or_after(2.0), Some(2.0));
        assert_eq!(s.first_point_at_or_after(4.0), Some(4.0));
        assert_eq!(s.first_point_at_or_after(4.1), None);

        assert_eq!(s.first_point_beyond(-5.0), Some(0.0));
        assert_eq!(s.first_point_beyond(0.5), Some(0.5));
        assert_eq!(s.first_point_beyond(1.0), Some(2.0));
        assert_eq!(s.first_point_beyond(2.0), Some(3.0));
        assert_eq!(s.first_point_beyond(4.0), None);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let s = set(&[(0.125, 1.0 / 3.0), (2.0, 3.0e7)]);
        let t = s.to_text();
        assert_eq!(IntervalSet::from_text(&t).unwrap(), s);

        let parsed = IntervalSet::from_text("# header\n 0 1 # tail comment\n\n2 3\n").unwrap();
        assert_eq!(parsed.as_slice(), &[(0.0, 1.0), (2.0, 3.0)]);

        match IntervalSet::from_text("0 1\n0.5\n") {
            Err(IntervalError::Parse { line: 2, .. }) => {}
            other => panic!("expected a parse error on line 2, got {other:?}"),
        }
        match IntervalSet::from_text("0 1 2\n") {
            Err(IntervalError::Parse { line: 1, .. }) => {}
            other => panic!("expected a parse error on line 1, got {other:?}"),
        }
        assert!(IntervalSet::from_text("0 x\n").is_err());
        assert!(IntervalSet::from_text("1 0\n").is_err());
    }

    proptest! {
        #[test]
        fn normal_form_invariants(raw in proptest::collection::vec((-50.0f64..50.0, 0.0f64..5.0), 0..20)) {
            let ivs: Vec<(f64, f64)> = raw.iter().map(|&(a, l)| (a, a + l)).collect();
            let s = IntervalSet::new(ivs.clone()).unwrap();
            let sl = s.as_slice();
            for w in sl.windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            for &(a, b) in sl {
                prop_assert!(a <= b);
            }
            let direct: f64 = ivs.iter().map(|&(a, b)| b - a).sum();
            prop_assert!(s.measure() <= direct + 1e-9);
        }

        #[test]
        fn set_operations_agree_with_membership(
            raw1 in proptest::collection::vec((-20.0f64..20.0, 0.1f64..3.0), 1..8),
            raw2 in proptest::collection::vec((-20.0f64..20.0, 0.1f64..3.0), 1..8),
            xs in proptest::collection::vec(-25.0f64..25.0, 30),
        ) {
            let s1 = IntervalSet::new(raw1.iter().map(|&(a, l)| (a, a + l)).collect()).unwrap();
            let s2 = IntervalSet::new(raw2.iter().map(|&(a, l)| (a, a + l)).collect()).unwrap();
            let uni = s1.union(&s2);
            let diff = s1.difference(&s2);
            for &x in &xs {
                let near_edge = s1
                    .iter()
                    .chain(s2.iter())
                    .any(|(a, b)| (x - a).abs() < 1e-6 || (x - b).abs() < 1e-6);
                if near_edge {
                    continue;
                }
                prop_assert_eq!(uni.contains(x), s1.contains(x) || s2.contains(x));
                prop_assert_eq!(diff.contains(x), s1.contains(x) && !s2.contains(x));
            }
        }
    }
}
