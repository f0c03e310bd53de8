//! Finite unions of disjoint closed real intervals.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative gap below which neighbouring bands are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Sorted, pairwise disjoint closed bands `[a_j, b_j]` with `a_j < b_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion {
    bands: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Validates, sorts and merges touching or overlapping bands.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::with_tolerance(pairs, MERGE_TOLERANCE)
    }

    pub fn with_tolerance(pairs: &[(f64, f64)], rel_tol: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyIntervals);
        }
        for &(a, b) in pairs {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::BadInterval(a, b));
            }
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let lo = sorted[0].0;
        let hi = sorted.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = rel_tol * (hi - lo);
        let mut bands: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (a, b) in sorted {
            match bands.last_mut() {
                Some(last) if a - last.1 <= tol => last.1 = last.1.max(b),
                _ => bands.push((a, b)),
            }
        }
        Ok(IntervalUnion { bands })
    }

    pub fn single(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Number of bounded gaps.
    pub fn genus(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.bands[0].0, self.bands[self.bands.len() - 1].1)
    }

    pub fn diameter(&self) -> f64 {
        let (a, b) = self.hull();
        b - a
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }

    /// Bounded gaps `(b_{j-1}, a_j)`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.bands.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    /// All endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.band_of(x).is_some()
    }

    /// Index of the band containing `x`.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        let i = self.bands.partition_point(|&(_, b)| b < x);
        (i < self.bands.len() && self.bands[i].0 <= x).then_some(i)
    }

    /// Image under `x -> s x + t`.
    pub fn affine(&self, s: f64, t: f64) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = self
            .bands
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (s * a + t, s * b + t);
                (u.min(v), u.max(v))
            })
            .collect();
        Self::new(&pairs)
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.bands.iter().map(|&(a, b)| [a, b]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        let pairs: Vec<(f64, f64)> = v.into_iter().map(|[a, b]| (a, b)).collect();
        IntervalUnion::new(&pairs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_bands() {
        let e = IntervalUnion::new(&[(1.0, 2.0), (0.0, 0.5)]).unwrap();
        assert_eq!(e.bands(), &[(0.0, 0.5), (1.0, 2.0)]);
        assert_eq!(e.genus(), 1);
        assert_eq!(e.gaps(), vec![(0.5, 1.0)]);
    }

    #[test]
    fn merges_touching() {
        let e = IntervalUnion::new(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(e.bands(), &[(0.0, 2.0)]);
        let e = IntervalUnion::new(&[(0.0, 1.5), (1.0, 2.0), (3.0, 4.0)]).unwrap();
        assert_eq!(e.bands(), &[(0.0, 2.0), (3.0, 4.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(IntervalUnion::new(&[]), Err(Error::EmptyIntervals));
        assert!(matches!(IntervalUnion::new(&[(1.0, 1.0)]), Err(Error::BadInterval(..))));
        assert!(IntervalUnion::new(&[(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn membership() {
        let e = IntervalUnion::new(&[(-3.0, -1.0), (1.0, 3.0)]).unwrap();
        assert!(e.contains(-3.0) && e.contains(2.0) && e.contains(3.0));
        assert!(!e.contains(0.0) && !e.contains(3.5));
        assert_eq!(e.band_of(1.0), Some(1));
    }

    #[test]
    fn serde_roundtrip() {
        let e: IntervalUnion = serde_json::from_str("[[1,2],[0,0.5]]").unwrap();
        assert_eq!(e.bands(), &[(0.0, 0.5), (1.0, 2.0)]);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[[0.0,0.5],[1.0,2.0]]");
        assert!(serde_json::from_str::<IntervalUnion>("[[2,1]]").is_err());
    }
}
