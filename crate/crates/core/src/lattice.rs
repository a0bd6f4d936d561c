//! The finite dyadic lattice of `[0,1)`.
//!
//! Intervals are `(level, position)` pairs denoting
//! `[position * 2^-level, (position + 1) * 2^-level)`. All containment and
//! disjointness tests are integer arithmetic.
//!
//! Arrays indexed by intervals use heap order: `(level, position)` lives at
//! `2^level - 1 + position`, so the root is 0 and the children of slot `i`
//! are `2i + 1` (left) and `2i + 2` (right). Heap order coincides with the
//! level-major, position-minor enumeration order.

use crate::error::{DyadError, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

/// Largest supported lattice depth.
pub const MAX_DEPTH: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    level: u32,
    position: u64,
}

impl DyadicInterval {
    pub const ROOT: DyadicInterval = DyadicInterval {
        level: 0,
        position: 0,
    };

    pub fn new(level: u32, position: u64) -> Result<Self> {
        if level > MAX_DEPTH || position >= (1u64 << level) {
            return Err(DyadError::InvalidInterval { level, position });
        }
        Ok(DyadicInterval { level, position })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Lebesgue measure `2^-level`.
    pub fn len(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left_endpoint(&self) -> f64 {
        self.position as f64 * self.len()
    }

    pub fn right_endpoint(&self) -> f64 {
        (self.position + 1) as f64 * self.len()
    }

    /// Left child `I^+`. No depth check; see [`Lattice::children`].
    pub fn left(&self) -> DyadicInterval {
        DyadicInterval {
            level: self.level + 1,
            position: 2 * self.position,
        }
    }

    /// Right child `I^-`.
    pub fn right(&self) -> DyadicInterval {
        DyadicInterval {
            level: self.level + 1,
            position: 2 * self.position + 1,
        }
    }

    pub fn parent(&self) -> Result<DyadicInterval> {
        if self.level == 0 {
            return Err(DyadError::NoParent);
        }
        Ok(DyadicInterval {
            level: self.level - 1,
            position: self.position / 2,
        })
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && (other.position >> (other.level - self.level)) == self.position
    }

    /// `other ⊊ self`.
    pub fn strictly_contains(&self, other: &DyadicInterval) -> bool {
        other.level > self.level && self.contains(other)
    }

    pub fn is_disjoint(&self, other: &DyadicInterval) -> bool {
        !self.contains(other) && !other.contains(self)
    }

    /// Whether the point `t` lies in the half-open interval.
    pub fn contains_point(&self, t: f64) -> bool {
        t >= self.left_endpoint() && t < self.right_endpoint()
    }

    /// `true` when `other` lies in the left child of `self`. Requires `other ⊊ self`.
    fn in_left_half(&self, other: &DyadicInterval) -> bool {
        let shift = other.level - self.level - 1;
        (other.position >> shift) & 1 == 0
    }

    pub fn heap_index(&self) -> usize {
        ((1usize << self.level) - 1) + self.position as usize
    }

    pub fn from_heap_index(index: usize) -> DyadicInterval {
        let level = (usize::BITS - 1 - (index + 1).leading_zeros()) as u32;
        DyadicInterval {
            level,
            position: (index + 1 - (1usize << level)) as u64,
        }
    }

    /// Finest cells of a depth-`depth` lattice covered by this interval.
    pub fn cell_range(&self, depth: u32) -> std::ops::Range<usize> {
        debug_assert!(self.level <= depth);
        let shift = depth - self.level;
        let start = (self.position as usize) << shift;
        start..start + (1usize << shift)
    }

    /// Number of finest cells of a depth-`depth` lattice inside this interval.
    pub fn cell_count(&self, depth: u32) -> usize {
        1usize << (depth - self.level)
    }

    /// Haar function `h_I` evaluated at a point: `+|I|^{-1/2}` on the left half,
    /// `-|I|^{-1/2}` on the right half, zero outside.
    pub fn haar_at(&self, t: f64) -> f64 {
        if !self.contains_point(t) {
            return 0.0;
        }
        let amp = self.len().sqrt().recip();
        if self.left().contains_point(t) {
            amp
        } else {
            -amp
        }
    }

    /// Constant value of `h_I` on a strictly contained interval `J`.
    pub fn haar_on(&self, inner: &DyadicInterval) -> Result<f64> {
        if !self.strictly_contains(inner) {
            return Err(DyadError::NotStrictlyContained {
                outer: *self,
                inner: *inner,
            });
        }
        Ok(self.haar_sign(inner) * self.len().sqrt().recip())
    }

    /// `±1` depending on which half of `self` holds `inner` (assumes `inner ⊊ self`).
    pub(crate) fn haar_sign(&self, inner: &DyadicInterval) -> f64 {
        if self.in_left_half(inner) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.position)
    }
}

impl FromStr for DyadicInterval {
    type Err = DyadError;

    fn from_str(s: &str) -> Result<Self> {
        let (level, position) = s
            .split_once(':')
            .ok_or_else(|| DyadError::IntervalSyntax(s.to_string()))?;
        let level = level
            .trim()
            .parse()
            .map_err(|_| DyadError::IntervalSyntax(s.to_string()))?;
        let position = position
            .trim()
            .parse()
            .map_err(|_| DyadError::IntervalSyntax(s.to_string()))?;
        DyadicInterval::new(level, position)
    }
}

impl Serialize for DyadicInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A dyadic lattice of `[0,1)` truncated at depth `n`: `2^n` finest cells and
/// `2^n - 1` symbol-index intervals (levels `0..n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    depth: u32,
}

impl Lattice {
    pub fn new(depth: u32) -> Result<Self> {
        check_depth(depth)?;
        Ok(Lattice { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cell_count(&self) -> usize {
        1usize << self.depth
    }

    pub fn symbol_count(&self) -> usize {
        (1usize << self.depth) - 1
    }

    /// Number of intervals on levels `0..=n`, including the finest cells.
    pub fn node_count(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }

    pub fn contains(&self, interval: &DyadicInterval) -> bool {
        interval.level <= self.depth
    }

    /// `(I^+, I^-)`, the left and right children.
    pub fn children(&self, interval: DyadicInterval) -> Result<(DyadicInterval, DyadicInterval)> {
        if interval.level >= self.depth {
            return Err(DyadError::NoChildren(interval));
        }
        Ok((interval.left(), interval.right()))
    }

    pub fn parent(&self, interval: DyadicInterval) -> Result<DyadicInterval> {
        interval.parent()
    }

    /// Intervals with level in `levels ∩ [0, n]`, level-major then position order.
    pub fn enumerate(&self, levels: RangeInclusive<u32>) -> impl Iterator<Item = DyadicInterval> {
        let start = *levels.start();
        let end = (*levels.end()).min(self.depth);
        (start..=end).flat_map(|level| {
            (0..(1u64 << level)).map(move |position| DyadicInterval { level, position })
        })
    }

    /// The symbol-index intervals (levels `0..n`).
    pub fn symbol_intervals(&self) -> impl Iterator<Item = DyadicInterval> {
        (0..self.symbol_count()).map(DyadicInterval::from_heap_index)
    }

    /// The finest cell containing `t ∈ [0,1)`.
    pub fn cell_of(&self, t: f64) -> Option<DyadicInterval> {
        if !(0.0..1.0).contains(&t) {
            return None;
        }
        let position = ((t * self.cell_count() as f64).floor() as u64).min((1u64 << self.depth) - 1);
        Some(DyadicInterval {
            level: self.depth,
            position,
        })
    }
}

pub(crate) fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(DyadError::DepthOutOfRange(depth));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(level: u32, position: u64) -> DyadicInterval {
        DyadicInterval::new(level, position).unwrap()
    }

    #[test]
    fn children_of_root_and_right_half() {
        let lat = Lattice::new(3).unwrap();
        assert_eq!(lat.children(iv(0, 0)).unwrap(), (iv(1, 0), iv(1, 1)));
        assert_eq!(lat.children(iv(1, 1)).unwrap(), (iv(2, 2), iv(2, 3)));
        let (l, r) = lat.children(iv(1, 1)).unwrap();
        assert_eq!(l.left_endpoint(), 0.5);
        assert_eq!(r.right_endpoint(), 1.0);
    }

    #[test]
    fn finest_cell_has_no_children() {
        let lat = Lattice::new(3).unwrap();
        assert!(matches!(lat.children(iv(3, 5)), Err(DyadError::NoChildren(_))));
    }

    #[test]
    fn parents() {
        assert_eq!(iv(2, 1).parent().unwrap(), iv(1, 0));
        assert_eq!(iv(1, 0).parent().unwrap(), iv(0, 0));
        assert!(matches!(DyadicInterval::ROOT.parent(), Err(DyadError::NoParent)));
    }

    #[test]
    fn haar_values() {
        assert_eq!(DyadicInterval::ROOT.haar_at(0.25), 1.0);
        assert_eq!(DyadicInterval::ROOT.haar_at(0.75), -1.0);
        let half = iv(1, 0);
        let v = half.haar_on(&iv(2, 1)).unwrap();
        assert!((v + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(half.haar_at(0.75), 0.0);
        assert!(half.haar_on(&half).is_err());
        assert!(half.haar_on(&iv(2, 2)).is_err());
    }

    #[test]
    fn haar_interval_form_matches_point_form() {
        let outer = iv(2, 1);
        for level in 3..7 {
            for inner in Lattice::new(6).unwrap().enumerate(level..=level) {
                if !outer.strictly_contains(&inner) {
                    continue;
                }
                let v = outer.haar_on(&inner).unwrap();
                for k in 0..4 {
                    let t = inner.left_endpoint() + inner.len() * (k as f64 + 0.5) / 4.0;
                    assert_eq!(v, outer.haar_at(t));
                }
            }
        }
    }

    #[test]
    fn enumerate_orders() {
        let lat = Lattice::new(2).unwrap();
        let v: Vec<_> = lat.enumerate(0..=1).collect();
        assert_eq!(v, vec![iv(0, 0), iv(1, 0), iv(1, 1)]);
        let cells: Vec<_> = lat.enumerate(2..=2).collect();
        assert_eq!(cells, (0..4).map(|p| iv(2, p)).collect::<Vec<_>>());
        #[allow(clippy::reversed_empty_ranges)]
        let empty: Vec<_> = lat.enumerate(2..=1).collect();
        assert!(empty.is_empty());
    }

    #[test]
    fn heap_index_round_trip() {
        for i in 0..1023 {
            let interval = DyadicInterval::from_heap_index(i);
            assert_eq!(interval.heap_index(), i);
        }
        let lat = Lattice::new(4).unwrap();
        for (i, interval) in lat.enumerate(0..=4).enumerate() {
            assert_eq!(interval.heap_index(), i);
        }
    }

    #[test]
    fn nested_or_disjoint() {
        let lat = Lattice::new(4).unwrap();
        let all: Vec<_> = lat.enumerate(0..=4).collect();
        for a in &all {
            for b in &all {
                let nested = a.contains(b) || b.contains(a);
                let overlap = a.left_endpoint() < b.right_endpoint() && b.left_endpoint() < a.right_endpoint();
                assert_eq!(nested, overlap, "{a} {b}");
            }
        }
    }

    #[test]
    fn children_partition_parent() {
        let lat = Lattice::new(5).unwrap();
        for interval in lat.enumerate(0..=4) {
            let (l, r) = lat.children(interval).unwrap();
            let range = interval.cell_range(5);
            assert_eq!(l.cell_range(5).start, range.start);
            assert_eq!(l.cell_range(5).end, r.cell_range(5).start);
            assert_eq!(r.cell_range(5).end, range.end);
            assert_eq!(l.cell_count(5) * 2, interval.cell_count(5));
        }
    }

    #[test]
    fn display_and_parse() {
        let i = iv(3, 5);
        assert_eq!(i.to_string(), "3:5");
        assert_eq!("3:5".parse::<DyadicInterval>().unwrap(), i);
        assert!("3-5".parse::<DyadicInterval>().is_err());
        assert!("1:2".parse::<DyadicInterval>().is_err());
    }
}
