use std::cmp::Ordering;
use std::fmt;

use crate::error::{DesignError, Result};

/// Largest point count a single-word block can hold.
pub const MAX_POINTS: usize = 64;

#[inline]
pub(crate) fn full_mask(v: usize) -> u64 {
    if v >= 64 {
        u64::MAX
    } else {
        (1u64 << v) - 1
    }
}

/// A subset of the point set `{0, .., v-1}` stored as a bit vector.
///
/// Bit `i` is set when point `i` is a member. Blocks order by the integer
/// value of the bit vector, which is the canonical order for block lists.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    bits: u64,
    v: u8,
}

impl Block {
    pub fn from_bits(v: usize, bits: u64) -> Result<Self> {
        check_width(v)?;
        let stray = bits & !full_mask(v);
        if stray != 0 {
            return Err(DesignError::PointOutOfRange {
                point: stray.trailing_zeros() as usize,
                v,
            });
        }
        Ok(Block { bits, v: v as u8 })
    }

    pub fn from_points<I>(v: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        check_width(v)?;
        let mut bits = 0u64;
        for p in points {
            if p >= v {
                return Err(DesignError::PointOutOfRange { point: p, v });
            }
            bits |= 1 << p;
        }
        Ok(Block { bits, v: v as u8 })
    }

    /// Caller guarantees `v <= 64` and that `bits` lies below `v`.
    #[inline]
    pub(crate) fn from_raw(v: usize, bits: u64) -> Self {
        debug_assert!(v <= MAX_POINTS && bits & !full_mask(v) == 0);
        Block { bits, v: v as u8 }
    }

    pub fn empty(v: usize) -> Result<Self> {
        Self::from_bits(v, 0)
    }

    pub fn full(v: usize) -> Result<Self> {
        check_width(v)?;
        Ok(Block::from_raw(v, full_mask(v)))
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.v as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        p < 64 && self.bits >> p & 1 == 1
    }

    pub fn iter(&self) -> Points {
        Points(self.bits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Complement within `{0, .., v-1}`.
    pub fn complement(&self) -> Block {
        Block::from_raw(self.v(), !self.bits & full_mask(self.v()))
    }

    pub fn sym_diff(&self, other: &Block) -> Result<Block> {
        self.same_v(other)?;
        Ok(Block::from_raw(self.v(), self.bits ^ other.bits))
    }

    pub fn intersect_count(&self, other: &Block) -> Result<usize> {
        self.same_v(other)?;
        Ok((self.bits & other.bits).count_ones() as usize)
    }

    pub fn intersection(&self, other: &Block) -> Result<Block> {
        self.same_v(other)?;
        Ok(Block::from_raw(self.v(), self.bits & other.bits))
    }

    pub fn union(&self, other: &Block) -> Result<Block> {
        self.same_v(other)?;
        Ok(Block::from_raw(self.v(), self.bits | other.bits))
    }

    pub fn difference(&self, other: &Block) -> Result<Block> {
        self.same_v(other)?;
        Ok(Block::from_raw(self.v(), self.bits & !other.bits))
    }

    pub fn is_subset(&self, other: &Block) -> bool {
        self.bits & !other.bits == 0
    }

    fn same_v(&self, other: &Block) -> Result<()> {
        if self.v != other.v {
            return Err(DesignError::Dimension {
                left: self.v(),
                right: other.v(),
            });
        }
        Ok(())
    }
}

fn check_width(v: usize) -> Result<()> {
    if v > MAX_POINTS {
        return Err(DesignError::TooManyPoints { v, max: MAX_POINTS });
    }
    Ok(())
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits.cmp(&other.bits).then(self.v.cmp(&other.v))
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self, self.v)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the members of a bit set, in increasing order.
#[derive(Clone)]
pub struct Points(pub(crate) u64);

impl Iterator for Points {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Points {}

/// Symmetric difference of two blocks on the same point set.
pub fn sym_diff(a: &Block, b: &Block) -> Result<Block> {
    a.sym_diff(b)
}

/// `|a ∩ b|` for two blocks on the same point set.
pub fn intersect_count(a: &Block, b: &Block) -> Result<usize> {
    a.intersect_count(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blk(v: usize, pts: &[usize]) -> Block {
        Block::from_points(v, pts.iter().copied()).unwrap()
    }

    #[test]
    fn sym_diff_examples() {
        assert_eq!(
            sym_diff(&blk(7, &[0, 1, 2]), &blk(7, &[1, 2, 3])).unwrap(),
            blk(7, &[0, 3])
        );
        let a = blk(7, &[3, 4, 5, 6]);
        assert!(sym_diff(&a, &a).unwrap().is_empty());
        assert_eq!(sym_diff(&a, &blk(7, &[0, 1, 3, 4])).unwrap(), blk(7, &[0, 1, 5, 6]));
    }

    #[test]
    fn intersect_count_examples() {
        assert_eq!(
            intersect_count(&blk(7, &[0, 1, 3, 4]), &blk(7, &[0, 2, 3, 5])).unwrap(),
            2
        );
        assert_eq!(
            intersect_count(&blk(8, &[1, 3, 5, 7]), &Block::empty(8).unwrap()).unwrap(),
            0
        );
        let b = blk(8, &[1, 3, 5, 7]);
        assert_eq!(intersect_count(&b, &b).unwrap(), 4);
    }

    #[test]
    fn mismatched_point_counts_are_rejected() {
        let err = sym_diff(&blk(7, &[0]), &blk(8, &[0])).unwrap_err();
        assert_eq!(err, DesignError::Dimension { left: 7, right: 8 });
        assert!(intersect_count(&blk(7, &[0]), &blk(8, &[0])).is_err());
    }

    #[test]
    fn out_of_range_points() {
        assert_eq!(
            Block::from_points(5, [1, 5]).unwrap_err(),
            DesignError::PointOutOfRange { point: 5, v: 5 }
        );
        assert!(Block::from_bits(3, 0b1000).is_err());
        assert!(Block::from_points(65, [0]).is_err());
        assert_eq!(Block::full(64).unwrap().len(), 64);
    }

    #[test]
    fn order_is_integer_order() {
        let mut v = vec![blk(7, &[3]), blk(7, &[0, 1]), blk(7, &[2])];
        v.sort();
        assert_eq!(v, vec![blk(7, &[0, 1]), blk(7, &[2]), blk(7, &[3])]);
    }

    #[test]
    fn display_lists_members() {
        assert_eq!(blk(7, &[0, 2, 4, 6]).to_string(), "{0,2,4,6}");
        assert_eq!(blk(7, &[1, 2]).complement(), blk(7, &[0, 3, 4, 5, 6]));
    }
}
