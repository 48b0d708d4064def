use std::fmt;

use super::block::{Block, MAX_POINTS};
use super::design::Design;
use crate::error::{DesignError, Result};

/// A bijection on `{0, .., v-1}` stored as its image array.
///
/// Products are read left to right: `a.then(&b)` applies `a` first.
/// Permutations order lexicographically by image array, which is the
/// canonical order for element lists.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let v = images.len();
        if v > MAX_POINTS {
            return Err(DesignError::TooManyPoints { v, max: MAX_POINTS });
        }
        let mut seen = 0u64;
        for &x in &images {
            if x >= v {
                return Err(DesignError::PointOutOfRange { point: x, v });
            }
            if seen >> x & 1 == 1 {
                return Err(DesignError::Argument(format!("image {x} repeated")));
            }
            seen |= 1 << x;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u8).collect(),
        })
    }

    /// Caller guarantees a valid bijection.
    pub(crate) fn from_raw(images: Vec<u8>) -> Self {
        Permutation { images }
    }

    pub fn identity(v: usize) -> Self {
        Permutation {
            images: (0..v as u8).collect(),
        }
    }

    /// The product of the given transpositions, which must be disjoint.
    pub fn from_transpositions(v: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut images: Vec<usize> = (0..v).collect();
        for &(a, b) in pairs {
            if a >= v || b >= v {
                return Err(DesignError::PointOutOfRange { point: a.max(b), v });
            }
            if images[a] != a || images[b] != b || a == b {
                return Err(DesignError::Argument(format!(
                    "transposition ({a} {b}) overlaps another"
                )));
            }
            images.swap(a, b);
        }
        Permutation::new(images)
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.images[p] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    #[inline]
    pub(crate) fn apply_bits(&self, mut bits: u64) -> u64 {
        let mut out = 0u64;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            out |= 1 << self.images[p];
            bits &= bits - 1;
        }
        out
    }

    pub fn apply_block(&self, b: &Block) -> Result<Block> {
        if b.v() != self.v() {
            return Err(DesignError::Dimension {
                left: self.v(),
                right: b.v(),
            });
        }
        Ok(Block::from_raw(b.v(), self.apply_bits(b.bits())))
    }

    pub fn apply_design(&self, d: &Design) -> Result<Design> {
        let blocks = d
            .blocks()
            .iter()
            .map(|b| self.apply_block(b))
            .collect::<Result<Vec<_>>>()?;
        Design::new(d.v(), blocks)
    }

    /// Whether the blockwise image of `d` is `d` itself.
    pub fn is_automorphism_of(&self, d: &Design) -> bool {
        self.v() == d.v()
            && d.blocks()
                .iter()
                .all(|b| d.contains_block(&Block::from_raw(d.v(), self.apply_bits(b.bits()))))
    }

    /// First block of `d` whose image is not a block, if any.
    pub fn first_unmapped_block(&self, d: &Design) -> Option<Block> {
        d.blocks()
            .iter()
            .find(|b| !d.contains_block(&Block::from_raw(d.v(), self.apply_bits(b.bits()))))
            .copied()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.v(), other.v());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.v()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.then(self).is_identity()
    }

    /// Points moved by the permutation, as a bit set.
    pub fn support(&self) -> u64 {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i != x as usize)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Disjoint cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..self.v() {
            if seen >> start & 1 == 1 || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen |= 1 << start;
            let mut x = self.apply(start);
            while x != start {
                seen |= 1 << x;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
