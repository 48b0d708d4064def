use std::fmt;

use super::block::{full_mask, Block, MAX_POINTS};
use crate::error::{DesignError, Result};

/// A point count together with a canonical block list.
///
/// Blocks are nonempty, lie inside `{0, .., v-1}` and are kept strictly
/// increasing in block order, so two designs are equal exactly when their
/// block lists are.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Design {
    v: usize,
    blocks: Vec<Block>,
}

impl Design {
    /// Builds a design, sorting the blocks. Duplicate or empty blocks are errors.
    pub fn new(v: usize, mut blocks: Vec<Block>) -> Result<Self> {
        if v == 0 || v > MAX_POINTS {
            return Err(DesignError::TooManyPoints { v, max: MAX_POINTS });
        }
        for b in &blocks {
            if b.v() != v {
                return Err(DesignError::Dimension { left: v, right: b.v() });
            }
            if b.is_empty() {
                return Err(DesignError::InvalidDesign("empty block".into()));
            }
        }
        blocks.sort_unstable();
        if let Some(w) = blocks.windows(2).find(|w| w[0] == w[1]) {
            return Err(DesignError::InvalidDesign(format!("duplicate block {}", w[0])));
        }
        Ok(Design { v, blocks })
    }

    pub fn from_bits(v: usize, bits: impl IntoIterator<Item = u64>) -> Result<Self> {
        let blocks = bits
            .into_iter()
            .map(|b| Block::from_bits(v, b))
            .collect::<Result<Vec<_>>>()?;
        Design::new(v, blocks)
    }

    pub fn from_point_lists<L, I>(v: usize, lists: L) -> Result<Self>
    where
        L: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let blocks = lists
            .into_iter()
            .map(|l| Block::from_points(v, l))
            .collect::<Result<Vec<_>>>()?;
        Design::new(v, blocks)
    }

    /// Relabels blocks living on `ground ⊂ {0..v-1}` to a design on
    /// `{0, .., |ground|-1}`, where local point `i` is the `i`-th smallest
    /// member of `ground`.
    pub fn from_subset(ground: &Block, blocks: &[Block]) -> Result<Self> {
        let local = blocks
            .iter()
            .map(|b| {
                if !b.is_subset(ground) {
                    return Err(DesignError::Argument(format!("block {b} leaves ground set {ground}")));
                }
                Ok(Block::from_raw(ground.len(), compress(b.bits(), ground.bits())))
            })
            .collect::<Result<Vec<_>>>()?;
        Design::new(ground.len(), local)
    }

    /// Inverse of [`Design::from_subset`]: the blocks placed on `ground`.
    pub fn embed(&self, ground: &Block) -> Result<Vec<Block>> {
        if ground.len() != self.v {
            return Err(DesignError::Dimension {
                left: self.v,
                right: ground.len(),
            });
        }
        Ok(self
            .blocks
            .iter()
            .map(|b| Block::from_raw(ground.v(), expand(b.bits(), ground.bits())))
            .collect())
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.v
    }

    #[inline]
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of `b` in the canonical block list.
    pub fn index_of(&self, b: &Block) -> Option<usize> {
        self.blocks.binary_search(b).ok()
    }

    pub fn contains_block(&self, b: &Block) -> bool {
        self.index_of(b).is_some()
    }

    pub fn point_set(&self) -> Block {
        Block::from_raw(self.v, full_mask(self.v))
    }

    /// Row `p` is the bit set of block indices whose block contains `p`.
    /// Requires at most 64 blocks.
    pub(crate) fn incidence_rows(&self) -> Vec<u64> {
        debug_assert!(self.blocks.len() <= 64);
        let mut rows = vec![0u64; self.v];
        for (i, b) in self.blocks.iter().enumerate() {
            for p in b.iter() {
                rows[p] |= 1 << i;
            }
        }
        rows
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={} [", self.v)?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

/// Packs the bits of `x` selected by `mask` into the low bits.
pub(crate) fn compress(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros();
        out |= (x >> p & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Spreads the low bits of `x` onto the positions selected by `mask`.
pub(crate) fn expand(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros();
        out |= (x >> k & 1) << p;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Parameters of a design that passed [`validate_symmetric_design`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ValidationReport {
    pub v: usize,
    pub block_size: usize,
    pub lambda: usize,
}

impl ValidationReport {
    /// `Some(r)` when the parameters are `(2^r-1, 2^(r-1), 2^(r-2))` with `r >= 2`.
    pub fn class_rank(&self) -> Option<u32> {
        let r = (self.v + 1).checked_ilog2()?;
        (r >= 2 && self.v + 1 == 1 << r && self.block_size == 1 << (r - 1) && self.lambda == 1 << (r - 2)).then_some(r)
    }
}

/// One reason a design is not symmetric, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    BlockCount {
        found: usize,
        expected: usize,
    },
    NonUniformBlockSize {
        block: usize,
        size: usize,
        expected: usize,
    },
    NonConstantIntersection {
        pair: (usize, usize),
        found: usize,
        expected: usize,
    },
    PointDegree {
        point: usize,
        found: usize,
        expected: usize,
    },
    PairCoverage {
        pair: (usize, usize),
        found: usize,
        expected: usize,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::BlockCount { found, expected } => {
                write!(f, "{found} blocks, expected {expected}")
            }
            ValidationIssue::NonUniformBlockSize { block, size, expected } => {
                write!(f, "block {block} has size {size}, expected {expected}")
            }
            ValidationIssue::NonConstantIntersection { pair, found, expected } => write!(
                f,
                "blocks {} and {} meet in {found} points, expected {expected}",
                pair.0, pair.1
            ),
            ValidationIssue::PointDegree { point, found, expected } => {
                write!(f, "point {point} lies on {found} blocks, expected {expected}")
            }
            ValidationIssue::PairCoverage { pair, found, expected } => write!(
                f,
                "points {} and {} lie together on {found} blocks, expected {expected}",
                pair.0, pair.1
            ),
        }
    }
}

/// Failed validation: the first witness of each kind of violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

impl From<ValidationErrors> for DesignError {
    fn from(e: ValidationErrors) -> Self {
        DesignError::InvalidDesign(e.to_string())
    }
}

/// Checks that `design` is a symmetric `(v, k, λ)`-design and reports the
/// actual triple.
///
/// Besides the defining conditions (v blocks, uniform block size, constant
/// pairwise intersection) this rechecks the derived ones: every point on
/// exactly `k` blocks and every point pair on exactly `λ` blocks.
pub fn validate_symmetric_design(design: &Design) -> Result<ValidationReport, ValidationErrors> {
    let v = design.v();
    let blocks = design.blocks();
    let mut issues = Vec::new();

    if blocks.len() != v {
        issues.push(ValidationIssue::BlockCount {
            found: blocks.len(),
            expected: v,
        });
    }
    let Some(first) = blocks.first() else {
        return Err(ValidationErrors(issues));
    };
    let k = first.len();
    if let Some((i, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() != k) {
        issues.push(ValidationIssue::NonUniformBlockSize {
            block: i,
            size: b.len(),
            expected: k,
        });
    }

    let lambda = if blocks.len() > 1 {
        (blocks[0].bits() & blocks[1].bits()).count_ones() as usize
    } else {
        0
    };
    'pairs: for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let c = (blocks[i].bits() & blocks[j].bits()).count_ones() as usize;
            if c != lambda {
                issues.push(ValidationIssue::NonConstantIntersection {
                    pair: (i, j),
                    found: c,
                    expected: lambda,
                });
                break 'pairs;
            }
        }
    }

    if issues.is_empty() {
        let rows = design.incidence_rows();
        if let Some((p, r)) = rows.iter().enumerate().find(|(_, r)| r.count_ones() as usize != k) {
            issues.push(ValidationIssue::PointDegree {
                point: p,
                found: r.count_ones() as usize,
                expected: k,
            });
        }
        'cover: for p in 0..v {
            for q in p + 1..v {
                let c = (rows[p] & rows[q]).count_ones() as usize;
                if c != lambda {
                    issues.push(ValidationIssue::PairCoverage {
                        pair: (p, q),
                        found: c,
                        expected: lambda,
                    });
                    break 'cover;
                }
            }
        }
    }

    if issues.is_empty() {
        Ok(ValidationReport {
            v,
            block_size: k,
            lambda,
        })
    } else {
        Err(ValidationErrors(issues))
    }
}

/// The dual design: point `i` is block `i` of `design` (canonical order) and
/// the block for original point `p` collects the indices of blocks through `p`.
pub fn dual_design(design: &Design) -> Result<Design> {
    validate_symmetric_design(design)?;
    let rows = design.incidence_rows();
    Design::from_bits(design.v(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockset::testing::d7;

    #[test]
    fn d7_is_7_4_2() {
        let r = validate_symmetric_design(&d7()).unwrap();
        assert_eq!((r.v, r.block_size, r.lambda), (7, 4, 2));
        assert_eq!(r.class_rank(), Some(3));
    }

    #[test]
    fn three_point_design() {
        let d = Design::from_point_lists(3, [vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let r = validate_symmetric_design(&d).unwrap();
        assert_eq!((r.v, r.block_size, r.lambda), (3, 2, 1));
        assert_eq!(r.class_rank(), Some(2));
    }

    #[test]
    fn broken_d7_reports_witness_pair() {
        let d = Design::from_point_lists(
            7,
            [
                vec![3, 4, 5, 6],
                vec![0, 1, 3, 4],
                vec![0, 1, 5, 2],
                vec![0, 2, 3, 5],
                vec![0, 2, 4, 6],
                vec![1, 2, 4, 5],
                vec![1, 2, 3, 6],
            ],
        )
        .unwrap();
        let errs = validate_symmetric_design(&d).unwrap_err();
        let ValidationIssue::NonConstantIntersection { pair, found, .. } = errs.0[0].clone() else {
            panic!("unexpected issue {errs}");
        };
        let b = d.blocks();
        assert_eq!(b[pair.0].intersect_count(&b[pair.1]).unwrap(), found);
        assert_ne!(found, 2);
    }

    #[test]
    fn wrong_block_count_and_sizes() {
        let d = Design::from_point_lists(4, [vec![0, 1], vec![2, 3, 1]]).unwrap();
        let errs = validate_symmetric_design(&d).unwrap_err();
        assert!(errs.0.contains(&ValidationIssue::BlockCount { found: 2, expected: 4 }));
        assert!(errs
            .0
            .iter()
            .any(|i| matches!(i, ValidationIssue::NonUniformBlockSize { .. })));
    }

    #[test]
    fn duplicates_and_empties_rejected() {
        assert!(Design::from_point_lists(3, [vec![0, 1], vec![1, 0]]).is_err());
        assert!(Design::from_point_lists(3, [vec![]]).is_err());
    }

    #[test]
    fn dual_of_d7_is_valid() {
        let dual = dual_design(&d7()).unwrap();
        let r = validate_symmetric_design(&dual).unwrap();
        assert_eq!((r.v, r.block_size, r.lambda), (7, 4, 2));
    }

    #[test]
    fn subset_relabel_round_trip() {
        let ground = Block::from_points(7, [3, 4, 5]).unwrap();
        let blocks: Vec<Block> = [[3, 4], [3, 5], [4, 5]]
            .iter()
            .map(|p| Block::from_points(7, p.iter().copied()).unwrap())
            .collect();
        let local = Design::from_subset(&ground, &blocks).unwrap();
        assert_eq!(
            local,
            Design::from_point_lists(3, [vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap()
        );
        let mut back = local.embed(&ground).unwrap();
        back.sort();
        assert_eq!(back, blocks);
    }
}
