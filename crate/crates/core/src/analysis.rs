//! Lines, center points, center blocks and the PG-type criterion of a design.
//!
//! For a design with parameters `(2^r-1, 2^(r-1), 2^(r-2))`, three points
//! `p, q, t` lie on no common block exactly when the block sets through them
//! satisfy `B_t = B_p △ B_q`; that identity is what [`DesignAnalysis::line`]
//! tests. Such a `t` is unique.

use serde::{Deserialize, Serialize};

use crate::blockset::{validate_symmetric_design, Design, ValidationReport};
use crate::error::{DesignError, Result};

/// A point triple contained in no block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DesignLine {
    pub p: usize,
    pub q: usize,
    pub t: usize,
}

impl DesignLine {
    /// The three points in increasing order.
    pub fn sorted(&self) -> [usize; 3] {
        let mut a = [self.p, self.q, self.t];
        a.sort_unstable();
        a
    }

    pub fn contains(&self, x: usize) -> bool {
        self.p == x || self.q == x || self.t == x
    }
}

/// Incidence data for a design in the `(2^r-1, 2^(r-1), 2^(r-2))` family.
pub struct DesignAnalysis<'a> {
    design: &'a Design,
    report: ValidationReport,
    rank: u32,
    rows: Vec<u64>,
}

impl<'a> DesignAnalysis<'a> {
    /// Fails with a domain error when the design is invalid or outside the family.
    pub fn new(design: &'a Design) -> Result<Self> {
        let report = validate_symmetric_design(design)
            .map_err(|e| DesignError::Domain(format!("not a symmetric design: {e}")))?;
        let rank = report.class_rank().ok_or_else(|| {
            DesignError::Domain(format!(
                "parameters ({}, {}, {}) are not of the form (2^r-1, 2^(r-1), 2^(r-2))",
                report.v, report.block_size, report.lambda
            ))
        })?;
        Ok(DesignAnalysis {
            design,
            report,
            rank,
            rows: design.incidence_rows(),
        })
    }

    pub fn design(&self) -> &Design {
        self.design
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn report(&self) -> ValidationReport {
        self.report
    }

    /// The third point of the line through `p` and `q`, if `p, q` are collinear.
    pub fn line(&self, p: usize, q: usize) -> Result<Option<DesignLine>> {
        let v = self.design.v();
        if p >= v || q >= v {
            return Err(DesignError::PointOutOfRange { point: p.max(q), v });
        }
        if p == q {
            return Err(DesignError::Argument(format!("line through {p} and itself")));
        }
        let target = self.rows[p] ^ self.rows[q];
        Ok(self
            .rows
            .iter()
            .position(|&r| r == target)
            .map(|t| DesignLine { p, q, t }))
    }

    pub fn is_center_point(&self, p: usize) -> bool {
        (0..self.design.v())
            .filter(|&q| q != p)
            .all(|q| matches!(self.line(p, q), Ok(Some(_))))
    }

    /// The pairs `{q_i, t_i}` partitioning the other points when `p` is a
    /// center point, each with `q_i < t_i`, sorted.
    pub fn line_pairs(&self, p: usize) -> Result<Option<Vec<(usize, usize)>>> {
        let mut pairs = Vec::new();
        for q in 0..self.design.v() {
            if q == p {
                continue;
            }
            match self.line(p, q)? {
                None => return Ok(None),
                Some(l) if q < l.t => pairs.push((q, l.t)),
                Some(_) => {}
            }
        }
        Ok(Some(pairs))
    }

    pub fn satisfies_pg_criterion(&self) -> bool {
        let v = self.design.v();
        (0..v).all(|p| (p + 1..v).all(|q| matches!(self.line(p, q), Ok(Some(_)))))
    }

    /// Every line `{p, q, t}` with `p < q < t`.
    pub fn lines(&self) -> Vec<DesignLine> {
        let v = self.design.v();
        let mut out = Vec::new();
        for p in 0..v {
            for q in p + 1..v {
                if let Ok(Some(l)) = self.line(p, q) {
                    if l.t > q {
                        out.push(l);
                    }
                }
            }
        }
        out
    }

    pub fn center_points(&self) -> Vec<usize> {
        (0..self.design.v()).filter(|&p| self.is_center_point(p)).collect()
    }
}

/// Indices of the blocks containing `p`.
pub fn blocks_through(design: &Design, p: usize) -> Result<Vec<usize>> {
    check_point(design, p)?;
    Ok(design
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.contains(p))
        .map(|(i, _)| i)
        .collect())
}

/// Indices of the blocks avoiding `p`.
pub fn blocks_avoiding(design: &Design, p: usize) -> Result<Vec<usize>> {
    check_point(design, p)?;
    Ok(design
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.contains(p))
        .map(|(i, _)| i)
        .collect())
}

fn check_point(design: &Design, p: usize) -> Result<()> {
    if p >= design.v() {
        return Err(DesignError::PointOutOfRange {
            point: p,
            v: design.v(),
        });
    }
    Ok(())
}

pub fn design_line(design: &Design, p: usize, q: usize) -> Result<Option<DesignLine>> {
    DesignAnalysis::new(design)?.line(p, q)
}

pub fn is_center_point(design: &Design, p: usize) -> Result<bool> {
    check_point(design, p)?;
    Ok(DesignAnalysis::new(design)?.is_center_point(p))
}

/// True when every pair of distinct points is collinear, which holds exactly
/// for designs isomorphic to the points and hyperplane complements of PG(r-1, 2).
pub fn satisfies_pg_criterion(design: &Design) -> Result<bool> {
    Ok(DesignAnalysis::new(design)?.satisfies_pg_criterion())
}

/// Indices `i` such that `blocks[i] △ B` is a block for every other block `B`.
pub fn center_blocks(design: &Design) -> Vec<usize> {
    (0..design.len()).filter(|&i| is_center_block(design, i)).collect()
}

pub fn is_center_block(design: &Design, i: usize) -> bool {
    let blocks = design.blocks();
    let Some(o) = blocks.get(i) else {
        return false;
    };
    blocks.iter().enumerate().all(|(j, b)| {
        j == i
            || design
                .blocks()
                .binary_search_by(|x| x.bits().cmp(&(o.bits() ^ b.bits())))
                .is_ok()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockset::testing::d7;
    use crate::blockset::Block;
    use crate::geometry::pg_hyperplane_complement_design as pg;

    fn blk(v: usize, pts: &[usize]) -> Block {
        Block::from_points(v, pts.iter().copied()).unwrap()
    }

    /// The naive definition: no block contains all of p, q, t.
    fn naive_line(d: &Design, p: usize, q: usize) -> Option<usize> {
        let ts: Vec<usize> = (0..d.v())
            .filter(|&t| t != p && t != q)
            .filter(|&t| {
                !d.blocks()
                    .iter()
                    .any(|b| b.contains(p) && b.contains(q) && b.contains(t))
            })
            .collect();
        assert!(ts.len() <= 1, "third point not unique");
        ts.first().copied()
    }

    #[test]
    fn blocks_through_and_avoiding_zero_in_d7() {
        let d = d7();
        let through: Vec<Block> = blocks_through(&d, 0).unwrap().iter().map(|&i| d.blocks()[i]).collect();
        let mut expect = vec![
            blk(7, &[0, 1, 3, 4]),
            blk(7, &[0, 1, 5, 6]),
            blk(7, &[0, 2, 3, 5]),
            blk(7, &[0, 2, 4, 6]),
        ];
        expect.sort();
        assert_eq!(through, expect);
        let avoiding: Vec<Block> = blocks_avoiding(&d, 0).unwrap().iter().map(|&i| d.blocks()[i]).collect();
        let mut expect = vec![blk(7, &[3, 4, 5, 6]), blk(7, &[1, 2, 4, 5]), blk(7, &[1, 2, 3, 6])];
        expect.sort();
        assert_eq!(avoiding, expect);
        let through3 = blocks_through(&d, 3).unwrap();
        assert_eq!(through3.len(), 4);
        assert!(through3.contains(&d.index_of(&blk(7, &[3, 4, 5, 6])).unwrap()));
        assert!(blocks_through(&d, 7).is_err());
    }

    #[test]
    fn hyperplane_of_blocks_avoiding_a_point() {
        let d = pg(3).unwrap();
        for p in 0..7 {
            assert_eq!(blocks_through(&d, p).unwrap().len(), 4);
        }
        let avoid = blocks_avoiding(&d, 0).unwrap();
        assert_eq!(avoid.len(), 3);
        for &i in &avoid {
            for &j in &avoid {
                if i != j {
                    let x = d.blocks()[i].sym_diff(&d.blocks()[j]).unwrap();
                    assert!(avoid.contains(&d.index_of(&x).unwrap()));
                }
            }
        }
        let mut all = blocks_through(&d, 0).unwrap();
        all.extend(avoid);
        all.sort();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn line_matches_naive_triple_scan() {
        for d in [d7(), pg(3).unwrap(), pg(4).unwrap()] {
            let a = DesignAnalysis::new(&d).unwrap();
            for p in 0..d.v() {
                for q in 0..d.v() {
                    if p == q {
                        continue;
                    }
                    let fast = a.line(p, q).unwrap().map(|l| l.t);
                    assert_eq!(fast, naive_line(&d, p, q));
                    assert_eq!(fast, a.line(q, p).unwrap().map(|l| l.t));
                }
            }
        }
    }

    #[test]
    fn line_through_points_three_and_four_of_d7() {
        let d = d7();
        let l = design_line(&d, 3, 4).unwrap().unwrap();
        assert_eq!(Some(l.t), naive_line(&d, 3, 4));
        assert!(design_line(&d, 3, 3).is_err());
    }

    #[test]
    fn pg_designs_are_pg_type() {
        for r in 3..=5 {
            let d = pg(r).unwrap();
            assert!(satisfies_pg_criterion(&d).unwrap());
        }
        assert!(satisfies_pg_criterion(&d7()).unwrap());
        let d = pg(4).unwrap();
        assert!((0..15).all(|p| is_center_point(&d, p).unwrap()));
        assert!((0..7).all(|p| is_center_point(&d7(), p).unwrap()));
    }

    #[test]
    fn criterion_rejects_foreign_parameters() {
        let bad = Design::from_point_lists(3, [vec![0, 1]]).unwrap();
        assert!(matches!(satisfies_pg_criterion(&bad), Err(DesignError::Domain(_))));
        // (4, 3, 2) is symmetric but outside the family.
        let k4 = Design::from_point_lists(4, [vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).unwrap();
        assert!(validate_symmetric_design(&k4).is_ok());
        assert!(matches!(satisfies_pg_criterion(&k4), Err(DesignError::Domain(_))));
        assert_eq!(blocks_through(&k4, 0).unwrap().len(), 3);
    }

    #[test]
    fn center_blocks_of_d7_and_pg() {
        let d = d7();
        let o = d.index_of(&blk(7, &[3, 4, 5, 6])).unwrap();
        assert!(center_blocks(&d).contains(&o));
        let p4 = pg(4).unwrap();
        assert_eq!(center_blocks(&p4).len(), 15);
    }

    #[test]
    fn line_pairs_partition_at_center_point() {
        let d = pg(4).unwrap();
        let a = DesignAnalysis::new(&d).unwrap();
        for p in 0..15 {
            let pairs = a.line_pairs(p).unwrap().unwrap();
            assert_eq!(pairs.len(), 7);
            let covered = pairs.iter().fold(1u64 << p, |acc, &(q, t)| acc | 1 << q | 1 << t);
            assert_eq!(covered, (1 << 15) - 1);
            for b in d.blocks() {
                if b.contains(p) {
                    assert!(pairs.iter().all(|&(q, t)| b.contains(q) != b.contains(t)));
                } else {
                    let met = pairs.iter().filter(|&&(q, t)| b.contains(q) || b.contains(t)).count();
                    assert!(pairs.iter().all(|&(q, t)| b.contains(q) == b.contains(t)));
                    assert_eq!(met, 4);
                }
            }
        }
    }

    #[test]
    fn lines_of_d7_are_seven() {
        let d = d7();
        assert_eq!(DesignAnalysis::new(&d).unwrap().lines().len(), 7);
    }
}
