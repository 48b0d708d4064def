//! Center-block decomposition and the sum construction.
//!
//! A design with center block `O` is determined by a design `D_O` on the
//! complement of `O`, a design `D_Z` on a subset `Z ⊂ O` missing one point
//! `p'`, and a bijection `δ` between their block lists: its blocks are `O`
//! and `X ∪ δ(X)`, `X ∪ (O ∖ δ(X))` for every block `X` of `D_O`.
//!
//! Component designs are stored relabeled onto `{0, .., 2^(r-1)-2}`: local
//! point `i` is the `i`-th smallest member of `O^c` (resp. `Z`). That
//! relabeling preserves block order, so `δ` is an index map between the
//! canonical block lists.

use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{is_center_block, satisfies_pg_criterion};
use crate::blockset::{validate_symmetric_design, Block, Design};
use crate::error::{DesignError, Result};

/// Largest bijection count enumerated exhaustively (8!).
pub const EXHAUSTIVE_DELTA_LIMIT: u64 = 40_320;

/// The decomposition of a design at a center block `O` relative to `Z ⊂ O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub o: Block,
    pub z: Block,
    /// The point of `O` missing from `Z`.
    pub p_prime: usize,
    /// `D_O`, relabeled from `O^c`.
    pub design_o: Design,
    /// `D_Z`, relabeled from `Z`.
    pub design_z: Design,
    /// `delta[i] = j`: block `i` of `design_o` maps to block `j` of `design_z`.
    pub delta: Vec<usize>,
}

impl DecompositionWitness {
    pub fn o_complement(&self) -> Block {
        self.o.complement()
    }

    /// Blocks of `D_O` as subsets of the full point set.
    pub fn blocks_o(&self) -> Vec<Block> {
        self.design_o
            .embed(&self.o_complement())
            .expect("sizes checked on construction")
    }

    /// Blocks of `D_Z` as subsets of the full point set.
    pub fn blocks_z(&self) -> Vec<Block> {
        self.design_z.embed(&self.z).expect("sizes checked on construction")
    }

    /// `δ(X)` for block `i` of `D_O`, on the full point set.
    pub fn delta_block(&self, i: usize) -> Block {
        self.blocks_z()[self.delta[i]]
    }

    /// Reassembles the design by the sum construction.
    pub fn reassemble(&self) -> Result<Design> {
        sum_construction(&self.o, &self.design_o, &self.z, &self.design_z, &self.delta)
    }
}

/// Rank `r` of a design on `2|O| - 1` points, from the center block size.
fn rank_from_center(o: &Block) -> Result<u32> {
    let size = o.len();
    if size < 4 || !size.is_power_of_two() || o.v() != 2 * size - 1 {
        return Err(DesignError::Argument(format!(
            "{o} must be a 2^(r-1)-subset of 2^r-1 points with r >= 3"
        )));
    }
    Ok(size.trailing_zeros() + 1)
}

fn check_component(d: &Design, rank: u32, name: &str) -> Result<()> {
    let report = validate_symmetric_design(d).map_err(|e| DesignError::Argument(format!("{name}: {e}")))?;
    let expected = ((1usize << (rank - 1)) - 1, 1usize << (rank - 2), 1usize << (rank - 3));
    if (report.v, report.block_size, report.lambda) != expected {
        return Err(DesignError::Argument(format!(
            "{name} has parameters ({}, {}, {}), expected {:?}",
            report.v, report.block_size, report.lambda, expected
        )));
    }
    Ok(())
}

fn check_z(o: &Block, z: &Block) -> Result<usize> {
    if z.v() != o.v() {
        return Err(DesignError::Dimension {
            left: o.v(),
            right: z.v(),
        });
    }
    if !z.is_subset(o) {
        return Err(DesignError::Argument(format!("Z = {z} is not contained in O = {o}")));
    }
    if z.len() + 1 != o.len() {
        return Err(DesignError::Argument(format!(
            "Z = {z} must have {} points",
            o.len() - 1
        )));
    }
    Ok((o.bits() & !z.bits()).trailing_zeros() as usize)
}

fn check_bijection(delta: &[usize], from: usize, to: usize) -> Result<()> {
    if delta.len() != from || from != to {
        return Err(DesignError::Argument(format!(
            "delta maps {} blocks, expected a bijection between {from} and {to} blocks",
            delta.len()
        )));
    }
    let mut seen = vec![false; to];
    for &j in delta {
        if j >= to || std::mem::replace(&mut seen[j], true) {
            return Err(DesignError::Argument(format!("delta is not a bijection (image {j})")));
        }
    }
    Ok(())
}

/// Assembles `{O} ∪ {X ∪ δ(X), X ∪ (O ∖ δ(X)) : X ∈ B_O}`.
///
/// The result is validated as a `(2^r-1, 2^(r-1), 2^(r-2))`-design with `O`
/// as a center block.
pub fn sum_construction(o: &Block, design_o: &Design, z: &Block, design_z: &Design, delta: &[usize]) -> Result<Design> {
    let rank = rank_from_center(o)?;
    check_z(o, z)?;
    let oc = o.complement();
    if design_o.v() != oc.len() || design_z.v() != z.len() {
        return Err(DesignError::Argument(format!(
            "component point counts ({}, {}) do not match |O^c| = {} and |Z| = {}",
            design_o.v(),
            design_z.v(),
            oc.len(),
            z.len()
        )));
    }
    check_component(design_o, rank, "D_O")?;
    check_component(design_z, rank, "D_Z")?;
    check_bijection(delta, design_o.len(), design_z.len())?;

    let xs = design_o.embed(&oc)?;
    let ys = design_z.embed(z)?;
    let mut blocks = Vec::with_capacity(2 * xs.len() + 1);
    blocks.push(*o);
    for (x, &j) in xs.iter().zip(delta) {
        let y = ys[j];
        blocks.push(Block::from_raw(o.v(), x.bits() | y.bits()));
        blocks.push(Block::from_raw(o.v(), x.bits() | (o.bits() & !y.bits())));
    }
    let design = Design::new(o.v(), blocks)?;

    let report = validate_symmetric_design(&design)
        .map_err(|e| DesignError::InvariantViolation(format!("sum is not symmetric: {e}")))?;
    if report.class_rank() != Some(rank) {
        return Err(DesignError::InvariantViolation(format!(
            "sum has parameters ({}, {}, {})",
            report.v, report.block_size, report.lambda
        )));
    }
    let oi = design.index_of(o).expect("O was inserted");
    if !is_center_block(&design, oi) {
        return Err(DesignError::InvariantViolation(format!(
            "{o} is not a center block of the sum"
        )));
    }
    Ok(design)
}

/// Recovers `(D_O, D_Z, δ_Z)` from a design and one of its center blocks.
pub fn decompose(design: &Design, o_index: usize, z: &Block) -> Result<DecompositionWitness> {
    let o = *design
        .blocks()
        .get(o_index)
        .ok_or_else(|| DesignError::Argument(format!("no block with index {o_index}")))?;
    let rank = rank_from_center(&o)?;
    if !is_center_block(design, o_index) {
        return Err(DesignError::Argument(format!(
            "block {o_index} = {o} is not a center block"
        )));
    }
    let p_prime = check_z(&o, z)?;
    let oc = o.complement();
    let half = 1usize << (rank - 2);

    // Each trace X = B ∩ O^c is shared by exactly two blocks, B and O △ B.
    let pairs: Vec<(u64, [u64; 2])> = design
        .blocks()
        .iter()
        .filter(|b| **b != o)
        .map(|b| (b.bits() & oc.bits(), b.bits() & o.bits()))
        .sorted()
        .chunk_by(|(x, _)| *x)
        .into_iter()
        .map(|(x, group)| {
            let traces: Vec<u64> = group.map(|(_, y)| y).collect();
            match traces.as_slice() {
                &[a, b] if a ^ b == o.bits() => Ok((x, [a, b])),
                _ => Err(DesignError::InvariantViolation(format!(
                    "trace {} on O^c is not shared by a complementary block pair",
                    Block::from_raw(o.v(), x)
                ))),
            }
        })
        .collect::<Result<_>>()?;

    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for (x, [a, b]) in pairs {
        let y = if a & !z.bits() == 0 { a } else { b };
        if y & !z.bits() != 0 || y.count_ones() as usize != half {
            return Err(DesignError::InvariantViolation(format!(
                "no block over {} meets Z in a {half}-subset",
                Block::from_raw(o.v(), x)
            )));
        }
        xs.push(Block::from_raw(o.v(), x));
        ys.push(Block::from_raw(o.v(), y));
    }
    let design_o = Design::from_subset(&oc, &xs)?;
    let design_z = Design::from_subset(z, &ys)
        .map_err(|e| DesignError::InvariantViolation(format!("B_Z is not a block set: {e}")))?;
    check_component(&design_o, rank, "D_O").map_err(|e| DesignError::InvariantViolation(e.to_string()))?;
    check_component(&design_z, rank, "D_Z").map_err(|e| DesignError::InvariantViolation(e.to_string()))?;

    // xs is sorted by trace value, which is design_o's canonical order.
    let local_z = design_z.embed(z)?;
    let delta = ys
        .iter()
        .map(|y| local_z.iter().position(|b| b == y).expect("y is a block of D_Z"))
        .collect();
    Ok(DecompositionWitness {
        o,
        z: *z,
        p_prime,
        design_o,
        design_z,
        delta,
    })
}

/// The witness for another `Z' ⊂ O`, derived from `w` alone:
/// `δ_Z'(X) = δ_Z(X)` when `δ_Z(X) ⊆ Z ∩ Z'`, else `O ∖ δ_Z(X)`.
pub fn transfer_delta(w: &DecompositionWitness, z_prime: &Block) -> Result<DecompositionWitness> {
    let p_prime = check_z(&w.o, z_prime)?;
    let common = w.z.bits() & z_prime.bits();
    let old = w.blocks_z();
    let ys: Vec<Block> = w
        .delta
        .iter()
        .map(|&j| {
            let y = old[j].bits();
            let moved = if y & !common == 0 { y } else { w.o.bits() & !y };
            Block::from_raw(w.o.v(), moved)
        })
        .collect();
    let design_z = Design::from_subset(z_prime, &ys)?;
    let local = design_z.embed(z_prime)?;
    let delta = ys
        .iter()
        .map(|y| local.iter().position(|b| b == y).expect("y is a block"))
        .collect();
    Ok(DecompositionWitness {
        o: w.o,
        z: *z_prime,
        p_prime,
        design_o: w.design_o.clone(),
        design_z,
        delta,
    })
}

/// The `2^(r-1)` subsets of `O` obtained by dropping one point, ordered by
/// the dropped point.
pub fn z_choices(o: &Block) -> Vec<Block> {
    o.iter().map(|p| Block::from_raw(o.v(), o.bits() & !(1 << p))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropZVerdict {
    AllPg,
    NonePg,
}

impl fmt::Display for PropZVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropZVerdict::AllPg => "all-PG",
            PropZVerdict::NonePg => "none-PG",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropZReport {
    pub verdict: PropZVerdict,
    /// `(p', D_Z is PG-type)` for `Z = O ∖ {p'}`.
    pub evidence: Vec<(usize, bool)>,
}

/// Evaluates the PG criterion on `D_Z` for every `Z = O ∖ {p'}` and checks
/// that all verdicts agree.
pub fn check_prop_z(design: &Design, o_index: usize) -> Result<PropZReport> {
    let o = *design
        .blocks()
        .get(o_index)
        .ok_or_else(|| DesignError::Argument(format!("no block with index {o_index}")))?;
    let evidence = z_choices(&o)
        .iter()
        .map(|z| {
            let w = decompose(design, o_index, z)?;
            Ok((w.p_prime, satisfies_pg_criterion(&w.design_z)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = evidence[0].1;
    if let Some(&(p, verdict)) = evidence.iter().find(|(_, pg)| *pg != first) {
        return Err(DesignError::InvariantViolation(format!(
            "D_Z verdicts disagree at O = {o}: Z = O ∖ {{{}}} gives {first}, Z = O ∖ {{{p}}} gives {verdict}",
            evidence[0].0
        )));
    }
    Ok(PropZReport {
        verdict: if first {
            PropZVerdict::AllPg
        } else {
            PropZVerdict::NonePg
        },
        evidence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaSearchMode {
    /// Every bijection, in lexicographic order of the index map.
    Exhaustive,
    /// `samples` bijections drawn from a seeded generator.
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaHit {
    pub delta: Vec<usize>,
    pub design: Design,
}

/// Runs the sum construction over bijections `δ` and keeps those whose sum
/// satisfies `predicate`.
pub fn delta_search<F>(
    design_o: &Design,
    design_z: &Design,
    o: &Block,
    z: &Block,
    mode: DeltaSearchMode,
    predicate: F,
) -> Result<Vec<DeltaHit>>
where
    F: Fn(&Design) -> bool + Sync,
{
    let n = design_o.len();
    let rank = rank_from_center(o)?;
    check_component(design_o, rank, "D_O")?;
    check_component(design_z, rank, "D_Z")?;
    let candidates: Vec<Vec<usize>> = match mode {
        DeltaSearchMode::Exhaustive => {
            let count = (1..=n as u64).product::<u64>();
            if count > EXHAUSTIVE_DELTA_LIMIT {
                return Err(DesignError::Budget {
                    what: format!("exhaustive delta search over {n}! bijections"),
                    limit: EXHAUSTIVE_DELTA_LIMIT,
                    partial: 0,
                });
            }
            (0..n).permutations(n).collect()
        }
        DeltaSearchMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let mut d: Vec<usize> = (0..n).collect();
                    d.shuffle(&mut rng);
                    d
                })
                .collect()
        }
    };
    candidates
        .into_par_iter()
        .map(|delta| {
            let design = sum_construction(o, design_o, z, design_z, &delta)?;
            Ok(predicate(&design).then_some(DeltaHit { delta, design }))
        })
        .filter_map(|r| r.transpose())
        .collect()
}
