use super::certificate::PyramidalCertificate;
use super::group;
use crate::analysis::DesignAnalysis;
use crate::blockset::{Block, Design, Permutation};
use crate::decomposition::{check_prop_z, decompose, DecompositionWitness, PropZVerdict};
use crate::error::{DesignError, Result};

/// The involution swapping `p` with the point `p'` of `O ∖ Z` and each pair
/// `{q_i, t_i}` completing a line `{p, q_i, t_i}` of `D_Z`; points off `O`
/// are fixed.
pub fn alpha_permutation(design: &Design, o: &Block, z: &Block, p: usize) -> Result<Permutation> {
    let o_index = design
        .index_of(o)
        .ok_or_else(|| DesignError::Argument(format!("{o} is not a block")))?;
    let w = decompose(design, o_index, z)?;
    alpha_from_witness(design, &w, p)
}

pub(crate) fn alpha_from_witness(design: &Design, w: &DecompositionWitness, p: usize) -> Result<Permutation> {
    if !w.z.contains(p) {
        return Err(DesignError::Argument(format!("{p} is not a point of Z = {}", w.z)));
    }
    let analysis = DesignAnalysis::new(&w.design_z)?;
    if !analysis.satisfies_pg_criterion() {
        return Err(DesignError::Domain(format!(
            "D_Z on {} is not of PG type; lines through {p} do not partition Z",
            w.z
        )));
    }
    let z_points = w.z.to_vec();
    let local = z_points.iter().position(|&x| x == p).expect("p in Z");
    let pairs = analysis
        .line_pairs(local)?
        .ok_or_else(|| DesignError::InvariantViolation(format!("{p} is not a center point of D_Z")))?;
    let mut swaps = vec![(p, w.p_prime)];
    swaps.extend(pairs.iter().map(|&(q, t)| (z_points[q], z_points[t])));
    let alpha = Permutation::from_transpositions(design.v(), &swaps)?;
    if let Some(b) = alpha.first_unmapped_block(design) {
        return Err(DesignError::InvariantViolation(format!(
            "alpha_{p} = {alpha} sends block {b} outside the design"
        )));
    }
    Ok(alpha)
}

/// `{α_p : p ∈ Z}` together with the identity, closed under composition.
pub fn group_for_z(design: &Design, o_index: usize, z: &Block) -> Result<Vec<Permutation>> {
    let w = decompose(design, o_index, z)?;
    let alphas = z
        .iter()
        .map(|p| alpha_from_witness(design, &w, p))
        .collect::<Result<Vec<_>>>()?;
    let g = group::generate(design.v(), &alphas);
    if g.len() != w.o.len() {
        return Err(DesignError::InvariantViolation(format!(
            "alphas for Z = {z} generate {} elements, expected {}",
            g.len(),
            w.o.len()
        )));
    }
    Ok(g)
}

/// Builds the elementary abelian group acting sharply transitively on the
/// center block `O` and fixing every other point.
///
/// Uses `Z = O` minus its largest point, then rebuilds from `O` minus its
/// smallest point and requires the same element set. Refuses when `D_Z` is
/// not of PG type.
pub fn build_group(design: &Design, o_index: usize) -> Result<PyramidalCertificate> {
    let prop = check_prop_z(design, o_index)?;
    if prop.verdict == PropZVerdict::NonePg {
        return Err(DesignError::Domain(format!(
            "block {o_index}: D_Z is not of PG type for any Z, no such group exists"
        )));
    }
    let o = design.blocks()[o_index];
    let last = 63 - o.bits().leading_zeros() as usize;
    let first = o.bits().trailing_zeros() as usize;
    let z1 = Block::from_raw(o.v(), o.bits() & !(1 << last));
    let z2 = Block::from_raw(o.v(), o.bits() & !(1 << first));
    let g1 = group_for_z(design, o_index, &z1)?;
    let g2 = group_for_z(design, o_index, &z2)?;
    if g1 != g2 {
        return Err(DesignError::InvariantViolation(format!(
            "groups built from Z = {z1} and Z = {z2} differ"
        )));
    }
    Ok(PyramidalCertificate::new(o.complement(), g1))
}
