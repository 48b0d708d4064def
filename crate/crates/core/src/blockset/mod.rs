//! Bit-vector blocks, canonical designs, permutations and design isomorphism.

mod block;
mod design;
pub(crate) mod mapsearch;
mod perm;

pub use block::{intersect_count, sym_diff, Block, Points, MAX_POINTS};
pub use design::{dual_design, validate_symmetric_design, Design, ValidationErrors, ValidationIssue, ValidationReport};
pub use mapsearch::{is_isomorphic, is_isomorphic_limited, SearchLimits};
pub use perm::Permutation;

#[cfg(test)]
pub(crate) mod testing {
    use super::Design;

    /// The (7,4,2) design used throughout the examples.
    pub fn d7() -> Design {
        Design::from_point_lists(
            7,
            [
                vec![3, 4, 5, 6],
                vec![0, 1, 3, 4],
                vec![0, 1, 5, 6],
                vec![0, 2, 3, 5],
                vec![0, 2, 4, 6],
                vec![1, 2, 4, 5],
                vec![1, 2, 3, 6],
            ],
        )
        .unwrap()
    }
}
