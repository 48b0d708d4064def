//! Pyramidal automorphism groups: construction from a center block,
//! certificate verification, exhaustive stabilizer search and the checks
//! that an abelian pyramidal group has the constructed form.

mod certificate;
mod construct;
pub mod group;
mod search;
mod theorem;

pub use certificate::{verify_certificate, PyramidalCertificate};
pub use construct::{alpha_permutation, build_group, group_for_z};
pub use search::{
    check_normality, o_preserving_automorphisms, sharply_transitive_abelian_subgroups, stabilizer_search,
    NormalityReport,
};
pub use theorem::{
    extract_involution_chain, trace_family, verify_lemma1, verify_theorem, InvolutionChain, InvolutionChainSummary,
};

#[cfg(test)]
mod tests;
