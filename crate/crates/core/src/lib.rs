//! Symmetric designs with the parameters of point-hyperplane designs of
//! binary projective spaces: construction, analysis, sum decomposition and
//! pyramidal automorphism groups.

pub mod acceptance;
pub mod analysis;
pub mod blockset;
pub mod catalog;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod io;
pub mod pyramidal;
pub mod report;

pub use blockset::{Block, Design, Permutation};
pub use error::{DesignError, Result};
