use std::collections::BTreeMap;

use super::group;
use crate::blockset::{Block, Design, Permutation};
use crate::report::{Check, CheckReport};

/// A group that fixes `fixed` pointwise and is claimed to act sharply
/// transitively on the remaining points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidalCertificate {
    pub fixed: Block,
    /// Sorted by image array; includes the identity.
    pub elements: Vec<Permutation>,
    /// `(a, b)` to the index of the element sending moved point `a` to `b`.
    pub orbit_witness: BTreeMap<(usize, usize), usize>,
}

impl PyramidalCertificate {
    /// Sorts the elements and records, for each moved pair, the first element
    /// realizing it. Nothing is validated here; see [`verify_certificate`].
    pub fn new(fixed: Block, elements: Vec<Permutation>) -> Self {
        let elements = group::canonical(&elements);
        let moved = fixed.complement();
        let mut orbit_witness = BTreeMap::new();
        for (i, g) in elements.iter().enumerate() {
            if g.v() != fixed.v() {
                continue;
            }
            for a in moved.iter() {
                orbit_witness.entry((a, g.apply(a))).or_insert(i);
            }
        }
        PyramidalCertificate {
            fixed,
            elements,
            orbit_witness,
        }
    }

    /// The complement of the fixed set.
    pub fn moved(&self) -> Block {
        self.fixed.complement()
    }

    /// The element sending moved point `a` to `b`.
    pub fn element_mapping(&self, a: usize, b: usize) -> Option<&Permutation> {
        self.orbit_witness.get(&(a, b)).map(|&i| &self.elements[i])
    }
}

/// Rederives every certificate property from scratch.
pub fn verify_certificate(design: &Design, cert: &PyramidalCertificate) -> CheckReport {
    let mut report = CheckReport::new();
    let v = design.v();
    let elements = &cert.elements;
    let moved = cert.moved();

    let shape = elements
        .iter()
        .position(|g| g.v() != v)
        .map(|i| format!("element {i} acts on {} points, design has {v}", elements[i].v()))
        .or_else(|| (cert.fixed.v() != v).then(|| format!("fixed set lives on {} points", cert.fixed.v())));
    report.push(Check::from_failure("shape", shape.clone()));
    if shape.is_some() {
        return report;
    }

    let half = v.div_ceil(2);
    report.push(Check::from_failure(
        "sizes",
        (moved.len() != half || cert.fixed.len() + 1 != half || elements.len() != moved.len()).then(|| {
            format!(
                "{} elements, {} moved points, {} fixed points on {v} points",
                elements.len(),
                moved.len(),
                cert.fixed.len()
            )
        }),
    ));

    report.push(Check::from_failure(
        "automorphisms",
        elements.iter().enumerate().find_map(|(i, g)| {
            g.first_unmapped_block(design)
                .map(|b| format!("element {i} = {g} sends block {b} outside the design"))
        }),
    ));

    report.push(Check::from_failure(
        "fixes-fixed-set",
        elements.iter().enumerate().find_map(|(i, g)| {
            cert.fixed
                .iter()
                .find(|&p| g.apply(p) != p)
                .map(|p| format!("element {i} = {g} moves fixed point {p}"))
        }),
    ));

    let sorted = group::canonical(elements);
    report.push(Check::from_failure(
        "identity",
        (!sorted.iter().any(Permutation::is_identity)).then(|| "identity missing".to_string()),
    ));
    report.push(Check::from_failure(
        "closure",
        group::closure_failure(&sorted).map(|(i, j)| format!("{} then {} is not an element", sorted[i], sorted[j])),
    ));
    report.push(Check::from_failure(
        "inverses",
        sorted
            .iter()
            .find(|g| !group::contains(&sorted, &g.inverse()))
            .map(|g| format!("inverse of {g} missing")),
    ));
    report.push(Check::from_failure(
        "abelian",
        (!group::is_abelian(&sorted)).then(|| "two elements do not commute".to_string()),
    ));

    let mut sharp = None;
    'pairs: for a in moved.iter() {
        for b in moved.iter() {
            let count = elements.iter().filter(|g| g.apply(a) == b).count();
            if count != 1 {
                sharp = Some(format!("{count} elements send {a} to {b}"));
                break 'pairs;
            }
        }
    }
    report.push(Check::from_failure("sharply-transitive", sharp));

    let mut witness = None;
    'wit: for a in moved.iter() {
        for b in moved.iter() {
            match cert.orbit_witness.get(&(a, b)) {
                None => {
                    witness = Some(format!("no witness for ({a}, {b})"));
                    break 'wit;
                }
                Some(&i) if elements.get(i).is_none_or(|g| g.apply(a) != b) => {
                    witness = Some(format!("witness {i} does not send {a} to {b}"));
                    break 'wit;
                }
                _ => {}
            }
        }
    }
    report.push(Check::from_failure("orbit-witness", witness));
    report
}
