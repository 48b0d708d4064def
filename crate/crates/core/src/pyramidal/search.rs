use serde::{Deserialize, Serialize};

use super::construct::build_group;
use super::group;
use crate::blockset::mapsearch::{MapSearch, SearchLimits};
use crate::blockset::{Block, Design, Permutation};
use crate::error::{DesignError, Result};

fn automorphisms_with(design: &Design, allowed: Vec<u64>, limits: SearchLimits) -> (Vec<Permutation>, bool) {
    match MapSearch::new(design, design, allowed) {
        Some(search) => {
            let out = search.run_all_parallel(limits);
            (out.maps, out.complete)
        }
        None => (Vec::new(), true),
    }
}

/// All automorphisms fixing `fixed` pointwise, sorted.
///
/// A partial map survives only while it sends block traces to block traces.
/// When `limits` cut the search short the result is an error carrying the
/// number of automorphisms found so far.
pub fn stabilizer_search(design: &Design, fixed: &Block, limits: SearchLimits) -> Result<Vec<Permutation>> {
    if fixed.v() != design.v() {
        return Err(DesignError::Dimension {
            left: design.v(),
            right: fixed.v(),
        });
    }
    let free = !fixed.bits() & design.point_set().bits();
    let allowed = (0..design.v())
        .map(|p| if fixed.contains(p) { 1 << p } else { free })
        .collect();
    let (maps, complete) = automorphisms_with(design, allowed, limits);
    if !complete {
        return Err(DesignError::Budget {
            what: format!("stabilizer search fixing {fixed}"),
            limit: limits.max_nodes.unwrap_or(0),
            partial: maps.len(),
        });
    }
    Ok(maps)
}

/// Automorphisms mapping `o` onto itself, with a flag that is false when the
/// search was cut short.
pub fn o_preserving_automorphisms(design: &Design, o: &Block, limits: SearchLimits) -> (Vec<Permutation>, bool) {
    let inside = o.bits();
    let outside = !o.bits() & design.point_set().bits();
    let allowed = (0..design.v())
        .map(|p| if o.contains(p) { inside } else { outside })
        .collect();
    automorphisms_with(design, allowed, limits)
}

/// Every abelian subgroup of `elements` that acts sharply transitively on
/// `moved`. Each subgroup is returned sorted; the list is sorted.
///
/// Fixing a base point `a ∈ moved`, such a subgroup holds exactly one element
/// sending `a` to each `b ∈ moved`, so the search picks one candidate per
/// target and keeps choices that commute with each other.
pub fn sharply_transitive_abelian_subgroups(elements: &[Permutation], moved: &Block) -> Vec<Vec<Permutation>> {
    let Some(a) = moved.iter().next() else {
        return Vec::new();
    };
    let v = moved.v();
    let targets: Vec<usize> = moved.iter().collect();
    let candidates: Vec<Vec<&Permutation>> = targets
        .iter()
        .map(|&b| {
            elements
                .iter()
                .filter(|g| g.v() == v && g.apply(a) == b)
                .filter(|g| b != a || g.is_identity())
                .filter(|g| g.apply_bits(moved.bits()) == moved.bits())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<&Permutation> = Vec::with_capacity(targets.len());
    pick(&candidates, &mut chosen, &mut out);
    for h in &mut out {
        h.sort();
    }
    out.sort();
    out.dedup();
    out
}

fn pick<'a>(candidates: &[Vec<&'a Permutation>], chosen: &mut Vec<&'a Permutation>, out: &mut Vec<Vec<Permutation>>) {
    let depth = chosen.len();
    if depth == candidates.len() {
        let h: Vec<Permutation> = group::canonical(&chosen.iter().map(|&g| g.clone()).collect::<Vec<_>>());
        if h.len() == chosen.len() && group::closure_failure(&h).is_none() {
            out.push(h);
        }
        return;
    }
    for &g in &candidates[depth] {
        if chosen.iter().all(|h| h.then(g) == g.then(h)) {
            chosen.push(g);
            pick(candidates, chosen, out);
            chosen.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityReport {
    /// O-preserving automorphisms conjugated against the group.
    pub checked: usize,
    /// Automorphisms `f` with `f C f^-1 != C`, in cycle notation.
    pub failures: Vec<String>,
    /// False when the automorphism search hit its budget.
    pub complete: bool,
}

impl NormalityReport {
    pub fn holds(&self) -> bool {
        self.complete && self.failures.is_empty()
    }
}

/// Conjugates the group built at `O` by every automorphism preserving `O`.
pub fn check_normality(design: &Design, o_index: usize, limits: SearchLimits) -> Result<NormalityReport> {
    let cert = build_group(design, o_index)?;
    let o = cert.moved();
    let (autos, complete) = o_preserving_automorphisms(design, &o, limits);
    let failures = autos
        .iter()
        .filter(|f| {
            let finv = f.inverse();
            let conj: Vec<Permutation> =
                group::canonical(&cert.elements.iter().map(|g| finv.then(g).then(f)).collect::<Vec<_>>());
            conj != cert.elements
        })
        .map(|f| f.to_string())
        .collect();
    Ok(NormalityReport {
        checked: autos.len(),
        failures,
        complete,
    })
}
