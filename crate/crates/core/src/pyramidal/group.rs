//! Small permutation-group helpers over explicit element lists.

use std::collections::BTreeSet;

use crate::blockset::Permutation;

/// The group generated by `gens` on `v` points, sorted.
pub fn generate(v: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let mut seen: BTreeSet<Permutation> = BTreeSet::new();
    let id = Permutation::identity(v);
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for h in gens {
            let gh = g.then(h);
            if seen.insert(gh.clone()) {
                frontier.push(gh);
            }
        }
    }
    seen.into_iter().collect()
}

/// Sorted copy without duplicates.
pub fn canonical(elements: &[Permutation]) -> Vec<Permutation> {
    let set: BTreeSet<Permutation> = elements.iter().cloned().collect();
    set.into_iter().collect()
}

pub fn contains(sorted: &[Permutation], g: &Permutation) -> bool {
    sorted.binary_search(g).is_ok()
}

/// First pair `(i, j)` whose product leaves the set.
pub fn closure_failure(sorted: &[Permutation]) -> Option<(usize, usize)> {
    for (i, a) in sorted.iter().enumerate() {
        for (j, b) in sorted.iter().enumerate() {
            if !contains(sorted, &a.then(b)) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_abelian(elements: &[Permutation]) -> bool {
    elements
        .iter()
        .enumerate()
        .all(|(i, a)| elements[i + 1..].iter().all(|b| a.then(b) == b.then(a)))
}
