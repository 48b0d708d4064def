//! Backtracking search for point maps that carry one block list onto another.
//!
//! A partial map `g` defined on source points `A` is kept only while the
//! multiset of traces `{ g(B ∩ A) : B ∈ src }` equals the multiset
//! `{ B' ∩ g(A) : B' ∈ dst }`. On the full point set this is exactly block
//! list equality. Candidate images are further restricted by triple-count
//! profiles of points and point pairs, which every isomorphism preserves.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::{validate_symmetric_design, Design, Permutation};
use crate::error::{DesignError, Result};

/// Stops a search after a node count or a wall-clock deadline.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchLimits {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_deadline(deadline: Option<Instant>) -> Self {
        SearchLimits {
            max_nodes: None,
            deadline,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    First,
    All,
}

#[derive(Debug)]
pub(crate) struct SearchOutcome {
    pub maps: Vec<Permutation>,
    /// False when a limit cut the search short.
    pub complete: bool,
    pub nodes: u64,
}

/// Point and pair signatures derived from block triple counts.
struct Profile {
    point: Vec<u64>,
    pair: Vec<u64>,
}

#[inline]
fn mix(mut h: u64, x: u64) -> u64 {
    h ^= x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

impl Profile {
    fn new(d: &Design) -> Self {
        let v = d.v();
        let rows = d.incidence_rows();
        let mut pair = vec![0u64; v * v];
        let mut hist = Vec::new();
        for p in 0..v {
            for q in p + 1..v {
                let pq = rows[p] & rows[q];
                hist.clear();
                hist.extend(
                    (0..v)
                        .filter(|&t| t != p && t != q)
                        .map(|t| (pq & rows[t]).count_ones() as u64),
                );
                hist.sort_unstable();
                let h = hist.iter().fold(mix(0, pq.count_ones() as u64), |h, &c| mix(h, c));
                pair[p * v + q] = h;
                pair[q * v + p] = h;
            }
        }
        let point = (0..v)
            .map(|p| {
                let mut row: Vec<u64> = (0..v).filter(|&q| q != p).map(|q| pair[p * v + q]).collect();
                row.sort_unstable();
                row.into_iter().fold(mix(1, rows[p].count_ones() as u64), mix)
            })
            .collect();
        Profile { point, pair }
    }
}

pub(crate) struct MapSearch<'a> {
    src: &'a Design,
    dst: &'a Design,
    allowed: Vec<u64>,
    src_profile: Profile,
    dst_profile: Profile,
    order: Vec<usize>,
}

impl<'a> MapSearch<'a> {
    /// `allowed[p]` restricts the images of source point `p`. Returns `None`
    /// when the profiles already rule out every map.
    pub fn new(src: &'a Design, dst: &'a Design, allowed: Vec<u64>) -> Option<Self> {
        assert_eq!(allowed.len(), src.v());
        if src.v() != dst.v() || src.len() != dst.len() || src.len() > 64 {
            return None;
        }
        let src_profile = Profile::new(src);
        let dst_profile = Profile::new(dst);
        let mut a = src_profile.point.clone();
        let mut b = dst_profile.point.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return None;
        }
        let allowed: Vec<u64> = allowed
            .iter()
            .enumerate()
            .map(|(p, &mask)| {
                let mut m = 0u64;
                for q in super::Points(mask) {
                    if dst_profile.point[q] == src_profile.point[p] {
                        m |= 1 << q;
                    }
                }
                m
            })
            .collect();
        if allowed.contains(&0) {
            return None;
        }
        let mut order: Vec<usize> = (0..src.v()).collect();
        order.sort_by_key(|&p| (allowed[p].count_ones(), p));
        Some(MapSearch {
            src,
            dst,
            allowed,
            src_profile,
            dst_profile,
            order,
        })
    }

    pub fn run(&self, mode: Mode, limits: SearchLimits) -> SearchOutcome {
        let nodes = AtomicU64::new(0);
        let stop = AtomicBool::new(false);
        let mut st = State::new(self);
        let mut maps = Vec::new();
        let complete = st.descend(self, 0, mode, &limits, &nodes, &stop, &mut maps);
        SearchOutcome {
            maps,
            complete,
            nodes: nodes.load(Ordering::Relaxed),
        }
    }

    /// Enumerates all maps, splitting the first free branching point across
    /// the rayon pool. Output is sorted, so it does not depend on thread count.
    pub fn run_all_parallel(&self, limits: SearchLimits) -> SearchOutcome {
        let forced = self
            .order
            .iter()
            .take_while(|&&p| self.allowed[p].count_ones() == 1)
            .count();
        if forced >= self.order.len() {
            return self.run(Mode::All, limits);
        }
        let nodes = AtomicU64::new(0);
        let stop = AtomicBool::new(false);
        let mut prefix = State::new(self);
        for &p in &self.order[..forced] {
            let b = self.allowed[p].trailing_zeros() as usize;
            if !prefix.try_assign(self, p, b) {
                return SearchOutcome {
                    maps: Vec::new(),
                    complete: true,
                    nodes: 0,
                };
            }
        }
        let branch = self.order[forced];
        let candidates: Vec<usize> = super::Points(self.allowed[branch] & !prefix.used).collect();
        let parts: Vec<(Vec<Permutation>, bool)> = candidates
            .par_iter()
            .map(|&b| {
                let mut st = prefix.clone();
                let mut maps = Vec::new();
                if !st.try_assign(self, branch, b) {
                    return (maps, true);
                }
                let ok = st.descend(self, forced + 1, Mode::All, &limits, &nodes, &stop, &mut maps);
                (maps, ok)
            })
            .collect();
        let complete = parts.iter().all(|(_, ok)| *ok);
        let mut maps: Vec<Permutation> = parts.into_iter().flat_map(|(m, _)| m).collect();
        maps.sort();
        SearchOutcome {
            maps,
            complete,
            nodes: nodes.load(Ordering::Relaxed),
        }
    }
}

#[derive(Clone)]
struct State {
    image: Vec<u8>,
    assigned: Vec<usize>,
    used: u64,
    src_trace: Vec<u64>,
    dst_trace: Vec<u64>,
    buf_a: Vec<u64>,
    buf_b: Vec<u64>,
}

const UNSET: u8 = u8::MAX;

impl State {
    fn new(s: &MapSearch<'_>) -> Self {
        State {
            image: vec![UNSET; s.src.v()],
            assigned: Vec::with_capacity(s.src.v()),
            used: 0,
            src_trace: vec![0; s.src.len()],
            dst_trace: vec![0; s.dst.len()],
            buf_a: Vec::with_capacity(s.src.len()),
            buf_b: Vec::with_capacity(s.dst.len()),
        }
    }

    fn pair_ok(&self, s: &MapSearch<'_>, a: usize, b: usize) -> bool {
        let v = s.src.v();
        self.assigned.iter().all(|&a2| {
            let b2 = self.image[a2] as usize;
            s.src_profile.pair[a * v + a2] == s.dst_profile.pair[b * v + b2]
        })
    }

    fn set(&mut self, s: &MapSearch<'_>, a: usize, b: usize, on: bool) {
        for (i, blk) in s.src.blocks().iter().enumerate() {
            if blk.contains(a) {
                self.src_trace[i] ^= 1 << b;
            }
        }
        for (j, blk) in s.dst.blocks().iter().enumerate() {
            if blk.contains(b) {
                self.dst_trace[j] ^= 1 << b;
            }
        }
        if on {
            self.image[a] = b as u8;
            self.used |= 1 << b;
            self.assigned.push(a);
        } else {
            self.image[a] = UNSET;
            self.used &= !(1 << b);
            self.assigned.pop();
        }
    }

    fn traces_match(&mut self) -> bool {
        self.buf_a.clear();
        self.buf_a.extend_from_slice(&self.src_trace);
        self.buf_b.clear();
        self.buf_b.extend_from_slice(&self.dst_trace);
        self.buf_a.sort_unstable();
        self.buf_b.sort_unstable();
        self.buf_a == self.buf_b
    }

    fn try_assign(&mut self, s: &MapSearch<'_>, a: usize, b: usize) -> bool {
        if self.used >> b & 1 == 1 || !self.pair_ok(s, a, b) {
            return false;
        }
        self.set(s, a, b, true);
        if self.traces_match() {
            true
        } else {
            self.set(s, a, b, false);
            false
        }
    }

    /// Returns false when a limit was hit.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        s: &MapSearch<'_>,
        depth: usize,
        mode: Mode,
        limits: &SearchLimits,
        nodes: &AtomicU64,
        stop: &AtomicBool,
        out: &mut Vec<Permutation>,
    ) -> bool {
        if stop.load(Ordering::Relaxed) {
            return false;
        }
        let n = nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if limits.max_nodes.is_some_and(|m| n > m)
            || (n.is_multiple_of(1024) && limits.deadline.is_some_and(|d| Instant::now() >= d))
        {
            stop.store(true, Ordering::Relaxed);
            return false;
        }
        if depth == s.order.len() {
            let perm = Permutation::from_raw(self.image.clone());
            if perm.apply_design(s.src).is_ok_and(|img| &img == s.dst) {
                out.push(perm);
            }
            return true;
        }
        let a = s.order[depth];
        let mut cands = s.allowed[a] & !self.used;
        while cands != 0 {
            let b = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            if !self.try_assign(s, a, b) {
                continue;
            }
            let ok = self.descend(s, depth + 1, mode, limits, nodes, stop, out);
            self.set(s, a, b, false);
            if !ok {
                return false;
            }
            if mode == Mode::First && !out.is_empty() {
                return true;
            }
        }
        true
    }
}

/// Finds a point bijection carrying the blocks of `d1` onto those of `d2`.
///
/// Both designs must be symmetric designs. The returned witness has been
/// checked by applying it to `d1` and comparing canonical block lists.
pub fn is_isomorphic(d1: &Design, d2: &Design) -> Result<Option<Permutation>> {
    is_isomorphic_limited(d1, d2, SearchLimits::unlimited())
}

pub fn is_isomorphic_limited(d1: &Design, d2: &Design, limits: SearchLimits) -> Result<Option<Permutation>> {
    let r1 = validate_symmetric_design(d1)?;
    let r2 = validate_symmetric_design(d2)?;
    if r1 != r2 {
        return Ok(None);
    }
    let all = super::block::full_mask(d1.v());
    let Some(search) = MapSearch::new(d1, d2, vec![all; d1.v()]) else {
        return Ok(None);
    };
    let out = search.run(Mode::First, limits);
    if let Some(p) = out.maps.into_iter().next() {
        return Ok(Some(p));
    }
    if !out.complete {
        return Err(DesignError::Budget {
            what: "isomorphism search".into(),
            limit: limits.max_nodes.unwrap_or(out.nodes),
            partial: 0,
        });
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockset::testing::d7;

    #[test]
    fn identity_is_accepted() {
        let d = d7();
        let p = is_isomorphic(&d, &d).unwrap().unwrap();
        assert_eq!(p.apply_design(&d).unwrap(), d);
    }

    #[test]
    fn relabeled_copy_is_found() {
        let d = d7();
        let shuffle = Permutation::new(vec![6, 2, 0, 5, 1, 3, 4]).unwrap();
        let e = shuffle.apply_design(&d).unwrap();
        let w = is_isomorphic(&d, &e).unwrap().unwrap();
        assert_eq!(w.apply_design(&d).unwrap(), e);
    }

    #[test]
    fn different_parameters_are_not_isomorphic() {
        let three = Design::from_point_lists(3, [vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert!(is_isomorphic(&d7(), &three).unwrap().is_none());
    }

    #[test]
    fn invalid_input_is_an_error() {
        let bad = Design::from_point_lists(3, [vec![0, 1]]).unwrap();
        assert!(is_isomorphic(&bad, &bad).is_err());
    }

    #[test]
    fn enumerates_all_automorphisms_of_d7() {
        // |PGL(3,2)| = 168.
        let d = d7();
        let all = super::super::block::full_mask(7);
        let s = MapSearch::new(&d, &d, vec![all; 7]).unwrap();
        let seq = s.run(Mode::All, SearchLimits::unlimited());
        assert!(seq.complete);
        assert_eq!(seq.maps.len(), 168);
        let par = s.run_all_parallel(SearchLimits::unlimited());
        let mut sorted = seq.maps.clone();
        sorted.sort();
        assert_eq!(par.maps, sorted);
    }

    #[test]
    fn node_limit_reports_incomplete() {
        let d = d7();
        let all = super::super::block::full_mask(7);
        let s = MapSearch::new(&d, &d, vec![all; 7]).unwrap();
        let out = s.run(
            Mode::All,
            SearchLimits {
                max_nodes: Some(10),
                deadline: None,
            },
        );
        assert!(!out.complete);
    }
}
