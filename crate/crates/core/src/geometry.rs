//! The geometry of `2m`-subsets of an `n`-set inside PG(n-1, 2).
//!
//! Points are `2m`-element subsets, two points are collinear when they meet
//! in exactly `m` elements, and the line through collinear `X, Y` is
//! `{X, Y, X △ Y}`.

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockset::{Block, Design, MAX_POINTS};
use crate::error::{DesignError, Result};

/// Default ceiling on the number of vertices in a collinearity graph.
pub const DEFAULT_VERTEX_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub n: usize,
    pub m: usize,
}

impl GeometryParams {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 3 || m < 1 {
            return Err(DesignError::Argument(format!(
                "need n >= 3 and m >= 1, got n={n}, m={m}"
            )));
        }
        if 2 * m > n {
            return Err(DesignError::Argument(format!(
                "{}-subsets of a {n}-set do not exist",
                2 * m
            )));
        }
        if n > MAX_POINTS {
            return Err(DesignError::TooManyPoints { v: n, max: MAX_POINTS });
        }
        Ok(GeometryParams { n, m })
    }

    /// Lines exist only when `3m <= n`.
    pub fn has_lines(&self) -> bool {
        3 * self.m <= self.n
    }

    /// `C(n, 2m)`, saturating.
    pub fn vertex_count(&self) -> u128 {
        binomial(self.n as u128, 2 * self.m as u128)
    }

    /// All points of the geometry in increasing block order.
    pub fn points(&self) -> Vec<Block> {
        (0..self.n)
            .combinations(2 * self.m)
            .map(|c| Block::from_raw(self.n, c.iter().fold(0u64, |acc, &p| acc | 1 << p)))
            .sorted()
            .collect()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// The design of points and hyperplane complements of PG(r-1, 2).
///
/// Point `i` is the nonzero vector with binary value `i + 1`; the functional
/// `a` gives the block of points `i` with odd `popcount(a & (i + 1))`.
pub fn pg_hyperplane_complement_design(r: u32) -> Result<Design> {
    if r < 2 {
        return Err(DesignError::Argument(format!("rank must be at least 2, got {r}")));
    }
    let v = (1usize << r.min(63)) - 1;
    if r > 6 {
        return Err(DesignError::TooManyPoints { v, max: MAX_POINTS });
    }
    let blocks = (1..=v as u64).map(|a| {
        (0..v as u64)
            .filter(|i| (a & (i + 1)).count_ones() % 2 == 1)
            .fold(0u64, |acc, i| acc | 1 << i)
    });
    Design::from_bits(v, blocks)
}

/// True when `x` and `y` (both of size `2m`) meet in exactly `m` points.
pub fn collinear(x: &Block, y: &Block, m: usize) -> Result<bool> {
    if x.len() != 2 * m || y.len() != 2 * m {
        return Err(DesignError::Geometry(format!(
            "points must have size {}, got {} and {}",
            2 * m,
            x.len(),
            y.len()
        )));
    }
    if x == y {
        return Err(DesignError::Geometry(format!("{x} is not distinct from itself")));
    }
    Ok(x.intersect_count(y)? == m)
}

/// The line `(x, y, x △ y)` through two collinear points.
pub fn line_through(x: &Block, y: &Block) -> Result<[Block; 3]> {
    if x.len() != y.len() || x.len() % 2 == 1 || x == y {
        return Err(DesignError::Geometry(format!(
            "{x} and {y} are not distinct points of equal even size"
        )));
    }
    if !collinear(x, y, x.len() / 2)? {
        return Err(DesignError::Geometry(format!("{x} and {y} are not collinear")));
    }
    Ok([*x, *y, x.sym_diff(y)?])
}

/// Every distinct pair is collinear and the third point of its line is in `set`.
pub fn is_singular_subspace(set: &[Block], m: usize) -> bool {
    let members: HashSet<u64> = set.iter().map(Block::bits).collect();
    set.iter().tuple_combinations().all(|(x, y)| {
        x == y || ((x.bits() & y.bits()).count_ones() as usize == m && members.contains(&(x.bits() ^ y.bits())))
    })
}

/// Fixed-width bit set over vertex indices.
#[derive(Clone, PartialEq, Eq, Debug)]
struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    fn new(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn and_count(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// Collinearity graph with bitset adjacency rows.
struct CollinearityGraph {
    vertices: Vec<Block>,
    adj: Vec<VertexSet>,
}

impl CollinearityGraph {
    fn new(params: GeometryParams) -> Self {
        let vertices = params.points();
        let n = vertices.len();
        let adj: Vec<VertexSet> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = VertexSet::new(n);
                for j in 0..n {
                    if i != j && (vertices[i].bits() & vertices[j].bits()).count_ones() as usize == params.m {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        CollinearityGraph { vertices, adj }
    }

    /// Vertices in degeneracy order (repeatedly remove a minimum-degree vertex).
    fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut degree: Vec<usize> = self.adj.iter().map(VertexSet::len).collect();
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (0..n)
                .filter(|&i| !removed[i])
                .min_by_key(|&i| (degree[i], i))
                .expect("vertex remains");
            removed[next] = true;
            order.push(next);
            for j in self.adj[next].iter() {
                if !removed[j] {
                    degree[j] -= 1;
                }
            }
        }
        order
    }

    /// All cliques of exactly `size` vertices.
    ///
    /// Each clique is grown from its earliest vertex in degeneracy order,
    /// drawing candidates only from later neighbours and consuming them as
    /// they are tried, so every clique is produced once. Branches that cannot
    /// reach `size` are cut.
    fn cliques_of_size(&self, size: usize) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        if size == 0 || size > n {
            return Vec::new();
        }
        let order = self.degeneracy_order();
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let later: Vec<VertexSet> = (0..n)
            .map(|v| {
                let mut s = VertexSet::new(n);
                for u in self.adj[v].iter() {
                    if rank[u] > rank[v] {
                        s.insert(u);
                    }
                }
                s
            })
            .collect();
        let mut out: Vec<Vec<usize>> = order
            .par_iter()
            .flat_map_iter(|&v| {
                let mut found = Vec::new();
                let mut current = vec![v];
                self.extend(&mut current, later[v].clone(), size, &mut found);
                found
            })
            .collect();
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn extend(&self, current: &mut Vec<usize>, mut candidates: VertexSet, size: usize, found: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            found.push(current.clone());
            return;
        }
        while !candidates.is_empty() {
            if current.len() + candidates.len() < size {
                return;
            }
            let u = candidates.iter().next().expect("nonempty");
            candidates.remove(u);
            let next = candidates.and(&self.adj[u]);
            if current.len() + 1 + next.len() >= size {
                current.push(u);
                self.extend(current, next, size, found);
                current.pop();
            }
        }
    }

    /// Maximal cliques by Bron–Kerbosch with pivoting, over degeneracy order.
    fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let order = self.degeneracy_order();
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut out: Vec<Vec<usize>> = order
            .par_iter()
            .flat_map_iter(|&v| {
                let mut p = VertexSet::new(n);
                let mut x = VertexSet::new(n);
                for u in self.adj[v].iter() {
                    if rank[u] > rank[v] {
                        p.insert(u);
                    } else {
                        x.insert(u);
                    }
                }
                let mut found = Vec::new();
                self.bron_kerbosch(&mut vec![v], p, x, &mut found);
                found
            })
            .collect();
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, mut p: VertexSet, mut x: VertexSet, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| p.and_count(&self.adj[u]))
            .expect("p is nonempty");
        let branch: Vec<usize> = p.iter().filter(|&u| !self.adj[pivot].contains(u)).collect();
        for u in branch {
            r.push(u);
            self.bron_kerbosch(r, p.and(&self.adj[u]), x.and(&self.adj[u]), out);
            r.pop();
            p.remove(u);
            x.insert(u);
        }
    }
}

fn check_budget(params: GeometryParams, budget: usize) -> Result<()> {
    let count = params.vertex_count();
    if count > budget as u128 {
        return Err(DesignError::Budget {
            what: format!(
                "collinearity graph of ({}, {}) has {count} vertices",
                params.n, params.m
            ),
            limit: budget as u64,
            partial: 0,
        });
    }
    Ok(())
}

fn to_designs(graph: &CollinearityGraph, n: usize, cliques: Vec<Vec<usize>>) -> Result<Vec<Design>> {
    cliques
        .into_iter()
        .map(|c| Design::new(n, c.into_iter().map(|i| graph.vertices[i]).collect()))
        .collect()
}

/// All cliques of exactly `target_size` vertices in the collinearity graph,
/// each as a canonical block list, in canonical order.
pub fn enumerate_cliques(params: GeometryParams, target_size: usize, budget: usize) -> Result<Vec<Design>> {
    check_budget(params, budget)?;
    let graph = CollinearityGraph::new(params);
    let cliques = graph.cliques_of_size(target_size);
    let mut designs = to_designs(&graph, params.n, cliques)?;
    designs.sort_by(|a, b| a.blocks().cmp(b.blocks()));
    Ok(designs)
}

/// All maximal cliques of the collinearity graph.
pub fn enumerate_maximal_cliques(params: GeometryParams, budget: usize) -> Result<Vec<Design>> {
    check_budget(params, budget)?;
    let graph = CollinearityGraph::new(params);
    let cliques = graph.maximal_cliques();
    let mut designs = to_designs(&graph, params.n, cliques)?;
    designs.sort_by(|a, b| a.blocks().cmp(b.blocks()));
    Ok(designs)
}
