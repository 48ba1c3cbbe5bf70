//! Spine and backbone analogues for graph problems: random 3-coloring and
//! the graph bipartition problem (GBP).
//!
//! Both decisions are anti-monotone in edge addition, so the spine's
//! existential over satisfiable subgraphs reduces to the maximal feasible
//! edge subsets, enumerated by the same machinery as for formulas. The
//! candidate set is all vertex pairs.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::Graph;
use crate::order::mss::{enumerate_mcs, CallBudget, RemovalOracle};
use crate::order::{frac, Frac, OrderBudget};

/// 3-colorability of the graph given by the edge list, by backtracking
/// with a canonical-color symmetry break.
pub fn three_colorable(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let mut colors: Vec<i8> = vec![-1; n];
    fn go(adj: &[Vec<u32>], colors: &mut [i8], v: usize, max_used: i8) -> bool {
        if v == adj.len() {
            return true;
        }
        let limit = (max_used + 1).min(2);
        for c in 0..=limit {
            if adj[v].iter().all(|&u| colors[u as usize] != c) {
                colors[v] = c;
                if go(adj, colors, v + 1, max_used.max(c)) {
                    return true;
                }
            }
        }
        colors[v] = -1;
        false
    }
    go(&adj, &mut colors, 0, -1)
}

/// Can the component sizes be packed into a part of exactly `target`
/// vertices? Subset-sum by bitset.
fn sizes_packable(sizes: &[usize], target: usize) -> bool {
    let words = target / 64 + 1;
    let mut reach = vec![0u64; words];
    reach[0] = 1;
    for &s in sizes {
        if s > target {
            continue;
        }
        let (word_shift, bit_shift) = (s / 64, s % 64);
        let mut next = reach.clone();
        for w in (0..words).rev() {
            if w >= word_shift {
                let src = w - word_shift;
                let mut val = reach[src] << bit_shift;
                if bit_shift > 0 && src > 0 {
                    val |= reach[src - 1] >> (64 - bit_shift);
                }
                next[w] |= val;
            }
        }
        reach = next;
    }
    reach[target / 64] >> (target % 64) & 1 == 1
}

/// GBP decision: the graph splits into two edge-disjoint halves iff the
/// component sizes admit a subset summing to n/2.
pub fn bisectable(n: usize, edges: &[(u32, u32)]) -> bool {
    debug_assert!(n % 2 == 0);
    let sizes = component_sizes(n, edges);
    sizes_packable(&sizes, n / 2)
}

fn component_sizes(n: usize, edges: &[(u32, u32)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let nx = parent[c];
            parent[c] = r;
            c = nx;
        }
        r
    }
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let mut count = vec![0usize; n];
    for v in 0..n {
        count[find(&mut parent, v)] += 1;
    }
    count.into_iter().filter(|&c| c > 0).collect()
}

struct EdgeOracle<'a, F: Fn(usize, &[(u32, u32)]) -> bool> {
    g: &'a Graph,
    feasible: F,
    budget: CallBudget,
    scratch: Vec<(u32, u32)>,
}

impl<F: Fn(usize, &[(u32, u32)]) -> bool> RemovalOracle for EdgeOracle<'_, F> {
    fn num_items(&self) -> usize {
        self.g.m()
    }
    fn is_sat_without(&mut self, removed: &[u16]) -> Result<bool> {
        self.budget.tick()?;
        self.scratch.clear();
        for (i, &e) in self.g.edges().iter().enumerate() {
            if removed.binary_search(&(i as u16)).is_err() {
                self.scratch.push(e);
            }
        }
        Ok((self.feasible)(self.g.n, &self.scratch))
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (u32, u32)> {
    (0..n as u32).flat_map(move |u| (u + 1..n as u32).map(move |v| (u, v)))
}

fn spine_over_pairs(
    g: &Graph,
    budget: &OrderBudget,
    feasible: impl Fn(usize, &[(u32, u32)]) -> bool + Copy,
    what: &'static str,
    known: BTreeSet<(u32, u32)>,
) -> Result<BTreeSet<(u32, u32)>> {
    let mut oracle = EdgeOracle {
        g,
        feasible,
        budget: CallBudget::new(budget.max_oracle_calls, what),
        scratch: Vec::new(),
    };
    let mcses = enumerate_mcs(&mut oracle)?;
    let mut spine = known;
    let mut edges_buf: Vec<(u32, u32)> = Vec::new();
    for r in &mcses {
        edges_buf.clear();
        for (i, &e) in g.edges().iter().enumerate() {
            if r.binary_search(&(i as u16)).is_err() {
                edges_buf.push(e);
            }
        }
        let base_len = edges_buf.len();
        for p in all_pairs(g.n) {
            if spine.contains(&p) {
                continue;
            }
            oracle.budget.tick()?;
            edges_buf.truncate(base_len);
            edges_buf.push(p);
            if !feasible(g.n, &edges_buf) {
                spine.insert(p);
            }
        }
        edges_buf.truncate(base_len);
    }
    Ok(spine)
}

/// Exact 3-coloring spine: pair (x, y) is in the spine iff some
/// 3-colorable subgraph stops being 3-colorable when the edge (x, y) is
/// added. Fast path: a 3-colorable graph is its own maximal witness.
pub fn col3_spine(g: &Graph, budget: &OrderBudget) -> Result<BTreeSet<(u32, u32)>> {
    if three_colorable(g.n, g.edges()) {
        let mut spine = BTreeSet::new();
        let mut edges = g.edges().to_vec();
        for p in all_pairs(g.n) {
            edges.push(p);
            if !three_colorable(g.n, &edges) {
                spine.insert(p);
            }
            edges.pop();
        }
        return Ok(spine);
    }
    spine_over_pairs(g, budget, three_colorable, "col3-spine", BTreeSet::new())
}

/// Pairs guaranteed to lie in the GBP spine: all intra-component pairs of
/// any component larger than n/2. Exact lower bound usable at any scale.
pub fn gbp_spine_fastpath(g: &Graph) -> Result<BTreeSet<(u32, u32)>> {
    if g.n % 2 != 0 {
        return Err(Error::DomainError("GBP requires an even vertex count".into()));
    }
    let (comp_of, sizes) = g.components(None);
    let mut out = BTreeSet::new();
    for (u, v) in all_pairs(g.n) {
        if comp_of[u as usize] == comp_of[v as usize] && sizes[comp_of[u as usize]] > g.n / 2 {
            out.insert((u, v));
        }
    }
    Ok(out)
}

/// Fraction of vertex pairs covered by [`gbp_spine_fastpath`].
pub fn gbp_spine_fastpath_fraction(g: &Graph) -> Result<Frac> {
    let pairs = gbp_spine_fastpath(g)?;
    Ok(frac(pairs.len(), g.n * (g.n - 1) / 2))
}

/// Exact GBP spine: pair (u, v) is in the spine iff some bisectable
/// subgraph stops being bisectable when the edge (u, v) is added. The
/// fast-path pairs are pre-seeded; the rest come from the maximal
/// bisectable subgraphs.
pub fn gbp_spine(g: &Graph, budget: &OrderBudget) -> Result<BTreeSet<(u32, u32)>> {
    let known = gbp_spine_fastpath(g)?;
    spine_over_pairs(g, budget, bisectable, "gbp-spine", known)
}

#[derive(Debug, Clone)]
pub struct GbpBackboneReport {
    /// Minimum cut over balanced bipartitions.
    pub opt_cut: usize,
    /// Pairs separated in every optimal balanced bipartition.
    pub pairs: Vec<(u32, u32)>,
    pub fraction: Frac,
    /// Number of optimal balanced bipartitions (up to side swap).
    pub optimum_count: usize,
}

/// Exact GBP backbone by enumeration of all balanced bipartitions (vertex
/// 0 pinned to one side to kill the swap symmetry).
pub fn gbp_backbone_exact(g: &Graph, max_n: usize) -> Result<GbpBackboneReport> {
    let n = g.n;
    if n % 2 != 0 {
        return Err(Error::DomainError("GBP requires an even vertex count".into()));
    }
    if n > max_n {
        return Err(Error::BudgetExceeded(format!(
            "gbp_backbone_exact: n = {n} exceeds budget {max_n}"
        )));
    }
    let num_pairs = n * (n - 1) / 2;
    let pair_index = |u: usize, v: usize| -> usize {
        // u < v
        u * n - u * (u + 1) / 2 + (v - u - 1)
    };
    let words = num_pairs.div_ceil(64);
    let mut best_cut = usize::MAX;
    let mut separated_in_all = vec![u64::MAX; words];
    let mut optimum_count = 0usize;

    // choose n/2 - 1 companions for vertex 0
    use itertools::Itertools;
    let mut side = vec![false; n]; // true = side of vertex 0
    let half = n / 2;
    for combo in (1..n).combinations(half - 1) {
        side.fill(false);
        side[0] = true;
        for &v in &combo {
            side[v] = true;
        }
        let cut = g
            .edges()
            .iter()
            .filter(|&&(u, v)| side[u as usize] != side[v as usize])
            .count();
        if cut < best_cut {
            best_cut = cut;
            separated_in_all.fill(u64::MAX);
            optimum_count = 0;
        }
        if cut == best_cut {
            optimum_count += 1;
            for u in 0..n {
                for v in u + 1..n {
                    if side[u] == side[v] {
                        let pi = pair_index(u, v);
                        separated_in_all[pi / 64] &= !(1u64 << (pi % 64));
                    }
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let pi = pair_index(u, v);
            if separated_in_all[pi / 64] >> (pi % 64) & 1 == 1 {
                pairs.push((u as u32, v as u32));
            }
        }
    }
    Ok(GbpBackboneReport {
        opt_cut: best_cut,
        fraction: frac(pairs.len(), num_pairs),
        pairs,
        optimum_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_basics() {
        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(three_colorable(tri.n, tri.edges()));
        let k4: Vec<(u32, u32)> = (0..4u32)
            .flat_map(|u| (u + 1..4).map(move |v| (u, v)))
            .collect();
        assert!(!three_colorable(4, &k4));
    }

    #[test]
    fn col3_spine_triangle_empty() {
        // adding any chord to K3 keeps it 3-colorable (exhaustive over 27
        // colorings is what three_colorable effectively does at this size)
        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(col3_spine(&tri, &OrderBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn col3_spine_k4_minus_edge() {
        // K4 minus (2,3): adding (2,3) yields K4, which needs 4 colors
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let s = col3_spine(&g, &OrderBudget::default()).unwrap();
        assert!(s.contains(&(2, 3)));
    }

    #[test]
    fn col3_spine_edgeless_empty() {
        let g = Graph::new(5, vec![]).unwrap();
        assert!(col3_spine(&g, &OrderBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn bisect_decision() {
        // components (3,1): no subset sums to 2
        let g = Graph::new(4, vec![(0, 1), (1, 2)]).unwrap();
        assert!(!bisectable(g.n, g.edges()));
        // components (2,2): yes
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(bisectable(g.n, g.edges()));
        // edgeless: yes
        assert!(bisectable(4, &[]));
    }

    #[test]
    fn gbp_spine_edgeless_empty() {
        let g = Graph::new(4, vec![]).unwrap();
        assert!(gbp_spine(&g, &OrderBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn gbp_spine_path_contains_all_component_pairs() {
        // path on 4 vertices: one component of size 4 > 2
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = gbp_spine(&g, &OrderBudget::default()).unwrap();
        for p in all_pairs(4) {
            assert!(s.contains(&p), "missing {p:?}");
        }
    }

    #[test]
    fn gbp_spine_joining_edge() {
        // components (2,2): adding a joining edge creates a size-4 component
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let s = gbp_spine(&g, &OrderBudget::default()).unwrap();
        assert!(s.contains(&(1, 2)));
        // the intra-component pairs stay out: (0,1) added to a bisectable
        // subgraph merges nothing new
        assert!(!s.contains(&(0, 1)));
    }

    #[test]
    fn gbp_backbone_two_cliques() {
        // two disjoint K4s: unique optimal bipartition, backbone = the 16
        // inter-clique pairs
        let mut edges = Vec::new();
        for u in 0..4u32 {
            for v in u + 1..4 {
                edges.push((u, v));
                edges.push((u + 4, v + 4));
            }
        }
        let g = Graph::new(8, edges).unwrap();
        let r = gbp_backbone_exact(&g, 20).unwrap();
        assert_eq!(r.opt_cut, 0);
        assert_eq!(r.pairs.len(), 16);
        assert_eq!(r.fraction, frac(16, 28));
        for &(u, v) in &r.pairs {
            assert!((u < 4) != (v < 4));
        }
    }

    #[test]
    fn gbp_backbone_edgeless_and_complete_empty() {
        let g = Graph::new(6, vec![]).unwrap();
        assert!(gbp_backbone_exact(&g, 20).unwrap().pairs.is_empty());
        let mut edges = Vec::new();
        for u in 0..6u32 {
            for v in u + 1..6 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(6, edges).unwrap();
        assert!(gbp_backbone_exact(&g, 20).unwrap().pairs.is_empty());
    }
}
