//! Extremal-optimization ground-state sampling for 3-coloring and graph
//! bipartitioning, with backbone-fraction estimation from pools of
//! distinct optima, plus exact enumeration baselines for validation.
//!
//! Each step ranks vertices from worst local fitness to best, picks a rank
//! with probability proportional to rank^(-tau), and applies an
//! unconditional move there. Restarts use independent RNG streams and the
//! pool merge is deterministic, so a fixed seed reproduces the pool bit
//! for bit.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gen::rng_for;
use crate::model::Graph;
use crate::order::{frac, Frac};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EoProblem {
    ThreeCol,
    Gbp,
}

#[derive(Debug, Clone)]
pub struct EoConfig {
    pub problem: EoProblem,
    /// Power-law exponent for rank selection; must exceed 1.
    pub tau: f64,
    pub restarts: usize,
    /// Steps per restart; 0 selects the default 200 * n.
    pub steps_per_restart: usize,
    pub seed: u64,
    /// Cap on distinct best-cost configurations kept.
    pub pool_cap: usize,
}

impl EoConfig {
    pub fn new(problem: EoProblem, seed: u64) -> Self {
        EoConfig {
            problem,
            tau: 1.4,
            restarts: 20,
            steps_per_restart: 0,
            seed,
            pool_cap: 4096,
        }
    }
}

/// Distinct configurations achieving the best cost found, canonicalized
/// under the problem's relabeling symmetry (color permutation for
/// 3-coloring, side swap for bipartition).
#[derive(Debug, Clone)]
pub struct GroundStatePool {
    pub problem: EoProblem,
    pub best_cost: usize,
    pub configs: BTreeSet<Vec<u8>>,
    /// True when the pool hit its cap and may be missing optima.
    pub truncated: bool,
}

fn canonical_coloring(state: &[u8]) -> Vec<u8> {
    let mut map = [u8::MAX; 3];
    let mut next = 0u8;
    state
        .iter()
        .map(|&c| {
            if map[c as usize] == u8::MAX {
                map[c as usize] = next;
                next += 1;
            }
            map[c as usize]
        })
        .collect()
}

fn canonical_sides(state: &[u8]) -> Vec<u8> {
    if state.first() == Some(&1) {
        state.iter().map(|&s| 1 - s).collect()
    } else {
        state.to_vec()
    }
}

/// Cumulative distribution over ranks 1..=n with P(r) proportional to
/// r^(-tau).
fn rank_cdf(n: usize, tau: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf = Vec::with_capacity(n);
    for r in 1..=n {
        acc += (r as f64).powf(-tau);
        cdf.push(acc);
    }
    for v in cdf.iter_mut() {
        *v /= acc;
    }
    cdf
}

fn pick_rank(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let x: f64 = rng.random();
    cdf.partition_point(|&c| c < x).min(cdf.len() - 1)
}

/// Samples ground states by extremal optimization. Deterministic in the
/// seed; restarts run on independent streams.
pub fn eo_sample(g: &Graph, cfg: &EoConfig) -> Result<GroundStatePool> {
    if cfg.tau <= 1.0 {
        return Err(Error::DomainError("EO requires tau > 1".into()));
    }
    if cfg.problem == EoProblem::Gbp && g.n % 2 != 0 {
        return Err(Error::DomainError("GBP requires an even vertex count".into()));
    }
    if g.n == 0 {
        return Err(Error::DomainError("empty graph".into()));
    }
    let steps = if cfg.steps_per_restart == 0 {
        200 * g.n
    } else {
        cfg.steps_per_restart
    };
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); g.n];
    for &(u, v) in g.edges() {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let cdf = rank_cdf(g.n, cfg.tau);
    let mut pool = GroundStatePool {
        problem: cfg.problem,
        best_cost: usize::MAX,
        configs: BTreeSet::new(),
        truncated: false,
    };
    for restart in 0..cfg.restarts {
        let mut rng = rng_for(cfg.seed, restart as u64);
        match cfg.problem {
            EoProblem::ThreeCol => run_3col(g, &adj, &cdf, steps, &mut rng, cfg, &mut pool),
            EoProblem::Gbp => run_gbp(g, &adj, steps, &mut rng, cfg, &mut pool),
        }
    }
    Ok(pool)
}

fn record(pool: &mut GroundStatePool, cost: usize, canon: Vec<u8>, cap: usize) {
    if cost < pool.best_cost {
        pool.best_cost = cost;
        pool.configs.clear();
        pool.truncated = false;
    }
    if cost == pool.best_cost {
        if pool.configs.len() < cap {
            pool.configs.insert(canon);
        } else if !pool.configs.contains(&canon) {
            pool.truncated = true;
        }
    }
}

fn run_3col(
    g: &Graph,
    adj: &[Vec<u32>],
    cdf: &[f64],
    steps: usize,
    rng: &mut impl Rng,
    cfg: &EoConfig,
    pool: &mut GroundStatePool,
) {
    let n = g.n;
    let mut state: Vec<u8> = (0..n).map(|_| rng.random_range(0..3u8)).collect();
    let mut violations: Vec<u32> = vec![0; n];
    let mut cost = 0usize;
    for &(u, v) in g.edges() {
        if state[u as usize] == state[v as usize] {
            violations[u as usize] += 1;
            violations[v as usize] += 1;
            cost += 1;
        }
    }
    record(pool, cost, canonical_coloring(&state), cfg.pool_cap);
    let mut ranked: Vec<u32> = (0..n as u32).collect();
    for _ in 0..steps {
        ranked.sort_by_key(|&v| (std::cmp::Reverse(violations[v as usize]), v));
        let v = ranked[pick_rank(cdf, rng)] as usize;
        let old = state[v];
        let mut new = rng.random_range(0..2u8);
        if new >= old {
            new += 1;
        }
        // apply move unconditionally, updating incident violation counts
        for &u in &adj[v] {
            let u = u as usize;
            if state[u] == old {
                violations[u] -= 1;
                violations[v] -= 1;
                cost -= 1;
            }
        }
        state[v] = new;
        for &u in &adj[v] {
            let u = u as usize;
            if state[u] == new {
                violations[u] += 1;
                violations[v] += 1;
                cost += 1;
            }
        }
        if cost <= pool.best_cost {
            record(pool, cost, canonical_coloring(&state), cfg.pool_cap);
        }
    }
}

fn run_gbp(
    g: &Graph,
    adj: &[Vec<u32>],
    steps: usize,
    rng: &mut impl Rng,
    cfg: &EoConfig,
    pool: &mut GroundStatePool,
) {
    let n = g.n;
    // random balanced start
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut state = vec![0u8; n];
    for &v in perm.iter().take(n / 2) {
        state[v as usize] = 1;
    }
    let mut cross: Vec<u32> = vec![0; n];
    let mut cost = 0usize;
    for &(u, v) in g.edges() {
        if state[u as usize] != state[v as usize] {
            cross[u as usize] += 1;
            cross[v as usize] += 1;
            cost += 1;
        }
    }
    record(pool, cost, canonical_sides(&state), cfg.pool_cap);
    let half_cdf = rank_cdf(n / 2, cfg.tau);
    let mut side0: Vec<u32> = Vec::with_capacity(n / 2);
    let mut side1: Vec<u32> = Vec::with_capacity(n / 2);
    for _ in 0..steps {
        side0.clear();
        side1.clear();
        for v in 0..n as u32 {
            if state[v as usize] == 0 {
                side0.push(v);
            } else {
                side1.push(v);
            }
        }
        // worst-fitness ranking within each side, then a balanced swap
        side0.sort_by_key(|&v| (std::cmp::Reverse(cross[v as usize]), v));
        side1.sort_by_key(|&v| (std::cmp::Reverse(cross[v as usize]), v));
        let u = side0[pick_rank(&half_cdf, rng)] as usize;
        let w = side1[pick_rank(&half_cdf, rng)] as usize;
        for &x in [u, w].iter() {
            let sx = state[x];
            for &y in &adj[x] {
                let y = y as usize;
                if state[y] != sx {
                    cross[x] -= 1;
                    cross[y] -= 1;
                    cost -= 1;
                }
            }
            state[x] = 1 - sx;
            for &y in &adj[x] {
                let y = y as usize;
                if state[y] != state[x] {
                    cross[x] += 1;
                    cross[y] += 1;
                    cost += 1;
                }
            }
        }
        if cost <= pool.best_cost {
            record(pool, cost, canonical_sides(&state), cfg.pool_cap);
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackboneEstimate {
    /// Upper-bound estimate of the constraint-based backbone fraction.
    pub fraction: Frac,
    pub pool_size: usize,
    pub best_cost: usize,
    /// The pool may be missing optima; the estimate never undershoots the
    /// exact fraction taken over the full optimum set.
    pub truncated: bool,
}

/// Estimates the constraint-based backbone fraction from a pool of optima:
/// for 3-coloring the pairs monochromatic in every pooled configuration,
/// for GBP the pairs separated in every pooled configuration, over all
/// C(n,2) pairs.
pub fn backbone_estimate(pool: &GroundStatePool, n: usize) -> Result<BackboneEstimate> {
    if pool.configs.is_empty() {
        return Err(Error::ContractViolation("empty ground-state pool".into()));
    }
    let mut count = 0usize;
    for u in 0..n {
        for v in u + 1..n {
            let all = pool.configs.iter().all(|cfg| match pool.problem {
                EoProblem::ThreeCol => cfg[u] == cfg[v],
                EoProblem::Gbp => cfg[u] != cfg[v],
            });
            if all {
                count += 1;
            }
        }
    }
    Ok(BackboneEstimate {
        fraction: frac(count, n * (n - 1) / 2),
        pool_size: pool.configs.len(),
        best_cost: pool.best_cost,
        truncated: pool.truncated,
    })
}

#[derive(Debug, Clone)]
pub struct Col3BackboneReport {
    pub opt_cost: usize,
    /// Pairs monochromatic in every optimal coloring.
    pub pairs: Vec<(u32, u32)>,
    pub fraction: Frac,
    /// Number of optimal colorings up to color permutation.
    pub optimum_count: usize,
}

/// Exact 3-coloring backbone by exhaustive enumeration of canonical
/// colorings (colors numbered by first occurrence, which visits every
/// coloring class exactly once).
pub fn col3_backbone_exact(g: &Graph, max_n: usize) -> Result<Col3BackboneReport> {
    let n = g.n;
    if n > max_n {
        return Err(Error::BudgetExceeded(format!(
            "col3_backbone_exact: n = {n} exceeds budget {max_n}"
        )));
    }
    if n == 0 {
        return Err(Error::DomainError("empty graph".into()));
    }
    let mut adj_before: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        let (a, b) = (u.min(v) as usize, u.max(v) as usize);
        adj_before[b].push(a);
    }
    let num_pairs = n * (n - 1) / 2;
    let pair_index = |u: usize, v: usize| u * n - u * (u + 1) / 2 + (v - u - 1);
    let words = num_pairs.div_ceil(64);

    struct Enum<'a> {
        n: usize,
        adj_before: &'a [Vec<usize>],
        state: Vec<u8>,
        best: usize,
        mono_in_all: Vec<u64>,
        count: usize,
        words: usize,
    }
    impl Enum<'_> {
        fn go(&mut self, v: usize, max_used: i8, cost: usize, pair_index: &impl Fn(usize, usize) -> usize) {
            if cost > self.best {
                return;
            }
            if v == self.n {
                if cost < self.best {
                    self.best = cost;
                    self.mono_in_all = vec![u64::MAX; self.words];
                    self.count = 0;
                }
                self.count += 1;
                for a in 0..self.n {
                    for b in a + 1..self.n {
                        if self.state[a] != self.state[b] {
                            let pi = pair_index(a, b);
                            self.mono_in_all[pi / 64] &= !(1u64 << (pi % 64));
                        }
                    }
                }
                return;
            }
            let limit = ((max_used + 1).min(2)) as u8;
            for c in 0..=limit {
                self.state[v] = c;
                let extra = self.adj_before[v]
                    .iter()
                    .filter(|&&u| self.state[u] == c)
                    .count();
                self.go(v + 1, max_used.max(c as i8), cost + extra, pair_index);
            }
        }
    }

    let mut e = Enum {
        n,
        adj_before: &adj_before,
        state: vec![0; n],
        best: usize::MAX,
        mono_in_all: vec![u64::MAX; words.max(1)],
        count: 0,
        words: words.max(1),
    };
    e.go(0, -1, 0, &pair_index);

    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let pi = pair_index(u, v);
            if e.mono_in_all[pi / 64] >> (pi % 64) & 1 == 1 {
                pairs.push((u as u32, v as u32));
            }
        }
    }
    Ok(Col3BackboneReport {
        opt_cost: e.best,
        fraction: frac(pairs.len(), num_pairs.max(1)),
        pairs,
        optimum_count: e.count,
    })
}

/// Pool export: cost header then one configuration per line.
pub fn pool_to_text(pool: &GroundStatePool) -> String {
    let mut out = format!("cost {}\n", pool.best_cost);
    for cfg in &pool.configs {
        let line: String = cfg
            .iter()
            .map(|&x| char::from_digit(x as u32, 10).unwrap())
            .collect();
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::graph::gbp_backbone_exact;

    #[test]
    fn eo_edgeless_zero_cost() {
        let g = Graph::new(6, vec![]).unwrap();
        let mut cfg = EoConfig::new(EoProblem::ThreeCol, 1);
        cfg.restarts = 2;
        cfg.steps_per_restart = 50;
        let pool = eo_sample(&g, &cfg).unwrap();
        assert_eq!(pool.best_cost, 0);
        let cfg = EoConfig {
            problem: EoProblem::Gbp,
            ..EoConfig::new(EoProblem::Gbp, 1)
        };
        let pool = eo_sample(&g, &cfg).unwrap();
        assert_eq!(pool.best_cost, 0);
    }

    #[test]
    fn eo_triangle_proper_coloring() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut cfg = EoConfig::new(EoProblem::ThreeCol, 7);
        cfg.restarts = 4;
        cfg.steps_per_restart = 100;
        let pool = eo_sample(&g, &cfg).unwrap();
        assert_eq!(pool.best_cost, 0);
        // the only proper 3-coloring of K3 up to permutation
        assert!(pool.configs.contains(&vec![0, 1, 2]));
    }

    #[test]
    fn eo_two_blocks_gbp() {
        // two disjoint K4s: optimal cut 0 via the block bipartition
        let mut edges = Vec::new();
        for u in 0..4u32 {
            for v in u + 1..4 {
                edges.push((u, v));
                edges.push((u + 4, v + 4));
            }
        }
        let g = Graph::new(8, edges).unwrap();
        let mut cfg = EoConfig::new(EoProblem::Gbp, 3);
        cfg.restarts = 10;
        cfg.steps_per_restart = 400;
        let pool = eo_sample(&g, &cfg).unwrap();
        assert_eq!(pool.best_cost, 0);
        assert!(pool.configs.contains(&vec![0, 0, 0, 0, 1, 1, 1, 1]));
        let est = backbone_estimate(&pool, 8).unwrap();
        let exact = gbp_backbone_exact(&g, 20).unwrap();
        assert!(est.fraction >= exact.fraction);
    }

    #[test]
    fn eo_deterministic() {
        let g = crate::gen::gen_graph(12, 14, 5, 0).unwrap();
        let cfg = EoConfig::new(EoProblem::Gbp, 99);
        let p1 = eo_sample(&g, &cfg).unwrap();
        let p2 = eo_sample(&g, &cfg).unwrap();
        assert_eq!(p1.best_cost, p2.best_cost);
        assert_eq!(p1.configs, p2.configs);
    }

    #[test]
    fn col3_exact_triangle() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = col3_backbone_exact(&g, 15).unwrap();
        assert_eq!(r.opt_cost, 0);
        assert!(r.pairs.is_empty());
        assert_eq!(r.optimum_count, 1);
    }

    #[test]
    fn col3_exact_k4() {
        let edges: Vec<(u32, u32)> = (0..4u32)
            .flat_map(|u| (u + 1..4).map(move |v| (u, v)))
            .collect();
        let g = Graph::new(4, edges).unwrap();
        let r = col3_backbone_exact(&g, 15).unwrap();
        assert_eq!(r.opt_cost, 1);
        // every optimal coloring merges exactly one pair, and any pair can
        // be the merged one, so no pair is monochromatic in all optima
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn col3_exact_edgeless() {
        let g = Graph::new(4, vec![]).unwrap();
        let r = col3_backbone_exact(&g, 15).unwrap();
        assert_eq!(r.opt_cost, 0);
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn eo_never_beats_exact() {
        for seed in 0..5 {
            let g = crate::gen::gen_graph(10, 12, seed, 0).unwrap();
            let mut cfg = EoConfig::new(EoProblem::ThreeCol, seed);
            cfg.restarts = 6;
            cfg.steps_per_restart = 300;
            let pool = eo_sample(&g, &cfg).unwrap();
            let exact = col3_backbone_exact(&g, 15).unwrap();
            assert!(pool.best_cost >= exact.opt_cost);
        }
    }
}
