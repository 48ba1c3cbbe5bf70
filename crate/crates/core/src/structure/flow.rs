//! Dinic max-flow on small integer-capacity networks, with residual-side
//! extraction for min-cut witnesses.

use std::collections::VecDeque;

pub struct FlowNetwork {
    n: usize,
    head: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<i64>,
}

pub const INF: i64 = i64::MAX / 4;

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        let id = self.to.len() as u32;
        self.head[from].push(id);
        self.to.push(to as u32);
        self.cap.push(cap);
        self.head[to].push(id + 1);
        self.to.push(from as u32);
        self.cap.push(0);
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.n];
        level[s] = 0;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &eid in &self.head[u] {
                let v = self.to[eid as usize] as usize;
                if self.cap[eid as usize] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        if level[t] >= 0 {
            Some(level)
        } else {
            None
        }
    }

    fn dfs_push(
        &mut self,
        u: usize,
        t: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.head[u].len() {
            let eid = self.head[u][iter[u]] as usize;
            let v = self.to[eid] as usize;
            if self.cap[eid] > 0 && level[v] == level[u] + 1 {
                let d = self.dfs_push(v, t, pushed.min(self.cap[eid]), level, iter);
                if d > 0 {
                    self.cap[eid] -= d;
                    self.cap[eid ^ 1] += d;
                    return d;
                }
            }
            iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut iter = vec![0usize; self.n];
            loop {
                let f = self.dfs_push(s, t, INF, &level, &mut iter);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph (the source side of a
    /// minimum cut). Call after `max_flow`.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &eid in &self.head[u] {
                let v = self.to[eid as usize] as usize;
                if self.cap[eid as usize] > 0 && !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        // classic 4-node diamond
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 3);
        net.add_edge(0, 2, 2);
        net.add_edge(1, 2, 1);
        net.add_edge(1, 3, 2);
        net.add_edge(2, 3, 3);
        assert_eq!(net.max_flow(0, 3), 5);
    }

    #[test]
    fn cut_side() {
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, 1);
        net.add_edge(1, 2, 5);
        assert_eq!(net.max_flow(0, 2), 1);
        let side = net.source_side(0);
        assert!(side[0] && !side[1] && !side[2]);
    }
}
