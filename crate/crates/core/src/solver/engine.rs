//! An iterative DPLL decision engine over CNF with unit propagation,
//! per-call constraint masks, and assumption literals. Used as the inner
//! satisfiability oracle by the order-parameter and structural analyzers,
//! where the same formula is decided many times with different subsets of
//! constraints active.

use crate::solver::CnfFormula;

/// Encoded literal: `var * 2 + neg`.
pub type EncLit = u32;

pub fn enc(var: u32, neg: bool) -> EncLit {
    var * 2 + neg as u32
}

pub fn enc_var(l: EncLit) -> u32 {
    l >> 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineResult {
    Sat(Vec<bool>),
    Unsat,
}

pub struct SatEngine {
    n: usize,
    clauses: Vec<Vec<EncLit>>,
    origin: Vec<usize>,
    /// occ[lit] = clauses containing lit
    occ: Vec<Vec<u32>>,
    // per-solve state
    value: Vec<i8>, // -1 unassigned, else 0/1
    num_true: Vec<u32>,
    num_free: Vec<u32>,
    active: Vec<bool>,
    trail: Vec<u32>,
    unit_queue: Vec<u32>,
    pos_score: Vec<u32>,
    neg_score: Vec<u32>,
    /// search nodes over the lifetime of the engine, for diagnostics
    pub stats_nodes: u64,
}

impl SatEngine {
    pub fn from_cnf(cnf: &CnfFormula) -> Self {
        let n = cnf.n;
        let clauses: Vec<Vec<EncLit>> = cnf
            .clauses
            .iter()
            .map(|c| c.lits().iter().map(|l| enc(l.var, l.neg)).collect())
            .collect();
        let mut occ = vec![Vec::new(); 2 * n];
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                occ[l as usize].push(ci as u32);
            }
        }
        let m = clauses.len();
        SatEngine {
            n,
            origin: cnf.origin.clone(),
            clauses,
            occ,
            value: vec![-1; n],
            num_true: vec![0; m],
            num_free: vec![0; m],
            active: vec![true; m],
            trail: Vec::with_capacity(n),
            unit_queue: Vec::new(),
            pos_score: vec![0; n],
            neg_score: vec![0; n],
            stats_nodes: 0,
        }
    }

    /// Decides satisfiability of the clauses whose origin constraint is
    /// active, under the given assumption literals `(var, value)`.
    pub fn solve_with(
        &mut self,
        constraint_active: impl Fn(usize) -> bool,
        assumptions: &[(u32, bool)],
    ) -> EngineResult {
        self.value.fill(-1);
        self.trail.clear();
        self.unit_queue.clear();
        for ci in 0..self.clauses.len() {
            self.active[ci] = constraint_active(self.origin[ci]);
            self.num_true[ci] = 0;
            self.num_free[ci] = if self.active[ci] {
                self.clauses[ci].len() as u32
            } else {
                0
            };
        }
        for ci in 0..self.clauses.len() {
            if self.active[ci] {
                match self.num_free[ci] {
                    0 => return EngineResult::Unsat,
                    1 => self.unit_queue.push(ci as u32),
                    _ => {}
                }
            }
        }
        let mut ok = true;
        for &(var, v) in assumptions {
            match self.value[var as usize] {
                -1 => {
                    if !self.assign(var, v as i8) {
                        ok = false;
                        break;
                    }
                }
                old if old == v as i8 => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || !self.propagate() {
            return EngineResult::Unsat;
        }
        if self.search() {
            let model = (0..self.n).map(|v| self.value[v] == 1).collect();
            EngineResult::Sat(model)
        } else {
            EngineResult::Unsat
        }
    }

    pub fn solve(&mut self) -> EngineResult {
        self.solve_with(|_| true, &[])
    }

    /// Assigns var = v, updating clause counters and queueing new units.
    /// Returns false on conflict (counters stay consistent either way).
    fn assign(&mut self, var: u32, v: i8) -> bool {
        debug_assert_eq!(self.value[var as usize], -1);
        self.value[var as usize] = v;
        self.trail.push(var);
        let lit_true = enc(var, v == 0);
        let lit_false = lit_true ^ 1;
        for i in 0..self.occ[lit_true as usize].len() {
            let ci = self.occ[lit_true as usize][i] as usize;
            if self.active[ci] {
                self.num_true[ci] += 1;
                self.num_free[ci] -= 1;
            }
        }
        let mut ok = true;
        for i in 0..self.occ[lit_false as usize].len() {
            let ci = self.occ[lit_false as usize][i] as usize;
            if self.active[ci] {
                self.num_free[ci] -= 1;
                if self.num_true[ci] == 0 {
                    match self.num_free[ci] {
                        0 => ok = false,
                        1 => self.unit_queue.push(ci as u32),
                        _ => {}
                    }
                }
            }
        }
        ok
    }

    fn unassign_to(&mut self, mark: usize) {
        self.unit_queue.clear();
        while self.trail.len() > mark {
            let var = self.trail.pop().unwrap();
            let v = self.value[var as usize];
            self.value[var as usize] = -1;
            let lit_true = enc(var, v == 0);
            let lit_false = lit_true ^ 1;
            for i in 0..self.occ[lit_true as usize].len() {
                let ci = self.occ[lit_true as usize][i] as usize;
                if self.active[ci] {
                    self.num_true[ci] -= 1;
                    self.num_free[ci] += 1;
                }
            }
            for i in 0..self.occ[lit_false as usize].len() {
                let ci = self.occ[lit_false as usize][i] as usize;
                if self.active[ci] {
                    self.num_free[ci] += 1;
                }
            }
        }
    }

    /// Drains the unit queue. Returns false on conflict (queue cleared).
    fn propagate(&mut self) -> bool {
        while let Some(ci) = self.unit_queue.pop() {
            let ci = ci as usize;
            if !self.active[ci] || self.num_true[ci] > 0 || self.num_free[ci] != 1 {
                continue; // stale entry
            }
            let lit = self.clauses[ci]
                .iter()
                .copied()
                .find(|&l| self.value[enc_var(l) as usize] == -1)
                .expect("free literal must exist");
            let v = if lit & 1 == 0 { 1 } else { 0 };
            if !self.assign(enc_var(lit), v) {
                self.unit_queue.clear();
                return false;
            }
        }
        true
    }

    fn all_satisfied(&self) -> bool {
        (0..self.clauses.len()).all(|ci| !self.active[ci] || self.num_true[ci] > 0)
    }

    /// Branch variable: most occurrences among the currently shortest
    /// unsatisfied clauses, lexicographic tie-break; branch value is the
    /// majority polarity there (ties assign true).
    fn pick_branch(&mut self) -> Option<(u32, i8)> {
        let mut min_len = u32::MAX;
        for ci in 0..self.clauses.len() {
            if self.active[ci] && self.num_true[ci] == 0 && self.num_free[ci] < min_len {
                min_len = self.num_free[ci];
            }
        }
        if min_len == u32::MAX {
            return None;
        }
        self.pos_score.fill(0);
        self.neg_score.fill(0);
        for ci in 0..self.clauses.len() {
            if self.active[ci] && self.num_true[ci] == 0 && self.num_free[ci] == min_len {
                for &l in &self.clauses[ci] {
                    let v = enc_var(l) as usize;
                    if self.value[v] == -1 {
                        if l & 1 == 0 {
                            self.pos_score[v] += 1;
                        } else {
                            self.neg_score[v] += 1;
                        }
                    }
                }
            }
        }
        let mut best: Option<(u32, u32)> = None; // (score, var)
        for v in 0..self.n {
            let score = self.pos_score[v] + self.neg_score[v];
            if score > 0 && best.map(|(s, _)| score > s).unwrap_or(true) {
                best = Some((score, v as u32));
            }
        }
        best.map(|(_, v)| {
            let v_us = v as usize;
            (v, if self.pos_score[v_us] >= self.neg_score[v_us] { 1 } else { 0 })
        })
    }

    fn search(&mut self) -> bool {
        self.stats_nodes += 1;
        if self.all_satisfied() {
            return true;
        }
        let Some((var, first)) = self.pick_branch() else {
            return true;
        };
        for &v in &[first, 1 - first] {
            let mark = self.trail.len();
            if self.assign(var, v) && self.propagate() && self.search() {
                return true;
            }
            self.unassign_to(mark);
        }
        false
    }
}
