//! DPLL refutation with tree-resolution extraction.
//!
//! The search assigns variables one at a time with unit propagation; every
//! conflict yields a clause falsified by the current partial assignment,
//! derived by resolving the conflicting clause against the reason clauses
//! of propagated literals. Branch derivations are resolved on the branch
//! variable on the way back up, ending in the empty clause. The produced
//! proof is checked by the independent checker in tests; its length upper
//! bounds the instance's resolution complexity.

use crate::error::{Error, Result};
use crate::model::{Assignment, Formula};
use crate::solver::proof::{Justification, ProofStep, ResolutionProof};
use crate::solver::{decide, enc, enc_var, to_cnf, Clause, CnfFormula, Decision, EncLit, Lit};

/// Branching policy for the refutation search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Most occurrences among the shortest unsatisfied clauses,
    /// lexicographic tie-break; majority polarity first.
    #[default]
    MomsLex,
    /// Lowest-index free variable of an unsatisfied clause, true first.
    LexFirst,
}

impl std::fmt::Display for BranchPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchPolicy::MomsLex => write!(f, "moms-lex"),
            BranchPolicy::LexFirst => write!(f, "lex-first"),
        }
    }
}

/// Refutation artifact: search-tree node count plus the extracted proof.
#[derive(Debug, Clone)]
pub struct DpllTrace {
    pub node_count: u64,
    pub proof: ResolutionProof,
    pub policy: BranchPolicy,
}

#[derive(Debug, Clone)]
pub enum RefuteOutcome {
    Sat {
        witness: Assignment,
        node_count: u64,
    },
    Unsat(DpllTrace),
}

enum Search {
    Sat,
    Refuted(usize),
}

struct Refuter {
    n: usize,
    clauses: Vec<Vec<EncLit>>,
    occ: Vec<Vec<u32>>,
    value: Vec<i8>,
    num_true: Vec<u32>,
    num_free: Vec<u32>,
    trail: Vec<(u32, Option<u32>)>,
    unit_queue: Vec<u32>,
    steps: Vec<(Vec<EncLit>, Justification)>,
    nodes: u64,
    policy: BranchPolicy,
    model: Option<Vec<bool>>,
}

impl Refuter {
    fn new(cnf: &CnfFormula, policy: BranchPolicy) -> Self {
        let clauses: Vec<Vec<EncLit>> = cnf
            .clauses
            .iter()
            .map(|c| {
                let mut v: Vec<EncLit> = c.lits().iter().map(|l| enc(l.var, l.neg)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let mut occ = vec![Vec::new(); 2 * cnf.n];
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                occ[l as usize].push(ci as u32);
            }
        }
        let m = clauses.len();
        Refuter {
            n: cnf.n,
            num_free: clauses.iter().map(|c| c.len() as u32).collect(),
            clauses,
            occ,
            value: vec![-1; cnf.n],
            num_true: vec![0; m],
            trail: Vec::new(),
            unit_queue: Vec::new(),
            steps: Vec::new(),
            nodes: 0,
            policy,
            model: None,
        }
    }

    fn push_axiom(&mut self, ci: usize) -> usize {
        self.steps
            .push((self.clauses[ci].clone(), Justification::Axiom { origin: ci }));
        self.steps.len() - 1
    }

    /// Assigns var = v with the given reason; returns the first conflicting
    /// clause, if any. Counters stay consistent regardless.
    fn assign(&mut self, var: u32, v: i8, reason: Option<u32>) -> Option<usize> {
        debug_assert_eq!(self.value[var as usize], -1);
        self.value[var as usize] = v;
        self.trail.push((var, reason));
        let lit_true = enc(var, v == 0);
        let lit_false = lit_true ^ 1;
        for i in 0..self.occ[lit_true as usize].len() {
            let ci = self.occ[lit_true as usize][i] as usize;
            self.num_true[ci] += 1;
            self.num_free[ci] -= 1;
        }
        let mut conflict = None;
        for i in 0..self.occ[lit_false as usize].len() {
            let ci = self.occ[lit_false as usize][i] as usize;
            self.num_free[ci] -= 1;
            if self.num_true[ci] == 0 {
                match self.num_free[ci] {
                    0 => conflict = conflict.or(Some(ci)),
                    1 => self.unit_queue.push(ci as u32),
                    _ => {}
                }
            }
        }
        conflict
    }

    fn unassign_to(&mut self, mark: usize) {
        self.unit_queue.clear();
        while self.trail.len() > mark {
            let (var, _) = self.trail.pop().unwrap();
            let v = self.value[var as usize];
            self.value[var as usize] = -1;
            let lit_true = enc(var, v == 0);
            let lit_false = lit_true ^ 1;
            for i in 0..self.occ[lit_true as usize].len() {
                let ci = self.occ[lit_true as usize][i] as usize;
                self.num_true[ci] -= 1;
                self.num_free[ci] += 1;
            }
            for i in 0..self.occ[lit_false as usize].len() {
                let ci = self.occ[lit_false as usize][i] as usize;
                self.num_free[ci] += 1;
            }
        }
    }

    fn propagate(&mut self) -> Option<usize> {
        while let Some(ci) = self.unit_queue.pop() {
            let ci = ci as usize;
            if self.num_true[ci] > 0 || self.num_free[ci] != 1 {
                continue;
            }
            let lit = self.clauses[ci]
                .iter()
                .copied()
                .find(|&l| self.value[enc_var(l) as usize] == -1)
                .expect("free literal must exist");
            let v = if lit & 1 == 0 { 1 } else { 0 };
            if let Some(cf) = self.assign(enc_var(lit), v, Some(ci as u32)) {
                return Some(cf);
            }
        }
        None
    }

    /// Derives a clause falsified by the part of the trail that remains
    /// after resolving out all propagated literals, starting from the
    /// conflicting clause `cf`. Returns its arena id.
    fn build_conflict(&mut self, cf: usize) -> usize {
        let mut d = self.clauses[cf].clone();
        let mut d_id = self.push_axiom(cf);
        for i in (0..self.trail.len()).rev() {
            let (var, reason) = self.trail[i];
            let Some(rc) = reason else { continue };
            let lt = enc(var, self.value[var as usize] == 0);
            let lf = lt ^ 1;
            if d.binary_search(&lf).is_err() {
                continue;
            }
            let ax = self.push_axiom(rc as usize);
            let mut res: Vec<EncLit> = d
                .iter()
                .copied()
                .filter(|&l| l != lf)
                .chain(
                    self.clauses[rc as usize]
                        .iter()
                        .copied()
                        .filter(|&l| l != lt),
                )
                .collect();
            res.sort_unstable();
            res.dedup();
            let (left, right) = if lt & 1 == 0 { (ax, d_id) } else { (d_id, ax) };
            self.steps
                .push((res.clone(), Justification::Resolve { left, right, pivot: var }));
            d = res;
            d_id = self.steps.len() - 1;
        }
        d_id
    }

    fn all_satisfied(&self) -> bool {
        (0..self.clauses.len()).all(|ci| self.num_true[ci] > 0)
    }

    fn pick_branch(&self) -> (u32, i8) {
        match self.policy {
            BranchPolicy::LexFirst => {
                for ci in 0..self.clauses.len() {
                    if self.num_true[ci] == 0 {
                        for &l in &self.clauses[ci] {
                            if self.value[enc_var(l) as usize] == -1 {
                                // clause literals are var-sorted
                                return (enc_var(l), 1);
                            }
                        }
                    }
                }
                unreachable!("branch requested with all clauses satisfied")
            }
            BranchPolicy::MomsLex => {
                let mut min_len = u32::MAX;
                for ci in 0..self.clauses.len() {
                    if self.num_true[ci] == 0 && self.num_free[ci] < min_len {
                        min_len = self.num_free[ci];
                    }
                }
                let mut pos = vec![0u32; self.n];
                let mut neg = vec![0u32; self.n];
                for ci in 0..self.clauses.len() {
                    if self.num_true[ci] == 0 && self.num_free[ci] == min_len {
                        for &l in &self.clauses[ci] {
                            let v = enc_var(l) as usize;
                            if self.value[v] == -1 {
                                if l & 1 == 0 {
                                    pos[v] += 1;
                                } else {
                                    neg[v] += 1;
                                }
                            }
                        }
                    }
                }
                let mut best: Option<(u32, u32)> = None;
                for v in 0..self.n {
                    let score = pos[v] + neg[v];
                    if score > 0 && best.map(|(s, _)| score > s).unwrap_or(true) {
                        best = Some((score, v as u32));
                    }
                }
                let (_, var) = best.expect("branch requested with all clauses satisfied");
                (var, if pos[var as usize] >= neg[var as usize] { 1 } else { 0 })
            }
        }
    }

    fn capture_model(&mut self) {
        self.model = Some((0..self.n).map(|v| self.value[v] == 1).collect());
    }

    fn search(&mut self) -> Search {
        self.nodes += 1;
        if let Some(cf) = self.propagate() {
            return Search::Refuted(self.build_conflict(cf));
        }
        if self.all_satisfied() {
            self.capture_model();
            return Search::Sat;
        }
        let (var, first) = self.pick_branch();
        let mut first_derived: Option<(usize, EncLit)> = None;
        for &v in &[first, 1 - first] {
            let mark = self.trail.len();
            let blit = enc(var, v == 0);
            let outcome = match self.assign(var, v, None) {
                Some(cf) => Search::Refuted(self.build_conflict(cf)),
                None => self.search(),
            };
            let d = match outcome {
                Search::Sat => return Search::Sat,
                Search::Refuted(d) => d,
            };
            self.unassign_to(mark);
            if self.steps[d].0.binary_search(&(blit ^ 1)).is_err() {
                // the derivation does not mention this branch: it already
                // refutes the node, skip the other value
                return Search::Refuted(d);
            }
            match first_derived {
                None => first_derived = Some((d, blit)),
                Some((d0, blit0)) => {
                    // d0 contains !blit0, d contains blit0; resolve on var
                    let mut res: Vec<EncLit> = self.steps[d0]
                        .0
                        .iter()
                        .copied()
                        .filter(|&l| l != blit0 ^ 1)
                        .chain(self.steps[d].0.iter().copied().filter(|&l| l != blit0))
                        .collect();
                    res.sort_unstable();
                    res.dedup();
                    let (left, right) = if blit0 & 1 == 1 {
                        // blit0^1 is positive, d0 holds the positive pivot
                        (d0, d)
                    } else {
                        (d, d0)
                    };
                    self.steps
                        .push((res, Justification::Resolve { left, right, pivot: var }));
                    return Search::Refuted(self.steps.len() - 1);
                }
            }
        }
        unreachable!("second branch always resolves or returns")
    }

    /// Garbage-collects the arena down to the steps reachable from `root`
    /// and converts to the public proof type.
    fn extract_proof(&self, root: usize) -> ResolutionProof {
        let mut keep = vec![false; self.steps.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if keep[i] {
                continue;
            }
            keep[i] = true;
            if let Justification::Resolve { left, right, .. } = self.steps[i].1 {
                stack.push(left);
                stack.push(right);
            }
        }
        let mut remap = vec![usize::MAX; self.steps.len()];
        let mut steps = Vec::new();
        for (i, (lits, just)) in self.steps.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            remap[i] = steps.len();
            let clause = Clause::new(
                lits.iter()
                    .map(|&l| Lit::new(enc_var(l), l & 1 == 1))
                    .collect(),
            )
            .expect("derived clauses are never tautological");
            let justification = match *just {
                Justification::Axiom { origin } => Justification::Axiom { origin },
                Justification::Resolve { left, right, pivot } => Justification::Resolve {
                    left: remap[left],
                    right: remap[right],
                    pivot,
                },
            };
            steps.push(ProofStep { clause, justification });
        }
        ResolutionProof { steps }
    }
}

/// Refutes a CNF by DPLL, extracting the corresponding tree-resolution
/// proof; on satisfiable inputs returns a verifying witness. Deterministic
/// given the policy and input clause order.
pub fn dpll_refute(cnf: &CnfFormula, policy: BranchPolicy) -> RefuteOutcome {
    // an empty clause refutes immediately
    if let Some(ci) = cnf.clauses.iter().position(|c| c.is_empty()) {
        let mut r = Refuter::new(cnf, policy);
        let id = r.push_axiom(ci);
        return RefuteOutcome::Unsat(DpllTrace {
            node_count: 1,
            proof: r.extract_proof(id),
            policy,
        });
    }
    let mut r = Refuter::new(cnf, policy);
    for ci in 0..r.clauses.len() {
        if r.clauses[ci].len() == 1 {
            r.unit_queue.push(ci as u32);
        }
    }
    match r.search() {
        Search::Sat => {
            let model = r.model.expect("model captured on sat");
            RefuteOutcome::Sat {
                witness: Assignment::from_values(model.into_iter().map(|b| b as u8).collect()),
                node_count: r.nodes,
            }
        }
        Search::Refuted(id) => {
            debug_assert!(r.steps[id].0.is_empty(), "root derivation must be empty");
            RefuteOutcome::Unsat(DpllTrace {
                node_count: r.nodes,
                proof: r.extract_proof(id),
                policy,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub enum MusRefutation {
    Sat(Assignment),
    Unsat { trace: DpllTrace, mus: Formula },
}

/// Refutation through a minimally unsatisfiable subformula: on unsat input
/// first extracts a MUS, then refutes only its CNF, bounding the search
/// tree by the MUS variable count.
pub fn refute_via_mus(f: &Formula) -> Result<MusRefutation> {
    if !f.is_boolean() {
        return Err(Error::NonBooleanDomain(f.t()));
    }
    match decide(f)? {
        Decision::Sat(a) => Ok(MusRefutation::Sat(a)),
        Decision::Unsat => {
            let mus_result = crate::structure::mus_extract(f)?;
            let mus = mus_result.subformula.clone();
            let cnf = to_cnf(&mus)?;
            match dpll_refute(&cnf, BranchPolicy::default()) {
                RefuteOutcome::Unsat(trace) => Ok(MusRefutation::Unsat { trace, mus }),
                RefuteOutcome::Sat { .. } => unreachable!("a MUS is unsatisfiable"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::proof::check_refutation;

    fn cnf(n: usize, clauses: &[&[i32]]) -> CnfFormula {
        let cs: Vec<Clause> = clauses
            .iter()
            .map(|c| {
                Clause::new(
                    c.iter()
                        .map(|&l| Lit::new(l.unsigned_abs() - 1, l < 0))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let m = cs.len();
        CnfFormula {
            n,
            clauses: cs,
            origin: (0..m).collect(),
        }
    }

    #[test]
    fn unit_contradiction() {
        let c = cnf(1, &[&[1], &[-1]]);
        match dpll_refute(&c, BranchPolicy::MomsLex) {
            RefuteOutcome::Unsat(trace) => {
                assert_eq!(trace.node_count, 1);
                assert_eq!(trace.proof.size(), 3);
                assert_eq!(trace.proof.width(), 1);
                check_refutation(&c, &trace.proof).unwrap();
            }
            RefuteOutcome::Sat { .. } => panic!("unsat expected"),
        }
    }

    #[test]
    fn satisfiable_clause() {
        let c = cnf(2, &[&[1, 2]]);
        match dpll_refute(&c, BranchPolicy::MomsLex) {
            RefuteOutcome::Sat { witness, .. } => assert!(c.satisfied_by(&witness)),
            RefuteOutcome::Unsat(_) => panic!("sat expected"),
        }
    }

    #[test]
    fn full_binary_contradiction() {
        // all four clauses over two variables: unsat, proof must check
        let c = cnf(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        match dpll_refute(&c, BranchPolicy::MomsLex) {
            RefuteOutcome::Unsat(trace) => {
                check_refutation(&c, &trace.proof).unwrap();
                assert!(trace.proof.is_refutation());
                assert!(trace.node_count >= 1);
            }
            RefuteOutcome::Sat { .. } => panic!("unsat expected"),
        }
    }

    #[test]
    fn deterministic_given_policy() {
        let c = cnf(
            4,
            &[&[1, 2, 3], &[-1, 2, -4], &[1, -2, 4], &[-1, -2, -3], &[2, 3, 4], &[-2, -3, -4]],
        );
        for policy in [BranchPolicy::MomsLex, BranchPolicy::LexFirst] {
            let r1 = dpll_refute(&c, policy);
            let r2 = dpll_refute(&c, policy);
            match (r1, r2) {
                (
                    RefuteOutcome::Sat { witness: a, node_count: n1 },
                    RefuteOutcome::Sat { witness: b, node_count: n2 },
                ) => {
                    assert_eq!(a, b);
                    assert_eq!(n1, n2);
                }
                (RefuteOutcome::Unsat(t1), RefuteOutcome::Unsat(t2)) => {
                    assert_eq!(t1.node_count, t2.node_count);
                    assert_eq!(t1.proof, t2.proof);
                }
                _ => panic!("nondeterministic outcome"),
            }
        }
    }
}
