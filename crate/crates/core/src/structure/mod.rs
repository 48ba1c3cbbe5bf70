//! Structural analyzers: minimally unsatisfiable subformulas, the maximum
//! subformula density c*, the r-deficiency maximum, (x,y)-sparsity,
//! short-implicate detection, private/free variable orderings with the
//! incremental witness construction, and the entailment measure mu.

mod flow;

pub use flow::FlowNetwork;

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::model::{
    constraint_satisfied, Assignment, ConstraintTemplate, Formula, TemplateSet,
};
use crate::order::{frac, Frac};
use crate::solver::{decide, to_cnf, Clause, Decision, EngineResult, Lit, SatEngine};

/// A minimally unsatisfiable subformula with per-constraint certificates:
/// deleting any one constraint leaves a satisfiable formula, witnessed by
/// the stored assignments.
#[derive(Debug, Clone)]
pub struct MusResult {
    pub subformula: Formula,
    /// Indices into the input formula, ascending.
    pub indices: Vec<usize>,
    /// certificates[i] satisfies the MUS minus its i-th constraint.
    pub certificates: Vec<Assignment>,
}

impl MusResult {
    pub fn verify(&self) -> Result<()> {
        if decide(&self.subformula)?.is_sat() {
            return Err(Error::ContractViolation("MUS is satisfiable".into()));
        }
        for (i, cert) in self.certificates.iter().enumerate() {
            for (j, c) in self.subformula.constraints.iter().enumerate() {
                if i != j && !constraint_satisfied(c, &self.subformula.templates, cert)? {
                    return Err(Error::ContractViolation(format!(
                        "certificate {i} does not satisfy constraint {j}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Deletion-based minimally unsatisfiable subformula, scanning constraints
/// in ascending index order. Deterministic; errors on satisfiable input.
pub fn mus_extract(f: &Formula) -> Result<MusResult> {
    if decide(f)?.is_sat() {
        return Err(Error::SatisfiableInput);
    }
    let m = f.m();
    let mut removed: Vec<bool> = vec![false; m];
    if f.is_boolean() {
        let cnf = to_cnf(f)?;
        let mut engine = SatEngine::from_cnf(&cnf);
        for i in 0..m {
            removed[i] = true;
            let rm = removed.clone();
            match engine.solve_with(|ci| !rm[ci], &[]) {
                EngineResult::Unsat => {}
                EngineResult::Sat(_) => removed[i] = false,
            }
        }
    } else {
        for i in 0..m {
            removed[i] = true;
            let keep: Vec<usize> = (0..m).filter(|&j| !removed[j]).collect();
            if decide(&f.subformula(&keep))?.is_sat() {
                removed[i] = false;
            }
        }
    }
    let indices: Vec<usize> = (0..m).filter(|&i| !removed[i]).collect();
    let subformula = f.subformula(&indices);
    let mut certificates = Vec::with_capacity(indices.len());
    for drop in 0..indices.len() {
        let keep: Vec<usize> = (0..indices.len()).filter(|&j| j != drop).collect();
        match decide(&subformula.subformula(&keep))? {
            Decision::Sat(a) => certificates.push(a),
            Decision::Unsat => {
                return Err(Error::ContractViolation(
                    "deletion left a non-minimal core".into(),
                ))
            }
        }
    }
    Ok(MusResult {
        subformula,
        indices,
        certificates,
    })
}

/// Exact maximum of |H| / |Var(H)| over nonempty subformulas, with a
/// witness. Iterates a parametric minimum cut (densest-subhypergraph
/// network): at ratio p/q the cut decides whether some H has
/// q|H| - p|Var(H)| > 0, and each improvement jumps to the witness's exact
/// ratio, so the loop terminates on the maximum without any floating
/// point.
pub fn c_star(f: &Formula) -> Result<CStarReport> {
    if f.m() == 0 {
        return Err(Error::ContractViolation("c* of an empty formula".into()));
    }
    let vars = f.var_set();
    let var_pos: HashMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = f.m();
    let mut best = frac(m, vars.len());
    let mut witness: Vec<usize> = (0..m).collect();
    for _ in 0..10_000 {
        let (p, q) = (*best.numer(), *best.denom());
        // nodes: source, constraints, vars, sink
        let src = 0;
        let sink = 1 + m + vars.len();
        let mut net = FlowNetwork::new(sink + 1);
        for i in 0..m {
            net.add_edge(src, 1 + i, q);
            for &v in &f.constraints[i].vars {
                net.add_edge(1 + i, 1 + m + var_pos[&v], flow::INF);
            }
        }
        for vi in 0..vars.len() {
            net.add_edge(1 + m + vi, sink, p);
        }
        let flow_val = net.max_flow(src, sink);
        let max_profit = q * m as i64 - flow_val;
        if max_profit <= 0 {
            break;
        }
        let side = net.source_side(src);
        let h: Vec<usize> = (0..m).filter(|&i| side[1 + i]).collect();
        if h.is_empty() {
            break;
        }
        let hvars: BTreeSet<u32> = h
            .iter()
            .flat_map(|&i| f.constraints[i].vars.iter().copied())
            .collect();
        let ratio = frac(h.len(), hvars.len());
        if ratio <= best {
            break;
        }
        best = ratio;
        witness = h;
    }
    Ok(CStarReport {
        value: best,
        witness,
    })
}

#[derive(Debug, Clone)]
pub struct CStarReport {
    pub value: Frac,
    pub witness: Vec<usize>,
}

impl CStarReport {
    pub fn to_text(&self) -> String {
        format!(
            "c_star = {}/{} = {:.6}\nwitness = [{}]\n",
            self.value.numer(),
            self.value.denom(),
            *self.value.numer() as f64 / *self.value.denom() as f64,
            self.witness.iter().map(|i| i.to_string()).join(",")
        )
    }
}

#[derive(Debug, Clone)]
pub struct DeltaReport {
    pub r: Frac,
    pub value: Frac,
    pub witness: Vec<usize>,
}

impl DeltaReport {
    pub fn to_text(&self) -> String {
        format!(
            "r = {}/{}\ndelta_star = {}/{} = {:.6}\nwitness = [{}]\n",
            self.r.numer(),
            self.r.denom(),
            self.value.numer(),
            self.value.denom(),
            *self.value.numer() as f64 / *self.value.denom() as f64,
            self.witness.iter().map(|i| i.to_string()).join(",")
        )
    }
}

/// Exact maximum of r|G| - 2|Var(G)| over nonempty subformulas by a single
/// project-selection minimum cut (constraint profit r, variable cost 2).
/// Capacities carry a tiny inclusion bias so that among maximizers a
/// largest subformula is selected; if only the empty set attains the
/// unconstrained optimum, the best singleton is reported instead.
pub fn delta_star(f: &Formula, r: Frac) -> Result<DeltaReport> {
    if r < Frac::new(1, 1) {
        return Err(Error::DomainError(format!("delta_star requires r >= 1, got {r}")));
    }
    if f.m() == 0 {
        return Err(Error::ContractViolation("delta* of an empty formula".into()));
    }
    let vars = f.var_set();
    let var_pos: HashMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = f.m();
    let (p, q) = (*r.numer(), *r.denom());
    // maximize (scale * delta_r(G)) + |G|: the secondary |G| term breaks
    // ties toward a nonempty witness without disturbing the maximum
    let scale = m as i64 + 1;
    let src = 0;
    let sink = 1 + m + vars.len();
    let mut net = FlowNetwork::new(sink + 1);
    for i in 0..m {
        net.add_edge(src, 1 + i, p * scale + 1);
        for &v in &f.constraints[i].vars {
            net.add_edge(1 + i, 1 + m + var_pos[&v], flow::INF);
        }
    }
    for vi in 0..vars.len() {
        net.add_edge(1 + m + vi, sink, 2 * q * scale);
    }
    net.max_flow(src, sink);
    let side = net.source_side(src);
    let g: Vec<usize> = (0..m).filter(|&i| side[1 + i]).collect();
    if g.is_empty() {
        // every nonempty subformula has negative deficiency; anchor each
        // constraint in turn to find the exact nonempty maximum (a best
        // singleton is not enough: constraints sharing variables can beat
        // every singleton)
        let mut best: Option<(Frac, Vec<usize>)> = None;
        for anchor in 0..m {
            let mut net = FlowNetwork::new(sink + 1);
            for i in 0..m {
                let cap = if i == anchor { flow::INF } else { p * scale + 1 };
                net.add_edge(src, 1 + i, cap);
                for &v in &f.constraints[i].vars {
                    net.add_edge(1 + i, 1 + m + var_pos[&v], flow::INF);
                }
            }
            for vi in 0..vars.len() {
                net.add_edge(1 + m + vi, sink, 2 * q * scale);
            }
            net.max_flow(src, sink);
            let side = net.source_side(src);
            let ga: Vec<usize> = (0..m).filter(|&i| side[1 + i]).collect();
            let value = delta_value(f, &ga, p, q);
            if best.as_ref().map(|(b, _)| value > *b).unwrap_or(true) {
                best = Some((value, ga));
            }
        }
        let (value, witness) = best.expect("nonempty formula has an anchored optimum");
        return Ok(DeltaReport { r, value, witness });
    }
    let value = delta_value(f, &g, p, q);
    Ok(DeltaReport {
        r,
        value,
        witness: g,
    })
}

fn delta_value(f: &Formula, g: &[usize], p: i64, q: i64) -> Frac {
    let gvars: BTreeSet<u32> = g
        .iter()
        .flat_map(|&i| f.constraints[i].vars.iter().copied())
        .collect();
    Frac::new(p * g.len() as i64 - 2 * q * gvars.len() as i64, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityPath {
    /// The unconstrained cut maximum settled the verdict.
    MinCutCertificate,
    /// Exhaustive search over vertex sets of size <= xn.
    BoundedEnumeration,
}

#[derive(Debug, Clone)]
pub struct SparsityVerdict {
    pub sparse: bool,
    /// A set of s <= xn vertices carrying more than ys edges, when not
    /// sparse.
    pub violating_set: Option<Vec<u32>>,
    pub path: SparsityPath,
}

/// Exact (x,y)-sparsity check over a k-uniform hypergraph given as vertex
/// count plus edge list: every set of s <= xn vertices must contain at
/// most ys edges. An edge is contained when all its vertices are inside.
pub fn is_xy_sparse(
    n: usize,
    edges: &[Vec<u32>],
    x: Frac,
    y: Frac,
    max_enum_subsets: u64,
) -> Result<SparsityVerdict> {
    if !x.is_positive() || !y.is_positive() {
        return Err(Error::DomainError("sparsity requires x, y > 0".into()));
    }
    let max_s = (x * Frac::new(n as i64, 1)).floor().to_integer() as usize;
    let max_s = max_s.min(n);
    let edges_inside = |set: &BTreeSet<u32>| -> usize {
        edges
            .iter()
            .filter(|e| e.iter().all(|v| set.contains(v)))
            .count()
    };
    let violates = |set: &BTreeSet<u32>| -> bool {
        frac(edges_inside(set), 1) > y * frac(set.len(), 1)
    };

    // unconstrained maximum of q_y * e(S) - p_y * |S| via project selection
    let (py, qy) = (*y.numer(), *y.denom());
    let m = edges.len();
    if m > 0 {
        let src = 0;
        let sink = 1 + m + n;
        let mut net = FlowNetwork::new(sink + 1);
        for (i, e) in edges.iter().enumerate() {
            net.add_edge(src, 1 + i, qy);
            for &v in e {
                net.add_edge(1 + i, 1 + m + v as usize, flow::INF);
            }
        }
        for v in 0..n {
            net.add_edge(1 + m + v, sink, py);
        }
        let flow_val = net.max_flow(src, sink);
        let max_profit = qy * m as i64 - flow_val;
        if max_profit <= 0 {
            return Ok(SparsityVerdict {
                sparse: true,
                violating_set: None,
                path: SparsityPath::MinCutCertificate,
            });
        }
        let side = net.source_side(src);
        let s_star: BTreeSet<u32> = (0..n as u32).filter(|&v| side[1 + m + v as usize]).collect();
        if !s_star.is_empty() && s_star.len() <= max_s && violates(&s_star) {
            return Ok(SparsityVerdict {
                sparse: false,
                violating_set: Some(s_star.into_iter().collect()),
                path: SparsityPath::MinCutCertificate,
            });
        }
    } else {
        return Ok(SparsityVerdict {
            sparse: true,
            violating_set: None,
            path: SparsityPath::MinCutCertificate,
        });
    }

    // inconclusive: bounded exhaustive search, smallest sets first
    let mut budget = max_enum_subsets;
    for s in 1..=max_s {
        for combo in (0..n as u32).combinations(s) {
            budget = budget.checked_sub(1).ok_or_else(|| {
                Error::BudgetExceeded("sparsity enumeration budget".into())
            })?;
            let set: BTreeSet<u32> = combo.iter().copied().collect();
            if violates(&set) {
                return Ok(SparsityVerdict {
                    sparse: false,
                    violating_set: Some(combo),
                    path: SparsityPath::BoundedEnumeration,
                });
            }
        }
    }
    Ok(SparsityVerdict {
        sparse: true,
        violating_set: None,
        path: SparsityPath::BoundedEnumeration,
    })
}

/// The sparsity bound x(y, c, k) = ((1/2e) (y/ce)^y)^(1/(y(k-1)-1)).
/// Defined for y > 1/(k-1), c > 0.
pub fn x_bound(y: f64, c: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::DomainError("x_bound requires k >= 2".into()));
    }
    if c <= 0.0 || y <= 0.0 {
        return Err(Error::DomainError("x_bound requires c > 0 and y > 0".into()));
    }
    let denom = y * (k as f64 - 1.0) - 1.0;
    if denom <= 0.0 {
        return Err(Error::DomainError(format!(
            "x_bound requires y > 1/(k-1); got y = {y}, k = {k}"
        )));
    }
    let e = std::f64::consts::E;
    let base = (1.0 / (2.0 * e)) * (y / (c * e)).powf(y);
    Ok(base.powf(1.0 / denom))
}

/// All clauses of at most `max_len` literals over the template's k
/// coordinates entailed by its relation, tautologies excluded. Literal
/// variables index coordinates, not formula variables.
pub fn implicate_check(
    ts: &TemplateSet,
    tpl: &ConstraintTemplate,
    max_len: usize,
) -> Result<Vec<Clause>> {
    if ts.t != 2 {
        return Err(Error::NonBooleanDomain(ts.t));
    }
    if !(1..=2).contains(&max_len) {
        return Err(Error::DomainError("implicate_check supports max_len in {1, 2}".into()));
    }
    let k = ts.k;
    let sat_tuples: Vec<Vec<u8>> = tpl
        .sat
        .iter_ones()
        .map(|idx| crate::model::index_tuple(idx, 2, k))
        .collect();
    let mut out = Vec::new();
    let mut consider = |lits: Vec<Lit>| {
        let clause = Clause::new(lits).expect("distinct coordinates");
        let entailed = sat_tuples.iter().all(|t| {
            clause
                .lits()
                .iter()
                .any(|l| (t[l.var as usize] == 1) != l.neg)
        });
        if entailed {
            out.push(clause);
        }
    };
    for i in 0..k as u32 {
        for ni in [false, true] {
            consider(vec![Lit::new(i, ni)]);
        }
    }
    if max_len >= 2 {
        for i in 0..k as u32 {
            for j in i + 1..k as u32 {
                for ni in [false, true] {
                    for nj in [false, true] {
                        consider(vec![Lit::new(i, ni), Lit::new(j, nj)]);
                    }
                }
            }
        }
    }
    // a relation with an entailed unit also entails its 2-literal
    // supersets; keep all of them, sorted for determinism
    out.sort();
    out.dedup();
    Ok(out)
}

/// True iff no template of the set has an implicate of length <= 2.
pub fn short_implicate_free(ts: &TemplateSet) -> Result<bool> {
    for tpl in &ts.templates {
        if !implicate_check(ts, tpl, 2)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct FreeOrdering {
    /// Constraint indices in processing order C_1 .. C_m.
    pub order: Vec<usize>,
    /// Per position: variables of C_i free in C_i (absent from all C_j,
    /// j < i); each has at least k-2 entries when the peel succeeds.
    pub free_vars: Vec<Vec<u32>>,
    /// Per position: variables private to C_i in the whole formula.
    pub private_vars: Vec<Vec<u32>>,
}

/// Greedy peel: repeatedly removes a constraint with at least k-2
/// variables private in the current residue, emitting the ordering in
/// reverse. Returns `None` when the peel gets stuck.
pub fn free_private_ordering(f: &Formula) -> Option<FreeOrdering> {
    let k = f.k();
    let need = k.saturating_sub(2);
    let m = f.m();
    let mut alive: Vec<bool> = vec![true; m];
    let mut peeled: Vec<usize> = Vec::new();
    for _ in 0..m {
        let mut occurrences: HashMap<u32, usize> = HashMap::new();
        for i in 0..m {
            if alive[i] {
                for &v in &f.constraints[i].vars {
                    *occurrences.entry(v).or_insert(0) += 1;
                }
            }
        }
        let pick = (0..m).find(|&i| {
            alive[i]
                && f.constraints[i]
                    .vars
                    .iter()
                    .filter(|v| occurrences[v] == 1)
                    .count()
                    >= need
        })?;
        alive[pick] = false;
        peeled.push(pick);
    }
    let order: Vec<usize> = peeled.into_iter().rev().collect();
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut free_vars = Vec::with_capacity(m);
    for &i in &order {
        let free: Vec<u32> = f.constraints[i]
            .vars
            .iter()
            .copied()
            .filter(|v| !seen.contains(v))
            .collect();
        for &v in &f.constraints[i].vars {
            seen.insert(v);
        }
        free_vars.push(free);
    }
    let mut global_occ: HashMap<u32, usize> = HashMap::new();
    for c in &f.constraints {
        for &v in &c.vars {
            *global_occ.entry(v).or_insert(0) += 1;
        }
    }
    let private_vars = order
        .iter()
        .map(|&i| {
            f.constraints[i]
                .vars
                .iter()
                .copied()
                .filter(|v| global_occ[v] == 1)
                .collect()
        })
        .collect();
    Some(FreeOrdering {
        order,
        free_vars,
        private_vars,
    })
}

/// Constructs a satisfying assignment by processing constraints in the
/// given peel ordering, fixing only each constraint's free variables. The
/// no-short-implicate hypothesis guarantees a completion exists whatever
/// values the (at most two) bound variables already carry.
pub fn greedy_witness(f: &Formula, ordering: &FreeOrdering) -> Result<Assignment> {
    if !f.is_boolean() {
        return Err(Error::NonBooleanDomain(f.t()));
    }
    if !short_implicate_free(&f.templates)? {
        return Err(Error::ContractViolation(
            "greedy_witness requires templates without implicates of length <= 2".into(),
        ));
    }
    let mut a = Assignment::unassigned(f.n);
    for (pos, &ci) in ordering.order.iter().enumerate() {
        let c = &f.constraints[ci];
        let free = &ordering.free_vars[pos];
        let bound: Vec<u32> = c.vars.iter().copied().filter(|v| !free.contains(v)).collect();
        if bound.len() > 2 {
            return Err(Error::ContractViolation(format!(
                "constraint {ci} has {} bound variables under the ordering",
                bound.len()
            )));
        }
        let mut found = false;
        for bits in 0..(1u32 << free.len()) {
            for (j, &v) in free.iter().enumerate() {
                a.set(v, (bits >> j & 1) as u8);
            }
            if constraint_satisfied(c, &f.templates, &a)? {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::ContractViolation(format!(
                "no free-variable completion satisfies constraint {ci}"
            )));
        }
    }
    for v in 0..f.n as u32 {
        if a.get(v).is_none() {
            a.set(v, 0);
        }
    }
    for (i, c) in f.constraints.iter().enumerate() {
        if !constraint_satisfied(c, &f.templates, &a)? {
            return Err(Error::ContractViolation(format!(
                "greedy witness violates constraint {i}"
            )));
        }
    }
    Ok(a)
}

/// Minimum cardinality of a subformula entailing the clause; `None` when
/// no subformula does. For the empty clause this is the size of the
/// smallest unsatisfiable subformula. Brute force over subsets by size;
/// refuses formulas with more than `max_m` constraints.
pub fn mu(f: &Formula, clause: &Clause, max_m: usize) -> Result<Option<usize>> {
    if !f.is_boolean() {
        return Err(Error::NonBooleanDomain(f.t()));
    }
    if f.m() > max_m {
        return Err(Error::BudgetExceeded(format!(
            "mu: m = {} exceeds brute-force budget {max_m}",
            f.m()
        )));
    }
    let cnf = to_cnf(f)?;
    let mut engine = SatEngine::from_cnf(&cnf);
    // Xi entails the clause iff Xi plus the negated clause is unsatisfiable
    let assumptions: Vec<(u32, bool)> = clause.lits().iter().map(|l| (l.var, l.neg)).collect();
    let m = f.m();
    for size in 0..=m {
        for keep in (0..m).combinations(size) {
            let mut mask = vec![false; m];
            for &i in &keep {
                mask[i] = true;
            }
            if let EngineResult::Unsat = engine.solve_with(|ci| mask[ci], &assumptions) {
                return Ok(Some(size));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{closure, named_family, NamedFamily};
    use crate::model::{BitTable, Constraint};
    use std::sync::Arc;

    fn xor_pair() -> Formula {
        let base = named_family(NamedFamily::KXorSat, 3).unwrap();
        let cl = Arc::new(closure(&base).unwrap());
        Formula::new(
            3,
            cl,
            vec![Constraint::new(0, vec![0, 1, 2]), Constraint::new(1, vec![0, 1, 2])],
        )
        .unwrap()
    }

    /// The paper-style 4-constraint 1-in-3 instance over x1..x6 (0-indexed
    /// 0..5): 1in3(x1,x2,x3), 1in3(!x3,x4,x1), 1in3(!x1,x5,!x3),
    /// 1in3(x3,x6,!x1).
    pub(crate) fn one_in_three_quartet() -> Formula {
        let base = named_family(NamedFamily::OneInKSat, 3).unwrap();
        let ts = Arc::new(base);
        Formula::new(
            6,
            ts,
            vec![
                Constraint::new(0, vec![0, 1, 2]),
                Constraint::with_signs(0, vec![2, 3, 0], vec![true, false, false]),
                Constraint::with_signs(0, vec![0, 4, 2], vec![true, false, true]),
                Constraint::with_signs(0, vec![2, 5, 0], vec![false, false, true]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn mus_of_xor_pair_is_itself() {
        let f = xor_pair();
        let r = mus_extract(&f).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        r.verify().unwrap();
    }

    #[test]
    fn mus_single_contradictory_constraint() {
        let mut rels = vec![BitTable::zeros(4)];
        rels.push(BitTable::ones(4));
        let ts = Arc::new(TemplateSet::new(2, 2, rels).unwrap());
        let f = Formula::new(
            3,
            ts,
            vec![
                Constraint::new(1, vec![0, 1]),
                Constraint::new(0, vec![1, 2]),
                Constraint::new(1, vec![0, 2]),
            ],
        )
        .unwrap();
        let r = mus_extract(&f).unwrap();
        assert_eq!(r.indices, vec![1]);
    }

    #[test]
    fn mus_rejects_satisfiable() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(3, ksat, vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        assert!(matches!(mus_extract(&f), Err(Error::SatisfiableInput)));
    }

    #[test]
    fn paper_one_in_three_quartet_is_mus() {
        let f = one_in_three_quartet();
        assert!(!decide(&f).unwrap().is_sat());
        let r = mus_extract(&f).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2, 3]);
        r.verify().unwrap();
    }

    #[test]
    fn c_star_single_constraint() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(5, ksat, vec![Constraint::new(0, vec![0, 2, 4])]).unwrap();
        let r = c_star(&f).unwrap();
        assert_eq!(r.value, frac(1, 3));
    }

    #[test]
    fn c_star_xor_pair() {
        let r = c_star(&xor_pair()).unwrap();
        assert_eq!(r.value, frac(2, 3));
        assert_eq!(r.witness.len(), 2);
    }

    #[test]
    fn c_star_one_in_three_quartet() {
        // brute force over all 15 nonempty subsets gives 4/6 = 2/3
        let f = one_in_three_quartet();
        let r = c_star(&f).unwrap();
        let mut best = frac(0, 1);
        for mask in 1usize..(1 << 4) {
            let idx: Vec<usize> = (0..4).filter(|&i| mask >> i & 1 == 1).collect();
            let vars: BTreeSet<u32> = idx
                .iter()
                .flat_map(|&i| f.constraints[i].vars.iter().copied())
                .collect();
            best = best.max(frac(idx.len(), vars.len()));
        }
        assert_eq!(r.value, best);
        assert_eq!(r.value, frac(2, 3));
    }

    #[test]
    fn delta_star_values() {
        // single 3-ary constraint at r = 2k-3 = 3: 3 - 6 = -3
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(3, ksat, vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        let r = delta_star(&f, frac(3, 1)).unwrap();
        assert_eq!(r.value, Frac::new(-3, 1));

        // xor pair at r = 3: 3*2 - 2*3 = 0
        let r = delta_star(&xor_pair(), frac(3, 1)).unwrap();
        assert_eq!(r.value, frac(0, 1));
    }

    #[test]
    fn sparsity_basics() {
        // edgeless: sparse for any x, y
        let v = is_xy_sparse(6, &[], frac(1, 1), frac(1, 10), 1 << 20).unwrap();
        assert!(v.sparse);
        // one 3-edge with y < 1/3 and xn >= 3: its own vertex set violates
        let v = is_xy_sparse(
            6,
            &[vec![0, 1, 2]],
            frac(1, 1),
            frac(1, 4),
            1 << 20,
        )
        .unwrap();
        assert!(!v.sparse);
        let set = v.violating_set.unwrap();
        assert_eq!(set, vec![0, 1, 2]);
    }

    #[test]
    fn x_bound_hand_value() {
        // k = 3, y = 1, c = 1: exponent is 1, value 1/(2 e^2)
        let x = x_bound(1.0, 1.0, 3).unwrap();
        let expected = 1.0 / (2.0 * std::f64::consts::E.powi(2));
        assert!((x - expected).abs() < 1e-15);
        assert!(x_bound(0.5, 1.0, 3).is_err());
    }

    #[test]
    fn implicates_by_family() {
        let ksat = named_family(NamedFamily::KSat, 3).unwrap();
        assert!(implicate_check(&ksat, &ksat.templates[0], 2).unwrap().is_empty());
        let xor = named_family(NamedFamily::KXorSat, 3).unwrap();
        assert!(implicate_check(&xor, &xor.templates[0], 2).unwrap().is_empty());
        let one = named_family(NamedFamily::OneInKSat, 3).unwrap();
        let imps = implicate_check(&one, &one.templates[0], 2).unwrap();
        // exactly-one-true entails "not both" for every coordinate pair
        assert!(imps
            .iter()
            .any(|c| c.lits() == [Lit::new(0, true), Lit::new(1, true)]));
        let twosat = named_family(NamedFamily::TwoSat, 2).unwrap();
        let imps = implicate_check(&twosat, &twosat.templates[0], 2).unwrap();
        assert!(!imps.is_empty());
    }

    #[test]
    fn ordering_and_witness() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        // single constraint: ordering of length 1, all three vars free
        let f = Formula::new(3, Arc::clone(&ksat), vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        let ord = free_private_ordering(&f).unwrap();
        assert_eq!(ord.order.len(), 1);
        assert_eq!(ord.free_vars[0].len(), 3);
        let w = greedy_witness(&f, &ord).unwrap();
        assert!(constraint_satisfied(&f.constraints[0], &f.templates, &w).unwrap());

        // two constraints sharing one variable: peel succeeds
        let f = Formula::new(
            5,
            Arc::clone(&ksat),
            vec![Constraint::new(0, vec![0, 1, 2]), Constraint::new(0, vec![2, 3, 4])],
        )
        .unwrap();
        let ord = free_private_ordering(&f).unwrap();
        assert_eq!(ord.order.len(), 2);
        let w = greedy_witness(&f, &ord).unwrap();
        assert_eq!(crate::model::count_violated(&f, &w).unwrap(), 0);

        // xor pair on one triple: no private variables anywhere
        assert!(free_private_ordering(&xor_pair()).is_none());
    }

    #[test]
    fn mu_values() {
        let f = xor_pair();
        // empty clause: smallest unsat subformula is the pair
        assert_eq!(mu(&f, &Clause::empty(), 14).unwrap(), Some(2));
        // satisfiable formula: no subformula entails the empty clause
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let sat = Formula::new(3, ksat, vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        assert_eq!(mu(&sat, &Clause::empty(), 14).unwrap(), None);
        // each CNF clause of a constraint is entailed by that constraint
        let cl = Clause::new(vec![Lit::new(0, false), Lit::new(1, false), Lit::new(2, false)]).unwrap();
        assert!(mu(&sat, &cl, 14).unwrap().unwrap() <= 1);
    }
}
