//! Domain types shared by every other module: constraint templates, applied
//! constraints, formulas, assignments, the constraint universe, and graphs.
//!
//! A *constraint template* is a k-ary relation over the domain `{0..t-1}`,
//! stored as an explicit bit table over all `t^k` value tuples. Applying a
//! template to an ordered tuple of distinct variables yields a `Constraint`;
//! a multiset of constraints over `n` variables is a `Formula`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Bit table over tuples; bit `i` is set iff the tuple with canonical index
/// `i` satisfies the relation. The canonical index of `(d_1, .., d_k)` is
/// `sum d_i * t^(k-i)`, i.e. `d_1` is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitTable {
    words: Vec<u64>,
    len: usize,
}

impl BitTable {
    pub fn zeros(len: usize) -> Self {
        BitTable {
            words: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bt = Self::zeros(len);
        for i in 0..len {
            bt.set(i, true);
        }
        bt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn all_set(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn none_set(&self) -> bool {
        self.count_ones() == 0
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

/// Canonical tuple index: `(d_1, .., d_k) -> sum d_i * t^(k-i)`.
pub fn tuple_index(tuple: &[u8], t: u8) -> usize {
    let mut idx = 0usize;
    for &d in tuple {
        debug_assert!(d < t);
        idx = idx * t as usize + d as usize;
    }
    idx
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(mut idx: usize, t: u8, k: usize) -> Vec<u8> {
    let mut tuple = vec![0u8; k];
    for j in (0..k).rev() {
        tuple[j] = (idx % t as usize) as u8;
        idx /= t as usize;
    }
    tuple
}

/// A k-ary relation over the domain `{0..t-1}` with a stable identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintTemplate {
    pub id: u32,
    pub sat: BitTable,
}

/// A nonempty set of k-ary constraint templates over a common domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub t: u8,
    pub k: usize,
    pub templates: Vec<ConstraintTemplate>,
}

impl TemplateSet {
    /// Builds a template set from raw relation bit tables, assigning ids by
    /// position. Templates with empty or full relations are permitted but
    /// flagged with a warning.
    pub fn new(t: u8, k: usize, relations: Vec<BitTable>) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidTemplateSet(format!("domain size t = {t} < 2")));
        }
        if k < 2 {
            return Err(Error::InvalidTemplateSet(format!("arity k = {k} < 2")));
        }
        if relations.is_empty() {
            return Err(Error::InvalidTemplateSet("no templates".into()));
        }
        let table_len = (t as usize).pow(k as u32);
        for (i, r) in relations.iter().enumerate() {
            if r.len() != table_len {
                return Err(Error::InvalidTemplateSet(format!(
                    "template {i} bit table has length {} but t^k = {table_len}",
                    r.len()
                )));
            }
            if r.none_set() {
                log::warn!("template {i} has an empty satisfying set (contradictory relation)");
            } else if r.all_set() {
                log::warn!("template {i} has a full satisfying set (tautological relation)");
            }
        }
        Ok(TemplateSet {
            t,
            k,
            templates: relations
                .into_iter()
                .enumerate()
                .map(|(i, sat)| ConstraintTemplate { id: i as u32, sat })
                .collect(),
        })
    }

    pub fn table_len(&self) -> usize {
        (self.t as usize).pow(self.k as u32)
    }

    pub fn template(&self, id: u32) -> &ConstraintTemplate {
        self.templates
            .iter()
            .find(|tpl| tpl.id == id)
            .expect("unknown template id")
    }

    pub fn is_boolean(&self) -> bool {
        self.t == 2
    }
}

/// A total or partial assignment of domain values to variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<u8>>,
}

impl Assignment {
    pub fn unassigned(n: usize) -> Self {
        Assignment {
            values: vec![None; n],
        }
    }

    pub fn from_values(values: Vec<u8>) -> Self {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    /// Boolean assignment from bits of `bits`, variable `i` taking bit `i`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment {
            values: (0..n).map(|i| Some((bits >> i & 1) as u8)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, var: u32) -> Option<u8> {
        self.values[var as usize]
    }

    pub fn set(&mut self, var: u32, value: u8) {
        self.values[var as usize] = Some(value);
    }

    pub fn clear(&mut self, var: u32) {
        self.values[var as usize] = None;
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }
}

/// A constraint template applied to an ordered tuple of distinct variables,
/// with optional per-position negation signs (boolean domains only; `true`
/// means negated).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub template: u32,
    pub vars: Vec<u32>,
    pub signs: Option<Vec<bool>>,
}

impl Constraint {
    pub fn new(template: u32, vars: Vec<u32>) -> Self {
        Constraint {
            template,
            vars,
            signs: None,
        }
    }

    pub fn with_signs(template: u32, vars: Vec<u32>, signs: Vec<bool>) -> Self {
        Constraint {
            template,
            vars,
            signs: Some(signs),
        }
    }

    fn validate(&self, ts: &TemplateSet, n: usize) -> Result<()> {
        if self.vars.len() != ts.k {
            return Err(Error::InvalidConstraint(format!(
                "expected {} variables, got {}",
                ts.k,
                self.vars.len()
            )));
        }
        for (i, &v) in self.vars.iter().enumerate() {
            if v as usize >= n {
                return Err(Error::InvalidConstraint(format!(
                    "variable {v} out of range [0, {n})"
                )));
            }
            if self.vars[..i].contains(&v) {
                return Err(Error::InvalidConstraint(format!("duplicate variable {v}")));
            }
        }
        if let Some(signs) = &self.signs {
            if ts.t != 2 {
                return Err(Error::InvalidConstraint(
                    "signs are only meaningful for boolean domains".into(),
                ));
            }
            if signs.len() != ts.k {
                return Err(Error::InvalidConstraint("sign vector has wrong arity".into()));
            }
        }
        if ts.templates.iter().all(|tpl| tpl.id != self.template) {
            return Err(Error::InvalidConstraint(format!(
                "unknown template id {}",
                self.template
            )));
        }
        Ok(())
    }

    /// The relation this constraint induces over its own variable tuple,
    /// with signs folded in: bit `i` is set iff the value tuple with index
    /// `i` (in the order of `self.vars`) satisfies the constraint.
    pub fn effective_relation(&self, ts: &TemplateSet) -> BitTable {
        let tpl = ts.template(self.template);
        match &self.signs {
            None => tpl.sat.clone(),
            Some(signs) => {
                let len = ts.table_len();
                let mut out = BitTable::zeros(len);
                for idx in 0..len {
                    let mut tuple = index_tuple(idx, ts.t, ts.k);
                    for (d, &s) in tuple.iter_mut().zip(signs) {
                        if s {
                            *d ^= 1;
                        }
                    }
                    out.set(idx, tpl.sat.get(tuple_index(&tuple, ts.t)));
                }
                out
            }
        }
    }
}

/// An instance: a multiset of applied constraints over `n` variables.
/// Duplicates are permitted; variables are 0-indexed and never renumbered,
/// so `Var(f)` may be a strict subset of `[0, n)`.
#[derive(Debug, Clone)]
pub struct Formula {
    pub n: usize,
    pub templates: Arc<TemplateSet>,
    pub constraints: Vec<Constraint>,
}

impl Formula {
    pub fn new(n: usize, templates: Arc<TemplateSet>, constraints: Vec<Constraint>) -> Result<Self> {
        for c in &constraints {
            c.validate(&templates, n)?;
        }
        Ok(Formula {
            n,
            templates,
            constraints,
        })
    }

    pub fn empty(n: usize, templates: Arc<TemplateSet>) -> Self {
        Formula {
            n,
            templates,
            constraints: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn k(&self) -> usize {
        self.templates.k
    }

    pub fn t(&self) -> u8 {
        self.templates.t
    }

    pub fn is_boolean(&self) -> bool {
        self.templates.is_boolean()
    }

    /// Variables occurring in at least one constraint, ascending.
    pub fn var_set(&self) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        for c in &self.constraints {
            for &v in &c.vars {
                seen[v as usize] = true;
            }
        }
        (0..self.n as u32).filter(|&v| seen[v as usize]).collect()
    }

    /// Appends one constraint, returning the extended formula.
    pub fn with_constraint(&self, c: Constraint) -> Result<Formula> {
        c.validate(&self.templates, self.n)?;
        let mut constraints = self.constraints.clone();
        constraints.push(c);
        Ok(Formula {
            n: self.n,
            templates: Arc::clone(&self.templates),
            constraints,
        })
    }

    /// The subformula keeping constraints at the given (sorted or unsorted)
    /// indices.
    pub fn subformula(&self, indices: &[usize]) -> Formula {
        Formula {
            n: self.n,
            templates: Arc::clone(&self.templates),
            constraints: indices.iter().map(|&i| self.constraints[i].clone()).collect(),
        }
    }
}

/// True iff the total assignment `a` satisfies constraint `c`.
///
/// Errors if any variable of `c` is unassigned.
pub fn constraint_satisfied(c: &Constraint, ts: &TemplateSet, a: &Assignment) -> Result<bool> {
    let mut tuple = Vec::with_capacity(ts.k);
    for (i, &v) in c.vars.iter().enumerate() {
        let Some(mut d) = a.get(v) else {
            return Err(Error::ContractViolation(format!(
                "variable {v} of the constraint is unassigned"
            )));
        };
        if let Some(signs) = &c.signs {
            if signs[i] {
                d ^= 1;
            }
        }
        tuple.push(d);
    }
    Ok(ts.template(c.template).sat.get(tuple_index(&tuple, ts.t)))
}

/// Number of constraints of `f` violated by the total assignment `a`.
pub fn count_violated(f: &Formula, a: &Assignment) -> Result<usize> {
    let mut count = 0;
    for c in &f.constraints {
        if !constraint_satisfied(c, &f.templates, a)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Semantic canonical form of an applied constraint: its sorted variable
/// set together with the relation induced over the variables in sorted
/// order (signs folded in). Two applied constraints are the same member of
/// the universe iff their canonical forms agree, which makes the
/// constraint-based fractions well defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalConstraint {
    pub vars: Vec<u32>,
    pub relation: BitTable,
}

pub fn canonicalize(c: &Constraint, ts: &TemplateSet) -> CanonicalConstraint {
    let eff = c.effective_relation(ts);
    let mut order: Vec<usize> = (0..ts.k).collect();
    order.sort_by_key(|&i| c.vars[i]);
    let sorted_vars: Vec<u32> = order.iter().map(|&i| c.vars[i]).collect();
    // relation over sorted vars: tuple u (indexed by sorted order) satisfies
    // iff the corresponding tuple in original order satisfies eff
    let len = ts.table_len();
    let mut rel = BitTable::zeros(len);
    for idx in 0..len {
        let u = index_tuple(idx, ts.t, ts.k);
        let mut orig = vec![0u8; ts.k];
        for (sorted_pos, &orig_pos) in order.iter().enumerate() {
            orig[orig_pos] = u[sorted_pos];
        }
        rel.set(idx, eff.get(tuple_index(&orig, ts.t)));
    }
    CanonicalConstraint {
        vars: sorted_vars,
        relation: rel,
    }
}

/// The set of semantically distinct constraints obtainable by applying the
/// template set to all ordered k-tuples of the n variables.
#[derive(Debug, Clone)]
pub struct ConstraintUniverse {
    pub n: usize,
    pub templates: Arc<TemplateSet>,
    members: Vec<Constraint>,
    canon_index: HashMap<CanonicalConstraint, usize>,
}

impl ConstraintUniverse {
    /// Enumerates the universe deterministically: ordered variable tuples in
    /// lexicographic order, templates in id order, keeping the first
    /// representative of each semantic equivalence class.
    pub fn build(n: usize, templates: Arc<TemplateSet>) -> Result<Self> {
        let k = templates.k;
        if n < k {
            return Err(Error::InvalidUniverse { n, k });
        }
        let mut members = Vec::new();
        let mut canon_index = HashMap::new();
        let mut tuple: Vec<u32> = Vec::with_capacity(k);
        enumerate_tuples(n as u32, k, &mut tuple, &mut |vars| {
            for tpl in &templates.templates {
                let c = Constraint::new(tpl.id, vars.to_vec());
                let canon = canonicalize(&c, &templates);
                if !canon_index.contains_key(&canon) {
                    canon_index.insert(canon, members.len());
                    members.push(c);
                }
            }
        });
        Ok(ConstraintUniverse {
            n,
            templates,
            members,
            canon_index,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Constraint] {
        &self.members
    }

    /// Index of the universe member semantically equal to `c`, if any.
    pub fn index_of(&self, c: &Constraint) -> Option<usize> {
        self.canon_index.get(&canonicalize(c, &self.templates)).copied()
    }
}

fn enumerate_tuples(n: u32, k: usize, tuple: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if tuple.len() == k {
        f(tuple);
        return;
    }
    for v in 0..n {
        if !tuple.contains(&v) {
            tuple.push(v);
            enumerate_tuples(n, k, tuple, f);
            tuple.pop();
        }
    }
}

/// A simple undirected graph: no self-loops, no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::InvalidConstraint(format!("self-loop at vertex {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.0 as usize >= n || e.1 as usize >= n {
                return Err(Error::InvalidConstraint(format!(
                    "edge ({}, {}) out of range",
                    e.0, e.1
                )));
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::InvalidConstraint("duplicate edge".into()));
        }
        Ok(Graph { n, edges })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let e = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search(&e).is_ok()
    }

    /// Connected components over the edges selected by `keep` (all edges if
    /// `None`); returns a vertex -> component id map and component sizes.
    pub fn components(&self, keep: Option<&[bool]>) -> (Vec<usize>, Vec<usize>) {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if keep.map(|k| k[i]).unwrap_or(true) {
                let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let mut comp_of = vec![usize::MAX; self.n];
        let mut sizes = Vec::new();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            if comp_of[r] == usize::MAX {
                comp_of[r] = sizes.len();
                sizes.push(0);
            }
            comp_of[v] = comp_of[r];
            sizes[comp_of[r]] += 1;
        }
        (comp_of, sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause3_template_set() -> Arc<TemplateSet> {
        // 3-SAT clause (x or y or z): everything except (0,0,0)
        let mut sat = BitTable::ones(8);
        sat.set(0, false);
        Arc::new(TemplateSet::new(2, 3, vec![sat]).unwrap())
    }

    #[test]
    fn tuple_index_roundtrip() {
        for t in 2..=4u8 {
            for k in 2..=3usize {
                let len = (t as usize).pow(k as u32);
                for idx in 0..len {
                    let tuple = index_tuple(idx, t, k);
                    assert_eq!(tuple_index(&tuple, t), idx);
                }
            }
        }
        // d_1 is the most significant digit
        assert_eq!(tuple_index(&[1, 0, 1], 2), 5);
        assert_eq!(tuple_index(&[1, 0], 3), 3);
    }

    #[test]
    fn satisfied_full_and_empty_relations() {
        let full = BitTable::ones(4);
        let empty = BitTable::zeros(4);
        let ts = Arc::new(TemplateSet::new(2, 2, vec![full, empty]).unwrap());
        let a = Assignment::from_values(vec![0, 1]);
        let c_full = Constraint::new(0, vec![0, 1]);
        let c_empty = Constraint::new(1, vec![0, 1]);
        assert!(constraint_satisfied(&c_full, &ts, &a).unwrap());
        assert!(!constraint_satisfied(&c_empty, &ts, &a).unwrap());
    }

    #[test]
    fn satisfied_3sat_clause() {
        // enumerated by hand: (x or y or z) fails only on all-zeros
        let ts = clause3_template_set();
        let c = Constraint::new(0, vec![0, 1, 2]);
        let all_zero = Assignment::from_values(vec![0, 0, 0]);
        assert!(!constraint_satisfied(&c, &ts, &all_zero).unwrap());
        let a100 = Assignment::from_values(vec![1, 0, 0]);
        assert!(constraint_satisfied(&c, &ts, &a100).unwrap());
        for bits in 1u64..8 {
            let a = Assignment::from_bits(bits, 3);
            assert!(constraint_satisfied(&c, &ts, &a).unwrap());
        }
    }

    #[test]
    fn unassigned_variable_is_contract_violation() {
        let ts = clause3_template_set();
        let c = Constraint::new(0, vec![0, 1, 2]);
        let mut a = Assignment::unassigned(3);
        a.set(0, 1);
        assert!(matches!(
            constraint_satisfied(&c, &ts, &a),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn signs_flip_values() {
        let ts = clause3_template_set();
        // clause (not x or y or z): fails only on x=1, y=0, z=0
        let c = Constraint::with_signs(0, vec![0, 1, 2], vec![true, false, false]);
        let a = Assignment::from_values(vec![1, 0, 0]);
        assert!(!constraint_satisfied(&c, &ts, &a).unwrap());
        let b = Assignment::from_values(vec![0, 0, 0]);
        assert!(constraint_satisfied(&c, &ts, &b).unwrap());
    }

    #[test]
    fn universe_symmetric_template_collapses() {
        // symmetric 2-ary relation over t=2: "not both ones"
        let mut sat = BitTable::ones(4);
        sat.set(3, false);
        let ts = Arc::new(TemplateSet::new(2, 2, vec![sat]).unwrap());
        let u = ConstraintUniverse::build(4, ts).unwrap();
        assert_eq!(u.len(), 6); // C(4,2)
    }

    #[test]
    fn universe_asymmetric_template_keeps_order() {
        // relation {(0,1)} is not invariant under swapping coordinates
        let mut sat = BitTable::zeros(4);
        sat.set(1, true);
        let ts = Arc::new(TemplateSet::new(2, 2, vec![sat]).unwrap());
        let u = ConstraintUniverse::build(4, ts).unwrap();
        assert_eq!(u.len(), 12); // all ordered pairs
    }

    #[test]
    fn universe_rejects_small_n() {
        let ts = clause3_template_set();
        assert!(matches!(
            ConstraintUniverse::build(2, ts),
            Err(Error::InvalidUniverse { .. })
        ));
    }

    #[test]
    fn dedup_soundness_small() {
        // For any two universe members declared equal (none are, by
        // construction) and for each member vs a permuted syntactic variant:
        // every total assignment satisfies both or neither.
        let ts = clause3_template_set();
        let u = ConstraintUniverse::build(4, Arc::clone(&ts)).unwrap();
        for c in u.members() {
            // permuted application: reverse variable order; same clause
            let rev = Constraint::new(c.template, c.vars.iter().rev().copied().collect());
            let equal = canonicalize(c, &ts) == canonicalize(&rev, &ts);
            for bits in 0..16u64 {
                let a = Assignment::from_bits(bits, 4);
                let s1 = constraint_satisfied(c, &ts, &a).unwrap();
                let s2 = constraint_satisfied(&rev, &ts, &a).unwrap();
                if equal {
                    assert_eq!(s1, s2);
                }
            }
            // the 3-SAT clause is symmetric, so the canonical forms must agree
            assert!(equal);
        }
    }

    #[test]
    fn graph_rejects_loops_and_duplicates() {
        assert!(Graph::new(3, vec![(0, 0)]).is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)]).is_err());
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.m(), 2);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn graph_components() {
        let g = Graph::new(5, vec![(0, 1), (1, 2)]).unwrap();
        let (comp, sizes) = g.components(None);
        assert_eq!(comp[0], comp[2]);
        assert_ne!(comp[0], comp[3]);
        let mut s = sizes.clone();
        s.sort_unstable();
        assert_eq!(s, vec![1, 1, 3]);
    }
}
