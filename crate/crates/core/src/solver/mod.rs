//! Exact decision and optimization over formulas, CNF conversion, DPLL
//! refutation with tree-resolution extraction, and proof size/width
//! measurement.
//!
//! The refutation machinery is boolean-only; non-boolean instances go
//! through the generic backtracking paths of [`decide`] and [`opt`].

mod engine;
mod proof;
mod refute;

pub use engine::{enc, enc_var, EncLit, EngineResult, SatEngine};
pub use proof::{check_refutation, proof_metrics, Justification, ProofStep, ResolutionProof};
pub use refute::{dpll_refute, refute_via_mus, BranchPolicy, DpllTrace, MusRefutation, RefuteOutcome};

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{
    constraint_satisfied, count_violated, index_tuple, Assignment, Formula,
};

/// A literal: variable with polarity (`neg = true` is the negated form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: u32,
    pub neg: bool,
}

impl Lit {
    pub fn new(var: u32, neg: bool) -> Self {
        Lit { var, neg }
    }
}

impl std::fmt::Display for Lit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.neg {
            write!(f, "-{}", self.var + 1)
        } else {
            write!(f, "{}", self.var + 1)
        }
    }
}

/// A non-tautological clause: sorted literal set, at most one polarity per
/// variable. The empty clause is the contradictory clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Result<Self> {
        lits.sort_unstable();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0].var == w[1].var {
                return Err(Error::InvalidConstraint(format!(
                    "variable {} appears with both polarities (tautology)",
                    w[0].var
                )));
            }
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.lits.binary_search(&l).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.lits.windows(2) {
            if w[0].var == w[1].var && w[0] != w[1] {
                return Err(Error::InvalidConstraint("tautological clause".into()));
            }
            if w[0] >= w[1] {
                return Err(Error::InvalidConstraint("unsorted clause".into()));
            }
        }
        Ok(())
    }

    /// True iff the total assignment satisfies the clause.
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.lits
            .iter()
            .any(|l| a.get(l.var).map(|v| (v == 1) != l.neg).unwrap_or(false))
    }
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "[]");
        }
        let parts: Vec<String> = self.lits.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// CNF expansion of a boolean formula, with an origin map from each clause
/// back to the constraint that produced it.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<Clause>,
    pub origin: Vec<usize>,
}

impl CnfFormula {
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(a))
    }
}

/// Canonical maxterm CNF: per constraint, one clause per falsifying value
/// tuple of its effective relation. An assignment satisfies the constraint
/// iff it satisfies all its clauses. Boolean domains only.
pub fn to_cnf(f: &Formula) -> Result<CnfFormula> {
    if !f.is_boolean() {
        return Err(Error::NonBooleanDomain(f.t()));
    }
    let k = f.k();
    let mut clauses = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in f.constraints.iter().enumerate() {
        let eff = c.effective_relation(&f.templates);
        for idx in 0..eff.len() {
            if !eff.get(idx) {
                let tuple = index_tuple(idx, 2, k);
                let lits = (0..k)
                    .map(|j| Lit::new(c.vars[j], tuple[j] == 1))
                    .collect::<Vec<_>>();
                clauses.push(Clause::new(lits)?);
                origin.push(i);
            }
        }
    }
    Ok(CnfFormula {
        n: f.n,
        clauses,
        origin,
    })
}

/// Outcome of an exact decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Sat(Assignment),
    Unsat,
}

impl Decision {
    pub fn is_sat(&self) -> bool {
        matches!(self, Decision::Sat(_))
    }
}

/// Exact satisfiability of a formula; the witness satisfies every
/// constraint.
pub fn decide(f: &Formula) -> Result<Decision> {
    if f.is_boolean() {
        let cnf = to_cnf(f)?;
        let mut eng = SatEngine::from_cnf(&cnf);
        match eng.solve() {
            EngineResult::Sat(model) => Ok(Decision::Sat(Assignment::from_values(
                model.into_iter().map(|b| b as u8).collect(),
            ))),
            EngineResult::Unsat => Ok(Decision::Unsat),
        }
    } else {
        Ok(match csp_backtrack(f) {
            Some(a) => Decision::Sat(a),
            None => Decision::Unsat,
        })
    }
}

/// Generic CSP backtracking with per-constraint consistency lookahead.
fn csp_backtrack(f: &Formula) -> Option<Assignment> {
    let t = f.t();
    let mut a = Assignment::unassigned(f.n);
    // constraints touching each variable
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); f.n];
    for (i, c) in f.constraints.iter().enumerate() {
        for &v in &c.vars {
            touching[v as usize].push(i);
        }
    }
    let relations: Vec<_> = f
        .constraints
        .iter()
        .map(|c| c.effective_relation(&f.templates))
        .collect();

    // a constraint is consistent if some satisfying tuple matches the
    // assigned prefix of its variables
    let consistent = |a: &Assignment, ci: usize| -> bool {
        let c = &f.constraints[ci];
        relations[ci].iter_ones().any(|idx| {
            let tuple = index_tuple(idx, t, f.k());
            c.vars
                .iter()
                .zip(&tuple)
                .all(|(&v, &d)| a.get(v).map(|av| av == d).unwrap_or(true))
        })
    };

    fn go(
        f: &Formula,
        t: u8,
        a: &mut Assignment,
        var: usize,
        touching: &[Vec<usize>],
        consistent: &impl Fn(&Assignment, usize) -> bool,
    ) -> bool {
        if var == f.n {
            return true;
        }
        for d in 0..t {
            a.set(var as u32, d);
            if touching[var].iter().all(|&ci| consistent(a, ci))
                && go(f, t, a, var + 1, touching, consistent)
            {
                return true;
            }
        }
        a.clear(var as u32);
        false
    }

    for ci in 0..f.m() {
        if !consistent(&a, ci) {
            return None;
        }
    }
    if go(f, t, &mut a, 0, &touching, &consistent) {
        Some(a)
    } else {
        None
    }
}

/// Result of an exact optimization run.
#[derive(Debug, Clone)]
pub struct OptResult {
    /// Minimum number of violated constraints over all total assignments.
    pub value: usize,
    pub witness: Assignment,
    /// Some assignments achieving `value` (always contains the witness;
    /// possibly incomplete; used as a sound pruning aid).
    pub pool: Vec<Assignment>,
}

/// Minimum violated-constraint count by branch and bound; the bound is the
/// number of already-violated constraints. Exhaustive below n = 20 or so;
/// callers guard larger inputs.
pub fn opt(f: &Formula) -> Result<OptResult> {
    opt_with_pool(f, 1)
}

/// As [`opt`] but collecting up to `pool_cap` optimal assignments.
pub fn opt_with_pool(f: &Formula, pool_cap: usize) -> Result<OptResult> {
    let t = f.t();
    let n = f.n;
    // constraints become checkable once their largest variable is assigned
    let mut complete_at: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for (i, c) in f.constraints.iter().enumerate() {
        let last = c.vars.iter().copied().max().unwrap() as usize;
        complete_at[last].push(i);
    }

    struct Bb<'a> {
        f: &'a Formula,
        t: u8,
        complete_at: &'a [Vec<usize>],
        best: usize,
        best_witness: Option<Assignment>,
        pool: Vec<Assignment>,
        pool_cap: usize,
    }

    impl Bb<'_> {
        fn go(&mut self, a: &mut Assignment, var: usize, violated: usize) -> Result<()> {
            if violated > self.best {
                return Ok(());
            }
            // ties are only worth exploring while the pool has capacity
            if violated == self.best && self.best_witness.is_some() && self.pool.len() >= self.pool_cap
            {
                return Ok(());
            }
            if var == self.f.n {
                if violated < self.best || self.best_witness.is_none() {
                    self.best = violated;
                    self.best_witness = Some(a.clone());
                    self.pool.clear();
                    self.pool.push(a.clone());
                } else if violated == self.best && self.pool.len() < self.pool_cap {
                    self.pool.push(a.clone());
                }
                return Ok(());
            }
            for d in 0..self.t {
                a.set(var as u32, d);
                let mut extra = 0;
                for &ci in &self.complete_at[var] {
                    if !constraint_satisfied(&self.f.constraints[ci], &self.f.templates, a)? {
                        extra += 1;
                    }
                }
                self.go(a, var + 1, violated + extra)?;
            }
            a.clear(var as u32);
            Ok(())
        }
    }

    if n == 0 {
        let a = Assignment::from_values(vec![]);
        let value = count_violated(f, &a)?;
        return Ok(OptResult {
            value,
            witness: a.clone(),
            pool: vec![a],
        });
    }

    let mut bb = Bb {
        f,
        t,
        complete_at: &complete_at,
        best: f.m() + 1,
        best_witness: None,
        pool: Vec::new(),
        pool_cap: pool_cap.max(1),
    };
    let mut a = Assignment::unassigned(n);
    bb.go(&mut a, 0, 0)?;
    let witness = bb.best_witness.expect("some assignment exists");
    Ok(OptResult {
        value: bb.best,
        witness,
        pool: bb.pool,
    })
}

/// Finds a total assignment violating at most `cap` constraints, if one
/// exists. Backbone candidate tests only need this decision, which prunes
/// far earlier than a full [`opt`] run.
pub fn opt_exists_at_most(f: &Formula, cap: usize) -> Result<Option<Assignment>> {
    let t = f.t();
    let n = f.n;
    if n == 0 {
        let a = Assignment::from_values(vec![]);
        let v = count_violated(f, &a)?;
        return Ok(if v <= cap { Some(a) } else { None });
    }
    let mut complete_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in f.constraints.iter().enumerate() {
        let last = c.vars.iter().copied().max().unwrap() as usize;
        complete_at[last].push(i);
    }
    fn go(
        f: &Formula,
        t: u8,
        complete_at: &[Vec<usize>],
        cap: usize,
        a: &mut Assignment,
        var: usize,
        violated: usize,
    ) -> Result<bool> {
        if violated > cap {
            return Ok(false);
        }
        if var == f.n {
            return Ok(true);
        }
        for d in 0..t {
            a.set(var as u32, d);
            let mut extra = 0;
            for &ci in &complete_at[var] {
                if !constraint_satisfied(&f.constraints[ci], &f.templates, a)? {
                    extra += 1;
                }
            }
            if go(f, t, complete_at, cap, a, var + 1, violated + extra)? {
                return Ok(true);
            }
        }
        a.clear(var as u32);
        Ok(false)
    }
    let mut a = Assignment::unassigned(n);
    if go(f, t, &complete_at, cap, &mut a, 0, 0)? {
        for v in 0..n {
            if a.get(v as u32).is_none() {
                a.set(v as u32, 0);
            }
        }
        Ok(Some(a))
    } else {
        Ok(None)
    }
}

/// DIMACS cnf export: `p cnf <n> <#clauses>`, one clause per line,
/// 1-indexed signed literals, `0` terminator.
pub fn write_dimacs(cnf: &CnfFormula, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "p cnf {} {}", cnf.n, cnf.clauses.len())?;
    for c in &cnf.clauses {
        for l in c.lits() {
            write!(w, "{} ", l)?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{named_family, NamedFamily};
    use crate::model::{BitTable, Constraint, TemplateSet};
    use std::sync::Arc;

    pub(crate) fn xor_pair_formula() -> Formula {
        // {x xor y xor z = 0, x xor y xor z = 1} on the same triple
        let even = named_family(NamedFamily::KXorSat, 3).unwrap().templates[0].sat.clone();
        let mut odd = BitTable::zeros(8);
        for i in 0..8 {
            odd.set(i, !even.get(i));
        }
        let ts = Arc::new(TemplateSet::new(2, 3, vec![even, odd]).unwrap());
        Formula::new(
            3,
            ts,
            vec![Constraint::new(0, vec![0, 1, 2]), Constraint::new(1, vec![0, 1, 2])],
        )
        .unwrap()
    }

    #[test]
    fn to_cnf_shapes() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(3, ksat, vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        let cnf = to_cnf(&f).unwrap();
        assert_eq!(cnf.clauses.len(), 1);
        assert_eq!(cnf.clauses[0].len(), 3);

        let xor = Arc::new(named_family(NamedFamily::KXorSat, 3).unwrap());
        let f = Formula::new(3, xor, vec![Constraint::new(0, vec![0, 1, 2])]).unwrap();
        let cnf = to_cnf(&f).unwrap();
        assert_eq!(cnf.clauses.len(), 4);
        assert!(cnf.clauses.iter().all(|c| c.len() == 3));

        let taut = Arc::new(TemplateSet::new(2, 2, vec![BitTable::ones(4)]).unwrap());
        let f = Formula::new(2, taut, vec![Constraint::new(0, vec![0, 1])]).unwrap();
        assert_eq!(to_cnf(&f).unwrap().clauses.len(), 0);
    }

    #[test]
    fn decide_basics() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let empty = Formula::empty(4, Arc::clone(&ksat));
        assert!(decide(&empty).unwrap().is_sat());

        let contradictory = Arc::new(TemplateSet::new(2, 2, vec![BitTable::zeros(4)]).unwrap());
        let f = Formula::new(2, contradictory, vec![Constraint::new(0, vec![0, 1])]).unwrap();
        assert!(!decide(&f).unwrap().is_sat());

        assert!(!decide(&xor_pair_formula()).unwrap().is_sat());
    }

    #[test]
    fn decide_witness_verifies() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(
            5,
            ksat,
            vec![
                Constraint::with_signs(0, vec![0, 1, 2], vec![true, true, true]),
                Constraint::new(0, vec![2, 3, 4]),
                Constraint::with_signs(0, vec![0, 3, 4], vec![false, true, false]),
            ],
        )
        .unwrap();
        match decide(&f).unwrap() {
            Decision::Sat(a) => assert_eq!(count_violated(&f, &a).unwrap(), 0),
            Decision::Unsat => panic!("should be satisfiable"),
        }
    }

    #[test]
    fn opt_basics() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let empty = Formula::empty(3, ksat);
        assert_eq!(opt(&empty).unwrap().value, 0);
        let r = opt(&xor_pair_formula()).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(count_violated(&xor_pair_formula(), &r.witness).unwrap(), 1);
    }

    #[test]
    fn opt_matches_exhaustive_on_random_3sat() {
        use crate::gen::{gen_sat_neg, GenModel, GenSpec};
        let ts = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let spec = GenSpec::new(GenModel::SatNeg, 10, 60, ts, 42);
        let f = gen_sat_neg(&spec).unwrap();
        let r = opt(&f).unwrap();
        let mut best = usize::MAX;
        for bits in 0u64..(1 << 10) {
            let a = Assignment::from_bits(bits, 10);
            best = best.min(count_violated(&f, &a).unwrap());
        }
        assert_eq!(r.value, best);
    }

    #[test]
    fn decide_non_boolean_domain() {
        // t = 3, binary disequality constraints: a 3-coloring style instance
        let mut neq = BitTable::ones(9);
        for d in 0..3u8 {
            neq.set(crate::model::tuple_index(&[d, d], 3), false);
        }
        let ts = Arc::new(TemplateSet::new(3, 2, vec![neq]).unwrap());
        // triangle: colorable with 3 colors
        let tri = Formula::new(
            3,
            Arc::clone(&ts),
            vec![
                Constraint::new(0, vec![0, 1]),
                Constraint::new(0, vec![1, 2]),
                Constraint::new(0, vec![0, 2]),
            ],
        )
        .unwrap();
        assert!(decide(&tri).unwrap().is_sat());
        // K4: not 3-colorable
        let k4 = Formula::new(
            4,
            ts,
            vec![
                Constraint::new(0, vec![0, 1]),
                Constraint::new(0, vec![0, 2]),
                Constraint::new(0, vec![0, 3]),
                Constraint::new(0, vec![1, 2]),
                Constraint::new(0, vec![1, 3]),
                Constraint::new(0, vec![2, 3]),
            ],
        )
        .unwrap();
        assert!(!decide(&k4).unwrap().is_sat());
        assert_eq!(opt(&k4).unwrap().value, 1);
    }

    #[test]
    fn dimacs_format() {
        let ksat = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let f = Formula::new(
            4,
            ksat,
            vec![Constraint::with_signs(0, vec![0, 2, 3], vec![false, true, false])],
        )
        .unwrap();
        let cnf = to_cnf(&f).unwrap();
        let mut out = Vec::new();
        write_dimacs(&cnf, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "p cnf 4 1\n1 -3 4 0\n");
    }
}
