//! Tree-resolution proof objects and an independent step-by-step checker.

use crate::error::{Error, Result};
use crate::solver::{Clause, CnfFormula, Lit};

/// How a proof clause was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Clause `origin` of the input CNF.
    Axiom { origin: usize },
    /// Resolvent of steps `left` and `right` on `pivot`; `left` contains the
    /// positive pivot literal and `right` the negative one.
    Resolve { left: usize, right: usize, pivot: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub clause: Clause,
    pub justification: Justification,
}

/// A resolution derivation; a refutation ends in the empty clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionProof {
    pub steps: Vec<ProofStep>,
}

impl ResolutionProof {
    /// Number of steps.
    pub fn size(&self) -> usize {
        self.steps.len()
    }

    /// Maximum number of literals in any clause appearing in the proof.
    pub fn width(&self) -> usize {
        self.steps.iter().map(|s| s.clause.len()).max().unwrap_or(0)
    }

    pub fn final_clause(&self) -> Option<&Clause> {
        self.steps.last().map(|s| &s.clause)
    }

    pub fn is_refutation(&self) -> bool {
        self.final_clause().map(|c| c.is_empty()).unwrap_or(false)
    }
}

/// Verifies a resolution refutation against its input CNF: every axiom is a
/// clause of the CNF, every resolvent is formed correctly from earlier
/// steps, no stored clause is tautological, and the final clause is empty.
pub fn check_refutation(cnf: &CnfFormula, proof: &ResolutionProof) -> Result<()> {
    if proof.steps.is_empty() {
        return Err(Error::InvalidProof {
            step: 0,
            reason: "empty proof".into(),
        });
    }
    for (i, step) in proof.steps.iter().enumerate() {
        step.clause.validate().map_err(|e| Error::InvalidProof {
            step: i,
            reason: format!("malformed clause: {e}"),
        })?;
        match &step.justification {
            Justification::Axiom { origin } => {
                let Some(src) = cnf.clauses.get(*origin) else {
                    return Err(Error::InvalidProof {
                        step: i,
                        reason: format!("axiom origin {origin} out of range"),
                    });
                };
                if src != &step.clause {
                    return Err(Error::InvalidProof {
                        step: i,
                        reason: format!("axiom does not match CNF clause {origin}"),
                    });
                }
            }
            Justification::Resolve { left, right, pivot } => {
                if *left >= i || *right >= i {
                    return Err(Error::InvalidProof {
                        step: i,
                        reason: "resolvent inputs must precede it".into(),
                    });
                }
                let lc = &proof.steps[*left].clause;
                let rc = &proof.steps[*right].clause;
                let pos = Lit::new(*pivot, false);
                let neg = Lit::new(*pivot, true);
                if !lc.contains(pos) || !rc.contains(neg) {
                    return Err(Error::InvalidProof {
                        step: i,
                        reason: "inputs do not contain the pivot with opposite polarities".into(),
                    });
                }
                let mut lits: Vec<Lit> = lc
                    .lits()
                    .iter()
                    .copied()
                    .filter(|&l| l != pos)
                    .chain(rc.lits().iter().copied().filter(|&l| l != neg))
                    .collect();
                lits.sort_unstable();
                lits.dedup();
                let expected = Clause::new(lits).map_err(|e| Error::InvalidProof {
                    step: i,
                    reason: format!("resolvent is tautological: {e}"),
                })?;
                if expected != step.clause {
                    return Err(Error::InvalidProof {
                        step: i,
                        reason: "stored clause is not the resolvent of its inputs".into(),
                    });
                }
            }
        }
    }
    if !proof.is_refutation() {
        return Err(Error::InvalidProof {
            step: proof.steps.len() - 1,
            reason: "final clause is not empty".into(),
        });
    }
    Ok(())
}

/// Size and width of a checked proof.
pub fn proof_metrics(cnf: &CnfFormula, proof: &ResolutionProof) -> Result<(usize, usize)> {
    check_refutation(cnf, proof)?;
    Ok((proof.size(), proof.width()))
}
