//! Enumeration of all minimal correction sets (MCS) of a monotone
//! infeasible instance, and hence of all maximal satisfiable subsets (MSS).
//!
//! Works over any ground set of removable items (constraints of a formula,
//! edges of a graph) with a removal oracle: removing more items never makes
//! a satisfiable instance unsatisfiable. The enumeration walks a hitting
//! tree: an unsatisfiable node branches on the items of one minimal
//! unsatisfiable subset of its residual (every correction set must hit it);
//! a satisfiable node is kept iff minimal. Extracted minimal unsatisfiable
//! subsets are cached and reused across nodes.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

/// Satisfiability oracle over a ground set with removals. Must be monotone:
/// `is_sat_without(R)` and `R ⊆ R'` imply `is_sat_without(R')`.
pub trait RemovalOracle {
    fn num_items(&self) -> usize;
    /// Satisfiability with the (sorted, distinct) items removed. Errors are
    /// budget refusals.
    fn is_sat_without(&mut self, removed: &[u16]) -> Result<bool>;
}

/// Simple shared call budget for removal oracles.
#[derive(Debug, Clone)]
pub struct CallBudget {
    pub calls: u64,
    pub max_calls: u64,
    pub what: &'static str,
}

impl CallBudget {
    pub fn new(max_calls: u64, what: &'static str) -> Self {
        CallBudget {
            calls: 0,
            max_calls,
            what,
        }
    }

    pub fn tick(&mut self) -> Result<()> {
        self.calls += 1;
        if self.calls > self.max_calls {
            Err(Error::BudgetExceeded(format!(
                "{}: more than {} oracle calls",
                self.what, self.max_calls
            )))
        } else {
            Ok(())
        }
    }
}

fn query(
    oracle: &mut impl RemovalOracle,
    memo: &mut HashMap<Vec<u16>, bool>,
    r: &[u16],
) -> Result<bool> {
    if let Some(&v) = memo.get(r) {
        return Ok(v);
    }
    let v = oracle.is_sat_without(r)?;
    memo.insert(r.to_vec(), v);
    Ok(v)
}

/// All minimal correction sets of the instance, as sorted item lists. For a
/// satisfiable instance this is `[[]]`: nothing needs removing and the only
/// maximal satisfiable subset is the full instance.
pub fn enumerate_mcs(oracle: &mut impl RemovalOracle) -> Result<Vec<Vec<u16>>> {
    let mut result = Vec::new();
    enumerate_mcs_with(oracle, |_, mcs| {
        result.push(mcs.to_vec());
        Ok(true)
    })?;
    result.sort();
    Ok(result)
}

/// Visitor-driven enumeration of minimal correction sets in breadth-first
/// (smallest-first) order. The visitor gets the oracle back for its own
/// queries and returns `false` to stop early, which upper layers use once
/// an accumulating certificate has settled their question.
pub fn enumerate_mcs_with<O: RemovalOracle>(
    oracle: &mut O,
    mut visit: impl FnMut(&mut O, &[u16]) -> Result<bool>,
) -> Result<()> {
    let mut sat_memo: HashMap<Vec<u16>, bool> = HashMap::new();

    if query(oracle, &mut sat_memo, &[])? {
        visit(oracle, &[])?;
        return Ok(());
    }

    let mut muses: Vec<Vec<u16>> = Vec::new();
    let mut visited: HashSet<Vec<u16>> = HashSet::new();
    let mut queue: VecDeque<Vec<u16>> = VecDeque::new();
    queue.push_back(Vec::new());

    while let Some(r) = queue.pop_front() {
        if !visited.insert(r.clone()) {
            continue;
        }
        if query(oracle, &mut sat_memo, &r)? {
            // minimal iff every single put-back breaks satisfiability
            let mut minimal = true;
            for i in 0..r.len() {
                let mut sub = r.clone();
                sub.remove(i);
                if query(oracle, &mut sat_memo, &sub)? {
                    minimal = false;
                    break;
                }
            }
            if minimal && !visit(oracle, &r)? {
                return Ok(());
            }
            continue;
        }
        // unsatisfiable: branch on a minimal unsatisfiable subset of the
        // residual; any cached one disjoint from the removal set works
        let mus = match muses.iter().find(|m| m.iter().all(|i| !r.contains(i))) {
            Some(m) => m.clone(),
            None => {
                let m = extract_mus(oracle, &mut sat_memo, &r)?;
                muses.push(m.clone());
                m
            }
        };
        for &item in &mus {
            let mut child = r.clone();
            let pos = child.binary_search(&item).unwrap_err();
            child.insert(pos, item);
            if !visited.contains(&child) {
                queue.push_back(child);
            }
        }
    }
    Ok(())
}

/// Deletion-based minimal unsatisfiable subset over a removal oracle,
/// usable on its own for certificate work.
pub fn oracle_mus(oracle: &mut impl RemovalOracle) -> Result<Vec<u16>> {
    let mut memo = HashMap::new();
    extract_mus(oracle, &mut memo, &[])
}

/// Deletion-based minimal unsatisfiable subset of the residual after
/// removing `base`, scanning items in ascending order.
fn extract_mus(
    oracle: &mut impl RemovalOracle,
    memo: &mut HashMap<Vec<u16>, bool>,
    base: &[u16],
) -> Result<Vec<u16>> {
    let n = oracle.num_items();
    let mut removed: Vec<u16> = base.to_vec();
    let mut kept: Vec<u16> = (0..n as u16).filter(|i| !base.contains(i)).collect();
    let mut idx = 0;
    while idx < kept.len() {
        let item = kept[idx];
        let mut trial = removed.clone();
        let pos = trial.binary_search(&item).unwrap_err();
        trial.insert(pos, item);
        let sat = match memo.get(&trial) {
            Some(&v) => v,
            None => {
                let v = oracle.is_sat_without(&trial)?;
                memo.insert(trial.clone(), v);
                v
            }
        };
        if !sat {
            removed = trial;
            kept.remove(idx);
        } else {
            idx += 1;
        }
    }
    Ok(kept)
}

/// Complements of the minimal correction sets: the maximal satisfiable
/// subsets, as sorted kept-item lists.
pub fn mss_from_mcs(num_items: usize, mcses: &[Vec<u16>]) -> Vec<Vec<u16>> {
    mcses
        .iter()
        .map(|mcs| (0..num_items as u16).filter(|i| !mcs.contains(i)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toy oracle: items are clauses over a tiny assignment space given as
    /// bitmasks of satisfying assignments; conjunction = intersection.
    struct MaskOracle {
        sat_masks: Vec<u64>,
    }

    impl RemovalOracle for MaskOracle {
        fn num_items(&self) -> usize {
            self.sat_masks.len()
        }
        fn is_sat_without(&mut self, removed: &[u16]) -> Result<bool> {
            let mut acc = u64::MAX;
            for (i, &m) in self.sat_masks.iter().enumerate() {
                if removed.binary_search(&(i as u16)).is_err() {
                    acc &= m;
                }
            }
            Ok(acc != 0)
        }
    }

    #[test]
    fn satisfiable_has_empty_mcs() {
        let mut o = MaskOracle {
            sat_masks: vec![0b1100, 0b0110],
        };
        assert_eq!(enumerate_mcs(&mut o).unwrap(), vec![Vec::<u16>::new()]);
    }

    #[test]
    fn two_disjoint_contradictions() {
        // items 0,1 contradict each other; items 2,3 contradict each other.
        // assignments: bit = (x,y) in {00,01,10,11}; item0: x=1, item1: x=0,
        // item2: y=1, item3: y=0
        let x1 = 0b1100u64; // assignments 2,3
        let x0 = 0b0011u64;
        let y1 = 0b1010u64; // assignments 1,3
        let y0 = 0b0101u64;
        let mut o = MaskOracle {
            sat_masks: vec![x1, x0, y1, y0],
        };
        let mcses = enumerate_mcs(&mut o).unwrap();
        // must remove one of {0,1} and one of {2,3}
        let expected: Vec<Vec<u16>> = vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]];
        assert_eq!(mcses, expected);
        let msses = mss_from_mcs(4, &mcses);
        assert!(msses.contains(&vec![1, 3]));
    }

    #[test]
    fn single_contradictory_item() {
        let mut o = MaskOracle {
            sat_masks: vec![0b1111, 0, 0b1111],
        };
        assert_eq!(enumerate_mcs(&mut o).unwrap(), vec![vec![1]]);
    }
}
