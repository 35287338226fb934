//! Exhaustive model enumeration for small formulas.
//!
//! This is a plain chronological backtracking search that shares no code
//! with the CDCL engine, so it can serve as ground truth in tests and in the
//! definitional support checks.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cnf::{Formula, VarSet};

/// Largest formula the enumerator accepts.
pub const MAX_ORACLE_VARS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("formula has {0} variables, enumeration is limited to {MAX_ORACLE_VARS}")]
    TooLarge(u32),
}

struct MaskClause {
    pos: u32,
    neg: u32,
}

/// Every model of `f` as a bitmask, bit `i` holding variable `i + 1`.
/// Models come out in increasing numeric order.
pub fn enumerate_models(f: &Formula) -> Result<Vec<u32>, OracleError> {
    let n = f.num_vars();
    if n > MAX_ORACLE_VARS {
        return Err(OracleError::TooLarge(n));
    }
    if f.has_trivial_conflict() {
        return Ok(Vec::new());
    }
    // Bucket each constraint under its highest variable: it becomes fully
    // assigned exactly when that variable is.
    let mut clauses: Vec<Vec<MaskClause>> = (0..n).map(|_| Vec::new()).collect();
    for c in f.clauses() {
        if c.is_tautology() {
            continue;
        }
        let mut mc = MaskClause { pos: 0, neg: 0 };
        let mut top = 0;
        for l in c {
            let bit = 1u32 << l.var().index();
            if l.is_negated() {
                mc.neg |= bit;
            } else {
                mc.pos |= bit;
            }
            top = top.max(l.var().index());
        }
        clauses[top].push(mc);
    }
    let mut xors: Vec<Vec<(u32, bool)>> = (0..n).map(|_| Vec::new()).collect();
    for x in f.xors() {
        if let Some(top) = x.vars().last() {
            let mask = x.vars().iter().fold(0u32, |m, v| m | 1 << v.index());
            xors[top.index()].push((mask, x.rhs()));
        }
    }

    let mut models = Vec::new();
    if n == 0 {
        models.push(0);
        return Ok(models);
    }
    // Depth-first over variables 1..n, pruning on the first violated
    // constraint.
    let mut stack: Vec<(usize, u32)> = vec![(0, 0), (0, 1)];
    while let Some((depth, bits)) = stack.pop() {
        let ok = clauses[depth]
            .iter()
            .all(|c| bits & c.pos != 0 || !bits & c.neg != 0)
            && xors[depth]
                .iter()
                .all(|&(mask, rhs)| ((bits & mask).count_ones() % 2 == 1) == rhs);
        if !ok {
            continue;
        }
        if depth + 1 == n as usize {
            models.push(bits);
        } else {
            let next = depth + 1;
            stack.push((next, bits | 1 << next));
            stack.push((next, bits));
        }
    }
    models.sort_unstable();
    Ok(models)
}

pub fn mask_of(s: &VarSet) -> u32 {
    s.iter().fold(0u32, |m, v| m | 1 << v.index())
}

/// Number of distinct projections of `models` onto `mask`.
pub fn projected_count(models: &[u32], mask: u32) -> usize {
    let mut proj: Vec<u32> = models.iter().map(|m| m & mask).collect();
    proj.sort_unstable();
    proj.dedup();
    proj.len()
}

/// True if any two models agreeing on `from` also agree on `to`.
pub fn determines(models: &[u32], from: u32, to: u32) -> bool {
    let mut pairs: Vec<(u32, u32)> = models.iter().map(|m| (m & from, m & to)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs.windows(2).all(|w| w[0].0 != w[1].0)
}

/// Exact projected count of `f` onto `s` by enumeration.
pub fn count_projected(f: &Formula, s: &VarSet) -> Result<usize, OracleError> {
    let models = enumerate_models(f)?;
    Ok(projected_count(&models, mask_of(s)))
}
