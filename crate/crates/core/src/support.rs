//! Upper bound supports and independent supports.
//!
//! A set `S` is an upper bound support (UBS) of a projection set `P` in `φ`
//! when any two models agreeing on `S` also agree on `P`; counting models
//! projected on a UBS therefore over-approximates the projected count on
//! `P`. An independent support (IS) is a UBS contained in `P`.
//!
//! [`find_ubs`] shrinks the full support one candidate at a time. The
//! variables are split into `J` (kept), `Q` (undecided) and `D` (dropped);
//! `J ∪ Q` is a UBS throughout. A candidate `z` is dropped when the
//! two-copy query built by [`build_xi`] is unsatisfiable, i.e. when fixing
//! `J ∪ Q \ {z}` already pins every projection variable in `D ∪ {z}`.
//! [`find_is`] is the classical Padoa-style greedy elimination restricted
//! to `P`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::cnf::{rename_apart, Formula, Lit, ProjectionSet, Var, VarSet};
use crate::deadline::Deadline;
use crate::oracle::{determines, enumerate_models, mask_of, OracleError};
use crate::sat::{solve, SolverConfig, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupportError {
    #[error("variable {var} exceeds the formula's {num_vars} variables")]
    VarOutOfRange { var: u32, num_vars: u32 },
    #[error("variable {0} is not in the candidate set")]
    NotInSet(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportKind {
    /// Independent support, a subset of the projection set.
    Independent,
    /// Upper bound support, any subset of the formula's variables.
    UpperBound,
}

impl SupportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SupportKind::Independent => "IS",
            SupportKind::UpperBound => "UBS",
        }
    }
}

/// Outcome of the definability check for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateVerdict {
    Kept,
    Dropped,
    /// The solver ran out of conflicts; the variable was kept to stay sound.
    BudgetKept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VerdictEntry {
    pub var: Var,
    pub verdict: CandidateVerdict,
    /// False when the check was decided without calling the solver.
    pub solver_called: bool,
    pub conflicts: u64,
}

/// A computed support together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    pub vars: VarSet,
    pub kind: SupportKind,
    /// Every candidate was decided by a complete solver verdict, so no
    /// single variable can be removed.
    pub minimal: bool,
    /// The deadline fired before all candidates were processed.
    pub timed_out: bool,
    pub log: Vec<VerdictEntry>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Order in which `find_ubs` considers candidates for removal.
///
/// Candidates processed early are the ones most likely to be dropped, so
/// the order decides which variables end up forming the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VarOrderStrategy {
    /// Favour non-projection variables in the result: projection variables
    /// are tried for removal first, non-projection ones last. Rarest first
    /// within each group, ties by index.
    #[default]
    NonProjectionFirst,
    /// Non-projection variables are tried first; they are always removable
    /// at that point, which confines the result to the projection set and
    /// makes it an independent support.
    ProjectionOnly,
    /// Ascending variable index.
    IndexOrder,
    /// Ascending occurrence count, ties by index.
    OccurrenceAscending,
}

impl VarOrderStrategy {
    pub const ALL: [VarOrderStrategy; 4] = [
        VarOrderStrategy::NonProjectionFirst,
        VarOrderStrategy::ProjectionOnly,
        VarOrderStrategy::IndexOrder,
        VarOrderStrategy::OccurrenceAscending,
    ];

    /// The full processing order over `candidates`.
    pub fn order(self, f: &Formula, p: &ProjectionSet, candidates: &VarSet) -> Vec<Var> {
        let occ = f.occurrences();
        let occ_of = |v: Var| occ.get(v.index()).copied().unwrap_or(0);
        let mut vars: Vec<Var> = candidates.iter().collect();
        match self {
            VarOrderStrategy::IndexOrder => {}
            VarOrderStrategy::OccurrenceAscending => vars.sort_by_key(|&v| (occ_of(v), v)),
            VarOrderStrategy::NonProjectionFirst => {
                vars.sort_by_key(|&v| (!p.contains(v), occ_of(v), v))
            }
            VarOrderStrategy::ProjectionOnly => {
                vars.sort_by_key(|&v| (p.contains(v), occ_of(v), v))
            }
        }
        vars
    }
}

/// State of the `find_ubs` loop, reported before each candidate is decided
/// and once after the last one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopSnapshot<'a> {
    pub kept: &'a VarSet,
    pub undecided: &'a VarSet,
    pub dropped: &'a VarSet,
}

fn check_range(f: &Formula, s: &VarSet) -> Result<(), SupportError> {
    match s.max() {
        Some(v) if v.id() > f.num_vars() => Err(SupportError::VarOutOfRange {
            var: v.id(),
            num_vars: f.num_vars(),
        }),
        _ => Ok(()),
    }
}

/// A formula that is unsatisfiable by construction: one empty clause.
pub fn unsat_marker(num_vars: u32) -> Formula {
    let mut f = Formula::new(num_vars);
    f.add_clause(core::iter::empty()).expect("empty clause");
    f
}

/// Builds the drop check for candidate `z`.
///
/// The result is `φ ∧ φ' ∧ ⋁ (x ≠ x')` over `x ∈ P ∩ (D ∪ {z})`, where `φ'`
/// renames exactly the variables outside `kept ∪ undecided` (so `D`, `z`
/// and anything outside the partition) apart. Each disjunct gets a selector
/// `s → (x ≠ x')` and one clause requires some selector. The query is
/// unsatisfiable iff `kept ∪ undecided` is still a UBS without `z`.
///
/// If `P ∩ (D ∪ {z})` is empty the disjunction is empty and
/// [`unsat_marker`] is returned.
pub fn build_xi(
    f: &Formula,
    p: &ProjectionSet,
    kept: &VarSet,
    undecided: &VarSet,
    dropped: &VarSet,
    z: Var,
) -> Formula {
    let mut differ: VarSet = p.intersection(dropped);
    if p.contains(z) {
        differ.insert(z);
    }
    if differ.is_empty() {
        return unsat_marker(f.num_vars());
    }
    let shared = kept.union(undecided);
    let (copy, renaming) = rename_apart(f, f.num_vars(), &shared);
    let mut xi = f.clone();
    xi.append(&copy);
    let mut selectors = Vec::with_capacity(differ.len());
    for x in differ.iter() {
        let primed = renaming[&x];
        let sel = xi.new_var();
        xi.add_clause([sel.neg(), x.pos(), primed.pos()])
            .expect("fresh selector");
        xi.add_clause([sel.neg(), x.neg(), primed.neg()])
            .expect("fresh selector");
        selectors.push(sel.pos());
    }
    xi.add_clause(selectors).expect("fresh selectors");
    xi
}

/// Computes an upper bound support of `p` in `f`.
///
/// Candidates are the variables occurring in `f` plus every projection
/// variable (an unused projection variable is free and must stay). A
/// budget-exhausted check keeps the candidate and clears `minimal`. When
/// `deadline` fires, the current `J ∪ Q` is returned with `timed_out` set.
pub fn find_ubs(
    f: &Formula,
    p: &ProjectionSet,
    strategy: VarOrderStrategy,
    cfg: &SolverConfig,
    deadline: &dyn Deadline,
) -> Result<SupportSet, SupportError> {
    find_ubs_observed(f, p, strategy, cfg, deadline, &mut |_| {})
}

/// [`find_ubs`] with a callback that sees every loop state.
pub fn find_ubs_observed(
    f: &Formula,
    p: &ProjectionSet,
    strategy: VarOrderStrategy,
    cfg: &SolverConfig,
    deadline: &dyn Deadline,
    observer: &mut dyn FnMut(&LoopSnapshot<'_>),
) -> Result<SupportSet, SupportError> {
    check_range(f, p)?;
    let mut kept = VarSet::new();
    let mut undecided = f.support().union(p);
    let mut dropped = VarSet::new();
    let mut log = Vec::with_capacity(undecided.len());
    let mut minimal = true;

    for z in strategy.order(f, p, &undecided) {
        observer(&LoopSnapshot {
            kept: &kept,
            undecided: &undecided,
            dropped: &dropped,
        });
        if deadline.expired() {
            return Ok(SupportSet {
                vars: kept.union(&undecided),
                kind: SupportKind::UpperBound,
                minimal: false,
                timed_out: true,
                log,
            });
        }
        undecided.remove(z);
        let xi = build_xi(f, p, &kept, &undecided, &dropped, z);
        let entry = if xi.has_trivial_conflict() {
            VerdictEntry {
                var: z,
                verdict: CandidateVerdict::Dropped,
                solver_called: false,
                conflicts: 0,
            }
        } else {
            let out = solve(&xi, &[], cfg);
            let verdict = match out.verdict {
                Verdict::Unsatisfiable => CandidateVerdict::Dropped,
                Verdict::Satisfiable(_) => CandidateVerdict::Kept,
                Verdict::Unknown => CandidateVerdict::BudgetKept,
            };
            VerdictEntry {
                var: z,
                verdict,
                solver_called: true,
                conflicts: out.conflicts_used,
            }
        };
        match entry.verdict {
            CandidateVerdict::Dropped => {
                dropped.insert(z);
            }
            CandidateVerdict::Kept => {
                kept.insert(z);
            }
            CandidateVerdict::BudgetKept => {
                kept.insert(z);
                minimal = false;
            }
        }
        log.push(entry);
    }
    observer(&LoopSnapshot {
        kept: &kept,
        undecided: &undecided,
        dropped: &dropped,
    });
    Ok(SupportSet {
        vars: kept,
        kind: SupportKind::UpperBound,
        minimal,
        timed_out: false,
        log,
    })
}

/// Builds the Padoa query for `i` against the candidate set `s`:
/// `φ ∧ φ' ∧ i ∧ ¬i'`, where `φ'` shares the variables of `s \ {i}` with
/// `φ` and renames everything else apart. Sharing a variable is the same
/// as linking both copies with an equivalence. Unsatisfiable iff `i` is
/// functionally defined by `s \ {i}`.
pub fn build_padoa(f: &Formula, s: &VarSet, i: Var) -> Result<Formula, SupportError> {
    if !s.contains(i) {
        return Err(SupportError::NotInSet(i.id()));
    }
    check_range(f, s)?;
    let mut shared = s.clone();
    shared.remove(i);
    let (copy, renaming) = rename_apart(f, f.num_vars(), &shared);
    let mut psi = f.clone();
    psi.append(&copy);
    psi.add_clause([i.pos()]).expect("in range");
    psi.add_clause([Lit::new(renaming[&i], true)])
        .expect("in range");
    Ok(psi)
}

/// Greedy independent support: each projection variable, rarest first, is
/// dropped when the remaining candidates define it.
pub fn find_is(
    f: &Formula,
    p: &ProjectionSet,
    cfg: &SolverConfig,
    deadline: &dyn Deadline,
) -> Result<SupportSet, SupportError> {
    check_range(f, p)?;
    let mut support = p.clone();
    let mut log = Vec::with_capacity(p.len());
    let mut minimal = true;
    for z in VarOrderStrategy::OccurrenceAscending.order(f, p, p) {
        if deadline.expired() {
            return Ok(SupportSet {
                vars: support,
                kind: SupportKind::Independent,
                minimal: false,
                timed_out: true,
                log,
            });
        }
        let psi = build_padoa(f, &support, z)?;
        let out = solve(&psi, &[], cfg);
        let verdict = match out.verdict {
            Verdict::Unsatisfiable => {
                support.remove(z);
                CandidateVerdict::Dropped
            }
            Verdict::Satisfiable(_) => CandidateVerdict::Kept,
            Verdict::Unknown => {
                minimal = false;
                CandidateVerdict::BudgetKept
            }
        };
        log.push(VerdictEntry {
            var: z,
            verdict,
            solver_called: true,
            conflicts: out.conflicts_used,
        });
    }
    Ok(SupportSet {
        vars: support,
        kind: SupportKind::Independent,
        minimal,
        timed_out: false,
        log,
    })
}

/// Definitional UBS check by enumeration: no two models agree on `u` but
/// differ on `p`.
pub fn verify_ubs_bruteforce(f: &Formula, p: &ProjectionSet, u: &VarSet) -> Result<bool, OracleError> {
    let models = enumerate_models(f)?;
    Ok(determines(&models, mask_of(u), mask_of(p)))
}

/// Definitional IS check by enumeration: `s ⊆ p` and `s` is a UBS of `p`.
pub fn verify_is_bruteforce(f: &Formula, p: &ProjectionSet, s: &VarSet) -> Result<bool, OracleError> {
    let models = enumerate_models(f)?;
    Ok(s.is_subset(p) && determines(&models, mask_of(s), mask_of(p)))
}

/// Definitional generalized independent support check: agreement on `g`
/// and agreement on `p` coincide.
pub fn verify_gis_bruteforce(f: &Formula, p: &ProjectionSet, g: &VarSet) -> Result<bool, OracleError> {
    let models = enumerate_models(f)?;
    let (gm, pm) = (mask_of(g), mask_of(p));
    Ok(determines(&models, gm, pm) && determines(&models, pm, gm))
}

/// Definitional lower bound support check: agreement on `p` implies
/// agreement on `l`.
pub fn verify_lbs_bruteforce(f: &Formula, p: &ProjectionSet, l: &VarSet) -> Result<bool, OracleError> {
    let models = enumerate_models(f)?;
    Ok(determines(&models, mask_of(p), mask_of(l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deadline::{Expired, Never};

    fn ids(s: &VarSet) -> Vec<u32> {
        s.ids()
    }

    fn v(id: u32) -> Var {
        Var::from_id(id)
    }

    fn iff() -> Formula {
        Formula::from_dimacs_clauses(2, &[&[-1, 2], &[1, -2]])
    }

    fn sat(f: &Formula) -> bool {
        solve(f, &[], &SolverConfig::unlimited()).is_sat()
    }

    #[test]
    fn xi_unsat_when_candidate_is_defined() {
        let p = VarSet::from_ids([1, 2]);
        let xi = build_xi(&iff(), &p, &VarSet::new(), &VarSet::from_ids([1]), &VarSet::new(), v(2));
        assert!(!sat(&xi));
    }

    #[test]
    fn xi_sat_when_candidate_is_free() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let p = VarSet::from_ids([1, 2]);
        let xi = build_xi(&f, &p, &VarSet::new(), &VarSet::from_ids([1]), &VarSet::new(), v(2));
        assert!(sat(&xi));
    }

    #[test]
    fn xi_marker_when_nothing_to_distinguish() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let p = VarSet::from_ids([1]);
        let xi = build_xi(&f, &p, &VarSet::new(), &VarSet::from_ids([1]), &VarSet::new(), v(2));
        assert!(xi.has_trivial_conflict());
    }

    #[test]
    fn padoa_examples() {
        let s = VarSet::from_ids([1, 2]);
        assert!(!sat(&build_padoa(&iff(), &s, v(2)).unwrap()));
        let or = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        assert!(sat(&build_padoa(&or, &s, v(2)).unwrap()));
        let unit = Formula::from_dimacs_clauses(2, &[&[2]]);
        assert!(!sat(&build_padoa(&unit, &s, v(2)).unwrap()));
        assert_eq!(build_padoa(&or, &s, v(3)), Err(SupportError::NotInSet(3)));
    }

    #[test]
    fn find_is_chain_of_equivalences() {
        let f = Formula::from_dimacs_clauses(3, &[&[-1, 2], &[1, -2], &[-2, 3], &[2, -3]]);
        let p = VarSet::range(3);
        let is = find_is(&f, &p, &SolverConfig::default(), &Never).unwrap();
        assert_eq!(is.len(), 1);
        assert!(is.minimal);
        assert!(verify_is_bruteforce(&f, &p, &is.vars).unwrap());
    }

    #[test]
    fn empty_projection() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let p = VarSet::new();
        assert!(find_is(&f, &p, &SolverConfig::default(), &Never).unwrap().is_empty());
        let ubs = find_ubs(&f, &p, VarOrderStrategy::default(), &SolverConfig::default(), &Never).unwrap();
        assert!(ubs.is_empty());
        assert!(ubs.minimal);
    }

    #[test]
    fn unused_projection_variable_is_kept() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2]]);
        let p = VarSet::from_ids([1, 3]);
        let ubs = find_ubs(&f, &p, VarOrderStrategy::default(), &SolverConfig::default(), &Never).unwrap();
        assert!(ubs.vars.contains(v(3)));
        assert!(verify_ubs_bruteforce(&f, &p, &ubs.vars).unwrap());
        let is = find_is(&f, &p, &SolverConfig::default(), &Never).unwrap();
        assert_eq!(ids(&is.vars), alloc::vec![1, 3]);
    }

    #[test]
    fn expired_deadline_returns_full_candidate_set() {
        let f = Formula::from_dimacs_clauses(4, &[&[1, 2], &[-2, 3]]);
        let p = VarSet::from_ids([1]);
        let ubs = find_ubs(&f, &p, VarOrderStrategy::default(), &SolverConfig::default(), &Expired).unwrap();
        assert!(ubs.timed_out);
        assert!(!ubs.minimal);
        assert_eq!(ids(&ubs.vars), alloc::vec![1, 2, 3]);
        let is = find_is(&f, &p, &SolverConfig::default(), &Expired).unwrap();
        assert_eq!(is.vars, p);
        assert!(is.timed_out);
    }

    #[test]
    fn budget_exhaustion_keeps_candidate() {
        // Pigeonhole core (4 pigeons, 3 holes) makes every check need
        // conflicts; with a budget of one nothing can be dropped.
        let (pigeons, holes) = (4u32, 3u32);
        let var = |i: u32, j: u32| (i * holes + j + 1) as i64;
        let mut f = Formula::new(pigeons * holes + 1);
        for i in 0..pigeons {
            f.add_clause((0..holes).map(|j| Lit::from_dimacs(var(i, j)).unwrap()))
                .unwrap();
        }
        for j in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    f.add_clause([
                        Lit::from_dimacs(-var(a, j)).unwrap(),
                        Lit::from_dimacs(-var(b, j)).unwrap(),
                    ])
                    .unwrap();
                }
            }
        }
        let p = VarSet::from_ids([1, 2]);
        let cfg = SolverConfig::default().with_conflict_limit(Some(1));
        let ubs = find_ubs(&f, &p, VarOrderStrategy::IndexOrder, &cfg, &Never).unwrap();
        assert!(!ubs.minimal);
        assert!(ubs
            .log
            .iter()
            .any(|e| e.verdict == CandidateVerdict::BudgetKept));
    }

    #[test]
    fn projection_out_of_range() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let p = VarSet::from_ids([5]);
        assert_eq!(
            find_ubs(&f, &p, VarOrderStrategy::default(), &SolverConfig::default(), &Never),
            Err(SupportError::VarOutOfRange { var: 5, num_vars: 2 })
        );
    }

    #[test]
    fn verify_examples() {
        let or = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let p = VarSet::from_ids([1, 2]);
        assert!(verify_ubs_bruteforce(&or, &p, &or.support()).unwrap());
        assert!(!verify_ubs_bruteforce(&or, &p, &VarSet::from_ids([1])).unwrap());
        assert!(verify_is_bruteforce(&or, &p, &p).unwrap());
        assert!(verify_is_bruteforce(&iff(), &p, &VarSet::from_ids([1])).unwrap());
        assert!(!verify_is_bruteforce(&iff(), &VarSet::from_ids([1]), &VarSet::from_ids([2])).unwrap());
    }

    #[test]
    fn strategy_orders() {
        let f = Formula::from_dimacs_clauses(4, &[&[1, 2, 3], &[1, 4], &[1, -4], &[2, 4]]);
        let p = VarSet::from_ids([1, 3]);
        let all = f.support();
        let order = |s: VarOrderStrategy| -> Vec<u32> { s.order(&f, &p, &all).iter().map(|v| v.id()).collect() };
        assert_eq!(order(VarOrderStrategy::IndexOrder), alloc::vec![1, 2, 3, 4]);
        assert_eq!(order(VarOrderStrategy::OccurrenceAscending), alloc::vec![3, 2, 1, 4]);
        assert_eq!(order(VarOrderStrategy::NonProjectionFirst), alloc::vec![3, 1, 2, 4]);
        assert_eq!(order(VarOrderStrategy::ProjectionOnly), alloc::vec![2, 4, 3, 1]);
    }
}
