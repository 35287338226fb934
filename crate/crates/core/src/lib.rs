//! Upper bound supports and projected model counting over CNF.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the formula
//! data model ([`cnf`]), a CDCL solver ([`sat`]) with XOR-to-CNF blasting
//! ([`xor`]), support computation ([`support`]), exact and hashing-based
//! counting ([`counting`]), and the instance generators used in the test
//! suites ([`families`]). File formats, wall-clock deadlines and the
//! command line live in the `ubcount` crate.

#![no_std]

extern crate alloc;

pub mod cnf;
pub mod counting;
pub mod deadline;
pub mod families;
pub mod oracle;
pub mod sat;
pub mod support;
pub mod xor;

pub use cnf::{
    evaluate, project, rename_apart, Assignment, Clause, CnfError, Formula, Lit,
    ProjectedAssignment, ProjectionSet, Var, VarSet, XorClause,
};
pub use counting::{
    approx_count, count_exact_projected, sample_xor, ubcount, ApproxCount, CountError,
    ExactCount, PacParams, UbCountJob, UbCountResult,
};
pub use deadline::{Deadline, Expired, Never};
pub use families::{gen_random, gen_theorem1, gen_theorem2, FamilyError, FamilyInstance};
pub use sat::{solve, SolveOutcome, Solver, SolverConfig, Verdict};
pub use support::{
    build_padoa, build_xi, find_is, find_ubs, find_ubs_observed, verify_is_bruteforce,
    verify_ubs_bruteforce, CandidateVerdict, SupportError, SupportKind, SupportSet,
    VarOrderStrategy,
};
pub use xor::blast_xor;
