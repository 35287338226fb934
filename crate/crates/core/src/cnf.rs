//! CNF formulas, literals, assignments and projections.
//!
//! Variables are 1-based to match DIMACS numbering. Literals pack the
//! variable index and polarity into a single `u32` so they can be used as
//! dense array indices by the solver.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use thiserror::Error;

/// Errors raised by the formula data model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("assignment covers {got} variables but the formula declares {expected}")]
    PartialAssignment { expected: u32, got: u32 },
    #[error("variable {var} is not in the domain of the assignment")]
    NotInDomain { var: u32 },
    #[error("variable {var} exceeds the declared {num_vars} variables")]
    VarOutOfRange { var: u32, num_vars: u32 },
}

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Returns `None` for id 0, which DIMACS reserves as the clause terminator.
    pub const fn new(id: u32) -> Option<Var> {
        if id == 0 {
            None
        } else {
            Some(Var(id))
        }
    }

    /// # Panics
    /// If `id` is 0.
    pub const fn from_id(id: u32) -> Var {
        assert!(id != 0, "variable ids start at 1");
        Var(id)
    }

    /// Zero-based index of the variable into `0..num_vars` arrays.
    pub const fn from_index(index: usize) -> Var {
        Var(index as u32 + 1)
    }

    pub const fn id(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub const fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    pub const fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal: a variable with a polarity. Encoded as `2 * index + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub const fn new(var: Var, negated: bool) -> Lit {
        Lit(((var.0 - 1) << 1) | negated as u32)
    }

    /// Builds a literal from its signed DIMACS form. Returns `None` for 0.
    pub fn from_dimacs(value: i64) -> Option<Lit> {
        let id = u32::try_from(value.unsigned_abs()).ok()?;
        Var::new(id).map(|v| Lit::new(v, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let id = i64::from(self.var().id());
        if self.is_negated() {
            -id
        } else {
            id
        }
    }

    pub const fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    pub const fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense code usable as an index into per-literal tables.
    pub const fn code(self) -> usize {
        self.0 as usize
    }

    pub const fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    /// Truth value of the literal when its variable takes `value`.
    pub const fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals.
///
/// Duplicate literals are removed on construction, keeping the first
/// occurrence. A clause holding both `l` and `!l` is kept but flagged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
    tautology: bool,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Clause {
        let mut out: Vec<Lit> = Vec::new();
        let mut tautology = false;
        for lit in lits {
            if out.contains(&lit) {
                continue;
            }
            if out.contains(&!lit) {
                tautology = true;
            }
            out.push(lit);
        }
        Clause {
            lits: out,
            tautology,
        }
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

    pub fn is_tautology(&self) -> bool {
        self.tautology
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.lits
            .iter()
            .any(|&l| l.eval(assignment.value(l.var())))
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Lit;
    type IntoIter = core::slice::Iter<'a, Lit>;
    fn into_iter(self) -> Self::IntoIter {
        self.lits.iter()
    }
}

/// A parity constraint: the XOR of `vars` must equal `rhs`.
///
/// A variable listed twice cancels out, so the stored set is duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XorClause {
    vars: Vec<Var>,
    rhs: bool,
}

impl XorClause {
    pub fn new(vars: impl IntoIterator<Item = Var>, rhs: bool) -> XorClause {
        let mut vars: Vec<Var> = vars.into_iter().collect();
        vars.sort_unstable();
        let mut out: Vec<Var> = Vec::with_capacity(vars.len());
        for v in vars {
            if out.last() == Some(&v) {
                out.pop();
            } else {
                out.push(v);
            }
        }
        XorClause { vars: out, rhs }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rhs(&self) -> bool {
        self.rhs
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        let parity = self
            .vars
            .iter()
            .fold(false, |acc, &v| acc ^ assignment.value(v));
        parity == self.rhs
    }
}

/// A sorted, duplicate-free set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(Vec<Var>);

/// The set of variables models are projected onto.
pub type ProjectionSet = VarSet;

impl VarSet {
    pub fn new() -> VarSet {
        VarSet(Vec::new())
    }

    /// All variables `1..=n`.
    pub fn range(n: u32) -> VarSet {
        VarSet((1..=n).map(Var).collect())
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> VarSet {
        ids.into_iter().map(Var::from_id).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Returns true when `v` was not already present.
    pub fn insert(&mut self, v: Var) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: Var) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Var] {
        &self.0
    }

    pub fn max(&self) -> Option<Var> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn ids(&self) -> Vec<u32> {
        self.0.iter().map(|v| v.id()).collect()
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> VarSet {
        let mut vars: Vec<Var> = iter.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        VarSet(vars)
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = Var;
    type IntoIter = core::iter::Copied<core::slice::Iter<'a, Var>>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// A CNF formula with optional native parity constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Clause>,
    xors: Vec<XorClause>,
}

impl Formula {
    pub fn new(num_vars: u32) -> Formula {
        Formula {
            num_vars,
            clauses: Vec::new(),
            xors: Vec::new(),
        }
    }

    /// Builds a formula from signed DIMACS literal lists.
    ///
    /// # Panics
    /// If any literal is 0 or exceeds `num_vars`.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i64]]) -> Formula {
        let mut f = Formula::new(num_vars);
        for c in clauses {
            let lits = c
                .iter()
                .map(|&l| Lit::from_dimacs(l).expect("0 is not a literal"));
            f.add_clause(lits).expect("literal within declared range");
        }
        f
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn xors(&self) -> &[XorClause] {
        &self.xors
    }

    /// Allocates a fresh variable past the current range.
    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars)
    }

    /// Grows the variable range to at least `n`.
    pub fn ensure_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> Result<(), CnfError> {
        let clause = Clause::new(lits);
        self.check_range(clause.lits().iter().map(|l| l.var()))?;
        self.clauses.push(clause);
        Ok(())
    }

    pub fn add_xor(&mut self, xor: XorClause) -> Result<(), CnfError> {
        self.check_range(xor.vars().iter().copied())?;
        self.xors.push(xor);
        Ok(())
    }

    /// Appends every clause and parity constraint of `other`, growing the
    /// variable range as needed.
    pub fn append(&mut self, other: &Formula) {
        self.ensure_vars(other.num_vars);
        self.clauses.extend(other.clauses.iter().cloned());
        self.xors.extend(other.xors.iter().cloned());
    }

    pub(crate) fn take_xors(&mut self) -> Vec<XorClause> {
        core::mem::take(&mut self.xors)
    }

    fn check_range(&self, vars: impl Iterator<Item = Var>) -> Result<(), CnfError> {
        for v in vars {
            if v.id() > self.num_vars {
                return Err(CnfError::VarOutOfRange {
                    var: v.id(),
                    num_vars: self.num_vars,
                });
            }
        }
        Ok(())
    }

    /// Variables that occur in at least one clause or parity constraint.
    pub fn support(&self) -> VarSet {
        let counts = self.occurrences();
        VarSet(
            counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(i, _)| Var::from_index(i))
                .collect(),
        )
    }

    /// Number of clauses (and parity constraints) each variable occurs in,
    /// indexed by `Var::index`.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0usize; self.num_vars as usize];
        for c in &self.clauses {
            let mut seen: Vec<Var> = Vec::with_capacity(c.len());
            for l in c {
                if !seen.contains(&l.var()) {
                    seen.push(l.var());
                    counts[l.var().index()] += 1;
                }
            }
        }
        for x in &self.xors {
            for v in x.vars() {
                counts[v.index()] += 1;
            }
        }
        counts
    }

    /// True if the formula contains the empty clause or an empty parity
    /// constraint with odd right-hand side.
    pub fn has_trivial_conflict(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
            || self.xors.iter().any(|x| x.vars().is_empty() && x.rhs())
    }
}

/// A total assignment over `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Assignment {
        Assignment {
            values: alloc::vec![false; num_vars as usize],
        }
    }

    /// Decodes bit `i` of `bits` as the value of variable `i + 1`.
    pub fn from_bits(num_vars: u32, bits: u64) -> Assignment {
        Assignment {
            values: (0..num_vars).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// # Panics
    /// If `v` is outside the assignment's range.
    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v.index()).copied()
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.index()] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn lit_is_true(&self, l: Lit) -> bool {
        l.eval(self.value(l.var()))
    }

    /// Drops values for variables beyond `num_vars`.
    pub fn truncate(&mut self, num_vars: u32) {
        self.values.truncate(num_vars as usize);
    }
}

/// An assignment restricted to a stated set of variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectedAssignment {
    entries: Vec<(Var, bool)>,
}

impl ProjectedAssignment {
    pub fn domain(&self) -> VarSet {
        self.entries.iter().map(|&(v, _)| v).collect()
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.entries
            .binary_search_by_key(&v, |&(var, _)| var)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn entries(&self) -> &[(Var, bool)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Checks whether `a` is a model of `f`, including its parity constraints.
pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool, CnfError> {
    if a.num_vars() < f.num_vars() {
        return Err(CnfError::PartialAssignment {
            expected: f.num_vars(),
            got: a.num_vars(),
        });
    }
    Ok(f.clauses.iter().all(|c| c.is_satisfied_by(a))
        && f.xors.iter().all(|x| x.is_satisfied_by(a)))
}

/// Restricts `a` to the variables of `s`.
pub fn project(a: &Assignment, s: &VarSet) -> Result<ProjectedAssignment, CnfError> {
    let entries = s
        .iter()
        .map(|v| {
            a.get(v)
                .map(|b| (v, b))
                .ok_or(CnfError::NotInDomain { var: v.id() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProjectedAssignment { entries })
}

/// Restricts a projected assignment further to `s`, which must lie inside
/// its domain.
pub fn reproject(
    a: &ProjectedAssignment,
    s: &VarSet,
) -> Result<ProjectedAssignment, CnfError> {
    let entries = s
        .iter()
        .map(|v| {
            a.get(v)
                .map(|b| (v, b))
                .ok_or(CnfError::NotInDomain { var: v.id() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProjectedAssignment { entries })
}

/// Copies `f` with every variable outside `keep` mapped to a fresh index
/// above `base`, in ascending order. Returns the copy and the renaming.
///
/// `keep` entries are left untouched; the result declares enough variables
/// to hold both `f`'s range and the fresh indices.
pub fn rename_apart(f: &Formula, base: u32, keep: &VarSet) -> (Formula, BTreeMap<Var, Var>) {
    debug_assert!(base >= f.num_vars());
    let mut map = BTreeMap::new();
    let mut next = base;
    for id in 1..=f.num_vars() {
        let v = Var(id);
        if !keep.contains(v) {
            next += 1;
            map.insert(v, Var(next));
        }
    }
    let rename = |v: Var| map.get(&v).copied().unwrap_or(v);
    let mut out = Formula::new(f.num_vars().max(next));
    for c in &f.clauses {
        out.clauses.push(Clause::new(
            c.lits().iter().map(|&l| Lit::new(rename(l.var()), l.is_negated())),
        ));
    }
    for x in &f.xors {
        out.xors
            .push(XorClause::new(x.vars().iter().map(|&v| rename(v)), x.rhs()));
    }
    (out, map)
}
