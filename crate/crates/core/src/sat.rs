//! A CDCL SAT solver with assumptions and a per-call conflict budget.
//!
//! Two watched literals, first-UIP learning with basic clause minimization,
//! VSIDS ordering (ties go to the lowest variable index), phase saving and
//! geometric restarts. The solver is incremental: clauses and variables may
//! be added between calls to [`Solver::solve`].

use alloc::vec;
use alloc::vec::Vec;

use crate::cnf::{Assignment, Formula, Lit, Var};
use crate::xor::{encode_xor, ClauseSink};

/// Conflict budget used for definability queries unless overridden.
pub const DEFAULT_CONFLICT_LIMIT: u64 = 100_000;

/// Tunable knobs for [`Solver`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Maximum number of conflicts per `solve` call. `None` is unlimited.
    pub conflict_limit: Option<u64>,
    pub seed: u64,
    /// Conflicts before the first restart.
    pub restart_first: u64,
    /// Growth factor of the restart interval.
    pub restart_factor: f64,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Probability of picking a random decision variable. Zero keeps the
    /// search fully activity-driven.
    pub random_var_freq: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            conflict_limit: Some(DEFAULT_CONFLICT_LIMIT),
            seed: 0,
            restart_first: 100,
            restart_factor: 1.5,
            var_decay: 0.95,
            clause_decay: 0.999,
            random_var_freq: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn unlimited() -> Self {
        SolverConfig {
            conflict_limit: None,
            ..SolverConfig::default()
        }
    }

    pub fn with_conflict_limit(mut self, limit: Option<u64>) -> Self {
        self.conflict_limit = limit;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable(Assignment),
    Unsatisfiable,
    /// The conflict budget ran out before a verdict was reached.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub conflicts_used: u64,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self.verdict, Verdict::Satisfiable(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self.verdict, Verdict::Unsatisfiable)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.verdict, Verdict::Unknown)
    }

    pub fn model(&self) -> Option<&Assignment> {
        match &self.verdict {
            Verdict::Satisfiable(a) => Some(a),
            _ => None,
        }
    }
}

/// Solves `f` under `assumptions`. Native parity constraints are blasted to
/// CNF first; the returned model covers `f`'s variables only.
pub fn solve(f: &Formula, assumptions: &[Lit], cfg: &SolverConfig) -> SolveOutcome {
    let mut solver = Solver::from_formula(f, cfg.clone());
    let mut out = solver.solve(assumptions);
    if let Verdict::Satisfiable(model) = &mut out.verdict {
        model.truncate(f.num_vars());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

/// Max-heap over variable indices keyed by activity, lowest index first on
/// ties.
#[derive(Debug, Clone, Default)]
struct VarOrder {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarOrder {
    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::better(act, v, p) {
                break;
            }
            self.heap[i] = p;
            self.pos[p] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if !Self::better(act, c, v) {
                break;
            }
            self.heap[i] = c;
            self.pos[c] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

#[inline]
fn lit_value(assigns: &[LBool], l: Lit) -> LBool {
    match assigns[l.var().index()] {
        LBool::Undef => LBool::Undef,
        LBool::True if l.is_negated() => LBool::False,
        LBool::False if l.is_negated() => LBool::True,
        v => v,
    }
}

/// Incremental CDCL solver. Not shareable between threads; build one per
/// worker.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    clauses: Vec<ClauseData>,
    learnts: Vec<usize>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    order: VarOrder,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    var_inc: f64,
    cla_inc: f64,
    max_learnts: f64,
    num_original: usize,
    ok: bool,
    rng_state: u64,
    total_conflicts: u64,
}

impl Solver {
    pub fn new(num_vars: u32, cfg: SolverConfig) -> Solver {
        let rng_state = cfg.seed ^ 0x9E37_79B9_7F4A_7C15;
        let mut s = Solver {
            cfg,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            order: VarOrder::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            max_learnts: 0.0,
            num_original: 0,
            ok: true,
            rng_state: if rng_state == 0 { 1 } else { rng_state },
            total_conflicts: 0,
        };
        for _ in 0..num_vars {
            s.new_var();
        }
        s
    }

    /// Loads every clause of `f`, blasting parity constraints to CNF.
    pub fn from_formula(f: &Formula, cfg: SolverConfig) -> Solver {
        let mut s = Solver::new(f.num_vars(), cfg);
        for c in f.clauses() {
            s.add_clause(c.lits());
        }
        for x in f.xors() {
            encode_xor(&mut s, x, None);
        }
        s
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn set_conflict_limit(&mut self, limit: Option<u64>) {
        self.cfg.conflict_limit = limit;
    }

    /// False once the clause database is known to be unsatisfiable without
    /// assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn total_conflicts(&self) -> u64 {
        self.total_conflicts
    }

    pub fn new_var(&mut self) -> Var {
        let idx = self.assigns.len();
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow(idx + 1);
        self.order.insert(idx, &self.activity);
        Var::from_index(idx)
    }

    /// Adds a clause at decision level 0. Returns false if the database
    /// became unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert!(self.trail_lim.is_empty());
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match lit_value(&self.assigns, l) {
                LBool::True => return true,
                LBool::False => {}
                LBool::Undef => {
                    if c.contains(&!l) {
                        return true;
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(c, false);
                self.num_original += 1;
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let cref = self.clauses.len();
        self.watches[lits[0].code()].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1].code()].push(Watcher {
            cref,
            blocker: lits[0],
        });
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_negated() {
            LBool::False
        } else {
            LBool::True
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let clause = &mut self.clauses[w.cref];
                if clause.deleted {
                    continue;
                }
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let nw = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == LBool::True {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    if lit_value(&self.assigns, l) != LBool::False {
                        clause.lits.swap(1, k);
                        self.watches[l.code()].push(nw);
                        continue 'watchers;
                    }
                }
                ws[j] = nw;
                j += 1;
                if lit_value(&self.assigns, first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var().index();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.polarity[v] = !l.is_negated();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();

        loop {
            if self.clauses[confl].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl].lits.clone();
            for &q in &lits[start..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[pl.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict has a UIP");

        // Drop literals implied by other literals of the learnt clause.
        let mut keep = Vec::with_capacity(learnt.len());
        keep.push(learnt[0]);
        for &l in &learnt[1..] {
            let v = l.var().index();
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.clauses[r].lits[1..].iter().all(|q| {
                    let qv = q.var().index();
                    self.seen[qv] || self.level[qv] == 0
                }),
            };
            if !redundant {
                keep.push(l);
            }
        }
        for &l in &learnt {
            self.seen[l.var().index()] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    fn next_random(&mut self) -> u64 {
        let mut x = self.rng_state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.rng_state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.cfg.random_var_freq > 0.0 && !self.order.heap.is_empty() {
            let r = (self.next_random() >> 11) as f64 / (1u64 << 53) as f64;
            if r < self.cfg.random_var_freq {
                let k = (self.next_random() % self.order.heap.len() as u64) as usize;
                let v = self.order.heap[k];
                if self.assigns[v] == LBool::Undef {
                    return Some(Lit::new(Var::from_index(v), !self.polarity[v]));
                }
            }
        }
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v] == LBool::Undef {
                return Some(Lit::new(Var::from_index(v), !self.polarity[v]));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        let v = l.var().index();
        self.reason[v] == Some(cref) && lit_value(&self.assigns, l) == LBool::True
    }

    fn reduce_db(&mut self) {
        let mut learnts = core::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (k, &cref) in learnts.iter().enumerate() {
            let c = &self.clauses[cref];
            if k < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        for ws in &mut self.watches {
            let clauses = &self.clauses;
            ws.retain(|w| !clauses[w.cref].deleted);
        }
    }

    /// Runs the search under `assumptions` within the configured conflict
    /// budget. The solver is back at decision level 0 afterwards.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        let mut conflicts = 0u64;
        if !self.ok {
            return SolveOutcome {
                verdict: Verdict::Unsatisfiable,
                conflicts_used: 0,
            };
        }
        if self.cfg.conflict_limit == Some(0) {
            return SolveOutcome {
                verdict: Verdict::Unknown,
                conflicts_used: 0,
            };
        }
        self.max_learnts = (self.num_original as f64 / 3.0).max(2000.0);
        let mut restart_budget = self.cfg.restart_first as f64;
        let mut since_restart = 0u64;

        let verdict = loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                self.total_conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    break Verdict::Unsatisfiable;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= self.cfg.var_decay;
                self.cla_inc /= self.cfg.clause_decay;
                if self.cfg.conflict_limit.is_some_and(|limit| conflicts >= limit) {
                    break Verdict::Unknown;
                }
                continue;
            }

            if since_restart as f64 >= restart_budget {
                since_restart = 0;
                restart_budget *= self.cfg.restart_factor;
                self.cancel_until(0);
                continue;
            }
            if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }

            let mut next = None;
            let mut failed = false;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match lit_value(&self.assigns, a) {
                    LBool::True => self.trail_lim.push(self.trail.len()),
                    LBool::False => {
                        failed = true;
                        break;
                    }
                    LBool::Undef => {
                        next = Some(a);
                        break;
                    }
                }
            }
            if failed {
                break Verdict::Unsatisfiable;
            }
            let decision = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => {
                        let values = self.assigns.iter().map(|&v| v == LBool::True).collect();
                        break Verdict::Satisfiable(Assignment::new(values));
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        };
        self.cancel_until(0);
        SolveOutcome {
            verdict,
            conflicts_used: conflicts,
        }
    }
}

impl ClauseSink for Solver {
    fn fresh_var(&mut self) -> Var {
        self.new_var()
    }

    fn push_clause(&mut self, lits: &[Lit]) {
        self.add_clause(lits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{evaluate, VarSet};

    fn lit(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    #[test]
    fn contradiction_is_unsat() {
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        assert!(solve(&f, &[], &SolverConfig::unlimited()).is_unsat());
    }

    #[test]
    fn assumption_forces_other_literal() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let out = solve(&f, &[lit(-1)], &SolverConfig::unlimited());
        let m = out.model().expect("satisfiable");
        assert!(!m.value(Var::from_id(1)));
        assert!(m.value(Var::from_id(2)));
    }

    #[test]
    fn conflicting_assumptions() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        let out = solve(&f, &[lit(-1), lit(-2)], &SolverConfig::unlimited());
        assert!(out.is_unsat());
        // Assumption failure does not poison the solver.
        let mut s = Solver::from_formula(&f, SolverConfig::unlimited());
        assert!(s.solve(&[lit(-1), lit(-2)]).is_unsat());
        assert!(s.solve(&[lit(-1)]).is_sat());
    }

    #[test]
    fn empty_formula_is_sat() {
        let f = Formula::new(0);
        assert!(solve(&f, &[], &SolverConfig::default()).is_sat());
        let g = Formula::new(3);
        let out = solve(&g, &[], &SolverConfig::default());
        assert_eq!(out.model().unwrap().num_vars(), 3);
    }

    #[test]
    fn empty_clause_is_unsat() {
        let mut f = Formula::new(2);
        f.add_clause([]).unwrap();
        assert!(solve(&f, &[], &SolverConfig::default()).is_unsat());
    }

    #[test]
    fn pigeonhole_needs_conflicts() {
        // 4 pigeons in 3 holes.
        let (p, h) = (4u32, 3u32);
        let var = |i: u32, j: u32| (i * h + j + 1) as i64;
        let mut f = Formula::new(p * h);
        for i in 0..p {
            f.add_clause((0..h).map(|j| lit(var(i, j)))).unwrap();
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    f.add_clause([lit(-var(a, j)), lit(-var(b, j))]).unwrap();
                }
            }
        }
        let out = solve(&f, &[], &SolverConfig::unlimited());
        assert!(out.is_unsat());
        assert!(out.conflicts_used > 0);
        let budgeted = solve(&f, &[], &SolverConfig::unlimited().with_conflict_limit(Some(1)));
        assert!(budgeted.is_unknown());
        assert_eq!(budgeted.conflicts_used, 1);
    }

    #[test]
    fn incremental_blocking_enumerates_all_models() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2, 3]]);
        let mut s = Solver::from_formula(&f, SolverConfig::unlimited());
        let mut n = 0;
        while let Verdict::Satisfiable(m) = s.solve(&[]).verdict {
            assert_eq!(evaluate(&f, &m), Ok(true));
            n += 1;
            let block: Vec<Lit> = VarSet::range(3)
                .iter()
                .map(|v| Lit::new(v, m.value(v)))
                .collect();
            s.add_clause(&block);
        }
        assert_eq!(n, 7);
    }

    #[test]
    fn xors_are_blasted_by_solve() {
        let mut f = Formula::new(3);
        f.add_xor(crate::cnf::XorClause::new(VarSet::range(3).iter(), true))
            .unwrap();
        let out = solve(&f, &[lit(1), lit(2)], &SolverConfig::unlimited());
        let m = out.model().unwrap();
        assert!(m.value(Var::from_id(3)));
        assert_eq!(m.num_vars(), 3);
    }
}
