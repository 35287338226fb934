//! Parity constraints to CNF.
//!
//! Long XORs are cut into a chain of width-4 pieces linked by auxiliary
//! variables; each width-k piece expands to the 2^(k-1) clauses that
//! forbid its wrong-parity assignments.

use alloc::vec::Vec;

use crate::cnf::{Formula, Lit, Var, XorClause};

/// Widest parity piece emitted directly.
pub const CHUNK_WIDTH: usize = 4;

/// Anything that can receive clauses and hand out fresh variables.
pub trait ClauseSink {
    fn fresh_var(&mut self) -> Var;
    fn push_clause(&mut self, lits: &[Lit]);
}

impl ClauseSink for Formula {
    fn fresh_var(&mut self) -> Var {
        self.new_var()
    }

    fn push_clause(&mut self, lits: &[Lit]) {
        self.add_clause(lits.iter().copied())
            .expect("sink clauses use allocated variables");
    }
}

/// Emits the CNF encoding of `xor` into `sink`. With a `guard`, every
/// emitted clause is weakened by `!guard`, so the constraint only binds
/// while `guard` is true.
pub fn encode_xor<S: ClauseSink + ?Sized>(sink: &mut S, xor: &XorClause, guard: Option<Lit>) {
    let mut rest: Vec<Var> = xor.vars().to_vec();
    if rest.is_empty() {
        if xor.rhs() {
            let clause: Vec<Lit> = guard.map(|g| !g).into_iter().collect();
            sink.push_clause(&clause);
        }
        return;
    }
    while rest.len() > CHUNK_WIDTH {
        // head[0] ^ head[1] ^ head[2] ^ aux = 0, so aux carries their parity.
        let aux = sink.fresh_var();
        let mut piece: Vec<Var> = rest.drain(..CHUNK_WIDTH - 1).collect();
        piece.push(aux);
        encode_piece(sink, &piece, false, guard);
        rest.insert(0, aux);
    }
    encode_piece(sink, &rest, xor.rhs(), guard);
}

fn encode_piece<S: ClauseSink + ?Sized>(sink: &mut S, vars: &[Var], rhs: bool, guard: Option<Lit>) {
    let k = vars.len();
    debug_assert!((1..=CHUNK_WIDTH).contains(&k));
    let mut clause: Vec<Lit> = Vec::with_capacity(k + 1);
    for bits in 0u32..(1 << k) {
        let parity = bits.count_ones() % 2 == 1;
        if parity == rhs {
            continue;
        }
        clause.clear();
        // Exclude this wrong-parity assignment: each literal is false under it.
        for (i, &v) in vars.iter().enumerate() {
            let value = bits >> i & 1 == 1;
            clause.push(Lit::new(v, value));
        }
        if let Some(g) = guard {
            clause.push(!g);
        }
        sink.push_clause(&clause);
    }
}

/// Returns a pure-CNF copy of `f` whose models, projected on `f`'s
/// variables, are exactly the models of `f`.
pub fn blast_xor(f: &Formula) -> Formula {
    let mut out = f.clone();
    let xors = out.take_xors();
    for x in &xors {
        encode_xor(&mut out, x, None);
    }
    out
}
