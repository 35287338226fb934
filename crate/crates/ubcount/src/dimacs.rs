//! DIMACS CNF reading and writing, with the projection set carried on
//! `c ind v1 .. vk 0` comment lines.

use std::fmt::Write as _;

use thiserror::Error;
use ubcount_core::{blast_xor, Formula, Lit, ProjectionSet, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: missing \"p cnf\" header")]
    MissingHeader { line: usize },
    #[error("line {line}: literal {lit} exceeds declared {num_vars} variables")]
    OutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("line {line}: clause not terminated by 0")]
    Unterminated { line: usize },
    #[error("line {line}: \"c ind\" line not terminated by 0")]
    UnterminatedInd { line: usize },
    #[error("line {line}: not an integer: {token:?}")]
    NotInteger { line: usize, token: String },
    #[error("input is not valid UTF-8")]
    Encoding,
}

impl ParseError {
    /// 1-based line the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match *self {
            ParseError::Header { line, .. }
            | ParseError::MissingHeader { line }
            | ParseError::OutOfRange { line, .. }
            | ParseError::Unterminated { line }
            | ParseError::UnterminatedInd { line }
            | ParseError::NotInteger { line, .. } => Some(line),
            ParseError::Encoding => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("formula has {0} parity constraints and blasting was not requested")]
    XorsPresent(usize),
}

/// What to do with parity constraints when writing plain CNF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XorPolicy {
    #[default]
    Blast,
    Reject,
}

/// A parsed DIMACS document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub formula: Formula,
    /// Union of all `c ind` lines; `None` when there are none.
    pub projection: Option<ProjectionSet>,
    /// Clause count stated in the header. Not enforced.
    pub declared_clauses: usize,
}

fn parse_int(tok: &str, line: usize) -> Result<i64, ParseError> {
    tok.parse::<i64>().map_err(|_| ParseError::NotInteger {
        line,
        token: tok.to_string(),
    })
}

fn to_lit(value: i64, num_vars: u32, line: usize) -> Result<Lit, ParseError> {
    if value.unsigned_abs() > u64::from(num_vars) {
        return Err(ParseError::OutOfRange {
            line,
            lit: value,
            num_vars,
        });
    }
    Ok(Lit::from_dimacs(value).expect("nonzero"))
}

pub fn parse_bytes(bytes: &[u8]) -> Result<Dimacs, ParseError> {
    parse_str(std::str::from_utf8(bytes).map_err(|_| ParseError::Encoding)?)
}

/// Parses a DIMACS CNF document. Clauses may span lines; comments may
/// appear anywhere; a `%` line ends the input (SATLIB convention).
pub fn parse_str(text: &str) -> Result<Dimacs, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut formula = Formula::new(0);
    // Range checks wait for the header, which may come after `c ind`.
    let mut ind: Vec<(i64, usize)> = Vec::new();
    let mut has_ind = false;
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            let mut toks = rest.split_whitespace();
            if rest.starts_with(char::is_whitespace) && toks.next() == Some("ind") {
                has_ind = true;
                let mut closed = false;
                for tok in toks {
                    if closed {
                        return Err(ParseError::UnterminatedInd { line });
                    }
                    let v = parse_int(tok, line)?;
                    if v == 0 {
                        closed = true;
                    } else if v < 0 {
                        return Err(ParseError::NotInteger {
                            line,
                            token: tok.to_string(),
                        });
                    } else {
                        ind.push((v, line));
                    }
                }
                if !closed {
                    return Err(ParseError::UnterminatedInd { line });
                }
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(ParseError::Header {
                    line,
                    reason: "duplicate header".into(),
                });
            }
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let bad = |reason: &str| ParseError::Header {
                line,
                reason: reason.to_string(),
            };
            if toks.len() != 3 || toks[0] != "cnf" {
                return Err(bad("expected \"p cnf <vars> <clauses>\""));
            }
            let n: u32 = toks[1].parse().map_err(|_| bad("variable count"))?;
            let m: usize = toks[2].parse().map_err(|_| bad("clause count"))?;
            header = Some((n, m));
            formula = Formula::new(n);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(ParseError::MissingHeader { line });
        };
        for tok in trimmed.split_whitespace() {
            let v = parse_int(tok, line)?;
            if v == 0 {
                formula
                    .add_clause(pending.drain(..))
                    .expect("literals checked against header");
            } else {
                if pending.is_empty() {
                    pending_line = line;
                }
                pending.push(to_lit(v, num_vars, line)?);
            }
        }
    }
    let Some((_, declared_clauses)) = header else {
        return Err(ParseError::MissingHeader {
            line: last_line.max(1),
        });
    };
    if !pending.is_empty() {
        return Err(ParseError::Unterminated { line: pending_line });
    }
    let num_vars = formula.num_vars();
    let projection = if has_ind {
        let mut set = VarSet::new();
        for (v, line) in ind {
            set.insert(to_lit(v, num_vars, line)?.var());
        }
        Some(set)
    } else {
        None
    };
    Ok(Dimacs {
        formula,
        projection,
        declared_clauses,
    })
}

/// Writes `f` (and `p`, on one `c ind` line) as DIMACS. Output depends
/// only on the inputs: LF endings, single spaces, clauses in stored order.
pub fn emit(
    f: &Formula,
    p: Option<&ProjectionSet>,
    policy: XorPolicy,
) -> Result<String, EmitError> {
    let blasted;
    let f = if f.xors().is_empty() {
        f
    } else {
        match policy {
            XorPolicy::Reject => return Err(EmitError::XorsPresent(f.xors().len())),
            XorPolicy::Blast => {
                blasted = blast_xor(f);
                &blasted
            }
        }
    };
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", f.num_vars(), f.clauses().len()).unwrap();
    if let Some(p) = p {
        out.push_str("c ind");
        for v in p.iter() {
            write!(out, " {}", v.id()).unwrap();
        }
        out.push_str(" 0\n");
    }
    for c in f.clauses() {
        for l in c.lits() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Reads a projection set from a free-form file: whitespace-separated
/// positive variable ids, optionally written as `c ind .. 0` lines. Other
/// `c` lines are comments; `0` tokens are ignored.
pub fn parse_projection_file(text: &str, num_vars: u32) -> Result<ProjectionSet, ParseError> {
    let mut set = VarSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        let body = match body.strip_prefix("c ind") {
            Some(rest) => rest,
            None if body.starts_with('c') => continue,
            None => body,
        };
        for tok in body.split_whitespace() {
            let v = parse_int(tok, line)?;
            if v < 0 {
                return Err(ParseError::NotInteger {
                    line,
                    token: tok.to_string(),
                });
            }
            if v > 0 {
                set.insert(to_lit(v, num_vars, line)?.var());
            }
        }
    }
    Ok(set)
}
