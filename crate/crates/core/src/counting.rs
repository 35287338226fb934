//! Projected model counting: exact enumeration, a hashing-based PAC
//! counter, and the UBS-driven upper-bound pipeline.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Formula, Lit, ProjectionSet, Var, VarSet, XorClause};
use crate::deadline::Deadline;
use crate::sat::{Solver, SolverConfig, Verdict};
use crate::support::{find_ubs, SupportError, SupportKind, SupportSet, VarOrderStrategy};
use crate::xor::encode_xor;

pub const DEFAULT_EPSILON: f64 = 0.8;
pub const DEFAULT_DELTA: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("solver exhausted its conflict budget")]
    Budget,
    #[error("counting deadline expired")]
    Timeout,
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("variable {var} exceeds the formula's {num_vars} variables")]
    VarOutOfRange { var: u32, num_vars: u32 },
    #[error(transparent)]
    Support(#[from] SupportError),
}

/// Result of exact enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCount {
    pub value: BigUint,
    /// False when enumeration stopped at the caller's limit, in which case
    /// `value` is only a lower bound.
    pub complete: bool,
}

fn check_range(f: &Formula, s: &VarSet) -> Result<(), CountError> {
    match s.max() {
        Some(v) if v.id() > f.num_vars() => Err(CountError::VarOutOfRange {
            var: v.id(),
            num_vars: f.num_vars(),
        }),
        _ => Ok(()),
    }
}

fn blocking_clause(model: &crate::cnf::Assignment, s: &VarSet) -> Vec<Lit> {
    s.iter().map(|v| Lit::new(v, model.value(v))).collect()
}

/// Counts the distinct projections on `s` of the models of `f` by repeated
/// solving with blocking clauses. With `limit`, stops once more than
/// `limit` projections have been seen and reports an incomplete count.
pub fn count_exact_projected(
    f: &Formula,
    s: &VarSet,
    limit: Option<u64>,
    cfg: &SolverConfig,
    deadline: &dyn Deadline,
) -> Result<ExactCount, CountError> {
    check_range(f, s)?;
    let mut solver = Solver::from_formula(f, cfg.clone());
    let mut count: u64 = 0;
    loop {
        if deadline.expired() {
            return Err(CountError::Timeout);
        }
        match solver.solve(&[]).verdict {
            Verdict::Satisfiable(model) => {
                count += 1;
                if limit.is_some_and(|l| count > l) {
                    return Ok(ExactCount {
                        value: BigUint::from(count),
                        complete: false,
                    });
                }
                solver.add_clause(&blocking_clause(&model, s));
            }
            Verdict::Unsatisfiable => {
                return Ok(ExactCount {
                    value: BigUint::from(count),
                    complete: true,
                })
            }
            Verdict::Unknown => return Err(CountError::Budget),
        }
    }
}

/// Draws a random parity constraint over `s`: each variable joins with
/// probability 1/2 and the right-hand side is a fair coin.
pub fn sample_xor<R: Rng + ?Sized>(s: &VarSet, rng: &mut R) -> XorClause {
    let vars: Vec<Var> = s.iter().filter(|_| rng.gen::<bool>()).collect();
    XorClause::new(vars, rng.gen::<bool>())
}

/// Tolerance and confidence of a PAC count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for PacParams {
    fn default() -> Self {
        PacParams {
            epsilon: DEFAULT_EPSILON,
            delta: DEFAULT_DELTA,
        }
    }
}

impl PacParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<PacParams, CountError> {
        let p = PacParams { epsilon, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CountError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CountError::InvalidParams("epsilon must be positive"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(CountError::InvalidParams("delta must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Cell-size threshold: `⌈9.84 (1 + ε/(1+ε)) (1 + 1/ε)²⌉`.
    pub fn pivot(&self) -> u64 {
        let e = self.epsilon;
        let k = 1.0 + 1.0 / e;
        libm::ceil(9.84 * (1.0 + e / (1.0 + e)) * k * k) as u64
    }

    /// Number of independent rounds: `⌈17 log₂(3/δ)⌉`.
    pub fn rounds(&self) -> u32 {
        libm::ceil(17.0 * libm::log2(3.0 / self.delta)) as u32
    }
}

/// A count reported as `mantissa * 2^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCount {
    pub mantissa: u64,
    pub exponent: u32,
    pub epsilon: f64,
    pub delta: f64,
    /// Variables the count was projected on.
    pub support_used: VarSet,
    /// True when the count fit under the pivot without hashing and is exact.
    pub exact: bool,
}

impl ApproxCount {
    pub fn value(&self) -> BigUint {
        BigUint::from(self.mantissa) << self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    /// `log₂` of the represented value; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        if self.mantissa == 0 {
            f64::NEG_INFINITY
        } else {
            libm::log2(self.mantissa as f64) + f64::from(self.exponent)
        }
    }
}

impl fmt::Display for ApproxCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

fn cmp_scaled(a: (u64, u32), b: (u64, u32)) -> Ordering {
    (BigUint::from(a.0) << a.1).cmp(&(BigUint::from(b.0) << b.1))
}

/// One hashing round: a solver holding the formula, lazily sampled XORs
/// each behind an activation literal, and a cache of bounded cell counts.
struct HashRound<'a> {
    solver: Solver,
    s: &'a VarSet,
    rng: ChaCha8Rng,
    activations: Vec<Lit>,
    cache: Vec<Option<u64>>,
    bound: u64,
}

impl HashRound<'_> {
    fn ensure_hashes(&mut self, i: usize) {
        while self.activations.len() < i {
            let xor = sample_xor(self.s, &mut self.rng);
            let act = self.solver.new_var().pos();
            encode_xor(&mut self.solver, &xor, Some(act));
            self.activations.push(act);
        }
    }

    /// Number of projected solutions in the cell cut by the first `i`
    /// hashes, saturating at `bound`.
    fn cell_count(&mut self, i: usize, deadline: &dyn Deadline) -> Result<u64, CountError> {
        if let Some(c) = self.cache[i] {
            return Ok(c);
        }
        self.ensure_hashes(i);
        let c = bounded_count(&mut self.solver, self.s, &self.activations[..i], self.bound, deadline)?;
        self.cache[i] = Some(c);
        Ok(c)
    }
}

/// Counts projected solutions on `s` under `assumptions`, stopping at
/// `bound`. Blocking clauses hang off a fresh activation literal that is
/// retired afterwards, so the solver can be reused.
fn bounded_count(
    solver: &mut Solver,
    s: &VarSet,
    assumptions: &[Lit],
    bound: u64,
    deadline: &dyn Deadline,
) -> Result<u64, CountError> {
    let gate = solver.new_var().pos();
    let mut assume: Vec<Lit> = assumptions.to_vec();
    assume.push(gate);
    let mut count = 0;
    let result = loop {
        if count >= bound {
            break Ok(count);
        }
        if deadline.expired() {
            break Err(CountError::Timeout);
        }
        match solver.solve(&assume).verdict {
            Verdict::Satisfiable(model) => {
                count += 1;
                let mut block = blocking_clause(&model, s);
                block.push(!gate);
                solver.add_clause(&block);
            }
            Verdict::Unsatisfiable => break Ok(count),
            Verdict::Unknown => break Err(CountError::Budget),
        }
    };
    solver.add_clause(&[!gate]);
    result
}

/// Smallest `i` in `1..=n` with `cell(i) <= pivot`, given `cell(0) > pivot`.
/// Gallops outward from `hint`, then bisects.
fn search_cell(
    round: &mut HashRound<'_>,
    n: usize,
    pivot: u64,
    hint: usize,
    deadline: &dyn Deadline,
) -> Result<usize, CountError> {
    let mut lo = 0usize; // cell(lo) > pivot
    let mut hi = n; // cell(hi) <= pivot, assumed until proven otherwise
    let start = hint.clamp(1, n);
    if round.cell_count(start, deadline)? <= pivot {
        hi = start;
        let mut step = 1;
        while hi > lo + 1 {
            let probe = hi.saturating_sub(step).max(lo + 1);
            if round.cell_count(probe, deadline)? > pivot {
                lo = probe;
                break;
            }
            hi = probe;
            step *= 2;
        }
    } else {
        lo = start;
        let mut step = 1;
        while lo < n {
            let probe = (lo + step).min(n);
            if round.cell_count(probe, deadline)? <= pivot {
                hi = probe;
                break;
            }
            lo = probe;
            step *= 2;
        }
        if lo >= n {
            // Even n hashes left a large cell; report the saturated count.
            return Ok(n);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if round.cell_count(mid, deadline)? <= pivot {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Hashing-based approximate count of the projections of `f` on `s`.
///
/// If the whole solution space fits under the pivot it is counted exactly.
/// Otherwise each round finds the fewest random XORs leaving at most
/// `pivot` solutions in the cell, estimates `cell * 2^i`, and the median
/// over all rounds is returned. Round `r` draws its hashes from the
/// ChaCha stream `r` of `seed`, so results depend only on the inputs.
pub fn approx_count(
    f: &Formula,
    s: &VarSet,
    params: PacParams,
    seed: u64,
    cfg: &SolverConfig,
    deadline: &dyn Deadline,
) -> Result<ApproxCount, CountError> {
    params.validate()?;
    check_range(f, s)?;
    let pivot = params.pivot();
    let make = |exp: u32, mantissa: u64, exact: bool| ApproxCount {
        mantissa,
        exponent: exp,
        epsilon: params.epsilon,
        delta: params.delta,
        support_used: s.clone(),
        exact,
    };

    let base = Solver::from_formula(f, cfg.clone());
    let mut probe = base.clone();
    let total = bounded_count(&mut probe, s, &[], pivot + 1, deadline)?;
    if total <= pivot {
        return Ok(make(0, total, true));
    }

    let n = s.len();
    let mut estimates: Vec<(u64, u32)> = Vec::new();
    let mut hint = 1usize;
    for r in 0..params.rounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(r));
        let mut cache = alloc::vec![None; n + 1];
        cache[0] = Some(total);
        let mut round = HashRound {
            solver: base.clone(),
            s,
            rng,
            activations: Vec::new(),
            cache,
            bound: pivot + 1,
        };
        let m = search_cell(&mut round, n, pivot, hint, deadline)?;
        let cell = round.cell_count(m, deadline)?;
        estimates.push((cell, m as u32));
        hint = m;
    }
    estimates.sort_by(|&a, &b| cmp_scaled(a, b));
    let (mantissa, exponent) = estimates[estimates.len() / 2];
    Ok(make(exponent, mantissa, false))
}

/// Settings for [`ubcount`].
#[derive(Debug, Clone, PartialEq)]
pub struct UbCountJob {
    pub strategy: VarOrderStrategy,
    /// Solver settings for the definability checks.
    pub definability: SolverConfig,
    /// Solver settings for counting queries.
    pub counting: SolverConfig,
    pub pac: PacParams,
    pub seed: u64,
}

impl Default for UbCountJob {
    fn default() -> Self {
        UbCountJob {
            strategy: VarOrderStrategy::default(),
            definability: SolverConfig::default(),
            counting: SolverConfig::unlimited(),
            pac: PacParams::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UbCountResult {
    /// The support handed to the counter.
    pub support: SupportSet,
    /// The UBS search timed out and the projection set was used instead.
    pub fell_back: bool,
    pub count: Result<ApproxCount, CountError>,
}

/// Upper-bound projected counting: compute a UBS of `p` under
/// `pre_deadline`, then count on it. The count deadline is created only
/// once preprocessing has finished.
///
/// If the UBS search times out, the partial result `J ∪ Q` is still a UBS;
/// the smaller of it and `p` is used, `p` on ties.
pub fn ubcount<D: Deadline>(
    f: &Formula,
    p: &ProjectionSet,
    job: &UbCountJob,
    pre_deadline: &dyn Deadline,
    count_deadline: impl FnOnce() -> D,
) -> Result<UbCountResult, CountError> {
    job.pac.validate()?;
    let found = find_ubs(f, p, job.strategy, &job.definability, pre_deadline)?;
    let (support, fell_back) = if found.timed_out && p.len() <= found.len() {
        (
            SupportSet {
                vars: p.clone(),
                kind: SupportKind::UpperBound,
                minimal: false,
                timed_out: true,
                log: found.log,
            },
            true,
        )
    } else {
        (found, false)
    };
    let deadline = count_deadline();
    let count = approx_count(f, &support.vars, job.pac, job.seed, &job.counting, &deadline);
    Ok(UbCountResult {
        support,
        fell_back,
        count,
    })
}

/// Exact count as an [`ApproxCount`] with exponent zero, for uniform
/// reporting.
pub fn exact_as_report(value: &BigUint, s: &VarSet, params: PacParams) -> Option<ApproxCount> {
    let mantissa = if value.is_zero() {
        0
    } else {
        u64::try_from(value.clone()).ok()?
    };
    Some(ApproxCount {
        mantissa,
        exponent: 0,
        epsilon: params.epsilon,
        delta: params.delta,
        support_used: s.clone(),
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deadline::{Expired, Never};
    use alloc::string::ToString;

    fn exact(f: &Formula, s: &VarSet) -> u64 {
        let c = count_exact_projected(f, s, None, &SolverConfig::unlimited(), &Never).unwrap();
        assert!(c.complete);
        u64::try_from(c.value).unwrap()
    }

    #[test]
    fn exact_examples() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        assert_eq!(exact(&f, &VarSet::range(2)), 3);
        assert_eq!(exact(&f, &VarSet::from_ids([1])), 2);
        assert_eq!(exact(&f, &VarSet::new()), 1);
        let unsat = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        assert_eq!(exact(&unsat, &VarSet::range(1)), 0);
    }

    #[test]
    fn exact_limit_marks_lower_bound() {
        let f = Formula::new(4);
        let c = count_exact_projected(&f, &VarSet::range(4), Some(5), &SolverConfig::unlimited(), &Never).unwrap();
        assert!(!c.complete);
        assert_eq!(c.value, BigUint::from(6u32));
    }

    #[test]
    fn exact_honours_deadline() {
        let f = Formula::new(4);
        let err = count_exact_projected(&f, &VarSet::range(4), None, &SolverConfig::unlimited(), &Expired);
        assert_eq!(err, Err(CountError::Timeout));
    }

    #[test]
    fn pivot_and_rounds_at_defaults() {
        let p = PacParams::default();
        // 9.84 * (1 + 0.8/1.8) * (1 + 1/0.8)^2 = 71.955
        assert_eq!(p.pivot(), 72);
        // 17 * log2(15) = 66.42
        assert_eq!(p.rounds(), 67);
    }

    #[test]
    fn invalid_params() {
        assert!(PacParams::new(0.0, 0.2).is_err());
        assert!(PacParams::new(0.8, 0.0).is_err());
        assert!(PacParams::new(0.8, 1.5).is_err());
        assert!(PacParams::new(0.8, 1.0).is_ok());
    }

    #[test]
    fn small_count_is_exact() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2, 3]]);
        let c = approx_count(&f, &VarSet::range(3), PacParams::default(), 1, &SolverConfig::unlimited(), &Never).unwrap();
        assert!(c.exact);
        assert_eq!((c.mantissa, c.exponent), (7, 0));
        assert_eq!(c.to_string(), "7*2^0");
    }

    #[test]
    fn unsat_counts_zero() {
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let c = approx_count(&f, &VarSet::range(1), PacParams::default(), 1, &SolverConfig::unlimited(), &Never).unwrap();
        assert_eq!(c.to_string(), "0*2^0");
        assert!(c.is_zero());
    }

    #[test]
    fn approx_is_deterministic_and_close() {
        let f = Formula::new(10);
        let s = VarSet::range(10);
        let run = |seed| approx_count(&f, &s, PacParams::default(), seed, &SolverConfig::unlimited(), &Never).unwrap();
        let a = run(7);
        assert_eq!(a, run(7));
        let v = a.log2();
        assert!((v - 10.0).abs() < libm::log2(1.8) + 1e-9, "estimate {a}");
    }

    #[test]
    fn approx_honours_deadline() {
        let f = Formula::new(10);
        let r = approx_count(&f, &VarSet::range(10), PacParams::default(), 1, &SolverConfig::unlimited(), &Expired);
        assert_eq!(r, Err(CountError::Timeout));
    }

    #[test]
    fn ubcount_falls_back_on_zero_preprocessing_budget() {
        let f = Formula::from_dimacs_clauses(4, &[&[1, 2], &[-2, 3, 4]]);
        let p = VarSet::from_ids([1, 2]);
        let job = UbCountJob::default();
        let r = ubcount(&f, &p, &job, &Expired, || Never).unwrap();
        assert!(r.fell_back);
        assert_eq!(r.support.vars, p);
        let direct = approx_count(&f, &p, job.pac, job.seed, &job.counting, &Never).unwrap();
        assert_eq!(r.count.unwrap(), direct);
    }

    #[test]
    fn sample_xor_is_seeded() {
        let s = VarSet::range(20);
        let a = sample_xor(&s, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_xor(&s, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.vars().iter().all(|&v| s.contains(v)));
    }
}
