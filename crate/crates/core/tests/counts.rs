//! Exact and approximate counting against enumeration.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ubcount_core::oracle;
use ubcount_core::{
    approx_count, count_exact_projected, gen_random, gen_theorem1, sample_xor, ubcount,
    CountError, Expired, Formula, Never, PacParams, SolverConfig, UbCountJob, VarSet,
};

fn instance() -> impl Strategy<Value = (Formula, VarSet)> {
    (2u32..=15, 0u32..45, 1u32..=4, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, m, w, frac, seed)| gen_random(n, m, w.min(n), frac, seed).unwrap())
}

fn count_projected(f: &Formula, s: &VarSet) -> Result<u64, oracle::OracleError> {
    oracle::count_projected(f, s).map(|c| c as u64)
}

fn exact(f: &Formula, s: &VarSet) -> u64 {
    let c = count_exact_projected(f, s, None, &SolverConfig::unlimited(), &Never).unwrap();
    assert!(c.complete);
    u64::try_from(c.value).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn exact_count_matches_enumeration((f, s) in instance()) {
        prop_assert_eq!(exact(&f, &s), count_projected(&f, &s).unwrap());
    }

    #[test]
    fn count_grows_with_the_set((f, s) in instance(), extra in any::<u32>()) {
        let wider: VarSet = s.union(&(1..=f.num_vars()).filter(|i| extra >> (i % 32) & 1 == 1).collect::<Vec<u32>>().into_iter().map(ubcount_core::Var::from_id).collect());
        prop_assert!(exact(&f, &s) <= exact(&f, &wider));
        prop_assert!(exact(&f, &wider) <= exact(&f, &VarSet::range(f.num_vars())));
    }

    #[test]
    fn fresh_variable_doubles((f, s) in instance()) {
        let mut g = f.clone();
        let fresh = g.new_var();
        let mut t = s.clone();
        t.insert(fresh);
        prop_assert_eq!(exact(&g, &t), 2 * exact(&f, &s));
    }

    #[test]
    fn limited_count_reports_incomplete((f, s) in instance(), limit in 0u64..8) {
        let full = count_projected(&f, &s).unwrap();
        let c = count_exact_projected(&f, &s, Some(limit), &SolverConfig::unlimited(), &Never).unwrap();
        if full > limit {
            prop_assert!(!c.complete);
            prop_assert_eq!(c.value, BigUint::from(limit + 1));
        } else {
            prop_assert!(c.complete);
            prop_assert_eq!(c.value, BigUint::from(full));
        }
    }

    #[test]
    fn small_spaces_are_counted_exactly((f, s) in instance(), seed in any::<u64>()) {
        let full = count_projected(&f, &s).unwrap();
        prop_assume!(full <= PacParams::default().pivot());
        let a = approx_count(&f, &s, PacParams::default(), seed, &SolverConfig::unlimited(), &Never).unwrap();
        prop_assert!(a.exact);
        prop_assert_eq!(a.value(), BigUint::from(full));
    }
}

#[test]
fn pac_defaults() {
    let p = PacParams::default();
    assert_eq!(p.pivot(), 72);
    assert_eq!(p.rounds(), 67);
    assert!(matches!(PacParams::new(0.0, 0.2), Err(CountError::InvalidParams(_))));
    assert!(matches!(PacParams::new(0.8, 1.5), Err(CountError::InvalidParams(_))));
}

#[test]
fn xor_sampling_is_fair() {
    let s = VarSet::range(20);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 10_000;
    let mut total = 0usize;
    let mut rhs_true = 0usize;
    for _ in 0..draws {
        let x = sample_xor(&s, &mut rng);
        total += x.vars().len();
        rhs_true += usize::from(x.rhs());
    }
    // Mean size 10, sd of the mean sqrt(20/4/draws).
    let mean = total as f64 / draws as f64;
    assert!((mean - 10.0).abs() < 3.0 * (5.0 / draws as f64).sqrt(), "mean {mean}");
    let p = rhs_true as f64 / draws as f64;
    assert!((p - 0.5).abs() < 3.0 * (0.25 / draws as f64).sqrt(), "rhs {p}");

    // Over a single variable the four (member, rhs) outcomes are uniform.
    let one = VarSet::from_ids([5]);
    let mut cells = [0f64; 4];
    for _ in 0..draws {
        let x = sample_xor(&one, &mut rng);
        cells[usize::from(!x.vars().is_empty()) * 2 + usize::from(x.rhs())] += 1.0;
    }
    let e = draws as f64 / 4.0;
    let chi2: f64 = cells.iter().map(|c| (c - e) * (c - e) / e).sum();
    // 99.9% quantile of chi-squared with 3 degrees of freedom.
    assert!(chi2 < 16.27, "chi2 {chi2}");
}

/// 12 free projected variables tied to 4 hidden ones: 2^12 projections.
fn wide_instance() -> (Formula, VarSet) {
    let f = Formula::from_dimacs_clauses(
        16,
        &[&[1, -13], &[-1, 13], &[2, -14], &[-2, 14], &[3, -15], &[-3, 15], &[4, -16], &[-4, 16]],
    );
    (f, VarSet::range(12))
}

#[test]
fn pac_estimate_lands_in_band() {
    let (f, s) = wide_instance();
    assert_eq!(count_projected(&f, &s).unwrap(), 4096);
    let params = PacParams::default();
    let lo = 4096.0 / (1.0 + params.epsilon);
    let hi = 4096.0 * (1.0 + params.epsilon);
    let inside = (0..20u64)
        .filter(|&seed| {
            let a = approx_count(&f, &s, params, seed, &SolverConfig::unlimited(), &Never).unwrap();
            assert!(!a.exact);
            let v = a.mantissa as f64 * 2f64.powi(a.exponent as i32);
            (lo..=hi).contains(&v)
        })
        .count();
    assert!(inside >= 16, "{inside} of 20 inside");
}

#[test]
fn pac_is_deterministic_per_seed() {
    let (f, s) = wide_instance();
    let run = |seed| approx_count(&f, &s, PacParams::default(), seed, &SolverConfig::unlimited(), &Never).unwrap();
    assert_eq!(run(3), run(3));
    assert_eq!(run(3).to_string(), format!("{}*2^{}", run(3).mantissa, run(3).exponent));
}

#[test]
fn ubcount_on_binary_family_counts_through_the_ys() {
    let inst = gen_theorem1(16).unwrap();
    let r = ubcount(&inst.formula, &inst.projection, &UbCountJob::default(), &Never, || Never).unwrap();
    assert!(!r.fell_back);
    assert_eq!(r.support.vars.len(), 4);
    let c = r.count.unwrap();
    assert!(c.exact);
    assert_eq!(c.value(), BigUint::from(16u32));
}

#[test]
fn ubcount_with_no_preprocessing_time_uses_the_projection() {
    let inst = gen_theorem1(8).unwrap();
    let r = ubcount(&inst.formula, &inst.projection, &UbCountJob::default(), &Expired, || Never).unwrap();
    assert!(r.fell_back);
    assert_eq!(r.support.vars, inst.projection);
    assert_eq!(r.count.unwrap().value(), BigUint::from(8u32));
}

#[test]
fn ubcount_counting_timeout_is_reported() {
    let (f, s) = wide_instance();
    let r = ubcount(&f, &s, &UbCountJob::default(), &Never, || Expired).unwrap();
    assert_eq!(r.count, Err(CountError::Timeout));
}

#[test]
fn unsat_formula_counts_zero() {
    let f = Formula::from_dimacs_clauses(2, &[&[1], &[-1]]);
    let a = approx_count(&f, &VarSet::range(2), PacParams::default(), 0, &SolverConfig::unlimited(), &Never).unwrap();
    assert!(a.is_zero());
    assert_eq!(a.to_string(), "0*2^0");
}
