//! Instance generators: the two extremal formula families separating
//! independent supports from upper bound supports, and uniform random CNF.

use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Formula, Lit, ProjectionSet, Var, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("n = {0} must be a power of two and at least {1}")]
    BadSize(u32, u32),
    #[error("invalid random instance shape: {0}")]
    BadShape(&'static str),
}

/// A generated formula with its projection set and the sizes and count the
/// construction guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub name: alloc::string::String,
    pub formula: Formula,
    pub projection: ProjectionSet,
    pub expected_ubs_size: usize,
    pub expected_is_size: usize,
    pub expected_projected_count: u64,
}

fn log2_exact(n: u32, min: u32) -> Result<u32, FamilyError> {
    if n < min || !n.is_power_of_two() {
        return Err(FamilyError::BadSize(n, min));
    }
    Ok(n.trailing_zeros())
}

/// Variable `x_i` (`1 <= i < n`).
pub fn x_var(i: u32) -> Var {
    Var::from_id(i)
}

/// Variable `y_j` (`1 <= j <= log₂ n`), `y_1` being the most significant bit.
pub fn y_var(n: u32, j: u32) -> Var {
    Var::from_id(n - 1 + j)
}

/// Literal on `y_j` that is true when `y_j` matches bit `j` of `i`.
fn y_bit(n: u32, k: u32, i: u32, j: u32) -> Lit {
    let bit = i >> (k - j) & 1 == 1;
    Lit::new(y_var(n, j), !bit)
}

/// Family whose smallest upper bound support `{y_1..y_k}` (k = log₂ n) lies
/// outside the projection set `{x_1..x_{n-1}}`, which is its own smallest
/// independent support.
///
/// Models: the all-zero assignment, and for each `i` in `1..n` the
/// assignment with only `x_i` set among the x's and the y's spelling `i` in
/// binary. Each `x_i ⇔ (y = bin(i))` is written as `k` implications plus
/// one reverse clause.
pub fn gen_theorem1(n: u32) -> Result<FamilyInstance, FamilyError> {
    let k = log2_exact(n, 2)?;
    let mut f = Formula::new(n - 1 + k);
    for i in 1..n {
        let x = x_var(i);
        for j in 1..=k {
            f.add_clause([x.neg(), y_bit(n, k, i, j)])
                .expect("in range");
        }
        let mut back: Vec<Lit> = (1..=k).map(|j| !y_bit(n, k, i, j)).collect();
        back.push(x.pos());
        f.add_clause(back).expect("in range");
    }
    Ok(FamilyInstance {
        name: alloc::format!("phi{n}"),
        formula: f,
        projection: (1..n).map(x_var).collect(),
        expected_ubs_size: k as usize,
        expected_is_size: (n - 1) as usize,
        expected_projected_count: u64::from(n),
    })
}

/// The projection set `{x_1..x_{n-1}} \ {x_1, x_2, x_4, .., x_{n/2}}`.
pub fn one_hot_projection(n: u32) -> Result<ProjectionSet, FamilyError> {
    log2_exact(n, 4)?;
    Ok((1..n).filter(|i| !i.is_power_of_two()).map(x_var).collect())
}

/// Family where the projection set `Q` is its own smallest upper bound
/// support: all y's are forced false and at most one x is true, so the
/// models are the all-zero assignment and the `n - 1` one-hot x vectors.
pub fn gen_theorem2(n: u32) -> Result<FamilyInstance, FamilyError> {
    let k = log2_exact(n, 4)?;
    let mut f = Formula::new(n - 1 + k);
    for j in 1..=k {
        f.add_clause([y_var(n, j).neg()]).expect("in range");
    }
    for a in 1..n {
        for b in a + 1..n {
            f.add_clause([x_var(a).neg(), x_var(b).neg()])
                .expect("in range");
        }
    }
    let q = one_hot_projection(n)?;
    let size = q.len();
    Ok(FamilyInstance {
        name: alloc::format!("psi{n}"),
        formula: f,
        projection: q,
        expected_ubs_size: size,
        expected_is_size: size,
        expected_projected_count: size as u64 + 1,
    })
}

/// Uniform random CNF: each clause picks `width` distinct variables and
/// random signs; the projection set is a random subset of
/// `⌈proj_fraction · num_vars⌉` variables.
pub fn gen_random(
    num_vars: u32,
    num_clauses: u32,
    width: u32,
    proj_fraction: f64,
    seed: u64,
) -> Result<(Formula, ProjectionSet), FamilyError> {
    if width == 0 || width > num_vars {
        return Err(FamilyError::BadShape("clause width must be in 1..=num_vars"));
    }
    if !(0.0..=1.0).contains(&proj_fraction) {
        return Err(FamilyError::BadShape("projection fraction must be in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Formula::new(num_vars);
    for _ in 0..num_clauses {
        let vars = sample(&mut rng, num_vars as usize, width as usize);
        let lits: Vec<Lit> = vars
            .iter()
            .map(|i| Lit::new(Var::from_index(i), rng.gen::<bool>()))
            .collect();
        f.add_clause(lits).expect("in range");
    }
    let k = (libm::ceil(proj_fraction * f64::from(num_vars)) as usize).min(num_vars as usize);
    let proj: VarSet = sample(&mut rng, num_vars as usize, k)
        .iter()
        .map(Var::from_index)
        .collect();
    Ok((f, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{count_projected, enumerate_models};

    #[test]
    fn binary_family_n4_model_table() {
        let inst = gen_theorem1(4).unwrap();
        let mut models = enumerate_models(&inst.formula).unwrap();
        // Bits: x1 x2 x3 y1 y2 as bits 0..4.
        let table = ["00000", "10001", "01010", "00111"];
        let mut expected: Vec<u32> = table
            .iter()
            .map(|row| {
                row.bytes()
                    .enumerate()
                    .fold(0u32, |m, (i, b)| m | (u32::from(b == b'1') << i))
            })
            .collect();
        expected.sort_unstable();
        models.sort_unstable();
        assert_eq!(models, expected);
    }

    #[test]
    fn binary_family_n2_degenerate() {
        let inst = gen_theorem1(2).unwrap();
        assert_eq!(inst.formula.num_vars(), 2);
        assert_eq!(enumerate_models(&inst.formula).unwrap().len(), 2);
        assert_eq!(inst.expected_ubs_size, 1);
        assert_eq!(inst.expected_is_size, 1);
    }

    #[test]
    fn binary_family_n8_counts() {
        let inst = gen_theorem1(8).unwrap();
        assert_eq!(enumerate_models(&inst.formula).unwrap().len(), 8);
        assert_eq!(count_projected(&inst.formula, &inst.projection).unwrap(), 8);
    }

    #[test]
    fn one_hot_projection_sets() {
        assert_eq!(one_hot_projection(4).unwrap().ids(), alloc::vec![3]);
        assert_eq!(one_hot_projection(8).unwrap().ids(), alloc::vec![3, 5, 6, 7]);
        let inst = gen_theorem2(8).unwrap();
        assert_eq!(count_projected(&inst.formula, &inst.projection).unwrap(), 5);
        for n in [4, 8, 16] {
            let inst = gen_theorem2(n).unwrap();
            assert_eq!(enumerate_models(&inst.formula).unwrap().len(), n as usize);
        }
    }

    #[test]
    fn size_validation() {
        assert_eq!(gen_theorem1(6), Err(FamilyError::BadSize(6, 2)));
        assert_eq!(gen_theorem1(1), Err(FamilyError::BadSize(1, 2)));
        assert_eq!(gen_theorem2(2), Err(FamilyError::BadSize(2, 4)));
    }

    #[test]
    fn random_is_seeded() {
        let a = gen_random(12, 30, 3, 0.5, 9).unwrap();
        let b = gen_random(12, 30, 3, 0.5, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.len(), 6);
        assert!(a.0.clauses().iter().all(|c| c.len() == 3));
        let (_, all) = gen_random(12, 30, 3, 1.0, 9).unwrap();
        assert_eq!(all, VarSet::range(12));
    }
}
