//! Testers for linear functions and low-degree polynomials.

use rand::seq::index::sample;
use rand::Rng;

use super::{settle, Decision, ModelKind, QueryOracle, Verdict};
use crate::boolfn::BitVector;
use crate::error::{capacity, invalid, Result};
use crate::gf2::{d_evaluation, find_subset_with_size_hint, rank, solve, Gf2Matrix, MonomialBasis};

/// Surplus samples beyond the dimension used by the passive testers.
pub const DEFAULT_SURPLUS: usize = 10;
/// Largest monomial basis handed to the passive polynomial solver.
pub const MAX_POLY_SOLVER_COLUMNS: usize = 1 << 14;

/// Elimination restarts per target in the subset search.
const SEARCH_ATTEMPTS: usize = 64;
/// Pool points tried per repetition before settling for a larger subset.
const POINT_TRIES: usize = 8;

/// `q = ceil(3n / log2 u)`.
pub fn active_linear_query_size(n: usize, u: usize) -> usize {
    if u < 2 {
        return n.max(1);
    }
    (3.0 * n as f64 / (u as f64).log2()).ceil() as usize
}

/// Each repetition picks a pool point `x`, finds other pool points XORing to
/// `x` (aiming for at most `q` of them) and checks that the answers XOR to
/// `f(x)`. Linear functions are never rejected.
pub fn active_linear_tester<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    repetitions: usize,
    rng: &mut R,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Active], "active_linear_tester")?;
    let run = run_active_linear(oracle, repetitions, rng);
    settle(oracle, run)
}

fn run_active_linear<R: Rng + ?Sized>(oracle: &mut QueryOracle, repetitions: usize, rng: &mut R) -> Result<Verdict> {
    let n = oracle.n();
    let pool = oracle.pool().to_vec();
    let u = pool.len();
    let q = active_linear_query_size(n, u);
    let mut notes = vec![format!("q = {q}")];
    if u < n * n {
        notes.push(format!("pool size {u} below n^2 = {}", n * n));
    }
    if u < 2 {
        notes.push("pool too small for a dependency".into());
        return Ok(Verdict::of(Decision::Inconclusive, oracle, notes));
    }
    let mut largest = 0;
    for rep in 0..repetitions {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for i in sample(rng, u, POINT_TRIES.min(u)) {
            let others: Vec<BitVector> = pool.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect();
            let Some(found) = find_subset_with_size_hint(&others, &pool[i], q, SEARCH_ATTEMPTS, rng)? else {
                continue;
            };
            let subset: Vec<usize> = found.into_iter().map(|j| if j < i { j } else { j + 1 }).collect();
            if best.as_ref().is_none_or(|(_, b)| subset.len() < b.len()) {
                best = Some((i, subset));
            }
            if best.as_ref().is_some_and(|(_, b)| b.len() <= q) {
                break;
            }
        }
        let Some((i, subset)) = best else {
            notes.push(format!("no dependency found in the pool (repetition {rep})"));
            return Ok(Verdict::of(Decision::Inconclusive, oracle, notes));
        };
        largest = largest.max(subset.len());
        let mut parity = false;
        for &j in &subset {
            parity ^= oracle.query_pool(j)?;
        }
        if oracle.query_pool(i)? != parity {
            notes.push(format!("dependency of size {} violated in repetition {rep}", subset.len()));
            return Ok(Verdict::of(Decision::Reject, oracle, notes));
        }
    }
    notes.push(format!("largest dependency used {largest}"));
    Ok(Verdict::of(Decision::Accept, oracle, notes))
}

/// Result of fitting a linear function to labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    /// Rank of the sample points.
    pub rank: usize,
    /// A coefficient vector consistent with every sample, if one exists.
    pub solution: Option<BitVector>,
    /// The consistent solution is unique (the points span the space).
    pub unique: bool,
}

impl LinearFit {
    pub fn consistent(&self) -> bool {
        self.solution.is_some()
    }
}

fn fit_rows(rows: &[BitVector], values: &[bool], cols: usize) -> Result<LinearFit> {
    let m = Gf2Matrix::from_rows(rows, cols)?;
    let b = BitVector::from_bools(values);
    let r = rank(&m);
    let solution = solve(&m, &b)?;
    Ok(LinearFit {
        rank: r,
        unique: solution.is_some() && r == cols,
        solution,
    })
}

/// Fits `f(x) = <a, x>` to the samples over `Z_2^n`.
pub fn fit_linear(samples: &[(BitVector, bool)], n: usize) -> Result<LinearFit> {
    let rows: Vec<BitVector> = samples.iter().map(|(x, _)| x.clone()).collect();
    let values: Vec<bool> = samples.iter().map(|(_, v)| *v).collect();
    fit_rows(&rows, &values, n)
}

/// Reveals `sample_size` points and accepts iff some linear function is
/// consistent with all of them. When the points span `Z_2^n` this is the
/// unique consistent function checked on the surplus points.
pub fn passive_linear_tester(oracle: &mut QueryOracle, sample_size: usize) -> Result<Verdict> {
    oracle.require(&[ModelKind::Passive], "passive_linear_tester")?;
    let run = (|| {
        let n = oracle.n();
        let samples = oracle.reveal(sample_size)?;
        let fit = fit_linear(&samples, n)?;
        let mut notes = vec![format!("rank {} of {n}", fit.rank)];
        if sample_size < n + DEFAULT_SURPLUS {
            notes.push(format!("sample size below n + {DEFAULT_SURPLUS}"));
        }
        let decision = if fit.consistent() { Decision::Accept } else { Decision::Reject };
        Ok(Verdict::of(decision, oracle, notes))
    })();
    settle(oracle, run)
}

/// Learns a degree-`d` polynomial from the first `sample_size - holdout`
/// points through their d-evaluations and checks it on the last `holdout`
/// points. When the learning block leaves the polynomial undetermined, the
/// learned polynomial is taken consistent with the holdout block if possible,
/// so members are always accepted.
pub fn passive_polynomial_tester(
    oracle: &mut QueryOracle,
    d: usize,
    sample_size: usize,
    holdout: usize,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Passive], "passive_polynomial_tester")?;
    let n = oracle.n();
    if holdout > sample_size {
        return Err(invalid(format!("holdout {holdout} exceeds sample size {sample_size}")));
    }
    let nd = MonomialBasis::size_for(n, d.min(n)).unwrap_or(u128::MAX);
    if nd > MAX_POLY_SOLVER_COLUMNS as u128 {
        return Err(capacity(format!("polynomial solver with n_d = {nd}"), MAX_POLY_SOLVER_COLUMNS as u64));
    }
    let basis = MonomialBasis::new(n, d.min(n))?;
    let run = (|| {
        let samples = oracle.reveal(sample_size)?;
        let rows: Vec<BitVector> = samples
            .iter()
            .map(|(x, _)| d_evaluation(x, &basis))
            .collect::<Result<_>>()?;
        let values: Vec<bool> = samples.iter().map(|(_, v)| *v).collect();
        let split = sample_size - holdout;
        let learned = fit_rows(&rows[..split], &values[..split], basis.len())?;
        let mut notes = vec![format!("learning rank {} of n_d = {}", learned.rank, basis.len())];
        if !learned.consistent() {
            notes.push("learning block inconsistent".into());
            return Ok(Verdict::of(Decision::Reject, oracle, notes));
        }
        if !fit_rows(&rows, &values, basis.len())?.consistent() {
            notes.push("holdout block disagrees".into());
            return Ok(Verdict::of(Decision::Reject, oracle, notes));
        }
        Ok(Verdict::of(Decision::Accept, oracle, notes))
    })();
    settle(oracle, run)
}
