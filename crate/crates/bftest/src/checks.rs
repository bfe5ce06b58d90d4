//! Self-checks of library quantities against independent computations.

use bftest_core::boolfn::{fraction_to_f64, walsh_hadamard};
use bftest_core::families::exact_distance_to_family;
use bftest_core::gf2::{d_evaluation, rank, Gf2Matrix, MonomialBasis};
use bftest_core::stats::proportion_std_error;
use bftest_core::testers::{blr_exact_acceptance, blr_far_bound, blr_fourier_acceptance, collision_probability};
use bftest_core::{BitVector, BooleanFunction, Family};
use clap::ValueEnum;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::runner::trial_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    /// Exact BLR-k acceptance equals the Fourier formula and obeys the far bound.
    BlrFormula,
    /// Parseval on random truth tables.
    Parseval,
    /// Same-weight collision rate of uniform points against the exact value.
    Birthday,
    /// Linear independence of d-evaluations of random points.
    Rank,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: CheckId,
    pub passed: bool,
    pub details: Vec<String>,
}

fn random_table<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BooleanFunction {
    BooleanFunction::from_truth_table(n, BitVector::random(1 << n, rng)).expect("n within table limit")
}

/// Exact per-round acceptance equals `1/2 + 1/2 sum_S f(S)^(2k+1)` within
/// `1e-9`, and is at most `1/2 + 1/2 (1 - 2 eps_f)^(2k-1)`.
pub fn blr_formula(functions: usize, n: usize, ks: &[usize], seed: u64) -> Result<CheckReport> {
    let mut details = Vec::new();
    let mut passed = true;
    let mut worst_gap = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    for t in 0..functions {
        let mut rng = trial_rng(seed, t as u64);
        let f = random_table(n, &mut rng);
        let spectrum = walsh_hadamard(&f)?;
        let eps = fraction_to_f64(&exact_distance_to_family(&f, &Family::linear(n))?);
        for &k in ks {
            let exact = blr_exact_acceptance(&f, k)?;
            let fourier = blr_fourier_acceptance(&spectrum, k);
            let bound = blr_far_bound(eps, k);
            worst_gap = worst_gap.max((exact - fourier).abs());
            worst_slack = worst_slack.min(bound - exact);
            if (exact - fourier).abs() > 1e-9 || exact > bound + 1e-12 {
                passed = false;
                details.push(format!("function {t}, k = {k}: exact {exact}, formula {fourier}, bound {bound}"));
            }
        }
    }
    details.push(format!("max |exact - formula| = {worst_gap:.3e}; min (bound - exact) = {worst_slack:.6}"));
    Ok(CheckReport {
        check: CheckId::BlrFormula,
        passed,
        details,
    })
}

/// `sum_S f(S)^2 = 1` within `1e-9` for random tables with `n <= 12`.
pub fn parseval(functions: usize, seed: u64) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for t in 0..functions {
        let mut rng = trial_rng(seed, t as u64);
        let n = rng.gen_range(1..=12);
        worst = worst.max((walsh_hadamard(&random_table(n, &mut rng))?.parseval_sum() - 1.0).abs());
    }
    Ok(CheckReport {
        check: CheckId::Parseval,
        passed: worst <= 1e-9,
        details: vec![format!("max |sum f(S)^2 - 1| = {worst:.3e} over {functions} functions")],
    })
}

/// Empirical same-weight rate over `pairs` uniform pairs at dimension `n`,
/// its exact value `C(2n, n) / 4^n`, and whether they agree within a factor
/// of two.
pub fn birthday(n: usize, pairs: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = trial_rng(seed, 0);
    let hits = (0..pairs)
        .filter(|_| BitVector::random(n, &mut rng).weight() == BitVector::random(n, &mut rng).weight())
        .count();
    let empirical = hits as f64 / pairs as f64;
    let exact = collision_probability(n);
    let ratio = empirical / exact;
    Ok(CheckReport {
        check: CheckId::Birthday,
        passed: (0.5..=2.0).contains(&ratio),
        details: vec![
            format!("n = {n}, pairs = {pairs}: empirical {empirical:.6}, exact {exact:.6}, ratio {ratio:.4}"),
            format!("sqrt(n) * exact = {:.4}", exact * (n as f64).sqrt()),
        ],
    })
}

/// Fraction of trials in which `q` uniform points have linearly independent
/// d-evaluations.
pub fn independent_rate(n: usize, d: usize, q: usize, trials: usize, seed: u64) -> Result<f64> {
    let basis = MonomialBasis::new(n, d)?;
    let mut ok = 0usize;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let rows: Vec<BitVector> =
            (0..q).map(|_| d_evaluation(&BitVector::random(n, &mut rng), &basis)).collect::<Result<_, _>>()?;
        if rank(&Gf2Matrix::from_rows(&rows, basis.len())?) == q {
            ok += 1;
        }
    }
    Ok(ok as f64 / trials as f64)
}

/// Independence rate at least `1 - q 2^(-n/d) - 3 sigma`.
pub fn rank_check(n: usize, d: usize, q: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    let rate = independent_rate(n, d, q, trials, seed)?;
    let bound = 1.0 - q as f64 * (-(n as f64) / d as f64).exp2();
    let sigma = proportion_std_error(rate, trials as u64);
    Ok(CheckReport {
        check: CheckId::Rank,
        passed: rate >= bound - 3.0 * sigma,
        details: vec![format!(
            "n = {n}, d = {d}, q = {q}: independent in {rate:.4} of {trials} trials; bound {bound:.4}, sigma {sigma:.4}"
        )],
    })
}

/// Runs a check at its standard parameters.
pub fn run_check(check: CheckId, trials: Option<usize>, seed: u64) -> Result<CheckReport> {
    match check {
        CheckId::BlrFormula => blr_formula(trials.unwrap_or(200), 8, &[1, 2], seed),
        CheckId::Parseval => parseval(trials.unwrap_or(200), seed),
        CheckId::Birthday => birthday(64, trials.unwrap_or(100_000), seed),
        CheckId::Rank => {
            let (n, d) = (14, 2);
            let nd = MonomialBasis::size_for(n, d).expect("small") as f64;
            let q = (nd / (2.0 * std::f64::consts::E)).floor() as usize;
            rank_check(n, d, q, trials.unwrap_or(10_000), seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_pass_at_small_scale() {
        assert!(blr_formula(10, 6, &[1, 2], 1).unwrap().passed);
        assert!(parseval(20, 1).unwrap().passed);
        assert!(birthday(64, 20_000, 1).unwrap().passed);
        assert!(rank_check(14, 2, 19, 500, 1).unwrap().passed);
    }

    #[test]
    fn rank_check_fails_when_points_exceed_the_basis() {
        assert_eq!(independent_rate(4, 1, 6, 50, 1).unwrap(), 0.0);
    }
}
