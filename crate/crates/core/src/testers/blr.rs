//! The amplified BLR test: `f(x_1) + ... + f(x_2k) = f(x_1 + ... + x_2k)`.

use rand::Rng;

use super::{settle, Decision, ModelKind, QueryOracle, Verdict};
use crate::boolfn::{BitVector, BooleanFunction, FourierSpectrum};
use crate::error::{capacity, invalid, Result};

/// Repetitions used by amplified tests unless configured otherwise.
pub const DEFAULT_REPETITIONS: usize = 10;

/// Largest `n` for the exact acceptance computation.
const MAX_EXACT_N: usize = 12;

/// Runs `repetitions` independent rounds of the `2k`-point identity on
/// fresh uniform points. Needs `(2k + 1) * repetitions` classic queries.
pub fn blr_k_test<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    k: usize,
    repetitions: usize,
    rng: &mut R,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Classic], "blr_k_test")?;
    if k == 0 {
        return Err(invalid("blr_k_test needs k >= 1"));
    }
    let run = run_blr(oracle, k, repetitions, rng);
    settle(oracle, run)
}

fn run_blr<R: Rng + ?Sized>(oracle: &mut QueryOracle, k: usize, repetitions: usize, rng: &mut R) -> Result<Verdict> {
    let n = oracle.n();
    for rep in 0..repetitions {
        let mut sum = BitVector::zeros(n);
        let mut parity = false;
        for _ in 0..2 * k {
            let x = BitVector::random(n, rng);
            sum ^= &x;
            parity ^= oracle.query(&x)?;
        }
        if oracle.query(&sum)? != parity {
            return Ok(Verdict::of(
                Decision::Reject,
                oracle,
                vec![format!("identity violated in repetition {rep}")],
            ));
        }
    }
    Ok(Verdict::of(Decision::Accept, oracle, Vec::new()))
}

/// Probability that one round accepts, by exact convolution over the cube
/// (`n <= 12`).
pub fn blr_exact_acceptance(f: &BooleanFunction, k: usize) -> Result<f64> {
    let n = f.n();
    if k == 0 {
        return Err(invalid("blr_exact_acceptance needs k >= 1"));
    }
    if n > MAX_EXACT_N || 2 * k * n > 120 {
        return Err(capacity(format!("exact BLR acceptance at n = {n}, k = {k}"), MAX_EXACT_N as u64));
    }
    let table = f.truth_table()?;
    let size = 1usize << n;
    let g: Vec<i128> = (0..size).map(|x| if table.get(x) { -1 } else { 1 }).collect();
    // conv[z] = sum over tuples (x_1..x_j) with x_1 + ... + x_j = z of prod g(x_i)
    let mut conv = g.clone();
    for _ in 1..2 * k {
        conv = (0..size)
            .map(|z| (0..size).map(|x| conv[x] * g[z ^ x]).sum())
            .collect();
    }
    let total: i128 = (0..size).map(|z| conv[z] * g[z]).sum();
    let scale = (2.0f64).powi((2 * k * n) as i32);
    Ok(0.5 + 0.5 * total as f64 / scale)
}

/// `1/2 + 1/2 sum_S \hat f(S)^(2k + 1)`.
pub fn blr_fourier_acceptance(spectrum: &FourierSpectrum, k: usize) -> f64 {
    0.5 + 0.5 * spectrum.moment(2 * k as i32 + 1)
}

/// Upper bound on one round's acceptance for a function `epsilon`-far from
/// linear: `1/2 + 1/2 (1 - 2 epsilon)^(2k - 1)`.
pub fn blr_far_bound(epsilon: f64, k: usize) -> f64 {
    0.5 + 0.5 * (1.0 - 2.0 * epsilon).powi(2 * k as i32 - 1)
}
