//! Boolean functions `f: Z_2^n -> Z_2`: representations, truth tables,
//! distances and Fourier analysis.
//!
//! Truth-table index encoding is fixed throughout the crate: coordinate `i`
//! of `x` is bit `i` of the table index. Coordinates are 0-based.

mod bitvec;
mod descriptor;
mod fourier;
mod function;
pub mod io;

use num_rational::Ratio;
use rand::Rng;

pub use bitvec::BitVector;
pub(crate) use bitvec::words_for;
pub use fourier::{walsh_hadamard, walsh_hadamard_counts, FourierSpectrum};
pub use function::{BooleanFunction, Repr, MAX_TABLE_VARS};

use crate::error::{check_dim, invalid, Result};

/// Exact distances and probabilities. Denominators are powers of two up to
/// `2^126` or binomial coefficients, so `u128` suffices.
pub type Fraction = Ratio<u128>;

/// Lossy conversion for reporting.
pub fn fraction_to_f64(f: &Fraction) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// Fraction of points where `f` and `g` disagree, computed exactly from
/// truth tables (`n <= 24`).
pub fn exact_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<Fraction> {
    check_dim(f.n(), g.n())?;
    let tf = f.truth_table()?;
    let tg = g.truth_table()?;
    Ok(table_distance(&tf, &tg))
}

/// Distance between two truth tables of equal length.
pub fn table_distance(a: &BitVector, b: &BitVector) -> Fraction {
    let diff = (a ^ b).weight() as u128;
    Fraction::new(diff, a.len() as u128)
}

/// Mean disagreement of `f` and `g` over `samples` independent uniform points.
///
/// The standard error is at most `1 / (2 sqrt(samples))`.
pub fn estimate_distance<R: Rng + ?Sized>(
    f: &BooleanFunction,
    g: &BooleanFunction,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_dim(f.n(), g.n())?;
    if samples == 0 {
        return Err(invalid("estimate_distance needs at least one sample"));
    }
    let mut disagree = 0usize;
    for _ in 0..samples {
        let x = BitVector::random(f.n(), rng);
        if f.eval_words(x.words()) != g.eval_words(x.words()) {
            disagree += 1;
        }
    }
    Ok(disagree as f64 / samples as f64)
}
