use serde::{Deserialize, Serialize};

use super::bitvec::BitVector;
use super::function::BooleanFunction;
use crate::error::Result;

/// Unnormalised Walsh-Hadamard transform of a truth table:
/// `out[S] = sum_x (-1)^(f(x) + <S, x>)`, with `S` read as a bitmask.
///
/// Values are exact integers in `[-2^n, 2^n]`.
pub fn walsh_hadamard_counts(table: &BitVector) -> Vec<i64> {
    let size = table.len();
    assert!(size.is_power_of_two(), "truth table length must be a power of two");
    let mut v: Vec<i64> = (0..size).map(|i| if table.get(i) { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < size {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    v
}

/// Fourier coefficients of `f` under the `b -> (-1)^b` convention.
///
/// Coefficient `S` is stored at index `S` read as a bitmask (bit `i` = coordinate `i`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    n: usize,
    coefficients: Vec<f64>,
}

impl FourierSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `\hat f(S)` for `S` given as a bitmask.
    pub fn get(&self, subset_mask: usize) -> f64 {
        self.coefficients[subset_mask]
    }

    /// `\hat f(S)` for `S` given as a list of coordinates.
    pub fn coefficient(&self, subset: &[usize]) -> f64 {
        self.get(subset.iter().fold(0usize, |m, &i| m | (1 << i)))
    }

    /// `sum_S \hat f(S)^2`, equal to 1 for any Boolean function.
    pub fn parseval_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Largest coefficient (signed, not absolute) and its mask; first on ties.
    pub fn max_coefficient(&self) -> (usize, f64) {
        self.coefficients
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (s, c)| if c > best.1 { (s, c) } else { best })
    }

    /// `sum_S \hat f(S)^power`.
    pub fn moment(&self, power: i32) -> f64 {
        self.coefficients.iter().map(|c| c.powi(power)).sum()
    }
}

/// Fast Walsh-Hadamard transform of `f` (requires `n <= 24`).
///
/// The division by `2^n` is exact in binary floating point, so each
/// coefficient is the exactly rounded value of the correlation.
pub fn walsh_hadamard(f: &BooleanFunction) -> Result<FourierSpectrum> {
    let table = f.truth_table()?;
    let scale = (f.n() as f64).exp2();
    let coefficients = walsh_hadamard_counts(&table)
        .into_iter()
        .map(|c| c as f64 / scale)
        .collect();
    Ok(FourierSpectrum {
        n: f.n(),
        coefficients,
    })
}
