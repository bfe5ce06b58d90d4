use itertools::Itertools;

use crate::boolfn::BitVector;
use crate::error::{capacity, check_dim, invalid, Result};
use crate::stats::binomial;

/// Largest basis that will be materialized.
pub const MAX_BASIS_SIZE: u64 = 1 << 22;

/// Monomials of degree at most `d` in `n` variables, ordered by degree and
/// then lexicographically. The first monomial is the constant `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    monomials: Vec<Vec<usize>>,
    masks: Vec<BitVector>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(invalid(format!("degree {d} exceeds n = {n}")));
        }
        let size = Self::size_for(n, d).filter(|&s| s <= MAX_BASIS_SIZE as u128);
        if size.is_none() {
            return Err(capacity(format!("monomial basis for n = {n}, d = {d}"), MAX_BASIS_SIZE));
        }
        let monomials: Vec<Vec<usize>> = (0..=d)
            .flat_map(|deg| (0..n).combinations(deg))
            .collect();
        let masks = monomials.iter().map(|m| BitVector::from_indices(n, m)).collect();
        Ok(Self {
            n,
            d,
            monomials,
            masks,
        })
    }

    /// `n_d = sum_{i <= d} C(n, i)`, `None` on overflow.
    pub fn size_for(n: usize, d: usize) -> Option<u128> {
        (0..=d.min(n)).try_fold(0u128, |acc, i| acc.checked_add(binomial(n as u64, i as u64)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    /// Position of a sorted monomial in the basis order.
    pub fn index_of(&self, monomial: &[usize]) -> Option<usize> {
        let deg = monomial.len();
        if deg > self.d {
            return None;
        }
        let start = if deg == 0 { 0 } else { Self::size_for(self.n, deg - 1)? as usize };
        let end = Self::size_for(self.n, deg)? as usize;
        self.monomials[start..end]
            .binary_search_by(|m| m.as_slice().cmp(monomial))
            .ok()
            .map(|i| start + i)
    }
}

/// Values at `x` of every basis monomial, in basis order.
pub fn d_evaluation(x: &BitVector, basis: &MonomialBasis) -> Result<BitVector> {
    check_dim(basis.n, x.len())?;
    let mut out = BitVector::zeros(basis.len());
    for (j, m) in basis.masks.iter().enumerate() {
        if m.is_subset_of(x) {
            out.set(j, true);
        }
    }
    Ok(out)
}
