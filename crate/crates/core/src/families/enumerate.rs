//! Member enumeration and uniform sampling.
//!
//! Enumeration orders:
//! - `KLinear`: index sets in lexicographic order.
//! - `Linear`: masks in increasing integer order (bit `i` = coordinate `i`).
//! - `Junta`: by number of relevant variables, then relevant set in
//!   lexicographic order, then subtable as an integer.
//! - `Polynomial`: coefficient vectors as integers, bit `j` = monomial `j` of
//!   the degree-then-lexicographic basis.
//! - `Symmetric`/`PartiallySymmetric`: asymmetric sets in lexicographic
//!   order, then tables as integers, keeping the first occurrence of each
//!   distinct function.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::Rng;

use super::{relevant_variables, symmetry_classes, Family, FamilyKind, MAX_ENUMERATION};
use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{capacity, Result};
use crate::gf2::MonomialBasis;
use crate::stats::binomial;

/// Largest subtable drawn when enumerating symmetric kinds.
const MAX_SYM_TABLE_BITS: usize = 20;

fn too_many(family: &Family) -> crate::error::Error {
    capacity(format!("enumeration of {family}"), MAX_ENUMERATION as u64)
}

fn table_from_code(len: usize, code: u64) -> BitVector {
    BitVector::from_word(len, code)
}

impl Family {
    /// All distinct members in the documented enumeration order.
    pub fn members(&self) -> Result<Vec<BooleanFunction>> {
        let n = self.n;
        if let Some(c) = self.member_count() {
            if c > MAX_ENUMERATION as u128 {
                return Err(too_many(self));
            }
        }
        match self.kind {
            FamilyKind::KLinear { k } => (0..n)
                .combinations(k)
                .map(|idx| BooleanFunction::k_linear(n, &idx))
                .collect(),
            FamilyKind::Linear => Ok((0..1u64 << n)
                .map(|s| BooleanFunction::linear_from_mask(&BitVector::from_word(n, s)))
                .collect()),
            FamilyKind::Polynomial { d } => {
                let basis = MonomialBasis::new(n, d)?;
                let masks: Vec<BitVector> = basis
                    .monomials()
                    .iter()
                    .map(|m| BitVector::from_indices(n, m))
                    .collect();
                Ok((0..1u64 << basis.len())
                    .map(|code| {
                        let chosen = (0..masks.len())
                            .filter(|&j| code >> j & 1 == 1)
                            .map(|j| masks[j].clone())
                            .collect();
                        BooleanFunction::polynomial_from_masks(n, chosen)
                    })
                    .collect())
            }
            FamilyKind::Junta { k } => {
                let mut out = Vec::new();
                for j in 0..=k {
                    for vars in (0..n).combinations(j) {
                        for code in 0..1u64 << (1 << j) {
                            let g = BooleanFunction::junta(n, &vars, table_from_code(1 << j, code))?;
                            if relevant_variables(&g)?.len() == j {
                                out.push(g);
                            }
                        }
                    }
                }
                Ok(out)
            }
            FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
                let kk = self.asymmetric_size().unwrap();
                let len = (1usize << kk) * (n - kk + 1);
                if len > MAX_SYM_TABLE_BITS || n > 16 {
                    return Err(too_many(self));
                }
                if kk == 0 {
                    return (0..1u64 << len)
                        .map(|code| BooleanFunction::symmetric(n, table_from_code(len, code)))
                        .collect();
                }
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for asym in (0..n).combinations(kk) {
                    for code in 0..1u64 << len {
                        let g = BooleanFunction::partially_symmetric(n, &asym, table_from_code(len, code))?;
                        if seen.insert(g.truth_table()?) {
                            if out.len() == MAX_ENUMERATION {
                                return Err(too_many(self));
                            }
                            out.push(g);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// A uniformly random member, in structured form.
    ///
    /// Juntas and the symmetric kinds are drawn by picking a variable set and
    /// a table uniformly, then accepting with probability inversely
    /// proportional to the number of variable sets that produce the same
    /// function; the accepted draw is exactly uniform over distinct members.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BooleanFunction> {
        let n = self.n;
        match self.kind {
            FamilyKind::KLinear { k } => {
                let mut idx = sample(rng, n, k).into_vec();
                idx.sort_unstable();
                BooleanFunction::k_linear(n, &idx)
            }
            FamilyKind::Linear => Ok(BooleanFunction::linear_from_mask(&BitVector::random(n, rng))),
            FamilyKind::Polynomial { d } => {
                let basis = MonomialBasis::new(n, d)?;
                let masks = basis
                    .monomials()
                    .iter()
                    .filter(|_| rng.gen::<bool>())
                    .map(|m| BitVector::from_indices(n, m))
                    .collect();
                Ok(BooleanFunction::polynomial_from_masks(n, masks))
            }
            FamilyKind::Junta { k } => loop {
                let mut vars = sample(rng, n, k).into_vec();
                vars.sort_unstable();
                let g = BooleanFunction::junta(n, &vars, BitVector::random(1 << k, rng))?;
                let r = relevant_variables(&g)?.len();
                let supersets = binomial((n - r) as u64, (k - r) as u64).unwrap_or(u128::MAX);
                if accept(rng, supersets) {
                    return Ok(g);
                }
            },
            FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
                let kk = self.asymmetric_size().unwrap();
                let t = n - kk;
                if t <= 1 {
                    return Ok(BooleanFunction::random(n, rng));
                }
                loop {
                    let mut asym = sample(rng, n, kk).into_vec();
                    asym.sort_unstable();
                    let len = (1usize << kk) * (t + 1);
                    let g = BooleanFunction::partially_symmetric(n, &asym, BitVector::random(len, rng))?;
                    let producers: u128 = symmetry_classes(&g)?
                        .iter()
                        .map(|c| binomial(c.len() as u64, t as u64).unwrap_or(u128::MAX))
                        .fold(0u128, |a, b| a.saturating_add(b));
                    if accept(rng, producers) {
                        return Ok(g);
                    }
                }
            }
        }
    }
}

/// Bernoulli(1 / m).
fn accept<R: Rng + ?Sized>(rng: &mut R, m: u128) -> bool {
    m <= 1 || (m <= u64::MAX as u128 && rng.gen_range(0..m as u64) == 0)
}
