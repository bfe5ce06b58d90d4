use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bitvec::BitVector;
use crate::error::{capacity, check_dim, invalid, Result};

/// Largest dimension for which dense truth tables are materialised (2^24 bits = 2 MiB).
pub const MAX_TABLE_VARS: usize = 24;

/// Largest subtable index width accepted by the structured variants.
const MAX_SUBTABLE_BITS: usize = 24;

/// Tagged representation of `f: Z_2^n -> Z_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    /// Dense table; entry `i` is `f(x)` for the `x` whose coordinate `j` is bit `j` of `i`.
    TruthTable(BitVector),
    /// XOR of the listed coordinates (sorted, distinct).
    KLinear { indices: Vec<usize>, mask: BitVector },
    /// Depends only on `vars`; table entry `i` is read with bit `j` of `i` = `x[vars[j]]`.
    Junta { vars: Vec<usize>, table: BitVector },
    /// Value depends on the assignment `a` to `asym` (bit `j` = `x[asym[j]]`) and the
    /// Hamming weight `w` of the other `n - k` coordinates; table entry `a * (n - k + 1) + w`.
    PartiallySymmetric {
        asym: Vec<usize>,
        asym_mask: BitVector,
        table: BitVector,
    },
    /// XOR of monomials, each the AND of the coordinates set in its mask. Canonical:
    /// sorted, no repeats.
    Polynomial { monomials: Vec<BitVector> },
    /// Keyed pseudorandom bit per point.
    SeededRandom { seed: u64 },
}

/// A Boolean function on `n` variables. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanFunction {
    n: usize,
    repr: Repr,
}

fn check_indices(n: usize, indices: &[usize], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &i in indices {
        if i >= n {
            return Err(invalid(format!("{what} index {i} out of range for n = {n}")));
        }
        if !seen.insert(i) {
            return Err(invalid(format!("{what} index {i} repeated")));
        }
    }
    Ok(())
}

impl BooleanFunction {
    pub fn from_truth_table(n: usize, table: BitVector) -> Result<Self> {
        if n > MAX_TABLE_VARS {
            return Err(capacity(format!("truth table on {n} variables"), MAX_TABLE_VARS as u64));
        }
        check_dim(1 << n, table.len())?;
        Ok(Self {
            n,
            repr: Repr::TruthTable(table),
        })
    }

    /// XOR of the given coordinates. Indices may be given in any order.
    pub fn k_linear(n: usize, indices: &[usize]) -> Result<Self> {
        check_indices(n, indices, "linear")?;
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        let mask = BitVector::from_indices(n, &indices);
        Ok(Self {
            n,
            repr: Repr::KLinear { indices, mask },
        })
    }

    /// The linear function `x -> <mask, x>`.
    pub fn linear_from_mask(mask: &BitVector) -> Self {
        let indices: Vec<usize> = mask.ones_iter().collect();
        Self {
            n: mask.len(),
            repr: Repr::KLinear {
                indices,
                mask: mask.clone(),
            },
        }
    }

    pub fn parity(n: usize) -> Self {
        Self::linear_from_mask(&BitVector::ones(n))
    }

    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        Self::k_linear(n, &[i])
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self {
            n,
            repr: Repr::Junta {
                vars: Vec::new(),
                table: BitVector::from_bools(&[value]),
            },
        }
    }

    pub fn junta(n: usize, vars: &[usize], table: BitVector) -> Result<Self> {
        check_indices(n, vars, "junta")?;
        if vars.len() > MAX_SUBTABLE_BITS {
            return Err(capacity("junta subtable", MAX_SUBTABLE_BITS as u64));
        }
        check_dim(1 << vars.len(), table.len())?;
        Ok(Self {
            n,
            repr: Repr::Junta {
                vars: vars.to_vec(),
                table,
            },
        })
    }

    pub fn partially_symmetric(n: usize, asym: &[usize], table: BitVector) -> Result<Self> {
        check_indices(n, asym, "asymmetric")?;
        let k = asym.len();
        if k > MAX_SUBTABLE_BITS {
            return Err(capacity("partially symmetric subtable", MAX_SUBTABLE_BITS as u64));
        }
        check_dim((1usize << k) * (n - k + 1), table.len())?;
        Ok(Self {
            n,
            repr: Repr::PartiallySymmetric {
                asym: asym.to_vec(),
                asym_mask: BitVector::from_indices(n, asym),
                table,
            },
        })
    }

    /// Fully symmetric function; `by_weight[w]` is the value on weight-`w` inputs.
    pub fn symmetric(n: usize, by_weight: BitVector) -> Result<Self> {
        Self::partially_symmetric(n, &[], by_weight)
    }

    /// Majority: 1 iff more than half the coordinates are set.
    pub fn majority(n: usize) -> Self {
        let table = BitVector::from_bools(&(0..=n).map(|w| 2 * w > n).collect::<Vec<_>>());
        Self::symmetric(n, table).expect("table length is n + 1")
    }

    /// XOR of monomials given as variable lists; an empty list is the constant 1.
    /// Repeated monomials cancel.
    pub fn polynomial(n: usize, monomials: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(monomials.len());
        for m in monomials {
            check_indices(n, m, "monomial")?;
            masks.push(BitVector::from_indices(n, m));
        }
        Ok(Self::polynomial_from_masks(n, masks))
    }

    pub(crate) fn polynomial_from_masks(n: usize, masks: Vec<BitVector>) -> Self {
        let mut set = BTreeSet::new();
        for m in masks {
            debug_assert_eq!(m.len(), n);
            if !set.remove(&m) {
                set.insert(m);
            }
        }
        Self {
            n,
            repr: Repr::Polynomial {
                monomials: set.into_iter().collect(),
            },
        }
    }

    pub fn seeded_random(n: usize, seed: u64) -> Self {
        Self {
            n,
            repr: Repr::SeededRandom { seed },
        }
    }

    /// A fresh seeded random function.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::seeded_random(n, rng.gen())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    /// `f(x)`; errors if `x` has the wrong dimension.
    pub fn evaluate(&self, x: &BitVector) -> Result<bool> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_words(x.words()))
    }

    /// `f` at the point whose coordinate `j` is bit `j` of `index` (requires `n <= 64`).
    pub fn evaluate_index(&self, index: u64) -> bool {
        assert!(self.n <= 64, "evaluate_index needs n <= 64");
        debug_assert!(self.n == 64 || index >> self.n == 0);
        self.eval_words(if self.n == 0 { &[] } else { std::slice::from_ref(&index) })
    }

    /// Evaluation on packed words. Callers guarantee the word count matches `n`.
    pub(crate) fn eval_words(&self, x: &[u64]) -> bool {
        match &self.repr {
            Repr::TruthTable(table) => {
                let idx = x.first().copied().unwrap_or(0) as usize;
                table.get(idx)
            }
            Repr::KLinear { mask, .. } => {
                let ones: u32 = x
                    .iter()
                    .zip(mask.words())
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                ones & 1 == 1
            }
            Repr::Junta { vars, table } => table.get(gather_words(x, vars)),
            Repr::PartiallySymmetric {
                asym,
                asym_mask,
                table,
            } => {
                let a = gather_words(x, asym);
                let total: u32 = x.iter().map(|w| w.count_ones()).sum();
                let on_asym: u32 = x
                    .iter()
                    .zip(asym_mask.words())
                    .map(|(w, m)| (w & m).count_ones())
                    .sum();
                let rest = (total - on_asym) as usize;
                table.get(a * (self.n - asym.len() + 1) + rest)
            }
            Repr::Polynomial { monomials } => monomials.iter().fold(false, |acc, m| {
                let covered = x.iter().zip(m.words()).all(|(w, mw)| w & mw == *mw);
                acc ^ covered
            }),
            Repr::SeededRandom { seed } => keyed_bit(*seed, self.n, x),
        }
    }

    /// Dense table of all `2^n` values (index encoding: bit `j` of the index is coordinate `j`).
    pub fn truth_table(&self) -> Result<BitVector> {
        if self.n > MAX_TABLE_VARS {
            return Err(capacity(
                format!("truth table on {} variables", self.n),
                MAX_TABLE_VARS as u64,
            ));
        }
        if let Repr::TruthTable(t) = &self.repr {
            return Ok(t.clone());
        }
        let size = 1usize << self.n;
        let mut table = BitVector::zeros(size);
        let words = table.words_mut();
        for (wi, word) in words.iter_mut().enumerate() {
            let base = (wi * 64) as u64;
            let span = (size - wi * 64).min(64);
            let mut acc = 0u64;
            for j in 0..span {
                if self.evaluate_index(base + j as u64) {
                    acc |= 1 << j;
                }
            }
            *word = acc;
        }
        Ok(table)
    }

    /// Same function as a dense table.
    pub fn to_truth_table_fn(&self) -> Result<Self> {
        Self::from_truth_table(self.n, self.truth_table()?)
    }

    /// Coordinates the representation syntactically depends on, when that set is small
    /// and known without a scan (`None` for dense and random variants).
    pub fn structural_support(&self) -> Option<Vec<usize>> {
        match &self.repr {
            Repr::KLinear { indices, .. } => Some(indices.clone()),
            Repr::Junta { vars, .. } => {
                let mut v = vars.clone();
                v.sort_unstable();
                Some(v)
            }
            Repr::Polynomial { monomials } => {
                let mut all = BTreeSet::new();
                for m in monomials {
                    all.extend(m.ones_iter());
                }
                Some(all.into_iter().collect())
            }
            _ => None,
        }
    }
}

fn gather_words(x: &[u64], idx: &[usize]) -> usize {
    idx.iter().enumerate().fold(0usize, |acc, (j, &i)| {
        acc | ((((x[i / 64] >> (i % 64)) & 1) as usize) << j)
    })
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn keyed_bit(seed: u64, n: usize, x: &[u64]) -> bool {
    let mut h = splitmix(seed ^ (n as u64).rotate_left(32));
    for &w in x {
        h = splitmix(h ^ w);
    }
    splitmix(h) >> 63 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn evaluate_examples() {
        // x = (1,1,0) with 0-based coordinates {0,1} set
        let x = bv("110");
        assert!(!BooleanFunction::k_linear(3, &[0, 1]).unwrap().evaluate(&x).unwrap());
        assert!(BooleanFunction::polynomial(3, &[vec![0, 1]]).unwrap().evaluate(&x).unwrap());
        let weight_parity = BooleanFunction::symmetric(3, bv("0101")).unwrap();
        assert!(!weight_parity.evaluate(&bv("101")).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let f = BooleanFunction::parity(4);
        assert!(matches!(
            f.evaluate(&bv("101")),
            Err(crate::Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn truth_table_examples() {
        assert_eq!(BooleanFunction::dictator(1, 0).unwrap().truth_table().unwrap(), bv("01"));
        assert_eq!(BooleanFunction::constant(2, false).truth_table().unwrap(), bv("0000"));
        let j = BooleanFunction::junta(2, &[1], bv("01")).unwrap();
        let t = j.truth_table().unwrap();
        for idx in 0..4u64 {
            let x = BitVector::from_word(2, idx);
            assert_eq!(t.get(idx as usize), j.evaluate(&x).unwrap());
            assert_eq!(t.get(idx as usize), x.get(1));
        }
    }

    #[test]
    fn truth_table_capacity() {
        assert!(BooleanFunction::parity(25).truth_table().is_err());
        assert!(BooleanFunction::from_truth_table(2, bv("010")).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(BooleanFunction::k_linear(3, &[3]).is_err());
        assert!(BooleanFunction::k_linear(3, &[1, 1]).is_err());
        assert!(BooleanFunction::junta(3, &[0], bv("011")).is_err());
        assert!(BooleanFunction::partially_symmetric(3, &[0], bv("0000")).is_err());
    }

    #[test]
    fn polynomial_cancels_repeats() {
        let p = BooleanFunction::polynomial(3, &[vec![0], vec![0], vec![1, 2]]).unwrap();
        match p.repr() {
            Repr::Polynomial { monomials } => assert_eq!(monomials.len(), 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn seeded_random_is_deterministic_and_balanced() {
        let f = BooleanFunction::seeded_random(16, 99);
        let g = BooleanFunction::seeded_random(16, 99);
        assert_eq!(f.truth_table().unwrap(), g.truth_table().unwrap());
        let w = f.truth_table().unwrap().weight() as f64 / 65536.0;
        assert!((w - 0.5).abs() < 0.01, "weight fraction {w}");
    }

    #[test]
    fn junta_ignores_other_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = BooleanFunction::junta(8, &[5, 2], BitVector::random(4, &mut rng)).unwrap();
        for _ in 0..200 {
            let x = BitVector::random(8, &mut rng);
            let mut y = x.clone();
            for i in [0, 1, 3, 4, 6, 7] {
                if rng.gen() {
                    y.toggle(i);
                }
            }
            assert_eq!(f.evaluate(&x).unwrap(), f.evaluate(&y).unwrap());
        }
    }

    #[test]
    fn partially_symmetric_invariant_under_permutations_of_the_rest() {
        use itertools::Itertools;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 6;
        let asym = [1, 4];
        let table = BitVector::random(4 * (n - 1), &mut rng);
        let f = BooleanFunction::partially_symmetric(n, &asym, table).unwrap();
        let rest: Vec<usize> = (0..n).filter(|i| !asym.contains(i)).collect();
        for perm in rest.iter().copied().permutations(rest.len()) {
            for idx in 0..(1u64 << n) {
                let x = BitVector::from_word(n, idx);
                let mut y = x.clone();
                for (src, &dst) in rest.iter().zip(&perm) {
                    y.set(dst, x.get(*src));
                }
                assert_eq!(f.evaluate(&x).unwrap(), f.evaluate(&y).unwrap());
            }
        }
    }
}
