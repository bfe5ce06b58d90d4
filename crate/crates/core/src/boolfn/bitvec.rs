use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::Rng;
use serde::{Deserialize, Serialize};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A point of `Z_2^n`, packed into 64-bit words.
///
/// Coordinate `i` lives in bit `i % 64` of word `i / 64`. Bits above `len`
/// are always zero, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Builds a vector of length `len <= 64` from the low bits of `word`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD, "from_word supports at most 64 coordinates");
        let mut v = Self {
            len,
            words: if len == 0 { Vec::new() } else { vec![word] },
        };
        v.clear_tail();
        v
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), words_for(len), "word count does not match length");
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector with exactly the listed coordinates set. Panics on out-of-range indices.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.gen::<u64>()).collect();
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// The single packed word, when `len <= 64`.
    pub fn to_word(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2): parity of the AND.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Weight of `self & mask`.
    pub fn masked_weight(&self, mask: &BitVector) -> usize {
        assert_eq!(self.len, mask.len, "length mismatch in masked weight");
        self.words
            .iter()
            .zip(&mask.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// True when every coordinate set in `self` is set in `other`.
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in subset test");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of set coordinates in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Projection onto the listed coordinates: bit `j` of the result is `self[indices[j]]`.
    pub fn gather(&self, indices: &[usize]) -> u64 {
        debug_assert!(indices.len() <= WORD);
        indices
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &i)| acc | (u64::from(self.get(i)) << j))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for BitVector {
    /// Coordinates written left to right starting at index 0.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl std::str::FromStr for BitVector {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(crate::Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bools(&bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weight_and_tail_masking() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(BitVector::from_word(3, 0xff).weight(), 3);
        assert_eq!(BitVector::zeros(0).weight(), 0);
    }

    #[test]
    fn parse_and_display_agree() {
        let v: BitVector = "1101".parse().unwrap();
        assert!(v.get(0) && v.get(1) && !v.get(2) && v.get(3));
        assert_eq!(v.to_string(), "1101");
        assert!("10x".parse::<BitVector>().is_err());
    }

    #[test]
    fn ones_iter_spans_words() {
        let v = BitVector::from_indices(130, &[0, 63, 64, 129]);
        assert_eq!(v.ones_iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
    }

    #[test]
    fn random_respects_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in [0, 1, 63, 64, 65, 200] {
            let v = BitVector::random(len, &mut rng);
            assert!(v.weight() <= len);
            assert_eq!(v.words().len(), words_for(len));
        }
    }

    fn vec_strategy(len: usize) -> impl Strategy<Value = BitVector> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bools(&b))
    }

    proptest! {
        #[test]
        fn xor_is_an_abelian_group(
            (a, b, c) in (1usize..150).prop_flat_map(|n| (vec_strategy(n), vec_strategy(n), vec_strategy(n)))
        ) {
            let zero = BitVector::zeros(a.len());
            prop_assert_eq!(&(&a ^ &zero), &a);
            prop_assert_eq!(&a ^ &b, &b ^ &a);
            prop_assert_eq!(&(&a ^ &b) ^ &c, &a ^ &(&b ^ &c));
            prop_assert!((&a ^ &a).is_zero());
            prop_assert!(a.weight() <= a.len());
        }
    }
}
