use std::io::{Read, Write};

use rand::Rng;

use crate::boolfn::io::{pack_bits, unpack_bits};
use crate::boolfn::{words_for, BitVector};
use crate::error::{check_dim, Error, Result};

/// Dense GF(2) matrix, row-major, each row packed into `stride` words.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut id = Self::zeros(m, m);
        for i in 0..m {
            id.set(i, i, true);
        }
        id
    }

    /// Stacks equal-length vectors as rows. An empty slice gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[BitVector], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            check_dim(cols, v.len())?;
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        Ok(m)
    }

    /// Matrix whose column `j` is `columns[j]` (each of length `rows`).
    pub fn from_columns(columns: &[BitVector], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, v) in columns.iter().enumerate() {
            check_dim(rows, v.len())?;
            for r in v.ones_iter() {
                m.set(r, c, true);
            }
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let vs: Vec<BitVector> = (0..rows).map(|_| BitVector::random(cols, rng)).collect();
        Self::from_rows(&vs, cols).expect("rows have the requested length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "entry ({r}, {c}) out of range");
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r}, {c}) out of range");
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (first, second) = self.data.split_at_mut(hi * s);
        first[lo * s..(lo + 1) * s].swap_with_slice(&mut second[..s]);
    }

    /// `row[dst] ^= row[src]`, touching only words from `from_word` on.
    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (sw, dw) = if src < dst {
            let (a, b) = self.data.split_at_mut(dst * s);
            (&a[src * s..(src + 1) * s], &mut b[..s])
        } else {
            let (a, b) = self.data.split_at_mut(src * s);
            (&b[..s] as &[u64], &mut a[dst * s..(dst + 1) * s])
        };
        for (d, x) in dw[from_word..].iter_mut().zip(&sw[from_word..]) {
            *d ^= x;
        }
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// `M x` over GF(2).
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        check_dim(self.cols, x.len())?;
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let ones: u32 = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).ones_iter() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Binary layout: `rows` and `cols` as little-endian `u32`, then the
    /// `rows * cols` entries row-major, packed LSB-first, zero padded to a byte.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.rows as u32).to_le_bytes())?;
        out.write_all(&(self.cols as u32).to_le_bytes())?;
        let mut flat = BitVector::zeros(self.rows * self.cols);
        for r in 0..self.rows {
            for c in self.row(r).ones_iter() {
                flat.set(r * self.cols + c, true);
            }
        }
        out.write_all(&pack_bits(&flat))?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut hdr = [0u8; 8];
        input.read_exact(&mut hdr)?;
        let rows = u32::from_le_bytes(hdr[..4].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(hdr[4..].try_into().unwrap()) as usize;
        let total = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Parse("matrix size overflows".into()))?;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        let flat = unpack_bits(total, &body)?;
        let mut m = Self::zeros(rows, cols);
        for i in flat.ones_iter() {
            m.set(i / cols, i % cols, true);
        }
        Ok(m)
    }
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn row_ops_across_word_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut m = Gf2Matrix::random(5, 150, &mut rng);
        let r0 = m.row(0);
        let r3 = m.row(3);
        m.xor_row_into(3, 0, 0);
        assert_eq!(m.row(0), &r0 ^ &r3);
        m.xor_row_into(0, 3, 0);
        assert_eq!(m.row(3), r0);
        m.swap_rows(1, 4);
        m.swap_rows(4, 1);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (r, c) in [(0, 0), (1, 1), (3, 5), (7, 70)] {
            let m = Gf2Matrix::random(r, c, &mut rng);
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            assert_eq!(buf.len(), 8 + (r * c).div_ceil(8));
            assert_eq!(Gf2Matrix::read_from(buf.as_slice()).unwrap(), m);
        }
    }

    #[test]
    fn mul_vec_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = BitVector::random(90, &mut rng);
        assert_eq!(Gf2Matrix::identity(90).mul_vec(&x).unwrap(), x);
        assert!(Gf2Matrix::identity(3).mul_vec(&x).is_err());
    }
}
