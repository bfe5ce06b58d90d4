//! Linear algebra over GF(2) on bit-packed matrices.

mod matrix;
mod monomial;
mod subset;

pub use matrix::Gf2Matrix;
pub use monomial::{d_evaluation, MonomialBasis};
pub use subset::{find_subset_summing_to, find_subset_with_size_hint};

use crate::boolfn::BitVector;
use crate::error::{check_dim, Result};

/// Reduced row-echelon form with its rank and pivot columns.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub reduced: Gf2Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. Nonzero rows come first; `pivots[i]` is the
/// leading column of row `i`.
pub fn row_reduce(m: &Gf2Matrix) -> RowReduction {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..a.cols() {
        if rank == a.rows() {
            break;
        }
        let Some(p) = (rank..a.rows()).find(|&r| a.get(r, c)) else {
            continue;
        };
        a.swap_rows(p, rank);
        let w = c / 64;
        for r in 0..a.rows() {
            if r != rank && a.get(r, c) {
                a.xor_row_into(rank, r, w);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    RowReduction {
        reduced: a,
        rank,
        pivots,
    }
}

pub fn rank(m: &Gf2Matrix) -> usize {
    row_reduce(m).rank
}

/// Affine solution set `particular + span(kernel)` of `M x = b`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub particular: BitVector,
    pub kernel: Vec<BitVector>,
}

fn augmented(m: &Gf2Matrix, b: &BitVector) -> Result<Gf2Matrix> {
    check_dim(m.rows(), b.len())?;
    let mut aug = Gf2Matrix::zeros(m.rows(), m.cols() + 1);
    for r in 0..m.rows() {
        for c in m.row(r).ones_iter() {
            aug.set(r, c, true);
        }
        aug.set(r, m.cols(), b.get(r));
    }
    Ok(aug)
}

/// Full solution space of `M x = b`, or `None` when inconsistent.
pub fn solution_space(m: &Gf2Matrix, b: &BitVector) -> Result<Option<SolutionSpace>> {
    let cols = m.cols();
    let red = row_reduce(&augmented(m, b)?);
    if red.pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let a = &red.reduced;
    let mut particular = BitVector::zeros(cols);
    for (i, &p) in red.pivots.iter().enumerate() {
        particular.set(p, a.get(i, cols));
    }
    let mut is_pivot = vec![false; cols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    let kernel = (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::zeros(cols);
            v.set(f, true);
            for (i, &p) in red.pivots.iter().enumerate() {
                if a.get(i, f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect();
    Ok(Some(SolutionSpace { particular, kernel }))
}

/// Some `x` with `M x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &Gf2Matrix, b: &BitVector) -> Result<Option<BitVector>> {
    let cols = m.cols();
    let red = row_reduce(&augmented(m, b)?);
    if red.pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut x = BitVector::zeros(cols);
    for (i, &p) in red.pivots.iter().enumerate() {
        x.set(p, red.reduced.get(i, cols));
    }
    Ok(Some(x))
}

/// Incremental basis of a subspace of `Z_2^dim`, kept in echelon form by
/// lowest set bit.
#[derive(Clone, Debug)]
pub struct XorBasis {
    dim: usize,
    rows: Vec<(usize, BitVector)>,
}

impl XorBasis {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v ^= row;
            }
        }
        v
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &BitVector) -> Result<bool> {
        check_dim(self.dim, v.len())?;
        let r = self.reduce(v);
        let lead = r.ones_iter().next();
        match lead {
            None => Ok(false),
            Some(p) => {
                for (_, row) in &mut self.rows {
                    if row.get(p) {
                        *row ^= &r;
                    }
                }
                self.rows.push((p, r));
                Ok(true)
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        check_dim(self.dim, v.len())?;
        Ok(self.reduce(v).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Elimination on plain `Vec<Vec<u8>>` with arithmetic mod 2.
    #[allow(clippy::needless_range_loop)]
    fn naive_rank(m: &Gf2Matrix) -> usize {
        let mut a: Vec<Vec<u8>> = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect())
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            if let Some(p) = (rank..a.len()).find(|&r| a[r][c] % 2 == 1) {
                a.swap(p, rank);
                for r in 0..a.len() {
                    if r != rank && a[r][c] % 2 == 1 {
                        for j in 0..m.cols() {
                            a[r][j] = (a[r][j] + a[rank][j]) % 2;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Gf2Matrix::identity(5)), 5);
        assert_eq!(rank(&Gf2Matrix::zeros(4, 7)), 0);
        assert_eq!(rank(&Gf2Matrix::zeros(0, 0)), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = Gf2Matrix::random(20, 30, &mut rng);
            assert_eq!(rank(&m), naive_rank(&m));
        }
        for _ in 0..20 {
            let (r, c) = (rng.gen_range(1..100), rng.gen_range(1..200));
            let m = Gf2Matrix::random(r, c, &mut rng);
            let red = row_reduce(&m);
            assert_eq!(red.rank, naive_rank(&m));
            assert!(red.rank <= r.min(c));
        }
    }

    #[test]
    fn reduction_is_idempotent_and_preserves_row_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let m = Gf2Matrix::random(rng.gen_range(1..40), rng.gen_range(1..140), &mut rng);
            let red = row_reduce(&m);
            let again = row_reduce(&red.reduced);
            assert_eq!(again.reduced, red.reduced);
            assert_eq!(again.pivots, red.pivots);
            for r in red.rank..m.rows() {
                assert!(red.reduced.is_zero_row(r));
            }
            let mut basis = XorBasis::new(m.cols());
            for r in 0..red.rank {
                basis.insert(&red.reduced.row(r)).unwrap();
            }
            for r in 0..m.rows() {
                assert!(basis.contains(&m.row(r)).unwrap());
            }
        }
    }

    #[test]
    fn solve_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let b = BitVector::random(6, &mut rng);
        assert_eq!(solve(&Gf2Matrix::identity(6), &b).unwrap(), Some(b));
        let nonzero = BitVector::from_indices(3, &[1]);
        assert_eq!(solve(&Gf2Matrix::zeros(3, 3), &nonzero).unwrap(), None);
        assert!(solve(&Gf2Matrix::zeros(3, 3), &BitVector::zeros(4)).is_err());
        let mut solved = 0;
        for _ in 0..100 {
            let m = Gf2Matrix::random(40, 40, &mut rng);
            let b = BitVector::random(40, &mut rng);
            let full = rank(&m) == 40;
            match solve(&m, &b).unwrap() {
                Some(x) => {
                    assert_eq!(m.mul_vec(&x).unwrap(), b);
                    solved += 1;
                }
                None => assert!(!full),
            }
        }
        assert!(solved > 20);
    }

    #[test]
    fn inconsistent_iff_rank_grows() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let m = Gf2Matrix::random(r, c, &mut rng);
            let b = BitVector::random(r, &mut rng);
            let grows = rank(&augmented(&m, &b).unwrap()) > rank(&m);
            let space = solution_space(&m, &b).unwrap();
            assert_eq!(space.is_none(), grows);
            if let Some(s) = space {
                assert_eq!(s.kernel.len(), c - rank(&m));
                assert_eq!(m.mul_vec(&s.particular).unwrap(), b);
                for k in &s.kernel {
                    assert!(m.mul_vec(k).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn dependency_rate_below_bound() {
        // q random vectors in Z_2^n are dependent with probability < 2^(q - n).
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (n, q, trials) = (20, 18, 10_000);
        let dependent = (0..trials)
            .filter(|_| {
                let mut b = XorBasis::new(n);
                (0..q).any(|_| !b.insert(&BitVector::random(n, &mut rng)).unwrap())
            })
            .count();
        let p = dependent as f64 / trials as f64;
        let sigma = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!(p <= 0.25 + 3.0 * sigma, "{p}");
    }
}
