use rand::seq::SliceRandom;
use rand::Rng;

use super::{row_reduce, Gf2Matrix};
use crate::boolfn::BitVector;
use crate::error::{check_dim, Result};

/// Solutions of `sum_j z_j pool[order[j]] = target` in parametrized form.
struct Parametrized {
    /// Pool index for each pivot row.
    pivot_items: Vec<usize>,
    /// `(pool index, pivot rows it feeds)` for each free column.
    free: Vec<(usize, BitVector)>,
    /// Target restricted to pivot rows.
    rhs: BitVector,
}

impl Parametrized {
    fn build(pool: &[BitVector], target: &BitVector, order: &[usize]) -> Result<Option<Self>> {
        let n = target.len();
        for v in pool {
            check_dim(n, v.len())?;
        }
        let m = order.len();
        let mut a = Gf2Matrix::zeros(n, m + 1);
        for (j, &idx) in order.iter().enumerate() {
            for r in pool[idx].ones_iter() {
                a.set(r, j, true);
            }
        }
        for r in target.ones_iter() {
            a.set(r, m, true);
        }
        let red = row_reduce(&a);
        if red.pivots.last() == Some(&m) {
            return Ok(None);
        }
        let rank = red.rank;
        let r = &red.reduced;
        let mut is_pivot = vec![false; m];
        for &p in &red.pivots {
            is_pivot[p] = true;
        }
        let column = |c: usize| {
            let mut v = BitVector::zeros(rank);
            for i in 0..rank {
                if r.get(i, c) {
                    v.set(i, true);
                }
            }
            v
        };
        Ok(Some(Self {
            pivot_items: red.pivots.iter().map(|&p| order[p]).collect(),
            free: (0..m)
                .filter(|&c| !is_pivot[c])
                .map(|c| (order[c], column(c)))
                .collect(),
            rhs: column(m),
        }))
    }

    fn subset(&self, chosen_free: &[bool], pivot_bits: &BitVector) -> Vec<usize> {
        let mut out: Vec<usize> = pivot_bits.ones_iter().map(|i| self.pivot_items[i]).collect();
        out.extend(
            self.free
                .iter()
                .zip(chosen_free)
                .filter(|(_, &c)| c)
                .map(|((idx, _), _)| *idx),
        );
        out.sort_unstable();
        out
    }

    /// Greedy descent on subset size by toggling free variables one at a time.
    fn descend(&self) -> Vec<usize> {
        let mut chosen = vec![false; self.free.len()];
        let mut bits = self.rhs.clone();
        let mut nchosen = 0usize;
        let mut size = bits.weight();
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (j, (_, col)) in self.free.iter().enumerate() {
                let cand = (&bits ^ col).weight() + if chosen[j] { nchosen - 1 } else { nchosen + 1 };
                if cand < best.map_or(size, |(_, s)| s) {
                    best = Some((j, cand));
                }
            }
            let Some((j, s)) = best else { break };
            nchosen = if chosen[j] { nchosen - 1 } else { nchosen + 1 };
            chosen[j] = !chosen[j];
            bits ^= &self.free[j].1;
            size = s;
        }
        self.subset(&chosen, &bits)
    }
}

/// Indices of a subset of `pool` whose XOR is `target`, or `None` when
/// `target` is outside the span. Deterministic: the basic solution of
/// elimination in pool order.
pub fn find_subset_summing_to(pool: &[BitVector], target: &BitVector) -> Result<Option<Vec<usize>>> {
    let order: Vec<usize> = (0..pool.len()).collect();
    Ok(Parametrized::build(pool, target, &order)?
        .map(|p| p.subset(&vec![false; p.free.len()], &p.rhs)))
}

/// Heuristic search for a small subset: up to `attempts` eliminations over
/// random column orders, each followed by greedy free-variable toggling.
/// Stops early once a subset of size at most `hint` appears and otherwise
/// returns the smallest subset seen.
pub fn find_subset_with_size_hint<R: Rng + ?Sized>(
    pool: &[BitVector],
    target: &BitVector,
    hint: usize,
    attempts: usize,
    rng: &mut R,
) -> Result<Option<Vec<usize>>> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    let mut best: Option<Vec<usize>> = None;
    for _ in 0..attempts.max(1) {
        order.shuffle(rng);
        let Some(p) = Parametrized::build(pool, target, &order)? else {
            return Ok(None);
        };
        let s = p.descend();
        if best.as_ref().is_none_or(|b| s.len() < b.len()) {
            best = Some(s);
        }
        if best.as_ref().is_some_and(|b| b.len() <= hint) {
            break;
        }
    }
    Ok(best)
}
