//! Structural facts about a single function: relevant variables, transposition
//! symmetry classes, algebraic degree, linearity.

use crate::boolfn::{BitVector, BooleanFunction, Repr, MAX_TABLE_VARS};
use crate::error::{capacity, Result};

/// Widest asymmetric block handled by [`PsymView`].
const MAX_VIEW_ASYM: usize = 20;

/// `f` written as a partially symmetric function: value at `x` is
/// `table[a * (n - k + 1) + w]` where `a` collects `x` on `asym` and `w` is the
/// weight of the other coordinates.
#[derive(Clone, Debug)]
pub(crate) struct PsymView {
    pub n: usize,
    pub asym: Vec<usize>,
    pub table: BitVector,
}

impl PsymView {
    pub fn of(f: &BooleanFunction) -> Option<Self> {
        let n = f.n();
        match f.repr() {
            Repr::PartiallySymmetric { asym, table, .. } => Some(Self {
                n,
                asym: asym.clone(),
                table: table.clone(),
            }),
            Repr::Junta { vars, table } if vars.len() <= MAX_VIEW_ASYM => {
                let m = n - vars.len();
                Some(Self::build(n, vars.clone(), |a, _| table.get(a), m))
            }
            Repr::KLinear { indices, .. } if indices.len() <= MAX_VIEW_ASYM => {
                let m = n - indices.len();
                Some(Self::build(n, indices.clone(), |a, _| a.count_ones() & 1 == 1, m))
            }
            Repr::KLinear { indices, .. } if n - indices.len() <= MAX_VIEW_ASYM => {
                // Asymmetric block = complement; the weight on I decides the parity.
                let asym: Vec<usize> = (0..n).filter(|i| indices.binary_search(i).is_err()).collect();
                let m = n - asym.len();
                Some(Self::build(n, asym, |_, w| w & 1 == 1, m))
            }
            _ => None,
        }
    }

    fn build(n: usize, asym: Vec<usize>, value: impl Fn(usize, usize) -> bool, m: usize) -> Self {
        let k = asym.len();
        let mut table = BitVector::zeros((1 << k) * (m + 1));
        for a in 0..1usize << k {
            for w in 0..=m {
                if value(a, w) {
                    table.set(a * (m + 1) + w, true);
                }
            }
        }
        Self { n, asym, table }
    }

    pub fn k(&self) -> usize {
        self.asym.len()
    }

    pub fn m(&self) -> usize {
        self.n - self.asym.len()
    }

    #[inline]
    pub fn at(&self, a: usize, w: usize) -> bool {
        self.table.get(a * (self.m() + 1) + w)
    }

    pub fn rest(&self) -> Vec<usize> {
        let mut mark = vec![false; self.n];
        for &i in &self.asym {
            mark[i] = true;
        }
        (0..self.n).filter(|&i| !mark[i]).collect()
    }

    fn asym_relevant(&self, p: usize) -> bool {
        let (k, m) = (self.k(), self.m());
        (0..1usize << k).any(|a| a >> p & 1 == 0 && (0..=m).any(|w| self.at(a, w) != self.at(a | 1 << p, w)))
    }

    fn weight_relevant(&self) -> bool {
        let (k, m) = (self.k(), self.m());
        (0..1usize << k).any(|a| (0..m).any(|w| self.at(a, w) != self.at(a, w + 1)))
    }

    fn swap_asym_ok(&self, p: usize, q: usize) -> bool {
        let (k, m) = (self.k(), self.m());
        (0..1usize << k).all(|a| {
            let (bp, bq) = (a >> p & 1, a >> q & 1);
            let b = if bp == bq { a } else { a ^ (1 << p) ^ (1 << q) };
            (0..=m).all(|w| self.at(a, w) == self.at(b, w))
        })
    }

    /// Swapping asymmetric position `p` with any coordinate of the symmetric block.
    fn swap_mixed_ok(&self, p: usize) -> bool {
        let (k, m) = (self.k(), self.m());
        if m == 0 {
            return false;
        }
        (0..1usize << k).all(|a| {
            let ap = a >> p & 1;
            (0..2usize).all(|xj| {
                let b = (a & !(1 << p)) | (xj << p);
                (0..m).all(|w| self.at(a, w + xj) == self.at(b, w + ap))
            })
        })
    }

    fn relevant(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.k())
            .filter(|&p| self.asym_relevant(p))
            .map(|p| self.asym[p])
            .collect();
        if self.m() > 0 && self.weight_relevant() {
            out.extend(self.rest());
        }
        out.sort_unstable();
        out
    }

    fn classes(&self) -> Vec<Vec<usize>> {
        // Items: asymmetric positions 0..k, then the symmetric block as item k.
        let k = self.k();
        let block = self.m() > 0;
        let mut reps: Vec<(usize, Vec<usize>)> = Vec::new();
        if block {
            reps.push((k, vec![k]));
        }
        for p in 0..k {
            let hit = reps.iter().position(|(r, _)| {
                if *r == k {
                    self.swap_mixed_ok(p)
                } else {
                    self.swap_asym_ok(*r, p)
                }
            });
            match hit {
                Some(c) => reps[c].1.push(p),
                None => reps.push((p, vec![p])),
            }
        }
        let rest = self.rest();
        let mut out: Vec<Vec<usize>> = reps
            .into_iter()
            .map(|(_, items)| {
                let mut vars = Vec::new();
                for it in items {
                    if it == k {
                        vars.extend(&rest);
                    } else {
                        vars.push(self.asym[it]);
                    }
                }
                vars.sort_unstable();
                vars
            })
            .collect();
        out.sort();
        out
    }
}

/// Word masks selecting table positions whose bit `i` is 0, for `i < 6`.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Whether a `2^r`-entry table changes when bit `i` of the index flips.
fn table_depends_on(t: &BitVector, i: usize) -> bool {
    let words = t.words();
    if i < 6 {
        let len_mask = if t.len() >= 64 { u64::MAX } else { (1u64 << t.len()) - 1 };
        words
            .iter()
            .any(|&w| ((w ^ (w >> (1 << i))) & LOW_MASKS[i] & len_mask) != 0)
    } else {
        let step = 1 << (i - 6);
        (0..words.len()).any(|j| j & step == 0 && words[j] != words[j | step])
    }
}

/// Whether swapping index bits `i` and `j` leaves a table unchanged.
fn table_swap_ok(t: &BitVector, i: usize, j: usize) -> bool {
    let (bi, bj) = (1usize << i, 1usize << j);
    (0..t.len()).all(|idx| idx & bi == 0 || idx & bj != 0 || t.get(idx) == t.get(idx ^ bi ^ bj))
}

fn table_classes(t: &BitVector, r: usize) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..r {
        match classes.iter().position(|c| table_swap_ok(t, c[0], v)) {
            Some(c) => classes[c].push(v),
            None => classes.push(vec![v]),
        }
    }
    classes
}

fn dense(f: &BooleanFunction) -> Result<BitVector> {
    f.truth_table()
}

/// Coordinates on which `f` depends, sorted.
pub fn relevant_variables(f: &BooleanFunction) -> Result<Vec<usize>> {
    match f.repr() {
        Repr::KLinear { indices, .. } => Ok(indices.clone()),
        Repr::Polynomial { .. } => Ok(f.structural_support().unwrap_or_default()),
        Repr::Junta { vars, table } => {
            let mut out: Vec<usize> = (0..vars.len())
                .filter(|&j| table_depends_on(table, j))
                .map(|j| vars[j])
                .collect();
            out.sort_unstable();
            Ok(out)
        }
        Repr::PartiallySymmetric { .. } => Ok(PsymView::of(f).expect("psym view").relevant()),
        Repr::TruthTable(_) | Repr::SeededRandom { .. } => {
            let t = dense(f)?;
            Ok((0..f.n()).filter(|&i| table_depends_on(&t, i)).collect())
        }
    }
}

/// The relevant variables `R` of `f` and the table of `f` restricted to them
/// (index bit `j` = coordinate `R[j]`, all other coordinates zero).
pub fn junta_core(f: &BooleanFunction) -> Result<(Vec<usize>, BitVector)> {
    let rel = relevant_variables(f)?;
    if rel.len() > MAX_TABLE_VARS {
        return Err(capacity(
            format!("junta core with {} relevant variables", rel.len()),
            MAX_TABLE_VARS as u64,
        ));
    }
    let mut table = BitVector::zeros(1 << rel.len());
    let mut x = BitVector::zeros(f.n());
    for idx in 0..1usize << rel.len() {
        for (j, &v) in rel.iter().enumerate() {
            x.set(v, idx >> j & 1 == 1);
        }
        if f.evaluate(&x)? {
            table.set(idx, true);
        }
    }
    Ok((rel, table))
}

/// Partition of the coordinates into classes of mutually swappable variables.
///
/// Swap invariance is an equivalence relation (`(i k) = (i j)(j k)(i j)`), and
/// `f` is invariant under every permutation of `T` exactly when `T` lies
/// inside one class. Classes are sorted by smallest element.
pub fn symmetry_classes(f: &BooleanFunction) -> Result<Vec<Vec<usize>>> {
    if let Some(view) = PsymView::of(f) {
        return Ok(view.classes());
    }
    let (rel, core) = junta_core(f)?;
    let mut out: Vec<Vec<usize>> = table_classes(&core, rel.len())
        .into_iter()
        .map(|c| c.into_iter().map(|j| rel[j]).collect())
        .collect();
    let irrelevant: Vec<usize> = (0..f.n()).filter(|i| rel.binary_search(i).is_err()).collect();
    if !irrelevant.is_empty() {
        out.push(irrelevant);
    }
    out.sort();
    Ok(out)
}

/// Degree of the algebraic normal form (0 for constants).
pub fn algebraic_degree(f: &BooleanFunction) -> Result<usize> {
    match f.repr() {
        Repr::Polynomial { monomials } => Ok(monomials.iter().map(|m| m.weight()).max().unwrap_or(0)),
        Repr::KLinear { indices, .. } => Ok(usize::from(!indices.is_empty())),
        _ => {
            let (rel, core) = junta_core(f)?;
            let anf = mobius(&core, rel.len());
            Ok((0..anf.len())
                .filter(|&i| anf[i])
                .map(|i| i.count_ones() as usize)
                .max()
                .unwrap_or(0))
        }
    }
}

/// ANF coefficients of a `2^r` table.
pub(crate) fn mobius(t: &BitVector, r: usize) -> Vec<bool> {
    let mut a: Vec<bool> = (0..t.len()).map(|i| t.get(i)).collect();
    for i in 0..r {
        let b = 1 << i;
        for idx in 0..a.len() {
            if idx & b != 0 {
                a[idx] ^= a[idx ^ b];
            }
        }
    }
    a
}

/// Whether `f` is a homogeneous linear function, optionally of exactly `k` terms.
pub(crate) fn is_linear(f: &BooleanFunction, k: Option<usize>) -> Result<bool> {
    let size_ok = |s: usize| k.is_none_or(|k| k == s);
    match f.repr() {
        Repr::KLinear { indices, .. } => Ok(size_ok(indices.len())),
        Repr::Polynomial { monomials } => {
            Ok(monomials.iter().all(|m| m.weight() == 1) && size_ok(monomials.len()))
        }
        _ => {
            let (rel, core) = junta_core(f)?;
            Ok(size_ok(rel.len()) && (0..core.len()).all(|i| core.get(i) == (i.count_ones() & 1 == 1)))
        }
    }
}
