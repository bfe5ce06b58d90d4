//! Exact distance from a function to a family, with a witness member.

use itertools::Itertools;

use super::structure::PsymView;
use super::{Family, FamilyKind};
use crate::boolfn::{walsh_hadamard_counts, BitVector, BooleanFunction, Fraction, MAX_TABLE_VARS};
use crate::error::{capacity, check_dim, Result};
use crate::gf2::MonomialBasis;
use crate::stats::binomial;

/// Work limit (table entries times candidate count) for brute-force scans.
const MAX_SCAN_WORK: u128 = 1 << 34;
/// Candidate asymmetric sets scanned by the structured path.
const MAX_STRUCTURED_SETS: u128 = 1 << 16;
/// Polynomial families are enumerated only up to this many monomials.
const MAX_POLY_MONOMIALS: usize = 20;

/// A member of the family at minimum distance from the query function.
#[derive(Clone, Debug)]
pub struct Nearest {
    pub member: BooleanFunction,
    pub distance: Fraction,
}

/// `min_g dist(f, g)` over members `g`.
pub fn exact_distance_to_family(f: &BooleanFunction, family: &Family) -> Result<Fraction> {
    Ok(nearest_member(f, family)?.distance)
}

/// A nearest member and its exact distance.
///
/// Dense scans need `n <= 24` and a bounded amount of work. Beyond that,
/// members are recognised structurally (distance 0), and the symmetric kinds
/// have an exact counting path for partially symmetric, junta and linear
/// representations at any `n <= 126`.
pub fn nearest_member(f: &BooleanFunction, family: &Family) -> Result<Nearest> {
    check_dim(family.n, f.n())?;
    let n = f.n();
    if n > MAX_TABLE_VARS {
        if let Ok(true) = family.contains(f) {
            return Ok(Nearest {
                member: f.clone(),
                distance: Fraction::from_integer(0),
            });
        }
        if let (Some(kk), Some(view)) = (family.asymmetric_size(), PsymView::of(f)) {
            return nearest_psym_structured(&view, kk);
        }
        return Err(capacity(
            format!("exact distance to {family} without a dense table"),
            MAX_TABLE_VARS as u64,
        ));
    }
    match family.kind {
        FamilyKind::Linear => nearest_linear(f, None),
        FamilyKind::KLinear { k } => nearest_linear(f, Some(k)),
        FamilyKind::Junta { k } => nearest_junta(f, k),
        FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
            nearest_psym_dense(f, family.asymmetric_size().unwrap())
        }
        FamilyKind::Polynomial { d } => nearest_polynomial(f, d),
    }
}

fn check_work(what: &str, candidates: u128, n: usize) -> Result<()> {
    if candidates.saturating_mul(1u128 << n) > MAX_SCAN_WORK {
        return Err(capacity(format!("{what} scan at n = {n}"), MAX_SCAN_WORK as u64));
    }
    Ok(())
}

fn frac(num: u128, n: usize) -> Fraction {
    Fraction::new(num, 1u128 << n)
}

#[inline]
fn gather(x: usize, vars: &[usize]) -> usize {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (j, &v)| acc | ((x >> v) & 1) << j)
}

/// Nearest character via the integer Walsh-Hadamard transform:
/// `dist(f, chi_S) = (2^n - c_S) / 2^(n+1)`.
fn nearest_linear(f: &BooleanFunction, k: Option<usize>) -> Result<Nearest> {
    let n = f.n();
    let counts = walsh_hadamard_counts(&f.truth_table()?);
    let best_mask = match k {
        None => (0..counts.len()).max_by_key(|&s| (counts[s], std::cmp::Reverse(s))).unwrap(),
        Some(k) => {
            // Enumeration order of k-sets is lexicographic; keep the first maximum.
            let mut best: Option<(i64, usize)> = None;
            for set in (0..n).combinations(k) {
                let s: usize = set.iter().map(|&i| 1 << i).sum();
                if best.is_none_or(|(c, _)| counts[s] > c) {
                    best = Some((counts[s], s));
                }
            }
            best.unwrap().1
        }
    };
    let c = counts[best_mask];
    let indices: Vec<usize> = (0..n).filter(|&i| best_mask >> i & 1 == 1).collect();
    Ok(Nearest {
        member: BooleanFunction::k_linear(n, &indices)?,
        distance: frac((((1i64 << n) - c) / 2) as u128, n),
    })
}

fn nearest_junta(f: &BooleanFunction, k: usize) -> Result<Nearest> {
    let n = f.n();
    check_work("junta", binomial(n as u64, k as u64).unwrap_or(u128::MAX), n)?;
    let t = f.truth_table()?;
    let per_class = 1u64 << (n - k);
    let mut best: Option<(u64, Vec<usize>, BitVector)> = None;
    for vars in (0..n).combinations(k) {
        let mut ones = vec![0u64; 1 << k];
        for x in t.ones_iter() {
            ones[gather(x, &vars)] += 1;
        }
        let dist: u64 = ones.iter().map(|&o| o.min(per_class - o)).sum();
        if best.as_ref().is_none_or(|(d, _, _)| dist < *d) {
            let table = BitVector::from_bools(&ones.iter().map(|&o| 2 * o > per_class).collect::<Vec<_>>());
            best = Some((dist, vars, table));
        }
    }
    let (dist, vars, table) = best.expect("at least one candidate set");
    Ok(Nearest {
        member: BooleanFunction::junta(n, &vars, table)?,
        distance: frac(dist as u128, n),
    })
}

fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

fn nearest_psym_dense(f: &BooleanFunction, kk: usize) -> Result<Nearest> {
    let n = f.n();
    let t = n - kk;
    if t <= 1 {
        return Ok(Nearest {
            member: f.clone(),
            distance: Fraction::from_integer(0),
        });
    }
    check_work("partially symmetric", binomial(n as u64, kk as u64).unwrap_or(u128::MAX), n)?;
    let table = f.truth_table()?;
    let binom_t: Vec<u64> = (0..=t).map(|w| binomial(t as u64, w as u64).unwrap() as u64).collect();
    let mut best: Option<(u64, Vec<usize>, BitVector)> = None;
    for asym in (0..n).combinations(kk) {
        let rest_mask: usize = complement(n, &asym).iter().map(|&i| 1 << i).sum();
        let mut ones = vec![0u64; (1 << kk) * (t + 1)];
        for x in table.ones_iter() {
            let w = (x & rest_mask).count_ones() as usize;
            ones[gather(x, &asym) * (t + 1) + w] += 1;
        }
        let mut dist = 0;
        let mut bits = Vec::with_capacity(ones.len());
        for (i, &o) in ones.iter().enumerate() {
            let total = binom_t[i % (t + 1)];
            dist += o.min(total - o);
            bits.push(2 * o > total);
        }
        if best.as_ref().is_none_or(|(d, _, _)| dist < *d) {
            best = Some((dist, asym, BitVector::from_bools(&bits)));
        }
    }
    let (dist, asym, bits) = best.expect("at least one candidate set");
    Ok(Nearest {
        member: BooleanFunction::partially_symmetric(n, &asym, bits)?,
        distance: frac(dist as u128, n),
    })
}

/// Exact counting against every asymmetric set `A` of size `kk`, for `f`
/// given as a partially symmetric view with asymmetric block `B`.
///
/// For a class (assignment on `A`, weight `w` on the complement `T`), the
/// points split by their assignment `b` on `B \ A`; the remaining
/// `|T \ B|` coordinates contribute `C(|T \ B|, w - |b|)` points each.
pub(crate) fn nearest_psym_structured(view: &PsymView, kk: usize) -> Result<Nearest> {
    let n = view.n;
    if n > 126 {
        return Err(capacity("exact distance denominator 2^n", 126));
    }
    let t = n - kk;
    let sets = binomial(n as u64, kk as u64).unwrap_or(u128::MAX);
    if sets > MAX_STRUCTURED_SETS || kk > 16 || view.k() > 16 {
        return Err(capacity(
            format!("structured scan of {sets} asymmetric sets"),
            MAX_STRUCTURED_SETS as u64,
        ));
    }
    let b = &view.asym;
    let m_b = view.m();
    let mut best: Option<(u128, Vec<usize>, BitVector)> = None;
    for asym in (0..n).combinations(kk) {
        let pos_in_a = |v: usize| asym.iter().position(|&a| a == v);
        // (position in B, position in A) for B inside A
        let b_in_a: Vec<(usize, usize)> =
            (0..b.len()).filter_map(|p| pos_in_a(b[p]).map(|q| (p, q))).collect();
        // positions in B of B-coordinates outside A
        let b_out: Vec<usize> = (0..b.len()).filter(|&p| pos_in_a(b[p]).is_none()).collect();
        // positions in A of A-coordinates outside B
        let a_out: Vec<usize> = (0..kk).filter(|&q| !b.contains(&asym[q])).collect();
        let s = b_out.len();
        let r = t - s;
        let binom_r: Vec<u128> = (0..=r).map(|w| binomial(r as u64, w as u64).unwrap()).collect();
        let mut dist: u128 = 0;
        let mut bits = Vec::with_capacity((1 << kk) * (t + 1));
        for a in 0..1usize << kk {
            let w_ab = a_out.iter().filter(|&&q| a >> q & 1 == 1).count();
            let base: usize = b_in_a.iter().map(|&(p, q)| (a >> q & 1) << p).sum();
            for w in 0..=t {
                let (mut ones, mut zeros) = (0u128, 0u128);
                for bo in 0..1usize << s {
                    let wb = bo.count_ones() as usize;
                    if wb > w || w - wb > r {
                        continue;
                    }
                    let cnt = binom_r[w - wb];
                    let ab = base | b_out.iter().enumerate().map(|(j, &p)| (bo >> j & 1) << p).sum::<usize>();
                    if view.table.get(ab * (m_b + 1) + w_ab + w - wb) {
                        ones += cnt;
                    } else {
                        zeros += cnt;
                    }
                }
                dist += ones.min(zeros);
                bits.push(ones > zeros);
            }
        }
        if best.as_ref().is_none_or(|(d, _, _)| dist < *d) {
            best = Some((dist, asym, BitVector::from_bools(&bits)));
        }
    }
    let (dist, asym, bits) = best.expect("at least one candidate set");
    Ok(Nearest {
        member: BooleanFunction::partially_symmetric(n, &asym, bits)?,
        distance: frac(dist, n),
    })
}

/// Gray-code walk over all `2^{n_d}` coefficient vectors.
fn nearest_polynomial(f: &BooleanFunction, d: usize) -> Result<Nearest> {
    let n = f.n();
    let basis = MonomialBasis::new(n, d)?;
    let nd = basis.len();
    if nd > MAX_POLY_MONOMIALS {
        return Err(capacity(
            format!("enumeration of degree-{d} polynomials with {nd} monomials"),
            MAX_POLY_MONOMIALS as u64,
        ));
    }
    check_work("polynomial", 1u128 << nd, n)?;
    let monos: Vec<BitVector> = basis
        .monomials()
        .iter()
        .map(|m| BooleanFunction::polynomial(n, std::slice::from_ref(m)).and_then(|p| p.truth_table()))
        .collect::<Result<_>>()?;
    let mut diff = f.truth_table()?;
    let mut best = (diff.weight(), 0usize);
    let mut code = 0usize;
    for i in 1usize..1 << nd {
        let j = i.trailing_zeros() as usize;
        diff ^= &monos[j];
        code ^= 1 << j;
        let w = diff.weight();
        if w < best.0 {
            best = (w, code);
        }
    }
    let masks: Vec<BitVector> = (0..nd)
        .filter(|&j| best.1 >> j & 1 == 1)
        .map(|j| BitVector::from_indices(n, &basis.monomials()[j]))
        .collect();
    Ok(Nearest {
        member: BooleanFunction::polynomial_from_masks(n, masks),
        distance: frac(best.0 as u128, n),
    })
}
