//! Collision-based testers for symmetric and partially symmetric functions.
//!
//! All of them look only at pairs of points with equal Hamming weight: a
//! symmetric function must agree on every such pair, and an
//! `(n - k)`-symmetric function on every such pair that also agrees on its
//! `k` asymmetric coordinates.

use std::collections::HashMap;

use itertools::Itertools;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::{settle, Decision, ModelKind, QueryOracle, Verdict};
use crate::boolfn::BitVector;
use crate::error::{capacity, invalid, Result};
use crate::stats::ln_binomial;

/// Largest asymmetric set size `psf_tester` iterates over.
pub const MAX_PSF_K: usize = 3;
/// Default constant in the partially symmetric sample and pair counts.
pub const PSF_CONSTANT: f64 = 2.0;

/// Probability that two uniform points of `Z_2^n` share their Hamming
/// weight: `sum_w C(n, w)^2 / 4^n = C(2n, n) / 4^n`.
pub fn collision_probability(n: usize) -> f64 {
    (ln_binomial(2 * n as u64, n as u64) - 2.0 * n as f64 * std::f64::consts::LN_2).exp()
}

/// `ceil(c * n^(1/4))`.
pub fn symmetric_passive_sample_size(n: usize, c: f64) -> usize {
    (c * (n as f64).powf(0.25)).ceil() as usize
}

/// `ceil(c * n^(1/4) * 2^(k/2) * sqrt(max(k, 1) * log2 n / epsilon))`.
pub fn psf_passive_sample_size(n: usize, k: usize, epsilon: f64, c: f64) -> usize {
    let logn = (n.max(2) as f64).log2();
    (c * (n as f64).powf(0.25) * (k as f64 / 2.0).exp2() * (k.max(1) as f64 * logn / epsilon).sqrt()).ceil()
        as usize
}

/// `ceil(c * 2^k * max(k, 1) * log2 n / epsilon)` same-weight pairs.
pub fn psf_active_pair_count(n: usize, k: usize, epsilon: f64, c: f64) -> usize {
    let logn = (n.max(2) as f64).log2();
    (c * (k as f64).exp2() * k.max(1) as f64 * logn / epsilon).ceil() as usize
}

/// Expected violation rate on same-weight pairs of a symmetric function
/// whose values were flipped independently with probability `delta`.
pub fn violation_rate_at(delta: f64) -> f64 {
    2.0 * delta * (1.0 - delta)
}

/// Pairs `(i, j)`, `i < j`, of points with equal weight.
fn same_weight_pairs(points: &[BitVector]) -> Vec<(usize, usize)> {
    let mut by_weight: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, x) in points.iter().enumerate() {
        by_weight.entry(x.weight()).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = by_weight
        .values()
        .flat_map(|idx| idx.iter().copied().tuple_combinations())
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Draws `count` pool pairs uniformly from all same-weight pool pairs and
/// queries them (each pool point at most once). Returns the answered pairs,
/// or `None` when the pool has no same-weight pair.
fn query_active_pairs<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    count: usize,
    rng: &mut R,
) -> Result<Option<Vec<(bool, bool)>>> {
    let mut buckets: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, x) in oracle.pool().iter().enumerate() {
        buckets.entry(x.weight()).or_default().push(i);
    }
    let mut buckets: Vec<Vec<usize>> = buckets.into_values().filter(|b| b.len() >= 2).collect();
    buckets.sort_unstable();
    if buckets.is_empty() {
        return Ok(None);
    }
    let weights: Vec<usize> = buckets.iter().map(|b| b.len() * (b.len() - 1) / 2).collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    let mut answers: HashMap<usize, bool> = HashMap::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let b = &buckets[pick.sample(rng)];
        let i = rng.gen_range(0..b.len());
        let mut j = rng.gen_range(0..b.len() - 1);
        if j >= i {
            j += 1;
        }
        let mut answer = |idx: usize| -> Result<bool> {
            if let Some(&v) = answers.get(&idx) {
                return Ok(v);
            }
            let v = oracle.query_pool(idx)?;
            answers.insert(idx, v);
            Ok(v)
        };
        out.push((answer(b[i])?, answer(b[j])?));
    }
    Ok(Some(out))
}

/// Outcomes of same-weight pairs gathered under the oracle's model.
fn gather_pairs<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    pair_budget: usize,
    rng: &mut R,
) -> Result<Option<Vec<(bool, bool)>>> {
    match oracle.kind() {
        ModelKind::Passive => {
            let samples = oracle.reveal_all()?;
            let points: Vec<BitVector> = samples.iter().map(|(x, _)| x.clone()).collect();
            Ok(Some(
                same_weight_pairs(&points)
                    .into_iter()
                    .map(|(i, j)| (samples[i].1, samples[j].1))
                    .collect(),
            ))
        }
        _ => query_active_pairs(oracle, pair_budget, rng),
    }
}

/// Rejects iff some same-weight pair disagrees.
///
/// Passive: every revealed sample is used and all same-weight pairs among them
/// are checked (`pair_budget` is ignored); with no such pair the tester
/// accepts and notes the vacuous evidence. Active: `pair_budget` pairs are
/// drawn uniformly from the same-weight pairs of the pool.
pub fn symmetric_tester<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    pair_budget: usize,
    rng: &mut R,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Active, ModelKind::Passive], "symmetric_tester")?;
    let run = (|| {
        let Some(pairs) = gather_pairs(oracle, pair_budget, rng)? else {
            return Ok(Verdict::of(
                Decision::Inconclusive,
                oracle,
                vec!["pool has no same-weight pair".into()],
            ));
        };
        let mut notes = vec![format!("{} same-weight pairs", pairs.len())];
        if pairs.is_empty() {
            notes.push("vacuous accept: no same-weight pair".into());
        }
        let decision = if pairs.iter().any(|(a, b)| a != b) {
            Decision::Reject
        } else {
            Decision::Accept
        };
        Ok(Verdict::of(decision, oracle, notes))
    })();
    settle(oracle, run)
}

/// Accepts iff the fraction of disagreeing same-weight pairs is at most the
/// midpoint of the calibrated rates [`violation_rate_at`] for `eps_lo` and
/// `eps_hi`. Needs at least `1 / (eps_hi - eps_lo)^2` pairs.
pub fn tolerant_symmetric_tester<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    pair_budget: usize,
    eps_lo: f64,
    eps_hi: f64,
    rng: &mut R,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Active, ModelKind::Passive], "tolerant_symmetric_tester")?;
    if !(0.0 <= eps_lo && eps_lo < eps_hi && eps_hi <= 0.5) {
        return Err(invalid(format!("need 0 <= eps_lo < eps_hi <= 1/2, got {eps_lo}, {eps_hi}")));
    }
    let required = (1.0 / (eps_hi - eps_lo).powi(2)).ceil() as usize;
    let threshold = (violation_rate_at(eps_lo) + violation_rate_at(eps_hi)) / 2.0;
    let run = (|| {
        let pairs = gather_pairs(oracle, pair_budget, rng)?.unwrap_or_default();
        if pairs.len() < required {
            return Ok(Verdict::of(
                Decision::Inconclusive,
                oracle,
                vec![format!("{} same-weight pairs, {required} required", pairs.len())],
            ));
        }
        let violations = pairs.iter().filter(|(a, b)| a != b).count();
        let rate = violations as f64 / pairs.len() as f64;
        let decision = if rate <= threshold { Decision::Accept } else { Decision::Reject };
        Ok(Verdict::of(
            decision,
            oracle,
            vec![format!("violation rate {rate:.6} over {} pairs, threshold {threshold:.6}", pairs.len())],
        ))
    })();
    settle(oracle, run)
}

/// True iff any two transcript points with equal assignment on `asym` and
/// equal weight on the other coordinates carry equal values.
pub fn psf_consistency_check(transcript: &[(BitVector, bool)], asym: &[usize]) -> bool {
    let mut seen: HashMap<(u64, usize), bool> = HashMap::new();
    for (x, v) in transcript {
        let a = x.gather(asym);
        let key = (a, x.weight() - a.count_ones() as usize);
        if *seen.entry(key).or_insert(*v) != *v {
            return false;
        }
    }
    true
}

/// Accepts iff the observed points are consistent with `(n - k)`-symmetry
/// for at least one asymmetric set of size `k`.
///
/// Passive: every revealed sample is used; size the sequence with
/// [`psf_passive_sample_size`]. Active: [`psf_active_pair_count`] uniformly
/// drawn same-weight pool pairs are queried.
pub fn psf_tester<R: Rng + ?Sized>(oracle: &mut QueryOracle, k: usize, epsilon: f64, rng: &mut R) -> Result<Verdict> {
    oracle.require(&[ModelKind::Active, ModelKind::Passive], "psf_tester")?;
    let n = oracle.n();
    if k > MAX_PSF_K {
        return Err(capacity(format!("psf_tester with k = {k}"), MAX_PSF_K as u64));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if epsilon <= 0.0 {
        return Err(invalid("psf_tester needs epsilon > 0"));
    }
    let run = (|| {
        let mut notes = Vec::new();
        match oracle.kind() {
            ModelKind::Passive => {
                oracle.reveal_all()?;
            }
            _ => {
                let pairs = psf_active_pair_count(n, k, epsilon, PSF_CONSTANT);
                if query_active_pairs(oracle, pairs, rng)?.is_none() {
                    notes.push("pool has no same-weight pair".into());
                    return Ok(Verdict::of(Decision::Inconclusive, oracle, notes));
                }
            }
        }
        let witness = (0..n).combinations(k).find(|a| psf_consistency_check(oracle.transcript(), a));
        let decision = match witness {
            Some(a) => {
                notes.push(format!("consistent with asymmetric set {a:?}"));
                Decision::Accept
            }
            None => Decision::Reject,
        };
        Ok(Verdict::of(decision, oracle, notes))
    })();
    settle(oracle, run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{fraction_to_f64, BooleanFunction};
    use crate::families::{exact_distance_to_family, Family};
    use crate::stats::binomial;
    use crate::Error;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collision_probability_matches_direct_sum() {
        for n in [1usize, 2, 5, 10, 20] {
            let direct: f64 = (0..=n as u64)
                .map(|w| (binomial(n as u64, w).unwrap() as f64).powi(2))
                .sum::<f64>()
                / 4f64.powi(n as i32);
            assert!((collision_probability(n) - direct).abs() < 1e-12 * direct.max(1.0));
        }
        let p = collision_probability(64);
        assert!(p > 0.5 / 64f64.sqrt() && p < 2.0 / 64f64.sqrt());
    }

    #[test]
    fn sample_size_formulas() {
        assert_eq!(symmetric_passive_sample_size(64, 8.0), 23);
        assert_eq!(psf_passive_sample_size(16, 0, 1.0, 1.0), 4);
        assert_eq!(psf_active_pair_count(16, 2, 1.0, 1.0), 32);
    }

    #[test]
    fn members_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let f = Family::symmetric(64, 64).unwrap().sample_uniform(&mut rng).unwrap();
            let mut p = QueryOracle::passive(f.clone(), 23, &mut rng);
            assert!(symmetric_tester(&mut p, 0, &mut rng).unwrap().is_accept());
            let mut a = QueryOracle::active(f, 64, 40, &mut rng);
            assert!(symmetric_tester(&mut a, 20, &mut rng).unwrap().is_accept());
            let g = Family::partially_symmetric(32, 1).unwrap().sample_uniform(&mut rng).unwrap();
            let q = psf_passive_sample_size(32, 1, 0.25, PSF_CONSTANT);
            let mut p = QueryOracle::passive(g.clone(), q, &mut rng);
            assert!(psf_tester(&mut p, 1, 0.25, &mut rng).unwrap().is_accept());
            let mut a = QueryOracle::active(g, 64, 10_000, &mut rng);
            assert!(psf_tester(&mut a, 1, 0.25, &mut rng).unwrap().is_accept());
        }
    }

    #[test]
    fn dictator_rejected_passively() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let f = BooleanFunction::dictator(64, 0).unwrap();
        let rejected = (0..300)
            .filter(|_| {
                let mut o = QueryOracle::passive(f.clone(), 23, &mut rng);
                symmetric_tester(&mut o, 0, &mut rng).unwrap().is_reject()
            })
            .count();
        assert!(rejected >= 200, "{rejected}");
    }

    #[test]
    fn vacuous_and_inconclusive_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let f = BooleanFunction::dictator(8, 0).unwrap();
        let mut o = QueryOracle::passive(f.clone(), 1, &mut rng);
        let v = symmetric_tester(&mut o, 0, &mut rng).unwrap();
        assert!(v.is_accept());
        assert!(v.diagnostics.iter().any(|d| d.contains("vacuous")));
        let pool: Vec<BitVector> = (0..=8).map(|w| BitVector::from_indices(8, &(0..w).collect::<Vec<_>>())).collect();
        let mut o = QueryOracle::with_model(f.clone(), crate::testers::Model::Active { pool }, 10).unwrap();
        assert_eq!(symmetric_tester(&mut o, 5, &mut rng).unwrap().decision, Decision::Inconclusive);
        assert_eq!(psf_tester(&mut o, 1, 0.25, &mut rng).unwrap().decision, Decision::Inconclusive);
        let mut c = QueryOracle::classic(f, 10);
        assert!(matches!(symmetric_tester(&mut c, 5, &mut rng), Err(Error::ModelViolation(_))));
    }

    #[test]
    fn consistency_check_examples() {
        let t = vec![("01".parse().unwrap(), false), ("10".parse().unwrap(), true)];
        assert!(!psf_consistency_check(&t, &[]));
        assert!(psf_consistency_check(&t, &[0]));
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let g = BooleanFunction::partially_symmetric(10, &[2, 7], BitVector::random(4 * 9, &mut rng)).unwrap();
        let t: Vec<_> = (0..200)
            .map(|_| {
                let x = BitVector::random(10, &mut rng);
                let v = g.evaluate(&x).unwrap();
                (x, v)
            })
            .collect();
        assert!(psf_consistency_check(&t, &[2, 7]));
        assert!(psf_consistency_check(&t, &[1, 2, 7]));
    }

    /// Quadratic scan over all transcript pairs.
    fn naive_check(t: &[(BitVector, bool)], asym: &[usize]) -> bool {
        let rest_weight = |x: &BitVector| x.weight() - asym.iter().filter(|&&i| x.get(i)).count();
        t.iter().tuple_combinations().all(|((x, a), (y, b))| {
            let same = asym.iter().all(|&i| x.get(i) == y.get(i)) && rest_weight(x) == rest_weight(y);
            !same || a == b
        })
    }

    #[test]
    fn consistency_check_matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for _ in 0..500 {
            let n = rng.gen_range(1..8);
            let k = rng.gen_range(0..=n.min(3));
            let mut vars: Vec<usize> = (0..n).collect();
            vars.shuffle(&mut rng);
            vars.truncate(k);
            let m = rng.gen_range(0..12);
            let t: Vec<_> = (0..m).map(|_| (BitVector::random(n, &mut rng), rng.gen_bool(0.8))).collect();
            assert_eq!(psf_consistency_check(&t, &vars), naive_check(&t, &vars));
        }
    }

    #[test]
    fn psf_rejects_random_and_k0_matches_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        let q = psf_passive_sample_size(32, 1, 0.25, PSF_CONSTANT);
        let rejected = (0..200)
            .filter(|&s| {
                let mut o = QueryOracle::passive(BooleanFunction::seeded_random(32, s), q, &mut rng);
                psf_tester(&mut o, 1, 0.25, &mut rng).unwrap().is_reject()
            })
            .count();
        assert!(rejected >= 180, "{rejected}");
        for s in 0..100 {
            let f = BooleanFunction::seeded_random(16, s);
            let o = QueryOracle::passive(f, 12, &mut rng);
            let (mut a, mut b) = (o.clone(), o);
            let va = psf_tester(&mut a, 0, 0.25, &mut rng).unwrap();
            let vb = symmetric_tester(&mut b, 0, &mut rng).unwrap();
            assert_eq!(va.decision, vb.decision);
        }
        let mut o = QueryOracle::passive(BooleanFunction::parity(8), 4, &mut rng);
        assert!(matches!(psf_tester(&mut o, 4, 0.25, &mut rng), Err(Error::Capacity { .. })));
    }

    #[test]
    fn tolerant_tester_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let sym = Family::symmetric(12, 12).unwrap().sample_uniform(&mut rng).unwrap();
        let mut o = QueryOracle::active(sym.clone(), 144, 1000, &mut rng);
        assert!(tolerant_symmetric_tester(&mut o, 200, 0.05, 0.25, &mut rng).unwrap().is_accept());
        assert!(tolerant_symmetric_tester(&mut o, 200, 0.1, 0.1, &mut rng).is_err());
        let mut few = QueryOracle::active(sym.clone(), 144, 1000, &mut rng);
        let v = tolerant_symmetric_tester(&mut few, 10, 0.05, 0.25, &mut rng).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
        let far = BooleanFunction::random(12, &mut rng).to_truth_table_fn().unwrap();
        let mut o = QueryOracle::active(far, 144, 1000, &mut rng);
        assert!(tolerant_symmetric_tester(&mut o, 400, 0.05, 0.25, &mut rng).unwrap().is_reject());
    }

    #[test]
    fn violation_rate_increases_with_exact_distance() {
        // Flip growing random subsets of a symmetric table, measure the exact
        // distance to Sym_n, and estimate the same-weight violation rate.
        let mut rng = ChaCha8Rng::seed_from_u64(68);
        let n = 12;
        let base = Family::symmetric(n, n).unwrap().sample_uniform(&mut rng).unwrap().truth_table().unwrap();
        let mut points: Vec<(f64, f64)> = Vec::new();
        for flip in [0.0, 0.05, 0.1, 0.2, 0.35] {
            let mut t = base.clone();
            for i in 0..t.len() {
                if rng.gen_bool(flip) {
                    t.toggle(i);
                }
            }
            let f = BooleanFunction::from_truth_table(n, t).unwrap();
            let delta = fraction_to_f64(&exact_distance_to_family(&f, &Family::symmetric(n, n).unwrap()).unwrap());
            let pairs = 40_000;
            let violations = (0..pairs)
                .filter(|_| {
                    let x = BitVector::random(n, &mut rng);
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.shuffle(&mut rng);
                    let y = BitVector::from_indices(n, &x.ones_iter().map(|i| perm[i]).collect::<Vec<_>>());
                    f.evaluate(&x).unwrap() != f.evaluate(&y).unwrap()
                })
                .count();
            points.push((delta, violations as f64 / pairs as f64));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(points[0], (0.0, 0.0));
        for w in points.windows(2) {
            assert!(w[0].1 < w[1].1, "{points:?}");
        }
    }
}
