use itertools::Itertools;

use super::{settle, Decision, ModelKind, QueryOracle, Verdict};
use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{capacity, invalid, Result};

pub const MAX_JUNTA_K: usize = 3;
pub const MAX_JUNTA_N: usize = 10;
/// Default `C` in the sample size `C (2^k + k log2 n)`.
pub const JUNTA_SAMPLE_CONSTANT: f64 = 4.0;

/// `ceil(c * (2^k + k log2 n))`.
pub fn junta_sample_size(n: usize, k: usize, c: f64) -> usize {
    (c * ((k as f64).exp2() + k as f64 * (n.max(2) as f64).log2())).ceil() as usize
}

/// Best k-junta on the samples: for every variable set the cell-majority
/// table, keeping the first set with the fewest disagreements.
fn best_junta(samples: &[(BitVector, bool)], n: usize, k: usize) -> Result<(BooleanFunction, usize)> {
    let mut best: Option<(Vec<usize>, Vec<[usize; 2]>, usize)> = None;
    for vars in (0..n).combinations(k.min(n)) {
        let mut cells = vec![[0usize; 2]; 1 << vars.len()];
        for (x, v) in samples {
            cells[x.gather(&vars) as usize][*v as usize] += 1;
        }
        let errors: usize = cells.iter().map(|c| c[0].min(c[1])).sum();
        if best.as_ref().is_none_or(|b| errors < b.2) {
            best = Some((vars, cells, errors));
        }
    }
    let (vars, cells, errors) = best.expect("at least one variable set");
    let table = BitVector::from_bools(&cells.iter().map(|c| c[1] > c[0]).collect::<Vec<_>>());
    Ok((BooleanFunction::junta(n, &vars, table)?, errors))
}

/// Learn-then-verify for k-juntas: the first half of the samples selects the
/// best k-junta, the second half measures its disagreement, and the tester
/// rejects iff that rate exceeds `epsilon / 2`.
pub fn junta_passive_tester(oracle: &mut QueryOracle, k: usize, epsilon: f64) -> Result<Verdict> {
    oracle.require(&[ModelKind::Passive], "junta_passive_tester")?;
    let n = oracle.n();
    if k > MAX_JUNTA_K || n > MAX_JUNTA_N {
        return Err(capacity(
            format!("junta_passive_tester at n = {n}, k = {k}"),
            (MAX_JUNTA_N * 10 + MAX_JUNTA_K) as u64,
        ));
    }
    if epsilon <= 0.0 {
        return Err(invalid("junta_passive_tester needs epsilon > 0"));
    }
    let run = (|| {
        let samples = oracle.reveal_all()?;
        let (learn, holdout) = samples.split_at(samples.len() / 2);
        if learn.is_empty() || holdout.is_empty() {
            return Ok(Verdict::of(Decision::Inconclusive, oracle, vec!["need samples in both halves".into()]));
        }
        let (h, learn_errors) = best_junta(learn, n, k)?;
        let errors = holdout.iter().filter(|(x, v)| h.eval_words(x.words()) != *v).count();
        let rate = errors as f64 / holdout.len() as f64;
        let notes = vec![
            format!("learning disagreements {learn_errors}/{}", learn.len()),
            format!("holdout disagreement rate {rate:.6}"),
        ];
        let decision = if rate > epsilon / 2.0 { Decision::Reject } else { Decision::Accept };
        Ok(Verdict::of(decision, oracle, notes))
    })();
    settle(oracle, run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::fraction_to_f64;
    use crate::families::{exact_distance_to_family, Family};
    use crate::Error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_size_formula() {
        assert_eq!(junta_sample_size(8, 2, 4.0), 40);
        assert_eq!(junta_sample_size(8, 0, 1.0), 1);
    }

    #[test]
    fn best_junta_fits_member_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let f = Family::junta(8, 2).unwrap().sample_uniform(&mut rng).unwrap();
        let samples: Vec<_> = (0..200)
            .map(|_| {
                let x = BitVector::random(8, &mut rng);
                let v = f.evaluate(&x).unwrap();
                (x, v)
            })
            .collect();
        let (h, errors) = best_junta(&samples, 8, 2).unwrap();
        assert_eq!(errors, 0);
        assert_eq!(h.truth_table().unwrap(), f.truth_table().unwrap());
    }

    #[test]
    fn members_accepted_and_random_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let m = junta_sample_size(8, 2, JUNTA_SAMPLE_CONSTANT);
        let family = Family::junta(8, 2).unwrap();
        let accepted = (0..300)
            .filter(|_| {
                let f = family.sample_uniform(&mut rng).unwrap();
                let mut o = QueryOracle::passive(f, m, &mut rng);
                junta_passive_tester(&mut o, 2, 0.2).unwrap().is_accept()
            })
            .count();
        assert!(accepted >= 250, "{accepted}");
        let mut rejected = 0;
        for s in 0..300 {
            let f = BooleanFunction::seeded_random(8, s);
            assert!(fraction_to_f64(&exact_distance_to_family(&f, &family).unwrap()) >= 0.2);
            let mut o = QueryOracle::passive(f, m, &mut rng);
            if junta_passive_tester(&mut o, 2, 0.2).unwrap().is_reject() {
                rejected += 1;
            }
        }
        assert!(rejected >= 250, "{rejected}");
    }

    #[test]
    fn capacity_and_degenerate_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let mut o = QueryOracle::passive(BooleanFunction::parity(11), 10, &mut rng);
        assert!(matches!(junta_passive_tester(&mut o, 2, 0.2), Err(Error::Capacity { .. })));
        let mut o = QueryOracle::passive(BooleanFunction::parity(5), 10, &mut rng);
        assert!(matches!(junta_passive_tester(&mut o, 4, 0.2), Err(Error::Capacity { .. })));
        let mut o = QueryOracle::passive(BooleanFunction::parity(5), 1, &mut rng);
        assert_eq!(junta_passive_tester(&mut o, 1, 0.2).unwrap().decision, Decision::Inconclusive);
    }
}
