//! Proper learners and the learn-then-verify tester built on them.

use super::{settle, Decision, LearnerOutput, ModelKind, QueryOracle, Verdict};
use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{invalid, Error, Result};
use crate::families::{EpsilonNet, Family};

/// `ceil((64 / epsilon) ln |net|)`.
pub fn net_sample_size(epsilon: f64, net_size: usize) -> usize {
    ((64.0 / epsilon) * (net_size.max(1) as f64).ln()).ceil() as usize
}

/// Size of the verification block in [`learn_then_verify`]: `ceil(32 / epsilon)`.
pub fn verification_size(epsilon: f64) -> usize {
    (32.0 / epsilon).ceil() as usize
}

fn disagreements(g: &BooleanFunction, samples: &[(BitVector, bool)]) -> usize {
    samples.iter().filter(|(x, v)| g.eval_words(x.words()) != *v).count()
}

fn first_minimum<'a, I>(candidates: I, samples: &[(BitVector, bool)]) -> Option<&'a BooleanFunction>
where
    I: IntoIterator<Item = &'a BooleanFunction>,
{
    let mut best: Option<(&BooleanFunction, usize)> = None;
    for g in candidates {
        let d = disagreements(g, samples);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((g, d));
            if d == 0 {
                break;
            }
        }
    }
    best.map(|(g, _)| g)
}

/// The member of `family` with the fewest disagreements on `samples`, first
/// in enumeration order on ties.
pub fn learn_consistent(family: &Family, samples: &[(BitVector, bool)]) -> Result<LearnerOutput> {
    for (x, _) in samples {
        crate::error::check_dim(family.n, x.len())?;
    }
    let members = family.members()?;
    let hypothesis = first_minimum(&members, samples).ok_or(Error::Empty("family"))?.clone();
    Ok(LearnerOutput {
        hypothesis,
        samples_used: samples.len(),
        proper: true,
    })
}

/// The net member with the most agreements on `samples`, first on ties.
pub fn learn_via_net(net: &EpsilonNet, samples: &[(BitVector, bool)]) -> Result<LearnerOutput> {
    for (x, _) in samples {
        crate::error::check_dim(net.family.n, x.len())?;
    }
    let hypothesis = first_minimum(&net.members, samples).ok_or(Error::Empty("epsilon net"))?.clone();
    Ok(LearnerOutput {
        hypothesis,
        samples_used: samples.len(),
        proper: true,
    })
}

#[derive(Clone, Copy, Debug)]
pub enum Learner<'a> {
    /// [`learn_consistent`] over the whole family.
    Consistent,
    /// [`learn_via_net`] over a precomputed net of the family.
    Net(&'a EpsilonNet),
}

/// Learns from all but the last [`verification_size`] samples, then rejects
/// iff the hypothesis disagrees with more than `3 epsilon / 4` of the
/// verification block.
pub fn learn_then_verify(
    family: &Family,
    oracle: &mut QueryOracle,
    learner: Learner<'_>,
    epsilon: f64,
) -> Result<Verdict> {
    oracle.require(&[ModelKind::Passive], "learn_then_verify")?;
    if epsilon <= 0.0 {
        return Err(invalid("learn_then_verify needs epsilon > 0"));
    }
    if let Learner::Net(net) = learner {
        if net.family != *family {
            return Err(invalid(format!("net is for {}, not {family}", net.family)));
        }
    }
    let verify = verification_size(epsilon);
    let available = oracle.unrevealed().min(oracle.remaining());
    if available <= verify {
        return Ok(Verdict::of(
            Decision::Inconclusive,
            oracle,
            vec![format!("{available} samples, verification alone needs {verify}")],
        ));
    }
    let run = (|| {
        let learn_block = oracle.reveal(available - verify)?;
        let out = match learner {
            Learner::Consistent => learn_consistent(family, &learn_block)?,
            Learner::Net(net) => learn_via_net(net, &learn_block)?,
        };
        let check = oracle.reveal(verify)?;
        let rate = disagreements(&out.hypothesis, &check) as f64 / verify as f64;
        let decision = if rate > 0.75 * epsilon { Decision::Reject } else { Decision::Accept };
        Ok(Verdict::of(
            decision,
            oracle,
            vec![
                format!("learned from {} samples", out.samples_used),
                format!("verification disagreement rate {rate:.6}"),
            ],
        ))
    })();
    settle(oracle, run)
}
