//! Instances certified to be far from a family.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{exact_distance_to_family, Family, FamilyKind};
use crate::boolfn::{fraction_to_f64, BitVector, BooleanFunction, Repr};
use crate::error::{Error, Result};
use crate::gf2::MonomialBasis;
use crate::stats::ln_binomial;

/// Sample count used by the estimated certificate.
pub const ESTIMATE_SAMPLES: usize = 40_000;
/// Largest failure probability accepted from the union-bound certificate.
pub const UNION_BOUND_TOLERANCE: f64 = 1e-6;
/// Random candidates tried by [`far_function_generator`].
pub const GENERATOR_ATTEMPTS: usize = 64;
/// Candidate variable sets scanned by the estimated certificate.
const MAX_ESTIMATE_SETS: u128 = 4096;

/// How a distance lower bound was established.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Certification {
    /// `epsilon <= 0`; nothing to certify.
    Trivial,
    /// Exact distance to the family.
    Exact,
    /// Plug-in class-majority distance from `samples` uniform points, minus
    /// `margin` (three standard errors).
    Estimated { samples: usize, margin: f64 },
    /// For a uniformly random function: the probability that any member is
    /// within `epsilon` is at most `failure_probability`
    /// (`|F| exp(-2^n KL(eps || 1/2))`).
    UnionBound { failure_probability: f64 },
}

#[derive(Clone, Debug)]
pub struct FarInstance {
    pub function: BooleanFunction,
    /// Certified lower bound on the distance to the family.
    pub distance_lower_bound: f64,
    pub certification: Certification,
}

/// Tries to certify that `f` is at least `epsilon`-far from `family`.
/// Returns `None` when no certificate reaches `epsilon`.
pub fn certify_far<R: Rng + ?Sized>(
    f: &BooleanFunction,
    family: &Family,
    epsilon: f64,
    rng: &mut R,
) -> Result<Option<FarInstance>> {
    let instance = |bound: f64, certification| FarInstance {
        function: f.clone(),
        distance_lower_bound: bound,
        certification,
    };
    if epsilon <= 0.0 {
        return Ok(Some(instance(0.0, Certification::Trivial)));
    }
    match exact_distance_to_family(f, family) {
        Ok(d) => {
            let d = fraction_to_f64(&d);
            return Ok((d >= epsilon).then(|| instance(d, Certification::Exact)));
        }
        Err(Error::Capacity { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some(est) = estimated_distance(f, family, rng)? {
        let margin = 3.0 / (2.0 * (ESTIMATE_SAMPLES as f64).sqrt());
        let bound = est - margin;
        if bound >= epsilon {
            return Ok(Some(instance(
                bound,
                Certification::Estimated {
                    samples: ESTIMATE_SAMPLES,
                    margin,
                },
            )));
        }
        return Ok(None);
    }
    if matches!(f.repr(), Repr::SeededRandom { .. }) {
        if let Some(p) = union_bound(family, epsilon) {
            if p <= UNION_BOUND_TOLERANCE {
                return Ok(Some(instance(epsilon, Certification::UnionBound { failure_probability: p })));
            }
        }
    }
    Ok(None)
}

/// Draws seeded random functions until one is certified `epsilon`-far.
pub fn far_function_generator<R: Rng + ?Sized>(
    family: &Family,
    epsilon: f64,
    rng: &mut R,
) -> Result<FarInstance> {
    for _ in 0..GENERATOR_ATTEMPTS {
        let f = BooleanFunction::random(family.n, rng);
        if let Some(inst) = certify_far(&f, family, epsilon, rng)? {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed {
        attempts: GENERATOR_ATTEMPTS,
    })
}

/// Plug-in estimate for the kinds whose members are "a table over a variable
/// set plus a weight": juntas and the symmetric kinds. The estimate is the
/// minimum over candidate sets of the empirical class-minority mass.
fn estimated_distance<R: Rng + ?Sized>(
    f: &BooleanFunction,
    family: &Family,
    rng: &mut R,
) -> Result<Option<f64>> {
    let n = family.n;
    let (kk, weighted) = match family.kind {
        FamilyKind::Junta { k } => (k, false),
        FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
            (family.asymmetric_size().unwrap(), true)
        }
        _ => return Ok(None),
    };
    let sets = crate::stats::binomial(n as u64, kk as u64).unwrap_or(u128::MAX);
    if sets > MAX_ESTIMATE_SETS || kk > 16 {
        return Ok(None);
    }
    let points: Vec<(BitVector, bool)> = (0..ESTIMATE_SAMPLES)
        .map(|_| {
            let x = BitVector::random(n, rng);
            let v = f.evaluate(&x)?;
            Ok((x, v))
        })
        .collect::<Result<_>>()?;
    let width = if weighted { n - kk + 1 } else { 1 };
    let mut best = f64::INFINITY;
    for vars in (0..n).combinations(kk) {
        let mask = BitVector::from_indices(n, &vars);
        let mut counts = vec![[0u32; 2]; (1 << kk) * width];
        for (x, v) in &points {
            let a = x.gather(&vars) as usize;
            let w = if weighted { x.weight() - x.masked_weight(&mask) } else { 0 };
            counts[a * width + w][*v as usize] += 1;
        }
        let minority: u32 = counts.iter().map(|c| c[0].min(c[1])).sum();
        best = best.min(minority as f64 / ESTIMATE_SAMPLES as f64);
    }
    Ok(Some(best))
}

/// `ln |F|` (or an upper bound on it).
fn ln_family_size(family: &Family) -> Option<f64> {
    let n = family.n;
    let ln2 = std::f64::consts::LN_2;
    Some(match family.kind {
        FamilyKind::Linear => n as f64 * ln2,
        FamilyKind::KLinear { k } => ln_binomial(n as u64, k as u64),
        FamilyKind::Polynomial { d } => MonomialBasis::size_for(n, d)? as f64 * ln2,
        FamilyKind::Junta { k } => ln_binomial(n as u64, k as u64) + 2f64.powi(k as i32) * ln2,
        FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
            let kk = family.asymmetric_size().unwrap();
            ln_binomial(n as u64, kk as u64) + 2f64.powi(kk as i32) * (n - kk + 1) as f64 * ln2
        }
    })
}

/// `|F| P[Bin(2^n, 1/2) <= eps 2^n]` bounded via Chernoff.
fn union_bound(family: &Family, epsilon: f64) -> Option<f64> {
    if epsilon >= 0.5 {
        return None;
    }
    let kl = epsilon * (2.0 * epsilon).ln() + (1.0 - epsilon) * (2.0 * (1.0 - epsilon)).ln();
    let ln_p = ln_family_size(family)? - 2f64.powi(family.n as i32) * kl;
    Some(ln_p.exp().min(1.0))
}
