//! Greedy packings of pairwise-far members.

use super::Family;
use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{invalid, Result};

/// Family members that are pairwise at distance at least `epsilon`.
/// Built greedily, so maximality holds but maximum size is not claimed.
#[derive(Clone, Debug)]
pub struct EpsilonNet {
    pub family: Family,
    pub epsilon: f64,
    pub members: Vec<BooleanFunction>,
}

impl EpsilonNet {
    /// Wraps explicit members after checking that they are pairwise far.
    pub fn new(family: Family, epsilon: f64, members: Vec<BooleanFunction>) -> Result<Self> {
        let tables: Vec<BitVector> = members.iter().map(|g| g.truth_table()).collect::<Result<_>>()?;
        for i in 0..tables.len() {
            for j in 0..i {
                if !far_apart(&tables[i], &tables[j], epsilon) {
                    return Err(invalid(format!("net members {j} and {i} are closer than {epsilon}")));
                }
            }
        }
        Ok(Self {
            family,
            epsilon,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn far_apart(a: &BitVector, b: &BitVector, epsilon: f64) -> bool {
    (a ^ b).weight() as f64 >= epsilon * a.len() as f64 - 1e-9
}

/// Scans the family in enumeration order and keeps each member that is
/// `epsilon`-far from every member kept so far.
pub fn greedy_epsilon_net(family: &Family, epsilon: f64) -> Result<EpsilonNet> {
    let mut members = Vec::new();
    let mut tables: Vec<BitVector> = Vec::new();
    for g in family.members()? {
        let t = g.truth_table()?;
        if tables.iter().all(|s| far_apart(s, &t, epsilon)) {
            tables.push(t);
            members.push(g);
        }
    }
    Ok(EpsilonNet {
        family: *family,
        epsilon,
        members,
    })
}
