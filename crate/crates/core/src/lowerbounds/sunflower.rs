//! Delta-systems (sunflowers) by the Erdős–Rado recursion.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `a` sets with pairwise identical intersection `core`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSystem {
    pub core: Vec<usize>,
    pub sets: Vec<Vec<usize>>,
}

/// `(a - 1)^(b + 1) * b!`, saturating.
pub fn erdos_rado_threshold(a: usize, b: usize) -> u128 {
    let fact = (1..=b as u128).fold(1u128, |acc, i| acc.saturating_mul(i));
    (a.saturating_sub(1) as u128).saturating_pow(b as u32 + 1).saturating_mul(fact)
}

/// Searches a family of distinct `b`-sets for a Delta-system of size `a`.
///
/// Takes a maximal disjoint subfamily greedily in input order; if it has at
/// least `a` sets they form the answer with empty core. Otherwise recurses on
/// the sets containing the most frequent element (smallest element on ties),
/// with that element removed, and adds it back to the core. Duplicate sets
/// are merged before the search.
pub fn find_delta_system(sets: &[Vec<usize>], a: usize) -> Result<Option<DeltaSystem>> {
    let mut family: Vec<BTreeSet<usize>> = Vec::new();
    let mut seen = BTreeSet::new();
    for s in sets {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        if set.len() != s.len() {
            return Err(invalid(format!("set {s:?} has repeated elements")));
        }
        if seen.insert(set.clone()) {
            family.push(set);
        }
    }
    if let Some(b) = family.first().map(BTreeSet::len) {
        if family.iter().any(|s| s.len() != b) {
            return Err(invalid("all sets must have the same size"));
        }
    }
    Ok(search(family, a).map(|(core, members)| DeltaSystem {
        core: core.into_iter().collect(),
        sets: members.into_iter().map(|s| s.into_iter().collect()).collect(),
    }))
}

type Found = (BTreeSet<usize>, Vec<BTreeSet<usize>>);

fn search(family: Vec<BTreeSet<usize>>, a: usize) -> Option<Found> {
    if a == 0 {
        return Some((BTreeSet::new(), Vec::new()));
    }
    if a == 1 {
        let first = family.into_iter().next()?;
        return Some((first.clone(), vec![first]));
    }
    let mut used = BTreeSet::new();
    let mut disjoint = Vec::new();
    for s in &family {
        if s.is_disjoint(&used) {
            used.extend(s.iter().copied());
            disjoint.push(s.clone());
        }
    }
    if disjoint.len() >= a {
        disjoint.truncate(a);
        return Some((BTreeSet::new(), disjoint));
    }
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &family {
        for &x in s {
            *freq.entry(x).or_insert(0) += 1;
        }
    }
    // Most frequent element, smallest on ties.
    let (&x, _) = freq.iter().max_by_key(|&(&e, &c)| (c, std::cmp::Reverse(e)))?;
    let sub: Vec<BTreeSet<usize>> = family
        .iter()
        .filter(|s| s.contains(&x))
        .map(|s| {
            let mut t = s.clone();
            t.remove(&x);
            t
        })
        .collect();
    if sub.len() < a {
        return None;
    }
    let (mut core, members) = search(sub, a)?;
    core.insert(x);
    let members = members
        .into_iter()
        .map(|mut s| {
            s.insert(x);
            s
        })
        .collect();
    Some((core, members))
}

/// True iff the sets are distinct and every pair intersects in exactly
/// `core`.
pub fn verify_delta_system(system: &DeltaSystem) -> bool {
    let core: BTreeSet<usize> = system.core.iter().copied().collect();
    let sets: Vec<BTreeSet<usize>> = system.sets.iter().map(|s| s.iter().copied().collect()).collect();
    for i in 0..sets.len() {
        for j in 0..i {
            if sets[i] == sets[j] || sets[i].intersection(&sets[j]).copied().collect::<BTreeSet<_>>() != core {
                return false;
            }
        }
    }
    sets.len() != 1 || sets[0].is_superset(&core)
}
