//! Mixing of random walks on Cayley graphs, computed exactly by repeated
//! convolution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AbelianGroup;
use crate::error::{capacity, invalid, Result};

/// Largest group order for the exact walk distribution.
pub const MAX_WALK_ORDER: u64 = 1_000_000;

/// Total variation to uniform of the walk after `0, 1, ..., steps` steps,
/// each step adding a generator chosen uniformly from the multiset
/// `generators`.
pub fn cayley_walk_tv(group: &AbelianGroup, generators: &[u64], steps: usize) -> Result<Vec<f64>> {
    let order = group.order();
    if order > MAX_WALK_ORDER {
        return Err(capacity(format!("walk distribution on {group}"), MAX_WALK_ORDER));
    }
    if generators.is_empty() {
        return Err(invalid("walk needs at least one generator"));
    }
    for &g in generators {
        group.check(g)?;
    }
    let size = order as usize;
    let weight = 1.0 / generators.len() as f64;
    let uniform = 1.0 / size as f64;
    let tv = |p: &[f64]| 0.5 * p.iter().map(|x| (x - uniform).abs()).sum::<f64>();
    let mut p = vec![0.0; size];
    p[group.identity() as usize] = 1.0;
    let mut out = vec![tv(&p)];
    for _ in 0..steps {
        let mut next = vec![0.0; size];
        for (z, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let m = mass * weight;
            for &g in generators {
                next[group.add(z as u64, g) as usize] += m;
            }
        }
        p = next;
        out.push(tv(&p));
    }
    Ok(out)
}

/// `round(N^(1 / (k - 1)))`, the generator count at which `k` steps start to
/// mix.
pub fn default_generator_count(order: u64, k: usize) -> usize {
    if k < 2 {
        return order as usize;
    }
    (order as f64).powf(1.0 / (k - 1) as f64).round() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyReport {
    pub group: AbelianGroup,
    pub d: usize,
    pub k: usize,
    pub draws: usize,
    /// Mean TV to uniform after `k - 1` steps.
    pub mean_tv_before: f64,
    /// Mean TV to uniform after `k` steps.
    pub mean_tv_at: f64,
    /// `(TV(k - 1), TV(k))` for each generator draw.
    pub per_draw: Vec<(f64, f64)>,
}

/// Draws `d` generators uniformly with repetition, `draws` times, and
/// records the exact TV to uniform after `k - 1` and `k` steps.
pub fn cayley_mixing_experiment<R: Rng + ?Sized>(
    group: &AbelianGroup,
    d: usize,
    k: usize,
    draws: usize,
    rng: &mut R,
) -> Result<CayleyReport> {
    if k == 0 || d == 0 || draws == 0 {
        return Err(invalid("cayley_mixing_experiment needs k, d, draws >= 1"));
    }
    let mut per_draw = Vec::with_capacity(draws);
    for _ in 0..draws {
        let gens: Vec<u64> = (0..d).map(|_| group.random(rng)).collect();
        let tv = cayley_walk_tv(group, &gens, k)?;
        per_draw.push((tv[k - 1], tv[k]));
    }
    let mean = |f: fn(&(f64, f64)) -> f64| per_draw.iter().map(f).sum::<f64>() / draws as f64;
    Ok(CayleyReport {
        group: *group,
        d,
        k,
        draws,
        mean_tv_before: mean(|p| p.0),
        mean_tv_at: mean(|p| p.1),
        per_draw,
    })
}
