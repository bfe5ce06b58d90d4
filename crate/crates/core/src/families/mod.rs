//! Parametric function families: sampling, membership, exact distances,
//! far-instance generation and greedy packings.
//!
//! `Symmetric { t }` is the family of functions invariant under all
//! permutations of some set of at least `t` coordinates.
//! `PartiallySymmetric { k }` is the same family with `t = n - k`; both are
//! kept so configurations can name whichever parameter is natural.
//! `Linear` is the homogeneous linear family (no constant term).

mod distance;
mod enumerate;
mod far;
mod net;
mod structure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use distance::{exact_distance_to_family, nearest_member, Nearest};
pub use far::{certify_far, far_function_generator, Certification, FarInstance};
pub use net::{greedy_epsilon_net, EpsilonNet};
pub use structure::{algebraic_degree, junta_core, relevant_variables, symmetry_classes};

use crate::boolfn::BooleanFunction;
use crate::error::{invalid, Error, Result};
use crate::stats::binomial;

/// Largest number of members materialized by [`Family::members`].
pub const MAX_ENUMERATION: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// XOR of exactly `k` distinct coordinates.
    KLinear { k: usize },
    /// Depends on at most `k` coordinates.
    Junta { k: usize },
    /// Invariant under permutations of some set of `t` coordinates.
    Symmetric { t: usize },
    /// Invariant under permutations of all but some `k` coordinates.
    PartiallySymmetric { k: usize },
    /// GF(2) polynomials of degree at most `d`.
    Polynomial { d: usize },
    /// All homogeneous linear functions.
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub kind: FamilyKind,
    pub n: usize,
}

impl Family {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        let (name, p) = match kind {
            FamilyKind::KLinear { k } => ("k", k),
            FamilyKind::Junta { k } => ("k", k),
            FamilyKind::Symmetric { t } => ("t", t),
            FamilyKind::PartiallySymmetric { k } => ("k", k),
            FamilyKind::Polynomial { d } => ("d", d),
            FamilyKind::Linear => ("n", n),
        };
        if p > n {
            return Err(invalid(format!("family parameter {name} = {p} exceeds n = {n}")));
        }
        Ok(Self { kind, n })
    }

    pub fn k_linear(n: usize, k: usize) -> Result<Self> {
        Self::new(FamilyKind::KLinear { k }, n)
    }

    pub fn junta(n: usize, k: usize) -> Result<Self> {
        Self::new(FamilyKind::Junta { k }, n)
    }

    pub fn symmetric(n: usize, t: usize) -> Result<Self> {
        Self::new(FamilyKind::Symmetric { t }, n)
    }

    pub fn partially_symmetric(n: usize, k: usize) -> Result<Self> {
        Self::new(FamilyKind::PartiallySymmetric { k }, n)
    }

    pub fn polynomial(n: usize, d: usize) -> Result<Self> {
        Self::new(FamilyKind::Polynomial { d }, n)
    }

    pub fn linear(n: usize) -> Self {
        Self {
            kind: FamilyKind::Linear,
            n,
        }
    }

    /// For the symmetric kinds, the number of coordinates outside the
    /// symmetric block.
    pub(crate) fn asymmetric_size(&self) -> Option<usize> {
        match self.kind {
            FamilyKind::Symmetric { t } => Some(self.n - t),
            FamilyKind::PartiallySymmetric { k } => Some(k),
            _ => None,
        }
    }

    /// Exact number of distinct members when it has a closed form and fits
    /// in `u128`.
    pub fn member_count(&self) -> Option<u128> {
        let n = self.n as u64;
        let pow2 = |e: u128| if e < 128 { Some(1u128 << e) } else { None };
        match self.kind {
            FamilyKind::KLinear { k } => binomial(n, k as u64),
            FamilyKind::Linear => pow2(n as u128),
            FamilyKind::Polynomial { d } => {
                pow2(crate::gf2::MonomialBasis::size_for(self.n, d)?)
            }
            FamilyKind::Junta { k } => (0..=k).try_fold(0u128, |acc, j| {
                let exact = functions_depending_on_all(j)?;
                acc.checked_add(binomial(n, j as u64)?.checked_mul(exact)?)
            }),
            FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
                let kk = self.asymmetric_size().unwrap();
                if kk == 0 {
                    pow2(n as u128 + 1)
                } else if kk + 1 >= self.n {
                    pow2(pow2(n as u128)?)
                } else {
                    None
                }
            }
        }
    }

    /// Upper bound `C(n, k) 2^(2^k)` on the number of `k`-juntas.
    pub fn junta_count_bound(n: usize, k: usize) -> Option<u128> {
        let tables = if k < 7 { 1u128 << (1u32 << k) } else { return None };
        binomial(n as u64, k as u64)?.checked_mul(tables)
    }

    /// Whether `f` equals some member pointwise.
    pub fn contains(&self, f: &BooleanFunction) -> Result<bool> {
        crate::error::check_dim(self.n, f.n())?;
        match self.kind {
            FamilyKind::Linear => structure::is_linear(f, None),
            FamilyKind::KLinear { k } => structure::is_linear(f, Some(k)),
            FamilyKind::Junta { k } => Ok(relevant_variables(f)?.len() <= k),
            FamilyKind::Polynomial { d } => Ok(algebraic_degree(f)? <= d),
            FamilyKind::Symmetric { .. } | FamilyKind::PartiallySymmetric { .. } => {
                let t = self.n - self.asymmetric_size().unwrap();
                if t <= 1 {
                    return Ok(true);
                }
                Ok(symmetry_classes(f)?.iter().any(|c| c.len() >= t))
            }
        }
    }
}

/// Number of functions on `j` variables that depend on every one of them.
fn functions_depending_on_all(j: usize) -> Option<u128> {
    if j > 6 {
        return None;
    }
    let mut total: i128 = 0;
    for i in 0..=j {
        let term = binomial(j as u64, i as u64)? as i128 * (1i128 << (1u32 << i));
        total += if (j - i).is_multiple_of(2) { term } else { -term };
    }
    Some(total as u128)
}

/// Free-function form of [`Family::contains`].
pub fn is_member(f: &BooleanFunction, family: &Family) -> Result<bool> {
    family.contains(f)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match self.kind {
            FamilyKind::KLinear { k } => write!(f, "lin k={k} n={n}"),
            FamilyKind::Junta { k } => write!(f, "junta k={k} n={n}"),
            FamilyKind::Symmetric { t } => write!(f, "sym t={t} n={n}"),
            FamilyKind::PartiallySymmetric { k } => write!(f, "psym k={k} n={n}"),
            FamilyKind::Polynomial { d } => write!(f, "pol d={d} n={n}"),
            FamilyKind::Linear => write!(f, "linear n={n}"),
        }
    }
}

/// Parses `lin k=3 n=50`, optionally written `family=lin k=3 n=50`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let head = tokens.next().ok_or_else(|| Error::Parse("empty family".into()))?;
        let name = head.strip_prefix("family=").unwrap_or(head);
        let mut params = std::collections::BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found {tok:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Parse(format!("{k}: expected an integer, found {v:?}")))?;
            if params.insert(k, v).is_some() {
                return Err(Error::Parse(format!("duplicate key {k:?}")));
            }
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| Error::Parse(format!("family {name}: missing {key}")))
        };
        let n = take("n")?;
        let kind = match name {
            "lin" | "klinear" => FamilyKind::KLinear { k: take("k")? },
            "junta" | "jun" => FamilyKind::Junta { k: take("k")? },
            "sym" => FamilyKind::Symmetric {
                t: params.remove("t").unwrap_or(n),
            },
            "psym" => FamilyKind::PartiallySymmetric { k: take("k")? },
            "pol" | "poly" => FamilyKind::Polynomial { d: take("d")? },
            "linear" => FamilyKind::Linear,
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(Error::Parse(format!("family {name}: unexpected key {k:?}")));
        }
        Self::new(kind, n)
    }
}
