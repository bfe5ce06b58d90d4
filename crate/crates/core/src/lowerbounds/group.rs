use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::BitVector;
use crate::error::{check_dim, invalid, Result};

/// A finite abelian group with elements encoded as `u64`.
///
/// `Z2Power { q }` stores a vector of `Z_2^q` as a bitmask (bit `i` =
/// coordinate `i`, `q <= 63`); `Cyclic { order }` stores residues
/// `0..order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbelianGroup {
    Z2Power { q: usize },
    Cyclic { order: u64 },
}

impl AbelianGroup {
    pub fn z2_power(q: usize) -> Result<Self> {
        if q > 63 {
            return Err(invalid(format!("Z_2^q needs q <= 63, got {q}")));
        }
        Ok(AbelianGroup::Z2Power { q })
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("Z_N needs N >= 1"));
        }
        Ok(AbelianGroup::Cyclic { order })
    }

    pub fn order(&self) -> u64 {
        match *self {
            AbelianGroup::Z2Power { q } => 1 << q,
            AbelianGroup::Cyclic { order } => order,
        }
    }

    pub fn identity(&self) -> u64 {
        0
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.order()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match *self {
            AbelianGroup::Z2Power { .. } => a ^ b,
            AbelianGroup::Cyclic { order } => ((a as u128 + b as u128) % order as u128) as u64,
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        match *self {
            AbelianGroup::Z2Power { .. } => a,
            AbelianGroup::Cyclic { order } => (order - a % order) % order,
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.order())
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }

    /// Element of `Z_2^q` from a bit vector of length `q`.
    pub fn from_bitvector(&self, v: &BitVector) -> Result<u64> {
        match *self {
            AbelianGroup::Z2Power { q } => {
                check_dim(q, v.len())?;
                Ok(v.to_word().unwrap_or(0))
            }
            AbelianGroup::Cyclic { .. } => Err(invalid("bit vectors encode elements of Z_2^q only")),
        }
    }

    pub fn to_bitvector(&self, a: u64) -> Result<BitVector> {
        match *self {
            AbelianGroup::Z2Power { q } => Ok(BitVector::from_word(q, a)),
            AbelianGroup::Cyclic { .. } => Err(invalid("bit vectors encode elements of Z_2^q only")),
        }
    }

    pub(crate) fn check(&self, a: u64) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(invalid(format!("{a} is not an element of a group of order {}", self.order())))
        }
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbelianGroup::Z2Power { q } => write!(f, "Z2^{q}"),
            AbelianGroup::Cyclic { order } => write!(f, "Z{order}"),
        }
    }
}

impl std::str::FromStr for AbelianGroup {
    type Err = crate::Error;

    /// `Z2^q` or `ZN` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || crate::Error::Parse(format!("bad group {s:?}; expected Z2^q or ZN"));
        if let Some(q) = t.strip_prefix("z2^") {
            AbelianGroup::z2_power(q.parse().map_err(|_| bad())?)
        } else if let Some(n) = t.strip_prefix('z') {
            AbelianGroup::cyclic(n.parse().map_err(|_| bad())?)
        } else {
            Err(bad())
        }
    }
}
