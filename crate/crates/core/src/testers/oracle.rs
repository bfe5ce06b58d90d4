use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{check_dim, Error, Result};

/// Access model tag, without the sampled points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Classic,
    Active,
    Passive,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Classic => "classic",
            ModelKind::Active => "active",
            ModelKind::Passive => "passive",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(ModelKind::Classic),
            "active" => Ok(ModelKind::Active),
            "passive" => Ok(ModelKind::Passive),
            other => Err(Error::Parse(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Classic,
    /// Queries are restricted to the pool.
    Active { pool: Vec<BitVector> },
    /// Labelled points are revealed in sequence order.
    Passive { sequence: Vec<BitVector> },
}

/// Query access to a target function under one of the three models.
///
/// Every answered query is charged against the budget and recorded in the
/// transcript. Pool and sequence points are drawn uniformly at construction.
#[derive(Clone, Debug)]
pub struct QueryOracle {
    target: BooleanFunction,
    model: Model,
    budget: usize,
    spent: usize,
    transcript: Vec<(BitVector, bool)>,
    pool_index: HashMap<BitVector, usize>,
}

impl QueryOracle {
    fn build(target: BooleanFunction, model: Model, budget: usize) -> Self {
        let pool_index = match &model {
            Model::Active { pool } => pool.iter().enumerate().map(|(i, x)| (x.clone(), i)).rev().collect(),
            _ => HashMap::new(),
        };
        Self {
            target,
            model,
            budget,
            spent: 0,
            transcript: Vec::new(),
            pool_index,
        }
    }

    pub fn classic(target: BooleanFunction, budget: usize) -> Self {
        Self::build(target, Model::Classic, budget)
    }

    /// Active access to a pool of `u` uniform points.
    pub fn active<R: Rng + ?Sized>(target: BooleanFunction, u: usize, budget: usize, rng: &mut R) -> Self {
        let pool = (0..u).map(|_| BitVector::random(target.n(), rng)).collect();
        Self::build(target, Model::Active { pool }, budget)
    }

    /// Passive access to a sequence of `len` uniform points; the budget is `len`.
    pub fn passive<R: Rng + ?Sized>(target: BooleanFunction, len: usize, rng: &mut R) -> Self {
        let sequence = (0..len).map(|_| BitVector::random(target.n(), rng)).collect();
        Self::build(target, Model::Passive { sequence }, len)
    }

    /// Oracle over explicit points, for replaying fixed instances.
    pub fn with_model(target: BooleanFunction, model: Model, budget: usize) -> Result<Self> {
        let n = target.n();
        match &model {
            Model::Classic => {}
            Model::Active { pool: points } | Model::Passive { sequence: points } => {
                for x in points {
                    check_dim(n, x.len())?;
                }
            }
        }
        Ok(Self::build(target, model, budget))
    }

    pub fn n(&self) -> usize {
        self.target.n()
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::Classic => ModelKind::Classic,
            Model::Active { .. } => ModelKind::Active,
            Model::Passive { .. } => ModelKind::Passive,
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn spent(&self) -> usize {
        self.spent
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.spent
    }

    pub fn transcript(&self) -> &[(BitVector, bool)] {
        &self.transcript
    }

    /// The active pool; empty for other models.
    pub fn pool(&self) -> &[BitVector] {
        match &self.model {
            Model::Active { pool } => pool,
            _ => &[],
        }
    }

    /// Number of passive points not yet revealed; zero for other models.
    pub fn unrevealed(&self) -> usize {
        match &self.model {
            Model::Passive { sequence } => sequence.len() - self.spent,
            _ => 0,
        }
    }

    fn charge(&mut self) -> Result<()> {
        if self.spent >= self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        self.spent += 1;
        Ok(())
    }

    fn answer(&mut self, x: BitVector) -> Result<bool> {
        self.charge()?;
        let v = self.target.evaluate(&x)?;
        self.transcript.push((x, v));
        Ok(v)
    }

    /// Queries an arbitrary point (classic) or a pool point (active).
    pub fn query(&mut self, x: &BitVector) -> Result<bool> {
        check_dim(self.n(), x.len())?;
        match &self.model {
            Model::Classic => {}
            Model::Active { .. } => {
                if !self.pool_index.contains_key(x) {
                    return Err(Error::ModelViolation(format!("point {x} is not in the active pool")));
                }
            }
            Model::Passive { .. } => {
                return Err(Error::ModelViolation("passive oracles only reveal samples in order".into()));
            }
        }
        self.answer(x.clone())
    }

    /// Queries pool point `i` (active model only).
    pub fn query_pool(&mut self, i: usize) -> Result<bool> {
        let x = match &self.model {
            Model::Active { pool } => pool
                .get(i)
                .cloned()
                .ok_or_else(|| Error::ModelViolation(format!("pool index {i} out of range")))?,
            _ => return Err(Error::ModelViolation("pool queries need the active model".into())),
        };
        self.answer(x)
    }

    /// Reveals the next labelled sample (passive model only).
    pub fn next_sample(&mut self) -> Result<(BitVector, bool)> {
        let x = match &self.model {
            Model::Passive { sequence } => sequence.get(self.spent).cloned().ok_or(Error::BudgetExhausted {
                budget: sequence.len(),
            })?,
            _ => return Err(Error::ModelViolation("sample reveals need the passive model".into())),
        };
        let v = self.answer(x.clone())?;
        Ok((x, v))
    }

    /// Reveals the next `count` samples.
    pub fn reveal(&mut self, count: usize) -> Result<Vec<(BitVector, bool)>> {
        (0..count).map(|_| self.next_sample()).collect()
    }

    /// Reveals every remaining sample within budget.
    pub fn reveal_all(&mut self) -> Result<Vec<(BitVector, bool)>> {
        let count = self.unrevealed().min(self.remaining());
        self.reveal(count)
    }

    pub(crate) fn require(&self, kinds: &[ModelKind], who: &str) -> Result<()> {
        if kinds.contains(&self.kind()) {
            Ok(())
        } else {
            Err(Error::ModelViolation(format!("{who} does not run under the {} model", self.kind())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classic_answers_anything_within_budget() {
        let mut o = QueryOracle::classic(BooleanFunction::parity(4), 2);
        assert!(o.query(&"1000".parse().unwrap()).unwrap());
        assert!(!o.query(&"1100".parse().unwrap()).unwrap());
        assert!(matches!(o.query(&"1110".parse().unwrap()), Err(Error::BudgetExhausted { budget: 2 })));
        assert_eq!(o.spent(), 2);
        assert_eq!(o.transcript().len(), 2);
        assert!(o.query(&"11".parse().unwrap()).is_err());
        assert!(o.next_sample().is_err());
    }

    #[test]
    fn active_rejects_points_outside_pool() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut o = QueryOracle::active(BooleanFunction::parity(30), 5, 10, &mut rng);
        let p = o.pool()[3].clone();
        assert_eq!(o.query(&p).unwrap(), p.weight() % 2 == 1);
        let outside = &p ^ &BitVector::from_indices(30, &[0]);
        if !o.pool().contains(&outside) {
            assert!(matches!(o.query(&outside), Err(Error::ModelViolation(_))));
        }
        assert!(o.query_pool(4).is_ok());
        assert!(o.query_pool(5).is_err());
        assert_eq!(o.spent(), 2);
    }

    #[test]
    fn passive_transcript_is_a_prefix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut o = QueryOracle::passive(BooleanFunction::dictator(6, 2).unwrap(), 7, &mut rng);
        let first = o.reveal(3).unwrap();
        let rest = o.reveal_all().unwrap();
        assert_eq!(rest.len(), 4);
        let Model::Passive { sequence } = o.model().clone() else { unreachable!() };
        let all: Vec<_> = first.into_iter().chain(rest).collect();
        assert_eq!(all.iter().map(|(x, _)| x.clone()).collect::<Vec<_>>(), sequence);
        assert_eq!(all.as_slice(), o.transcript());
        assert!(o.next_sample().is_err());
        assert!(o.query(&sequence[0]).is_err());
        assert_eq!(o.spent(), o.budget());
    }
}
