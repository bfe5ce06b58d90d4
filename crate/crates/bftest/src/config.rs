//! Experiment configuration and its validation into a runnable plan.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bftest_core::families::{greedy_epsilon_net, EpsilonNet};
use bftest_core::gf2::MonomialBasis;
use bftest_core::testers::{
    active_linear_query_size, junta_sample_size, net_sample_size, psf_active_pair_count, psf_passive_sample_size,
    symmetric_passive_sample_size, verification_size, ModelKind, DEFAULT_REPETITIONS, DEFAULT_SURPLUS,
    JUNTA_SAMPLE_CONSTANT, MAX_JUNTA_K, MAX_JUNTA_N, MAX_POLY_SOLVER_COLUMNS, MAX_PSF_K, PSF_CONSTANT,
};
use bftest_core::{BooleanFunction, Family, FamilyKind};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, HarnessError, Result};

/// Constant in the passive symmetric sample size `c n^(1/4)`.
pub const SYMMETRIC_CONSTANT: f64 = 8.0;
/// Pairs gathered by the tolerant tester, as a multiple of `1 / gap^2`.
pub const TOLERANT_PAIR_FACTOR: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TesterId {
    Blr,
    ActiveLinear,
    PassiveLinear,
    PassivePoly,
    Symmetric,
    TolerantSymmetric,
    Psf,
    Junta,
    LearnVerify,
}

impl fmt::Display for TesterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl FromStr for TesterId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| config_error(format!("unknown tester {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// A uniformly random family member per trial.
    #[default]
    Member,
    /// A random function certified `epsilon`-far per trial.
    Far,
    /// The function given by `target_fn` in every trial.
    Fixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    #[default]
    Consistent,
    Net,
}

/// One experiment, as read from a TOML file or command-line flags. Unset
/// optional parameters take tester-specific defaults during [`resolve`].
///
/// [`resolve`]: ExperimentConfig::resolve
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tester: TesterId,
    /// Family for `learn-verify`, e.g. `lin k=2 n=12`.
    pub family: Option<String>,
    pub model: Option<ModelKind>,
    pub target: TargetKind,
    /// Descriptor of the fixed target, e.g. `klinear n=10 I=0,3,6`.
    pub target_fn: Option<String>,
    pub learner: LearnerKind,
    pub n: usize,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub epsilon: f64,
    /// Lower distance threshold of the tolerant tester.
    pub epsilon_lo: Option<f64>,
    pub u: Option<usize>,
    /// Sample size (passive) or pair count (active pair testers).
    pub q: Option<usize>,
    pub repetitions: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tester: TesterId::Blr,
            family: None,
            model: None,
            target: TargetKind::Member,
            target_fn: None,
            learner: LearnerKind::Consistent,
            n: 16,
            k: None,
            d: None,
            epsilon: 0.2,
            epsilon_lo: None,
            u: None,
            q: None,
            repetitions: None,
            trials: 1000,
            seed: 0,
            csv: None,
            json: None,
        }
    }
}

/// Fully resolved parameters; everything that affects results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub tester: TesterId,
    pub family: Family,
    pub model: ModelKind,
    pub target: TargetKind,
    pub target_fn: Option<String>,
    pub learner: LearnerKind,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub epsilon: f64,
    pub epsilon_lo: f64,
    /// Pool size (active model only).
    pub u: usize,
    /// Sample size (passive) or pairs (active pair testers).
    pub q: usize,
    pub repetitions: usize,
    /// Queries each trial's oracle may answer.
    pub budget: usize,
    pub trials: usize,
    pub seed: u64,
    /// Net size when `learner = net`.
    pub net_size: Option<usize>,
}

impl ExperimentConfig {
    /// Reads a TOML configuration. `default_seed` applies when the file does
    /// not set `seed`.
    pub fn from_toml_file(path: &Path, default_seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let toml_err = |source| HarnessError::Toml {
            path: path.to_path_buf(),
            source,
        };
        let mut table: toml::Table = toml::from_str(&text).map_err(toml_err)?;
        if let Some(seed) = default_seed {
            if !table.contains_key("seed") {
                let seed = i64::try_from(seed).map_err(|_| config_error(format!("seed {seed} does not fit in TOML")))?;
                table.insert("seed".into(), toml::Value::Integer(seed));
            }
        }
        table.try_into().map_err(toml_err)
    }

    /// Sets a numeric parameter by name (`n`, `k`, `d`, `epsilon`,
    /// `epsilon_lo`, `u`, `q`, `repetitions`, `trials`, `seed`).
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let int = || -> Result<usize> {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(config_error(format!("{name} must be a non-negative integer, got {value}")));
            }
            Ok(value as usize)
        };
        match name {
            "n" => self.n = int()?,
            "k" => self.k = Some(int()?),
            "d" => self.d = Some(int()?),
            "epsilon" => self.epsilon = value,
            "epsilon_lo" => self.epsilon_lo = Some(value),
            "u" => self.u = Some(int()?),
            "q" => self.q = Some(int()?),
            "repetitions" => self.repetitions = Some(int()?),
            "trials" => self.trials = int()?,
            "seed" => self.seed = int()? as u64,
            other => return Err(config_error(format!("unknown sweep parameter {other:?}"))),
        }
        Ok(())
    }

    /// Validates every parameter against the tester's preconditions and
    /// fills in defaults. Nothing is run.
    pub fn resolve(&self) -> Result<Plan> {
        let n = self.n;
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        if n == 0 {
            return Err(config_error("n must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(config_error(format!("epsilon must lie in (0, 1/2], got {}", self.epsilon)));
        }
        let tester = self.tester;
        let allowed: &[ModelKind] = match tester {
            TesterId::Blr => &[ModelKind::Classic],
            TesterId::ActiveLinear => &[ModelKind::Active],
            TesterId::PassiveLinear | TesterId::PassivePoly | TesterId::Junta | TesterId::LearnVerify => {
                &[ModelKind::Passive]
            }
            TesterId::Symmetric | TesterId::TolerantSymmetric | TesterId::Psf => {
                &[ModelKind::Passive, ModelKind::Active]
            }
        };
        let model = self.model.unwrap_or(allowed[0]);
        if !allowed.contains(&model) {
            return Err(config_error(format!("{tester} does not run in the {model} model")));
        }
        let u = match model {
            ModelKind::Active => self.u.unwrap_or(n * n),
            _ => {
                if self.u.is_some() {
                    return Err(config_error(format!("u applies only to the active model, not {model}")));
                }
                0
            }
        };
        if model == ModelKind::Active && u < 2 {
            return Err(config_error("active pool size u must be at least 2"));
        }
        let mut k = 0;
        let mut d = 0;
        let mut q = 0;
        let mut repetitions = 0;
        let mut epsilon_lo = 0.0;
        let budget;
        let family = match tester {
            TesterId::Blr => {
                k = self.k.unwrap_or(1);
                if k == 0 {
                    return Err(config_error("blr needs k >= 1"));
                }
                repetitions = self.repetitions.unwrap_or(DEFAULT_REPETITIONS);
                budget = repetitions * (2 * k + 1);
                Family::linear(n)
            }
            TesterId::ActiveLinear => {
                repetitions = self.repetitions.unwrap_or(DEFAULT_REPETITIONS);
                q = active_linear_query_size(n, u);
                budget = repetitions * (n + 1);
                Family::linear(n)
            }
            TesterId::PassiveLinear => {
                q = self.q.unwrap_or(n + DEFAULT_SURPLUS);
                budget = q;
                Family::linear(n)
            }
            TesterId::PassivePoly => {
                d = self.d.unwrap_or(2);
                if d > n {
                    return Err(config_error(format!("d = {d} exceeds n = {n}")));
                }
                let nd = MonomialBasis::size_for(n, d).unwrap_or(u128::MAX);
                if nd > MAX_POLY_SOLVER_COLUMNS as u128 {
                    return Err(config_error(format!("n_d = {nd} exceeds the solver limit {MAX_POLY_SOLVER_COLUMNS}")));
                }
                q = self.q.unwrap_or(nd as usize + DEFAULT_SURPLUS);
                if q < DEFAULT_SURPLUS {
                    return Err(config_error(format!("passive-poly needs q >= {DEFAULT_SURPLUS} for the holdout")));
                }
                budget = q;
                Family::polynomial(n, d)?
            }
            TesterId::Symmetric => {
                q = match model {
                    ModelKind::Passive => self.q.unwrap_or(symmetric_passive_sample_size(n, SYMMETRIC_CONSTANT)),
                    _ => self.q.unwrap_or(psf_active_pair_count(n, 0, self.epsilon, PSF_CONSTANT)),
                };
                budget = if model == ModelKind::Passive { q } else { 2 * q };
                Family::symmetric(n, n)?
            }
            TesterId::TolerantSymmetric => {
                epsilon_lo = self.epsilon_lo.unwrap_or(self.epsilon / 2.0);
                if !(0.0..self.epsilon).contains(&epsilon_lo) {
                    return Err(config_error(format!("epsilon_lo must lie in [0, epsilon), got {epsilon_lo}")));
                }
                let gap = self.epsilon - epsilon_lo;
                let pairs = (TOLERANT_PAIR_FACTOR / (gap * gap)).ceil();
                q = match model {
                    ModelKind::Passive => self.q.unwrap_or_else(|| {
                        let p = bftest_core::testers::collision_probability(n);
                        (2.0 * pairs / p).sqrt().ceil() as usize + 1
                    }),
                    _ => self.q.unwrap_or(pairs as usize),
                };
                budget = if model == ModelKind::Passive { q } else { 2 * q };
                Family::symmetric(n, n)?
            }
            TesterId::Psf => {
                k = self.k.unwrap_or(1);
                if k > MAX_PSF_K || k > n {
                    return Err(config_error(format!("psf needs k <= min({MAX_PSF_K}, n), got k = {k}")));
                }
                q = match model {
                    ModelKind::Passive => self.q.unwrap_or(psf_passive_sample_size(n, k, self.epsilon, PSF_CONSTANT)),
                    _ => psf_active_pair_count(n, k, self.epsilon, PSF_CONSTANT),
                };
                budget = if model == ModelKind::Passive { q } else { 2 * q };
                Family::partially_symmetric(n, k)?
            }
            TesterId::Junta => {
                k = self.k.unwrap_or(2);
                if k > MAX_JUNTA_K || n > MAX_JUNTA_N || k > n {
                    return Err(config_error(format!(
                        "junta needs k <= {MAX_JUNTA_K}, n <= {MAX_JUNTA_N}, k <= n; got n = {n}, k = {k}"
                    )));
                }
                q = self.q.unwrap_or(junta_sample_size(n, k, JUNTA_SAMPLE_CONSTANT));
                budget = q;
                Family::junta(n, k)?
            }
            TesterId::LearnVerify => {
                let text = self.family.as_deref().ok_or_else(|| config_error("learn-verify needs family"))?;
                let family: Family = text.parse()?;
                if family.n != n {
                    return Err(config_error(format!("family dimension {} differs from n = {n}", family.n)));
                }
                let size = match self.learner {
                    LearnerKind::Consistent => family
                        .member_count()
                        .filter(|&c| c <= bftest_core::families::MAX_ENUMERATION as u128)
                        .ok_or_else(|| config_error(format!("{family} is too large to enumerate")))?,
                    LearnerKind::Net => 0,
                };
                q = match self.q {
                    Some(q) => q,
                    None if self.learner == LearnerKind::Consistent => {
                        net_sample_size(self.epsilon / 2.0, size as usize) + verification_size(self.epsilon)
                    }
                    None => 0,
                };
                budget = q;
                family
            }
        };
        if self.target == TargetKind::Fixed {
            let text = self.target_fn.as_deref().ok_or_else(|| config_error("target = fixed needs target_fn"))?;
            let f: BooleanFunction = text.parse()?;
            if f.n() != n {
                return Err(config_error(format!("target_fn has n = {}, expected {n}", f.n())));
            }
        }
        let mut plan = Plan {
            tester,
            family,
            model,
            target: self.target,
            target_fn: self.target_fn.clone(),
            learner: self.learner,
            n,
            k,
            d,
            epsilon: self.epsilon,
            epsilon_lo,
            u,
            q,
            repetitions,
            budget,
            trials: self.trials,
            seed: self.seed,
            net_size: None,
        };
        if tester == TesterId::LearnVerify && self.learner == LearnerKind::Net {
            let net = plan.build_net()?.expect("net learner");
            plan.net_size = Some(net.len());
            if self.q.is_none() {
                plan.q = net_sample_size(self.epsilon / 2.0, net.len()) + verification_size(self.epsilon);
                plan.budget = plan.q;
            }
        }
        if plan.budget == 0 {
            return Err(config_error(format!("{tester} resolved to an empty query budget")));
        }
        Ok(plan)
    }
}

impl Plan {
    /// The epsilon/2-net used by the net learner, if any.
    pub fn build_net(&self) -> Result<Option<EpsilonNet>> {
        if self.tester != TesterId::LearnVerify || self.learner != LearnerKind::Net {
            return Ok(None);
        }
        if matches!(self.family.kind, FamilyKind::Linear | FamilyKind::Polynomial { .. }) && self.n > 20 {
            return Err(config_error(format!("net for {} is too large", self.family)));
        }
        Ok(Some(greedy_epsilon_net(&self.family, self.epsilon / 2.0)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_tester() {
        for tester in TesterId::value_variants() {
            let mut cfg = ExperimentConfig {
                tester: *tester,
                n: 8,
                ..Default::default()
            };
            if *tester == TesterId::LearnVerify {
                cfg.family = Some("lin k=2 n=8".into());
            }
            let plan = cfg.resolve().unwrap_or_else(|e| panic!("{tester}: {e}"));
            assert!(plan.budget > 0);
            assert_eq!(plan.family.n, 8);
        }
    }

    #[test]
    fn validation_errors() {
        let bad = [
            ExperimentConfig {
                trials: 0,
                ..Default::default()
            },
            ExperimentConfig {
                model: Some(ModelKind::Passive),
                ..Default::default()
            },
            ExperimentConfig {
                tester: TesterId::PassiveLinear,
                u: Some(10),
                ..Default::default()
            },
            ExperimentConfig {
                epsilon: 0.0,
                ..Default::default()
            },
            ExperimentConfig {
                tester: TesterId::Junta,
                n: 20,
                ..Default::default()
            },
            ExperimentConfig {
                tester: TesterId::LearnVerify,
                family: Some("lin k=2 n=9".into()),
                ..Default::default()
            },
            ExperimentConfig {
                target: TargetKind::Fixed,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.resolve(), Err(HarnessError::Config(_) | HarnessError::Core(_))), "{cfg:?}");
        }
    }

    #[test]
    fn resolved_budgets() {
        let plan = ExperimentConfig::default().resolve().unwrap();
        assert_eq!((plan.model, plan.k, plan.repetitions, plan.budget), (ModelKind::Classic, 1, 10, 30));
        let plan = ExperimentConfig {
            tester: TesterId::ActiveLinear,
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!((plan.u, plan.q), (256, 6));
        let plan = ExperimentConfig {
            tester: TesterId::PassiveLinear,
            n: 20,
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(plan.q, 30);
    }

    #[test]
    fn toml_round_trip_and_params() {
        let mut cfg = ExperimentConfig {
            tester: TesterId::Psf,
            model: Some(ModelKind::Active),
            k: Some(2),
            ..Default::default()
        };
        cfg.set_param("q", 12.0).unwrap();
        assert!(cfg.set_param("q", 1.5).is_err());
        assert!(cfg.set_param("zeta", 1.0).is_err());
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
        let parsed: ExperimentConfig = toml::from_str("tester = \"passive-linear\"\nn = 20\nmodel = \"passive\"\n").unwrap();
        assert_eq!(parsed.tester, TesterId::PassiveLinear);
        assert_eq!(parsed.trials, 1000);
        assert!(toml::from_str::<ExperimentConfig>("bogus = 1").is_err());
    }
}
