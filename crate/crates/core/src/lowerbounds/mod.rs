//! Exact statistics and experiments behind the query lower bounds:
//! subset-sum counts in abelian groups, `pi_S(y)` for random k-linear
//! functions, Delta-systems and Cayley-graph mixing.

mod cayley;
mod group;
mod pis;
mod sumset;
mod sunflower;

pub use cayley::{cayley_mixing_experiment, cayley_walk_tv, default_generator_count, CayleyReport, MAX_WALK_ORDER};
pub use group::AbelianGroup;
pub use pis::{
    agreeing_pair_probability, criterion_transition, lemma21_criterion, lin_k_output_tv, pi_s, pi_s_counts,
    tv_distance, violates_threshold, Lemma21Report, MAX_DISTRIBUTION_Q,
};
pub use sumset::{
    sumset_concentration_experiment, sumset_distribution, sumset_y_count, Regime, SumsetReport, SumsetStatistic,
    MAX_ENUMERATED_SUBSETS,
};
pub use sunflower::{erdos_rado_threshold, find_delta_system, verify_delta_system, DeltaSystem};
