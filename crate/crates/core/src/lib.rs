//! Property testing of Boolean functions `f: Z_2^n -> Z_2` under the classic,
//! active and passive query models.
//!
//! The crate is organised bottom-up:
//!
//! * [`boolfn`] holds bit vectors, the tagged function representation,
//!   truth tables, distances and the Walsh-Hadamard spectrum.
//! * [`gf2`] is bit-packed linear algebra over GF(2).
//! * [`families`] implements the parametric families (k-linear, juntas,
//!   partially symmetric, low-degree polynomials, linear) with sampling,
//!   membership, exact distance oracles, epsilon-nets and far-instance
//!   generation.
//! * [`testers`] contains the query oracle that enforces the access model and
//!   every tester and proper learner.
//! * [`lowerbounds`] provides the statistics behind the lower bounds:
//!   `pi_S(y)`, subset-sum counts in abelian groups, Delta-systems and
//!   Cayley-graph mixing.
//! * [`stats`] has the small amount of shared statistics (Wilson intervals,
//!   binomial tails).

pub mod boolfn;
pub mod error;
pub mod families;
pub mod gf2;
pub mod lowerbounds;
pub mod stats;
pub mod testers;

pub use boolfn::{BitVector, BooleanFunction, FourierSpectrum, Fraction};
pub use error::{Error, Result};
pub use families::{Family, FamilyKind};
