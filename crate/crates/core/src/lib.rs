//! Deterministic group testing estimators for the number of defective items.
//!
//! Given n items of which an unknown d are defective, a test on a pool of
//! items answers whether the pool contains a defective. The estimators here
//! return d̂ with d/Δ ≤ d̂ ≤ dΔ given an upper bound D ≥ d:
//!
//! * [`adaptive::estimate_adaptive`] splits positive pools round by round.
//! * [`ladder::estimate_ladder`] runs one non-adaptive batch of threshold
//!   testers at scales D/Δⁱ. Testers come from random Bernoulli designs
//!   ([`bernoulli`]), bipartite expanders ([`expander`]) or condenser tables
//!   ([`condenser`]).
//!
//! Answers come from a simulated [`oracle::TestOracle`] that counts every test.

pub mod adaptive;
pub mod bernoulli;
pub mod bounds;
pub mod condenser;
pub mod design;
pub mod error;
pub mod estimate;
pub mod expander;
pub mod ladder;
pub mod numeric;
pub mod oracle;
pub mod pool;
pub mod rng;
pub mod subsets;
pub mod validate;

pub use design::{DesignKind, PoolingDesign};
pub use error::{Error, Result};
pub use estimate::{Estimate, EstimateReport, EstimationProblem, Method, ReportFlags};
pub use numeric::{Delta, Rational, Real};
pub use oracle::{DefectiveSet, ItemUniverse, TestOracle};
pub use pool::Pool;
