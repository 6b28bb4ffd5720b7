//! False-alert limits of threshold-based screening.
//!
//! A person is flagged when their count of chance matches across `k`
//! attributes reaches a threshold `m`. With per-attribute match probability
//! `p` the count is approximately Poisson with mean `lambda = k p`, and the
//! chance that at least one of `n` innocent people is flagged collapses from
//! near zero to near one as `n` passes `sqrt(lambda) exp(lambda D(c))`,
//! `c = m / lambda`.
//!
//! - [`tailcore`]: Poisson and binomial tails with Chernoff and Robbins bounds.
//! - [`reliability`]: system risk, critical population, phase scans.
//! - [`lifetime`]: failure time under exponential data growth.
//! - [`cohorts`]: heterogeneous populations and group dominance.
//! - [`posterior`]: PPV, posterior odds and evidential regimes.
//! - [`effdim`]: effective dimensionality under correlation.
//! - [`simkit`]: reproducible Monte Carlo validation.
//! - [`shell`]: scenario files, plot-ready datasets and the example registry.
//!
//! ```
//! use screen_limits::{reliability, ScreeningConfig};
//!
//! let cfg = ScreeningConfig::with_count(1000, 0.005, 15, 1_000_000).unwrap();
//! let risk = reliability::system_risk(&cfg).unwrap();
//! assert!((risk.expected_false_alerts - 226.0).abs() < 1.0);
//! assert_eq!(risk.prob_at_least_one, 1.0);
//! ```

pub mod cohorts;
pub mod effdim;
pub mod error;
pub mod lifetime;
pub mod posterior;
pub mod reliability;
pub mod shell;
pub mod simkit;
pub mod tailcore;

pub use error::{Error, Result};
pub use reliability::{ScreeningConfig, SystemRisk, Threshold};
pub use tailcore::TailEstimate;

/// Crate version recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
