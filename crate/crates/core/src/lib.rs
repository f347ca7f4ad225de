//! Nonstationary random walks on compact abelian groups.
//!
//! The crate computes exact distributions of walks whose step laws change
//! over time, measures their Wasserstein-1 distance to Haar measure, decides
//! strict aperiodicity, builds the constructive contraction certificate
//! (ε-wide partitions and mass extraction), and verifies the ergodic theorem
//! and large-deviation decay by Monte Carlo.
//!
//! Module map:
//!
//! - [`group`]: the concrete groups, metrics and Haar structure.
//! - [`measure`]: atomic measures, convolution, total variation.
//! - [`wasserstein`]: exact W1 via [`transport`], distance to Haar, contraction coefficient.
//! - [`aperiodicity`]: strict aperiodicity and support density.
//! - [`partition`]: ε-wide partitions, decomposition and the contraction certificate.
//! - [`walk`]: schedules, observables, Birkhoff averages, large-deviation tails.
//! - [`counterexample`]: reproductions of the non-aperiodic and non-compact failures.

pub mod aperiodicity;
pub mod counterexample;
pub mod group;
pub mod measure;
pub mod partition;
pub mod rng;
pub mod transport;
pub mod walk;
pub mod wasserstein;

pub use group::{Element, Group, GroupError, GroupKind};
pub use measure::{AtomicMeasure, MeasureError, MeasureFamily};
pub use wasserstein::{TransportPlan, WassersteinError};
