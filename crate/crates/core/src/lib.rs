//! Covert proactive eavesdropping under channel uncertainty.
//!
//! A full-duplex monitor listens to a suspicious link `A→B` and injects
//! artificial noise (AN) to push Bob's rate below its own. Bob runs a radiometer
//! to detect the AN; the monitor keeps its AN power low enough that Bob's
//! averaged minimum detection error probability stays above `1-δ`.
//!
//! - [`detector`]: Bob's optimal threshold and minimum detection error probability.
//! - [`covertness`]: averaging over the known jamming power and the covert AN budget.
//! - [`surveillance`]: the eavesdropping non-outage probability `E[X]`.
//! - [`optimizer`]: AN power search and the per-realization optimum.

pub mod covertness;
pub mod detector;
pub mod error;
pub mod model;
pub mod optimizer;
pub mod quad;
pub mod special;
pub mod stream;
pub mod surveillance;

pub use covertness::{avg_min_dep, avg_min_dep_closed, covert_power, CovertBudget, PowerBound};
pub use detector::{dep_components, min_dep, min_dep_case3, optimal_threshold, DepBreakdown, DetectorInputs};
pub use error::{Error, Result};
pub use model::{db_to_linear, linear_to_db, sample_channels, ChannelDraw, SystemParams};
pub use optimizer::{algorithm1, pj_star_realization, ConstraintActive, DeltaSet, ExEvaluator, OptimResult};
pub use stream::{McEstimate, Substreams};
pub use surveillance::{ex_closed, ex_monte_carlo, ex_quadrature, rate_bob, rate_monitor, ExMethod, ExOutcome, SinrPair};
