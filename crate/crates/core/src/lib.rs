//! Outage analysis, Monte Carlo validation, optimal power allocation and
//! routing for multi-hop ad hoc links protected by friendly jamming.

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod rng;
pub mod routing;
pub mod tradeoff;

pub use error::{Error, Result};
pub use geometry::{Point, PointSet, Region, Scenario};
pub use params::{ConstraintKind, Hop, OutageConstraint, PathSpec, SystemParams};

/// The guide's code snippets, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/outage.md")]
    mod outage {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/power_allocation.md")]
    mod power_allocation {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
