//! Micromaser and laser linewidth from a truncated Fock-space master equation.
//!
//! The crate computes steady-state photon statistics and the field linewidth
//! by several independent routes: closed trace formulas, a trace over the
//! jump operators, and a quantum-regression oracle on the sideband sector of
//! the master equation. It also provides a uniform polynomial approximation
//! of the interaction-time average.

pub mod error;
pub mod fock;
pub mod ladder;
pub mod linewidth;
pub mod params;
pub mod ode;
pub mod quadrature;
pub mod regression;
pub mod steady_state;
pub mod uniform;

pub use error::{Error, Result};
pub use params::{InteractionTimeDistribution, MaserParams, QuadratureNode};
pub use steady_state::PhotonStatistics;
