//! Simulation and optimization core for logical two-qubit ZZ gates between
//! modules of position-noisy trapped qubits.
//!
//! The crate models a distance-dependent Ising coupling between encoded
//! qubit modules, propagates classical or quantized position noise into a
//! distribution of logical coupling strengths, scores the resulting gate
//! with the Choi fidelity of the ZZ-damping channel, and searches for the
//! logical encoding that maximizes that fidelity over an interaction-time
//! grid.
//!
//! Everything numeric is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the `*64` aliases at the crate root fix `f64`, which is
//! what the CLI and the presets use.

pub mod error;
pub mod fidelity;
pub mod geometry;
pub mod lattice;
pub mod noise;
pub mod optimizer;
pub mod presets;
pub mod quad;
pub mod runner;
pub mod scalar;
pub mod trap;

pub use error::{Error, Result};

/// Concrete `f64` aliases for the common types.
pub type SpatialVector64 = geometry::SpatialVector<f64>;
pub type CouplingLaw64 = geometry::CouplingLaw<f64>;
pub type ModuleLayout64 = geometry::ModuleLayout<f64>;
pub type LogicalVector64 = geometry::LogicalVector<f64>;
pub type ModulePair64 = geometry::ModulePair<f64>;
pub type CouplingDistribution64 = noise::CouplingDistribution<f64>;
pub type CouplingKernel64 = noise::CouplingKernel<f64>;
pub type GateTime64 = fidelity::GateTime<f64>;
pub type TwoQubitChannel64 = fidelity::TwoQubitChannel<f64>;
pub type InfidelityCurve64 = optimizer::InfidelityCurve<f64>;
pub type TrapPairConfig64 = trap::TrapPairConfig<f64>;
pub type LatticeConfig64 = lattice::LatticeConfig<f64>;
