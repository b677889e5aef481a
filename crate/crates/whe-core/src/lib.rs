//! Weighted Hermite–Einstein calculus on an exactly computable model:
//! circle-invariant equivariant bundles over the sphere, reduced to matrix
//! profiles over the momentum interval `[0, 1]`.
//!
//! Module map:
//! - [`grid`], [`bundle`], [`frame`], [`endo`], [`metric`] — the model
//!   geometry: grids, equivariant bundles, invariant metrics and their
//!   curvature/moment-map calculus.
//! - [`weight`], [`fourier`] — weight functions on the moment polytope and
//!   their compactly supported Fourier data.
//! - [`intersect`] — weighted equivariant intersection numbers by three
//!   mutually checking backends, and derived constants.
//! - [`stability`] — weighted slope and Gieseker stability of split bundles,
//!   lattice weight sums and their asymptotics.
//! - [`solver`] — line-bundle solves, the perturbed continuity method with
//!   its monitors and destabilizer extraction, the weighted Donaldson
//!   functional, and the inequality/identity reports.

pub mod bundle;
pub mod endo;
pub mod error;
pub mod fourier;
pub mod frame;
pub mod grid;
pub mod intersect;
pub mod metric;
pub mod solver;
pub mod stability;
pub mod weight;

pub use bundle::{BundleSpec, Coupling, EquivariantBundle, EquivariantLineBundle};
pub use error::{CoreError, Result};
pub use frame::ModelFrame;
pub use grid::MomentumGeometry;
