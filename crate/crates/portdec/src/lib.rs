//! Discrete exterior calculus on oriented simplicial complexes with
//! boundary-augmented circumcentric duals, simplicial Dirac structures built
//! on top of them, and finite-dimensional port-Hamiltonian models with
//! energy-tracking time integration.
//!
//! The layered structure mirrors the construction:
//!
//! * [`complex`] — oriented manifold-like simplicial complexes;
//! * [`dual`] — circumcentric dual cells, augmented so the boundary of the
//!   dual is the dual of the boundary;
//! * [`operators`] — coboundary, trace, dual-derivative, and diagonal Hodge
//!   matrices;
//! * [`cochain`] — discrete forms, pairings, the de Rham map, and the
//!   summation-by-parts identity;
//! * [`dirac`] — the two simplicial Dirac structures and their isotropy
//!   verification;
//! * [`models`] — telegraph line, 2D wave, diffusion, and Maxwell models;
//! * [`sim`] — RK4 integration with exact energy bookkeeping, the closed
//!   form telegraph benchmark, and convergence studies;
//! * [`cli`] — scenario and mesh file formats plus the subcommand runners.

pub mod cli;
pub mod cochain;
pub mod complex;
pub mod dirac;
pub mod dual;
pub mod error;
pub mod geometry;
pub mod models;
pub mod operators;
pub mod sim;

pub use cochain::{Cochain, Locus};
pub use complex::SimplicialComplex;
pub use dirac::{DiracBlocks, DiracVariant};
pub use dual::DualComplex;
pub use models::{BoundaryPort, PhsModel};
pub use operators::OperatorSet;
pub use sim::Trajectory;
