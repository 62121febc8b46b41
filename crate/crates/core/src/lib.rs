//! Tensor algebra and canonical dynamics for the metric Hamiltonian
//! formulation of General Relativity in d space-time dimensions.
//!
//! The crate is organized bottom-up:
//!
//! - [`tensor`]: dense multi-index storage, metric inversion, contraction
//!   and symmetrization;
//! - [`grav`]: the specific tensors of the canonical formulation (Δ, I, B
//!   and its symmetrizations, e, E);
//! - [`canonical`]: field points, the Poisson-bracket engine, the ΓΓ
//!   Lagrangian, the Legendre transform, Hamiltonians, the energy flux and
//!   a 1+1D lattice lab;
//! - [`nonlinear`]: symbolic degree analysis and the weak-field limit;
//! - [`quantum`]: a truncated minisuperspace Schrödinger solver;
//! - [`cli`]: the report-producing commands behind the `gravham` binary.

pub mod canonical;
pub mod cli;
pub mod dual;
pub mod error;
pub mod grav;
pub mod nonlinear;
pub mod quantum;
pub mod sampling;
pub mod tensor;

pub use error::{GravError, Result};
