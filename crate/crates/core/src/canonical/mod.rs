//! Canonical dynamics: field points, the Poisson algebra, the ΓΓ Lagrangian,
//! the Legendre transform, the Hamiltonians and constraints, the energy flux,
//! and the 1+1D lattice laboratory.

mod bracket;
mod field;
mod flux;
mod hamiltonian;
mod lagrangian;
pub mod lattice;
mod legendre;

pub use bracket::{
    b_expr, bracket_pi_with_bg, bracket_pi_with_bg_engine, cross_term_expr, poisson_bracket, CanonicalExpr, Monomial,
    Symbol,
};
pub use field::FieldPoint;
pub use flux::{flux_vector, FluxVector};
pub use hamiltonian::{
    dof_count, hamiltonian_hc, hamiltonian_tensor, hamiltonian_tilde, tau_from_t, total_hamiltonian, HamiltonianTensor,
    HamiltonianTilde,
};
pub use lagrangian::{
    lagrangian_b_form, lagrangian_christoffel, lagrangian_gamma_gamma, lagrangian_split, lagrangian_split_with,
    LagrangianSplit, CHRISTOFFEL_RTOL,
};
pub use legendre::{cross_coefficient, momentum_from_velocity, primary_constraint, velocity_from_momentum};
