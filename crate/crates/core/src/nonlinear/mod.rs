//! Symbolic degree analysis of the Hamiltonian's metric dependence and the
//! weak-field scaling check.

mod degrees;
mod poly;
mod weak;

pub use degrees::{classify_S_terms, term_two_potential, term_two_product, DegreeReport, TermReport};
pub use poly::{
    b_poly, bd_poly, bs_poly, contracted_with_derivatives, g00_big_e_poly, poly_det, potential_poly, Monomial,
    MetricPolynomial, NonPoly, Var,
};
pub use weak::{log_schedule, weak_field_expand, WeakFieldDirection, WeakFieldFit};
