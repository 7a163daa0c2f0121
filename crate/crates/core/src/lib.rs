//! Exceptional-prime bounds for the residual Galois representations attached
//! to Hilbert modular newforms over real quadratic fields.

pub mod arith;
pub mod bounds;
pub mod dickson;
pub mod heckedata;
pub mod inertia;
pub mod quadfield;
pub mod report;
pub mod residue;
