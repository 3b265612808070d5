//! Reduction of equivariant gerbes to the quotient.

pub mod analytic;
pub mod discrete;
