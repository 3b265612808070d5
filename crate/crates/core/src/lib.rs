//! Bundle gerbes with connection and curving, their Čech–Deligne cocycles, the
//! equivariant obstruction class and reduction to quotients.
//!
//! Two backends share the vocabulary:
//! * an exact backend over finite simplicial complexes with finite group actions,
//!   where forms are rational cochains and circle values are rationals mod 1;
//! * an analytic backend of closed-form models (Hopf fibration, SU(2), loop algebra)
//!   checked by sampling and quadrature.

pub mod cover;
pub mod deligne;
pub mod equivariant;
pub mod error;
pub mod forms;
pub mod gerbe;
pub mod group;
pub mod linalg;
pub mod models;
pub mod cli;
pub mod quadrature;
pub mod rational;
pub mod reduction;
pub mod simplicial;
pub mod smith;

pub use error::{Error, Result};
