//! Closed-form models: the Hopf fibration, `SU(2)` with `χ` and `e`, the truncated loop
//! algebra, and lens spaces.

pub mod hopf;
pub mod lens;
pub mod loops;
pub mod su2;
