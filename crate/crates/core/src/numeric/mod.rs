//! Numerical building blocks shared by the modelling modules.

pub mod quadrature;
pub mod special;
pub mod summation;
