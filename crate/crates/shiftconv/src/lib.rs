//! Desk-scale numerics for shifted convolution sums of L-function
//! coefficients: coefficient tables, Whittaker functions, theta series,
//! approximate functional equations, and amplified moment estimates.

pub mod amplifier;
pub mod arith;
pub mod config;
pub mod error;
pub mod kahan;
pub mod lfunc;
pub mod mellin;
pub mod quadforms;
pub mod quadrature;
pub mod selftest;
pub mod shifted;
pub mod special;
pub mod spline;
