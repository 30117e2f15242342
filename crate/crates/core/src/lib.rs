//! Spectral toolkit for zeroth-order perturbations of the periodic
//! Benjamin-Ono equation
//!
//! ```text
//! ∂_t u = H∂²_x u - 2u∂_x u + Au,   x ∈ 𝕋,
//! ```
//!
//! where `A` is a Fourier multiplier with bounded, real-preserving symbol.
//! The crate provides the Fourier representation of real fields
//! ([`spectral`]), the admissible symbols ([`multipliers`]), the mean-value
//! gauge ([`gauge`]), a pseudospectral integrator ([`evolution`]), the
//! Lax-operator conserved quantities β and β_s ([`lax`]), sequence-side
//! Birkhoff diagnostics ([`birkhoff`]), and the experiment runner behind the
//! `bopert` CLI ([`runner`]).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birkhoff;
pub mod config;
pub mod error;
pub mod evolution;
pub mod gauge;
pub mod lax;
pub mod multipliers;
pub mod quadrature;
pub mod runner;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{evolve, SolverConfig, Trajectory};
pub use multipliers::MultiplierSymbol;
pub use num_complex::Complex64;
pub use spectral::{AnalyticField, TorusField};
