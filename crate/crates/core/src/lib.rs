//! Numerical laboratory for the critical-line zeta function, the
//! Hardy–Littlewood integral, Jacob's ladders and Dirichlet divisor sums.
//!
//! The crate is organised bottom-up:
//!
//! * [`zeta`] evaluates `Z(t)`, `|ζ(½+it)|²`, `θ(t)`, `S(t)`, `S₁(t)` and `ζ(s)` for real `s`.
//! * [`grid`] stores the cumulative integral `J(T) = ∫₀ᵀ |ζ(½+it)|² dt` on a cached grid.
//! * [`ladder`] inverts the almost-exact representation of `J` to obtain `φ₁` and its iterates.
//! * [`arithmetic`] holds the exact integer side: divisor sums, prime counts, Fermat rationals.
//! * [`ortho`] builds ladder-generated Legendre systems and their Gram matrices.
//! * [`experiments`] turns the limit statements into finite-height convergence reports.

pub mod arithmetic;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod ladder;
pub mod ortho;
pub mod quadrature;
pub mod roots;
pub mod zeta;

pub use error::{Error, ErrorClass, Result};

/// Euler's constant `c = 0.5772156649…`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `1 − c ≈ 0.4228`, the slope of the linear increments of `J` along a ladder.
pub const ONE_MINUS_C: f64 = 1.0 - EULER_GAMMA;

/// `ln 2π`.
pub const LN_2PI: f64 = 1.837_877_066_409_345_3;
