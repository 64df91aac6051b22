//! Numerical analysis of strictly contractive quantum channels.
//!
//! The crate is generic over the real scalar (`f32` or `f64`) through the
//! [`Real`] trait; the aliases at the crate root fix it to `f64`, which is
//! what the command-line front end uses.

// `!(x > 0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod channels;
pub mod contractivity;
pub mod discrimination;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod random;
pub mod schema;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Double-precision complex matrix.
pub type Matrix = linalg::ComplexMatrix<f64>;
/// Double-precision density operator.
pub type State = states::DensityOperator<f64>;
/// Double-precision channel.
pub type Channel = channels::QuantumChannel<f64>;
/// Single-precision complex matrix.
pub type Matrix32 = linalg::ComplexMatrix<f32>;
/// Single-precision density operator.
pub type State32 = states::DensityOperator<f32>;
/// Single-precision channel.
pub type Channel32 = channels::QuantumChannel<f32>;
