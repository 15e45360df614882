//! Constructive approximation of continuous functions on `[0,1]` with
//! integer endpoint values by integer combinations of the Bernstein basis.
//!
//! The pipeline is: certify `f` ([`function`]), build the lattice
//! approximant `Q_n` ([`quantizer`]), then measure it against the
//! theoretical bounds ([`analysis`]). [`bernstein`] holds the basis itself
//! and [`expr`] a small expression language for defining `f`.

pub mod analysis;
pub mod bernstein;
pub mod cli;
pub mod error;
pub mod expr;
pub mod function;
pub mod quantizer;

pub use error::{Error, Result};
pub use function::{FunctionSpec, ModulusSpec};
pub use quantizer::{LatticeApproximant, QuantizationTrace};
