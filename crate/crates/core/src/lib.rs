//! Exact optimal quantization for the Cantor-type measure generated by the
//! infinite similitude family `S_j(x) = x/3^j + 1 - 1/3^(j-1)` with weights
//! `2^-j`.
//!
//! The crate has two independent halves that check each other:
//!
//! - the construction side ([`words`], [`measure`], [`quantizer`]) builds
//!   optimal n-point quantizers and their exact rational distortion errors
//!   from closed forms, with no floating point anywhere;
//! - the oracle side ([`oracle`]) approximates the measure by a finite atomic
//!   measure with a certified collapse bound, solves one-dimensional weighted
//!   k-means exactly by dynamic programming, and confirms that both routes
//!   land within the bound of each other.

pub mod error;
pub mod measure;
pub mod oracle;
pub mod quantizer;
pub mod rational;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
pub use words::Word;
