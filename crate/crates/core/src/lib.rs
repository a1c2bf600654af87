//! Polar-based forward error correction with sparsity constraints on the
//! generator matrix.
//!
//! The crate is organized around a column-splitting transformation of the
//! standard polar generator matrix `G2^{⊗n}`: columns heavier than a weight
//! threshold are split into disjoint-support pieces, and the encoder graph is
//! rewired so that successive-cancellation decoding still works with the same
//! recursive schedule. Two encoding schemes are provided on top of the
//! splitting step: a plain split encoder for erasure channels and an augmented
//! scheme for general binary-input symmetric channels that preserves every
//! bit-channel of the unsplit code at the cost of extra channel uses.
//!
//! Modules:
//! - [`kernel`]: GF(2) matrices/vectors, polarization-kernel analysis,
//!   column-weight statistics of Kronecker powers.
//! - [`drs`]: the decoder-respecting splitting algorithm, split-count
//!   combinatorics and the multiplicative rate loss `gamma`.
//! - [`graph`]: executable encoder graphs (standard, split, augmented).
//! - [`channels`]: discrete symmetric channel models and polarization
//!   transforms.
//! - [`construct`]: per-bit reliabilities, frozen-set selection, code
//!   assembly.
//! - [`decode`]: successive-cancellation decoders (erasure and LLR domain).
//! - [`sim`]: seeded Monte Carlo block-error-rate harness with CSV output.

pub mod channels;
pub mod construct;
pub mod decode;
pub mod drs;
pub mod graph;
pub mod kernel;
pub mod sim;

mod error;

pub use error::Error;
pub use kernel::{BitMatrix, BitVector};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
