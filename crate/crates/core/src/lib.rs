//! Capacities, rate penalties, error exponents and energy-buffer guarantees
//! for subblock-constrained codes over discrete memoryless channels.
//!
//! All information quantities are in bits.

pub mod ba;
pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod cli;
pub mod energy;
pub mod error;
pub mod exponent;
pub mod finiteblock;
pub mod numeric;
pub mod secc;
pub mod typeclass;
pub mod vector;

pub use channel::{Channel, Distribution};
pub use error::{Error, Result};
pub use typeclass::Composition;
