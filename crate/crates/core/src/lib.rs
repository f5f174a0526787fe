//! Grover search with constraint-aware initialization.
//!
//! The crate covers the whole pipeline: linear constraint systems are
//! preprocessed into disjoint blocks ([`constraints`]), each block is turned
//! into a state-preparation circuit ([`prep`]), and the resulting initializer
//! drives Grover iterations on a dense statevector ([`simulator`],
//! [`grover`]). Circuit costs are audited in [`resources`], noisy execution
//! lives in [`noise`], and [`bench`] wires everything to exact-cover
//! instances.

pub mod bench;
pub mod circuit;
pub mod constraints;
pub mod error;
pub mod grover;
pub mod noise;
pub mod prep;
pub mod resources;
pub mod rng;
pub mod simulator;

pub use circuit::{Circuit, Gate, GateKind};
pub use error::{Error, Result};
pub use simulator::StateVector;

pub use num_complex::Complex64;
