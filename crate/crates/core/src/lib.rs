//! Entanglement of indistinguishable particles shared between two parties.
//!
//! States are pure, fixed-particle-number superpositions of Fock kets
//! ([`FockState`]). Modes are split between Alice and Bob by a
//! [`ModePartition`]. From there the crate computes
//!
//! * the mode entanglement, the ordinary entanglement of the Fock-space
//!   bipartition;
//! * the particle entanglement, which averages the mode entanglement over
//!   the sectors of definite local particle number and is what local
//!   operations respecting particle-number conservation can extract;
//! * single-particle entropies and fermionic correlations of two-particle
//!   states.
//!
//! ```
//! use fockent::{parse_state, measures, Statistics};
//!
//! let (s, p) = parse_state("(|0,1>+|1,0>)^2", Statistics::Boson).unwrap();
//! assert!((measures::mode_entanglement(&s, p).unwrap() - 2.0).abs() < 1e-12);
//! assert!((measures::particle_entanglement(&s, p).unwrap() - 0.5).abs() < 1e-12);
//! ```

pub mod asymptotics;
pub mod bipartite;
pub mod error;
pub mod exec;
pub mod fock;
pub mod measures;
pub mod parser;
pub mod sampling;
pub mod table;

pub use bipartite::{ModePartition, SectorDecomposition, Side};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fock::{compose, Amplitude, FockState, Occupation, Statistics};
pub use measures::{full_report, MeasureReport};
pub use parser::{format_state, parse_state};
