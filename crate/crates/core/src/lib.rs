//! Spin-temperature equalization in dipolar-coupled spin-1/2 clusters and
//! the pairwise entanglement that accompanies it.
//!
//! The crate is organized bottom-up:
//!
//! * [`operator`]: dense Hermitian algebra on the `2^N` register.
//! * [`geometry`]: chain, ring and rectangle clusters.
//! * [`hamiltonian`]: Zeeman, dipolar, secular and non-secular operators.
//! * [`thermo`]: quasi-equilibrium and non-equilibrium states, energy flux,
//!   and the relaxation ODE.
//! * [`entanglement`]: Wootters concurrence of spin pairs.
//! * [`cli`]: scenario files, runners and CSV output behind the `spinthermo` binary.

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod operator;
pub mod thermo;

pub use error::{Error, Result};
pub use geometry::{GeometryLabel, SpinGeometry};
pub use hamiltonian::OperatorSet;
pub use thermo::{ThermoState, Trajectory};
