//! Para-Bose (Wigner–Heisenberg) oscillator states: squeezed vacuum and
//! coherent states of a single mode with time-dependent quadratic
//! Hamiltonian, their number-state amplitudes, moments, coordinate
//! wavefunctions and the overcomplete resolution of identity.

pub mod cli;
pub mod completeness;
pub mod coordrep;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod observables;
pub mod oscillator;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
