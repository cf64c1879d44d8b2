//! Path-spin contextuality experiment for a single spin-1/2 particle.
//!
//! A particle's interferometer path and its spin span two disjoint
//! two-dimensional Hilbert spaces. Entangling them makes the CHSH
//! combination of jointly measured path and spin observables exceed the
//! bound obeyed by every noncontextual value assignment.
//!
//! * [`linalg`]: exact 2×2 / 4×4 complex algebra.
//! * [`preparation`]: the state leaving the first beam splitter.
//! * [`measurement`]: path observables of the second beam splitter and
//!   Stern-Gerlach spin observables.
//! * [`chsh`]: exact CHSH values and settings optimization.
//! * [`lhv`]: noncontextual hidden-variable models.
//! * [`experiment`]: shot-level Monte Carlo, estimators, the imprecision
//!   study and wave-packet spreading.
//! * [`cli`]: the `pathspin` command-line front end.

pub mod chsh;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod experiment;
pub mod lhv;
pub mod linalg;
pub mod measurement;
pub mod preparation;

pub use error::{Error, Result};
