//! Exact simulation of ancilla-free out-of-time-ordered correlator (OTOC)
//! measurement protocols on small qubit registers.
//!
//! * [`hilbert`]: states, Pauli embeddings, projectors (basis convention is
//!   documented there).
//! * [`dynamics`]: Hamiltonians and exact forward/backward evolution.
//! * [`otoc`]: direct evaluation of `C(t)` and the squared commutator.
//! * [`protocol`]: the projective protocol for `Re C` and the rotation
//!   protocol for `Im C`.
//! * [`sampling`]: finite-shot estimators and error bands.
//! * [`dressing`]: two-atom Rydberg dressing model with microwave-assisted
//!   sign inversion of the dressed Ising coupling.

pub mod dressing;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod otoc;
pub mod protocol;
pub mod random;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
