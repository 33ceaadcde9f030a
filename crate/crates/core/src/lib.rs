//! Stratified quantization of SU(2) lattice gauge theory at finite truncation.
//!
//! The crate is organized bottom-up:
//!
//! - [`liecore`]: SU(2), su(2) and SL(2,ℂ) arithmetic, the polar map, the
//!   momentum map of the diagonal conjugation action, and Haar integration.
//! - [`strata`]: orbit-type classification of phase points and the stratum poset.
//! - [`tproc`]: constraint reduction in finite-dimensional C*-algebras
//!   (left ideal, hereditary subalgebra, open projection, weak commutant,
//!   physical algebra, Dirac states).
//! - [`quasichar`]: the orthonormal basis of conjugation-invariant functions on
//!   SU(2)^N up to a spin cutoff, its Segal-Bargmann image, and the function
//!   algebra on it.
//! - [`costrat`]: the costratified Hilbert space and the stratified observable
//!   algebra built on a truncated quasi-character basis.
//! - [`dynamics`]: the single-plaquette Kogut-Susskind Hamiltonian and stratum
//!   localization observables.

pub mod costrat;
pub mod dynamics;
mod error;
pub mod liecore;
pub mod linalg;
pub mod quasichar;
pub mod strata;
mod tolerances;
pub mod tproc;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
