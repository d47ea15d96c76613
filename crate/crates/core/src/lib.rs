//! Entanglement preparation with spatially indistinguishable identical qubits.
//!
//! The crate is layered bottom-up:
//!
//! * [`spstate`]: single-particle states on a finite spatial-mode ⊗ pseudospin basis.
//! * [`amplitude`]: no-label N-particle amplitudes (permutation sum, permanent, determinant).
//! * [`mixedstate`]: superpositions and ensembles of elementary kets, traces and matrix elements.
//! * [`slocc`]: projection onto one particle per operational region.
//! * [`indist`]: entropic degree of spatial indistinguishability.
//! * [`entangle`]: concurrence, entanglement of formation and the CHSH-Bell function.
//! * [`noise`]: Werner states of identical qubits and their closed forms.
//! * [`scan`]: grid evaluation, Bell-violation maps and threshold search.
//! * [`verify`]: seeded self-checks of the pipeline against closed forms.

pub mod amplitude;
pub mod entangle;
mod error;
pub mod indist;
pub mod mixedstate;
pub mod noise;
pub mod scan;
pub mod slocc;
pub mod spstate;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
