//! Quantitative uniqueness for square integrable functions whose Fourier
//! transform either decays against a log-convex weight or lives on a sparse
//! set.
//!
//! The crate is organized around one pipeline:
//!
//! * [`weights`] builds admissible weights `W`, their moment sequences
//!   `M_n = sup_{t >= 1} t^n / W(t)`, and the associated Ostrowski function.
//! * [`quasianalytic`] turns a moment sequence into Bang degrees, Remez-type
//!   propagation factors, and the final uniqueness constant when the
//!   logarithmic integral of `W` diverges.
//! * [`covers`] handles the sparse-support side: scale decompositions,
//!   short covers, regularization, and the majorant construction.
//! * [`verify`] contains discrete sanity checks: observability constants of
//!   restricted DFT matrices, synthetic spectra, and Paley-Wiener style
//!   test profiles.
//!
//! Quantities that underflow or overflow `f64` in linear scale are kept as
//! logarithms throughout; see [`quasianalytic::LogScale`] for the one place
//! where even the logarithm can overflow.

pub mod covers;
pub mod intervals;
pub mod quasianalytic;
pub mod verify;
pub mod weights;
