//! Exact computation of stability thresholds and radial functionals for
//! polarized smooth projective toric varieties.
//!
//! Everything is computed in exact rational arithmetic. The layers are:
//!
//! * [`geometry`]: rational polytopes, volumes, mixed volumes and one-parameter
//!   polytope families with exact chamber decompositions.
//! * [`toric`]: fans, torus-invariant divisors, star subdivisions, intersection
//!   numbers and Zariski decomposition.
//! * [`volume_fn`]: volume functions `t -> vol(L - tD)` and the positive
//!   intersection pairing.
//! * [`filtrations`]: filtration volumes, Duistermaat-Heckman measures and
//!   flag-ideal test curve values.
//! * [`test_curves`]: test curves of divisors and their energies, entropy and
//!   twisted Mabuchi functional.
//! * [`thresholds`]: S-invariants, delta search and the delta-type quotients.
//! * [`problem`] and [`export`]: the JSON problem format and report output.

pub mod error;
pub mod export;
pub mod filtrations;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod poly;
pub mod problem;
pub mod rational;
pub mod test_curves;
pub mod thresholds;
pub mod toric;
pub mod volume_fn;

pub use error::{Error, Result};
pub use rational::Rational;
