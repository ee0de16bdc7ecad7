//! Input-driven finite-dimensional quantum channels in the Gell-Mann/Bloch
//! representation, viewed as non-homogeneous state-affine systems
//! `x_t = p(z_t) x_{t-1} + q(z_t)`.
//!
//! - [`numerics`]: dense complex linear algebra kernel.
//! - [`basis`]: Gell-Mann bases, coordinates, Bloch vectors, density matrices.
//! - [`channels`]: Kraus sets, CPTP checks, named and input-driven channels.
//! - [`lindblad`]: Liouvillians, propagators, and closed-form qubit examples.
//! - [`sas`]: state-affine decomposition, filters, fixed points, echo-state certificates.

// NaN-rejecting guards are written as `!(x >= bound)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod channels;
pub mod lindblad;
pub mod numerics;
pub mod rng;
pub mod sas;

pub use basis::{BlochVector, DensityMatrix, GellMannBasis};
pub use channels::{InputDomain, KrausSet, LinearMap, ParamChannel};
pub use lindblad::{LindbladModel, Propagator, QubitExample};
pub use sas::{AffineBlock, SasModel, SuperOpMatrix};
