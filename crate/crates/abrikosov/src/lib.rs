//! Stability landscape of Abrikosov vortex lattices near the second critical field.
//!
//! The lattice of shape `τ` is normalized to cell area `2π`. For a Bloch
//! characteristic `q = b − aτ` the crate evaluates
//!
//! ```text
//! γ_k(τ) = 2⟨|φ₀|²|φ_k|²⟩ + |⟨φ₀² φ̄_k φ̄_{−k}⟩| − ⟨|φ₀|⁴⟩
//! ```
//!
//! through Gaussian lattice sums with explicit tail bounds, minimizes it over the
//! Brillouin zone, and checks the result against brute-force quadrature and a
//! truncated Galerkin diagonalization of the fiber Hessian.

pub mod error;
pub mod fiber_spectrum;
pub mod lattice_geometry;
pub mod lattice_sums;
pub mod minimize;
pub mod quadrature_oracle;
pub mod stability_functions;
pub mod theta;

pub use error::{Error, Result};
pub use lattice_geometry::{Characteristic, LatticeFrame, Mobius, ShapeParameter};
pub use lattice_sums::CertifiedValue;

pub type C64 = num_complex::Complex64;
