//! Surfaces from the generalized Weierstrass representation, the mKdV
//! hierarchy acting on their inducing potentials, and the Willmore energy of
//! tori of revolution.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod fmt;
pub mod mesh;
pub mod mkdv;
pub mod ode;
pub mod quadrature;
pub mod revolution;
pub mod spectral;
pub mod weierstrass;
pub mod willmore;

pub use error::{Error, Result};
pub use mesh::SurfaceMesh;
pub use spectral::{Parity, PeriodicProfile};
