//! Curvature data of the quantum Hilbert field over compact rank-one
//! symmetric spaces: the radial integrals q_χ(τ), their log-derivatives,
//! closed-form asymptotics, and exact centrality certificates deciding
//! (projective) flatness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod flatness;
pub mod gamma;
pub mod hypergeom;
pub mod quadrature;
pub mod rational;
pub mod spaces;

pub use error::{Error, Result};
pub use flatness::{FlatnessReport, Verdict};

pub use hypergeom::RationalPoly;
pub use quadrature::{QPParams, QuadratureResult};
pub use spaces::{ChiParams, Family, RootData};
